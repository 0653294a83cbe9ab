import pytest

from speech_segmenter.config import SegmenterConfig, default_workers


def test_defaults():
    config = SegmenterConfig(maxlen_s=20)
    assert config.algorithm == "proposed"
    assert (config.threshold, config.minlen_s, config.expand_s) == (0.5, 0.2, 0.06)


@pytest.mark.parametrize("kwargs,message", [
    ({"algorithm": "vad"}, "algorithm must be one of"),
    ({"threshold": 0.0}, "threshold must be in"),
    ({"threshold": 1.0}, "threshold must be in"),
    ({"minlen_s": 25.0}, "minlen < maxlen"),
    ({"minlen_s": -1.0}, "minlen < maxlen"),
    ({"expand_s": -0.1}, "expand must be non-negative"),
])
def test_validation(kwargs, message):
    with pytest.raises(ValueError, match=message):
        SegmenterConfig(maxlen_s=20, **kwargs)


def test_all_errors_are_reported():
    with pytest.raises(ValueError) as info:
        SegmenterConfig(maxlen_s=20, threshold=2.0, expand_s=-1.0)
    assert "threshold" in str(info.value)
    assert "expand" in str(info.value)


def test_replace_revalidates():
    config = SegmenterConfig(maxlen_s=20)
    assert config.replace(maxlen_s=8).maxlen_s == 8
    with pytest.raises(ValueError):
        config.replace(maxlen_s=0.1)


def test_to_dict():
    assert SegmenterConfig(maxlen_s=10, algorithm="pdac").to_dict() == {
        "maxlen_s": 10,
        "algorithm": "pdac",
        "threshold": 0.5,
        "minlen_s": 0.2,
        "expand_s": 0.06,
    }


@pytest.mark.parametrize("env,expected", [
    ({}, 1),
    ({"SEGMENTER_WORKERS": "4"}, 4),
    ({"SEGMENTER_WORKERS": "zero"}, 1),
    ({"SEGMENTER_WORKERS": "0"}, 1),
])
def test_default_workers(env, expected):
    assert default_workers(env) == expected


def test_default_workers_reads_environment(monkeypatch):
    monkeypatch.setenv("SEGMENTER_WORKERS", "3")
    assert default_workers() == 3
