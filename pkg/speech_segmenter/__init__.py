"""
Long-form Speech Segmenter

This package turns frame-level segment-membership probabilities into
sentence-like audio segments and scores segmentations with the long-form
evaluation protocol (resegmentation, WER, punctuation F1, BLEU, maxlen sweeps).

Modules:
    probabilities: Frame probability / label streams, validation, synthesis
    segments: Segment types and segment statistics
    config: Segmenter hyper-parameters and defaults
    formats: Probability, segment, label, trace and text file I/O
    chunker: Fixed-size windowing, overlap merging, training labels
    segmenters: Proposed algorithm and pDAC / pTHR / fixed baselines
    alignment: Edit distance, WER and hypothesis resegmentation
    punctuation: Punctuation precision / recall / F1
    bleu: Corpus BLEU
    boundaries: Boundary F1 against an oracle segmentation
    sweep: maxlen / threshold grid sweeps with pluggable scorers
    manifest: Run manifests written next to outputs
    timeline: Timeline images of probabilities and segments (Pillow)
    cli: Command-line interface
"""

__version__ = "1.0.0"
