"""Entry point for ``python -m speech_segmenter``."""

import sys

from .cli import main

sys.exit(main())
