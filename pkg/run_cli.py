"""
Long-form Speech Segmenter - Command Line

Checks dependencies, then runs the command-line interface.
"""
import sys
from check_dependencies import prompt_install_missing


if __name__ == "__main__":
    # Check dependencies before importing the package
    if not prompt_install_missing():
        print("\nExiting due to missing dependencies.", file=sys.stderr)
        sys.exit(1)

    from speech_segmenter.cli import main
    sys.exit(main())
