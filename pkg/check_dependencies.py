"""
Dependency checker for speech_segmenter

Checks for and offers to install missing dependencies.
"""
import sys
import subprocess


# (import name, pip requirement, display name)
PACKAGES = [
    ("numpy", "numpy>=1.24.0", "numpy"),
    ("PIL", "Pillow>=10.0.0", "Pillow"),
    ("tqdm", "tqdm>=4.65.0", "tqdm"),
    ("sacrebleu", "sacrebleu>=2.3.0", "sacrebleu"),
]


def check_python_version():
    """Check if Python version meets minimum requirements (3.8+)"""
    version = sys.version_info
    version_str = f"{version.major}.{version.minor}.{version.micro}"

    if (version.major, version.minor) >= (3, 8):
        return True, f"Python {version_str}"
    return False, f"Python {version_str} (requires 3.8+)"


def check_package(import_name, display_name):
    """
    Check if a package can be imported.

    Returns:
        tuple: (installed: bool, message: str)
    """
    try:
        module = __import__(import_name)
    except ImportError:
        return False, f"{display_name} not installed"
    version = getattr(module, "__version__", "unknown version")
    return True, f"{display_name} {version}"


def install_package(package_name):
    """
    Install a package using pip

    Args:
        package_name: Name of package to install (e.g., 'numpy>=1.24.0')

    Returns:
        tuple: (success: bool, message: str)
    """
    try:
        print(f"\nInstalling {package_name}...")
        subprocess.check_call(
            [sys.executable, "-m", "pip", "install", package_name],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE
        )
        return True, f"Successfully installed {package_name}"
    except subprocess.CalledProcessError as e:
        return False, f"Failed to install {package_name}: {e}"
    except OSError as e:
        return False, f"Error during installation: {e}"


def check_all_dependencies():
    """
    Check all required dependencies

    Returns:
        tuple: (all_ok: bool, results: dict)
    """
    results = {'Python': check_python_version()}
    for import_name, _, display_name in PACKAGES:
        results[display_name] = check_package(import_name, display_name)

    all_ok = all(status for status, _ in results.values())
    return all_ok, results


def prompt_install_missing():
    """
    Check dependencies and prompt user to install missing ones

    Progress goes to standard error so that standard output stays free for
    reports.

    Returns:
        bool: True if all dependencies are available, False otherwise
    """
    def say(text=""):
        print(text, file=sys.stderr)

    all_ok, results = check_all_dependencies()
    if all_ok:
        return True

    for package, (status, message) in results.items():
        icon = "✓" if status else "✗"
        say(f"{icon} {package}: {message}")

    if not results['Python'][0]:
        say("\n⚠ Python version is too old!")
        say("This application requires Python 3.8 or newer.")
        say(f"You have: {results['Python'][1]}")
        return False

    missing_packages = [
        requirement for _, requirement, display_name in PACKAGES
        if not results[display_name][0]
    ]
    say(f"\nMissing packages: {', '.join(missing_packages)}")

    if not sys.stdin.isatty():
        say("To install them, run:")
        say(f"  pip install {' '.join(missing_packages)}")
        return False

    response = input("\nWould you like to install them now? (y/n): ").strip().lower()
    if response not in ['y', 'yes']:
        say("\nCannot continue without required dependencies.")
        say("To install manually, run:")
        say(f"  pip install {' '.join(missing_packages)}")
        return False

    all_installed = True
    for package in missing_packages:
        success, message = install_package(package)
        say(message)
        if not success:
            all_installed = False

    if all_installed:
        say("\n✓ All packages installed successfully!")
        return True

    say("\n✗ Some packages failed to install.")
    say("Please install them manually using:")
    say(f"  pip install {' '.join(missing_packages)}")
    return False


if __name__ == "__main__":
    if prompt_install_missing():
        print("Ready to run!")
    else:
        print("\nPlease install missing dependencies and try again.")
