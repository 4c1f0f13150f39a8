"""Build, detect and disarm PDF/TIFF polyglot files."""

__version__ = "0.1.0"
