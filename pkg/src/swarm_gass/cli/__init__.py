"""Command-line interface, run configuration and checkpoint files."""

from .main import main
