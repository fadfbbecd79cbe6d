"""Allow running the CLI via ``python -m src``."""

from src.cli import main

main()
