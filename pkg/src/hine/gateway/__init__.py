from .app import create_app
from .cli import cli_run, main

__all__ = ["create_app", "cli_run", "main"]
