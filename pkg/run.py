"""mottlight entry point.

Runs the command line interface; see mottlight/cli.py for the subcommands.
"""
import sys

from mottlight.cli import main

if __name__ == "__main__":
    sys.exit(main())
