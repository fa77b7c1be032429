#!/usr/bin/env python3
"""Run every experiment and write CSV/JSON reports (same as `nldiffusion all`)."""
import sys

from nldiffusion.cli import main

if __name__ == "__main__":
    sys.exit(main(["all", *sys.argv[1:]]))
