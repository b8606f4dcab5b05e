#!/usr/bin/env python3
"""
Spectra of P + theta Q from the command line.

    python projsum_cli.py spectrum --n 64 --p 16 --q 24 --seed 7 --out spectrum.csv
    python projsum_cli.py density --p 0.3 --q 0.5 --out density.csv
    python projsum_cli.py experiment --mode hard-edge --config hard_edge.env --seed 42 --out-dir runs/hard
    python projsum_cli.py selftest
"""
import sys
from pathlib import Path

# Project root
sys.path.insert(0, str(Path(__file__).resolve().parent))

from projsum.cli import main

if __name__ == "__main__":
    sys.exit(main())
