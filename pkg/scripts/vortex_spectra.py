#!/usr/bin/env python3
"""
Run one vortex-spectra command from a checkout.

Usage:
    python scripts/vortex_spectra.py analyze data/profiles/scarcity.toml
    python scripts/vortex_spectra.py scan-dispersion data/profiles/scarcity.toml --m 3 --regime scarcity --format csv
    python scripts/vortex_spectra.py mode0 data/profiles/abundance.toml --window 0.01:2.0
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
