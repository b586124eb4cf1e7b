#!/usr/bin/env python3
"""
Runner script for the Ricci flow disc laboratory

    python run_ricci_disc.py exact bigbang -T 1
    python run_ricci_disc.py construct --initial restricted-hyperbolic:R=2.0
"""

import sys
import os

# Add project root to path
PROJECT_ROOT = os.path.abspath(os.path.dirname(__file__))
sys.path.append(PROJECT_ROOT)

from scripts.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
