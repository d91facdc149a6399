#!/usr/bin/env python3
"""
Script runner that sets up the Python path correctly
"""

import os
import sys

# Make the `src` package importable from a checkout
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.main import main

if __name__ == "__main__":
    main()
