#!/usr/bin/env python3
"""
Hubbard VQE Lab - Fermi-Hubbard VQE simulation, optimization and error mitigation
Main entry point for the command line
"""

import sys
import os

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from cli.app import main

if __name__ == "__main__":
    sys.exit(main())
