#!/usr/bin/env python3
"""
Thue2DLite entry point
"""

import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.interface.cli import main

if __name__ == "__main__":
    sys.exit(main())
