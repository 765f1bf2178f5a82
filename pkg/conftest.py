import sys
from pathlib import Path

# Make the src layout importable without an install.
src = Path(__file__).parent / "src"
if str(src) not in sys.path:
    sys.path.insert(0, str(src))
