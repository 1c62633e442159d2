import sys
from pathlib import Path

# allow running pytest straight from a checkout, without an install
sys.path.insert(0, str(Path(__file__).parent / "src"))
