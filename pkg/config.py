#!/usr/bin/env python3
"""
Configuration file for the Ringforge workbench
Centralized settings for all modules
"""

import logging
import os
from pathlib import Path

import yaml
from dotenv import load_dotenv

load_dotenv()

# ==================== PATHS ====================
PROJECT_ROOT = Path(__file__).parent.absolute()
DATA_DIR = PROJECT_ROOT / "data"
OUTPUT_DIR = PROJECT_ROOT / "output"

# Input files
DEFAULT_INSTANCE_FILE = DATA_DIR / "autf2.ring"
EXPLICIT_COMPLEX_FILE = DATA_DIR / "explicit_complex.cx"
CENSUS_SNAPSHOT_FILE = DATA_DIR / "census_snapshot.yaml"

# Optional overrides
OVERRIDES_FILE = PROJECT_ROOT / "ringforge.yaml"

# ==================== INSTANCE ====================
# One arc unit is pi/3, so a full ring is 6 units
UNITS_PER_TURN = 6
ORIENTATION_SENSITIVE_DEFAULT = False

# ==================== SEARCH BUDGETS ====================
# Node budget shared by every enumerator (RINGFORGE_BUDGET overrides it)
DEFAULT_SEARCH_BUDGET = 200_000
DEFAULT_COMPLETION_CAP = 64

MAX_CENSUS_RADIUS = 4
MAX_LEMMA_RADIUS = 6
MAX_BLOCK_CELLS = 12
MAX_ISOLATION_RADIUS = 4

# Periodic windows: largest period tried, and the node budget spent on each period
PERIODIC_WINDOW_PERIOD = int(os.getenv("RINGFORGE_PERIODIC_PERIOD", 6))
PERIODIC_SEARCH_BUDGET = 20_000
SERIES_D_GAP_BUDGET = 5_000

# ==================== CLASSIFICATION ====================
DEFAULT_WINDOW_RADIUS = 3
W_BLOCK_DEPTH = 6
# layers a core completion must still extend by to count as a lemma branch
CORE_MARGIN = 2
SERIES_A_DEFAULT_HEIGHTS = (1, 1, 1)

# ==================== RING COMPLEX ====================
DEFAULT_STRIP_LENGTH = 6
MAX_CYLINDER_CIRCUMFERENCE = 12
MAX_CYLINDER_HEIGHT = 6
MAX_TORUS_PERIOD = 4
FLAT_WINDOW_RADIUS = 3
COLORING_CHOICE = 0

# ==================== DENSITY MODEL ====================
MONTE_CARLO_CHUNK = 10_000
MAX_LANDAU_P = 200

# ==================== RENDERING ====================
SVG_SCALE = 40.0
SVG_MARGIN = 1.0
DEFAULT_PALETTE = {
    "Y": "#f2c500",
    "R": "#d62728",
    "G": "#2ca02c",
    "B": "#1f77b4",
}

# ==================== LOGGING ====================
LOG_LEVEL = os.getenv("RINGFORGE_LOG_LEVEL", "INFO")  # DEBUG, INFO, WARNING, ERROR
LOG_FILE = OUTPUT_DIR / "ringforge.log"
LOG_TO_CONSOLE = False
SHOW_PROGRESS = True

# ==================== DEBUG MODE ====================
DEBUG = False  # Set to True for verbose output


def _load_overrides():
    """Apply ringforge.yaml overrides when the file exists."""
    global DEFAULT_SEARCH_BUDGET, MAX_CENSUS_RADIUS, MAX_LEMMA_RADIUS
    global MAX_BLOCK_CELLS, MAX_CYLINDER_CIRCUMFERENCE

    if not OVERRIDES_FILE.exists():
        return {}
    with open(OVERRIDES_FILE, "r", encoding="utf-8") as f:
        overrides = yaml.safe_load(f) or {}

    DEFAULT_SEARCH_BUDGET = int(overrides.get("search_budget", DEFAULT_SEARCH_BUDGET))
    MAX_CENSUS_RADIUS = int(overrides.get("max_census_radius", MAX_CENSUS_RADIUS))
    MAX_LEMMA_RADIUS = int(overrides.get("max_lemma_radius", MAX_LEMMA_RADIUS))
    MAX_BLOCK_CELLS = int(overrides.get("max_block_cells", MAX_BLOCK_CELLS))
    MAX_CYLINDER_CIRCUMFERENCE = int(
        overrides.get("max_cylinder_circumference", MAX_CYLINDER_CIRCUMFERENCE)
    )
    return overrides


_OVERRIDES = _load_overrides()


# ==================== LOGGER FACTORY ====================
_configured = False


def get_logger(name):
    """Return a module logger wired to the LOG_* settings."""
    global _configured
    if not _configured:
        root = logging.getLogger("ringforge")
        root.setLevel(getattr(logging, str(LOG_LEVEL).upper(), logging.INFO))
        formatter = logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        if LOG_TO_CONSOLE:
            console = logging.StreamHandler()
            console.setFormatter(formatter)
            root.addHandler(console)
        try:
            OUTPUT_DIR.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(LOG_FILE, encoding="utf-8")
            file_handler.setFormatter(formatter)
            root.addHandler(file_handler)
        except OSError:
            root.addHandler(logging.NullHandler())
        _configured = True
    return logging.getLogger(f"ringforge.{name}")


logger = get_logger("config")


def search_budget():
    """Node budget for enumerators; RINGFORGE_BUDGET wins over the default."""
    raw = os.getenv("RINGFORGE_BUDGET")
    if raw is None or raw == "":
        return DEFAULT_SEARCH_BUDGET
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer RINGFORGE_BUDGET=%r", raw)
        return DEFAULT_SEARCH_BUDGET
    if value <= 0:
        logger.warning("Ignoring non-positive RINGFORGE_BUDGET=%r", raw)
        return DEFAULT_SEARCH_BUDGET
    return value


# ==================== VALIDATION ====================
def validate_config():
    """Validate configuration settings."""
    try:
        OUTPUT_DIR.mkdir(parents=True, exist_ok=True)

        for required in (DEFAULT_INSTANCE_FILE, EXPLICIT_COMPLEX_FILE):
            if not required.exists():
                raise FileNotFoundError(f"missing data file {required}")

        if search_budget() <= 0 or MAX_CENSUS_RADIUS <= 0:
            raise ValueError("budgets must be positive")

        print("✅ Configuration validated successfully")
        return True
    except Exception as e:
        print(f"❌ Configuration validation failed: {e}")
        return False


if __name__ == "__main__":
    print("\n" + "=" * 60)
    print("RINGFORGE - CONFIGURATION")
    print("=" * 60)

    print("\n📁 PATHS:")
    print(f"  Project Root: {PROJECT_ROOT}")
    print(f"  Instance: {DEFAULT_INSTANCE_FILE}")
    print(f"  Explicit Complex: {EXPLICIT_COMPLEX_FILE}")
    print(f"  Census Snapshot: {CENSUS_SNAPSHOT_FILE}")
    print(f"  Output: {OUTPUT_DIR}")

    print("\n🔎 SEARCH BUDGETS:")
    print(f"  Node Budget: {search_budget()}")
    print(f"  Completion Cap: {DEFAULT_COMPLETION_CAP}")
    print(f"  Census Radius <= {MAX_CENSUS_RADIUS}, Lemma Radius <= {MAX_LEMMA_RADIUS}")

    print("\n🧩 RING COMPLEX:")
    print(f"  Strip Length: {DEFAULT_STRIP_LENGTH}")
    print(f"  Cylinder Bounds: ({MAX_CYLINDER_CIRCUMFERENCE}, {MAX_CYLINDER_HEIGHT})")
    print(f"  Torus Period <= {MAX_TORUS_PERIOD}")

    if _OVERRIDES:
        print("\n⚙️  OVERRIDES (ringforge.yaml):")
        for key, value in _OVERRIDES.items():
            print(f"  {key}: {value}")

    print("\n" + "=" * 60)
    if validate_config():
        print("✨ All systems ready!")
    print("=" * 60 + "\n")
