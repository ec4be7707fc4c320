import csv
import math
import os
from pathlib import Path

import pytest

from wallscale import ClosedFormWall, CrossSection, sample_wall

DATA_DIR = Path(__file__).parent / "data"

# the golden reference case: square-ish cross-section with the limit wall
GOLDEN_CS = CrossSection(l=0.1, d=0.05)
GOLDEN_WALL = ClosedFormWall(alpha=1.0 / math.pi, beta=1.0, theta=0.0)
GOLDEN_L = 26.0
GOLDEN_N = 2049


def golden_dir() -> Path:
    return Path(os.environ.get("WALLSCALE_GOLDEN_DIR", DATA_DIR))


def load_golden(case_id: str, component: str) -> tuple[float, float]:
    """(value, tolerance) from the versioned golden CSV."""
    path = golden_dir() / "golden_energies.csv"
    with open(path) as fh:
        for row in csv.DictReader(fh):
            if row["case_id"] == case_id and row["component"] == component:
                return float(row["value"]), float(row["tolerance"])
    raise KeyError(f"golden entry {case_id}/{component} not found in {path}")


@pytest.fixture(scope="session")
def standard_wall_profile():
    return sample_wall(GOLDEN_WALL, GOLDEN_L, GOLDEN_N)
