import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from platedeblur import (
    EstimationConfig,
    KernelParams,
    blur,
    make_psf,
    render_plate,
)

GRID_ANGLES = (40, 55, 70, 85, 100, 115, 130)
GRID_LENGTHS = (10, 15, 20, 25, 30, 35, 40)
PLATE_TEXT = "KA-01-1234"


@pytest.fixture(scope="session")
def plate():
    return render_plate(PLATE_TEXT, 256, 256)


@pytest.fixture(scope="session")
def default_config():
    return EstimationConfig()


OPERATING_POINTS = ((70, 24), (70, 25))


@pytest.fixture(scope="session")
def blurred_grid(plate):
    """Noiseless wrap-blurred plates: the acceptance grid cells plus the
    two illustrated operating points."""
    cells = {}
    grid = [(a, l) for a in GRID_ANGLES for l in GRID_LENGTHS]
    for angle, length in grid + list(OPERATING_POINTS):
        psf = make_psf(KernelParams(angle=angle, length=length))
        cells[(angle, length)] = (psf, blur(plate, psf, "wrap"))
    return cells


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
