import math

import numpy as np
import pytest

from mazecells.arena import Arena, WallArc, ZoneDisc
from mazecells.spatialcells import FiringParams, GridCellParams


@pytest.fixture
def unit_grid():
    """Axis-aligned unit-spacing lattice, zero phases."""
    return GridCellParams(spacing=1.0, orientation=0.0, phase1=0.0, phase2=0.0)


@pytest.fixture
def demo_grid():
    return GridCellParams(spacing=1.0, orientation=math.pi / 4.0, phase1=0.5, phase2=0.0)


@pytest.fixture
def firing():
    return FiringParams(kappa=5.0, zeta=0.3)


@pytest.fixture
def paired_cue_arena():
    """The default training layout: red sector plus three bumper zones."""
    return Arena(
        radius=1.3,
        zones=(
            ZoneDisc(1.04, 0.44, 0.2, 8.0),
            ZoneDisc(1.04, -0.44, 0.2, 8.0),
            ZoneDisc(1.13, 0.0, 0.2, 8.0),
        ),
        walls=(WallArc(-math.pi / 3.0, math.pi / 3.0, "red"),),
    )


def random_grid(rng) -> GridCellParams:
    return GridCellParams(
        spacing=float(rng.uniform(0.3, 1.5)),
        orientation=float(rng.uniform(0.0, math.pi / 3.0)),
        phase1=float(rng.uniform(0.0, 2.0 * math.pi)),
        phase2=float(rng.uniform(0.0, 2.0 * math.pi)),
    )
