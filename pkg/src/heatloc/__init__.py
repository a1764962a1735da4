"""Heat-kernel concentration and Neumann eigenfunction localization on planar grids."""

from __future__ import annotations

import os

if "NUMBA_THREADING_LAYER" not in os.environ:
    # workqueue needs no TBB/OpenMP runtime and is deterministic to import
    import numba

    numba.config.THREADING_LAYER = "workqueue"

from .discretization import GridMask, NeumannOperator, assemble_neumann_laplacian, rasterize
from .eigensolver import Spectrum, dense_oracle, lowest_eigenpairs, weyl_fit
from .geometry import PRESETS, DomainSpec, PolygonDomain, area, build_domain, contains, unit_square
from .spectral_heat import (
    HeatParams,
    ScalarField,
    concentration,
    concentration_field,
    heat_apply,
    heat_kernel_row,
    heat_trace,
    indicator,
    spectrum_for_time,
    weighted_abs_sum,
)
from .walker import CollisionEstimate, WalkConfig, WalkStream, collision_estimate, walk

__version__ = "0.1.0"

__all__ = [
    "CollisionEstimate",
    "DomainSpec",
    "GridMask",
    "HeatParams",
    "NeumannOperator",
    "PRESETS",
    "PolygonDomain",
    "ScalarField",
    "Spectrum",
    "WalkConfig",
    "WalkStream",
    "area",
    "assemble_neumann_laplacian",
    "build_domain",
    "collision_estimate",
    "concentration",
    "concentration_field",
    "contains",
    "dense_oracle",
    "heat_apply",
    "heat_kernel_row",
    "heat_trace",
    "indicator",
    "lowest_eigenpairs",
    "rasterize",
    "spectrum_for_time",
    "unit_square",
    "walk",
    "weighted_abs_sum",
    "weyl_fit",
]
