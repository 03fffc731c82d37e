"""
contclust - continuous clustering and facility location by round-or-cut.

This includes internal configuration stuff: tolerances, defaults, keywords and the
per-run SolverConfig.


.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

Be kind to each other. 

"""

import math
from dataclasses import dataclass, fields, replace

from .contclust_exceptions import ContclustException

# LP feasibility tolerance (absolute, after rescaling)
TAU_LP = 1e-7

# a cut is only admitted when violated by more than this
TAU_CUT = 1e-6

# triangle inequality slack, relative to the diameter
TAU_TRI_REL = 1e-9

# masses within this of 1/2 or 1 are snapped onto it
SNAP_TOL = 1e-5

# radii closer than this (relative to the radius) are one grid point
GRID_MERGE_REL = 1e-12

# every half distance h also puts h * (1 - HALF_SHRINK) on the grid
HALF_SHRINK = 1e-6

UFL_BETA = math.exp(-2.0)
UFL_FACTOR = 2.0 / (1.0 - UFL_BETA)

FAIR_FACTOR = 8.0
FAIR_RADIUS_FACTOR = 8.0
KCWO_FACTOR = 2.0

ENUMERATION_BUDGET = 10**7
ITERATION_CAP_FACTOR = 10
LP_METHOD = 'highs'

KIND_UFL = 'ufl'
KIND_FAIR = 'fair_kmedian'
KIND_KP = 'kp'
KIND_KCWO = 'kcwo'
KINDS = [KIND_UFL, KIND_FAIR, KIND_KP, KIND_KCWO]

# lp_norm keyword -> scipy cdist metric
NORMS = {'1': 'cityblock',
         '2': 'euclidean',
         'inf': 'chebyshev'}

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_LIMIT = 3


def kp_factor(p):
    """Approximation factor 2^(2p+1) certified for (k,p)-clustering."""
    return 2.0 ** (2 * p + 1)


####################################################################################################
#
#    
@dataclass(frozen=True)
class SolverConfig:
    """
    Per-run tunables. Any field left as None is filled in by ``resolved()`` from the
    number of clients.

    Parameters
    ----------
    eps_grid : float or None
        Multiplicative mesh spacing of the radius grid. Default 1/n^2.

    eps_abs : float or None
        Additive mesh spacing of the radius grid, also the absolute bisection tolerance.
        Default 1/n^2.

    mesh : bool
        If False only the structural radii are placed on the grid.

    iteration_cap : int or None
        Maximum number of LP solves per opt_g probe. Default 10 * n * (largest grid).

    seed : int
        Seed used by instance generators.

    retain_cuts : bool
        Keep FAIR / KCWO cuts between opt_g probes.

    """
    eps_grid: float = None
    eps_abs: float = None
    mesh: bool = True
    iteration_cap: int = None
    seed: int = 0
    retain_cuts: bool = True

    def __post_init__(self):
        for name in ('eps_grid', 'eps_abs'):
            value = getattr(self, name)
            if value is not None and not (value > 0 and math.isfinite(value)):
                raise ContclustException(f"config '{name}' must be a positive finite number, got {value}")

        if self.iteration_cap is not None and (not isinstance(self.iteration_cap, int) or self.iteration_cap < 1):
            raise ContclustException(f"config 'iteration_cap' must be a positive integer, got {self.iteration_cap}")

        if type(self.mesh) != bool:
            raise ContclustException("config 'mesh' must be a boolean")

        if type(self.retain_cuts) != bool:
            raise ContclustException("config 'retain_cuts' must be a boolean")

    def resolved(self, n):
        default = 1.0 / max(n, 1) ** 2
        return replace(self,
                       eps_grid=default if self.eps_grid is None else self.eps_grid,
                       eps_abs=default if self.eps_abs is None else self.eps_abs)

    def cap_for(self, n, grid_size):
        if self.iteration_cap is not None:
            return self.iteration_cap
        return ITERATION_CAP_FACTOR * max(n, 1) * max(grid_size, 1)

    @classmethod
    def from_dict(cls, data):
        if data is None:
            return cls()

        if not isinstance(data, dict):
            raise ContclustException("'config' must be a mapping")

        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ContclustException(f"unknown config keys: {', '.join(unknown)}")

        return cls(**data)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) != f.default}
