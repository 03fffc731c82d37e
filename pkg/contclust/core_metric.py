"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the instance model: finite metrics, problem descriptions, metric
validation, rescaling and the per-client radius grids every LP variable lives on.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

Be kind to each other.

"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ._configs import (TAU_TRI_REL, GRID_MERGE_REL, HALF_SHRINK, KIND_UFL, KIND_FAIR, KIND_KP, KIND_KCWO, KINDS, NORMS)
from .contclust_exceptions import ContclustException, AllCoincident

logger = logging.getLogger(__name__)


####################################################################################################
#
#
@dataclass(frozen=True, eq=False)
class MetricInstance:
    """
    A finite metric (X, d) together with the client subset C.

    ``dist`` is the full point-by-point distance matrix. ``clients`` lists the point ids of
    the clients in order; everything solver-side indexes clients by their position in this
    tuple. ``candidate_points`` is the finite stand-in for X and is only used by the exact
    oracle and the generators; it defaults to every point.

    """
    dist: np.ndarray
    clients: tuple
    candidate_points: tuple = None

    def __post_init__(self):
        dist = np.array(self.dist, dtype=float)
        dist.setflags(write=False)
        object.__setattr__(self, 'dist', dist)
        object.__setattr__(self, 'clients', tuple(int(c) for c in self.clients))

        if self.candidate_points is None:
            candidates = tuple(range(dist.shape[0])) if dist.ndim == 2 else ()
        else:
            candidates = tuple(int(c) for c in self.candidate_points)
        object.__setattr__(self, 'candidate_points', candidates)

    @property
    def point_count(self):
        return int(self.dist.shape[0])

    @property
    def n(self):
        return len(self.clients)

    @property
    def client_dist(self):
        """n x n matrix of client-to-client distances (in client order)."""
        idx = np.asarray(self.clients, dtype=int)
        return self.dist[np.ix_(idx, idx)]

    @property
    def client_diameter(self):
        if self.n < 2:
            return 0.0
        return float(self.client_dist.max())


####################################################################################################
#
#
@dataclass(frozen=True)
class ProblemSpec:
    """
    Which problem is being solved and its parameters. Only the fields of the active kind
    are set; build one with the ``ufl``, ``fair``, ``kp`` or ``kcwo`` constructors.

    ``radii`` is a tuple aligned with the client order, entries may be ``math.inf``.

    """
    kind: str
    lam: float = None
    k: int = None
    radii: tuple = None
    p: int = None
    m: int = None

    @classmethod
    def ufl(cls, lam):
        return cls(kind=KIND_UFL, lam=float(lam))

    @classmethod
    def fair(cls, k, radii):
        return cls(kind=KIND_FAIR, k=int(k), radii=tuple(float(r) for r in radii))

    @classmethod
    def kp(cls, k, p=1):
        return cls(kind=KIND_KP, k=int(k), p=int(p))

    @classmethod
    def kcwo(cls, k, m):
        return cls(kind=KIND_KCWO, k=int(k), m=int(m))

    @property
    def power(self):
        """Distance exponent of the objective (1 for everything except kp)."""
        return self.p if self.kind == KIND_KP else 1

    def finite_radii(self):
        return [r for r in self.radii if math.isfinite(r)]

    def validate(self, n):
        """
        Checks the fields of the active kind are set (and only those) and are in range.
        Raises ContclustException otherwise.

        """
        if self.kind not in KINDS:
            raise ContclustException(f"problem kind must be one of {', '.join(KINDS)}, got '{self.kind}'")

        active = {KIND_UFL: {'lam'},
                  KIND_FAIR: {'k', 'radii'},
                  KIND_KP: {'k', 'p'},
                  KIND_KCWO: {'k', 'm'}}[self.kind]

        for name in ('lam', 'k', 'radii', 'p', 'm'):
            is_set = getattr(self, name) is not None
            if is_set and name not in active:
                raise ContclustException(f"field '{name}' is not used by problem kind '{self.kind}'")
            if not is_set and name in active:
                raise ContclustException(f"problem kind '{self.kind}' requires field '{name}'")

        if self.lam is not None and not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ContclustException(f"lambda must be a nonnegative finite number, got {self.lam}")

        if self.k is not None and self.k < 1:
            raise ContclustException(f"k must be a positive integer, got {self.k}")

        if self.p is not None and self.p < 1:
            raise ContclustException(f"p must be a positive integer, got {self.p}")

        if self.m is not None and not (1 <= self.m <= n):
            raise ContclustException(f"m must satisfy 1 <= m <= n={n}, got {self.m}")

        if self.radii is not None:
            if len(self.radii) != n:
                raise ContclustException(f'expected {n} fairness radii (one per client), got {len(self.radii)}')
            for v, r in enumerate(self.radii):
                if math.isnan(r) or r < 0:
                    raise ContclustException(f'fairness radius of client {v} must be nonnegative, got {r}')

    def scaled(self, scale):
        """The same problem after every distance is multiplied by ``scale``."""
        if self.kind == KIND_UFL:
            return ProblemSpec.ufl(self.lam * scale)
        if self.kind == KIND_FAIR:
            return ProblemSpec.fair(self.k, [r * scale for r in self.radii])
        return self


####################################################################################################
#
#
@dataclass(frozen=True, eq=False)
class RadiusGrid:
    """
    Per-client strictly increasing radii 0 = rho_0 < ... < rho_T = R_max(v). Ball variables
    are addressed by (client position, grid index).

    """
    radii: tuple
    r_max: np.ndarray

    @property
    def n(self):
        return len(self.radii)

    def size(self, v):
        return len(self.radii[v])

    @property
    def total_size(self):
        return int(sum(len(r) for r in self.radii))

    @property
    def max_size(self):
        return max((len(r) for r in self.radii), default=0)

    def radius(self, v, t):
        return float(self.radii[v][t])

    def index_of(self, v, rho):
        """Grid index of radius ``rho`` for client ``v`` or None when it is not on the grid."""
        grid = self.radii[v]
        t = int(np.searchsorted(grid, rho))
        for cand in (t - 1, t):
            if 0 <= cand < len(grid) and abs(grid[cand] - rho) <= GRID_MERGE_REL * max(1.0, abs(rho)):
                return cand
        return None

    def smallest_at_least(self, v, x):
        """Index of the smallest grid radius >= x (up to the merge tolerance), or None."""
        grid = self.radii[v]
        t = int(np.searchsorted(grid, x - GRID_MERGE_REL * max(1.0, abs(x))))
        if t >= len(grid):
            return None
        return t

    def max_gap_below(self, v, t):
        """Largest gap between consecutive radii of client v up to index t."""
        if t <= 0:
            return 0.0
        return float(np.max(np.diff(self.radii[v][:t + 1])))


####################################################################################################
#
#
def validate_metric(inst):
    """
    Checks every MetricInstance invariant and reports the breaches. Nothing is raised.

    Parameters
    ----------
    inst : MetricInstance

    Returns
    -------
    list of str
        Empty when the instance is a valid finite metric with a valid client set. Each entry
        names the offending indices.

    """
    violations = []
    dist = inst.dist

    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        return [f'distance matrix is not square: shape {dist.shape}']

    N = dist.shape[0]
    finite = np.isfinite(dist)
    for i, j in zip(*np.nonzero(~finite)):
        violations.append(f'non-finite distance at ({i},{j})')
    if violations:
        return violations

    diam = float(dist.max()) if N else 0.0
    tol = TAU_TRI_REL * diam

    for i in np.nonzero(np.abs(np.diag(dist)) > 0)[0]:
        violations.append(f'nonzero diagonal at {i}')

    for i, j in zip(*np.nonzero(dist < 0)):
        violations.append(f'negative distance at ({i},{j})')

    asym = np.abs(dist - dist.T) > tol
    for i, j in zip(*np.nonzero(np.triu(asym, 1))):
        violations.append(f'asymmetry at ({i},{j})')

    triangles = []
    for j in range(N):
        via = dist[:, j][:, None] + dist[j, :][None, :]
        bad = np.triu(dist > via + tol, 1)
        for i, k in zip(*np.nonzero(bad)):
            triangles.append((int(i), j, int(k)))
    for i, j, k in sorted(triangles):
        violations.append(f'triangle violation ({i},{j},{k})')

    seen = set()
    for c in inst.clients:
        if not 0 <= c < N:
            violations.append(f'client {c} out of range')
        if c in seen:
            violations.append(f'duplicate client {c}')
        seen.add(c)

    candidates = set(inst.candidate_points)
    if len(candidates) != len(inst.candidate_points):
        violations.append('duplicate candidate points')
    for c in inst.candidate_points:
        if not 0 <= c < N:
            violations.append(f'candidate point {c} out of range')
    for c in inst.clients:
        if c not in candidates:
            violations.append(f'client {c} missing from candidate points')

    return violations


####################################################################################################
#
#
def rescale(inst):
    """
    Uniformly rescales the metric so the smallest positive client-to-client distance is 1.

    Parameters
    ----------
    inst : MetricInstance

    Returns
    -------
    tuple
        (scaled instance, scale factor, aspect ratio) where the aspect ratio is the largest
        over the smallest positive client distance.

    Raises
    ------
    AllCoincident
        When no two clients are apart.

    """
    cd = inst.client_dist
    positive = cd[cd > 0]
    if positive.size == 0:
        raise AllCoincident('every pair of clients is at distance 0')

    smallest = float(positive.min())
    aspect = float(positive.max()) / smallest
    scale = 1.0 / smallest

    n = inst.n
    if aspect > n ** 3:
        logger.warning('aspect ratio %.6g exceeds n^3 = %d; the radius grid will be large', aspect, n ** 3)

    scaled = MetricInstance(dist=inst.dist * scale,
                            clients=inst.clients,
                            candidate_points=inst.candidate_points)
    return scaled, scale, aspect


####################################################################################################
#
#
def r_max_for(inst, spec, extra=()):
    """
    Integral truncation point R_max(v) per client. Every optimal solution connects client v
    within R_max(v), which keeps the anchoring constraint valid.

    """
    n = inst.n
    diam = inst.client_diameter

    if spec.kind == KIND_UFL:
        # opening one center at a client costs at most lam + n*diam
        return np.full(n, spec.lam + n * diam)

    if spec.kind == KIND_KP:
        # a cluster center lies within 2*diam of every member
        return np.full(n, 2.0 * diam)

    if spec.kind == KIND_FAIR:
        finite = spec.finite_radii()
        unconstrained = 2.0 * diam if not finite else max(2.0 * diam, diam + max(finite))
        return np.array([max(2.0 * diam, r) if math.isfinite(r) else unconstrained for r in spec.radii])

    largest = max(extra, default=diam)
    return np.full(n, 2.0 * max(largest, diam))


def _merge_sorted(values):
    merged = []
    for x in values:
        if merged and abs(x - merged[-1]) <= GRID_MERGE_REL * max(1.0, abs(x)):
            continue
        merged.append(x)
    return merged


def _mesh(points, eps_grid, eps_abs):
    out = [points[0]]
    for b in points[1:]:
        x = out[-1]
        while True:
            nxt = (1.0 + eps_grid) * x + eps_abs
            if nxt >= b - GRID_MERGE_REL * 1e3 * max(1.0, b):
                break
            out.append(nxt)
            x = nxt
        out.append(b)
    return out


####################################################################################################
#
#
def build_grid(inst, spec, eps_grid=None, eps_abs=None, extra=()):
    """
    Builds the per-client radius grid.

    Every grid contains 0, all client distances d(v,u), all half distances h = d(u,w)/2 and
    the radii h * (1 - HALF_SHRINK) just below them, the fairness radius r(v) when finite,
    the extra radii and R_max(v), all clipped to [0, R_max(v)]. When ``eps_grid`` and
    ``eps_abs`` are both given the grid is refined so that consecutive radii satisfy
    rho_{t+1} <= (1+eps_grid)*rho_t + eps_abs.

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec

    eps_grid : float or None
        Multiplicative mesh spacing. None disables the mesh.

    eps_abs : float or None
        Additive mesh spacing. None disables the mesh.

    extra : iterable of float
        Radii included verbatim (for example a k-center guess).

    Returns
    -------
    RadiusGrid

    """
    extra = [float(x) for x in extra]
    r_max = r_max_for(inst, spec, extra)

    cd = inst.client_dist
    half = cd.ravel() / 2.0
    structural = np.unique(np.concatenate([[0.0], cd.ravel(), half, half * (1.0 - HALF_SHRINK), extra]))

    radii = []
    for v in range(inst.n):
        top = float(r_max[v])
        pts = [x for x in structural if x <= top]
        if spec.kind == KIND_FAIR and math.isfinite(spec.radii[v]) and spec.radii[v] <= top:
            pts.append(spec.radii[v])
        pts.append(top)
        pts = _merge_sorted(sorted(pts))

        if eps_grid is not None and eps_abs is not None and len(pts) > 1:
            pts = _mesh(pts, eps_grid, eps_abs)

        arr = np.array(pts, dtype=float)
        arr.setflags(write=False)
        radii.append(arr)

    r_max = np.array([arr[-1] for arr in radii])
    r_max.setflags(write=False)
    grid = RadiusGrid(radii=tuple(radii), r_max=r_max)
    logger.debug('radius grid built: %d clients, %d radii total, largest %d', inst.n, grid.total_size, grid.max_size)
    return grid


####################################################################################################
#
#
def center_distances(inst, centers):
    """
    d(v, S) for every client v (in client order) and the index into ``centers`` of the nearest
    center. Ties go to the first center listed.

    """
    centers = np.asarray(list(centers), dtype=int)
    if centers.size == 0:
        raise ContclustException('at least one center is needed to evaluate a solution')
    block = inst.dist[np.ix_(np.asarray(inst.clients, dtype=int), centers)]
    nearest = np.argmin(block, axis=1)
    return block[np.arange(block.shape[0]), nearest], nearest


def objective_value(inst, spec, centers, served=None):
    """
    Cost of opening ``centers`` (point ids), recomputed from raw distances.

    For kcwo the value is the largest distance over ``served`` (client point ids); when
    ``served`` is None the m clients closest to the centers are used.

    """
    d, _ = center_distances(inst, centers)

    if spec.kind == KIND_UFL:
        return float(spec.lam * len(set(centers)) + d.sum())

    if spec.kind == KIND_FAIR:
        return float(d.sum())

    if spec.kind == KIND_KP:
        return float(np.sum(d ** spec.p))

    if served is None:
        return float(np.sort(d)[spec.m - 1])
    if len(served) == 0:
        return 0.0
    position = {c: i for i, c in enumerate(inst.clients)}
    return float(d[[position[c] for c in served]].max())


####################################################################################################
#
#
def instance_from_points(points, norm='2', clients=None, candidate_points=None):
    """
    Materializes an lp_norm metric on ``points`` (an array of shape (N, dim)).

    norm is one of '1', '2' or 'inf'. Clients default to every point.

    """
    if norm not in NORMS:
        raise ContclustException(f"norm must be one of {', '.join(NORMS)}, got '{norm}'")

    points = np.atleast_2d(np.asarray(points, dtype=float))
    dist = cdist(points, points, metric=NORMS[norm])
    if clients is None:
        clients = range(points.shape[0])
    return MetricInstance(dist=dist, clients=tuple(clients), candidate_points=candidate_points)


def random_points(n, dim=2, extra=0, rng=None):
    """n client points and ``extra`` candidate points, i.i.d. uniform in [0,1]^dim."""
    rng = np.random.default_rng(rng)
    return rng.random((n + extra, dim))


def clustered_points(n, dim=2, extra=0, centers=3, spread=0.05, rng=None):
    """
    n client points drawn around ``centers`` uniform cluster centers with Gaussian noise of
    standard deviation ``spread``, followed by ``extra`` uniform candidate points.

    """
    rng = np.random.default_rng(rng)
    means = rng.random((max(centers, 1), dim))
    labels = rng.integers(0, means.shape[0], size=n)
    clients = means[labels] + rng.normal(scale=spread, size=(n, dim))
    return np.vstack([clients, rng.random((extra, dim))])
