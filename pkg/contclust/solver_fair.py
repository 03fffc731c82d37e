"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the fair k-median rounding oracle: radius filtering, the half-distance
separation cut, consolidation onto representatives and the fairness certificate. The
filtering / consolidation pipeline is shared with the (k,p) oracle in solver_kp.

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

from ._configs import TAU_CUT, SNAP_TOL, HALF_SHRINK, FAIR_FACTOR, FAIR_RADIUS_FACTOR
from .contclust_exceptions import GridMissingRadius, InvariantBreach, CertificateFailure
from .core_metric import center_distances
from .dlp_rounding import DlpInput, round_dlp
from .lp_engine import SepCut, FAMILY_FAIR, markov_tolerance
from .results import Accept, Cut, Certificate, Solution

logger = logging.getLogger(__name__)


####################################################################################################
#
#
@dataclass(frozen=True)
class FairProfile:
    """
    Result of radius filtering.

    radius : R(v) per client
    grid_radius : R(v) rounded up onto v's grid, the radius filtering actually uses
    reps : representatives in picking order
    child : per representative (aligned with ``reps``) the clients it absorbed
    neighbor : per representative the client position of the nearest other representative
        s(j); a lone representative is its own neighbor
    half : a(j) = d(j, s(j)) / 2, or R_max(j) for a lone representative
    half_index : grid index of a(j) on j's grid
    ball_index : grid index of b(j), the largest radius of j's grid strictly below a(j);
        R_max(j) for a lone representative
    ball_radius : b(j)

    """
    radius: np.ndarray
    grid_radius: np.ndarray
    reps: tuple
    child: tuple
    neighbor: tuple
    half: tuple
    half_index: tuple
    ball_index: tuple
    ball_radius: tuple

    def children(self, j):
        return self.child[self.reps.index(j)]

    @property
    def weights(self):
        return tuple(len(c) for c in self.child)

    def rounding_excess(self, p):
        """sum_v R^(v)^p - R(v)^p over the clients, the price of filtering on the grid."""
        return float(np.sum(np.maximum(self.grid_radius ** p - self.radius ** p, 0.0)))


####################################################################################################
#
#
def filter_by_radius(cd, radius):
    """
    Greedy filtering: repeatedly pick the uncovered client with the smallest radius (ties by
    index) and let it absorb every uncovered v with d(v, j) <= 2 R(v).

    Returns (reps, child) with child aligned to reps.

    """
    n = cd.shape[0]
    uncovered = np.ones(n, dtype=bool)
    order = sorted(range(n), key=lambda v: (radius[v], v))
    reps, child = [], []
    for j in order:
        if not uncovered[j]:
            continue
        members = np.nonzero(uncovered & (cd[:, j] <= 2.0 * radius))[0]
        reps.append(j)
        child.append(tuple(int(v) for v in members))
        uncovered[members] = False
    return tuple(reps), tuple(child)


def nearest_reps(cd, reps):
    """s(j) for every representative: the closest other one by (distance, index)."""
    if len(reps) == 1:
        return (reps[0],)
    out = []
    for j in reps:
        others = [(cd[j, i], i) for i in reps if i != j]
        out.append(min(others)[1])
    return tuple(out)


def round_to_grid(grid, radius):
    """R^(v): the smallest grid radius of v that is >= R(v), R_max(v) when there is none."""
    out = np.empty(len(radius))
    for v, r in enumerate(radius):
        t = grid.smallest_at_least(v, float(r))
        out[v] = grid.r_max[v] if t is None else grid.radius(v, t)
    return out


def build_profile(inst, sol, radius):
    cd = inst.client_dist
    grid = sol.grid
    radius = np.asarray(radius, dtype=float)
    rounded = round_to_grid(grid, radius)
    reps, child = filter_by_radius(cd, rounded)
    neighbor = nearest_reps(cd, reps)

    half, half_index, ball_index, ball_radius = [], [], [], []
    for j, s in zip(reps, neighbor):
        a = float(grid.r_max[j]) if s == j else float(cd[j, s]) / 2.0
        t = grid.index_of(j, a)
        if t is None:
            raise GridMissingRadius(f'half-distance {a:g} of representative {j} is not on its grid')
        # a(j) > R^(j) for every representative with a neighbor, so t - 1 is still >= R^(j)
        b = t if s == j else t - 1
        half.append(a)
        half_index.append(t)
        ball_index.append(b)
        ball_radius.append(grid.radius(j, b))

    return FairProfile(radius=radius, grid_radius=rounded, reps=reps, child=child, neighbor=neighbor,
                       half=tuple(half), half_index=tuple(half_index),
                       ball_index=tuple(ball_index), ball_radius=tuple(ball_radius))


def filter_fair(inst, spec, sol):
    """
    Filtering with R(v) = min(r(v), 2 C_v).

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec
        A fair_kmedian problem; infinite radii are allowed.

    sol : FractionalSolution

    Returns
    -------
    FairProfile

    """
    radius = np.array([min(spec.radii[v], 2.0 * max(sol.cost(v), 0.0)) for v in range(inst.n)])
    return build_profile(inst, sol, radius)


####################################################################################################
#
#
def sep_fair(sol, profile, k):
    """
    Half-distance separation: the FAIR cut sum_j y(j, b(j)) <= k over the representatives'
    balls just inside the half distance. The balls are pairwise disjoint. The cut is returned
    when it is violated by more than TAU_CUT or when there are more than 2k representatives,
    otherwise None.

    Raises InvariantBreach if there are more than 2k representatives and the cut still holds,
    which cannot happen at a pool-feasible point.

    """
    if len(profile.reps) < 2:
        return None

    ysum = sum(sol.ball(j, t) for j, t in zip(profile.reps, profile.ball_index))
    violation = ysum - k

    if violation <= TAU_CUT and len(profile.reps) > 2 * k:
        raise InvariantBreach(f'{len(profile.reps)} representatives with k={k} but the half-distance cut '
                              f'holds (slack {-violation:.3g})')

    if violation <= TAU_CUT:
        return None

    balls = list(zip(profile.reps, profile.ball_index, profile.ball_radius))
    return SepCut(FAMILY_FAIR, balls, k=k)


####################################################################################################
#
#
def consolidate(inst, sol, profile, k, p=1):
    """
    Moves the mass of every representative's ball B(j, b(j)) onto the representative.

    z_j = min(y(j, b(j)), 1) with the remainder assigned to s(j). Masses below 1/2 by more
    than the snapping tolerance raise InvariantBreach.

    Returns
    -------
    DlpInput

    """
    cd = inst.client_dist
    position = {j: i for i, j in enumerate(profile.reps)}
    masses, dist = [], []
    for j, s, t in zip(profile.reps, profile.neighbor, profile.ball_index):
        if s == j:
            z = 1.0
        else:
            z = min(sol.ball(j, t), 1.0)
        if z < 0.5 - SNAP_TOL:
            raise InvariantBreach(f'consolidated mass of representative {j} is {z:.6g} < 1/2')
        masses.append(max(z, 0.5))
        dist.append(float(cd[j, s]))

    return DlpInput(reps=profile.reps,
                    weights=profile.weights,
                    neighbor=tuple(position[s] for s in profile.neighbor),
                    dist=tuple(dist),
                    masses=tuple(masses),
                    k=k,
                    p=p)


def open_representatives(inst, sol, profile, k, p=1):
    """Consolidate and round; returns the opened client positions and the DlpInput used."""
    if len(profile.reps) == 1:
        return [profile.reps[0]], None
    inp = consolidate(inst, sol, profile, k, p)
    dsol = round_dlp(inp)
    return [profile.reps[i] for i in dsol.opened], inp


def grid_slack(profile, opt_g, factor, p=1):
    """
    Certificate room for filtering on grid radii and for cut balls of radius
    b(j) >= (1 - HALF_SHRINK) a(j) instead of a(j).

    """
    shrink = (1.0 - HALF_SHRINK) ** (-p) - 1.0
    return factor * (2.0 * profile.rounding_excess(p) + shrink * max(opt_g, 0.0))


def fairness_allowance(r):
    """Largest certified d(v, S) for a client with fairness radius r."""
    return FAIR_RADIUS_FACTOR * r + 6.0 * r * HALF_SHRINK / (1.0 - HALF_SHRINK) + 1e-9 * max(1.0, r)


def make_solution(inst, opened, cost, opt_g, certificate, served=()):
    centers = tuple(sorted(inst.clients[j] for j in opened))
    _, nearest = center_distances(inst, centers)
    assignment = tuple(centers[i] for i in nearest)
    return Solution(centers=centers, assignment=assignment, cost=float(cost), opt_g=float(opt_g),
                    certificate=certificate, served=tuple(served))


####################################################################################################
#
#
def attempt_round_fair(inst, spec, sol, opt_g):
    """
    Rounding oracle for fair k-median.

    Runs filter_fair, then sep_fair (a violated cut is returned as ``Cut``), then consolidation
    and the representative rounding. The opened set is certified against

        sum_v d(v, S) <= 8 opt_g + slack     and     d(v, S) <= 8 r(v) + 6 r(v) s / (1 - s)

    where s is HALF_SHRINK.

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec

    sol : FractionalSolution

    opt_g : float

    Returns
    -------
    Accept or Cut

    Raises
    ------
    CertificateFailure
        If the rounded solution misses either bound.

    """
    profile = filter_fair(inst, spec, sol)

    cut = sep_fair(sol, profile, spec.k)
    if cut is not None:
        violation = sum(sol.ball(j, t) for j, t, _ in cut.balls) - spec.k
        return Cut(cut, violation)

    opened, inp = open_representatives(inst, sol, profile, spec.k)
    centers = [inst.clients[j] for j in opened]
    d, _ = center_distances(inst, centers)
    cost = float(d.sum())

    grid = sol.grid
    n = inst.n
    tau = max(markov_tolerance(n, grid.r_max[v], 1) for v in range(n))
    moved = 0.0 if inp is None else float(sum(inp.unit_costs()))
    slack = FAIR_FACTOR * (n * tau + SNAP_TOL * moved) + grid_slack(profile, opt_g, FAIR_FACTOR) + TAU_CUT
    bound = FAIR_FACTOR * opt_g + slack

    fairness_ok = True
    for v in range(n):
        r = spec.radii[v]
        if not math.isfinite(r):
            continue
        if d[v] > fairness_allowance(r):
            fairness_ok = False
            logger.error('client %d is at distance %.6g from the centers with radius %.6g', v, d[v], r)

    if cost > bound or not fairness_ok:
        raise CertificateFailure(f'fair rounding produced cost {cost:.6g} against bound {bound:.6g} '
                                 f'(opt_g {opt_g:.6g}, fairness {"ok" if fairness_ok else "violated"}, '
                                 f'{len(profile.reps)} representatives, opened {sorted(opened)})')

    logger.debug('fair rounding opened %d of %d representatives, cost %.6g', len(opened), len(profile.reps), cost)
    certificate = Certificate(factor_bound=FAIR_FACTOR, bound=bound, fairness_ok=True)
    return Accept(make_solution(inst, opened, cost, opt_g, certificate))
