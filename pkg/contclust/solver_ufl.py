"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the lambda-UFL rounding oracle: threshold filtering at every breakpoint
alpha in (e^-2, 1], the matching separation cut, and the cheapest rounded solution.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

Be kind to each other.

"""

import logging
from dataclasses import dataclass

import numpy as np

from ._configs import TAU_LP, TAU_CUT, UFL_BETA, UFL_FACTOR
from .contclust_exceptions import NoRadius, CertificateFailure
from .core_metric import center_distances
from .lp_engine import SepCut, FAMILY_UFL, markov_tolerance
from .results import Accept, Cut, Certificate
from .solver_fair import make_solution

logger = logging.getLogger(__name__)


####################################################################################################
#
#
@dataclass(frozen=True)
class AlphaProfile:
    """
    Filtering at threshold alpha.

    radius_index / radius : r_alpha(v) per client as a grid index and as a distance
    reps : representatives in picking order
    child : clients absorbed by each representative (aligned with ``reps``)

    """
    alpha: float
    radius_index: tuple
    radius: np.ndarray
    reps: tuple
    child: tuple


def alpha_radius_index(sol, v, alpha):
    """Smallest grid index t with y(v, rho_t) >= alpha (up to TAU_LP)."""
    hits = np.nonzero(sol.y[v] >= alpha - TAU_LP)[0]
    if hits.size == 0:
        raise NoRadius(f'client {v} never reaches ball mass {alpha:.6g} on its grid')
    return int(hits[0])


####################################################################################################
#
#
def filter_ufl(inst, sol, alpha):
    """
    Filtering for lambda-UFL at threshold ``alpha``.

    Repeatedly picks the uncovered client with the smallest r_alpha (ties by index) and lets
    it absorb every uncovered v with d(v, j) <= r_alpha(v) + r_alpha(j).

    Parameters
    ----------
    inst : MetricInstance

    sol : FractionalSolution

    alpha : float
        Threshold in (e^-2, 1].

    Returns
    -------
    AlphaProfile

    """
    n = inst.n
    cd = inst.client_dist
    idx = tuple(alpha_radius_index(sol, v, alpha) for v in range(n))
    radius = np.array([sol.grid.radius(v, t) for v, t in enumerate(idx)])

    uncovered = np.ones(n, dtype=bool)
    reps, child = [], []
    for j in sorted(range(n), key=lambda v: (radius[v], v)):
        if not uncovered[j]:
            continue
        members = np.nonzero(uncovered & (cd[:, j] <= radius + radius[j]))[0]
        reps.append(j)
        child.append(tuple(int(v) for v in members))
        uncovered[members] = False

    return AlphaProfile(alpha=alpha, radius_index=idx, radius=radius, reps=tuple(reps), child=tuple(child))


def breakpoints(sol):
    """
    Sorted distinct values of min(y(v, rho), 1) lying in (e^-2, 1], always including 1.
    The filtering outcome is constant between consecutive breakpoints.

    """
    values = {1.0}
    for v in range(sol.n):
        for y in np.minimum(sol.y[v], 1.0):
            if UFL_BETA < y <= 1.0:
                values.add(float(y))
    return sorted(values)


def sep_ufl(sol, profile, lam, opt_g):
    """The UFL_ALPHA cut over the representatives' r_alpha balls (not checked for violation)."""
    balls = [(j, profile.radius_index[j], profile.radius[j]) for j in profile.reps]
    return SepCut(FAMILY_UFL, balls, lam=lam, opt_g=opt_g)


####################################################################################################
#
#
def attempt_round_ufl(inst, spec, sol, opt_g):
    """
    Rounding oracle for lambda-UFL.

    Every breakpoint alpha is tried in increasing order. The first one whose cut
    lam * sum_j y(j, r_alpha(j)) + sum_v C_v <= opt_g is violated by more than TAU_CUT is
    returned as ``Cut``. If none is, the cheapest of the solutions that open every
    representative is accepted; it is certified against

        cost <= 2/(1-e^-2) * (opt_g + sum_v g_v) + slack

    with g_v the largest grid gap of client v below r_1(v).

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec
        A ufl problem.

    sol : FractionalSolution

    opt_g : float

    Returns
    -------
    Accept or Cut

    """
    lam = spec.lam
    total_cost = float(np.sum(sol.u))

    best = None
    for alpha in breakpoints(sol):
        profile = filter_ufl(inst, sol, alpha)
        ysum = sum(sol.ball(j, profile.radius_index[j]) for j in profile.reps)
        violation = lam * ysum + total_cost - opt_g
        if violation > TAU_CUT:
            return Cut(sep_ufl(sol, profile, lam, opt_g), violation)

        d, _ = center_distances(inst, [inst.clients[j] for j in profile.reps])
        cost = lam * len(profile.reps) + float(d.sum())
        if best is None or cost < best[0]:
            best = (cost, profile)

    cost, profile = best
    grid = sol.grid
    n = inst.n
    gaps = 0.0
    for v in range(n):
        gaps += grid.max_gap_below(v, alpha_radius_index(sol, v, 1.0))

    tau = markov_tolerance(n, float(np.max(grid.r_max)), 1)
    bound = UFL_FACTOR * (opt_g + gaps + TAU_CUT + tau) * (1.0 + 1e-6)

    if cost > bound:
        raise CertificateFailure(f'UFL rounding produced cost {cost:.6g} against bound {bound:.6g} '
                                 f'(opt_g {opt_g:.6g}, gap slack {gaps:.3g}, alpha {profile.alpha:.6g})')

    logger.debug('UFL rounding accepted alpha=%.6g with %d centers, cost %.6g', profile.alpha, len(profile.reps), cost)
    certificate = Certificate(factor_bound=UFL_FACTOR, bound=bound)
    return Accept(make_solution(inst, profile.reps, cost, opt_g, certificate))
