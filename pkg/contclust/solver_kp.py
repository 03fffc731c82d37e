"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the (k,p)-clustering rounding oracle (k-median for p=1, k-means for p=2).
It runs the fair k-median pipeline with powered distances and no radii.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

"""

import logging

import numpy as np

from ._configs import TAU_CUT, SNAP_TOL, kp_factor
from .contclust_exceptions import CertificateFailure
from .core_metric import center_distances
from .lp_engine import markov_holds, markov_tolerance
from .results import Accept, Cut, Certificate
from .solver_fair import build_profile, sep_fair, open_representatives, make_solution, grid_slack

logger = logging.getLogger(__name__)


def kp_radius(sol, p):
    """R(v) = 2^(1/p) * C_v where C_v = U_v^(1/p)."""
    u = np.maximum(sol.u, 0.0)
    return (2.0 * u) ** (1.0 / p)


def filter_kp(inst, spec, sol):
    return build_profile(inst, sol, kp_radius(sol, spec.p))


####################################################################################################
#
#
def markov_check_kp(sol, v, t, p):
    """
    True when U_v >= rho_t^p * (1 - y(v, rho_t)) holds up to the Markov tolerance
    n * TAU_LP * R_max(v)^p.

    """
    tau = markov_tolerance(sol.n, sol.grid.r_max[v], p)
    return markov_holds(sol, v, t, p, tau)


####################################################################################################
#
#
def attempt_round_kp(inst, spec, sol, opt_g):
    """
    Rounding oracle for (k,p)-clustering.

    Filtering uses R(v) = 2^(1/p) C_v; the separation cut and the consolidation are the fair
    k-median ones with c_j^p costs. The result is certified against
    sum_v d(v,S)^p <= 2^(2p+1) opt_g + slack.

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec
        A kp problem.

    sol : FractionalSolution

    opt_g : float

    Returns
    -------
    Accept or Cut

    """
    p = spec.p
    profile = filter_kp(inst, spec, sol)

    cut = sep_fair(sol, profile, spec.k)
    if cut is not None:
        violation = sum(sol.ball(j, t) for j, t, _ in cut.balls) - spec.k
        return Cut(cut, violation)

    opened, inp = open_representatives(inst, sol, profile, spec.k, p)
    centers = [inst.clients[j] for j in opened]
    d, _ = center_distances(inst, centers)
    cost = float(np.sum(d ** p))

    factor = kp_factor(p)
    n = inst.n
    tau = max(markov_tolerance(n, sol.grid.r_max[v], p) for v in range(n))
    moved = 0.0 if inp is None else float(sum(inp.unit_costs()))
    bound = factor * opt_g + factor * (n * tau + SNAP_TOL * moved) + grid_slack(profile, opt_g, factor, p) + TAU_CUT

    if cost > bound:
        raise CertificateFailure(f'(k,p) rounding with p={p} produced cost {cost:.6g} against bound {bound:.6g} '
                                 f'(opt_g {opt_g:.6g}, {len(profile.reps)} representatives, opened {sorted(opened)})')

    logger.debug('kp rounding opened %d centers, cost %.6g against bound %.6g', len(opened), cost, bound)
    certificate = Certificate(factor_bound=factor, bound=bound)
    return Accept(make_solution(inst, opened, cost, opt_g, certificate))
