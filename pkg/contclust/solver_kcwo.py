"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the k-center with outliers rounding oracle: greedy coverage filtering by
largest cov value, the top-k selection and the coverage separation cut.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

"""

import logging
from dataclasses import dataclass

import numpy as np

from ._configs import TAU_LP, TAU_CUT, KCWO_FACTOR
from .contclust_exceptions import GridMissingRadius, InvariantBreach, CertificateFailure
from .core_metric import center_distances
from .lp_engine import SepCut, FAMILY_KCWO
from .results import Accept, Cut, Certificate
from .solver_fair import make_solution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CovProfile:
    """
    reps : representatives, picked by largest cov (ties by index)
    child : per representative the clients within 2 opt_g that were still uncovered
    rep_cov : cov value of each representative
    selected : the (at most) k representatives with the most children (ties by index)
    served_count : total number of children of the selected representatives

    """
    reps: tuple
    child: tuple
    rep_cov: tuple
    selected: tuple
    served_count: int

    @property
    def sizes(self):
        return tuple(len(c) for c in self.child)


def filter_kcwo(inst, sol, opt_g, k):
    """Greedy coverage filtering with child(i) = uncovered clients within 2 opt_g of i."""
    n = inst.n
    cd = inst.client_dist
    cov = sol.cov

    uncovered = np.ones(n, dtype=bool)
    reps, child = [], []
    for i in sorted(range(n), key=lambda v: (-cov[v], v)):
        if not uncovered[i]:
            continue
        members = np.nonzero(uncovered & (cd[:, i] <= 2.0 * opt_g))[0]
        reps.append(i)
        child.append(tuple(int(v) for v in members))
        uncovered[members] = False

    ranked = sorted(range(len(reps)), key=lambda r: (-len(child[r]), reps[r]))
    selected = tuple(sorted(reps[r] for r in ranked[:k]))
    served = sum(len(child[r]) for r in ranked[:k])
    return CovProfile(reps=tuple(reps), child=tuple(child), rep_cov=tuple(float(cov[i]) for i in reps),
                      selected=selected, served_count=served)


####################################################################################################
#
#
def weighted_average_argument(profile, k, m):
    """
    Whether the k largest child sets hold at least m clients.

    When sum_i cov_i <= k over the representatives and sum_i |child(i)| cov_i >= m, this
    must be True (cov values in [0,1] put at most k units of weight on the child sizes);
    if both premises hold and it is False, InvariantBreach is raised.

    """
    top = sum(sorted(profile.sizes, reverse=True)[:k])
    result = top >= m

    budget_holds = sum(profile.rep_cov) <= k + TAU_CUT
    weight_holds = sum(s * c for s, c in zip(profile.sizes, profile.rep_cov)) >= m - len(profile.sizes) * TAU_LP
    if budget_holds and weight_holds and not result:
        raise InvariantBreach(f'top-{k} child sets hold {top} < m={m} clients although both coverage premises hold')
    return result


def _served_set(profile, sol, m):
    """Children of the selected representatives, keeping the m with the largest cov (ties by index)."""
    members = []
    for i, c in zip(profile.reps, profile.child):
        if i in profile.selected:
            members.extend(c)
    members.sort(key=lambda v: (-sol.cov[v], v))
    return tuple(sorted(members[:m]))


####################################################################################################
#
#
def attempt_round_kcwo(inst, spec, sol, opt_g):
    """
    Rounding oracle for k-center with outliers.

    If the selected representatives cover at least m clients within 2 opt_g, they are
    accepted with exactly m served clients. Otherwise the KCWO cut sum_i y(i, opt_g) <= k
    over all representatives is returned.

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec
        A kcwo problem.

    sol : FractionalSolution

    opt_g : float

    Returns
    -------
    Accept or Cut

    """
    k, m = spec.k, spec.m
    profile = filter_kcwo(inst, sol, opt_g, k)

    if weighted_average_argument(profile, k, m):
        served = _served_set(profile, sol, m)
        centers = [inst.clients[i] for i in profile.selected]
        d, _ = center_distances(inst, centers)
        radius = float(d[list(served)].max()) if served else 0.0
        if radius > KCWO_FACTOR * opt_g:
            raise CertificateFailure(f'served radius {radius:.6g} exceeds 2 * opt_g = {KCWO_FACTOR * opt_g:.6g}')

        logger.debug('kcwo rounding serves %d clients within %.6g', len(served), radius)
        certificate = Certificate(factor_bound=KCWO_FACTOR, bound=KCWO_FACTOR * opt_g)
        served_ids = tuple(inst.clients[v] for v in served)
        return Accept(make_solution(inst, profile.selected, radius, opt_g, certificate, served=served_ids))

    balls = []
    for i in profile.reps:
        t = sol.grid.index_of(i, opt_g)
        if t is None:
            raise GridMissingRadius(f'guess {opt_g:g} is not on the grid of client {i}')
        balls.append((i, t, opt_g))

    cut = SepCut(FAMILY_KCWO, balls, k=k)
    violation = sum(sol.ball(i, t) for i, t, _ in cut.balls) - k
    if violation <= TAU_CUT:
        raise InvariantBreach(f'only {profile.served_count} < m={m} clients covered but the coverage cut holds '
                              f'(slack {-violation:.3g})')
    return Cut(cut, violation)
