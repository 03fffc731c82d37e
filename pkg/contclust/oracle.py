"""
contclust - continuous clustering and facility location by round-or-cut.

This file handles the exact brute-force solvers used as ground truth on small instances
and the report-style certification of solutions.

.............................................................................
contclust was developed as a desk-scale testbed for ball-variable LP relaxations
     Original release October 2026

Licensed under the MIT license.

Be kind to each other.

"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from ._configs import (ENUMERATION_BUDGET, UFL_FACTOR, FAIR_FACTOR, FAIR_RADIUS_FACTOR, KCWO_FACTOR, KIND_UFL,
                       KIND_FAIR, KIND_KP, KIND_KCWO, kp_factor)
from .contclust_exceptions import TooLarge
from .core_metric import center_distances, objective_value
from .results import Infeasible

logger = logging.getLogger(__name__)

# entries of the (clients x subsets x size) block evaluated at once
CHUNK_ENTRIES = 2 ** 21


@dataclass(frozen=True)
class ExactResult:
    """
    centers : optimal center set (point ids from the candidate points)
    value : its cost (distance^p for kp, served radius for kcwo, lam*|S| + distances for ufl)
    enumerated : number of center sets evaluated

    """
    centers: tuple
    value: float
    enumerated: int


def factor_for(spec):
    """The approximation factor the solvers certify for this problem."""
    if spec.kind == KIND_UFL:
        return UFL_FACTOR
    if spec.kind == KIND_FAIR:
        return FAIR_FACTOR
    if spec.kind == KIND_KP:
        return kp_factor(spec.p)
    return KCWO_FACTOR


####################################################################################################
#
#
def _sizes(inst, spec):
    N = len(inst.candidate_points)
    if spec.kind == KIND_UFL:
        return list(range(1, min(inst.n, N) + 1))
    return [min(spec.k, N)]


def enumeration_count(inst, spec):
    N = len(inst.candidate_points)
    return sum(math.comb(N, s) for s in _sizes(inst, spec))


def _values(spec, dmin, size):
    """Objective per subset; dmin has shape (clients, subsets)."""
    if spec.kind == KIND_UFL:
        return spec.lam * size + dmin.sum(axis=0)
    if spec.kind == KIND_KP:
        return np.sum(dmin ** spec.p, axis=0)
    if spec.kind == KIND_FAIR:
        radii = np.asarray(spec.radii, dtype=float)[:, None]
        feasible = np.all(dmin <= radii, axis=0)
        return np.where(feasible, dmin.sum(axis=0), np.inf)
    return np.sort(dmin, axis=0)[spec.m - 1]


def exact_solve(inst, spec, budget=ENUMERATION_BUDGET):
    """
    Exhaustive minimum over center sets drawn from the candidate points.

    Non-UFL problems enumerate every set of size min(k, |X|) (more centers never hurt);
    ufl enumerates every nonempty set of at most n centers.

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec

    budget : int
        Largest number of center sets that may be enumerated.

    Returns
    -------
    ExactResult or Infeasible
        Infeasible only for fair instances where no set meets every radius.

    Raises
    ------
    TooLarge
        When the enumeration would exceed ``budget``.

    """
    total = enumeration_count(inst, spec)
    if total > budget:
        raise TooLarge(f'exact enumeration needs {total} center sets, budget is {budget}')

    X = np.asarray(inst.candidate_points, dtype=int)
    block = inst.dist[np.ix_(np.asarray(inst.clients, dtype=int), X)]
    n = inst.n

    best_value, best_set = np.inf, None
    for size in _sizes(inst, spec):
        chunk = max(1, CHUNK_ENTRIES // max(1, n * size))
        combos = itertools.combinations(range(len(X)), size)
        while True:
            batch = np.array(list(itertools.islice(combos, chunk)), dtype=int)
            if batch.size == 0:
                break
            dmin = block[:, batch].min(axis=2)
            values = _values(spec, dmin, size)
            i = int(np.argmin(values))
            if values[i] < best_value:
                best_value = float(values[i])
                best_set = tuple(int(x) for x in X[batch[i]])

    if best_set is None:
        logger.info('no center set satisfies every fairness radius (%d sets enumerated)', total)
        return Infeasible(reason='no center set satisfies every fairness radius')

    return ExactResult(centers=best_set, value=best_value, enumerated=total)


####################################################################################################
#
#
@dataclass(frozen=True)
class Check:
    """One certified inequality value <= limit."""
    name: str
    value: float
    limit: float

    @property
    def passed(self):
        return self.value <= self.limit + 1e-12 * max(1.0, abs(self.limit))

    @property
    def slack(self):
        return self.limit - self.value


@dataclass(frozen=True)
class CertificateReport:
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __str__(self):
        lines = []
        for c in self.checks:
            status = 'ok' if c.passed else 'FAIL'
            lines.append(f'{status:4s} {c.name}: {c.value:.9g} <= {c.limit:.9g} (slack {c.slack:.3g})')
        return '\n'.join(lines)


def certify(inst, spec, solution, opt_g, slack=0.0, radius_slack=0.0):
    """
    Recomputes the solution's cost from raw distances and checks it.

    Checks the factor inequality cost <= factor * opt_g + slack, |S| <= k, every fairness
    radius d(v,S) <= 8 r(v) + radius_slack, and for kcwo that at least m clients are
    served. Nothing is raised; every check is listed in the report.

    Parameters
    ----------
    inst : MetricInstance

    spec : ProblemSpec

    solution : Solution

    opt_g : float
        Value the factor is applied to (an optimum or the guess used).

    slack : float
        Additive allowance on the factor inequality.

    radius_slack : float
        Additive allowance on the fairness inequalities.

    Returns
    -------
    CertificateReport

    """
    checks = []
    served = solution.served if spec.kind == KIND_KCWO else None
    cost = objective_value(inst, spec, solution.centers, served)

    checks.append(Check('factor', cost, factor_for(spec) * opt_g + slack))

    if spec.kind != KIND_UFL:
        checks.append(Check('centers<=k', float(len(set(solution.centers))), float(spec.k)))

    if spec.kind == KIND_FAIR:
        d, _ = center_distances(inst, solution.centers)
        for v, r in enumerate(spec.radii):
            if math.isfinite(r):
                checks.append(Check(f'fairness[{v}]', float(d[v]), FAIR_RADIUS_FACTOR * r + radius_slack))

    if spec.kind == KIND_KCWO:
        # served >= m written as m - |D| <= 0
        checks.append(Check('served>=m', float(spec.m - len(set(served))), 0.0))

    return CertificateReport(checks=tuple(checks))
