"""
Tests for the k-center with outliers oracle.
"""

import numpy as np
import pytest

from contclust.contclust_exceptions import InvariantBreach
from contclust.core_metric import MetricInstance, ProblemSpec, RadiusGrid, instance_from_points
from contclust.lp_engine import BallVar, CovVar, FractionalSolution, FAMILY_KCWO
from contclust.results import Accept, Cut
from contclust.round_or_cut import solve_instance
from contclust.solver_kcwo import CovProfile, weighted_average_argument, filter_kcwo, attempt_round_kcwo


def _profile(sizes, cov, k):
    reps = tuple(range(len(sizes)))
    child, start = [], 0
    for s in sizes:
        child.append(tuple(range(start, start + s)))
        start += s
    return CovProfile(reps=reps, child=tuple(child), rep_cov=tuple(cov), selected=reps[:k],
                      served_count=sum(sorted(sizes, reverse=True)[:k]))


def test_weighted_average_argument():
    assert weighted_average_argument(_profile([2, 1, 1], [0.5, 0.5, 0.5], 1), 1, 2)
    assert not weighted_average_argument(_profile([2, 1, 1], [0.5, 0.5, 0.5], 1), 1, 3)
    assert weighted_average_argument(_profile([2, 2, 1], [1.0, 0.5, 0.5], 2), 2, 4)


def test_weighted_average_argument_detects_broken_premises():
    # cov above 1 lets the weighted sum exceed the top-k child sizes
    with pytest.raises(InvariantBreach):
        weighted_average_argument(_profile([3, 1], [2.0, 0.0], 2), 2, 5)


####################################################################################################
#
#
@pytest.fixture
def line3():
    """Clients at 0, 1 and 10 with grid radii {0, 0.5, 1, 10}."""
    inst = instance_from_points([[0.0], [1.0], [10.0]], norm='1')
    grid = RadiusGrid(radii=tuple(np.array([0.0, 0.5, 1.0, 10.0]) for _ in range(3)),
                      r_max=np.array([10.0, 10.0, 10.0]))
    return inst, grid


def test_accepts_covering_representative(line3):
    inst, grid = line3
    sol = FractionalSolution({CovVar(0): 1.0, CovVar(1): 1.0, BallVar(0, 1): 1.0, BallVar(1, 1): 1.0}, grid=grid)

    profile = filter_kcwo(inst, sol, 0.5, 1)
    assert profile.reps == (0, 2)
    assert profile.child == ((0, 1), (2,))
    assert profile.selected == (0,)
    assert profile.served_count == 2

    outcome = attempt_round_kcwo(inst, ProblemSpec.kcwo(1, 2), sol, 0.5)
    assert isinstance(outcome, Accept)
    assert outcome.solution.centers == (0,)
    assert outcome.solution.served == (0, 1)
    assert outcome.solution.cost == 1.0
    assert outcome.solution.certificate.bound == 1.0


def test_returns_cut_when_coverage_falls_short():
    inst = MetricInstance(dist=[[0.0, 10.0, 10.0], [10.0, 0.0, 10.0], [10.0, 10.0, 0.0]], clients=(0, 1, 2))
    grid = RadiusGrid(radii=tuple(np.array([0.0, 1.0, 10.0]) for _ in range(3)), r_max=np.array([10.0] * 3))
    values = {CovVar(v): 1.0 for v in range(3)}
    values.update({BallVar(v, 1): 1.0 for v in range(3)})
    sol = FractionalSolution(values, grid=grid)

    outcome = attempt_round_kcwo(inst, ProblemSpec.kcwo(1, 3), sol, 1.0)
    assert isinstance(outcome, Cut)
    assert outcome.cut.family == FAMILY_KCWO
    assert len(outcome.cut.balls) == 3
    assert outcome.violation == pytest.approx(2.0)
    assert outcome.cut.is_disjoint(inst)


def test_cut_that_holds_is_a_breach():
    inst = MetricInstance(dist=[[0.0, 10.0, 10.0], [10.0, 0.0, 10.0], [10.0, 10.0, 0.0]], clients=(0, 1, 2))
    grid = RadiusGrid(radii=tuple(np.array([0.0, 1.0, 10.0]) for _ in range(3)), r_max=np.array([10.0] * 3))
    sol = FractionalSolution({CovVar(v): 1.0 for v in range(3)}, grid=grid)

    with pytest.raises(InvariantBreach):
        attempt_round_kcwo(inst, ProblemSpec.kcwo(1, 3), sol, 1.0)


####################################################################################################
#
#
def test_solve_line_opens_a_client(kcwo_line):
    sol, trace = solve_instance(kcwo_line, ProblemSpec.kcwo(1, 2))

    # the midpoint is not a client, so the best open client serves both within 10
    assert sol.cost == 10.0
    assert len(sol.served) == 2
    assert trace.chosen_opt_g == pytest.approx(5.0)
    assert [p.status for p in trace.probes][-1] == 'accept'


def test_solve_allows_outliers():
    inst = instance_from_points([[0.0], [1.0], [2.0], [100.0]], norm='1')
    sol, _ = solve_instance(inst, ProblemSpec.kcwo(1, 3))
    assert 3 not in sol.served
    assert sol.cost <= 2.0
