"""
Tests for the (k,p)-clustering oracle.
"""

import numpy as np
import pytest

from contclust._configs import kp_factor
from contclust.core_metric import ProblemSpec, RadiusGrid, build_grid, instance_from_points, random_points
from contclust.lp_engine import BallVar, CostVar, FractionalSolution, build_base, solve_lp, markov_tolerance
from contclust.oracle import exact_solve, certify
from contclust.round_or_cut import solve_instance, upper_bound
from contclust.solver_fair import sep_fair
from contclust.solver_kp import kp_radius, markov_check_kp, filter_kp


def test_kp_factor():
    assert kp_factor(1) == 8.0
    assert kp_factor(2) == 32.0
    assert kp_factor(3) == 128.0


def test_kp_radius():
    grid = RadiusGrid(radii=(np.array([0.0, 1.0]),) * 2, r_max=np.array([1.0, 1.0]))
    sol = FractionalSolution({CostVar(0): 1.0, CostVar(1): 4.0}, grid=grid)
    np.testing.assert_allclose(kp_radius(sol, 1), [2.0, 8.0])
    np.testing.assert_allclose(kp_radius(sol, 2), [np.sqrt(2.0), np.sqrt(8.0)])


def test_markov_check():
    grid = RadiusGrid(radii=(np.array([0.0, 3.0]),), r_max=np.array([3.0]))

    def point(y, u):
        return FractionalSolution({BallVar(0, 1): y, CostVar(0): u}, grid=grid)

    # 3^2 * (1 - 0.5) = 4.5
    assert markov_check_kp(point(0.5, 4.5), 0, 1, 2)
    assert markov_check_kp(point(0.5, 4.5 - 5e-7), 0, 1, 2)
    assert not markov_check_kp(point(0.5, 4.0), 0, 1, 2)
    assert markov_check_kp(point(1.0, 0.0), 0, 1, 2)


def test_filter_uses_power_radius(path3):
    spec = ProblemSpec.kp(1, 2)
    grid = RadiusGrid(radii=tuple(np.array([0.0, 0.5, 1.0, 2.0, 4.0]) for _ in range(3)),
                      r_max=np.array([4.0, 4.0, 4.0]))
    # C_v = 1 everywhere gives R(v) = sqrt(2): every client lies within 2 sqrt(2) of client 0
    sol = FractionalSolution({CostVar(v): 1.0 for v in range(3)}, grid=grid)
    profile = filter_kp(path3, spec, sol)
    assert profile.reps == (0,)
    assert profile.child == ((0, 1, 2),)


####################################################################################################
#
#
def test_solve_path(path3):
    spec = ProblemSpec.kp(1, 2)
    sol, _ = solve_instance(path3, spec)

    assert len(sol.centers) == 1
    assert sol.certificate.factor_bound == 32.0
    assert sol.cost <= 32.0 * 2.0 * (1.0 + 1.0 / 9.0) + 1e-4
    assert certify(path3, spec, sol, 2.0 * (1.0 + 1.0 / 9.0), slack=1e-4).passed


@pytest.mark.parametrize('p', [1, 2, 3])
def test_random_instances_within_factor(p):
    for seed in range(3):
        n = 5
        inst = instance_from_points(random_points(n, dim=2, rng=seed), norm='2')
        spec = ProblemSpec.kp(2, p)
        exact = exact_solve(inst, spec)
        sol, _ = solve_instance(inst, spec)

        cd = inst.client_dist
        dmin = float(cd[cd > 0].min())
        factor = kp_factor(p)
        limit = factor * ((1.0 + 1.0 / n ** 2) * exact.value + dmin ** p / n ** 2) + 1e-4 * factor

        assert len(set(sol.centers)) <= 2
        assert sol.cost <= limit
        assert sol.cost >= exact.value - 1e-9


def _lp_points(inst, spec, rounds=20):
    """LP points of the cut loop at the upper bound, each with its filtering profile."""
    grid = build_grid(inst, spec)
    pool = build_base(inst, spec, grid, upper_bound(inst, spec, grid))
    for _ in range(rounds):
        sol = solve_lp(pool)
        profile = filter_kp(inst, spec, sol)
        yield sol, profile
        cut = sep_fair(sol, profile, spec.k)
        if cut is None:
            return
        pool.add_cut(cut)


@pytest.mark.parametrize('p', [1, 2, 3])
def test_markov_holds_at_every_lp_point(p):
    for seed in range(3):
        inst = instance_from_points(random_points(5, dim=2, rng=seed), norm='2')
        spec = ProblemSpec.kp(2, p)
        for sol, _ in _lp_points(inst, spec):
            for v in range(inst.n):
                for t in range(sol.grid.size(v)):
                    assert markov_check_kp(sol, v, t, p), (seed, v, t)


def test_filtered_radius_keeps_half_mass():
    inst = instance_from_points(random_points(5, dim=2, rng=7), norm='1')
    spec = ProblemSpec.kp(2, 2)
    for sol, profile in _lp_points(inst, spec):
        grid = sol.grid
        for v in range(inst.n):
            rho = profile.grid_radius[v]
            assert rho >= profile.radius[v] * (1.0 - 1e-9) or rho == grid.r_max[v]
            if rho > 0:
                tol = markov_tolerance(inst.n, grid.r_max[v], 2) / rho ** 2
                assert sol.ball(v, grid.index_of(v, rho)) >= 0.5 - tol
