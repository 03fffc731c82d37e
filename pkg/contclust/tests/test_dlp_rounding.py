"""
Tests for the representative rounding: padding, pairwise shifting and forest rounding.
"""

import math

import numpy as np
import pytest

from contclust.contclust_exceptions import ContclustException
from contclust.dlp_rounding import DlpInput, pad, round_half, round_forest, round_dlp, fractional_count


def _inp(masses, k, dist=None, weights=None, neighbor=None, p=1):
    R = len(masses)
    return DlpInput(reps=tuple(range(R)),
                    weights=tuple(weights or [1] * R),
                    neighbor=tuple(neighbor or [(i + 1) % R for i in range(R)]),
                    dist=tuple(dist or [1.0] * R),
                    masses=tuple(masses),
                    k=k,
                    p=p)


def test_pad_lifts_masses_in_order():
    assert pad(_inp([0.6, 0.9], 2)).masses == (1.0, 1.0)
    assert pad(_inp([0.7, 0.8], 2)).masses == (1.0, 1.0)
    assert pad(_inp([0.5, 0.5, 0.5], 2)).masses == (1.0, 0.5, 0.5)


def test_pad_lifts_costliest_masses_first():
    assert pad(_inp([0.5, 0.5, 0.5], 2, dist=[1.0, 3.0, 2.0])).masses == (0.5, 1.0, 0.5)
    assert pad(_inp([0.5, 0.5, 0.5], 2, weights=[1, 1, 4])).masses == (0.5, 0.5, 1.0)
    # one unit of deficit spread over the two costliest representatives
    assert pad(_inp([0.5, 0.5, 0.5, 0.5], 3, dist=[1.0, 2.0, 3.0, 1.5])).masses == (0.5, 1.0, 1.0, 0.5)


def test_pad_caps_at_representative_count():
    assert pad(_inp([0.5], 3)).masses == (1.0,)


def test_pad_rejects_overfull_masses():
    with pytest.raises(ContclustException):
        pad(_inp([0.6, 0.9], 1))


####################################################################################################
#
#
def test_round_half_moves_mass_to_costlier_representative():
    # unit costs (1, 1, 2, 2): representative 1 gives its mass to 2
    inp = _inp([0.5, 0.7, 0.8, 1.0], 3, dist=[1.0, 1.0, 2.0, 2.0], neighbor=[1, 0, 3, 2])
    out = round_half(inp)
    assert out.masses == (0.5, 0.5, 1.0, 1.0)
    assert out.cost() <= inp.cost() + 1e-12
    assert sum(out.masses) == pytest.approx(3.0)


def test_round_half_three_fractional():
    inp = _inp([0.6, 0.7, 0.7], 2, dist=[1.0, 2.0, 3.0])
    assert fractional_count(inp.masses) == 3
    out = round_half(inp)
    assert out.masses == pytest.approx((0.5, 0.5, 1.0))
    assert fractional_count(out.masses) == 0
    assert out.cost() <= inp.cost() + 1e-12


def test_round_half_fixed_point():
    inp = _inp([0.5, 1.0, 0.5, 1.0], 3)
    assert round_half(inp).masses == (0.5, 1.0, 0.5, 1.0)


def test_round_half_rejects_bad_masses():
    with pytest.raises(ContclustException):
        round_half(_inp([0.6, 0.9], 2))

    with pytest.raises(ContclustException):
        round_half(_inp([0.3, 0.7], 1))


####################################################################################################
#
#
def test_round_forest_mutual_pair_opens_cheaper_side():
    # unit costs (6, 2): closing representative 1 is cheaper
    inp = _inp([0.5, 0.5], 1, dist=[2.0, 2.0], weights=[3, 1], neighbor=[1, 0])
    out = round_forest(inp)
    assert out.opened == (0,)
    assert out.assignment == (0, 0)
    assert out.z == (1, 0)
    assert out.cost(inp) == 2.0


def test_round_forest_all_open():
    inp = _inp([1.0, 1.0, 1.0], 3)
    out = round_forest(inp)
    assert out.opened == (0, 1, 2)
    assert out.assignment == (0, 1, 2)
    assert out.cost(inp) == 0.0


def test_round_forest_chain_into_open_representative():
    # 0 -> 1 -> 2 with 2 at mass 1; closing 1 is cheaper than closing 0
    inp = _inp([0.5, 0.5, 1.0], 2, weights=[2, 1, 1], neighbor=[1, 2, 1])
    out = round_forest(inp)
    assert out.opened == (0, 2)
    assert out.assignment == (0, 2, 2)
    assert out.cost(inp) == 1.0


def test_round_forest_rejects_fractional_mass():
    with pytest.raises(ContclustException):
        round_forest(_inp([0.7, 0.8, 0.5], 2))


####################################################################################################
#
#
def _random_input(rng):
    R = int(rng.integers(2, 9))
    pos = rng.random(R)
    neighbor, dist = [], []
    for i in range(R):
        others = [(abs(pos[i] - pos[j]), j) for j in range(R) if j != i]
        d, j = min(others)
        neighbor.append(j)
        dist.append(float(d))
    masses = rng.uniform(0.5, 1.0, R)
    k = int(math.ceil(masses.sum()))
    weights = [int(w) for w in rng.integers(1, 5, R)]
    return _inp(list(masses), k, dist=dist, weights=weights, neighbor=neighbor)


def test_round_dlp_random_inputs(rng):
    for _ in range(25):
        inp = _random_input(rng)
        out = round_dlp(inp)

        assert len(out.opened) <= inp.k
        for i, a in enumerate(out.assignment):
            assert a in (i, inp.neighbor[i])
            assert a in out.opened

        half = round_half(pad(inp))
        assert set(half.masses) <= {0.5, 1.0}
        assert sum(half.masses) == pytest.approx(min(inp.k, len(inp)), abs=1e-4)
        assert half.cost() <= pad(inp).cost() + 1e-3


def test_round_dlp_single_shot():
    inp = _inp([0.75, 0.75], 2, neighbor=[1, 0])
    out = round_dlp(inp)
    assert out.opened == (0, 1)
    assert np.array_equal(out.z, (1, 1))
