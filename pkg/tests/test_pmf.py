from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gametree.pmf import BivariatePMF, CostPMF, dominates, mixture


@st.composite
def pmfs(draw, max_len=6):
    weights = draw(st.lists(st.integers(0, 5), min_size=1, max_size=max_len).filter(any))
    offset = draw(st.integers(0, 4))
    return CostPMF.make(offset, weights, sum(weights))


def test_make_reduces():
    p = CostPMF.make(1, [0, 2, 4, 2, 0], 8)
    assert (p.offset, p.weights, p.denom) == (2, (1, 2, 1), 4)
    assert p.entries == {2: Fraction(1, 4), 3: Fraction(1, 2), 4: Fraction(1, 4)}
    assert p.mean() == 3 and p.variance() == Fraction(1, 2)


def test_from_entries_checks_total():
    with pytest.raises(ValueError):
        CostPMF.from_entries({1: Fraction(1, 2)})
    with pytest.raises(ValueError):
        CostPMF.make(0, [0, 0], 1)


def test_cdf():
    p = CostPMF.from_entries({2: Fraction(1, 4), 4: Fraction(3, 4)})
    assert p.cdf(1) == 0 and p.cdf(3) == Fraction(1, 4) and p.cdf(10) == 1
    assert p.cdf_points() == [(2, Fraction(1, 4)), (4, Fraction(1))]


@settings(max_examples=80, deadline=None)
@given(pmfs(), pmfs())
def test_convolution_matches_numpy(a, b):
    c = a.convolve(b)
    assert c.total() == 1
    assert c.mean() == a.mean() + b.mean()
    ref = np.convolve(a.as_array(), b.as_array())
    got = np.zeros(len(ref))
    for x, p in c.entries.items():
        got[x - a.offset - b.offset] = float(p)
    assert np.allclose(got, ref)
    assert np.allclose(a.to_float().convolve(b.to_float()).as_array(), c.as_array())


@settings(max_examples=80, deadline=None)
@given(pmfs())
def test_json_and_csv_round_trip(a):
    assert CostPMF.from_json(a.to_json()) == a
    f = a.to_float()
    assert CostPMF.from_json(f.to_json()).entries == f.entries
    assert a.to_csv().splitlines()[0] == "cost,probability"


@settings(max_examples=100, deadline=None)
@given(pmfs())
def test_dominance_reflexive(a):
    assert dominates(a, a)


@settings(max_examples=100, deadline=None)
@given(pmfs(), pmfs(), pmfs())
def test_dominance_transitive(a, b, c):
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


@settings(max_examples=100, deadline=None)
@given(pmfs(), pmfs())
def test_dominance_antisymmetric(a, b):
    if dominates(a, b) and dominates(b, a):
        assert a == b


@settings(max_examples=60, deadline=None)
@given(pmfs(), st.integers(1, 3))
def test_shift_is_dominated(a, s):
    shifted = a.convolve(CostPMF.point(s))
    assert dominates(a, shifted) and not dominates(shifted, a)
    assert dominates(a.to_float(), shifted.to_float())


def test_mixture_exact_and_float_agree():
    a, b = CostPMF.point(1), CostPMF.from_entries({1: Fraction(1, 2), 3: Fraction(1, 2)})
    mix = mixture([(1, a), (3, b)], 4)
    assert mix.entries == {1: Fraction(5, 8), 3: Fraction(3, 8)}
    assert np.allclose(mixture([(1, a.to_float()), (3, b)], 4).as_array(), mix.as_array())


def test_bivariate_round_trip_and_moments():
    w = np.zeros((3, 2), dtype=object)
    w[0, 1], w[2, 0], w[2, 1] = 1, 1, 2
    p = BivariatePMF(w, 4)
    assert p.total() == 1
    assert p.mean() == (Fraction(3, 2), Fraction(3, 4))
    assert p.cross_moment() == 1
    assert BivariatePMF.from_json(p.to_json()) == p
    assert p.marginal(1).entries == {0: Fraction(1, 4), 1: Fraction(3, 4)}
