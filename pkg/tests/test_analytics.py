from fractions import Fraction

import mpmath
import pytest

from gametree import analytics
from gametree import exact_dist
from gametree.errors import NumericError
from gametree.worst_case import worst_input


@pytest.mark.parametrize("m", [2, 3, 5, 10])
def test_mean_matrix_structure(m):
    M = analytics.mean_matrix(m)
    h = Fraction(m - 1, 2)
    assert M.entries == ((m + h * h, m * h), (h, m))
    assert M.det == m * m


@pytest.mark.parametrize("m", [2, 3])
def test_mean_matrix_is_average_of_step_matrices(m):
    acc = [[Fraction(0)] * 2 for _ in range(2)]
    for p, mats in analytics.step_matrices(m):
        for A in mats:
            for i in range(2):
                for j in range(2):
                    acc[i][j] += p * A[i][j]
    M = analytics.mean_matrix(m).entries
    # the step matrices act on column vectors, so their mean is the transpose of M
    assert acc == [[M[0][0], M[1][0]], [M[0][1], M[1][1]]]


@pytest.mark.parametrize("m,k", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_expected_cost_matches_exact_pmf(m, k):
    for root in (0, 1):
        pmf = exact_dist.exact_cost_pmf(worst_input(m, k, root))
        assert pmf.mean() == analytics.expected_cost(m, k, root)


def test_known_means():
    assert analytics.expected_cost(2, 1) == 3
    assert analytics.expected_cost(2, 1, 0) == Fraction(11, 4)
    assert analytics.expected_cost(2, 2) == Fraction(35, 4)


@pytest.mark.parametrize("m", [2, 3, 7, 100])
def test_spectral_identities(m):
    sp = analytics.spectral(m)
    M = analytics.mean_matrix(m)
    assert sp.lambda1 * sp.lambda2 == pytest.approx(float(M.det))
    assert sp.lambda2 > 0
    assert float(mpmath.log(sp.lambda1) / (2 * mpmath.log(m))) == pytest.approx(float(sp.alpha))
    z0, z1 = analytics.limit_mean_vector(m)
    assert float(z0) == pytest.approx(float(sp.c0), rel=1e-30)
    assert float(z1) == pytest.approx(float(sp.c1), rel=1e-30)
    assert float(sp.c2) == pytest.approx(float(sp.c1) - 1)


@pytest.mark.parametrize("m,k", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_moment_recursion_matches_exact_laws(m, k):
    state = analytics.moment_recursion(m, k)[k]
    joint = exact_dist.z_recursion_pmf(m, k)
    p0, p1 = joint.marginal(0), joint.marginal(1)
    assert state.mean == (p0.mean(), p1.mean())
    assert state.cov[0] == p0.variance()
    assert state.cov[2] == p1.variance()
    assert state.cov[1] == joint.cross_moment() - p0.mean() * p1.mean()


def test_variance_at_level_one():
    assert analytics.moment_recursion(2, 1)[1].var1 == Fraction(1, 2)


@pytest.mark.parametrize("m", [2, 3])
def test_quad_map_matches_brute_force(m):
    mu = (Fraction(3, 2), Fraction(5, 3))
    direct = analytics.quad_map(m, mu)
    acc = [Fraction(0)] * 3
    for p, mats in analytics.step_matrices(m):
        x = [sum(A[0][0] * mu[0] + A[0][1] * mu[1] for A in mats),
             sum(A[1][0] * mu[0] + A[1][1] * mu[1] for A in mats)]
        acc[0] += p * x[0] * x[0]
        acc[1] += p * x[0] * x[1]
        acc[2] += p * x[1] * x[1]
    assert tuple(acc) == direct


def test_variance_constant_binary():
    vc = analytics.variance_constant(2)
    assert float(vc.d) == pytest.approx(0.0938094499, abs=1e-9)


@pytest.mark.parametrize("m,k", [(2, 1), (2, 2), (3, 1)])
def test_toll_moments_match_brute_force(m, k):
    prev = analytics.expected_vector(m, k - 1)
    assert analytics._toll_raw(m, prev) == analytics.brute_toll_moments(m, k)


def test_toll_sups_and_limit():
    sups = analytics.toll_sups(2)
    assert sups.sup_norm_sq > sups.sup_second_moment > 0
    assert float(sups.ratio) == pytest.approx(1.3285180094, abs=1e-9)
    assert float(analytics.toll_limit_ratio(2)) == pytest.approx(1.350413, abs=1e-6)


def test_psi_and_overlap_check():
    assert float(analytics.psi(analytics.OVERLAP_C, 1)) == pytest.approx(1.3648214, abs=1e-6)
    assert analytics.mgf_constant(1.5).overlap_ok


def test_tail_constants_kappa_three():
    tc = analytics.tail_constant(3)
    assert float(tc.q) == pytest.approx(1.5)
    assert float(tc.K) == pytest.approx(1.4728, abs=1e-4)
    assert float(tc.L) == pytest.approx(0.0682982, abs=1e-7)
    assert analytics.tail_bound(3, 1.0) == pytest.approx(0.933982, abs=1e-6)
    assert not tc.by_analogy


def test_tail_constants_ranges():
    lo, hi = analytics.kappa_range(2)
    with pytest.raises(ValueError):
        analytics.tail_constant(2)
    with pytest.raises(ValueError):
        analytics.tail_constant(float(hi) + 0.01)
    with pytest.raises(ValueError):
        analytics.mgf_constant(2.0)
    with pytest.raises(ValueError):
        analytics.tail_bound(3, 0)


def test_tail_bound_decreasing_in_t():
    b = [analytics.tail_bound(3.5, t) for t in (0.5, 1, 2, 4)]
    assert all(x > y for x, y in zip(b, b[1:]))


def test_mary_constants_flagged():
    tc = analytics.tail_constant(3, m=3)
    assert tc.by_analogy and tc.L > 0


def test_table1_binary_row():
    row, = analytics.table1([2])
    assert row.rounded() == ("0.754", "0.0938", "4.060")
