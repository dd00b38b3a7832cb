from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gametree import exact_dist
from gametree.errors import CapExceeded
from gametree.pmf import dominates
from gametree.rng import run_rng
from gametree.tree import LeafVector, snir_eval
from gametree.worst_case import worst_input


def leaf_vectors(m, k):
    n = m ** (2 * k)
    return st.lists(st.integers(0, 1), min_size=n, max_size=n).map(lambda b: LeafVector.of(m, k, b))


@settings(max_examples=40, deadline=None)
@given(st.one_of(leaf_vectors(2, 1), leaf_vectors(3, 1), leaf_vectors(2, 2)))
def test_composition_matches_enumeration(v):
    assert exact_dist.exact_cost_pmf(v) == exact_dist.brute_force_cost_pmf(v)


def _permute_children(bits, m, height, depth, index, perm):
    block = m ** (height - depth - 1)
    start = index * m * block
    kids = [bits[start + j * block:start + (j + 1) * block] for j in range(m)]
    out = list(bits)
    for j, src in enumerate(perm):
        out[start + j * block:start + (j + 1) * block] = kids[src]
    return tuple(out)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 2), (3, 1)]).flatmap(lambda mk: st.tuples(
    leaf_vectors(*mk), st.integers(0, 2 * mk[1] - 1), st.integers(0, 10**6),
    st.permutations(range(mk[0])))))
def test_law_invariant_under_child_reordering(case):
    v, depth, raw_index, perm = case
    m, height = v.arity, v.shape.height
    index = raw_index % m**depth
    w = LeafVector(v.shape, _permute_children(v.bits, m, height, depth, index, perm))
    assert exact_dist.exact_cost_pmf(w) == exact_dist.exact_cost_pmf(v)


def test_exact_law_matches_sampling():
    v = worst_input(2, 2, 1)
    pmf = exact_dist.exact_cost_pmf(v)
    counts = Counter(snir_eval(v, run_rng(11, r)).leaves_read for r in range(4000))
    for x, p in pmf.entries.items():
        assert abs(counts[x] / 4000 - float(p)) < 0.03


def test_coin_profile_totals():
    for m in (2, 3, 4):
        prof = exact_dist.coin_profile(m)
        assert sum(c for _, c in prof) == m**m
        # U0 is uniform
        by_u0 = Counter()
        for (u0, _, _), c in prof:
            by_u0[u0] += c
        assert set(by_u0.values()) == {m ** (m - 1)}


@pytest.mark.parametrize("m,k", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_joint_marginals_are_worst_case_laws(m, k):
    joint = exact_dist.z_recursion_pmf(m, k)
    assert joint.total() == 1
    margins = exact_dist.z_marginal_pmfs(m, k)[k]
    for root in (0, 1):
        assert joint.marginal(root) == margins[root]
        if m ** (2 * k) <= 729:
            assert margins[root] == exact_dist.exact_cost_pmf(worst_input(m, k, root))


def test_joint_law_level_one():
    joint = exact_dist.z_recursion_pmf(2, 1)
    assert sum(joint.entries.values()) == 1
    # both coordinates are driven by the same coins, so they are dependent
    assert joint.cross_moment() != joint.mean()[0] * joint.mean()[1]


def test_joint_cap():
    with pytest.raises(CapExceeded) as info:
        exact_dist.z_recursion_pmf(2, 4, max_support=1000)
    assert info.value.cap == "max-pmf-support"


def test_worst_case_report_content():
    rep = exact_dist.verify_worst_case(2, 1)
    assert rep.ok and rep.inputs_checked == 16 and rep.zero_class_size == 7
    assert "0101" in rep.maximizers and "0001" in rep.zero_maximizers
    assert rep.star_pmf == exact_dist.exact_cost_pmf(worst_input(2, 1, 1))
    assert rep.to_json()["ok"] is True


def test_worst_case_cap():
    with pytest.raises(CapExceeded):
        exact_dist.verify_worst_case(2, 2, max_n=8)


def test_zero_worst_dominates_its_class_only():
    zero = exact_dist.exact_cost_pmf(worst_input(2, 1, 0))
    star = exact_dist.exact_cost_pmf(worst_input(2, 1, 1))
    assert dominates(zero, star)


def test_convergence_diagnostics_shrink_and_agree():
    rows = exact_dist.convergence_diagnostics(2, 6)
    exact_rows = exact_dist.convergence_diagnostics(2, 4, exact=True)
    for a, b in zip(rows, exact_rows):
        assert a.kolmogorov == pytest.approx(b.kolmogorov, abs=1e-12)
        assert a.rescaled_mean == pytest.approx(b.rescaled_mean, rel=1e-12)
    w = [r.wasserstein for r in rows]
    assert all(x > y for x, y in zip(w, w[1:]))
