import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gametree.errors import CapExceeded
from gametree.rng import make_rng, run_rng
from gametree.tree import LeafVector, TreeShape, root_value, snir_eval


def test_shape_basics():
    s = TreeShape(3, 2)
    assert s.height == 4 and s.leaf_count == 81
    assert TreeShape.is_and(0) and not TreeShape.is_and(1)


@pytest.mark.parametrize("m,k", [(1, 1), (2, -1)])
def test_shape_rejects_bad_parameters(m, k):
    with pytest.raises(ValueError):
        TreeShape(m, k)


def test_shape_cap_names_the_cap():
    with pytest.raises(CapExceeded) as info:
        TreeShape(2, 3, max_leaves=32)
    assert info.value.cap == "max-leaves" and info.value.requested == 64


def test_parse_infers_height_and_validates():
    v = LeafVector.parse("0101")
    assert v.shape.half_height == 1 and v.bits == (0, 1, 0, 1)
    assert v.to_string() == "0101"
    assert LeafVector.parse("0" * 81, m=3).shape.half_height == 2
    for bad in ("010", "0121", "01010"):
        with pytest.raises(ValueError):
            LeafVector.parse(bad)


@pytest.mark.parametrize("text,value", [("0101", 1), ("0001", 0), ("1100", 0), ("1010", 1), ("0000", 0), ("1111", 1)])
def test_root_value_small(text, value):
    assert root_value(LeafVector.parse(text)) == value


def _naive_value(bits, m, depth, height):
    if depth == height:
        return bits[0]
    size = len(bits) // m
    vals = [_naive_value(bits[i * size:(i + 1) * size], m, depth + 1, height) for i in range(m)]
    return min(vals) if depth % 2 == 0 else max(vals)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 1), (2, 2), (3, 1)]).flatmap(
    lambda mk: st.tuples(st.just(mk), st.lists(st.integers(0, 1), min_size=mk[0] ** (2 * mk[1]),
                                               max_size=mk[0] ** (2 * mk[1])))),
       st.integers(0, 2**32))
def test_evaluation_returns_the_true_value(case, seed):
    (m, k), bits = case
    v = LeafVector.of(m, k, bits)
    assert root_value(v) == _naive_value(bits, m, 0, 2 * k)
    out = snir_eval(v, make_rng(seed), record=True)
    assert out.root_bit == root_value(v)
    assert 1 <= out.leaves_read <= len(bits)
    assert len(out.read_set) == out.leaves_read


def test_evaluation_is_reproducible_per_run():
    v = LeafVector.parse("0110100110010110")
    a = [snir_eval(v, run_rng(5, r)).leaves_read for r in range(20)]
    b = [snir_eval(v, run_rng(5, r)).leaves_read for r in range(20)]
    assert a == b
    assert len(set(a)) > 1


def test_run_streams_are_independent_of_each_other():
    x = run_rng(1, 0).random(4)
    y = run_rng(1, 1).random(4)
    assert not np.allclose(x, y)
