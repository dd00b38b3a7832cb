import pytest

from gametree.tree import root_value
from gametree.worst_case import one_block, substitute, worst_input, zero_block


def test_blocks_binary():
    assert one_block(2) == (0, 1, 0, 1)
    assert zero_block(2) == (0, 0, 0, 1)


def test_blocks_ternary():
    assert one_block(3) == (0, 0, 1) * 3
    assert zero_block(3) == (0, 0, 0, 0, 0, 1, 0, 0, 1)


def test_substitute_expands_digits():
    assert substitute((1, 0), 2) == (0, 1, 0, 1, 0, 0, 0, 1)


def test_small_worst_inputs():
    assert worst_input(2, 1, 1).to_string() == "0101"
    assert worst_input(2, 1, 0).to_string() == "0001"
    assert worst_input(2, 0, 1).bits == (1,)
    assert worst_input(2, 2, 1).to_string() == "0001010100010101"


@pytest.mark.parametrize("m,k", [(2, 1), (2, 3), (3, 2), (4, 2), (5, 1)])
@pytest.mark.parametrize("root", [0, 1])
def test_worst_inputs_evaluate_to_their_root(m, k, root):
    v = worst_input(m, k, root)
    assert len(v.bits) == m ** (2 * k)
    assert root_value(v) == root


def test_bad_root_rejected():
    with pytest.raises(ValueError):
        worst_input(2, 1, 2)
