"""Stochastically worst inputs built by recursive block substitution.

Every digit of the level-(k-1) input becomes a depth-2 subtree:

* a ``1`` becomes an AND of ``m`` OR-groups, each holding ``m-1`` zeros and a one;
* a ``0`` becomes an AND whose first OR-group is all zeros, followed by ``m-1``
  groups of the first kind.

For ``m = 2`` these are the blocks ``0101`` and ``0001``.
"""

from __future__ import annotations

from typing import Optional

from .errors import DEFAULT_CAPS
from .tree import LeafVector, TreeShape


def _one_group(m: int) -> list[int]:
    return [0] * (m - 1) + [1]


def one_block(m: int) -> tuple[int, ...]:
    if m < 2:
        raise ValueError("arity must be >= 2")
    return tuple(_one_group(m) * m)


def zero_block(m: int) -> tuple[int, ...]:
    if m < 2:
        raise ValueError("arity must be >= 2")
    return tuple([0] * m + _one_group(m) * (m - 1))


def substitute(digits: tuple[int, ...], m: int) -> tuple[int, ...]:
    """One substitution step: each digit expands into its block."""
    blocks = {0: zero_block(m), 1: one_block(m)}
    out: list[int] = []
    for d in digits:
        out.extend(blocks[d])
    return tuple(out)


def worst_input(m: int, k: int, root: int = 1, max_leaves: Optional[int] = None) -> LeafVector:
    """The worst input of half-height ``k`` among those whose root evaluates to ``root``.

    ``root=1`` gives the overall worst case; ``root=0`` the worst case within the
    inputs evaluating to 0.
    """
    if root not in (0, 1):
        raise ValueError("root must be 0 or 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    # validates the size against the cap before any expansion happens
    shape = TreeShape(m, k, DEFAULT_CAPS.max_leaves if max_leaves is None else max_leaves)
    digits: tuple[int, ...] = (root,)
    for _ in range(k):
        digits = substitute(digits, m)
    return LeafVector(shape, digits)
