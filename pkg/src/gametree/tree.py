"""Complete m-ary AND/OR trees and Snir's randomized evaluation.

Trees are implicit: the node at depth ``d`` with index ``i`` has children
``i*m, ..., i*m + m - 1`` at depth ``d + 1``; leaves sit at depth ``2k`` in
left-to-right order.  Even depths are AND nodes, odd depths are OR nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import DEFAULT_CAPS, CapExceeded


@dataclass(frozen=True)
class TreeShape:
    arity: int
    half_height: int
    max_leaves: int = field(default=DEFAULT_CAPS.max_leaves, compare=False, repr=False)

    def __post_init__(self):
        if self.arity < 2:
            raise ValueError(f"arity must be >= 2, got {self.arity}")
        if self.half_height < 0:
            raise ValueError(f"half_height must be >= 0, got {self.half_height}")
        # multiply step by step so a huge k fails fast instead of building a giant int
        n = 1
        for _ in range(2 * self.half_height):
            n *= self.arity
            if n > self.max_leaves:
                requested = self.arity ** (2 * self.half_height) if self.half_height <= 256 else n
                raise CapExceeded("max-leaves", requested, self.max_leaves)

    @property
    def height(self) -> int:
        return 2 * self.half_height

    @property
    def leaf_count(self) -> int:
        return self.arity**self.height

    @staticmethod
    def is_and(depth: int) -> bool:
        return depth % 2 == 0


@dataclass(frozen=True)
class LeafVector:
    shape: TreeShape
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != self.shape.leaf_count:
            raise ValueError(
                f"expected {self.shape.leaf_count} leaf values, got {len(self.bits)}"
            )
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("leaf values must be 0 or 1")

    @classmethod
    def of(cls, m: int, k: int, bits: Iterable[int], max_leaves: Optional[int] = None) -> "LeafVector":
        shape = TreeShape(m, k) if max_leaves is None else TreeShape(m, k, max_leaves)
        return cls(shape, tuple(int(b) for b in bits))

    @classmethod
    def parse(cls, text: str, m: int = 2) -> "LeafVector":
        """Build from a 0/1 string; the half-height is inferred from its length."""
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"input must be a nonempty 0/1 string, got {text!r}")
        n, k = len(text), 0
        size = 1
        while size < n:
            size *= m * m
            k += 1
        if size != n:
            raise ValueError(f"length {n} is not a power of {m * m}")
        return cls.of(m, k, (int(c) for c in text))

    def to_string(self) -> str:
        return "".join(str(b) for b in self.bits)

    @property
    def arity(self) -> int:
        return self.shape.arity


@dataclass(frozen=True)
class EvalOutcome:
    root_bit: int
    leaves_read: int
    read_set: Optional[frozenset[int]] = None


def root_value(v: LeafVector) -> int:
    """Deterministic AND/OR value of the root."""
    m = v.arity
    level = np.asarray(v.bits, dtype=np.uint8)
    for depth in range(v.shape.height - 1, -1, -1):
        groups = level.reshape(-1, m)
        level = groups.min(axis=1) if TreeShape.is_and(depth) else groups.max(axis=1)
    return int(level[0])


def snir_eval(v: LeafVector, rng: np.random.Generator, record: bool = False) -> EvalOutcome:
    """Evaluate the root, visiting children in uniformly random order with early stopping.

    ``rng`` is a numpy Generator; each internal node draws one permutation of its
    children, lazily, in depth-first order.
    """
    m = v.arity
    height = v.shape.height
    bits = v.bits
    read: Optional[set[int]] = set() if record else None

    def visit(depth: int, index: int) -> tuple[int, int]:
        if depth == height:
            if read is not None:
                read.add(index)
            return bits[index], 1
        stop = 0 if TreeShape.is_and(depth) else 1
        total = 0
        for c in rng.permutation(m):
            val, cost = visit(depth + 1, index * m + int(c))
            total += cost
            if val == stop:
                return stop, total
        return 1 - stop, total

    root_bit, count = visit(0, 0)
    return EvalOutcome(root_bit, count, frozenset(read) if read is not None else None)
