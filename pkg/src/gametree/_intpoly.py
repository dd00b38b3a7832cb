"""Exact convolution of nonnegative integer sequences and grids.

Products go through Kronecker substitution: each sequence is packed into one
Python integer with fixed-width slots, the two integers are multiplied, and the
slots are read back.  Slots are wide enough that no carries cross them.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


def _slot_bytes(a_max: int, b_max: int, terms: int) -> int:
    bits = a_max.bit_length() + b_max.bit_length() + max(terms, 1).bit_length() + 1
    return (bits + 7) // 8


def _pack(coeffs: Sequence[int], width: int) -> int:
    return int.from_bytes(b"".join(int(c).to_bytes(width, "little") for c in coeffs), "little")


def _unpack(x: int, count: int, width: int) -> list[int]:
    data = x.to_bytes(count * width, "little")
    return [int.from_bytes(data[i * width:(i + 1) * width], "little") for i in range(count)]


def mul1d(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Full linear convolution of two nonnegative integer sequences."""
    if not a or not b:
        return []
    if len(a) == 1:
        return [a[0] * int(c) for c in b]
    if len(b) == 1:
        return [b[0] * int(c) for c in a]
    width = _slot_bytes(max(a), max(b), min(len(a), len(b)))
    out = _pack(a, width) * _pack(b, width)
    return _unpack(out, len(a) + len(b) - 1, width)


def pow1d(a: Sequence[int], e: int) -> list[int]:
    result = [1]
    base = list(a)
    while e:
        if e & 1:
            result = mul1d(result, base)
        e >>= 1
        if e:
            base = mul1d(base, base)
    return result


def mul2d(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full 2-d convolution of two nonnegative integer grids (object dtype)."""
    r1, s1 = a.shape
    r2, s2 = b.shape
    stride = s1 + s2 - 1

    def flat(g: np.ndarray, rows: int, cols: int) -> list[int]:
        seq = [0] * ((rows - 1) * stride + cols)
        for i in range(rows):
            seq[i * stride:i * stride + cols] = [int(x) for x in g[i]]
        return seq

    fa, fb = flat(a, r1, s1), flat(b, r2, s2)
    width = _slot_bytes(max(fa), max(fb), min(r1 * s1, r2 * s2))
    prod = _pack(fa, width) * _pack(fb, width)
    rows = r1 + r2 - 1
    vals = _unpack(prod, rows * stride, width)
    out = np.empty((rows, stride), dtype=object)
    for i in range(rows):
        out[i, :] = vals[i * stride:(i + 1) * stride]
    return out


def pow2d(a: np.ndarray, e: int) -> np.ndarray:
    result = np.full((1, 1), 1, dtype=object)
    base = a
    while e:
        if e & 1:
            result = mul2d(result, base)
        e >>= 1
        if e:
            base = mul2d(base, base)
    return result
