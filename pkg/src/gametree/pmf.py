"""Probability mass functions on nonnegative integer costs.

Exact PMFs store integer weights over one common denominator, which keeps
convolution and CDF comparison in exact arithmetic.  Float PMFs (``denom is
None``) are used only for large-k diagnostics.
"""

from __future__ import annotations

import io
import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

import numpy as np
from scipy import signal

from . import _intpoly

Number = Union[Fraction, float]


def _reduce(offset: int, weights: list, denom: Optional[int]) -> tuple[int, tuple, Optional[int]]:
    lo = 0
    while lo < len(weights) and weights[lo] == 0:
        lo += 1
    hi = len(weights)
    while hi > lo and weights[hi - 1] == 0:
        hi -= 1
    if lo == hi:
        raise ValueError("PMF has no mass")
    weights = weights[lo:hi]
    if denom is not None:
        g = denom
        for w in weights:
            g = math.gcd(g, w)
            if g == 1:
                break
        if g > 1:
            weights = [w // g for w in weights]
            denom //= g
        return offset + lo, tuple(int(w) for w in weights), denom
    return offset + lo, tuple(float(w) for w in weights), None


@dataclass(frozen=True)
class CostPMF:
    """Law of an integer cost.  Mass at ``offset + i`` is ``weights[i] / denom``."""

    offset: int
    weights: tuple
    denom: Optional[int] = 1

    @classmethod
    def make(cls, offset: int, weights: Iterable, denom: Optional[int] = 1) -> "CostPMF":
        o, w, d = _reduce(offset, list(weights), denom)
        return cls(o, w, d)

    @classmethod
    def point(cls, x: int) -> "CostPMF":
        return cls(x, (1,), 1)

    @classmethod
    def from_entries(cls, entries: Mapping[int, Number]) -> "CostPMF":
        if not entries:
            raise ValueError("empty PMF")
        lo, hi = min(entries), max(entries)
        if all(isinstance(p, (int, Fraction)) for p in entries.values()):
            fr = {x: Fraction(p) for x, p in entries.items()}
            if any(p < 0 for p in fr.values()):
                raise ValueError("negative probability")
            denom = math.lcm(*(p.denominator for p in fr.values()))
            weights = [0] * (hi - lo + 1)
            for x, p in fr.items():
                weights[x - lo] = p.numerator * (denom // p.denominator)
            if sum(weights) != denom:
                raise ValueError("probabilities do not sum to 1")
            return cls.make(lo, weights, denom)
        weights = [0.0] * (hi - lo + 1)
        for x, p in entries.items():
            weights[x - lo] = float(p)
        return cls.make(lo, weights, None)

    @property
    def exact(self) -> bool:
        return self.denom is not None

    @property
    def support(self) -> list[int]:
        return [self.offset + i for i, w in enumerate(self.weights) if w]

    @property
    def entries(self) -> dict[int, Number]:
        if self.exact:
            return {self.offset + i: Fraction(w, self.denom) for i, w in enumerate(self.weights) if w}
        return {self.offset + i: w for i, w in enumerate(self.weights) if w}

    def prob(self, x: int) -> Number:
        i = x - self.offset
        w = self.weights[i] if 0 <= i < len(self.weights) else 0
        return Fraction(w, self.denom) if self.exact else float(w)

    def total(self) -> Number:
        return Fraction(sum(self.weights), self.denom) if self.exact else float(sum(self.weights))

    def mean(self) -> Number:
        s = sum((self.offset + i) * w for i, w in enumerate(self.weights))
        return Fraction(s, self.denom) if self.exact else float(s)

    def variance(self) -> Number:
        mu = self.mean()
        s = sum((self.offset + i) ** 2 * w for i, w in enumerate(self.weights))
        second = Fraction(s, self.denom) if self.exact else float(s)
        return second - mu * mu

    def cdf_points(self) -> list[tuple[int, Number]]:
        """``(x, P(C <= x))`` at every support point."""
        out, acc = [], 0
        for i, w in enumerate(self.weights):
            acc += w
            if w:
                out.append((self.offset + i, Fraction(acc, self.denom) if self.exact else float(acc)))
        return out

    def cdf(self, x: float) -> Number:
        i = math.floor(x) - self.offset
        if i < 0:
            return Fraction(0) if self.exact else 0.0
        acc = sum(self.weights[: i + 1])
        return Fraction(acc, self.denom) if self.exact else float(acc)

    def convolve(self, other: "CostPMF") -> "CostPMF":
        """Law of the sum of independent costs."""
        if self.exact and other.exact:
            return CostPMF.make(
                self.offset + other.offset,
                _intpoly.mul1d(self.weights, other.weights),
                self.denom * other.denom,
            )
        w = signal.convolve(self.as_array(), other.as_array())
        return CostPMF.make(self.offset + other.offset, np.clip(w, 0.0, None).tolist(), None)

    def as_array(self) -> np.ndarray:
        if self.exact:
            return np.asarray(self.weights, dtype=float) / self.denom
        return np.asarray(self.weights, dtype=float)

    def to_float(self) -> "CostPMF":
        return self if not self.exact else CostPMF(self.offset, tuple(self.as_array().tolist()), None)

    def to_json(self) -> dict[str, str]:
        """``{"cost": "p/q"}`` (floats are written with 17 significant digits)."""
        return {str(x): (str(p) if self.exact else repr(p)) for x, p in self.entries.items()}

    @classmethod
    def from_json(cls, data: Mapping[str, Union[str, float]]) -> "CostPMF":
        entries: dict[int, Number] = {}
        for x, p in data.items():
            if isinstance(p, str) and ("/" in p or p.isdigit()):
                entries[int(x)] = Fraction(p)
            else:
                entries[int(x)] = float(p)
        return cls.from_entries(entries)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["cost", "probability"])
        for x, p in self.entries.items():
            writer.writerow([x, str(p) if self.exact else repr(p)])
        return buf.getvalue()


def mixture(parts: list[tuple[int, CostPMF]], total: int) -> CostPMF:
    """``sum(count * pmf) / total``."""
    if not all(p.exact for _, p in parts):
        lo = min(p.offset for _, p in parts)
        hi = max(p.offset + len(p.weights) - 1 for _, p in parts)
        acc = np.zeros(hi - lo + 1)
        for count, p in parts:
            acc[p.offset - lo:p.offset - lo + len(p.weights)] += count * p.as_array()
        return CostPMF.make(lo, (acc / total).tolist(), None)
    lo = min(p.offset for _, p in parts)
    hi = max(p.offset + len(p.weights) - 1 for _, p in parts)
    denom = math.lcm(*(p.denom for _, p in parts))
    acc = [0] * (hi - lo + 1)
    for count, p in parts:
        scale = count * (denom // p.denom)
        base = p.offset - lo
        for i, w in enumerate(p.weights):
            if w:
                acc[base + i] += scale * w
    return CostPMF.make(lo, acc, denom * total)


def dominates(a: CostPMF, b: CostPMF) -> bool:
    """True iff the CDF of ``a`` is pointwise >= the CDF of ``b``.

    That is, ``a`` is stochastically smaller than ``b`` (``b`` dominates ``a``).
    """
    points = sorted(set(a.support) | set(b.support))
    if a.exact and b.exact:
        wa = {x: a.prob(x) for x in points}
        wb = {x: b.prob(x) for x in points}
        fa = fb = Fraction(0)
        for x in points:
            fa += wa[x]
            fb += wb[x]
            if fa < fb:
                return False
        return True
    fa = fb = 0.0
    for x in points:
        fa += float(a.prob(x))
        fb += float(b.prob(x))
        if fa < fb - 1e-12:
            return False
    return True


class BivariatePMF:
    """Joint law of ``(count0, count1)``: mass at ``(i, j)`` is ``weights[i, j] / denom``."""

    def __init__(self, weights: np.ndarray, denom: int):
        if weights.ndim != 2:
            raise ValueError("weights must be a 2-d grid")
        self.weights = weights
        self.denom = int(denom)

    @classmethod
    def point(cls, i: int, j: int) -> "BivariatePMF":
        w = np.zeros((i + 1, j + 1), dtype=object)
        w[i, j] = 1
        return cls(w, 1)

    @property
    def entries(self) -> dict[tuple[int, int], Fraction]:
        rows, cols = np.nonzero(self.weights != 0)
        return {(int(i), int(j)): Fraction(int(self.weights[i, j]), self.denom) for i, j in zip(rows, cols)}

    def total(self) -> Fraction:
        return Fraction(int(sum(int(x) for x in self.weights.flat)), self.denom)

    def marginal(self, coord: int) -> CostPMF:
        sums = [int(sum(int(x) for x in line)) for line in (self.weights if coord == 0 else self.weights.T)]
        return CostPMF.make(0, sums, self.denom)

    def mean(self) -> tuple[Fraction, Fraction]:
        return (self.marginal(0).mean(), self.marginal(1).mean())

    def cross_moment(self) -> Fraction:
        s = 0
        for (i, j), w in np.ndenumerate(self.weights):
            if w:
                s += i * j * int(w)
        return Fraction(s, self.denom)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BivariatePMF):
            return NotImplemented
        return self.entries == other.entries

    def to_json(self) -> dict[str, str]:
        return {f"{i},{j}": str(p) for (i, j), p in sorted(self.entries.items())}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "BivariatePMF":
        entries = {tuple(int(t) for t in key.split(",")): Fraction(p) for key, p in data.items()}
        denom = math.lcm(*(p.denominator for p in entries.values()))
        rows = max(i for i, _ in entries) + 1
        cols = max(j for _, j in entries) + 1
        w = np.zeros((rows, cols), dtype=object)
        for (i, j), p in entries.items():
            w[i, j] = p.numerator * (denom // p.denominator)
        return cls(w, denom)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["count0", "count1", "probability"])
        for (i, j), p in sorted(self.entries.items()):
            writer.writerow([i, j, str(p)])
        return buf.getvalue()
