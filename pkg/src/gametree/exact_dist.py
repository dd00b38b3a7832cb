"""Exact cost distributions, the bivariate recursion, worst-case verification
and limit-law convergence diagnostics."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import _intpoly
from .errors import DEFAULT_CAPS, CapExceeded
from .pmf import BivariatePMF, CostPMF, dominates, mixture
from .tree import LeafVector, TreeShape, root_value
from .worst_case import worst_input


class _Composer:
    """Bottom-up exact composition of subtree cost laws.

    Distinct ``(value, PMF)`` pairs are interned to integer ids; an internal
    node is identified by its operator and the sorted ids of its children, so
    identical subtrees across many inputs are computed once.
    """

    def __init__(self, m: int):
        self.m = m
        self.values: list[int] = []
        self.pmfs: list[CostPMF] = []
        self._ids: dict[tuple[int, CostPMF], int] = {}
        self._nodes: dict[tuple[bool, tuple[int, ...]], int] = {}
        self._sums: dict[tuple[int, ...], CostPMF] = {}
        self.leaf = (self.intern(0, CostPMF.point(1)), self.intern(1, CostPMF.point(1)))

    def intern(self, value: int, pmf: CostPMF) -> int:
        key = (value, pmf)
        i = self._ids.get(key)
        if i is None:
            i = len(self.pmfs)
            self._ids[key] = i
            self.values.append(value)
            self.pmfs.append(pmf)
        return i

    def _sum(self, ids: tuple[int, ...]) -> CostPMF:
        out = self._sums.get(ids)
        if out is None:
            out = self.pmfs[ids[0]]
            for i in ids[1:]:
                out = out.convolve(self.pmfs[i])
            self._sums[ids] = out
        return out

    def node(self, is_and: bool, children: tuple[int, ...]) -> int:
        key = (is_and, tuple(sorted(children)))
        out = self._nodes.get(key)
        if out is None:
            value, pmf = self._combine(is_and, key[1])
            out = self.intern(value, pmf)
            self._nodes[key] = out
        return out

    def _combine(self, is_and: bool, children: tuple[int, ...]) -> tuple[int, CostPMF]:
        stop = 0 if is_and else 1
        stoppers = [c for c in children if self.values[c] == stop]
        others = [c for c in children if self.values[c] != stop]
        if not stoppers:
            return 1 - stop, self._sum(children)
        # Under a uniform child order, the children read are a set A of
        # non-stopping children followed by one stopping child s; the order
        # count of (A, s) is |A|! (m - 1 - |A|)!.
        m = len(children)
        prefixes: Counter = Counter()
        for size in range(len(others) + 1):
            count = math.factorial(size) * math.factorial(m - 1 - size)
            for subset in itertools.combinations(others, size):
                for s in stoppers:
                    prefixes[tuple(sorted(subset + (s,)))] += count
        parts = [(c, self._sum(ids)) for ids, c in prefixes.items()]
        return stop, mixture(parts, math.factorial(m))

    def evaluate(self, bits: tuple[int, ...], height: int) -> int:
        m = self.m
        level = [self.leaf[b] for b in bits]
        for depth in range(height - 1, -1, -1):
            is_and = TreeShape.is_and(depth)
            level = [self.node(is_and, tuple(level[i:i + m])) for i in range(0, len(level), m)]
        return level[0]


def exact_cost_pmf(v: LeafVector, composer: Optional[_Composer] = None) -> CostPMF:
    """Exact law of the number of leaves read on input ``v``."""
    if composer is None:
        composer = _Composer(v.arity)
    elif composer.m != v.arity:
        raise ValueError("composer arity does not match the input")
    return composer.pmfs[composer.evaluate(v.bits, v.shape.height)]


def brute_force_cost_pmf(v: LeafVector) -> CostPMF:
    """Reference law by enumerating every child order at every internal node.

    Exponential in the number of internal nodes; only for tiny trees.
    """
    m, height, bits = v.arity, v.shape.height, v.bits
    perms = list(itertools.permutations(range(m)))

    def outcomes(depth: int, index: int) -> Counter:
        # Counter over (value, cost) with integer weights; total weight (m!)^(#internal nodes)
        if depth == height:
            return Counter({(bits[index], 1): 1})
        stop = 0 if TreeShape.is_and(depth) else 1
        kids = [outcomes(depth + 1, index * m + c) for c in range(m)]
        result: Counter = Counter()
        for perm in perms:
            partial = Counter({(None, 0): 1})
            for c in perm:
                nxt: Counter = Counter()
                for (val, cost), w in partial.items():
                    if val == stop:
                        nxt[(val, cost)] += w * sum(kids[c].values())
                        continue
                    for (cv, cc), cw in kids[c].items():
                        nxt[(cv if cv == stop else None, cost + cc)] += w * cw
                partial = nxt
            for (val, cost), w in partial.items():
                result[(stop if val == stop else 1 - stop, cost)] += w
        return result

    res = outcomes(0, 0)
    total = sum(res.values())
    acc: Counter = Counter()
    for (_, cost), w in res.items():
        acc[cost] += w
    lo, hi = min(acc), max(acc)
    return CostPMF.make(lo, [acc.get(x, 0) for x in range(lo, hi + 1)], total)


# --- the bivariate recursion -------------------------------------------------

@lru_cache(maxsize=None)
def coin_profile(m: int) -> tuple[tuple[tuple[int, int, int], int], ...]:
    """Law of ``(U0, n_a, n_b)`` as integer counts out of ``m**m``.

    ``U0`` counts the 1-children read before the 0-child of a 0-valued AND;
    ``n_a = sum(U_r, r <= U0)`` and ``n_b = sum(m - 1 - U_r, r = 1..m-1)`` are
    the numbers of coefficient matrices that route a copy's coordinate 0 into
    coordinate 0 and into coordinate 1 respectively.
    """
    out: Counter = Counter()
    for u0 in range(m):
        states: Counter = Counter({(0, 0): 1})
        for r in range(1, m):
            nxt: Counter = Counter()
            for (na, nb), c in states.items():
                for u in range(m):
                    nxt[(na + u if r <= u0 else na, nb + m - 1 - u)] += c
            states = nxt
        for (na, nb), c in states.items():
            out[(u0, na, nb)] += c
    return tuple(sorted(out.items()))


def _grid_add(acc: np.ndarray, part: np.ndarray, scale: int) -> np.ndarray:
    rows = max(acc.shape[0], part.shape[0])
    cols = max(acc.shape[1], part.shape[1])
    if acc.shape != (rows, cols):
        grown = np.zeros((rows, cols), dtype=object)
        grown[: acc.shape[0], : acc.shape[1]] = acc
        acc = grown
    acc[: part.shape[0], : part.shape[1]] += part * scale
    return acc


def _reduce_grid(w: np.ndarray, denom: int) -> tuple[np.ndarray, int]:
    g = denom
    for x in w.flat:
        if x:
            g = math.gcd(g, int(x))
            if g == 1:
                break
    if g > 1:
        w = w // g
        denom //= g
    rows = np.nonzero(np.any(w != 0, axis=1))[0]
    cols = np.nonzero(np.any(w != 0, axis=0))[0]
    return w[: rows[-1] + 1, : cols[-1] + 1], denom


def _z_step(prev: BivariatePMF, m: int) -> BivariatePMF:
    W, D = prev.weights, prev.denom
    p0 = [int(sum(int(x) for x in row)) for row in W]  # marginal of coordinate 0 over the same D
    base = _intpoly.pow2d(W, m)                        # m copies with identity coefficients
    swapped = np.ascontiguousarray(W.T)
    swap_pow = [np.full((1, 1), 1, dtype=object)]
    for _ in range(1, m):
        swap_pow.append(_intpoly.mul2d(swap_pow[-1], swapped))
    p0_pow: dict[int, list[int]] = {}

    def p0n(n: int) -> list[int]:
        if n not in p0_pow:
            p0_pow[n] = _intpoly.pow1d(p0, n)
        return p0_pow[n]

    terms = []
    for (u0, na, nb), count in coin_profile(m):
        outer = np.empty((len(p0n(na)), len(p0n(nb))), dtype=object)
        outer[:, :] = np.outer(np.array(p0n(na), dtype=object), np.array(p0n(nb), dtype=object))
        grid = _intpoly.mul2d(_intpoly.mul2d(base, swap_pow[u0]), outer)
        terms.append((m + u0 + na + nb, count, grid))
    top = max(e for e, _, _ in terms)
    acc = np.zeros((1, 1), dtype=object)
    for e, count, grid in terms:
        acc = _grid_add(acc, grid, count * D ** (top - e))
    w, denom = _reduce_grid(acc, m**m * D**top)
    return BivariatePMF(w, denom)


def z_recursion_pmf(m: int, k: int, max_support: Optional[int] = None) -> BivariatePMF:
    """Exact joint law of ``(Z_{n,0}, Z_{n,1})`` for ``n = m**(2k)``.

    Coordinate 1 has the law of the cost on the worst input with root 1 and
    coordinate 0 that of the worst input with root 0.  The same coin outcome
    drives both coordinates.
    """
    if m < 2 or k < 0:
        raise ValueError("need m >= 2 and k >= 0")
    cap = DEFAULT_CAPS.max_pmf_support if max_support is None else max_support
    size = (m ** (2 * k) + 1) ** 2
    if size > cap:
        raise CapExceeded("max-pmf-support", size, cap)
    law = BivariatePMF.point(1, 1)
    for _ in range(k):
        law = _z_step(law, m)
    return law


def z_marginal_pmfs(m: int, k: int, exact: bool = True,
                    max_support: Optional[int] = None) -> list[tuple[CostPMF, CostPMF]]:
    """Marginal laws ``(Z_{n,0}, Z_{n,1})`` for every level ``0..k``.

    Each marginal at level k depends only on the two marginals at level k-1,
    so no joint grid is needed.  A 1-valued OR group costs ``R = P1 * Q`` with
    ``Q`` the law of the zeros read before its one; then
    ``P1' = R^{*m}`` and ``P0' = P0^{*m} * mean(R^{*u}, u < m)``.
    """
    cap = DEFAULT_CAPS.max_pmf_support if max_support is None else max_support
    if m ** (2 * k) + 1 > cap:
        raise CapExceeded("max-pmf-support", m ** (2 * k) + 1, cap)
    p0 = p1 = CostPMF.point(1) if exact else CostPMF.point(1).to_float()
    out = [(p0, p1)]
    for _ in range(k):
        p0_pows = [CostPMF.point(0) if exact else CostPMF.point(0).to_float()]
        for _ in range(1, m + 1):
            p0_pows.append(p0_pows[-1].convolve(p0))
        q = mixture([(1, p0_pows[j]) for j in range(m)], m)
        r = p1.convolve(q)
        r_pows = [p0_pows[0]]
        for _ in range(1, m + 1):
            r_pows.append(r_pows[-1].convolve(r))
        p1 = r_pows[m]
        p0 = p0_pows[m].convolve(mixture([(1, r_pows[u]) for u in range(m)], m))
        out.append((p0, p1))
    return out


# --- worst-case verification ---------------------------------------------------

@dataclass
class WorstCaseReport:
    m: int
    k: int
    inputs_checked: int
    zero_class_size: int
    star_pmf: CostPMF
    zero_pmf: CostPMF
    violations: list[str] = field(default_factory=list)
    zero_violations: list[str] = field(default_factory=list)
    maximizers: list[str] = field(default_factory=list)
    zero_maximizers: list[str] = field(default_factory=list)
    distinct_laws: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations and not self.zero_violations

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "inputs_checked": self.inputs_checked,
            "zero_class_size": self.zero_class_size,
            "ok": self.ok,
            "violations": self.violations,
            "zero_violations": self.zero_violations,
            "maximizers": self.maximizers,
            "zero_maximizers": self.zero_maximizers,
            "distinct_laws": self.distinct_laws,
            "star_pmf": self.star_pmf.to_json(),
            "zero_pmf": self.zero_pmf.to_json(),
        }


def verify_worst_case(m: int, k: int, max_n: Optional[int] = None,
                      max_listed: int = 64) -> WorstCaseReport:
    """Check every input against the constructed worst cases.

    Every input must be stochastically below the root-1 worst input, and every
    input evaluating to 0 below the root-0 worst input.  Inputs whose law
    equals the respective worst law are listed as maximizers (up to
    ``max_listed`` of each).
    """
    cap = DEFAULT_CAPS.max_exhaustive_n if max_n is None else max_n
    shape = TreeShape(m, k)
    n = shape.leaf_count
    if n > cap:
        raise CapExceeded("max-exhaustive-n", n, cap)
    composer = _Composer(m)
    star_id = composer.evaluate(worst_input(m, k, 1).bits, shape.height)
    zero_id = composer.evaluate(worst_input(m, k, 0).bits, shape.height)
    star, zero = composer.pmfs[star_id], composer.pmfs[zero_id]
    report = WorstCaseReport(m, k, 0, 0, star, zero)
    verdict: dict[int, tuple[bool, bool]] = {}
    for code in range(1 << n):
        bits = tuple((code >> (n - 1 - i)) & 1 for i in range(n))
        node = composer.evaluate(bits, shape.height)
        report.inputs_checked += 1
        if node not in verdict:
            pmf = composer.pmfs[node]
            below_zero = composer.values[node] == 1 or dominates(pmf, zero)
            verdict[node] = (dominates(pmf, star), below_zero)
        below_star, below_zero = verdict[node]
        text = "".join(map(str, bits))
        if not below_star:
            report.violations.append(text)
        if composer.values[node] == 0:
            report.zero_class_size += 1
            if not below_zero:
                report.zero_violations.append(text)
            if composer.pmfs[node] == zero and len(report.zero_maximizers) < max_listed:
                report.zero_maximizers.append(text)
        if composer.pmfs[node] == star and len(report.maximizers) < max_listed:
            report.maximizers.append(text)
    report.distinct_laws = len(verdict)
    return report


# --- convergence diagnostics ------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    kolmogorov: float
    wasserstein: float
    rescaled_mean: float
    rescaled_variance: float


def _scaled(p: CostPMF, scale: float) -> tuple[np.ndarray, np.ndarray]:
    w = p.as_array()
    x = (p.offset + np.arange(len(w))) / scale
    keep = w > 0
    return x[keep], w[keep]


def kolmogorov_distance(xa, wa, xb, wb) -> float:
    grid = np.union1d(xa, xb)
    fa = np.concatenate([[0.0], np.cumsum(wa)])[np.searchsorted(xa, grid, side="right")]
    fb = np.concatenate([[0.0], np.cumsum(wb)])[np.searchsorted(xb, grid, side="right")]
    return float(np.max(np.abs(fa - fb)))


def wasserstein1(xa, wa, xb, wb) -> float:
    """First Wasserstein distance, the integral of the absolute CDF difference."""
    grid = np.union1d(xa, xb)
    fa = np.concatenate([[0.0], np.cumsum(wa)])[np.searchsorted(xa, grid, side="right")]
    fb = np.concatenate([[0.0], np.cumsum(wb)])[np.searchsorted(xb, grid, side="right")]
    return float(np.sum(np.abs(fa - fb)[:-1] * np.diff(grid)))


def convergence_diagnostics(m: int, k_max: int, exact: bool = False,
                            max_support: Optional[int] = None) -> list[ConvergenceRow]:
    """Distances between the rescaled worst-case laws at levels k-1 and k.

    The root-1 marginal at level k is divided by ``lambda1**k`` (that is
    ``n**alpha``); row k compares it with level k-1.
    """
    from .analytics import spectral

    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    lam = float(spectral(m).lambda1)
    laws = [p1 for _, p1 in z_marginal_pmfs(m, k_max, exact=exact, max_support=max_support)]
    rows = []
    prev = _scaled(laws[0], 1.0)
    for k in range(1, k_max + 1):
        cur = _scaled(laws[k], lam**k)
        x, w = cur
        mean = float(np.dot(x, w))
        var = float(np.dot(x * x, w) - mean * mean)
        rows.append(ConvergenceRow(k, kolmogorov_distance(*prev, *cur), wasserstein1(*prev, *cur), mean, var))
        prev = cur
    return rows
