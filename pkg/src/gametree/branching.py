"""Two-type Galton-Watson process behind the worst-case cost, and a seeded
Monte Carlo harness.

A type-1 individual is a node of value 1 two levels up: it has ``m`` type-1
children and ``U_1 + ... + U_m`` type-0 children.  A type-0 individual has
``U_0`` type-1 children and ``m + U_1 + ... + U_{U_0}`` type-0 children.  All
``U`` are independent and uniform on ``{0, ..., m-1}``.  Generation ``k``
counts the depth-``2k`` nodes the evaluation reads, so its total size is the
cost on the worst input.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .analytics import expected_cost, spectral
from .errors import DEFAULT_CAPS, CapExceeded
from .pmf import CostPMF
from .rng import run_rng

DEFAULT_T_GRID = (0.25, 0.5, 1.0, 1.5, 2.0)


@dataclass(frozen=True)
class Population:
    type0: int
    type1: int

    def __post_init__(self):
        if self.type0 < 0 or self.type1 < 0:
            raise ValueError("counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.type0 + self.type1


def _uniform_sum(rng: np.random.Generator, count: int, m: int) -> int:
    """Sum of ``count`` independent uniforms on ``{0, ..., m-1}``."""
    if count == 0:
        return 0
    if m == 2:
        return int(rng.binomial(count, 0.5))
    counts = rng.multinomial(count, np.full(m, 1.0 / m))
    return int(np.dot(counts, np.arange(m)))


def offspring(kind: int, m: int, rng: np.random.Generator) -> Population:
    """Offspring of a single individual of type ``kind``."""
    if m < 2:
        raise ValueError("arity must be >= 2")
    if kind == 1:
        return Population(int(rng.integers(0, m, size=m).sum()), m)
    if kind == 0:
        u0 = int(rng.integers(0, m))
        return Population(m + int(rng.integers(0, m, size=u0).sum()), u0)
    raise ValueError("type must be 0 or 1")


def step(pop: Population, m: int, rng: np.random.Generator) -> Population:
    """One generation: independent offspring for every individual, aggregated."""
    return Population(*_advance(pop.type0, pop.type1, m, rng))


def _advance(v: int, w: int, m: int, rng: np.random.Generator) -> tuple[int, int]:
    ones = _uniform_sum(rng, v, m)  # U_0 summed over the type-0 individuals
    return _uniform_sum(rng, m * w, m) + m * v + _uniform_sum(rng, ones, m), m * w + ones


def simulate(m: int, k: int, start: int, rng: np.random.Generator,
             max_population: Optional[int] = None) -> Population:
    """Generation ``k`` of the process started from one individual of type ``start``."""
    if start not in (0, 1):
        raise ValueError("start must be 0 or 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    cap = DEFAULT_CAPS.max_population if max_population is None else max_population
    v, w = 1 - start, start
    for _ in range(k):
        v, w = _advance(v, w, m, rng)
        if v + w > cap:
            raise CapExceeded("max-population", v + w, cap)
    return Population(v, w)


@dataclass
class MonteCarloStats:
    m: int
    k: int
    start: int
    runs: int
    seed: int
    mean: float
    variance: Optional[float]
    expected: str
    scale: float
    empirical_tail: dict[float, float]
    histogram: dict[int, int] = field(default_factory=dict)

    @property
    def standard_error(self) -> Optional[float]:
        if self.variance is None:
            return None
        return math.sqrt(self.variance / self.runs)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "start": self.start,
            "runs": self.runs,
            "seed": self.seed,
            "mean": self.mean,
            "variance": self.variance,
            "expected": self.expected,
            "scale": self.scale,
            "empirical_tail": {repr(t): f for t, f in self.empirical_tail.items()},
            "histogram": {str(c): n for c, n in sorted(self.histogram.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "MonteCarloStats":
        return cls(
            m=int(data["m"]), k=int(data["k"]), start=int(data["start"]),
            runs=int(data["runs"]), seed=int(data["seed"]),
            mean=float(data["mean"]),
            variance=None if data["variance"] is None else float(data["variance"]),
            expected=str(data["expected"]), scale=float(data["scale"]),
            empirical_tail={float(t): float(f) for t, f in data["empirical_tail"].items()},
            histogram={int(c): int(n) for c, n in data.get("histogram", {}).items()},
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["m", "k", "start", "runs", "seed", "mean", "variance", "expected", "scale"])
        writer.writerow([self.m, self.k, self.start, self.runs, self.seed, repr(self.mean),
                         "" if self.variance is None else repr(self.variance), self.expected,
                         repr(self.scale)])
        writer.writerow([])
        writer.writerow(["t", "exceedance_frequency"])
        for t, f in self.empirical_tail.items():
            writer.writerow([repr(t), repr(f)])
        return buf.getvalue()


def _run_block(args: tuple) -> np.ndarray:
    m, k, start, seed, lo, hi, cap = args
    return np.array([simulate(m, k, start, run_rng(seed, r), cap).total for r in range(lo, hi)],
                    dtype=np.int64)


def sample_totals(m: int, k: int, start: int, runs: int, seed: int, workers: int = 1,
                  max_population: Optional[int] = None) -> np.ndarray:
    """Total population of ``runs`` independent runs; run ``r`` uses ``run_rng(seed, r)``."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    cap = DEFAULT_CAPS.max_population if max_population is None else max_population
    if workers <= 1 or runs < 2 * workers:
        return _run_block((m, k, start, seed, 0, runs, cap))
    bounds = np.linspace(0, runs, workers + 1, dtype=int)
    jobs = [(m, k, start, seed, int(lo), int(hi), cap) for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(_run_block, jobs)))


def monte_carlo(m: int, k: int, start: int = 1, runs: int = 10_000, seed: int = 0,
                t_grid: Sequence[float] = DEFAULT_T_GRID, workers: int = 1,
                max_population: Optional[int] = None) -> MonteCarloStats:
    """Sample mean, variance and exceedance frequencies of ``(C - E C) / n^alpha``."""
    totals = sample_totals(m, k, start, runs, seed, workers, max_population)
    expected = expected_cost(m, k, start)
    scale = float(spectral(m).lambda1) ** k
    centred = (totals - float(expected)) / scale
    variance = float(np.var(totals, ddof=1)) if runs > 1 else None
    tail = {float(t): float(np.mean(centred > t)) for t in t_grid}
    hist = Counter(int(x) for x in totals)
    return MonteCarloStats(m, k, start, runs, seed, float(np.mean(totals)), variance,
                           str(expected), scale, tail, dict(sorted(hist.items())))


def chi_square_gof(histogram: dict[int, int], pmf: CostPMF, min_expected: float = 5.0):
    """Pearson goodness-of-fit of observed counts against an exact PMF.

    Adjacent cells are pooled left to right until each expected count reaches
    ``min_expected``.  Returns ``(statistic, dof, p_value)``.
    """
    runs = sum(histogram.values())
    outside = [c for c in histogram if pmf.prob(c) == 0]
    if outside:
        return math.inf, 0, 0.0
    obs, exp = [], []
    cur_o, cur_e = 0, 0.0
    for x in pmf.support:
        cur_o += histogram.get(x, 0)
        cur_e += float(pmf.prob(x)) * runs
        if cur_e >= min_expected:
            obs.append(cur_o)
            exp.append(cur_e)
            cur_o, cur_e = 0, 0.0
    if cur_e > 0 or cur_o:
        if exp:
            obs[-1] += cur_o
            exp[-1] += cur_e
        else:
            obs.append(cur_o)
            exp.append(cur_e)
    if len(obs) < 2:
        return 0.0, 0, 1.0
    res = stats.chisquare(obs, exp)
    return float(res.statistic), len(obs) - 1, float(res.pvalue)


def empirical_mean_matrix(m: int, draws: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise mean offspring matrix from ``draws`` single-individual draws per type.

    Returns ``(means, standard_errors)``; column j belongs to a type-j parent.
    """
    rng = run_rng(seed, 0)
    means = np.zeros((2, 2))
    ses = np.zeros((2, 2))
    for kind in (0, 1):
        sample = np.array([[p.type0, p.type1] for p in (offspring(kind, m, rng) for _ in range(draws))],
                          dtype=float)
        means[:, kind] = sample.mean(axis=0)
        ses[:, kind] = sample.std(axis=0, ddof=1) / math.sqrt(draws)
    return means, ses
