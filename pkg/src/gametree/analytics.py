"""Closed-form and numerically solved constants for the worst-case cost.

Conventions: the cost vector is ``Z = (Z0, Z1)`` where coordinate 1 is the
cost on the root-1 worst input and coordinate 0 the cost on the root-0 worst
input.  One step of the recursion is ``Z = sum_j A_j Z^(j)`` with independent
copies ``Z^(j)`` and 0/1 coefficient matrices ``A_j`` that share coins.

Rationals (``Fraction``) are used for everything that is rational; irrational
constants are mpmath numbers evaluated at ``PRECISION`` decimal digits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import mpmath

from .errors import NumericError

PRECISION = 50
OVERLAP_C = Fraction(153, 100)
REFERENCE_TOLL_RATIO = Fraction(104, 77)

Mat2 = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


def _mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


# --- mean matrix and exact means -------------------------------------------

@dataclass(frozen=True)
class MeanMatrix:
    """Expected offspring counts: column j holds the expected (type-0, type-1)
    offspring of a type-j individual."""

    m: int
    entries: Mat2

    @property
    def det(self) -> Fraction:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    @property
    def trace(self) -> Fraction:
        return self.entries[0][0] + self.entries[1][1]

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self.entries[ij[0]][ij[1]]

    def power(self, k: int) -> Mat2:
        result: Mat2 = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
        base = self.entries
        while k:
            if k & 1:
                result = _matmul(result, base)
            k >>= 1
            if k:
                base = _matmul(base, base)
        return result


def _matmul(x: Mat2, y: Mat2) -> Mat2:
    return tuple(
        tuple(sum((x[i][t] * y[t][j] for t in range(2)), Fraction(0)) for j in range(2))
        for i in range(2)
    )  # type: ignore[return-value]


def mean_matrix(m: int) -> MeanMatrix:
    if m < 2:
        raise ValueError("arity must be >= 2")
    h = Fraction(m - 1, 2)
    return MeanMatrix(m, ((m + h * h, m * h), (h, Fraction(m))))


def expected_cost(m: int, k: int, start: int = 1) -> Fraction:
    """``(1, 1) M^k e_start``: mean cost on the root-``start`` worst input."""
    if start not in (0, 1):
        raise ValueError("start must be 0 or 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    mk = mean_matrix(m).power(k)
    return mk[0][start] + mk[1][start]


def expected_vector(m: int, k: int) -> tuple[Fraction, Fraction]:
    return expected_cost(m, k, 0), expected_cost(m, k, 1)


# --- spectrum ----------------------------------------------------------------

@dataclass(frozen=True)
class SpectralData:
    m: int
    lambda1: mpmath.mpf
    lambda2: mpmath.mpf
    alpha: mpmath.mpf
    beta: mpmath.mpf
    c0: mpmath.mpf
    c1: mpmath.mpf
    c2: mpmath.mpf

    def mean_closed_form(self, k: int) -> mpmath.mpf:
        """``c1 n^alpha - c2 n^beta`` with ``n^alpha = lambda1^k`` and ``n^beta = lambda2^k``."""
        with mpmath.workdps(PRECISION):
            return self.c1 * self.lambda1**k - self.c2 * self.lambda2**k

    def as_dict(self) -> dict[str, float]:
        return {name: float(getattr(self, name))
                for name in ("lambda1", "lambda2", "alpha", "beta", "c0", "c1", "c2")}


@lru_cache(maxsize=None)
def spectral(m: int) -> SpectralData:
    """Eigenvalues of the mean matrix and the constants of the mean formula.

    ``beta`` is taken from the positive second eigenvalue, so that
    ``n^beta = lambda2^k``.  ``c0``, ``c1`` come from the closed forms
    ``1/2 + (m+3)/(2 sqrt(16m + (m-1)^2))`` and ``1/2 + (3m+1)/(2 sqrt(...))``;
    ``c2 = c1 - 1`` fixes the value 1 at k = 0.
    """
    M = mean_matrix(m)
    with mpmath.workdps(PRECISION):
        t, det = _mpf(M.trace), _mpf(M.det)
        root = mpmath.sqrt(t * t - 4 * det)
        lam1, lam2 = (t + root) / 2, (t - root) / 2
        two_log_m = 2 * mpmath.log(m)
        s = mpmath.sqrt(16 * m + (m - 1) ** 2)
        c0 = mpmath.mpf(1) / 2 + (m + 3) / (2 * s)
        c1 = mpmath.mpf(1) / 2 + (3 * m + 1) / (2 * s)
        return SpectralData(m, +lam1, +lam2, mpmath.log(lam1) / two_log_m,
                            mpmath.log(lam2) / two_log_m, +c0, +c1, c1 - 1)


def limit_mean_vector(m: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """``lim E Z_k / lambda1^k`` from the spectral projector (independent of the closed forms)."""
    sp = spectral(m)
    (a, b), (c, d) = mean_matrix(m).entries
    with mpmath.workdps(PRECISION):
        # E Z_k = (M^T)^k (1,1); projector onto lambda1 is (M^T - lambda2 I)/(lambda1 - lambda2)
        gap = sp.lambda1 - sp.lambda2
        z0 = (_mpf(a) - sp.lambda2 + _mpf(c)) / gap
        z1 = (_mpf(b) + _mpf(d) - sp.lambda2) / gap
        return +z0, +z1


# --- second moments ---------------------------------------------------------
# Symmetric 2x2 matrices are stored as (C00, C01, C11).

Sym = tuple


def _sym_outer(x: Sequence, y: Optional[Sequence] = None) -> Sym:
    y = x if y is None else y
    return (x[0] * y[0], x[0] * y[1], x[1] * y[1])


def cov_map(m: int, c: Sym) -> Sym:
    """``E sum_j A_j C A_j^T`` over the coefficient matrices of one recursion step."""
    h = Fraction(m - 1, 2)
    c00, c01, c11 = c
    return (
        m * c00 + h * c11 + h * h * c00,
        m * c01 + h * c01,
        m * c11 + h * c00 + 2 * h * h * c00,
    )


@lru_cache(maxsize=None)
def _quad_basis(m: int) -> tuple[Sym, Sym, Sym]:
    """``E[(A mu)(A mu)^T]`` for ``A = sum_j A_j``, at mu = (1,0), (0,1), (1,1)."""
    return tuple(_quad_direct(m, mu) for mu in ((Fraction(1), Fraction(0)),
                                                  (Fraction(0), Fraction(1)),
                                                  (Fraction(1), Fraction(1))))  # type: ignore[return-value]


def _quad_direct(m: int, mu: tuple[Fraction, Fraction]) -> Sym:
    # Given U0 = u the summed matrix is [[m + T, u], [u + R, m]] with
    # T = u(m-1) - A, R = A + B, A and B sums of u and m-1-u uniforms on 0..m-1.
    h = Fraction(m - 1, 2)
    v = Fraction(m * m - 1, 12)
    mu0, mu1 = mu
    acc = [Fraction(0)] * 3
    for u in range(m):
        e0 = (m + u * (m - 1)) * mu0 + u * mu1 - u * h * mu0
        e1 = u * mu0 + m * mu1 + (m - 1) * h * mu0
        var0 = mu0 * mu0 * u * v
        var1 = mu0 * mu0 * (m - 1) * v
        cov = -mu0 * mu0 * u * v
        acc[0] += e0 * e0 + var0
        acc[1] += e0 * e1 + cov
        acc[2] += e1 * e1 + var1
    return tuple(a / m for a in acc)


def quad_map(m: int, mu: Sequence) -> Sym:
    """``E[(sum_j A_j mu)(sum_j A_j mu)^T]``; works for Fraction or mpmath ``mu``."""
    q10, q01, q11 = _quad_basis(m)
    mu0, mu1 = mu
    conv = (lambda x: x) if isinstance(mu0, Fraction) else _mpf
    return tuple(
        mu0 * mu0 * conv(q10[i]) + mu1 * mu1 * conv(q01[i])
        + mu0 * mu1 * conv(q11[i] - q10[i] - q01[i])
        for i in range(3)
    )


def step_matrices(m: int) -> Iterable[tuple[Fraction, list[Mat2]]]:
    """Every coin outcome of one step with its probability and coefficient matrices.

    ``m**m`` outcomes; the independent check on the closed-form moment maps.
    """
    one, zero = Fraction(1), Fraction(0)
    p = Fraction(1, m**m)
    eye: Mat2 = ((one, zero), (zero, one))
    for us in itertools.product(range(m), repeat=m):
        u0, rest = us[0], us[1:]
        mats = [eye] * m
        for r in range(1, m):
            i = one if r <= u0 else zero
            mats.append(((zero, i), (i, zero)))
        for r in range(1, m):
            for ell in range(1, m):
                hit = 1 if ell <= rest[r - 1] else 0
                a = Fraction((1 if r <= u0 else 0) * hit)
                b = Fraction(1 - hit)
                mats.append(((a, zero), (b, zero)))
        yield p, mats


@dataclass(frozen=True)
class SecondMomentState:
    k: int
    mean: tuple[Fraction, Fraction]
    cov: Sym  # covariance (C00, C01, C11)

    @property
    def second_moment(self) -> Sym:
        o = _sym_outer(self.mean)
        return tuple(self.cov[i] + o[i] for i in range(3))

    @property
    def var1(self) -> Fraction:
        return self.cov[2]


def moment_recursion(m: int, k_max: int) -> list[SecondMomentState]:
    """Exact mean vectors and covariances of ``Z`` for levels ``0..k_max``."""
    M = mean_matrix(m)
    mean = (Fraction(1), Fraction(1))
    cov: Sym = (Fraction(0),) * 3
    states = [SecondMomentState(0, mean, cov)]
    for k in range(1, k_max + 1):
        new_mean = (M[0, 0] * mean[0] + M[1, 0] * mean[1], M[0, 1] * mean[0] + M[1, 1] * mean[1])
        lin = cov_map(m, cov)
        quad = quad_map(m, mean)
        outer = _sym_outer(new_mean)
        cov = tuple(lin[i] + quad[i] - outer[i] for i in range(3))
        mean = new_mean
        states.append(SecondMomentState(k, mean, cov))
    return states


@dataclass(frozen=True)
class VarianceConstant:
    m: int
    d: mpmath.mpf
    second_moment: tuple  # E[G G^T] as (S00, S01, S11)
    mean: tuple  # (c0, c1)


@lru_cache(maxsize=None)
def variance_constant(m: int) -> VarianceConstant:
    """``d_m = Var G_1`` from the second-moment identity of the limit ``G``.

    With ``mu = E G`` the identity reads
    ``S = (L(S - mu mu^T) + Q(mu)) / lambda1^2``, three linear equations in
    the entries of ``S = E[G G^T]``.
    """
    sp = spectral(m)
    with mpmath.workdps(PRECISION):
        lam2 = sp.lambda1**2
        mu = (sp.c0, sp.c1)
        A = mpmath.matrix(3, 3)
        for j in range(3):
            e = [mpmath.mpf(0)] * 3
            e[j] = mpmath.mpf(1)
            col = cov_map(m, tuple(e))
            for i in range(3):
                A[i, j] = (1 if i == j else 0) - col[i] / lam2
        lin = cov_map(m, _sym_outer(mu))
        quad = quad_map(m, mu)
        rhs = mpmath.matrix([(quad[i] - lin[i]) / lam2 for i in range(3)])
        if abs(mpmath.det(A)) < mpmath.mpf(10) ** (-PRECISION // 2):
            raise NumericError(f"singular second-moment system for m={m}")
        s = mpmath.lu_solve(A, rhs)
        S = (+s[0], +s[1], +s[2])
        return VarianceConstant(m, S[2] - sp.c1**2, S, mu)


def normalized_variances(m: int, k_max: int) -> list[mpmath.mpf]:
    """``Var Z_{k,1} / lambda1^(2k)`` for ``k = 0..k_max`` from the exact recursion."""
    lam = spectral(m).lambda1
    with mpmath.workdps(PRECISION):
        return [_mpf(s.var1) / lam ** (2 * s.k) for s in moment_recursion(m, k_max)]


# --- toll term and tail constants -------------------------------------------

@dataclass(frozen=True)
class TollMoments:
    k: int
    second_moment: mpmath.mpf  # E ||b_n||^2
    sup_norm_sq: mpmath.mpf    # ||b_n||_{2,inf}^2


def _toll_raw(m: int, mean_prev: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    """Unscaled ``E||b||^2`` and ``max ||b||^2`` for one step from mean ``mean_prev``."""
    M = mean_matrix(m)
    mu0, mu1 = mean_prev
    e0 = M[0, 0] * mu0 + M[1, 0] * mu1
    e1 = M[0, 1] * mu0 + M[1, 1] * mu1
    quad = quad_map(m, mean_prev)
    second = quad[0] - e0 * e0 + quad[2] - e1 * e1
    # the squared norm is convex in (A, B); its maximum sits on a corner of the box
    best = Fraction(0)
    for u in range(m):
        for a in (0, u * (m - 1)):
            for b in (0, (m - 1 - u) * (m - 1)):
                t, r = u * (m - 1) - a, a + b
                x0 = (m + t) * mu0 + u * mu1 - e0
                x1 = (u + r) * mu0 + m * mu1 - e1
                best = max(best, x0 * x0 + x1 * x1)
    return second, best


def toll_moments(m: int, k: int) -> TollMoments:
    """Second moment and squared essential sup of the toll term at level ``k >= 1``.

    ``b_n = (sum_j A_j E Z_{k-1} - E Z_k) / lambda1^k`` with raw 0/1 coefficient
    matrices ``A_j``.
    """
    if k < 1:
        raise ValueError("toll term is defined for k >= 1")
    second, sup = _toll_raw(m, expected_vector(m, k - 1))
    lam = spectral(m).lambda1
    with mpmath.workdps(PRECISION):
        scale = lam ** (2 * k)
        return TollMoments(k, _mpf(second) / scale, _mpf(sup) / scale)


def brute_toll_moments(m: int, k: int) -> tuple[Fraction, Fraction]:
    """Unscaled ``(E||b||^2, max||b||^2)`` by enumerating every coin outcome."""
    mu = expected_vector(m, k - 1)
    vals = []
    probs = []
    for p, mats in step_matrices(m):
        x0 = sum(a[0][0] * mu[0] + a[0][1] * mu[1] for a in mats)
        x1 = sum(a[1][0] * mu[0] + a[1][1] * mu[1] for a in mats)
        vals.append((x0, x1))
        probs.append(p)
    e0 = sum(p * x[0] for p, x in zip(probs, vals))
    e1 = sum(p * x[1] for p, x in zip(probs, vals))
    sq = [(x[0] - e0) ** 2 + (x[1] - e1) ** 2 for x in vals]
    return sum(p * s for p, s in zip(probs, sq)), max(sq)


@dataclass(frozen=True)
class TollSups:
    m: int
    sup_second_moment: mpmath.mpf
    sup_norm_sq: mpmath.mpf
    argmax_second_moment: int
    argmax_norm: int
    levels_scanned: int

    @property
    def ratio(self) -> mpmath.mpf:
        """``sup ||b||_{2,inf}^2 / sup E||b||^2``."""
        return self.sup_norm_sq / self.sup_second_moment


@lru_cache(maxsize=None)
def toll_sups(m: int = 2, k_max: int = 60, tol: float = 1e-12) -> TollSups:
    """Suprema over ``k >= 1`` of the toll moments, by scanning ``k = 1..k_max``.

    Both sequences converge geometrically; the scan fails unless the last
    successive changes are below ``tol``.
    """
    rows = [toll_moments(m, k) for k in range(1, k_max + 1)]
    for attr in ("second_moment", "sup_norm_sq"):
        last = abs(getattr(rows[-1], attr) - getattr(rows[-2], attr))
        if last >= tol:
            raise NumericError(f"{attr} of the toll term not converged by k={k_max} (change {last})")
    i_e = max(range(len(rows)), key=lambda i: rows[i].second_moment)
    i_s = max(range(len(rows)), key=lambda i: rows[i].sup_norm_sq)
    sup_e = rows[i_e].second_moment
    sup_s = rows[i_s].sup_norm_sq
    return TollSups(m, sup_e, sup_s, rows[i_e].k, rows[i_s].k, k_max)


def toll_limit_ratio(m: int = 2) -> mpmath.mpf:
    """Ratio of the k -> infinity limits of the two toll moments."""
    sp = spectral(m)
    z0, z1 = limit_mean_vector(m)
    with mpmath.workdps(PRECISION):
        mu = (z0 / sp.lambda1, z1 / sp.lambda1)
        M = mean_matrix(m)
        e0 = _mpf(M[0, 0]) * mu[0] + _mpf(M[1, 0]) * mu[1]
        e1 = _mpf(M[0, 1]) * mu[0] + _mpf(M[1, 1]) * mu[1]
        quad = quad_map(m, mu)
        second = quad[0] - e0 * e0 + quad[2] - e1 * e1
        best = mpmath.mpf(0)
        for u in range(m):
            for a in (0, u * (m - 1)):
                for b in (0, (m - 1 - u) * (m - 1)):
                    t, r = u * (m - 1) - a, a + b
                    x0 = (m + t) * mu[0] + u * mu[1] - e0
                    x1 = (u + r) * mu[0] + m * mu[1] - e1
                    best = max(best, x0 * x0 + x1 * x1)
        return best / second


def psi(c, q) -> mpmath.mpf:
    """``(e^c - 1 - c) / c^q``."""
    with mpmath.workdps(PRECISION):
        c = _mpf(c)
        return (mpmath.exp(c) - 1 - c) / c ** _mpf(q)


@dataclass(frozen=True)
class TailConstants:
    m: int
    q: mpmath.mpf
    c: mpmath.mpf
    xi: mpmath.mpf
    psi_q: mpmath.mpf
    sup_second_moment: mpmath.mpf
    sup_norm: mpmath.mpf
    K: mpmath.mpf
    kappa: mpmath.mpf
    L: mpmath.mpf
    overlap_ok: bool
    by_analogy: bool

    def as_dict(self) -> dict:
        out = {name: float(getattr(self, name)) for name in
               ("q", "c", "xi", "psi_q", "sup_second_moment", "sup_norm", "K", "kappa", "L")}
        out.update(m=self.m, overlap_ok=self.overlap_ok, by_analogy=self.by_analogy)
        return out


def q_range(m: int = 2) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Open interval of admissible MGF exponents ``q``: ``(1/alpha, 2)``."""
    return 1 / spectral(m).alpha, mpmath.mpf(2)


def kappa_range(m: int = 2) -> tuple[mpmath.mpf, mpmath.mpf]:
    """Open interval of tail exponents matching ``q_range``: ``(2, 1/(1-alpha))``."""
    return mpmath.mpf(2), 1 / (1 - spectral(m).alpha)


def mgf_constant(q, m: int = 2, c=OVERLAP_C) -> TailConstants:
    """``K_q = supE||b||^2 / sup||b||_{2,inf}^(2-q) * (e^c - 1 - c) / (c^q xi)``.

    ``xi = 1 - m^(2(1 - q alpha))``; for ``m = 2`` this is ``1 - 4^(1 - q alpha)``.
    Values for ``m > 2`` reuse the binary derivation and are flagged ``by_analogy``.
    """
    sp = spectral(m)
    lo, hi = q_range(m)
    with mpmath.workdps(PRECISION):
        q = _mpf(q)
        if not lo < q < hi:
            raise ValueError(f"q={mpmath.nstr(q, 8)} outside the valid range ({mpmath.nstr(lo, 8)}, 2)")
        sups = toll_sups(m)
        c_mp = _mpf(c)
        xi = 1 - mpmath.mpf(m) ** (2 * (1 - q * sp.alpha))
        sup_norm = mpmath.sqrt(sups.sup_norm_sq)
        psi_q = psi(c_mp, q)
        K = sups.sup_second_moment / sup_norm ** (2 - q) * psi_q / xi
        kappa = q / (q - 1)
        L = K ** (1 - kappa) * (kappa - 1) ** (kappa - 1) / kappa**kappa
        overlap_ok = bool(psi(c_mp, 1) >= sups.ratio)
        return TailConstants(m, q, c_mp, xi, psi_q, sups.sup_second_moment, sup_norm,
                             K, kappa, L, overlap_ok, m != 2)


def tail_constant(kappa, m: int = 2) -> TailConstants:
    """Constants for tail exponent ``kappa`` (uses ``q = kappa / (kappa - 1)``)."""
    lo, hi = kappa_range(m)
    with mpmath.workdps(PRECISION):
        kappa = _mpf(kappa)
        if not lo < kappa < hi:
            raise ValueError(
                f"kappa={mpmath.nstr(kappa, 8)} outside the valid range (2, {mpmath.nstr(hi, 8)})")
        return mgf_constant(kappa / (kappa - 1), m)


def tail_bound(kappa, t, m: int = 2) -> float:
    """Upper bound ``exp(-L_kappa t^kappa)`` on ``P((C - E C)/n^alpha > t)``."""
    if t <= 0:
        raise ValueError("t must be positive")
    tc = tail_constant(kappa, m)
    with mpmath.workdps(PRECISION):
        return float(mpmath.exp(-tc.L * _mpf(t) ** tc.kappa))


# --- table of alpha_m, d_m, kappa_m ----------------------------------------

TABLE1_M = (2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 20, 30, 40, 50, 100)


@dataclass(frozen=True)
class Table1Row:
    m: int
    alpha: float
    d: float
    kappa: float

    def rounded(self) -> tuple[str, str, str]:
        return f"{self.alpha:.3f}", f"{self.d:.4f}", f"{self.kappa:.3f}"


def table1(m_list: Iterable[int] = TABLE1_M) -> list[Table1Row]:
    rows = []
    for m in m_list:
        sp = spectral(m)
        d = variance_constant(m).d
        rows.append(Table1Row(m, float(sp.alpha), float(d), float(1 / (1 - sp.alpha))))
    return rows
