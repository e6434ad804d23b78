"""Special-function kernels: Pochhammer symbols, generalized hypergeometric
series, modified Bessel K, classical orthogonal polynomials and error functions.

The hypergeometric series are summed directly with Neumaier compensation.
Bessel K and the error functions are thin wrappers over ``scipy.special``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special as sp

from .errors import DomainError, NonConvergence, PoleInDenominator

DEFAULT_TOL = 1e-14
DEFAULT_MAX_TERMS = 10**6
# |x| above which 2F1 is evaluated through the x -> 1 - x connection formula
HYP2F1_SWITCH = 0.75


@dataclass(frozen=True)
class SeriesResult:
    """Outcome of a truncated series evaluation.

    ``tail_bound`` is the magnitude of the first neglected term relative to
    the accumulated sum (0 when the series terminated exactly).
    """

    value: complex
    terms_used: int
    tail_bound: float


def pochhammer(b: float, m: int) -> float:
    """Rising factorial (b)_m = b (b+1) ... (b+m-1), with (b)_0 = 1."""
    if m < 0:
        raise DomainError(f"pochhammer order must be nonnegative, got {m}")
    out = 1.0
    for j in range(m):
        out *= b + j
    return out


def _is_nonpositive_int(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


def _term_ratio(a: Sequence[float], b: Sequence[float], m: int):
    """Return (numerator, denominator) of t_{m+1}/t_m without the x/(m+1) factor."""
    num = 1.0
    for aj in a:
        num *= aj + m
    den = 1.0
    for bj in b:
        den *= bj + m
    return num, den


class _Neumaier:
    """Compensated accumulator; works elementwise on numpy arrays too."""

    def __init__(self, init):
        self.s = init
        self.c = init * 0

    def add(self, v):
        t = self.s + v
        big = np.abs(self.s) >= np.abs(v)
        self.c = self.c + np.where(big, (self.s - t) + v, (v - t) + self.s)
        self.s = t

    @property
    def value(self):
        return self.s + self.c


def _add_complex(acc_re, acc_im, term):
    acc_re.add(term.real)
    acc_im.add(term.imag)


def _tail_ratio(ratio, absx, geometric):
    """Ratio used to bound the neglected tail by a geometric series.

    For p = q + 1 the term ratio tends to |x|, so the larger of the two bounds
    the remaining ratios. For p <= q the ratio tends to zero; requiring it to be
    at most 1/2 keeps the stop out of the initial growth phase.
    """
    if geometric:
        return np.maximum(ratio, absx)
    return np.where(ratio <= 0.5, ratio, 1.0)


def hyp_pfq_terms(a, b, x, n_terms: int) -> list[complex]:
    """First ``n_terms`` terms of the pFq series (used by order-independence checks)."""
    terms = []
    t = complex(1.0)
    for m in range(n_terms):
        terms.append(t)
        num, den = _term_ratio(a, b, m)
        if den == 0:
            if num == 0:
                break
            raise PoleInDenominator(f"denominator parameter hits zero at m={m}")
        t = t * num / den * x / (m + 1)
        if t == 0:
            break
    return terms


def hyp_pfq(a: Sequence[float], b: Sequence[float], x: complex,
            tol: float = DEFAULT_TOL, max_terms: int = DEFAULT_MAX_TERMS) -> SeriesResult:
    """Generalized hypergeometric series pFq(a; b; x) by direct summation.

    Summation stops once the geometric bound on the neglected tail, built from
    the current term ratio, is below ``tol`` relative to the sum.
    """
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    if len(a) == len(b) + 1 and abs(x) >= 1 and not any(_is_nonpositive_int(v) for v in a):
        raise NonConvergence(f"{len(a)}F{len(b)} series diverges for |x| = {abs(x)} >= 1")
    if len(a) > len(b) + 1 and x != 0 and not any(_is_nonpositive_int(v) for v in a):
        raise NonConvergence(f"{len(a)}F{len(b)} series has zero radius of convergence")

    geometric = len(a) == len(b) + 1
    re, im = _Neumaier(0.0), _Neumaier(0.0)
    t = complex(1.0)
    for m in range(max_terms):
        _add_complex(re, im, t)
        num, den = _term_ratio(a, b, m)
        if den == 0:
            if num == 0:
                return SeriesResult(complex(re.value, im.value), m + 1, 0.0)
            raise PoleInDenominator(f"denominator parameter reaches zero at m={m}")
        ratio = num / den * x / (m + 1)
        t_next = t * ratio
        if t_next == 0:
            return SeriesResult(complex(re.value, im.value), m + 1, 0.0)
        s = abs(complex(re.value, im.value))
        rel = abs(t_next) / s if s > 0 else math.inf
        r = _tail_ratio(abs(ratio), abs(x), geometric)
        if r < 1 and rel / (1 - r) <= tol:
            return SeriesResult(complex(re.value, im.value), m + 1, rel)
        t = t_next
    raise NonConvergence(f"pFq series not converged after {max_terms} terms")


def hyp_pfq_array(a: Sequence[float], b: Sequence[float], x,
                  tol: float = DEFAULT_TOL, max_terms: int = 100_000) -> np.ndarray:
    """Vectorized real pFq over an array of arguments (same stopping rule as hyp_pfq)."""
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    geometric = len(a) == len(b) + 1
    x = np.asarray(x, dtype=float)
    shape = x.shape
    x = x.ravel()
    acc = _Neumaier(np.zeros_like(x))
    t = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for m in range(max_terms):
        acc.add(np.where(active, t, 0.0))
        num, den = _term_ratio(a, b, m)
        if den == 0:
            if num == 0:
                return acc.value.reshape(shape)
            raise PoleInDenominator(f"denominator parameter reaches zero at m={m}")
        ratio = num / den * x / (m + 1)
        t = t * ratio
        s = np.abs(acc.value)
        r = _tail_ratio(np.abs(ratio), np.abs(x), geometric)
        with np.errstate(divide="ignore", invalid="ignore"):
            done = (t == 0) | ((r < 1) & (np.abs(t) <= tol * s * (1 - r)))
        active &= ~done
        if not active.any():
            return acc.value.reshape(shape)
    raise NonConvergence(f"pFq series not converged after {max_terms} terms")


def hyp1f1(a: float, b: float, x) -> np.ndarray:
    return hyp_pfq_array([a], [b], x)


def hyp2f1(a: float, b: float, c: float, x) -> np.ndarray:
    """Gauss 2F1 on x < 1, switching to the 1 - x connection formula for x > 0.75."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    near = x > HYP2F1_SWITCH
    far = ~near
    if far.any():
        if (x[far] < -HYP2F1_SWITCH).any():
            out[far] = sp.hyp2f1(a, b, c, x[far])
        else:
            out[far] = hyp_pfq_array([a, b], [c], x[far])
    if near.any():
        xn = x[near]
        if np.any(xn >= 1):
            raise DomainError("hyp2f1 argument must be < 1")
        g = c - a - b
        if float(g).is_integer():
            # logarithmic connection case
            out[near] = sp.hyp2f1(a, b, c, xn)
        else:
            y = 1.0 - xn
            coef1 = sp.gamma(c) * sp.gamma(g) * sp.rgamma(c - a) * sp.rgamma(c - b)
            coef2 = sp.gamma(c) * sp.gamma(-g) * sp.rgamma(a) * sp.rgamma(b)
            part = np.zeros_like(xn)
            if coef1 != 0:
                part += coef1 * hyp_pfq_array([a, b], [a + b - c + 1], y)
            if coef2 != 0:
                part += coef2 * y**g * hyp_pfq_array([c - a, c - b], [g + 1], y)
            out[near] = part
    return out


def bessel_k(order: float, x):
    """Modified Bessel function of the second kind K_order(x) for x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("bessel_k requires x > 0")
    # K is even in the order with K_nu - K_0 = O(nu^2); kv returns NaN for subnormal nu
    if abs(order) < 1e-150:
        order = 0.0
    out = sp.kv(order, xa)
    return float(out) if np.ndim(out) == 0 else out


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by three-term recurrence."""
    x = np.asarray(x, dtype=float)
    h0 = np.ones_like(x)
    if n == 0:
        return h0 if x.ndim else float(h0)
    h1 = 2 * x
    for j in range(1, n):
        h0, h1 = h1, 2 * x * h1 - 2 * j * h0
    return h1 if x.ndim else float(h1)


def hermite_function(n: int, x):
    """Normalized oscillator eigenfunction e^{-x^2/2} H_n(x) / sqrt(sqrt(pi) 2^n n!).

    Uses the normalized recurrence, so it does not overflow for large n.
    """
    x = np.asarray(x, dtype=float)
    p0 = np.pi**-0.25 * np.exp(-0.5 * x * x)
    if n == 0:
        return p0
    p1 = math.sqrt(2.0) * x * p0
    for j in range(1, n):
        p0, p1 = p1, math.sqrt(2.0 / (j + 1)) * x * p1 - math.sqrt(j / (j + 1)) * p0
    return p1


def gegenbauer(n: int, nu: float, y):
    """Gegenbauer polynomial C_n^nu(y) by three-term recurrence."""
    y = np.asarray(y, dtype=float)
    c0 = np.ones_like(y)
    if n == 0:
        return c0 if y.ndim else float(c0)
    c1 = 2 * nu * y
    for j in range(1, n):
        c0, c1 = c1, (2 * (j + nu) * y * c1 - (j + 2 * nu - 1) * c0) / (j + 1)
    return c1 if y.ndim else float(c1)


def erf(x):
    return sp.erf(x)


def erfi(x):
    """Imaginary error function -i erf(ix)."""
    return sp.erfi(x)
