"""Grids, quadrature and the finite-difference eigenvalue oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, QuadratureFailure, SingularPotential

DEFAULT_POINTS = 4001
POTENTIAL_CAP = 1e12


@dataclass(frozen=True)
class Grid:
    xmin: float
    xmax: float
    n: int = DEFAULT_POINTS

    def __post_init__(self):
        if self.n < 201 or self.n % 2 == 0:
            raise DomainError(f"grid needs an odd point count >= 201, got {self.n}")
        if not self.xmax > self.xmin:
            raise DomainError("grid requires xmax > xmin")

    @property
    def h(self) -> float:
        return (self.xmax - self.xmin) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.xmin, self.xmax, self.n)

    @classmethod
    def for_model(cls, model, n: int = DEFAULT_POINTS) -> "Grid":
        """Grid spanning the model's numeric window; its end points act as walls."""
        a, b = model.numeric_domain()
        return cls(a, b, n)

    def interior(self):
        """Grid without its two end points (Dirichlet nodes are implicit)."""
        return self.x[1:-1]

    def sample(self, f: Callable) -> np.ndarray:
        """f on the interior nodes, padded with zeros at the two walls."""
        inner = np.asarray(f(self.interior()))
        out = np.zeros(self.n, dtype=inner.dtype)
        out[1:-1] = inner
        return out


def diagonalize_1d(potential: Callable, grid: Grid, n_levels: int):
    """Lowest eigenpairs of -1/2 d^2/dx^2 + V with Dirichlet walls at the grid ends.

    Central differences on the interior nodes, solved as a symmetric tridiagonal
    problem. Returns a list of (eigenvalue, eigenvector on interior nodes).
    """
    x = grid.interior()
    v = np.asarray(potential(x), dtype=float)
    if not np.all(np.isfinite(v)):
        raise SingularPotential("potential not finite on the grid interior")
    v = np.minimum(v, POTENTIAL_CAP)
    h2 = grid.h**2
    diag = 1.0 / h2 + v
    off = np.full(len(x) - 1, -0.5 / h2)
    w, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, n_levels - 1))
    return [(float(w[i]), vecs[:, i]) for i in range(len(w))]


def quad_adaptive(f: Callable, a: float, b: float, tol: float = 1e-10,
                  y0: float = 16.0, max_doublings: int = 30) -> float:
    """Adaptive Gauss-Kronrod integral of f over [a, b].

    An infinite upper limit is handled by doubling a finite cut Y until the
    added piece is below ``tol`` relative to the running total.
    """
    def piece(lo, hi):
        val, err = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=tol * 1e-2, limit=500)
        if not math.isfinite(val) or err > max(tol * abs(val), 1e-300):
            raise QuadratureFailure(f"quad on [{lo}, {hi}] error estimate {err:.3g} too large")
        return val

    if math.isfinite(b):
        return piece(a, b)
    hi = a + y0
    total = piece(a, hi)
    for _ in range(max_doublings):
        extra = piece(hi, 2 * hi - a)
        total += extra
        hi = 2 * hi - a
        if abs(extra) <= tol * abs(total) * 1e-2:
            return total
    raise QuadratureFailure("semi-infinite integral did not converge under doubling")


def integrate_grid(values: np.ndarray, grid: Grid) -> float:
    """Composite Simpson rule over a uniform grid."""
    return float(integrate.simpson(values, dx=grid.h))


def second_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Richardson-extrapolated second differences (fourth order).

    Returns an array of the same length with NaN at the two outermost points on
    each side, where the stencil of width 2h does not fit.
    """
    v = np.asarray(values)
    out = np.full(v.shape, np.nan, dtype=v.dtype)
    d1 = (v[3:-1] - 2 * v[2:-2] + v[1:-3]) / h**2
    d2 = (v[4:] - 2 * v[2:-2] + v[:-4]) / (4 * h**2)
    out[2:-2] = (4 * d1 - d2) / 3
    return out


def first_derivative(values: np.ndarray, h: float) -> np.ndarray:
    v = np.asarray(values)
    out = np.full(v.shape, np.nan, dtype=v.dtype)
    d1 = (v[3:-1] - v[1:-3]) / (2 * h)
    d2 = (v[4:] - v[:-4]) / (4 * h)
    out[2:-2] = (4 * d1 - d2) / 3
    return out
