"""Exactly solvable initial systems and their ladder-coefficient functions."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import gammaln

from . import specfun
from .errors import DomainError

INTRINSIC = "intrinsic"
LINEAR = "linear"
NATURAL = "natural"
FLAVORS = (INTRINSIC, LINEAR, NATURAL)


class SpectrumModel:
    """A 1-D Hamiltonian -1/2 d^2/dx^2 + V0(x) with spectrum E(n) known in closed form."""

    name = "model"
    domain: tuple[float, float]

    def energy(self, n):
        raise NotImplementedError

    @property
    def E0(self) -> float:
        return self.energy(0)

    def structure_f(self, n):
        return self.energy(n + 1) - self.energy(n)

    def potential(self, x):
        raise NotImplementedError

    def potential_derivs(self, x, order: int) -> np.ndarray:
        """Array ``[V0, V0', ..., V0^(order)]`` evaluated at x."""
        raise NotImplementedError

    def eigenfunction(self, n: int, x):
        raise NotImplementedError

    def eigenfunction_pair(self, n: int, x):
        """(psi_n, psi_n') at x."""
        raise NotImplementedError

    def numeric_domain(self) -> tuple[float, float]:
        """Finite interval used for grids, quadrature and the eigenvalue oracle."""
        return self.domain

    def check_domain(self, x):
        a, b = self.domain
        xa = np.asarray(x)
        if np.any(xa <= a) or np.any(xa >= b):
            raise DomainError(f"x outside the open domain ({a}, {b}) of {self.name}")

    def cli_name(self) -> str:
        return self.name

    def __repr__(self):
        return f"{type(self).__name__}({self.cli_name()!r})"


@dataclass(frozen=True, repr=False)
class Oscillator(SpectrumModel):
    L: float = 8.0
    name = "oscillator"
    domain = (-math.inf, math.inf)

    def energy(self, n):
        return n + 0.5

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * x * x

    def potential_derivs(self, x, order):
        x = np.asarray(x, dtype=float)
        out = np.zeros((order + 1,) + x.shape)
        out[0] = 0.5 * x * x
        if order >= 1:
            out[1] = x
        if order >= 2:
            out[2] = 1.0
        return out

    def eigenfunction(self, n, x):
        return specfun.hermite_function(n, x)

    def eigenfunction_pair(self, n, x):
        x = np.asarray(x, dtype=float)
        psi = specfun.hermite_function(n, x)
        d = -x * psi
        if n > 0:
            d = d + math.sqrt(2.0 * n) * specfun.hermite_function(n - 1, x)
        return psi, d

    def numeric_domain(self):
        return (-self.L, self.L)


@dataclass(frozen=True, repr=False)
class InfiniteWell(SpectrumModel):
    name = "well"
    domain = (0.0, math.pi)

    def energy(self, n):
        return (n + 1) ** 2 / 2

    def potential(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def potential_derivs(self, x, order):
        x = np.asarray(x, dtype=float)
        return np.zeros((order + 1,) + x.shape)

    def eigenfunction(self, n, x):
        self.check_domain(x)
        return math.sqrt(2 / math.pi) * np.sin((n + 1) * np.asarray(x, dtype=float))

    def eigenfunction_pair(self, n, x):
        x = np.asarray(x, dtype=float)
        c = math.sqrt(2 / math.pi)
        return c * np.sin((n + 1) * x), c * (n + 1) * np.cos((n + 1) * x)


@dataclass(frozen=True, repr=False)
class PoschlTeller(SpectrumModel):
    """Trigonometric Poschl-Teller well V0 = nu(nu-1) / (2 cos^2 x), nu > 1."""

    nu: float = 3.0
    inset: float = 1e-4
    name = "pt"
    domain = (-math.pi / 2, math.pi / 2)

    def __post_init__(self):
        if not self.nu > 1:
            raise DomainError(f"Poschl-Teller requires nu > 1, got {self.nu}")

    def cli_name(self):
        return f"pt:{self.nu:g}"

    def energy(self, n):
        return (n + self.nu) ** 2 / 2

    def potential(self, x):
        c = np.cos(np.asarray(x, dtype=float))
        return self.nu * (self.nu - 1) / (2 * c * c)

    def potential_derivs(self, x, order):
        # V0 = g (1 + t^2) with t = tan x, and d/dx P(t) = P'(t) (1 + t^2)
        x = np.asarray(x, dtype=float)
        t = np.tan(x)
        g = self.nu * (self.nu - 1) / 2
        poly = np.array([g, 0.0, g])
        out = np.empty((order + 1,) + x.shape)
        for j in range(order + 1):
            out[j] = P.polyval(t, poly)
            poly = P.polymul(P.polyder(poly), [1.0, 0.0, 1.0])
        return out

    def norm_constant(self, n: int) -> float:
        nu = self.nu
        logc = (gammaln(n + 1) + math.log(n + nu) + gammaln(nu) + gammaln(2 * nu)
                - 0.5 * math.log(math.pi) - gammaln(nu + 0.5) - gammaln(n + 2 * nu))
        return math.exp(0.5 * logc)

    def eigenfunction(self, n, x):
        self.check_domain(x)
        x = np.asarray(x, dtype=float)
        return self.norm_constant(n) * np.cos(x) ** self.nu * specfun.gegenbauer(n, self.nu, np.sin(x))

    def eigenfunction_pair(self, n, x):
        x = np.asarray(x, dtype=float)
        nu = self.nu
        s, c = np.sin(x), np.cos(x)
        C = specfun.gegenbauer(n, nu, s)
        dC = 2 * nu * specfun.gegenbauer(n - 1, nu + 1, s) if n > 0 else 0.0
        k = self.norm_constant(n)
        psi = k * c**nu * C
        dpsi = k * (-nu * c ** (nu - 1) * s * C + c ** (nu + 1) * dC)
        return psi, dpsi

    def numeric_domain(self):
        a, b = self.domain
        return (a + self.inset, b - self.inset)


def energy(model: SpectrumModel, n: int) -> float:
    if n < 0:
        raise DomainError("level index must be nonnegative")
    return model.energy(n)


def structure_f(model: SpectrumModel, n: int) -> float:
    """f(n) = E(n+1) - E(n)."""
    if n < 0:
        raise DomainError("level index must be nonnegative")
    return model.structure_f(n)


def linearization_b(model: SpectrumModel, n: int) -> float:
    """Deformation b(n) = sqrt((n+1) / (E(n+1) - E0)) turning the intrinsic ladder into the linear one."""
    return math.sqrt((n + 1) / (model.energy(n + 1) - model.E0))


@dataclass(frozen=True)
class LadderCoefficients:
    """Ladder coefficients r(n) of one algebra flavor.

    ``factorization_energies`` is only used by the natural flavor, whose
    coefficients carry the product over the transformation's energies.
    """

    flavor: str
    model: SpectrumModel
    alpha: float = 0.0
    factorization_energies: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise DomainError(f"unknown ladder flavor {self.flavor!r}")

    def r(self, n: int) -> complex:
        return ladder_r(self, n)

    def natural_factor(self, n: int) -> complex:
        """r_N(n) / r_I(n) = {prod_i [E(n) - eps_i][E(n-1) - eps_i]}^(1/2)."""
        E = self.model.energy
        prod = 1.0
        for eps in self.factorization_energies:
            prod *= (E(n) - eps) * (E(n - 1) - eps)
        return cmath.sqrt(prod) if prod < 0 else complex(math.sqrt(prod))


def ladder_r(coeffs: LadderCoefficients, n: int) -> complex:
    """Complex coefficient r(n) of a^- |n> = r(n) |n-1> for the given flavor."""
    if n < 1:
        raise DomainError("ladder coefficient r(n) defined for n >= 1")
    E = coeffs.model.energy
    phase = cmath.exp(1j * coeffs.alpha * (E(n) - E(n - 1)))
    if coeffs.flavor == LINEAR:
        return phase * math.sqrt(n)
    r_i = phase * math.sqrt(E(n) - coeffs.model.E0)
    if coeffs.flavor == INTRINSIC:
        return r_i
    return coeffs.natural_factor(n) * r_i


def eigenfunction(model: SpectrumModel, n: int, x):
    """Normalized eigenfunction psi_n(x); raises DomainError outside the open domain."""
    model.check_domain(x)
    return model.eigenfunction(n, x)


def parse_model(text: str) -> SpectrumModel:
    """Model from its CLI string: ``oscillator``, ``well`` or ``pt:<nu>``."""
    from .errors import ConfigError

    s = text.strip().lower()
    if s == "oscillator":
        return Oscillator()
    if s == "well":
        return InfiniteWell()
    if s.startswith("pt:"):
        try:
            nu = float(s[3:])
        except ValueError:
            raise ConfigError(f"bad Poschl-Teller parameter in {text!r}") from None
        try:
            return PoschlTeller(nu)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown model {text!r}; expected oscillator, well or pt:<nu>")


def energies(model: SpectrumModel, count: int) -> np.ndarray:
    return np.array([model.energy(n) for n in range(count)], dtype=float)


def natural_coefficients(model: SpectrumModel, eps: Sequence[float], alpha: float = 0.0) -> LadderCoefficients:
    return LadderCoefficients(NATURAL, model, alpha, tuple(float(e) for e in eps))
