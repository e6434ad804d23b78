"""Coherent states of H0 and of its SUSY partners.

A state is stored as a coefficient vector over the energy eigenbasis starting
at ``basis_offset``: c_m multiplies |psi_m> (H0 flavors) or |theta_{m+offset}>
(partner flavors). The intrinsic and linear partner flavors share the H0
construction verbatim; only the basis they are attached to changes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from . import specfun
from .algebra import PSI, THETA, LadderRep, build_rep
from .errors import DimMismatch, DomainError, NonConvergence
from .numerics import quad_adaptive
from .susy import SusyTransform
from .systems import (INTRINSIC, LINEAR, NATURAL, InfiniteWell, LadderCoefficients, Oscillator,
                      PoschlTeller, SpectrumModel)

DEFAULT_TAIL = 1e-14
MAX_TERMS = 5000
RANK_TOL = 1e-9


class CSFlavor(str, Enum):
    INTRINSIC_H0 = "intrinsic-h0"
    LINEAR_H0 = "linear-h0"
    INTRINSIC_HK = "intrinsic-hk"
    LINEAR_HK = "linear-hk"
    NATURAL_HK = "natural-hk"

    @property
    def ladder(self) -> str:
        return {"intrinsic": INTRINSIC, "linear": LINEAR, "natural": NATURAL}[self.value.split("-")[0]]

    @property
    def on_partner(self) -> bool:
        return self.value.endswith("-hk")

    @classmethod
    def resolve(cls, ladder: str, partner: bool) -> "CSFlavor":
        try:
            return cls(f"{ladder}-{'hk' if partner else 'h0'}")
        except ValueError:
            raise DomainError(f"no coherent-state flavor {ladder!r} for {'H_k' if partner else 'H0'}") from None


@dataclass(frozen=True)
class MomentSequence:
    rho: Callable[[int], float]
    closed_form_density: Callable | None = None
    label: str = ""


@dataclass(frozen=True, eq=False)
class CoherentState:
    flavor: CSFlavor
    z: complex
    alpha: float
    coeffs: np.ndarray
    basis_offset: int
    norm_defect: float
    norm_constant: float
    tail_bound: float
    system: object = field(repr=False)

    @property
    def M(self) -> int:
        return len(self.coeffs)

    @property
    def model(self) -> SpectrumModel:
        return self.system.model if isinstance(self.system, SusyTransform) else self.system

    def basis_vector(self, dim: int) -> np.ndarray:
        """Coefficients placed on basis indices 0..dim-1 (psi_n or theta_n)."""
        if dim < self.basis_offset + self.M:
            raise DimMismatch(f"dim {dim} too small for {self.basis_offset + self.M} coefficients")
        v = np.zeros(dim, dtype=complex)
        v[self.basis_offset:self.basis_offset + self.M] = self.coeffs
        return v

    def full_vector(self, dim: int) -> np.ndarray:
        """Like basis_vector, preceded by one zero slot per created level of H_k."""
        q = self.system.q if isinstance(self.system, SusyTransform) else 0
        return np.concatenate([np.zeros(q, dtype=complex), self.basis_vector(dim)])


# --- moment sequences -------------------------------------------------------

def rho_m(model: SpectrumModel, m: int) -> float:
    """prod_{j=1}^m [E(j) - E0], with rho_0 = 1."""
    if m < 0:
        raise DomainError("moment index must be nonnegative")
    out = 1.0
    for j in range(1, m + 1):
        out *= model.energy(j) - model.E0
    return out


def rho_m_closed(model: SpectrumModel, m: int) -> float:
    if isinstance(model, Oscillator):
        return math.factorial(m)
    if isinstance(model, InfiniteWell):
        return math.factorial(m) * math.factorial(m + 2) / 2 ** (m + 1)
    if isinstance(model, PoschlTeller):
        return math.factorial(m) * specfun.pochhammer(2 * model.nu + 1, m) / 2**m
    raise DomainError(f"no closed-form rho_m for {model!r}")


def _natural_r2(model: SpectrumModel, eps, n: int) -> float:
    """|r_N(n)|^2 = [E(n) - E0] |prod_i (E(n) - eps_i)(E(n-1) - eps_i)|."""
    prod = 1.0
    for e in eps:
        prod *= (model.energy(n) - e) * (model.energy(n - 1) - e)
    return (model.energy(n) - model.E0) * abs(prod)


def rho_tilde_m(transform: SusyTransform, m: int) -> float:
    """Natural-CS moments prod_{j=1}^m |r_N(m_p + 1 + j)|^2, with rho~_0 = 1."""
    if m < 0:
        raise DomainError("moment index must be nonnegative")
    eps = transform.factorization_energies
    out = 1.0
    for j in range(1, m + 1):
        out *= _natural_r2(transform.model, eps, transform.m_p + 1 + j)
    return out


def rho_tilde_m_closed(transform: SusyTransform, m: int) -> float:
    """System-specific Pochhammer forms of rho~_m."""
    model, mp, k = transform.model, transform.m_p, transform.k
    eps = transform.factorization_energies
    poch = specfun.pochhammer
    if isinstance(model, Oscillator):
        out = poch(mp + 2, m)
        for e in eps:
            out *= poch(mp - e + 1.5, m) * poch(mp - e + 2.5, m)
        return out
    if isinstance(model, InfiniteWell):
        out = complex(poch(mp + 2, m) * poch(mp + 4, m)) / 2 ** (m * (2 * k + 1))
        for e in eps:
            w = cmath.sqrt(2 * e)
            out *= poch(mp - w + 2, m) * poch(mp - w + 3, m) * poch(mp + w + 2, m) * poch(mp + w + 3, m)
        return out.real
    if isinstance(model, PoschlTeller):
        nu = model.nu
        out = complex(poch(mp + 2, m) * poch(mp + 2 * nu + 2, m)) / 2 ** (m * (2 * k + 1))
        for e in eps:
            w = cmath.sqrt(2 * e)
            b = nu + mp + 1
            out *= poch(b - w, m) * poch(b - w + 1, m) * poch(b + w, m) * poch(b + w + 1, m)
        return out.real
    raise DomainError(f"no closed-form rho~_m for {model!r}")


def moment_density(model: SpectrumModel) -> Callable | None:
    """Density rho(y) whose moments are rho_m, where a closed form is known."""
    if isinstance(model, Oscillator):
        return lambda y: math.exp(-y)
    if isinstance(model, InfiniteWell):
        return lambda y: 4 * y * specfun.bessel_k(2, 2 * math.sqrt(2 * y))
    if isinstance(model, PoschlTeller):
        nu = model.nu
        logc = (nu + 2) * math.log(2) - gammaln(2 * nu + 1)
        return lambda y: math.exp(logc + nu * math.log(y)) * specfun.bessel_k(2 * nu, 2 * math.sqrt(2 * y))
    return None


def moment_sequence(model: SpectrumModel) -> MomentSequence:
    return MomentSequence(lambda m: rho_m(model, m), moment_density(model), model.cli_name())


def moment_check(seq: MomentSequence, m_max: int, quad_tol: float = 1e-10) -> list[float]:
    """Relative defects |int_0^inf y^m rho(y) dy - rho_m| / rho_m for m = 0..m_max."""
    if seq.closed_form_density is None:
        raise DomainError(f"no density available for {seq.label!r}")
    dens = seq.closed_form_density
    out = []
    for m in range(m_max + 1):
        # K_nu overflows at y = 0 although the density has a finite limit there
        val = quad_adaptive(lambda y: y**m * dens(y) if y > 0 else 0.0, 0.0, math.inf, tol=quad_tol)
        want = seq.rho(m)
        out.append(abs(val - want) / want)
    return out


# --- construction -----------------------------------------------------------

def _ladder_for(flavor: CSFlavor, system) -> tuple[LadderCoefficients, int]:
    if flavor.on_partner and not isinstance(system, SusyTransform):
        raise DomainError(f"{flavor.value} needs a SUSY transform")
    if not flavor.on_partner and isinstance(system, SusyTransform):
        raise DomainError(f"{flavor.value} is built on the initial model, not a transform")
    model = system.model if isinstance(system, SusyTransform) else system
    if flavor.ladder == NATURAL:
        return LadderCoefficients(NATURAL, model, 0.0, system.factorization_energies), system.m_p + 1
    return LadderCoefficients(flavor.ladder, model), 0


def _series_coefficients(coeffs: LadderCoefficients, offset: int, z: complex, alpha: float,
                         tail_tol: float):
    """Unnormalized z^m / prod r(offset+j) with phases e^{-i alpha (E_{m+off} - E_off)}.

    Returns (terms, weights |term|^2, tail bound relative to the summed weights).
    """
    model = coeffs.model
    E = model.energy
    z = complex(z)
    az2 = abs(z) ** 2
    terms = [complex(1.0)]
    total = 1.0
    tail = 0.0
    if az2 == 0:
        return np.array(terms), total, tail
    # magnitudes come from the alpha-free ladder; the alpha phases are applied
    # from the energies at the end
    bare = LadderCoefficients(coeffs.flavor, model, 0.0, coeffs.factorization_energies)
    t = complex(1.0)
    for m in range(1, MAX_TERMS + 1):
        t = t * z / bare.r(offset + m)
        terms.append(t)
        w = abs(t) ** 2
        total += w
        ratio_next = az2 / abs(bare.r(offset + m + 1)) ** 2
        if ratio_next < 1:
            tail = w * ratio_next / (1 - ratio_next) / total
            if tail < tail_tol:
                break
    else:
        raise NonConvergence(f"coherent-state series needs more than {MAX_TERMS} terms")
    phases = np.array([cmath.exp(-1j * alpha * (E(offset + m) - E(offset))) for m in range(len(terms))])
    return np.array(terms) * phases, total, tail


def build_cs(flavor, system, z: complex, alpha: float = 0.0, tail_tol: float = DEFAULT_TAIL) -> CoherentState:
    """Coherent state of the given flavor; the truncation is chosen from |z|."""
    flavor = CSFlavor(flavor)
    coeffs, offset = _ladder_for(flavor, system)
    raw, total, tail = _series_coefficients(coeffs, offset, z, alpha, tail_tol)
    if flavor.ladder == LINEAR:
        nc = math.exp(-abs(complex(z)) ** 2 / 2)
    else:
        nc = 1 / math.sqrt(total)
    c = nc * raw
    c.setflags(write=False)
    defect = 1.0 - float(np.sum(np.abs(c) ** 2))
    return CoherentState(flavor, complex(z), float(alpha), c, offset, defect, nc, tail, system)


def _rep_for(cs: CoherentState, dim: int) -> LadderRep:
    coeffs, _ = _ladder_for(cs.flavor, cs.system)
    coeffs = LadderCoefficients(coeffs.flavor, coeffs.model, cs.alpha, coeffs.factorization_energies)
    return build_rep(coeffs, coeffs.model, dim, THETA if cs.flavor.on_partner else PSI)


def rep_for(cs: CoherentState, dim: int | None = None) -> LadderRep:
    """Ladder representation matching a state's flavor, phase and basis."""
    return _rep_for(cs, dim or max(3, cs.basis_offset + cs.M + 1))


def annihilation_check(cs: CoherentState, rep: LadderRep | None = None) -> float:
    """max |(a- c - z c)_j| over rows whose result involves only kept coefficients."""
    if rep is None:
        rep = rep_for(cs)
    if rep.flavor != cs.flavor.ladder or rep.basis != (THETA if cs.flavor.on_partner else PSI):
        raise DomainError("representation flavor or basis does not match the coherent state")
    if abs(rep.alpha - cs.alpha) > 0:
        raise DomainError("representation and coherent state use different alpha")
    last = cs.basis_offset + cs.M
    if rep.dim < last + 1:
        raise DimMismatch(f"rep dim {rep.dim} < truncation + 1 = {last + 1}")
    v = cs.basis_vector(rep.dim)
    resid = rep.a_minus @ v - cs.z * v
    return float(np.max(np.abs(resid[: last - 1]))) if last > 1 else 0.0


def recurrence_defect(cs: CoherentState) -> float:
    """max_m |r(m) c_m - z c_{m-1}| along the stored coefficients."""
    coeffs, off = _ladder_for(cs.flavor, cs.system)
    coeffs = LadderCoefficients(coeffs.flavor, coeffs.model, cs.alpha, coeffs.factorization_energies)
    c = cs.coeffs
    worst = 0.0
    for m in range(1, len(c)):
        worst = max(worst, abs(coeffs.r(off + m) * c[m] - cs.z * c[m - 1]))
    return worst


def reproducing_kernel(flavor, system, z: complex, zprime: complex, method: str = "series") -> complex:
    """Normalized overlap <z, alpha | z', alpha>.

    ``method="series"`` sums (conj(z) z')^m / rho_m directly; ``"closed"`` uses the
    exponential (linear flavors, oscillator) or 0F1 (well, Poschl-Teller) forms.
    """
    flavor = CSFlavor(flavor)
    z, zp = complex(z), complex(zprime)
    if method == "closed":
        return _kernel_closed(flavor, system, z, zp)
    if method != "series":
        raise DomainError(f"unknown kernel method {method!r}")
    if flavor.ladder == LINEAR:
        def S(x):
            return _plain_series(lambda m: math.factorial(m) if m < 170 else math.inf, x)
    elif flavor.ladder == INTRINSIC:
        model = system.model if isinstance(system, SusyTransform) else system
        def S(x):
            return _plain_series(lambda m: rho_m(model, m), x)
    else:
        def S(x):
            return _plain_series(lambda m: rho_tilde_m(system, m), x)
    return S(z.conjugate() * zp) / math.sqrt(S(abs(z) ** 2).real * S(abs(zp) ** 2).real)


def _plain_series(rho, x: complex) -> complex:
    out = complex(0.0)
    for m in range(MAX_TERMS):
        r = rho(m)
        if not math.isfinite(r):
            return out
        t = x**m / r
        out += t
        if m > 2 and abs(t) <= 1e-17 * abs(out):
            return out
    raise NonConvergence("kernel series did not converge")


def _kernel_closed(flavor: CSFlavor, system, z: complex, zp: complex) -> complex:
    model = system.model if isinstance(system, SusyTransform) else system
    if flavor.ladder == LINEAR or (flavor.ladder == INTRINSIC and isinstance(model, Oscillator)):
        return cmath.exp(-abs(z) ** 2 / 2 + z.conjugate() * zp - abs(zp) ** 2 / 2)
    if flavor.ladder == INTRINSIC and isinstance(model, (InfiniteWell, PoschlTeller)):
        b = 3.0 if isinstance(model, InfiniteWell) else 2 * model.nu + 1

        def F(x):
            return specfun.hyp_pfq([], [b], 2 * x).value
        return F(z.conjugate() * zp) / math.sqrt(F(abs(z) ** 2).real * F(abs(zp) ** 2).real)
    raise DomainError(f"no closed-form kernel for {flavor.value} on {model!r}")


def evolution_check(flavor, system, z: complex, alpha: float, t: float) -> float:
    """max_m |e^{-i t E_n} c_m(alpha) - e^{-i t E_ref} c_m(alpha + t)|, n = m + offset."""
    a = build_cs(flavor, system, z, alpha)
    b = build_cs(flavor, system, z, alpha + t)
    E = a.model.energy
    e_ref = E(a.basis_offset)
    evolved = np.array([cmath.exp(-1j * t * E(m + a.basis_offset)) for m in range(a.M)]) * a.coeffs
    if b.M != a.M:
        raise DimMismatch("truncation changed with alpha")
    return float(np.max(np.abs(evolved - cmath.exp(-1j * t * e_ref) * b.coeffs)))


def annihilator_matrix(flavor, system, dim: int, alpha: float = 0.0) -> np.ndarray:
    """a- on the full space: created-level slots (killed) followed by the basis block."""
    flavor = CSFlavor(flavor)
    coeffs, _ = _ladder_for(flavor, system)
    coeffs = LadderCoefficients(coeffs.flavor, coeffs.model, alpha, coeffs.factorization_energies)
    am = np.asarray(build_rep(coeffs, coeffs.model, dim).a_minus)
    q = system.q if isinstance(system, SusyTransform) else 0
    full = np.zeros((q + dim, q + dim), dtype=complex)
    full[q:, q:] = am
    return full


def zero_eigenvalue_degeneracy(flavor, system, dim: int = 12) -> int:
    """Dimension of ker a- (created-level slots plus zero columns of the basis block)."""
    A = annihilator_matrix(flavor, system, dim)
    sv = np.linalg.svd(A, compute_uv=False)
    # kernel of an upper-bidiagonal-shaped truncation: count vanishing singular values
    return int(np.sum(sv <= RANK_TOL * max(sv.max(), 1.0)))


def cs_wavefunction(cs: CoherentState, x, basis: Callable | None = None):
    """Position representation sum_m c_m phi_{m+offset}(x)."""
    x = np.asarray(x, dtype=float)
    cs.model.check_domain(x)
    if basis is None:
        if isinstance(cs.system, SusyTransform):
            basis = cs.system.theta
        else:
            basis = cs.model.eigenfunction
    out = np.zeros(x.shape, dtype=complex)
    for m, c in enumerate(cs.coeffs):
        if c == 0:
            continue
        out += c * basis(m + cs.basis_offset, x)
    return out


def displacement_check(model: SpectrumModel, z: complex, alpha: float = 0.0, pad: int = 20) -> float:
    """max |exp(z a+ - conj(z) a-) e_0 - c| for the linear flavor on H0."""
    cs = build_cs(CSFlavor.LINEAR_H0, model, z, alpha)
    dim = cs.M + pad
    rep = build_rep(LadderCoefficients(LINEAR, model, alpha), model, dim)
    D = expm(complex(z) * rep.a_plus - complex(z).conjugate() * rep.a_minus)
    return float(np.max(np.abs(D[: cs.M, 0] - cs.coeffs)))


__all__ = [
    "CSFlavor", "CoherentState", "MomentSequence", "rho_m", "rho_m_closed", "rho_tilde_m",
    "rho_tilde_m_closed", "moment_density", "moment_sequence", "moment_check", "build_cs",
    "annihilation_check", "recurrence_defect", "reproducing_kernel", "evolution_check",
    "annihilator_matrix", "zero_eigenvalue_degeneracy", "cs_wavefunction", "displacement_check",
    "rep_for",
]
