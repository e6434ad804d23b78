"""Truncated Hubbard-form matrices of the number and ladder operators.

Matrices are dense D x D arrays in the energy eigenbasis: ``a_minus`` has a
single superdiagonal r(1), ..., r(D-1) and ``a_plus`` is its conjugate
transpose. Identity checks drop the last row and column, where truncation
corrupts any product that routes through the missing state |D>.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimMismatch, DomainError
from .systems import INTRINSIC, LINEAR, NATURAL, LadderCoefficients, SpectrumModel, ladder_r

PSI = "psi"
THETA = "theta"
BASES = (PSI, THETA)


@dataclass(frozen=True, eq=False)
class LadderRep:
    dim: int
    basis: str
    N: np.ndarray
    a_minus: np.ndarray
    a_plus: np.ndarray
    flavor: str
    coeffs: LadderCoefficients = field(repr=False)

    @property
    def model(self) -> SpectrumModel:
        return self.coeffs.model

    @property
    def alpha(self) -> float:
        return self.coeffs.alpha


@dataclass(frozen=True)
class AlgebraReport:
    flavor: str
    model: str
    max_defect: float
    identities_checked: list[str]
    defects: dict[str, float] = field(default_factory=dict)
    tol: float = 1e-10

    @property
    def passed(self) -> bool:
        return self.max_defect < self.tol

    def as_dict(self) -> dict:
        return {"flavor": self.flavor, "model": self.model, "max_defect": self.max_defect,
                "identities_checked": list(self.identities_checked), "defects": dict(self.defects),
                "passed": self.passed}


def build_rep(coeffs: LadderCoefficients, model: SpectrumModel | None = None, dim: int = 12,
              basis: str = PSI) -> LadderRep:
    """Dense truncated representation with a_minus[m, m+1] = r(m+1)."""
    if model is not None and model is not coeffs.model and model != coeffs.model:
        raise DomainError("model does not match the ladder coefficients")
    if dim < 3:
        raise DomainError(f"representation needs dim >= 3, got {dim}")
    if basis not in BASES:
        raise DomainError(f"unknown basis {basis!r}")
    am = np.zeros((dim, dim), dtype=complex)
    for m in range(dim - 1):
        am[m, m + 1] = ladder_r(coeffs, m + 1)
    N = np.diag(np.arange(dim, dtype=float))
    for mat in (am, N):
        mat.setflags(write=False)
    ap = am.conj().T.copy()
    ap.setflags(write=False)
    return LadderRep(dim, basis, N, am, ap, coeffs.flavor, coeffs)


def commutator(A, B) -> np.ndarray:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise DimMismatch(f"commutator needs equal square matrices, got {A.shape} and {B.shape}")
    return A @ B - B @ A


def _expected_number_products(coeffs: LadderCoefficients, dim: int):
    """Closed forms of diag(a+ a-) and diag([a-, a+]) for n = 0..dim-1."""
    model = coeffs.model
    E = model.energy
    n = np.arange(dim)

    def nat2(j):
        # |r_N(j)|^2, written from the energies rather than from ladder_r
        if j < 1:
            return 0.0
        prod = 1.0
        for eps in coeffs.factorization_energies:
            prod *= (E(j) - eps) * (E(j - 1) - eps)
        return abs(prod) * (E(j) - model.E0)

    if coeffs.flavor == LINEAR:
        return n.astype(float), np.ones(dim)
    if coeffs.flavor == INTRINSIC:
        prod = np.array([E(j) - model.E0 for j in n])
        return prod, np.array([E(j + 1) - E(j) for j in n])
    prod = np.array([nat2(j) for j in n])
    return prod, np.array([nat2(j + 1) - nat2(j) for j in n])


def verify_algebra(rep: LadderRep, tol: float = 1e-10) -> AlgebraReport:
    """Check the ladder identities on the interior block and report the worst entry.

    Defects are relative to max(1, |expected|) entrywise, so the fast-growing
    natural coefficients are judged on the same footing as the others.
    """
    D = rep.dim
    inner = slice(0, D - 1)
    am, ap, N = rep.a_minus, rep.a_plus, rep.N
    prod, bracket = _expected_number_products(rep.coeffs, D)

    def defect(got, want):
        got = np.asarray(got)[inner, inner]
        want = np.asarray(want)[inner, inner]
        return float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))))

    g = np.diag(np.arange(D, dtype=float) ** 2)
    g_down = np.diag((np.arange(D, dtype=float) - 1) ** 2)
    g_up = np.diag((np.arange(D, dtype=float) + 1) ** 2)
    defects = {
        "[N,a+]=+a+": defect(commutator(N, ap), ap),
        "[N,a-]=-a-": defect(commutator(N, am), -am),
        "a+a-=product": defect(ap @ am, np.diag(prod)),
        "[a-,a+]=bracket": defect(commutator(am, ap), np.diag(bracket)),
        "a+g(N)=g(N-1)a+": defect(ap @ g, g_down @ ap),
        "a-g(N)=g(N+1)a-": defect(am @ g, g_up @ am),
    }
    return AlgebraReport(rep.flavor, rep.model.cli_name(), max(defects.values()),
                         list(defects), defects, tol)


def bracket_diagonal(rep: LadderRep) -> np.ndarray:
    """Interior diagonal of [a-, a+]."""
    return np.real(np.diag(commutator(rep.a_minus, rep.a_plus)))[: rep.dim - 1]

