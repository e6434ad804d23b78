"""Higher-order SUSY (Darboux-Crum) transformations.

Seeds only supply (u, u'). Every higher derivative needed by a Wronskian is
generated from the seed's own differential equation

    u'' = 2 (V0 - eps) u - 2 kappa u_partner,

where ``kappa`` is zero for eigen-seeds and the chain coefficient for
generalized (Jordan-chain) seeds with (H0 - eps) u = kappa u_partner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import comb, gamma, rgamma

from . import specfun
from .errors import DeletedLevel, DomainError, NotNormalizable, SingularWronskian
from .numerics import Grid, integrate_grid
from .systems import InfiniteWell, Oscillator, PoschlTeller, SpectrumModel

NONPHYSICAL = "nonphysical"
PHYSICAL = "physical"
GENERALIZED = "generalized"

LEVEL_MATCH_TOL = 1e-9
SCREEN_POINTS = 2001
NORM_POINTS = 4001
# a kernel state of B_k counts as bound when its edge values are this small vs. its peak
EDGE_DECAY = 1e-2


@dataclass(frozen=True, eq=False)
class SeedSolution:
    """Transformation function u with H0 u = eps u (or a Jordan-chain partner of one)."""

    epsilon: float
    kind: str
    evaluate: Callable
    mu: float = 0.0
    w0: float = 0.0
    level: int | None = None
    partner: "SeedSolution | None" = None
    chain_coeff: float = 0.0
    label: str = ""

    def __call__(self, x):
        return self.evaluate(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class WronskianValue:
    W: np.ndarray | float
    dW: np.ndarray | float
    d2W: np.ndarray | float


@dataclass(frozen=True)
class Bookkeeping:
    k: int
    s: int
    q: int
    p: int
    deleted_ladder: tuple[int, ...]
    new_levels: tuple[float, ...]
    model: SpectrumModel = field(repr=False)

    @property
    def m_p(self) -> int:
        """Largest deleted-ladder index, or -1 when nothing is deleted."""
        return max(self.deleted_ladder) if self.deleted_ladder else -1

    def levels(self, count: int) -> list[float]:
        """Lowest ``count`` eigenvalues of the partner Hamiltonian."""
        iso = [self.model.energy(n) for n in range(count)]
        return sorted(list(self.new_levels) + iso)[:count]


# --- seed solutions ---------------------------------------------------------

def seed_oscillator(epsilon: float, mu: float, x):
    """General oscillator solution at energy eps and its derivative."""
    x = np.asarray(x, dtype=float)
    a = 0.25 - epsilon / 2
    y = x * x
    g = gamma(a + 0.5) * rgamma(a)
    F1 = specfun.hyp1f1(a, 0.5, y)
    dF1 = 2 * a * specfun.hyp1f1(a + 1, 1.5, y)
    F2 = specfun.hyp1f1(a + 0.5, 1.5, y)
    dF2 = (a + 0.5) / 1.5 * specfun.hyp1f1(a + 1.5, 2.5, y)
    gauss = np.exp(-0.5 * y)
    bracket = F1 + 2 * mu * g * x * F2
    dbracket = 2 * x * dF1 + 2 * mu * g * (F2 + 2 * y * dF2)
    return gauss * bracket, gauss * (dbracket - x * bracket)


def seed_pt(nu: float, epsilon: float, mu: float, x):
    """General Poschl-Teller solution at energy eps > 0 and its derivative."""
    if epsilon <= 0:
        raise DomainError("Poschl-Teller seeds are implemented for eps > 0")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= math.pi / 2):
        raise DomainError("Poschl-Teller seed needs |x| < pi/2")
    kap = math.sqrt(epsilon / 2)
    a1, b1, c1 = nu / 2 - kap, nu / 2 + kap, 0.5
    a2, b2, c2 = nu / 2 + kap + 0.5, nu / 2 - kap + 0.5, 1.5
    s, c = np.sin(x), np.cos(x)
    y = s * s
    F1 = specfun.hyp2f1(a1, b1, c1, y)
    dF1 = a1 * b1 / c1 * specfun.hyp2f1(a1 + 1, b1 + 1, c1 + 1, y)
    F2 = specfun.hyp2f1(a2, b2, c2, y)
    dF2 = a2 * b2 / c2 * specfun.hyp2f1(a2 + 1, b2 + 1, c2 + 1, y)
    cnu = c**nu
    bracket = F1 + mu * s * F2
    dbracket = 2 * s * c * dF1 + mu * (c * F2 + 2 * y * c * dF2)
    u = cnu * bracket
    du = -nu * c ** (nu - 1) * s * bracket + cnu * dbracket
    return u, du


def seed_well_confluent(m1: int, w0: float, x):
    """Infinite-well Jordan pair: u1 = psi_{m1} and its generalized partner u2."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x >= math.pi):
        raise DomainError("infinite-well seeds need 0 < x < pi")
    k = m1 + 1
    sn, cs = np.sin(k * x), np.cos(k * x)
    amp = math.sqrt(2 / math.pi)
    u1, du1 = amp * sn, amp * k * cs
    pref = -1.0 / (math.sqrt(2 * math.pi) * k)
    shift = math.pi * w0 + x
    u2 = pref * shift * cs
    du2 = pref * (cs - k * shift * sn)
    return (u1, du1), (u2, du2)


def seed_oscillator_confluent_u3(w0: float, x):
    """Generalized oscillator eigenfunction paired with the ground state."""
    x = np.asarray(x, dtype=float)
    y = x * x
    F = specfun.hyp_pfq_array([1, 1], [1.5, 2], y)
    dF = specfun.hyp_pfq_array([2, 2], [2.5, 3], y) / 3
    g = math.pi * w0 * specfun.erfi(x) + y * F
    dg = 2 * math.sqrt(math.pi) * w0 * np.exp(y) + 2 * x * F + 2 * x * y * dF
    pref = np.exp(-0.5 * y) / (2 * math.pi**0.25)
    return pref * g, pref * (dg - x * g)


def _match_level(model: SpectrumModel, eps: float, n_max: int = 10_000) -> int | None:
    """Index m with |E(m) - eps| < LEVEL_MATCH_TOL, if any."""
    if eps < model.E0 - LEVEL_MATCH_TOL:
        return None
    for m in range(n_max):
        e = model.energy(m)
        if abs(e - eps) < LEVEL_MATCH_TOL:
            return m
        if e > eps:
            return None
    return None


def _kind_for(model, eps):
    m = _match_level(model, eps)
    return (PHYSICAL, m) if m is not None else (NONPHYSICAL, None)


def oscillator_seed(epsilon: float, mu: float = 0.0, model: Oscillator | None = None) -> SeedSolution:
    kind, m = _kind_for(model or Oscillator(), epsilon)
    return SeedSolution(epsilon, kind, lambda x: seed_oscillator(epsilon, mu, x), mu=mu, level=m,
                        label=f"seed:eps={epsilon:g},mu={mu:g}")


def pt_seed(model: PoschlTeller, epsilon: float, mu: float = 0.0) -> SeedSolution:
    kind, m = _kind_for(model, epsilon)
    return SeedSolution(epsilon, kind, lambda x: seed_pt(model.nu, epsilon, mu, x), mu=mu, level=m,
                        label=f"seed:eps={epsilon:g},mu={mu:g}")


def physical_seed(model: SpectrumModel, m: int) -> SeedSolution:
    return SeedSolution(model.energy(m), PHYSICAL, lambda x: model.eigenfunction_pair(m, x), level=m,
                        label=f"level:n={m}")


def well_confluent_seeds(model: InfiniteWell, m1: int, w0: float) -> list[SeedSolution]:
    """Jordan pair at E(m1); the closed-form partner obeys (H0 - eps) u2 = -u1/2."""
    u1 = physical_seed(model, m1)
    u2 = SeedSolution(model.energy(m1), GENERALIZED,
                      lambda x: seed_well_confluent(m1, w0, x)[1],
                      w0=w0, level=m1, partner=u1, chain_coeff=-0.5,
                      label=f"confluent:level={m1},w0={w0:g}")
    return [u1, u2]


def oscillator_confluent_seeds(model: Oscillator, w0: float) -> list[SeedSolution]:
    """Jordan pair at E0 = 1/2; the closed-form partner obeys (H0 - 1/2) u3 = -psi0/2."""
    u2 = physical_seed(model, 0)
    u3 = SeedSolution(model.E0, GENERALIZED, lambda x: seed_oscillator_confluent_u3(w0, x),
                      w0=w0, level=0, partner=u2, chain_coeff=-0.5,
                      label=f"confluent:level=0,w0={w0:g}")
    return [u2, u3]


# --- derivative tables and Wronskians ---------------------------------------

def derivative_table(seed: SeedSolution, model: SpectrumModel, x, order: int) -> np.ndarray:
    """Rows u, u', ..., u^(order) of a seed, higher rows from its ODE."""
    x = np.asarray(x, dtype=float)
    u, du = seed(x)
    table = np.empty((order + 1,) + x.shape)
    table[0] = u
    if order >= 1:
        table[1] = du
    if order < 2:
        return table
    vd = model.potential_derivs(x, order - 2)
    vd[0] = vd[0] - seed.epsilon
    ptab = None
    if seed.partner is not None and seed.chain_coeff != 0:
        ptab = derivative_table(seed.partner, model, x, order - 2)
    for j in range(order - 1):
        acc = np.zeros(x.shape)
        for i in range(j + 1):
            acc += comb(j, i, exact=True) * vd[i] * table[j - i]
        acc *= 2
        if ptab is not None:
            acc -= 2 * seed.chain_coeff * ptab[j]
        table[j + 2] = acc
    return table


def _det(tables: Sequence[np.ndarray], orders: Sequence[int]) -> np.ndarray:
    rows = [np.stack([t[o] for t in tables], axis=-1) for o in orders]
    return np.linalg.det(np.stack(rows, axis=-2))


def wronskian_from_tables(tables: Sequence[np.ndarray], with_derivs: bool = True):
    k = len(tables)
    if k == 0:
        one = np.ones(tables[0].shape[1:]) if tables else 1.0
        return WronskianValue(one, 0 * one, 0 * one)
    base = list(range(k))
    W = _det(tables, base)
    if not with_derivs:
        return WronskianValue(W, None, None)
    dW = _det(tables, base[:-1] + [k])
    d2W = _det(tables, base[:-1] + [k + 1])
    if k >= 2:
        d2W = d2W + _det(tables, base[:-2] + [k - 1, k])
    return WronskianValue(W, dW, d2W)


class SusyTransform:
    """k-th order SUSY partner of ``model`` generated by an ordered list of seeds.

    The transform is validated at construction: the Wronskian is screened for
    zeros on the open domain and the kernel states of the intertwiner are
    normalized once.
    """

    def __init__(self, model: SpectrumModel, seeds: Sequence[SeedSolution] = (),
                 screen: bool = True, label: str = ""):
        self.model = model
        self.seeds = tuple(seeds)
        self.k = len(self.seeds)
        self.label = label
        for s in self.seeds:
            if s.partner is not None and not any(s.partner is t for t in self.seeds):
                raise DomainError("generalized seed's partner is not part of the transform")
        self.bookkeeping = self._bookkeeping()
        self._sign_cache: dict[int, float] = {}
        if screen and self.k:
            self._screen()
        self._kernel = {}
        if self.k:
            self._kernel = self._kernel_states()

    # bookkeeping
    def _groups(self):
        """Distinct factorization energies with the seed that tops each Jordan chain."""
        groups: list[tuple[float, int]] = []
        for i, s in enumerate(self.seeds):
            if any(t.partner is s for t in self.seeds):
                continue
            groups.append((s.epsilon, i))
        return groups

    def _bookkeeping(self) -> Bookkeeping:
        deleted, new = [], []
        seen = []
        for eps, _ in self._groups():
            if any(abs(eps - e) < LEVEL_MATCH_TOL for e in seen):
                continue
            seen.append(eps)
            m = _match_level(self.model, eps)
            if m is None:
                new.append(eps)
            else:
                deleted.append(m)
        deleted.sort()
        return Bookkeeping(self.k, len(new) + len(deleted), len(new), len(deleted),
                           tuple(deleted), tuple(new), self.model)

    @property
    def s(self):
        return self.bookkeeping.s

    @property
    def q(self):
        return self.bookkeeping.q

    @property
    def p(self):
        return self.bookkeeping.p

    @property
    def deleted_ladder(self):
        return self.bookkeeping.deleted_ladder

    @property
    def new_levels(self):
        return self.bookkeeping.new_levels

    @property
    def m_p(self):
        return self.bookkeeping.m_p

    @property
    def factorization_energies(self) -> tuple[float, ...]:
        return tuple(s.epsilon for s in self.seeds)

    # evaluation
    def tables(self, x, order: int):
        return [derivative_table(s, self.model, x, order) for s in self.seeds]

    def wronskian(self, x) -> WronskianValue:
        x = np.asarray(x, dtype=float)
        self.model.check_domain(x)
        wv = wronskian_from_tables(self.tables(x, self.k + 1))
        W = np.asarray(wv.W)
        if np.any(~np.isfinite(W)) or np.any(W == 0):
            bad = np.asarray(x)[~np.isfinite(W) | (W == 0)] if np.ndim(x) else x
            raise SingularWronskian("Wronskian vanishes or overflows", x=bad)
        return wv

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        v0 = self.model.potential(x)
        if self.k == 0:
            return v0
        wv = self.wronskian(x)
        r1 = wv.dW / wv.W
        return v0 - (wv.d2W / wv.W - r1 * r1)

    def _crum(self, extra: SeedSolution, x):
        tabs = self.tables(x, self.k)
        tabs.append(derivative_table(extra, self.model, x, self.k))
        num = _det(tabs, range(self.k + 1))
        den = _det(tabs[:-1], range(self.k)) if self.k else 1.0
        return num / den

    def _raw_theta(self, n: int, x):
        E = self.model.energy(n)
        prod = 1.0
        for s in self.seeds:
            prod *= E - s.epsilon
        return self._crum(physical_seed(self.model, n), x) / math.sqrt(abs(prod) * 2**self.k)

    def _sign(self, n: int) -> float:
        if n not in self._sign_cache:
            g = Grid.for_model(self.model, SCREEN_POINTS)
            vals = self._raw_theta(n, g.interior())
            big = np.flatnonzero(np.abs(vals) > 1e-6 * np.abs(vals).max())
            self._sign_cache[n] = 1.0 if vals[big[0]] > 0 else -1.0
        return self._sign_cache[n]

    def eigenstate(self, n: int, x):
        """theta_n for an undeleted level n."""
        if n < 0:
            raise DomainError("level index must be nonnegative")
        if n in self.deleted_ladder:
            raise DeletedLevel(f"level {n} is annihilated by the intertwiner")
        x = np.asarray(x, dtype=float)
        if self.k == 0:
            return self.model.eigenfunction(n, x)
        self.model.check_domain(x)
        return self._sign(n) * self._raw_theta(n, x)

    def _omit(self, idx: int, x):
        tabs = self.tables(x, self.k)
        keep = [t for j, t in enumerate(tabs) if j != idx]
        num = _det(keep, range(self.k - 1)) if keep else np.ones(np.shape(x))
        return num / _det(tabs, range(self.k))

    def _kernel_states(self):
        g = Grid.for_model(self.model, NORM_POINTS)
        out = {}
        for eps, idx in self._groups():
            if eps in out:
                continue
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = g.sample(lambda xx: self._omit(idx, xx))
            dens = vals * vals
            peak = np.abs(vals).max()
            ends = max(abs(vals[1]), abs(vals[-2]))
            norm2 = integrate_grid(dens, g)
            ok = np.isfinite(norm2) and norm2 > 0 and ends <= EDGE_DECAY * peak
            big = np.flatnonzero(np.abs(vals) > 1e-6 * peak) if np.isfinite(peak) else []
            sign = 1.0 if len(big) and vals[big[0]] > 0 else -1.0
            out[eps] = (idx, sign / math.sqrt(norm2) if ok else None)
        return out

    def _kernel_state(self, eps, x):
        idx, scale = self._kernel[eps]
        if scale is None:
            raise NotNormalizable(f"kernel state at eps={eps:g} is not square integrable")
        x = np.asarray(x, dtype=float)
        self.model.check_domain(x)
        return scale * self._omit(idx, x)

    def new_level_state(self, i: int, x):
        """Normalized eigenstate at the i-th created level (1-based)."""
        if not 1 <= i <= self.q:
            raise DomainError(f"created level index must be in 1..{self.q}")
        return self._kernel_state(self.new_levels[i - 1], x)

    def deleted_level_state(self, m: int, x):
        """theta_{m_j}: the eigenstate of H_k at eps = E(m_j) annihilated by B_k."""
        if m not in self.deleted_ladder:
            raise DomainError(f"{m} is not a deleted-ladder index")
        eps = self.model.energy(m)
        key = next(e for e in self._kernel if abs(e - eps) < LEVEL_MATCH_TOL)
        return self._kernel_state(key, x)

    def theta(self, n: int, x):
        """Basis state |theta_n>, with theta_{m_j} taken as the matching kernel state."""
        if n in self.deleted_ladder:
            return self.deleted_level_state(n, x)
        return self.eigenstate(n, x)

    def _screen(self):
        g = Grid.for_model(self.model, SCREEN_POINTS)
        x = g.interior()
        W = np.asarray(wronskian_from_tables(self.tables(x, self.k), with_derivs=False).W)
        bad = ~np.isfinite(W) | (W == 0)
        if bad.any():
            raise SingularWronskian("Wronskian not finite/nonzero on the domain", x=float(x[bad][0]))
        flips = np.flatnonzero(np.sign(W[1:]) != np.sign(W[:-1]))
        if len(flips):
            raise SingularWronskian("Wronskian changes sign inside the domain", x=float(x[flips[0]]))

    def __repr__(self):
        return f"SusyTransform({self.model!r}, k={self.k}, label={self.label!r})"


# --- module-level operations ------------------------------------------------

def wronskian(transform: SusyTransform, x) -> WronskianValue:
    return transform.wronskian(x)


def partner_potential(transform: SusyTransform, x):
    """V_k = V0 - (ln W)''."""
    return transform.potential(x)


def partner_eigenstate(transform: SusyTransform, n: int, x):
    """theta_n = W(u_1..u_k, psi_n) / W(u_1..u_k) / sqrt(2^k prod(E_n - eps_i))."""
    return transform.eigenstate(n, x)


def new_level_eigenstate(transform: SusyTransform, i: int, x):
    return transform.new_level_state(i, x)


def spectrum_bookkeeping(transform: SusyTransform) -> Bookkeeping:
    return transform.bookkeeping


def backlund_potential(model: SpectrumModel, seed1: SeedSolution, seed2: SeedSolution, x):
    """Second-order partner potential from the Riccati/Backlund recursion.

    Independent of the Wronskian route: alpha_1 = u'/u solves the Riccati
    equation, and alpha_2 follows from the finite-difference recursion in the
    factorization energy.
    """
    e1, e2 = seed1.epsilon, seed2.epsilon
    if abs(e1 - e2) < LEVEL_MATCH_TOL:
        raise DomainError("Backlund recursion needs distinct factorization energies")
    x = np.asarray(x, dtype=float)
    v0 = model.potential(x)
    u1, du1 = seed1(x)
    u2, du2 = seed2(x)
    a1, a2 = du1 / u1, du2 / u2
    d1 = 2 * (v0 - e1) - a1 * a1
    d2 = 2 * (v0 - e2) - a2 * a2
    gap = a2 - a1
    dalpha2 = -d1 + 2 * (e2 - e1) * (d2 - d1) / (gap * gap)
    return v0 - d1 - dalpha2
