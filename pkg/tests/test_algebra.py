import math

import numpy as np
import pytest

from susyqm.algebra import THETA, bracket_diagonal, build_rep, commutator, verify_algebra
from susyqm.errors import DimMismatch, DomainError
from susyqm.systems import INTRINSIC, LINEAR, NATURAL, InfiniteWell, LadderCoefficients, Oscillator, PoschlTeller

MODELS = [Oscillator(), InfiniteWell(), PoschlTeller(3.0)]


def test_oscillator_intrinsic_superdiagonal(osc):
    rep = build_rep(LadderCoefficients(INTRINSIC, osc), osc, 4)
    assert np.allclose(np.diag(rep.a_minus, 1), [1, math.sqrt(2), math.sqrt(3)])
    assert np.count_nonzero(rep.a_minus - np.diag(np.diag(rep.a_minus, 1), 1)) == 0


def test_linear_number_product(well):
    rep = build_rep(LadderCoefficients(LINEAR, well, 0.4), well, 4)
    assert np.allclose(rep.a_plus @ rep.a_minus, np.diag([0, 1, 2, 3]))


def test_well_intrinsic_number_product(well):
    rep = build_rep(LadderCoefficients(INTRINSIC, well), well, 3)
    assert np.allclose(rep.a_plus @ rep.a_minus, np.diag([0, 1.5, 4]))


def test_rep_structure(pt3):
    rep = build_rep(LadderCoefficients(INTRINSIC, pt3, 0.9), pt3, 6)
    assert np.array_equal(rep.a_plus, rep.a_minus.conj().T)
    assert np.array_equal(rep.N, np.diag(np.arange(6.0)))
    with pytest.raises(ValueError):
        rep.a_minus[0, 1] = 0


def test_dim_too_small(osc):
    with pytest.raises(DomainError):
        build_rep(LadderCoefficients(LINEAR, osc), osc, 2)


def test_model_mismatch(osc, well):
    with pytest.raises(DomainError):
        build_rep(LadderCoefficients(LINEAR, osc), well, 4)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.cli_name())
@pytest.mark.parametrize("flavor", [INTRINSIC, LINEAR])
def test_identities_hold(model, flavor):
    rep = build_rep(LadderCoefficients(flavor, model, 0.37), model, 12)
    rpt = verify_algebra(rep)
    assert rpt.max_defect < 1e-12
    assert len(rpt.identities_checked) == 6


def test_brackets_well_and_pt(well, pt3):
    assert np.allclose(bracket_diagonal(build_rep(LadderCoefficients(INTRINSIC, well), well, 10)),
                       np.arange(9) + 1.5)
    assert np.allclose(bracket_diagonal(build_rep(LadderCoefficients(INTRINSIC, pt3), pt3, 10)),
                       np.arange(9) + 3.5)


def test_linear_bracket_is_identity(pt3):
    rep = build_rep(LadderCoefficients(LINEAR, pt3, 1.1), pt3, 10)
    assert np.allclose(bracket_diagonal(rep), 1.0, atol=1e-12)


def test_oscillator_intrinsic_equals_linear(osc):
    a = build_rep(LadderCoefficients(INTRINSIC, osc), osc, 8)
    b = build_rep(LadderCoefficients(LINEAR, osc), osc, 8)
    assert np.allclose(a.a_minus, b.a_minus, rtol=0, atol=1e-15)


def test_partner_intrinsic_equals_h0(pt3):
    c = LadderCoefficients(INTRINSIC, pt3, 0.2)
    assert np.array_equal(build_rep(c, pt3, 9).a_minus, build_rep(c, pt3, 9, THETA).a_minus)


def test_natural_kills_deleted_columns(presets):
    for T in presets.values():
        c = LadderCoefficients(NATURAL, T.model, 0.0, T.factorization_energies)
        rep = build_rep(c, T.model, 12, THETA)
        for m in T.deleted_ladder:
            assert np.all(rep.a_minus[:, m + 1] == 0)
        rpt = verify_algebra(rep)
        assert rpt.max_defect < 1e-12


def test_natural_product_closed_form(fig1):
    # a+a- = [E(N) - E0] (r_N / r_I)^2, written out for the oscillator example
    c = LadderCoefficients(NATURAL, fig1.model, 0.0, fig1.factorization_energies)
    rep = build_rep(c, fig1.model, 8, THETA)
    n = np.arange(8)
    # eps = -3/2 contributes (n+2)(n+1); the double eps = 1/2 contributes [n(n-1)]^2
    want = n * (n + 2.0) * (n + 1.0) * (n * (n - 1.0)) ** 2
    assert np.allclose(np.real(np.diag(rep.a_plus @ rep.a_minus)), want)


def test_commutator_basics(osc):
    A = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(commutator(A, A), np.zeros((3, 3)))
    B = np.array([[0, 1, 0], [2, 0, 1], [0, 3, 0]], float)
    hand = np.array([[A[0] @ B[:, j] - B[0] @ A[:, j] for j in range(3)],
                     [A[1] @ B[:, j] - B[1] @ A[:, j] for j in range(3)],
                     [A[2] @ B[:, j] - B[2] @ A[:, j] for j in range(3)]])
    assert np.array_equal(commutator(A, B), hand)
    rep = build_rep(LadderCoefficients(LINEAR, osc), osc, 6)
    assert np.allclose(commutator(rep.N, rep.a_minus)[:5, :5], -rep.a_minus[:5, :5])
    with pytest.raises(DimMismatch):
        commutator(A, np.eye(4))


def test_report_serializes(osc):
    d = verify_algebra(build_rep(LadderCoefficients(LINEAR, osc), osc, 5)).as_dict()
    assert set(d) == {"flavor", "model", "max_defect", "identities_checked", "defects", "passed"}
    assert d["passed"]
