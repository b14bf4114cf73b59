import numpy as np
import pytest

from rashba_qes.fock import (DOWN, UP, BasisMismatchError, FockBasis, TruncatedOperator,
                             anticommutator, boson_operators, commutator, identity,
                             interior_projector, osp22_generators, pauli_operators,
                             verify_relations)


@pytest.fixture(scope="module")
def basis():
    return FockBasis(4, 3)


def test_dimension_and_index_roundtrip(basis):
    assert basis.dim == 5 * 4 * 2
    for i in range(basis.dim):
        assert basis.index(*basis.state(i)) == i
    assert basis.index(0, 0, UP) == 0
    assert basis.index(0, 0, DOWN) == 1
    assert basis.state(2) == (0, 1, UP)


def test_ladder_actions(basis):
    a1, a1d, a2, a2d = boson_operators(basis)
    out = a1d @ basis.ket(0, 0, UP)
    assert np.allclose(out, basis.ket(1, 0, UP))
    assert a1d.element((2, 0, DOWN), (1, 0, DOWN)) == pytest.approx(np.sqrt(2))
    assert np.array_equal(a1d.entries, a1.entries.conj().T)
    assert np.array_equal(a2d.entries, a2.entries.conj().T)


def test_canonical_commutator_away_from_edge(basis):
    a1, a1d, _, _ = boson_operators(basis)
    c = commutator(a1, a1d).entries
    lab = basis.labels()
    inner = lab[:, 0] <= basis.n1_max - 1
    assert np.allclose(c[np.ix_(inner, inner)], np.eye(inner.sum()))


def test_truncation_artifact_is_single_value(basis):
    a1, a1d, _, _ = boson_operators(basis)
    defect = commutator(a1, a1d).entries - np.eye(basis.dim)
    lab = basis.labels()
    edge = lab[:, 0] == basis.n1_max
    assert np.allclose(np.diag(defect)[edge], -(basis.n1_max + 1))
    assert np.allclose(defect[~edge][:, ~edge], 0)
    assert np.count_nonzero(np.round(defect, 12)) == edge.sum()


def test_pauli(basis):
    sp, sm, s0 = pauli_operators(basis)
    assert np.allclose(sp @ basis.ket(1, 2, DOWN), basis.ket(1, 2, UP))
    assert np.allclose(s0 @ basis.ket(0, 0, UP), -basis.ket(0, 0, UP))
    assert (sp @ sp).max_abs() == 0
    assert np.allclose(anticommutator(sp, sm).entries, np.eye(basis.dim))


def test_commutator_plumbing(basis):
    a1, _, _, a2d = boson_operators(basis)
    assert commutator(identity(basis), a1).max_abs() == 0
    assert commutator(a1, a2d).max_abs() == 0
    with pytest.raises(BasisMismatchError):
        commutator(a1, identity(FockBasis(2, 2)))


def test_interior_projector():
    b = FockBasis(3, 3)
    assert np.array_equal(interior_projector(b, 0).entries, np.eye(b.dim))
    P = interior_projector(b, 3).entries
    assert np.trace(P).real == 2 and P[0, 0] == 1 and P[1, 1] == 1
    b = FockBasis(5, 4)
    assert np.trace(interior_projector(b, 2).entries).real == (5 - 2 + 1) * (4 - 2 + 1) * 2
    with pytest.raises(ValueError):
        interior_projector(b, 5)


def test_generator_definitions(basis):
    g = osp22_generators(basis)
    assert np.allclose(g.J_plus @ basis.ket(0, 0, UP), basis.ket(1, 1, UP))
    assert np.allclose(g.V_plus @ basis.ket(0, 0, DOWN), basis.ket(0, 1, UP))
    for i in range(basis.dim):
        n1, n2, _ = basis.state(i)
        assert g.N.entries[i, i] == pytest.approx(n1 - n2)
    a1, a1d, a2, a2d = boson_operators(basis)
    _, _, s0 = pauli_operators(basis)
    one = identity(basis)
    assert np.allclose(g.J_zero.entries, 0.5 * (a1d @ a1 + a2d @ a2 + one).entries)
    assert np.allclose(g.K.entries, (g.N - 0.5 * s0).entries)
    assert np.allclose(g.J_total.entries, 0.5 * (g.N - s0).entries)
    assert np.allclose(g.J_plus.entries, g.J_minus.dag.entries)


def test_truncated_operator_shape_check(basis):
    with pytest.raises(ValueError):
        TruncatedOperator(basis, np.eye(3))


@pytest.fixture(scope="module")
def report():
    return verify_relations(osp22_generators(FockBasis(6, 6)), margin=2, tol=1e-12)


def test_relations_cover_table(report):
    names = [r.relation_name for r in report.results]
    assert len(names) == len(set(names)) == 32 + 7
    assert all(r.residual >= 0 for r in report.results)


@pytest.mark.parametrize("name", ["[J0,J+] = +J+", "{W+,W-} = 0", "[K,V_plus] = 0",
                                  "[J+,J-] = -2J0", "{V+,W-} = +J0 - J", "[J,V+] = +V+/2"])
def test_printed_relations_that_hold(report, name):
    r = next(r for r in report.results if r.relation_name == name)
    assert r.residual < 1e-12 and r.verdict == "match"


@pytest.mark.parametrize("name", ["[J+,V-] = V+", "[J+,W-] = W+", "{V-,W+} = -J0 - J"])
def test_printed_relations_with_sign_errors(report, name):
    # these three fail as printed but hold exactly with the right-hand side negated
    r = next(r for r in report.results if r.relation_name == name)
    assert not r.passed
    assert r.flipped_residual < 1e-12
    assert r.verdict == "typo-suspected"


def test_report_json(report):
    import json
    rows = json.loads(report.to_json())
    assert set(rows[0]) >= {"relation_name", "residual", "tolerance", "pass"}


def test_margin_must_be_two():
    with pytest.raises(ValueError):
        verify_relations(osp22_generators(FockBasis(3, 3)), margin=1)
