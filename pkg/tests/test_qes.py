import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rashba_qes.params import BlockConstants, DimensionlessParams, block_constants
from rashba_qes.polynomial import Poly
from rashba_qes.qes import (PRINTED_D2_COEFFICIENT, PolynomialSpinor, build_block, compare_with_paper,
                            det_bareiss, det_continuant, det_polynomial, generator_equivalent,
                            htilde_apply, htilde_literal_apply, literal_operator_findings,
                            null_spinor, operator_matrix, printed_determinant, qes_roots,
                            sign_similarity, transcription_errata)


def leibniz_det_at(C, E):
    """det(C - E I) by the permutation expansion, exact."""
    n = len(C)
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(perm[a] > perm[b] for a in range(n) for b in range(a + 1, n))
        term = Fraction(-1 if inv % 2 else 1)
        for row, col in enumerate(perm):
            term *= C[row][col] - (E if row == col else 0)
            if not term:
                break
        total += term
    return total


def rational_triples(n, seed):
    rng = random.Random(seed)
    return [(Fraction(rng.randint(0, 19), 10), Fraction(rng.randint(-20, 20), 8),
             Fraction(rng.randint(0, 30), 7)) for _ in range(n)]


def block_at(j, r, b, kappa):
    return build_block(j, block_constants(j, DimensionlessParams(r, b, kappa)), kappa)


# -- block assembly -----------------------------------------------------------

def test_block_j0():
    bc = BlockConstants(0, Fraction(1, 3), Fraction(1, 5))
    C = build_block(0, bc, Fraction(2)).C
    assert C == ((Fraction(8, 15), Fraction(-2)), (Fraction(0), Fraction(2, 15)))


def test_block_j1_rows():
    k = Fraction(3, 7)
    bc = BlockConstants(1, Fraction(1, 2), Fraction(1, 6))
    ep, em = bc.eps_plus, bc.eps_minus
    assert build_block(1, bc, k).C == ((ep, -k, 0, 0), (k, em, k, 0), (0, 2 * k, ep + 2, -k),
                                        (0, 0, 0, em + 2))


def test_block_decoupled_is_diagonal():
    block = block_at(3, Fraction(1, 2), Fraction(1, 4), 0)
    C = np.array(block.C, dtype=object)
    expected = [2 * n + e for n in range(4) for e in (block.eps_plus, block.eps_minus)]
    assert list(np.diag(C)) == expected
    assert all(C[r][c] == 0 for r in range(8) for c in range(8) if r != c)


def test_block_is_tridiagonal():
    C = block_at(5, Fraction(3, 10), Fraction(-1, 2), Fraction(7, 4)).C
    assert all(C[r][c] == 0 for r in range(12) for c in range(12) if abs(r - c) > 1)


def test_float_parameters_are_rationalized():
    block = build_block(1, BlockConstants(1, 0.1, 0.2), 0.3)
    assert block.kappa == Fraction(3, 10)
    assert any("kappa" in n for n in block.rationalizations)


def test_mismatched_block_constants():
    with pytest.raises(ValueError):
        build_block(1, BlockConstants(2, 0, 0), 0)


# -- the operator on polynomial spinors ---------------------------------------

@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_generator_equivalence(j):
    for r, b, k in rational_triples(10, seed=j):
        assert generator_equivalent(j, block_constants(j, DimensionlessParams(r, b, k)), k)


def test_htilde_overflow_is_reported():
    bc = BlockConstants(1, Fraction(1, 2), Fraction(1, 4))
    # z (z d/dz - j) vanishes on p = z^j, so p alone never overflows
    out = htilde_apply(PolynomialSpinor((0, 1), (0, 0, 0)), 1, bc, Fraction(1))
    assert out.overflow == {}
    # q = z^2 feeds the z d/dz + 1 term at degree 2 > j
    out = htilde_apply(PolynomialSpinor((0, 0), (0, 0, 1)), 1, bc, Fraction(1))
    assert out.overflow == {("p", 2): Fraction(3)}
    with pytest.raises(ValueError):
        htilde_apply(PolynomialSpinor((1, 0, 0), (0,)), 1, bc, 1)


def test_spinor_vector_roundtrip():
    phi = PolynomialSpinor((1, 2, 3), (0, 4, 5, 6))
    assert phi.to_vector() == [1, 4, 2, 5, 3, 6]
    assert PolynomialSpinor.from_vector(phi.to_vector()) == phi


def test_literal_operator_monomials():
    k = Fraction(3, 10)
    _, lower = htilde_literal_apply([1], [], 0, 0, 0, k)
    assert lower == {1: k}
    _, lower = htilde_literal_apply([1], [], 2, 0, 0, k)
    assert lower == {0: 2 * k, 1: k}
    upper, _ = htilde_literal_apply([], [0, 1], 0, 0, 0, k)
    assert upper == {0: k, 1: -k}


def test_literal_operator_differs_from_recurrence():
    f = literal_operator_findings()
    assert f["verdict"] == "mismatch"
    assert f["upper_diagonal_offset"] == "-1/2"  # -r at r = 1/2
    assert f["lower_diagonal_offset"] == "2"
    assert f["coupling_products_printed_operator"] == ["1", "2"]  # kappa^2 (n + 1)
    assert f["coupling_products_recurrence"] == ["2", "3"]  # kappa^2 (n + 2)


# -- determinants -------------------------------------------------------------

@pytest.mark.parametrize("j", range(7))
def test_continuant_equals_bareiss(j):
    for r, b, k in rational_triples(2, seed=100 + j):
        block = block_at(j, r, b, k)
        assert det_continuant(block) == det_bareiss(block)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_determinant_against_leibniz(j):
    r, b, k = rational_triples(1, seed=7 + j)[0]
    block = block_at(j, r, b, k)
    poly = det_polynomial(block).poly
    for E in (Fraction(-3), Fraction(1, 3), Fraction(5, 2), Fraction(7)):
        assert poly(E) == leibniz_det_at(block.C, E)


def test_d0_is_kappa_free():
    a = det_polynomial(block_at(0, Fraction(1, 3), Fraction(1, 7), 0)).poly
    for k in (Fraction(1, 2), Fraction(9)):
        assert det_polynomial(block_at(0, Fraction(1, 3), Fraction(1, 7), k)).poly == a


def test_d0_origin_roots():
    poly = det_polynomial(block_at(0, 0, 0, 0)).poly
    assert poly == Poly([0, -1, 1])


def test_d1_printed_form():
    for r, b, k in rational_triples(6, seed=11):
        bc = block_constants(1, DimensionlessParams(r, b, k))
        assert det_polynomial(build_block(1, bc, k)).poly == printed_determinant(
            1, bc.eps_plus, bc.eps_minus, k)


def test_compare_with_paper_verdicts(reference_params):
    p = reference_params
    verdicts = [compare_with_paper(j, block_constants(j, p), p.kappa).verdict for j in range(3)]
    assert verdicts == ["match", "match", "typo-suspected"]
    rep = compare_with_paper(2, block_constants(2, p), p.kappa)
    assert rep.printed_value == PRINTED_D2_COEFFICIENT
    assert rep.corrected_value == 16


def test_corrected_d2_matches_everywhere():
    for r, b, k in rational_triples(8, seed=5):
        bc = block_constants(2, DimensionlessParams(r, b, k))
        assert det_polynomial(build_block(2, bc, k)).poly == printed_determinant(
            2, bc.eps_plus, bc.eps_minus, k, d2_coefficient=16)


def test_errata_block_entry():
    e = transcription_errata()[0]
    assert e["recurrence"] == "E+ + 4 hbar omega"
    assert e["recurrence_matches_printed_D2_leading_term"]
    assert not e["printed_entry_matches_printed_D2_leading_term"]
    assert e["verdict"] == "typo-suspected"


# -- roots ----------------------------------------------------------------------

# bisection on the exact quartic (Leibniz expansion, Fraction arithmetic),
# computed once and frozen here
J1_ORIGIN_HALF = [-0.8928335055990055, -0.2601152590677111, 1.0, 2.152948764666712]


def test_j1_roots_frozen():
    roots = qes_roots(block_at(1, 0, 0, Fraction(1, 2)))
    assert [q.root.imag for q in roots] == [0.0] * 4
    assert [q.root.real for q in roots] == pytest.approx(J1_ORIGIN_HALF, abs=1e-12)
    assert all(q.residual < 1e-14 for q in roots)


def test_j0_roots_kappa_independent():
    for k in (0, Fraction(1, 2), Fraction(40)):
        roots = qes_roots(block_at(0, Fraction(1, 2), Fraction(1, 4), k))
        bc = block_constants(0, DimensionlessParams(Fraction(1, 2), Fraction(1, 4), k))
        assert [q.root for q in roots] == pytest.approx(sorted([float(bc.eps_minus),
                                                                float(bc.eps_plus)]))


def test_decoupled_roots_with_multiplicity():
    # b = -1/2 gives eps_b = 1, so eps- + 2 = eps+ and roots collide
    block = block_at(3, 0, Fraction(-1, 2), 0)
    roots = qes_roots(block)
    expected = sorted(float(2 * n + block.eps_j + s * block.eps_b) for n in range(4) for s in (1, -1))
    assert [q.root.real for q in roots] == pytest.approx(expected, abs=1e-12)
    assert max(q.multiplicity for q in roots) == 2


def test_complex_roots_are_reported():
    found = False
    for r, b, k in rational_triples(30, seed=3):
        roots = qes_roots(block_at(2, r, b, k))
        assert len(roots) == 6
        if any(not q.is_real for q in roots):
            found = True
            keys = [(q.root.real, q.root.imag) for q in roots]
            assert keys == sorted(keys)
    assert found


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 4), st.fractions(0, Fraction(19, 10), max_denominator=20),
       st.fractions(-2, 2, max_denominator=20), st.fractions(0, 3, max_denominator=20))
def test_kappa_sign_similarity(j, r, b, k):
    block = block_at(j, r, b, k)
    flipped = build_block(j, block_constants(j, DimensionlessParams(r, b, 0)), -k)
    D = sign_similarity(j)
    n = block.dim
    assert all(D[a] * block.C[a][c] * D[c] == flipped.C[a][c] for a in range(n) for c in range(n))
    assert det_polynomial(block).poly == det_polynomial(flipped).poly


# -- null spinors ---------------------------------------------------------------

def test_null_spinor_decoupled():
    block = block_at(1, Fraction(1, 2), Fraction(1, 4), 0)
    (ns,) = null_spinor(block, complex(block.eps_plus))
    assert np.allclose(ns.spinor.to_vector(), [1, 0, 0, 0])
    assert ns.consistency_residual == 0 and ns.series_terminating


def test_null_spinor_j0_hand_solution(reference_params):
    p = reference_params
    block = build_block(0, block_constants(0, p), p.kappa)
    (ns,) = null_spinor(block, complex(block.eps_minus))
    v = np.array(ns.spinor.to_vector())
    expected = np.array([float(p.kappa), 2 * float(block.eps_b)])
    expected /= np.linalg.norm(expected)
    assert np.allclose(v, expected)
    # first out-of-window row: 2 kappa q_1
    assert ns.consistency_residual == pytest.approx(2 * 0.3 * abs(v[1]), rel=1e-12)
    assert ns.consistency_residual == pytest.approx(0.5570860145311556, rel=1e-12)
    assert not ns.series_terminating


def test_null_spinor_degenerate_returns_all_directions():
    block = block_at(3, 0, Fraction(-1, 2), 0)
    double = next(q for q in qes_roots(block) if q.multiplicity == 2)
    assert len(null_spinor(block, double.root)) == 2


def test_null_vectors_solve_the_block():
    block = block_at(2, Fraction(1, 2), Fraction(1, 4), Fraction(3, 10))
    C = block.as_array()
    for q in qes_roots(block):
        for ns in null_spinor(block, q.root):
            v = np.array(ns.spinor.to_vector())
            assert np.linalg.norm(C @ v - q.root * v) < 1e-10


def test_operator_matrix_is_exact():
    bc = BlockConstants(2, Fraction(1, 3), Fraction(2, 9))
    M = operator_matrix(2, bc, Fraction(5, 11))
    assert all(isinstance(x, (int, Fraction)) for row in M for x in row)
