"""Quasi-exactly-solvable blocks, their determinant polynomials and roots.

Block j acts on the interleaved coefficient vector

    (p_0, q_1, p_1, q_2, ..., p_j, q_{j+1})

of the polynomial spinor (p(z), q(z)), with deg p <= j and q having powers
z^1 .. z^{j+1}.  The energy equation reads (C - E) v = 0 where C is the
constant matrix built here.  Energies are in units of hbar*omega.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np
from scipy.optimize import linear_sum_assignment

from .params import BlockConstants, Number, rationalize
from .polynomial import Poly

IMAG_TOL = 1e-10
CLUSTER_RTOL = 1e-8
ROOT_AGREEMENT = 1e-10
TERMINATION_TOL = 1e-10


class InternalConsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagree."""


# ---------------------------------------------------------------------------
# polynomial spinors and the single-variable operator


@dataclass(frozen=True)
class PolynomialSpinor:
    """Two-component polynomial; ``p[k]`` and ``q[k]`` multiply z**k.

    ``overflow`` holds coefficients that landed outside the block's degree
    window, keyed by (component, power).  It is empty for an in-block spinor.
    """

    p: tuple
    q: tuple
    overflow: dict = field(default_factory=dict)

    @classmethod
    def zero(cls, j: int) -> "PolynomialSpinor":
        return cls((0,) * (j + 1), (0,) * (j + 2))

    @property
    def j(self) -> int:
        return len(self.p) - 1

    def to_vector(self) -> list:
        """Interleaved (p_0, q_1, p_1, q_2, ...) coefficients."""
        out = []
        for n in range(self.j + 1):
            out += [self.p[n], self.q[n + 1]]
        return out

    @classmethod
    def from_vector(cls, v) -> "PolynomialSpinor":
        v = list(v)
        if len(v) % 2:
            raise ValueError("interleaved vector must have even length")
        p = tuple(v[0::2])
        q = (0,) + tuple(v[1::2])
        return cls(p, q)


# sparse coefficient maps {power: value} keep the operator algebra readable


def _z(c: dict) -> dict:
    return {k + 1: v for k, v in c.items()}


def _over_z(c: dict) -> dict:
    return {k - 1: v for k, v in c.items()}


def _z_ddz(c: dict) -> dict:
    return {k: k * v for k, v in c.items()}


def _ddz(c: dict) -> dict:
    return {k - 1: k * v for k, v in c.items() if k}


def _lin(*terms) -> dict:
    out: dict = {}
    for coef, c in terms:
        for k, v in c.items():
            out[k] = out.get(k, 0) + coef * v
    return {k: v for k, v in out.items() if v != 0}


def _as_map(coeffs) -> dict:
    return {k: v for k, v in enumerate(coeffs) if v != 0}


def htilde_apply(phi: PolynomialSpinor, j: int, bc: BlockConstants, kappa) -> PolynomialSpinor:
    """E-independent part of the reduced operator acting on ``phi``.

    upper = (2 z d/dz + eps+) p + kappa (z d/dz + 1 - 1/z) q
    lower = (2 z d/dz - 2 + eps-) q - kappa (z (z d/dz - j) - 1) p

    Degrees outside the block window (p above z^j, q outside z^1..z^{j+1})
    are returned in ``overflow`` rather than dropped.
    """
    if len(phi.p) > j + 1 or len(phi.q) > j + 2:
        raise ValueError(f"spinor exceeds the degree bounds of block j={j}")
    if phi.q and phi.q[0] != 0:
        raise ValueError("the lower component has no constant term in this block")
    p, q = _as_map(phi.p), _as_map(phi.q)
    upper = _lin((2, _z_ddz(p)), (bc.eps_plus, p),
                 (kappa, _z_ddz(q)), (kappa, q), (-kappa, _over_z(q)))
    lower = _lin((2, _z_ddz(q)), (bc.eps_minus - 2, q),
                 (-kappa, _z(_lin((1, _z_ddz(p)), (-j, p)))), (kappa, p))
    zero = bc.eps_plus * 0
    p_out = [upper.get(k, zero) for k in range(j + 1)]
    q_out = [zero] + [lower.get(k, zero) for k in range(1, j + 2)]
    overflow = {("p", k): v for k, v in upper.items() if not 0 <= k <= j}
    overflow.update({("q", k): v for k, v in lower.items() if not 1 <= k <= j + 1})
    return PolynomialSpinor(tuple(p_out), tuple(q_out), overflow)


def htilde_literal_apply(p_coeffs, q_coeffs, j: int, r, b, kappa) -> tuple[dict, dict]:
    """The single-variable operator exactly as printed, no degree window.

    Returns sparse {power: coefficient} maps for the (upper, lower) output.
    Kept to document how it differs from the recurrence; see
    ``literal_operator_findings``.
    """
    p, q = _as_map(p_coeffs), _as_map(q_coeffs)
    upper_const = -j + 1 + r * j / 2 - b
    lower_const = -j + r * (j + 1) / 2 + b
    upper = _lin((2, _z_ddz(p)), (upper_const, p), (-kappa, q), (kappa, _ddz(q)))
    lower = _lin((2, _z_ddz(q)), (lower_const, q),
                 (-kappa, _z_ddz(p)), (kappa * j, p), (kappa, _z(p)))
    return upper, lower


# ---------------------------------------------------------------------------
# the block matrix


def recurrence_row(kind: str, n: int, j: int, eps_plus, eps_minus, kappa) -> dict:
    """Non-zero entries of one recurrence row, keyed by unknown label.

    kind "p": row of p_n, unknowns p_n, q_n, q_{n+1}
    kind "q": row of q_{n+1}, unknowns q_{n+1}, p_n, p_{n+1}
    Labels are ("p", n) / ("q", m); the E term is excluded.
    """
    if kind == "p":
        return {("p", n): 2 * n + eps_plus, ("q", n): kappa * (n + 1), ("q", n + 1): -kappa}
    if kind == "q":
        return {("q", n + 1): 2 * n + eps_minus, ("p", n): kappa * (j - n), ("p", n + 1): kappa}
    raise ValueError(kind)


def _label_index(label, j: int) -> int | None:
    comp, k = label
    if comp == "p" and 0 <= k <= j:
        return 2 * k
    if comp == "q" and 1 <= k <= j + 1:
        return 2 * k - 1
    return None


@dataclass(frozen=True)
class QesBlock:
    j: int
    C: tuple  # tuple of row tuples, exact Fractions
    eps_j: Fraction
    eps_b: Fraction
    kappa: Fraction
    rationalizations: tuple = ()

    @property
    def dim(self) -> int:
        return 2 * (self.j + 1)

    @property
    def eps_plus(self) -> Fraction:
        return self.eps_j + self.eps_b

    @property
    def eps_minus(self) -> Fraction:
        return self.eps_j - self.eps_b

    def as_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.C])

    def labels(self) -> list:
        out = []
        for n in range(self.j + 1):
            out += [("p", n), ("q", n + 1)]
        return out


def _exact(name: str, x, notes: list) -> Fraction:
    frac, note = rationalize(x)
    if note:
        notes.append(f"{name}: {note}")
    return frac


def build_block(j: int, bc: BlockConstants, kappa: Number) -> QesBlock:
    """Assemble C from the three-term recurrence, closing the window at n = j."""
    if j < 0:
        raise ValueError("j must be non-negative")
    if bc.j != j:
        raise ValueError(f"block constants are for j={bc.j}, not j={j}")
    notes: list = []
    eps_j = _exact("eps_j", bc.eps_j, notes)
    eps_b = _exact("eps_b", bc.eps_b, notes)
    k = _exact("kappa", kappa, notes)
    dim = 2 * (j + 1)
    C = [[Fraction(0)] * dim for _ in range(dim)]
    for n in range(j + 1):
        for kind in ("p", "q"):
            row = 2 * n if kind == "p" else 2 * n + 1
            for label, val in recurrence_row(kind, n, j, eps_j + eps_b, eps_j - eps_b, k).items():
                col = _label_index(label, j)
                if col is not None:
                    C[row][col] += val
    return QesBlock(j, tuple(tuple(r) for r in C), eps_j, eps_b, k, tuple(notes))


def operator_matrix(j: int, bc: BlockConstants, kappa) -> list[list]:
    """Matrix of ``htilde_apply`` on the monomial spinor basis, column by column."""
    dim = 2 * (j + 1)
    cols = []
    for i in range(dim):
        v = [0] * dim
        v[i] = 1
        image = htilde_apply(PolynomialSpinor.from_vector(v), j, bc, kappa)
        cols.append(image.to_vector())
    return [[cols[c][r] for c in range(dim)] for r in range(dim)]


def generator_equivalent(j: int, bc: BlockConstants, kappa) -> bool:
    """Exact entrywise equality of the operator matrix and the recurrence block."""
    block = build_block(j, bc, kappa)
    exact_bc = BlockConstants(j, block.eps_j, block.eps_b)
    M = operator_matrix(j, exact_bc, block.kappa)
    return all(Fraction(M[r][c]) == block.C[r][c] for r in range(block.dim) for c in range(block.dim))


def sign_similarity(j: int) -> list[int]:
    """Diagonal of D with D C(kappa) D = C(-kappa)."""
    return [(-1) ** i for i in range(2 * (j + 1))]


# ---------------------------------------------------------------------------
# determinants


@dataclass(frozen=True)
class EnergyPolynomial:
    """det(C - E I) as an exact polynomial in E (leading coefficient +1)."""

    j: int
    poly: Poly
    rationalizations: tuple = ()

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return self.poly.coeffs

    def to_json_obj(self) -> dict:
        return {"j": self.j, "coefficients": [str(c) for c in self.poly.coeffs],
                "order": "ascending powers of E"}


def _shifted(block: QesBlock) -> list[list[Poly]]:
    E = Poly.x()
    return [[Poly.const(x) - (E if r == c else 0) for c, x in enumerate(row)]
            for r, row in enumerate(block.C)]


def det_continuant(block: QesBlock) -> Poly:
    """Three-term continuant recurrence; requires C tridiagonal."""
    M = _shifted(block)
    n = block.dim
    for r in range(n):
        for c in range(n):
            if abs(r - c) > 1 and block.C[r][c] != 0:
                raise ValueError("block is not tridiagonal")
    f_prev, f = Poly.const(1), M[0][0]
    for k in range(1, n):
        f_prev, f = f, M[k][k] * f - M[k][k - 1] * M[k - 1][k] * f_prev
    return f


def det_bareiss(block: QesBlock) -> Poly:
    """Fraction-free (Bareiss) elimination over Q[E]."""
    A = [row[:] for row in _shifted(block)]
    n = len(A)
    sign = 1
    prev = Poly.const(1)
    for k in range(n - 1):
        if not A[k][k]:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return Poly()
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for c in range(k + 1, n):
                A[i][c] = (A[i][c] * A[k][k] - A[i][k] * A[k][c]).exact_div(prev)
        prev = A[k][k]
    return A[n - 1][n - 1] * sign


def det_polynomial(block: QesBlock) -> EnergyPolynomial:
    cont = det_continuant(block)
    elim = det_bareiss(block)
    if cont != elim:
        raise InternalConsistencyError(f"continuant and elimination disagree for j={block.j}")
    return EnergyPolynomial(block.j, cont, block.rationalizations)


# ---------------------------------------------------------------------------
# printed determinants and their comparison

PRINTED_D2_COEFFICIENT = 162


def printed_determinant(j: int, eps_plus, eps_minus, kappa, d2_coefficient=PRINTED_D2_COEFFICIENT) -> Poly:
    """The closed forms D_0..D_2 as printed, with E+- = eps+- - E, hbar*omega = 1."""
    E = Poly.x()
    Ep, Em = Poly.const(eps_plus) - E, Poly.const(eps_minus) - E
    k2 = Fraction(kappa) ** 2
    if j == 0:
        return Ep * Em
    if j == 1:
        return (Em + 2) * (Ep * Em * (Ep + 2) - k2 * (Ep - 2))
    if j == 2:
        inner = (Ep * Em * (Ep + 2) * (Em + 2) * (Ep + 4)
                 + k2 * (2 * Ep * (Em + 4) + d2_coefficient * (Em + 2) - 2 * Ep * Ep * Em)
                 + 2 * k2 * k2 * (Ep - 2))
        return (Em + 4) * inner
    raise ValueError("only j = 0, 1, 2 are printed")


SUSPECT_TERMS = {2: "162 hbar^2 omega^2 (E- + 2 hbar omega)"}


@dataclass(frozen=True)
class DiscrepancyReport:
    j: int
    computed: Poly
    printed: Poly
    differences: tuple  # per parameter point, ascending-power coefficient differences
    points: tuple  # (eps_j, eps_b, kappa) triples used
    verdict: str  # match | typo-suspected | mismatch
    suspect_term: str | None = None
    printed_value: Fraction | None = None
    corrected_value: Fraction | None = None

    def to_json_obj(self) -> dict:
        return {
            "j": self.j,
            "verdict": self.verdict,
            "computed": [str(c) for c in self.computed.coeffs],
            "printed": [str(c) for c in self.printed.coeffs],
            "difference": [str(c) for c in self.differences[0]],
            "points_checked": len(self.points),
            "suspect_term": self.suspect_term,
            "printed_value": None if self.printed_value is None else str(self.printed_value),
            "corrected_value": None if self.corrected_value is None else str(self.corrected_value),
        }


def _random_points(n: int, seed: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    rng = random.Random(seed)

    def frac():
        return Fraction(rng.randint(-40, 40), rng.randint(1, 12))

    return [(frac(), frac(), frac()) for _ in range(n)]


def _coeff_diff(a: Poly, b: Poly) -> tuple[Fraction, ...]:
    return (a - b).coeffs


def compare_with_paper(j: int, bc: BlockConstants, kappa, n_random: int = 6,
                       seed: int = 0) -> DiscrepancyReport:
    """Compare det(C - E) with the printed D_j at ``(bc, kappa)`` and random points.

    A mismatch that is explained by changing one registered suspect
    coefficient to a single rational value (the same at every point) is
    reported as typo-suspected together with that value.
    """
    if j not in (0, 1, 2):
        raise ValueError("printed determinants exist for j = 0, 1, 2 only")
    first = build_block(j, bc, kappa)
    points = [(first.eps_j, first.eps_b, first.kappa)] + _random_points(n_random, seed + j)
    computed, printed, diffs = [], [], []
    for ej, eb, k in points:
        block = build_block(j, BlockConstants(j, ej, eb), k)
        d = det_polynomial(block).poly
        pr = printed_determinant(j, ej + eb, ej - eb, k)
        computed.append(d)
        printed.append(pr)
        diffs.append(_coeff_diff(d, pr))
    base = dict(j=j, computed=computed[0], printed=printed[0], differences=tuple(diffs),
                points=tuple(points))
    if all(not d for d in diffs):
        return DiscrepancyReport(verdict="match", **base)
    if j not in SUSPECT_TERMS:
        return DiscrepancyReport(verdict="mismatch", **base)
    # printed D_j is affine in the suspect coefficient: D(c) = D(0) + c * T
    deltas = set()
    for (ej, eb, k), d, pr in zip(points, computed, printed):
        T = (printed_determinant(j, ej + eb, ej - eb, k, 1)
             - printed_determinant(j, ej + eb, ej - eb, k, 0))
        if not T:
            continue
        q, rem = (d - pr).divmod(T)
        if rem or q.degree > 0:
            return DiscrepancyReport(verdict="mismatch", suspect_term=SUSPECT_TERMS[j], **base)
        deltas.add(q.coeffs[0] if q.coeffs else Fraction(0))
    if len(deltas) != 1:
        return DiscrepancyReport(verdict="mismatch", suspect_term=SUSPECT_TERMS[j], **base)
    printed_value = Fraction(PRINTED_D2_COEFFICIENT)
    return DiscrepancyReport(verdict="typo-suspected", suspect_term=SUSPECT_TERMS[j],
                             printed_value=printed_value,
                             corrected_value=printed_value + deltas.pop(), **base)


def transcription_errata(seed: int = 0, n_random: int = 6) -> list[dict]:
    """Findings about the printed block matrix and differential operator.

    1. The j = 2 block's p_2 diagonal entry: the recurrence gives E+ + 4 while
       the printed matrix shows E+ + 3.  The decoupled determinant must
       reproduce the kappa-free term of the printed D_2, which carries
       (E+ + 4); we check both candidate entries against it.
    2. The printed single-variable operator versus the recurrence (see
       ``literal_operator_findings``).
    """
    findings = []
    consistent_rec = consistent_alt = True
    entry_offsets = set()
    for ej, eb, _ in _random_points(n_random, seed + 100):
        block = build_block(2, BlockConstants(2, ej, eb), 0)
        entry_offsets.add(block.C[4][4] - block.eps_plus)
        leading = printed_determinant(2, ej + eb, ej - eb, 0)
        E = Poly.x()
        Ep, Em = Poly.const(ej + eb) - E, Poly.const(ej - eb) - E
        factored = Ep * Em * (Ep + 2) * (Em + 2) * (Ep + 4) * (Em + 4)
        consistent_rec &= det_polynomial(block).poly == leading == factored
        C = [list(row) for row in block.C]
        C[4][4] = block.eps_plus + 3
        alt = QesBlock(2, tuple(tuple(r) for r in C), block.eps_j, block.eps_b, Fraction(0))
        consistent_alt &= det_polynomial(alt).poly == leading
    findings.append({
        "id": "block-j2-p2-diagonal",
        "printed": "E+ + 3 hbar omega",
        "recurrence": "E+ + " + ",".join(str(o) for o in sorted(entry_offsets)) + " hbar omega",
        "recurrence_matches_printed_D2_leading_term": bool(consistent_rec),
        "printed_entry_matches_printed_D2_leading_term": bool(consistent_alt),
        "leading_factor_structure": "E+ E- (E+ + 2)(E- + 2)(E+ + 4) x (E- + 4)",
        "verdict": "typo-suspected" if consistent_rec and not consistent_alt else "mismatch",
    })
    findings.append(literal_operator_findings())
    return findings


def literal_operator_findings(j: int = 2, r=Fraction(1, 2), b=Fraction(1, 4),
                              kappa=Fraction(3, 10)) -> dict:
    """How the printed single-variable operator relates to the recurrence.

    Checks (a) the diagonal constants against eps+- and (b) the
    similarity-invariant products C[i,i+1] C[i+1,i] along the chain.
    """
    from .params import DimensionlessParams, block_constants

    bc = block_constants(j, DimensionlessParams(r, b, kappa))
    up0, lo0 = htilde_literal_apply([1], [], j, r, b, 0)
    _, lo1 = htilde_literal_apply([], [0, 1], j, r, b, 0)
    upper_offset = up0.get(0, 0) - bc.eps_plus
    # lower entry for q_1 (power 1) relative to the recurrence's eps- + 0
    lower_offset = lo1.get(1, 0) - bc.eps_minus
    # coupling products between p z^n and q z^{n+1}
    products_literal, products_block = [], []
    block = build_block(j, bc, kappa)
    for n in range(j):
        up, _ = htilde_literal_apply([], [0] * (n + 1) + [1], j, r, b, kappa)
        _, lo = htilde_literal_apply([0] * n + [1], [], j, r, b, kappa)
        products_literal.append(up.get(n, 0) * lo.get(n + 1, 0) / kappa ** 2)
        i = 2 * n + 1  # q_{n+1} -- p_{n+1}
        products_block.append(block.C[i][i + 1] * block.C[i + 1][i] / kappa ** 2)
    up_top, _ = htilde_literal_apply([], [0] * (j + 1) + [1], j, r, b, kappa)
    closes = max(up_top, default=-1) <= j
    return {
        "id": "single-variable-operator-vs-recurrence",
        "upper_diagonal_offset": str(upper_offset),
        "lower_diagonal_offset": str(lower_offset),
        "coupling_products_printed_operator": [str(x) for x in products_literal],
        "coupling_products_recurrence": [str(x) for x in products_block],
        "printed_operator_closes_degree_window": bool(closes),
        "verdict": "mismatch" if (upper_offset or lower_offset or products_literal != products_block)
        else "match",
    }


# ---------------------------------------------------------------------------
# roots


@dataclass(frozen=True)
class QesRoot:
    root: complex
    residual: float
    multiplicity: int = 1

    @property
    def is_real(self) -> bool:
        return abs(self.root.imag) < IMAG_TOL


def _cluster(values: list[complex], rtol: float) -> list[list[int]]:
    clusters: list[list[int]] = []
    for i, v in enumerate(values):
        for cl in clusters:
            c = values[cl[0]]
            if abs(v - c) <= rtol * max(1.0, abs(c)):
                cl.append(i)
                break
        else:
            clusters.append([i])
    return clusters


def _poly_roots_exact(poly: Poly, dps: int = 40) -> list[complex]:
    """Eigenvalues of the companion matrix of an exact polynomial, at high precision."""
    coeffs = poly.coeffs
    n = poly.degree
    if n < 1:
        return []
    with mpmath.workdps(dps):
        lead = mpmath.mpf(coeffs[-1].numerator) / coeffs[-1].denominator
        comp = mpmath.zeros(n, n)
        for i in range(1, n):
            comp[i, i - 1] = 1
        for i in range(n):
            c = mpmath.mpf(coeffs[i].numerator) / coeffs[i].denominator
            comp[i, n - 1] = -c / lead
        ev = mpmath.eig(comp, left=False, right=False)
        return [complex(x) for x in ev]


def scaled_residual(poly: Poly, x: complex) -> float:
    with mpmath.workdps(40):
        z = mpmath.mpc(x.real, x.imag)
        val = mpmath.mpf(0)
        scale = mpmath.mpf(0)
        for c in reversed(poly.coeffs):
            cc = mpmath.mpf(c.numerator) / c.denominator
            val = val * z + cc
        for k, c in enumerate(poly.coeffs):
            scale += abs(mpmath.mpf(c.numerator) / c.denominator) * abs(z) ** k
        return float(abs(val) / scale) if scale else 0.0


def _sort_key(z: complex):
    return (round(z.real, 12), round(z.imag, 12))


def qes_roots(block: QesBlock) -> list[QesRoot]:
    """All 2(j+1) roots, from the dense eigensolver and the exact polynomial.

    Multiple roots are compared through cluster centroids, which are
    well-conditioned even when the individual float eigenvalues are not.
    """
    poly = det_polynomial(block).poly
    from_poly = _poly_roots_exact(poly)
    from_eig = [complex(x) for x in np.linalg.eigvals(block.as_array())]
    if len(from_poly) != len(from_eig):
        raise InternalConsistencyError("root counts differ")
    cost = np.abs(np.subtract.outer(np.array(from_poly), np.array(from_eig)))
    rows, cols = linear_sum_assignment(cost)
    partner = dict(zip(rows, cols))
    roots = []
    for cl in _cluster(from_poly, CLUSTER_RTOL):
        centre = sum(from_poly[i] for i in cl) / len(cl)
        eig_centre = sum(from_eig[partner[i]] for i in cl) / len(cl)
        if abs(centre - eig_centre) > ROOT_AGREEMENT * max(1.0, abs(centre)):
            raise InternalConsistencyError(
                f"j={block.j}: eigensolver {eig_centre} vs polynomial {centre}")
        for i in cl:
            z = from_poly[i]
            if abs(z.imag) < IMAG_TOL * 1e-3:
                z = complex(z.real, 0.0)
            roots.append(QesRoot(z, scaled_residual(poly, z), len(cl)))
    roots.sort(key=lambda q: _sort_key(q.root))
    return roots


# ---------------------------------------------------------------------------
# null spinors


@dataclass(frozen=True)
class NullSpinor:
    spinor: PolynomialSpinor
    consistency_residual: float

    @property
    def series_terminating(self) -> bool:
        return self.consistency_residual < TERMINATION_TOL


def consistency_row(block: QesBlock, v) -> complex:
    """First out-of-window recurrence row (p_{j+1}) with p_{j+1} = q_{j+2} = 0."""
    j = block.j
    row = recurrence_row("p", j + 1, j, block.eps_plus, block.eps_minus, block.kappa)
    total = 0j
    for label, coef in row.items():
        idx = _label_index(label, j)
        if idx is not None:
            total += complex(coef) * v[idx]
    return total


def null_spinor(block: QesBlock, root: complex, rtol: float = 1e-9) -> list[NullSpinor]:
    """Right null vectors of C - root I as polynomial spinors.

    Every direction whose singular value falls below ``rtol`` times the
    largest is returned, so degenerate roots yield several spinors.
    """
    M = block.as_array().astype(complex) - root * np.eye(block.dim)
    _, s, vh = np.linalg.svd(M)
    smax = s[0] if s[0] > 0 else 1.0
    null = [vh[i].conj() for i in range(len(s)) if s[i] <= rtol * smax]
    if not null:
        null = [vh[-1].conj()]
    out = []
    for v in null:
        v = v / v[np.argmax(np.abs(v))]
        v = v / np.linalg.norm(v)
        resid = abs(consistency_row(block, v)) / np.linalg.norm(v)
        out.append(NullSpinor(PolynomialSpinor.from_vector(list(v)), float(resid)))
    return out


def roots_csv_rows(block: QesBlock, roots: list[QesRoot]) -> list[dict]:
    rows = []
    for q in roots:
        ns = null_spinor(block, q.root)
        resid = min(n.consistency_residual for n in ns)
        rows.append({"j": block.j, "re": q.root.real, "im": q.root.imag, "residual": q.residual,
                     "consistency_residual": resid, "series_terminating": resid < TERMINATION_TOL})
    return rows


def determinants_json(polys: list[EnergyPolynomial]) -> str:
    return json.dumps([p.to_json_obj() for p in polys], indent=2)
