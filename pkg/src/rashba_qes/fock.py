"""Truncated two-mode Fock space times spin-1/2, and the osp(2,2) generators.

Basis states are enumerated as (n1, n2, s) with n1 slowest and the spin
label last (s = 0 is spin up, s = 1 is spin down).  All operators are dense
complex matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

UP, DOWN = 0, 1


class BasisMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class FockBasis:
    n1_max: int
    n2_max: int

    def __post_init__(self):
        for name in ("n1_max", "n2_max"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def dim(self) -> int:
        return (self.n1_max + 1) * (self.n2_max + 1) * 2

    def index(self, n1: int, n2: int, s: int) -> int:
        if not (0 <= n1 <= self.n1_max and 0 <= n2 <= self.n2_max and s in (UP, DOWN)):
            raise IndexError(f"state ({n1}, {n2}, {s}) outside the truncated basis")
        return (n1 * (self.n2_max + 1) + n2) * 2 + s

    def state(self, i: int) -> tuple[int, int, int]:
        if not 0 <= i < self.dim:
            raise IndexError(i)
        rest, s = divmod(i, 2)
        n1, n2 = divmod(rest, self.n2_max + 1)
        return n1, n2, s

    def labels(self) -> np.ndarray:
        """(dim, 3) integer array of (n1, n2, s) per index."""
        n1, n2, s = np.meshgrid(np.arange(self.n1_max + 1), np.arange(self.n2_max + 1),
                                np.arange(2), indexing="ij")
        return np.stack([n1.ravel(), n2.ravel(), s.ravel()], axis=1)

    def ket(self, n1: int, n2: int, s: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(n1, n2, s)] = 1.0
        return v


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    basis: FockBasis
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"matrix shape {m.shape} does not match basis dimension {self.basis.dim}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def _check(self, other: "TruncatedOperator"):
        if not isinstance(other, TruncatedOperator):
            return NotImplemented
        if other.basis != self.basis:
            raise BasisMismatchError(f"{self.basis} vs {other.basis}")
        return None

    def __matmul__(self, other):
        if isinstance(other, np.ndarray):
            return self.entries @ other
        if self._check(other) is NotImplemented:
            return NotImplemented
        return TruncatedOperator(self.basis, self.entries @ other.entries)

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return TruncatedOperator(self.basis, self.entries + other.entries)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return TruncatedOperator(self.basis, self.entries - other.entries)

    def __neg__(self):
        return TruncatedOperator(self.basis, -self.entries)

    def __mul__(self, c):
        if isinstance(c, TruncatedOperator):
            return NotImplemented
        return TruncatedOperator(self.basis, complex(c) * self.entries)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return TruncatedOperator(self.basis, self.entries / complex(c))

    @property
    def dag(self) -> "TruncatedOperator":
        return TruncatedOperator(self.basis, self.entries.conj().T)

    def element(self, bra: tuple[int, int, int], ket: tuple[int, int, int]) -> complex:
        return complex(self.entries[self.basis.index(*bra), self.basis.index(*ket)])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries))) if self.entries.size else 0.0


def identity(basis: FockBasis) -> TruncatedOperator:
    return TruncatedOperator(basis, np.eye(basis.dim))


def _ladder(n_max: int) -> np.ndarray:
    """Annihilation operator on {0..n_max}: <n-1|a|n> = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)


def _embed(basis: FockBasis, mode1=None, mode2=None, spin=None) -> TruncatedOperator:
    m1 = np.eye(basis.n1_max + 1) if mode1 is None else mode1
    m2 = np.eye(basis.n2_max + 1) if mode2 is None else mode2
    sp = np.eye(2) if spin is None else spin
    return TruncatedOperator(basis, np.kron(np.kron(m1, m2), sp))


def boson_operators(basis: FockBasis):
    """Return (a1, a1+, a2, a2+) acting on the full truncated space."""
    a1 = _embed(basis, mode1=_ladder(basis.n1_max))
    a2 = _embed(basis, mode2=_ladder(basis.n2_max))
    return a1, a1.dag, a2, a2.dag


SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_ZERO = np.array([[-1, 0], [0, 1]], dtype=complex)


def pauli_operators(basis: FockBasis):
    """Return (sigma+, sigma-, sigma0) with sigma0 = diag(-1, 1) on (up, down)."""
    return tuple(_embed(basis, spin=m) for m in (SIGMA_PLUS, SIGMA_MINUS, SIGMA_ZERO))


def commutator(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    return a @ b - b @ a


def anticommutator(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    return a @ b + b @ a


def interior_projector(basis: FockBasis, margin: int) -> TruncatedOperator:
    """Projector onto states at least ``margin`` quanta below both truncation caps."""
    if margin < 0 or margin > min(basis.n1_max, basis.n2_max):
        raise ValueError(f"margin {margin} must lie in [0, {min(basis.n1_max, basis.n2_max)}]")
    lab = basis.labels()
    keep = (lab[:, 0] <= basis.n1_max - margin) & (lab[:, 1] <= basis.n2_max - margin)
    return TruncatedOperator(basis, np.diag(keep.astype(float)))


@dataclass(frozen=True)
class Osp22Set:
    J_plus: TruncatedOperator
    J_minus: TruncatedOperator
    J_zero: TruncatedOperator
    N: TruncatedOperator
    V_plus: TruncatedOperator
    V_minus: TruncatedOperator
    W_plus: TruncatedOperator
    W_minus: TruncatedOperator
    J_total: TruncatedOperator
    K: TruncatedOperator

    @property
    def basis(self) -> FockBasis:
        return self.K.basis


def osp22_generators(basis: FockBasis) -> Osp22Set:
    a1, a1d, a2, a2d = boson_operators(basis)
    sp, sm, s0 = pauli_operators(basis)
    one = identity(basis)
    N = a1d @ a1 - a2d @ a2
    return Osp22Set(
        J_plus=a1d @ a2d,
        J_minus=a2 @ a1,
        J_zero=(a1d @ a1 + a2d @ a2 + one) * 0.5,
        N=N,
        V_plus=sp @ a2d,
        V_minus=sp @ a1,
        W_plus=sm @ a1d,
        W_minus=sm @ a2,
        J_total=(N - s0) * 0.5,
        K=N - s0 * 0.5,
    )


@dataclass(frozen=True)
class RelationResult:
    relation_name: str
    residual: float
    tolerance: float
    passed: bool
    # residual of the same relation with the right-hand side negated; a
    # failure that vanishes under negation is a sign misprint, not an
    # algebra failure
    flipped_residual: float | None = None

    @property
    def verdict(self) -> str:
        if self.passed:
            return "match"
        if self.flipped_residual is not None and self.flipped_residual < self.tolerance:
            return "typo-suspected"
        return "mismatch"

    def to_dict(self) -> dict:
        return {"relation_name": self.relation_name, "residual": self.residual,
                "tolerance": self.tolerance, "pass": self.passed,
                "flipped_residual": self.flipped_residual, "verdict": self.verdict}


@dataclass(frozen=True)
class RelationReport:
    results: list[RelationResult]
    margin: int
    n1_max: int
    n2_max: int

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def max_residual(self) -> float:
        return max(r.residual for r in self.results)

    def failures(self) -> list[RelationResult]:
        return [r for r in self.results if not r.passed]

    def to_json(self) -> str:
        return json.dumps([r.to_dict() for r in self.results], indent=2)


def relation_table(g: Osp22Set):
    """(name, lhs, rhs) for every printed relation, one entry per sign choice."""
    zero = g.K * 0
    C, A = commutator, anticommutator
    Jp, Jm, J0, J = g.J_plus, g.J_minus, g.J_zero, g.J_total
    Vp, Vm, Wp, Wm = g.V_plus, g.V_minus, g.W_plus, g.W_minus
    rows = [
        ("[J+,J-] = -2J0", C(Jp, Jm), J0 * -2),
        ("[J0,J+] = +J+", C(J0, Jp), Jp),
        ("[J0,J-] = -J-", C(J0, Jm), -Jm),
        ("[J,J+] = 0", C(J, Jp), zero),
        ("[J,J-] = 0", C(J, Jm), zero),
        ("[J,J0] = 0", C(J, J0), zero),
        ("[J0,V+] = +V+/2", C(J0, Vp), Vp * 0.5),
        ("[J0,V-] = -V-/2", C(J0, Vm), Vm * -0.5),
        ("[J0,W+] = +W+/2", C(J0, Wp), Wp * 0.5),
        ("[J0,W-] = -W-/2", C(J0, Wm), Wm * -0.5),
        ("[J+,V-] = V+", C(Jp, Vm), Vp),
        ("[J-,V+] = V-", C(Jm, Vp), Vm),
        ("[J+,W-] = W+", C(Jp, Wm), Wp),
        ("[J-,W+] = W-", C(Jm, Wp), Wm),
        ("[J,W+] = -W+/2", C(J, Wp), Wp * -0.5),
        ("[J,W-] = -W-/2", C(J, Wm), Wm * -0.5),
        ("[J,V+] = +V+/2", C(J, Vp), Vp * 0.5),
        ("[J,V-] = +V-/2", C(J, Vm), Vm * 0.5),
        ("[J+,V+] = 0", C(Jp, Vp), zero),
        ("[J-,V-] = 0", C(Jm, Vm), zero),
        ("[J+,W+] = 0", C(Jp, Wp), zero),
        ("[J-,W-] = 0", C(Jm, Wm), zero),
        ("{V+,W+} = J+", A(Vp, Wp), Jp),
        ("{V-,W-} = J-", A(Vm, Wm), Jm),
        ("{V+,W-} = +J0 - J", A(Vp, Wm), J0 - J),
        ("{V-,W+} = -J0 - J", A(Vm, Wp), -J0 - J),
        ("{V+,V+} = 0", A(Vp, Vp), zero),
        ("{V-,V-} = 0", A(Vm, Vm), zero),
        ("{V+,V-} = 0", A(Vp, Vm), zero),
        ("{W+,W+} = 0", A(Wp, Wp), zero),
        ("{W-,W-} = 0", A(Wm, Wm), zero),
        ("{W+,W-} = 0", A(Wp, Wm), zero),
    ]
    for name in ("J_plus", "J_minus", "J_zero", "V_plus", "V_minus", "W_plus", "W_minus"):
        rows.append((f"[K,{name}] = 0", C(g.K, getattr(g, name)), zero))
    return rows


def verify_relations(g: Osp22Set, margin: int = 2, tol: float = 1e-12) -> RelationReport:
    """Evaluate every relation on the interior of the truncated space.

    Residuals are max-norm of (lhs - rhs) P, with P the interior projector.
    Relations are tested exactly as printed; nothing is corrected.
    """
    if margin < 2:
        raise ValueError("margin must be >= 2 for bilinear ladder relations")
    P = interior_projector(g.basis, margin)
    results = []
    for name, lhs, rhs in relation_table(g):
        res = ((lhs - rhs) @ P).max_abs()
        flipped = None
        if res >= tol and rhs.max_abs() > 0:
            flipped = ((lhs + rhs) @ P).max_abs()
        results.append(RelationResult(name, res, tol, res < tol, flipped))
    return RelationReport(results, margin, g.basis.n1_max, g.basis.n2_max)
