"""The Rashba spin-boson Hamiltonian on the truncated space.

Two independent builders are provided: one from the ladder and Pauli
operators directly, one from the osp(2,2) generators.  Units: hbar*omega = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fock import (DOWN, UP, FockBasis, TruncatedOperator, boson_operators, commutator,
                   identity, interior_projector, osp22_generators, pauli_operators)
from .params import DimensionlessParams


@dataclass(frozen=True)
class HamiltonianPair:
    H_direct: TruncatedOperator
    H_algebraic: TruncatedOperator
    params: DimensionlessParams
    basis: FockBasis

    def interior_difference(self, margin: int = 2) -> float:
        P = interior_projector(self.basis, margin)
        return (P @ (self.H_direct - self.H_algebraic) @ P).max_abs()


def build_direct(basis: FockBasis, r: float, b: float, kappa: float) -> TruncatedOperator:
    a1, a1d, a2, a2d = boson_operators(basis)
    sp, sm, s0 = pauli_operators(basis)
    one = identity(basis)
    n1, n2 = a1d @ a1, a2d @ a2
    coupling = (a2d - a1) @ sp + (a2 - a1d) @ sm
    return (n1 + n2 + one) + (n1 - n2) * (r / 2) - coupling * kappa + s0 * b


def build_algebraic(basis: FockBasis, r: float, b: float, kappa: float) -> TruncatedOperator:
    g = osp22_generators(basis)
    odd = g.V_plus - g.V_minus + g.W_minus - g.W_plus
    # g*mu*B = 2b in reduced units
    return g.J_zero * 2 + g.N * (r / 2) - odd * kappa + (g.N - g.K) * (2 * b)


def build_pair(basis: FockBasis, p: DimensionlessParams) -> HamiltonianPair:
    r, b, kappa = p.as_floats()
    return HamiltonianPair(build_direct(basis, r, b, kappa), build_algebraic(basis, r, b, kappa),
                           p, basis)


def k_value(n1: int, n2: int, s: int) -> Fraction:
    """Eigenvalue of K = N - sigma0/2; sigma0 = -1 on spin up."""
    return Fraction(2 * (n1 - n2) + (1 if s == UP else -1), 2)


@dataclass(frozen=True)
class KSector:
    k_value: Fraction
    member_indices: tuple[int, ...]
    H_block: np.ndarray
    # True where the state sits within `margin` of a truncation cap
    edge: tuple[bool, ...]

    @property
    def dimension(self) -> int:
        return len(self.member_indices)

    def interior_block(self) -> np.ndarray:
        keep = [i for i, e in enumerate(self.edge) if not e]
        return self.H_block[np.ix_(keep, keep)]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.H_block)

    def summary(self, n_lowest: int = 5) -> dict:
        return {"k_value": float(self.k_value), "dimension": self.dimension,
                "lowest_eigenvalues": [float(x) for x in self.eigenvalues()[:n_lowest]]}


def k_sectors(pair: HamiltonianPair, margin: int = 1) -> list[KSector]:
    """Split H_direct into blocks of fixed K using the integer state labels."""
    if margin < 1:
        raise ValueError("margin must be >= 1")
    basis = pair.basis
    lab = basis.labels()
    groups: dict[Fraction, list[int]] = {}
    for i, (n1, n2, s) in enumerate(lab):
        groups.setdefault(k_value(int(n1), int(n2), int(s)), []).append(i)
    H = pair.H_direct.entries
    sectors = []
    for k in sorted(groups):
        idx = groups[k]
        edge = tuple(bool(lab[i, 0] > basis.n1_max - margin or lab[i, 1] > basis.n2_max - margin)
                     for i in idx)
        sectors.append(KSector(k, tuple(idx), H[np.ix_(idx, idx)].copy(), edge))
    return sectors


def off_sector_max(pair: HamiltonianPair) -> float:
    """Largest |H_ab| between states of different K (should be exactly zero)."""
    lab = pair.basis.labels()
    ks = np.array([float(k_value(int(a), int(b), int(s))) for a, b, s in lab])
    mask = ks[:, None] != ks[None, :]
    H = pair.H_direct.entries
    return float(np.max(np.abs(H[mask]))) if mask.any() else 0.0


def k_commutator_residual(pair: HamiltonianPair, margin: int = 2) -> float:
    K = osp22_generators(pair.basis).K
    P = interior_projector(pair.basis, margin)
    return (P @ commutator(K, pair.H_direct) @ P).max_abs()


def decoupled_levels(n_max: int, r: float, b: float) -> np.ndarray:
    """Closed-form kappa = 0 spectrum on the box n1, n2 <= n_max, sorted."""
    n1, n2 = np.meshgrid(np.arange(n_max + 1), np.arange(n_max + 1), indexing="ij")
    base = (n1 + n2 + 1 + 0.5 * r * (n1 - n2)).ravel()
    return np.sort(np.concatenate([base - b, base + b]))


__all__ = ["HamiltonianPair", "KSector", "build_pair", "build_direct", "build_algebraic",
           "k_sectors", "k_value", "off_sector_max", "k_commutator_residual", "decoupled_levels",
           "UP", "DOWN"]
