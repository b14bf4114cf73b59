"""Brute-force reference spectrum and the QES cross-validation harness.

Sector matrices are written down directly from the ladder-operator matrix
elements; this module deliberately does not reuse the Fock-space operator
code.  Sector label L collects spin-up states with n1 - n2 = L and spin-down
states with n1 - n2 = L + 1, i.e. K = L + 1/2.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .params import DimensionlessParams, block_constants
from .qes import QesRoot, build_block, null_spinor, qes_roots, TERMINATION_TOL

SCHEDULE = (10, 20, 40, 80, 160)
NMAX_CAP = 160
MATCH_FLOOR = 1e-6


def sector_states(L: int, nmax: int) -> list[tuple[int, int, int]]:
    """(n1, n2, s) members of sector L inside the box n1, n2 <= nmax."""
    out = []
    for n1 in range(nmax + 1):
        for s, diff in ((0, L), (1, L + 1)):
            n2 = n1 - diff
            if 0 <= n2 <= nmax:
                out.append((n1, n2, s))
    out.sort()
    return out


def sector_matrix(L: int, nmax: int, r: float, b: float, kappa: float) -> np.ndarray:
    states = sector_states(L, nmax)
    pos = {st: i for i, st in enumerate(states)}
    H = np.zeros((len(states), len(states)))
    for i, (n1, n2, s) in enumerate(states):
        H[i, i] = n1 + n2 + 1 + 0.5 * r * (n1 - n2) + (-b if s == 0 else b)
        if s == 1:
            # -kappa a2+ sigma+ and +kappa a1 sigma+ take this down state to spin up
            for target, amp in (((n1, n2 + 1, 0), -kappa * math.sqrt(n2 + 1)),
                                ((n1 - 1, n2, 0), kappa * math.sqrt(n1))):
                t = pos.get(target)
                if t is not None:
                    H[t, i] += amp
                    H[i, t] += amp
    return H


def sector_labels(nmax: int) -> range:
    return range(-nmax - 1, nmax + 1)


def full_spectrum(nmax: int, r: float, b: float, kappa: float) -> np.ndarray:
    """All eigenvalues at truncation nmax, as the union over sectors."""
    ev = [np.linalg.eigvalsh(sector_matrix(L, nmax, r, b, kappa)) for L in sector_labels(nmax)]
    return np.sort(np.concatenate(ev))


def sector_lower_bound(L: int, r: float, b: float, kappa: float, n_scan: int = NMAX_CAP) -> float:
    """Gershgorin bound on the untruncated sector using full row sums."""
    best = math.inf
    for n1 in range(n_scan + 1):
        for s, diff in ((0, L), (1, L + 1)):
            n2 = n1 - diff
            if n2 < 0:
                continue
            diag = n1 + n2 + 1 + 0.5 * r * (n1 - n2) + (-b if s == 0 else b)
            if s == 0:
                off = math.sqrt(n2) + math.sqrt(n1 + 1)
            else:
                off = math.sqrt(n2 + 1) + math.sqrt(n1)
            best = min(best, diag - abs(kappa) * off)
    return best


def sectors_below(e_max: float, r: float, b: float, kappa: float, limit: int = NMAX_CAP) -> list[int]:
    out = []
    for L in range(-limit - 1, limit + 1):
        if sector_lower_bound(L, r, b, kappa) <= e_max:
            out.append(L)
    return out


@dataclass
class SectorSpectrum:
    label: int
    eigenvalues: list[float]
    convergence: list[float]
    converged: list[bool]
    nmax: int

    @property
    def k_value(self) -> float:
        return self.label + 0.5


@dataclass
class ConvergedSpectrum:
    r: float
    b: float
    kappa: float
    sectors: list[SectorSpectrum]
    truncations: list[int]
    rel_tol: float
    e_max: float | None = None

    @property
    def converged(self) -> bool:
        return all(all(s.converged) for s in self.sectors)

    def levels(self) -> list[tuple[float, float, float, bool]]:
        """(energy, k_value, convergence, converged) over all sectors, sorted."""
        out = [(e, s.k_value, c, ok) for s in self.sectors
               for e, c, ok in zip(s.eigenvalues, s.convergence, s.converged)]
        out.sort()
        return out

    @property
    def covered_up_to(self) -> float:
        if self.e_max is not None:
            return self.e_max
        tops = [s.eigenvalues[-1] for s in self.sectors if s.eigenvalues]
        return min(tops) if tops else -math.inf

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k_value", "level", "energy", "convergence", "converged", "nmax"])
        for s in self.sectors:
            for i, (e, c, ok) in enumerate(zip(s.eigenvalues, s.convergence, s.converged)):
                w.writerow([_fmt(s.k_value), i, _fmt(e), _fmt(c), str(ok).lower(), s.nmax])
        return buf.getvalue()


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def converged_spectrum(p: DimensionlessParams, levels: int = 10, rel_tol: float = 1e-8,
                       k_window: int = 5, e_max: float | None = None,
                       schedule=SCHEDULE, kappa_sign: int = 1) -> ConvergedSpectrum:
    """Diagonalize sector blocks over a doubling truncation schedule.

    Each retained sector tracks its lowest ``levels`` eigenvalues, plus every
    eigenvalue up to ``e_max`` (and one beyond) when ``e_max`` is given.  A
    level is converged when it moves by less than rel_tol * max(|E|, 1)
    between successive truncations; levels still moving at the last
    truncation are marked non-converged.

    Retained sectors: |K| <= k_window, or, with ``e_max``, every sector whose
    Gershgorin lower bound lies below ``e_max``.
    """
    if levels < 1 or rel_tol <= 0:
        raise ValueError("levels must be >= 1 and rel_tol > 0")
    r, b, kappa = p.as_floats()
    kappa *= kappa_sign
    if e_max is None:
        labels = list(range(-k_window, k_window))
    else:
        labels = sectors_below(e_max, r, b, kappa, limit=max(schedule))
    prev: dict[int, np.ndarray] = {}
    result: dict[int, SectorSpectrum] = {}
    used = []
    for nmax in schedule:
        used.append(nmax)
        pending = [L for L in labels if L not in result or not all(result[L].converged)]
        if not pending:
            break
        for L in pending:
            ev = np.linalg.eigvalsh(sector_matrix(L, nmax, r, b, kappa)) if sector_states(L, nmax) \
                else np.array([])
            n_track = levels
            if e_max is not None:
                n_track = max(n_track, int(np.sum(ev <= e_max)) + 1)
            n_track = min(n_track, len(ev))
            cur = ev[:n_track]
            old = prev.get(L)
            conv, ok = [], []
            for i, e in enumerate(cur):
                if old is not None and i < len(old):
                    d = abs(e - old[i])
                    conv.append(float(d))
                    ok.append(bool(d < rel_tol * max(abs(e), 1.0)))
                else:
                    conv.append(math.inf)
                    ok.append(False)
            # a sector that cannot yet hold the requested levels is not converged
            if n_track < levels:
                ok = [False] * len(ok)
            result[L] = SectorSpectrum(L, [float(x) for x in cur], conv, ok, nmax)
            prev[L] = ev
    sectors = [result[L] for L in labels if L in result]
    return ConvergedSpectrum(r, b, kappa, sectors, used, rel_tol, e_max)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationEntry:
    j: int
    root: complex
    nearest_level: float | None
    nearest_k: float | None
    gap: float | None
    level_convergence: float | None
    level_converged: bool
    consistency_residual: float
    verdict: str
    out_of_range: bool = False

    @property
    def is_real(self) -> bool:
        return abs(self.root.imag) < 1e-10

    @property
    def series_terminating(self) -> bool:
        return self.consistency_residual < TERMINATION_TOL

    def to_dict(self) -> dict:
        return {"j": self.j, "root_re": self.root.real, "root_im": self.root.imag,
                "nearest_level": self.nearest_level, "nearest_k": self.nearest_k, "gap": self.gap,
                "level_convergence": self.level_convergence,
                "level_converged": self.level_converged,
                "consistency_residual": self.consistency_residual,
                "series_terminating": self.series_terminating, "verdict": self.verdict,
                "out_of_range": self.out_of_range}


@dataclass
class ValidationReport:
    r: float
    b: float
    kappa: float
    entries: list[ValidationEntry] = field(default_factory=list)

    def summary(self) -> dict:
        real = [e for e in self.entries if e.is_real]
        tab: dict[str, int] = {}
        for e in real:
            key = f"{e.verdict}/{'terminating' if e.series_terminating else 'non-terminating'}"
            tab[key] = tab.get(key, 0) + 1
        return {
            "roots": len(self.entries),
            "real_roots": len(real),
            "confirmed": sum(e.verdict == "confirmed" for e in real),
            "unconfirmed": sum(e.verdict == "unconfirmed" for e in real),
            "out_of_range": sum(e.out_of_range for e in self.entries),
            "crosstab": dict(sorted(tab.items())),
        }

    def to_json(self) -> str:
        return json.dumps({"parameters": {"r": self.r, "b": self.b, "kappa": self.kappa},
                           "entries": [e.to_dict() for e in self.entries],
                           "summary": self.summary()}, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "root_re", "root_im", "nearest_level", "gap", "consistency_residual",
                    "verdict"])
        for e in self.entries:
            w.writerow([e.j, _fmt(e.root.real), _fmt(e.root.imag), _fmt(e.nearest_level),
                        _fmt(e.gap), _fmt(e.consistency_residual), e.verdict])
        return buf.getvalue()


def block_roots(p: DimensionlessParams, j: int):
    block = build_block(j, block_constants(j, p), p.kappa)
    return block, qes_roots(block)


def validate(p: DimensionlessParams, j_max: int, spectrum: ConvergedSpectrum,
             roots: dict[int, tuple] | None = None) -> ValidationReport:
    """Match every QES root for j <= j_max against the reference levels."""
    levels = spectrum.levels()
    energies = np.array([lv[0] for lv in levels])
    report = ValidationReport(spectrum.r, spectrum.b, spectrum.kappa)
    top = spectrum.covered_up_to
    for j in range(j_max + 1):
        block, rts = roots[j] if roots and j in roots else block_roots(p, j)
        for q in rts:
            report.entries.append(_match(j, block, q, energies, levels, top))
    return report


def _match(j, block, q: QesRoot, energies, levels, top) -> ValidationEntry:
    resid = min(n.consistency_residual for n in null_spinor(block, q.root))
    if q.root.real > top or not len(energies):
        return ValidationEntry(j, q.root, None, None, None, None, False, resid, "unconfirmed",
                               out_of_range=True)
    i = int(np.argmin(np.abs(energies - q.root)))
    e, k, conv, ok = levels[i]
    gap = float(abs(q.root - e))
    # a level never compared across truncations carries no usable estimate
    confirmed = q.is_real and math.isfinite(conv) and gap < max(MATCH_FLOOR, 10 * conv)
    return ValidationEntry(j, q.root, e, k, gap, conv, ok, resid,
                           "confirmed" if confirmed else "unconfirmed")
