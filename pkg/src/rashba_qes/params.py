"""Physical and reduced parameters for the Rashba quantum-dot model.

Everything downstream works in units of hbar*omega = 1, where omega is the
effective frequency sqrt(omega0**2 + (omega_c/2)**2).  Values may be plain
floats or exact ``Fraction`` objects; exact inputs stay exact wherever the
arithmetic allows it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, float, Fraction]


class ParameterError(ValueError):
    """Raised when a parameter is outside its physical domain."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def parse_number(value) -> Number:
    """Parse a CLI/JSON number.

    Strings such as ``"8/5"`` or ``"0.3"`` become exact fractions, ints stay
    ints and floats are passed through untouched.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Fraction)):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot parse {value!r} as a rational number") from None
    raise TypeError(f"unsupported number type {type(value).__name__}")


def rationalize(x: Number) -> tuple[Fraction, str | None]:
    """Snap ``x`` to an exact rational.

    Floats go through their shortest decimal repr, so ``0.3`` becomes
    ``3/10`` rather than the binary expansion.  The second item describes
    the snap, or is None when ``x`` was already exact.
    """
    if isinstance(x, (int, Fraction)) or isinstance(x, Rational):
        return Fraction(x), None
    if not math.isfinite(x):
        raise ValueError(f"cannot rationalize non-finite value {x!r}")
    frac = Fraction(repr(float(x)))
    return frac, f"{x!r} -> {frac}"


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def _sqrt(x: Number) -> Number:
    # keep perfect rational squares exact
    if is_exact(x):
        x = Fraction(x)
        if x >= 0:
            rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
            if rn * rn == x.numerator and rd * rd == x.denominator:
                return Fraction(rn, rd)
    return math.sqrt(x)


@dataclass(frozen=True)
class PhysicalParams:
    """Raw inputs in any consistent unit system."""

    effective_mass: Number
    confinement_frequency: Number
    cyclotron_frequency: Number
    g_factor: Number
    bohr_magneton_times_B: Number
    rashba_strength: Number
    hbar: Number

    def __post_init__(self):
        for name in ("effective_mass", "confinement_frequency", "hbar"):
            if not getattr(self, name) > 0:
                raise ParameterError(name, "must be strictly positive")
        if self.cyclotron_frequency < 0:
            raise ParameterError("cyclotron_frequency", "must be non-negative")
        if self.rashba_strength < 0:
            raise ParameterError("rashba_strength", "must be non-negative")

    @property
    def effective_frequency(self) -> Number:
        half_wc = _div(self.cyclotron_frequency, 2)
        return _sqrt(self.confinement_frequency ** 2 + half_wc ** 2)


@dataclass(frozen=True)
class DimensionlessParams:
    """Reduced parameters, energies in units of hbar*omega.

    Attributes
    ----------
    r : frequency ratio omega_c / omega, 0 <= r < 2
    b : Zeeman strength g*mu*B / (2*hbar*omega)
    kappa : Rashba coupling kappa / (hbar*omega), >= 0
    """

    r: Number
    b: Number
    kappa: Number

    def __post_init__(self):
        for name in ("r", "b", "kappa"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float, Fraction)):
                raise ParameterError(name, f"expected a number, got {v!r}")
            if isinstance(v, float) and not math.isfinite(v):
                raise ParameterError(name, "must be finite")
        if not 0 <= self.r < 2:
            raise ParameterError("r", f"must satisfy 0 <= r < 2, got {self.r}")
        if self.kappa < 0:
            raise ParameterError("kappa", "must be non-negative")

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in (self.r, self.b, self.kappa))

    def rationalized(self) -> tuple["DimensionlessParams", list[str]]:
        """Exact copy plus a list of the snaps that were needed."""
        notes = []
        vals = {}
        for name in ("r", "b", "kappa"):
            frac, note = rationalize(getattr(self, name))
            vals[name] = frac
            if note:
                notes.append(f"{name}: {note}")
        return DimensionlessParams(**vals), notes

    def as_floats(self) -> tuple[float, float, float]:
        return float(self.r), float(self.b), float(self.kappa)


def reduce(physical: PhysicalParams) -> DimensionlessParams:
    """Reduce physical inputs to (r, b, kappa) with hbar*omega = 1."""
    omega = physical.effective_frequency
    hbar = physical.hbar
    r = _div(physical.cyclotron_frequency, omega)
    energy = hbar * omega
    b = _div(physical.g_factor * physical.bohr_magneton_times_B, 2 * energy)
    length_inv = _sqrt(_div(physical.effective_mass * omega, hbar))
    kappa = _div(physical.rashba_strength * length_inv, energy)
    return DimensionlessParams(r=r, b=b, kappa=kappa)


def _div(a: Number, b: Number) -> Number:
    if is_exact(a) and is_exact(b):
        return Fraction(a) / Fraction(b)
    return a / b


@dataclass(frozen=True)
class BlockConstants:
    """Per-block diagonal offsets of the QES recurrence (units hbar*omega)."""

    j: int
    eps_j: Number
    eps_b: Number

    @property
    def eps_plus(self) -> Number:
        return self.eps_j + self.eps_b

    @property
    def eps_minus(self) -> Number:
        return self.eps_j - self.eps_b


def block_constants(j: int, p: DimensionlessParams) -> BlockConstants:
    if isinstance(j, bool) or not isinstance(j, int) or j < 0:
        raise ParameterError("j", f"block index must be a non-negative integer, got {j!r}")
    half = Fraction(1, 2) if p.exact else 0.5
    quarter = Fraction(1, 4) if p.exact else 0.25
    eps_j = half - j + (3 + 2 * j) * p.r * quarter
    eps_b = p.r * quarter - p.b + half
    return BlockConstants(j=j, eps_j=eps_j, eps_b=eps_b)


def params_from_json(data: dict) -> DimensionlessParams:
    """Parse ``{"physical": {...}}`` or ``{"dimensionless": {...}}``."""
    groups = [k for k in ("physical", "dimensionless") if k in data]
    if len(groups) != 1:
        raise ParameterError("parameters", "exactly one of 'physical' or 'dimensionless' is required")
    group = groups[0]
    body = data[group]
    if group == "dimensionless":
        fields = ("r", "b", "kappa")
        missing = [f for f in fields if f not in body]
        if missing:
            raise ParameterError(missing[0], "missing from 'dimensionless' group")
        return DimensionlessParams(**{f: _field(body, f) for f in fields})
    fields = ("effective_mass", "confinement_frequency", "cyclotron_frequency", "g_factor",
              "bohr_magneton_times_B", "rashba_strength", "hbar")
    missing = [f for f in fields if f not in body]
    if missing:
        raise ParameterError(missing[0], "missing from 'physical' group")
    return reduce(PhysicalParams(**{f: _field(body, f) for f in fields}))


def _field(body: dict, name: str) -> Number:
    try:
        return parse_number(body[name])
    except (TypeError, ValueError) as exc:
        raise ParameterError(name, str(exc)) from None
