"""Command-line entry point: ``rashba-qes {spectrum,verify,sweep}``.

Exit codes: 0 ok, 1 verification mismatch, 2 configuration error,
3 reference spectrum not converged.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import scipy

from . import __version__
from .fock import FockBasis, osp22_generators, verify_relations
from .hamiltonian import build_pair
from .oracle import NMAX_CAP, SCHEDULE, converged_spectrum, validate
from .params import (DimensionlessParams, ParameterError, block_constants, parse_number,
                     params_from_json)
from .qes import (build_block, compare_with_paper, det_polynomial, determinants_json,
                  generator_equivalent, qes_roots, roots_csv_rows, transcription_errata)

log = logging.getLogger("rashba_qes")

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_NOT_CONVERGED = 0, 1, 2, 3
DEFAULT_VERIFY_PARAMS = ("1/2", "1/4", "3/10")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    params: DimensionlessParams
    source: dict
    rationalizations: list = field(default_factory=list)
    jmax: int = 2
    nmax_cap: int = NMAX_CAP
    tol: float = 1e-8
    levels: int = 10
    out: Path = Path("out")
    workers: int = 1
    sweep: tuple | None = None

    def manifest(self, command: str) -> dict:
        return {
            "command": command,
            "parameters": {k: str(v) for k, v in vars(self.params).items()},
            "parameter_source": self.source,
            "rationalizations": self.rationalizations,
            "jmax": self.jmax,
            "nmax_cap": self.nmax_cap,
            "tol": self.tol,
            "levels": self.levels,
            "workers": self.workers,
            "sweep": None if self.sweep is None else
            {"axis": self.sweep[0], "start": str(self.sweep[1]), "end": str(self.sweep[2]),
             "points": self.sweep[3]},
            "versions": {"rashba_qes": __version__, "python": platform.python_version(),
                         "numpy": np.__version__, "scipy": scipy.__version__,
                         "mpmath": mpmath.__version__},
        }


def _cli_number(name: str, text: str):
    try:
        value = parse_number(text)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"--{name}: {exc}") from None
    note = None
    if any(ch in text for ch in ".eE"):
        note = f"{name}: {text} -> {value}"
    return value, note


def parse_sweep(text: str):
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError("--sweep: expected axis:start:end:points")
    axis, start, end, points = parts
    if axis not in ("kappa", "r", "b"):
        raise ConfigError(f"--sweep: axis must be kappa, r or b, got {axis!r}")
    try:
        start_v, end_v = Fraction(start), Fraction(end)
        n = int(points)
    except (ValueError, ZeroDivisionError):
        raise ConfigError("--sweep: start/end must be rational and points an integer") from None
    if n < 1:
        raise ConfigError("--sweep: points must be positive")
    return axis, start_v, end_v, n


def config_from_args(args, require_params: bool = True) -> RunConfig:
    notes = []
    given = {k: getattr(args, k) for k in ("r", "b", "kappa") if getattr(args, k) is not None}
    if args.physical and given:
        raise ConfigError("give either --physical or --r/--b/--kappa, not both")
    if args.physical:
        try:
            data = json.loads(Path(args.physical).read_text())
            params = params_from_json(data)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"--physical: {exc}") from None
        except ParameterError as exc:
            raise ConfigError(f"--physical: {exc}") from None
        source = {"physical_file": str(args.physical)}
        params, snaps = params.rationalized()
        notes += snaps
    else:
        if not given and not require_params:
            given = dict(zip(("r", "b", "kappa"), DEFAULT_VERIFY_PARAMS))
        missing = [k for k in ("r", "b", "kappa") if k not in given]
        if missing:
            raise ConfigError("missing parameter(s): " + ", ".join(f"--{m}" for m in missing)
                              + " (or --physical FILE)")
        values = {}
        for k, text in given.items():
            values[k], note = _cli_number(k, str(text))
            if note:
                notes.append(note)
        try:
            params = DimensionlessParams(**values)
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None
        source = {"dimensionless": {k: str(v) for k, v in given.items()}}
    jmax = getattr(args, "jmax", 2)
    if jmax < 0:
        raise ConfigError("--jmax must be non-negative")
    cap = getattr(args, "nmax_cap", NMAX_CAP)
    if cap < SCHEDULE[0]:
        raise ConfigError(f"--nmax-cap must be at least {SCHEDULE[0]}")
    tol = getattr(args, "tol", 1e-8)
    if tol <= 0:
        raise ConfigError("--tol must be positive")
    workers = getattr(args, "workers", 1)
    if workers < 1:
        raise ConfigError("--workers must be >= 1")
    sweep = parse_sweep(args.sweep) if getattr(args, "sweep", None) else None
    return RunConfig(params=params, source=source, rationalizations=notes, jmax=jmax,
                     nmax_cap=cap, tol=tol, levels=getattr(args, "levels", 10),
                     out=Path(args.out), workers=workers, sweep=sweep)


def _schedule(cap: int) -> tuple:
    return tuple(n for n in SCHEDULE if n <= cap) or (cap,)


def _write(path: Path, text: str):
    path.write_text(text, encoding="utf-8")


def _csv(header: list, rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _f(x) -> str:
    return "" if x is None else repr(float(x))


# ---------------------------------------------------------------------------
# spectrum


def solve_point(p: DimensionlessParams, jmax: int, tol: float, levels: int, schedule):
    """QES roots for j <= jmax, the reference spectrum and their validation."""
    blocks = {}
    for j in range(jmax + 1):
        block = build_block(j, block_constants(j, p), p.kappa)
        blocks[j] = (block, qes_roots(block))
    real = [q.root.real for _, rts in blocks.values() for q in rts if q.is_real]
    e_max = max(real, default=0.0) + 1.0
    spectrum = converged_spectrum(p, levels=levels, rel_tol=tol, e_max=e_max, schedule=schedule)
    report = validate(p, jmax, spectrum, roots=blocks)
    return blocks, spectrum, report


def cmd_spectrum(cfg: RunConfig) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    p = cfg.params
    blocks, spectrum, report = solve_point(p, cfg.jmax, cfg.tol, cfg.levels, _schedule(cfg.nmax_cap))
    rows = []
    for j, (block, rts) in blocks.items():
        for row in roots_csv_rows(block, rts):
            rows.append([row["j"], _f(row["re"]), _f(row["im"]), _f(row["residual"]),
                         str(row["series_terminating"]).lower()])
    _write(cfg.out / "roots.csv", _csv(["j", "re", "im", "residual", "series_terminating"], rows))
    _write(cfg.out / "spectrum.csv", spectrum.to_csv())
    _write(cfg.out / "validation.csv", report.to_csv())
    _write(cfg.out / "validation.json", report.to_json() + "\n")
    _write(cfg.out / "determinants.json",
           determinants_json([det_polynomial(b) for b, _ in blocks.values()]) + "\n")
    manifest = cfg.manifest("spectrum")
    manifest["block_rationalizations"] = sorted({n for b, _ in blocks.values()
                                                 for n in b.rationalizations})
    manifest["reference_converged"] = spectrum.converged
    manifest["truncations"] = spectrum.truncations
    _write(cfg.out / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    if not spectrum.converged:
        log.error("reference spectrum did not converge by nmax=%d", spectrum.truncations[-1])
        return EXIT_NOT_CONVERGED
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def run_verification(p: DimensionlessParams, nmax: int = 8, margin: int = 2,
                     relation_tol: float = 1e-12, hamiltonian_tol: float = 1e-13) -> dict:
    """All algebraic and determinant checks, as one JSON-ready report."""
    basis = FockBasis(nmax, nmax)
    relations = verify_relations(osp22_generators(basis), margin=margin, tol=relation_tol)
    pair = build_pair(basis, p)
    h_diff = pair.interior_difference(margin)
    generator = []
    for j in range(4):
        ok = generator_equivalent(j, block_constants(j, p), p.kappa)
        generator.append({"j": j, "verdict": "match" if ok else "mismatch"})
    determinants = [compare_with_paper(j, block_constants(j, p), p.kappa).to_json_obj()
                    for j in range(3)]
    checks = ([r.verdict for r in relations.results]
              + ["match" if h_diff < hamiltonian_tol else "mismatch"]
              + [g["verdict"] for g in generator] + [d["verdict"] for d in determinants])
    return {
        "parameters": {k: str(v) for k, v in vars(p).items()},
        "relations": {"n_max": nmax, "margin": margin,
                      "results": [r.to_dict() for r in relations.results]},
        "hamiltonian_double_build": {"max_interior_difference": h_diff,
                                     "tolerance": hamiltonian_tol,
                                     "verdict": "match" if h_diff < hamiltonian_tol else "mismatch"},
        "generator_equivalence": generator,
        "determinants": determinants,
        "errata": transcription_errata(),
        "hard_mismatch": "mismatch" in checks,
    }


def cmd_verify(cfg: RunConfig, nmax: int = 8) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    report = run_verification(cfg.params, nmax=nmax)
    _write(cfg.out / "verification.json", json.dumps(report, indent=2) + "\n")
    _write(cfg.out / "manifest.json", json.dumps(cfg.manifest("verify"), indent=2) + "\n")
    for r in report["relations"]["results"]:
        if r["verdict"] != "match":
            log.warning("relation %s: %s (residual %.3g)", r["relation_name"], r["verdict"],
                        r["residual"])
    for d in report["determinants"]:
        if d["verdict"] != "match":
            log.warning("D_%d: %s %s", d["j"], d["verdict"], d["suspect_term"] or "")
    return EXIT_MISMATCH if report["hard_mismatch"] else EXIT_OK


# ---------------------------------------------------------------------------
# sweep

SWEEP_HEADER = ["point", "axis_value", "r", "b", "kappa", "j", "root_re", "root_im", "residual",
                "nearest_level", "gap", "consistency_residual", "verdict", "error"]


def sweep_values(start: Fraction, end: Fraction, points: int) -> list[Fraction]:
    if points == 1:
        return [start]
    return [start + (end - start) * i / (points - 1) for i in range(points)]


def _sweep_point(task):
    index, axis, value, base, jmax, tol, levels, schedule = task
    vals = dict(base)
    vals[axis] = value
    n_rows = sum(2 * (j + 1) for j in range(jmax + 1))
    label = [str(vals[k]) for k in ("r", "b", "kappa")]
    try:
        p = DimensionlessParams(**vals)
        blocks, spectrum, report = solve_point(p, jmax, tol, levels, schedule)
    except Exception as exc:  # recorded in-row, the sweep carries on
        return [[index, str(value), *label, "", "", "", "", "", "", "", "", f"{type(exc).__name__}: {exc}"]
                for _ in range(n_rows)]
    residuals = {(j, q.root): q.residual for j, (_, rts) in blocks.items() for q in rts}
    rows = []
    for e in report.entries:
        rows.append([index, str(value), *label, e.j, _f(e.root.real), _f(e.root.imag),
                     _f(residuals[(e.j, e.root)]), _f(e.nearest_level), _f(e.gap),
                     _f(e.consistency_residual), e.verdict,
                     "" if spectrum.converged else "reference not converged"])
    return rows


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.sweep is None:
        raise ConfigError("sweep requires --sweep axis:start:end:points")
    cfg.out.mkdir(parents=True, exist_ok=True)
    axis, start, end, points = cfg.sweep
    base = {k: getattr(cfg.params, k) for k in ("r", "b", "kappa")}
    tasks = [(i, axis, v, base, cfg.jmax, cfg.tol, cfg.levels, _schedule(cfg.nmax_cap))
             for i, v in enumerate(sweep_values(start, end, points))]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]
    rows = [row for chunk in results for row in chunk]
    _write(cfg.out / "sweep.csv", _csv(SWEEP_HEADER, rows))
    _write(cfg.out / "manifest.json", json.dumps(cfg.manifest("sweep"), indent=2) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rashba-qes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--r", help="omega_c / omega (rational strings like 1/2 accepted)")
        sp.add_argument("--b", help="Zeeman strength g mu B / (2 hbar omega)")
        sp.add_argument("--kappa", help="Rashba coupling in units of hbar omega")
        sp.add_argument("--physical", metavar="FILE", help="JSON parameter file")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("-v", "--verbose", action="store_true")

    for name in ("spectrum", "sweep"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--jmax", type=int, default=2)
        sp.add_argument("--nmax-cap", type=int, default=NMAX_CAP)
        sp.add_argument("--tol", type=float, default=1e-8, help="relative convergence tolerance")
        sp.add_argument("--levels", type=int, default=10, help="levels tracked per sector")
        if name == "sweep":
            sp.add_argument("--sweep", required=True, help="axis:start:end:points")
            sp.add_argument("--workers", type=int, default=1)
    sp = sub.add_parser("verify")
    common(sp)
    sp.add_argument("--nmax", type=int, default=8, help="Fock truncation for the algebra checks")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(args, require_params=args.command != "verify")
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, nmax=args.nmax)
        return cmd_sweep(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
