"""Command-line sweeps: ``oscfield early|late|twin|validate``.

Tables are written as CSV (``#`` metadata lines, a header row, 12
significant digits) or JSON.  Identical inputs give identical bytes.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 validation
failure.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import __version__, early, late, twin, validate
from .core import DomainError, SystemParams, linear_entropy
from .quad import QuadratureError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3

DEFAULTS = {
    "gamma": 0.02, "omega_r": 5.0, "mass": 1.0, "L": 2.0, "cutoff": None,
    "format": "csv", "out": None, "convention": "reduced",
}
RANGE_DEFAULTS = {
    "early": {"L_range": "0.05:4:60", "t_range": "0:10:60"},
    "late": {"L_range": "0.5:100:40:log"},
    "twin": {"L_range": "5:50:9:log"},
}
CONFIG_KEYS = {"gamma", "omega_r", "mass", "cutoff", "L", "L_range", "t_range", "gamma_range",
               "format", "out", "convention"}
FLOAT_KEYS = {"gamma", "omega_r", "mass", "cutoff", "L"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class SweepTable:
    columns: List[str]
    rows: List[List[float]]
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}={v}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(f"{float(x):.11e}" for x in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"metadata": self.metadata, "columns": self.columns,
               "rows": [[float(x) for x in row] for row in self.rows]}
        return json.dumps(doc, indent=1) + "\n"


def parse_range(text: str, name: str = "range") -> np.ndarray:
    """``a:b:n`` (linear) or ``a:b:n:log``."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
        raise UsageError(f"{name} must look like a:b:n or a:b:n:log, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"{name}: cannot parse {text!r}") from None
    if n < 1 or (n == 1 and a != b):
        raise UsageError(f"{name}: need at least 2 points (or a single point with a == b)")
    if n >= 2 and not b > a:
        raise UsageError(f"{name}: need a < b, got {text!r}")
    if len(parts) == 4 and parts[3] == "log":
        if a <= 0:
            raise UsageError(f"{name}: log ranges need a > 0")
        return np.geomspace(a, b, n)
    return np.linspace(a, b, n)


def read_config(path: str) -> dict:
    cfg = {}
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        cfg[key] = value
    return cfg


def _settings(args) -> dict:
    """Merge built-in defaults, config file and flags (flags win)."""
    s = dict(DEFAULTS)
    s.update(RANGE_DEFAULTS.get(args.command, {}))
    if args.config:
        s.update(read_config(args.config))
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            s[key] = v
    for key in FLOAT_KEYS:
        if s.get(key) is not None and not isinstance(s[key], float):
            try:
                s[key] = float(s[key])
            except ValueError:
                raise UsageError(f"{key} must be a number, got {s[key]!r}") from None
    if s["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {s['format']!r}")
    return s


def _params(s: dict, **over) -> SystemParams:
    kw = dict(mass=s["mass"], omega_r=s["omega_r"], gamma=s["gamma"], distance=s["L"],
              cutoff=s["cutoff"])
    kw.update(over)
    try:
        return SystemParams(**kw)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _metadata(command: str, p: SystemParams, **extra) -> dict:
    md = {"program": f"oscfield {__version__}", "command": command}
    md.update({k: repr(v) for k, v in p.as_dict().items()})
    md.update({k: repr(v) if not isinstance(v, str) else v for k, v in extra.items()})
    return md


def run_early_grid(s: dict) -> SweepTable:
    p = _params(s)
    L = parse_range(s["L_range"], "--L-range")
    t = parse_range(s["t_range"], "--t-range")
    if np.any(L <= 0):
        raise UsageError("--L-range must be positive")
    if np.any(t < 0):
        raise UsageError("--t-range must be non-negative")
    rel_tol = 1e-8
    g = early.early_grid(L, t, p, s["convention"], rel_tol=rel_tol)
    rows = []
    for i, Lv in enumerate(L):
        for j, tv in enumerate(t):
            rows.append([Lv, tv, g["S_L"][i, j], g["purity"][i, j], g["vqq"][i, j],
                         g["vpp"][i, j], g["vqp"][i, j]])
    md = _metadata("early", p, L_range=s["L_range"], t_range=s["t_range"],
                   convention=s["convention"], rel_tol=rel_tol,
                   early_cutoff=p.resolved_cutoff(early.EARLY_CUTOFF_FACTOR))
    return SweepTable(["L", "t", "S_L", "purity", "vqq", "vpp", "vqp"], rows, md)


def _late_row(p: SystemParams, s_free: float):
    half = linear_entropy(late.v_late_exact("half_space", p)).linear_entropy
    dqq, dpp = late.delta_v(p)
    return [s_free, half, late.delta_s_linear(p), dqq, dpp, float(late.image_term_valid(p))]


def run_late_sweep(s: dict) -> SweepTable:
    cols = ["S_L_free", "S_L_half_exact", "delta_S_linear", "dvqq", "dvpp", "valid"]
    rows = []
    import warnings
    with warnings.catch_warnings():
        # The validity column already records where the image term is large.
        warnings.simplefilter("ignore", late.ValidityWarning)
        if s.get("gamma_range"):
            gammas = parse_range(s["gamma_range"], "--gamma-range")
            p0 = _params(s)
            for g in gammas:
                p = _params(s, gamma=float(g))
                s_free = linear_entropy(late.v_late_exact("free", p)).linear_entropy
                rows.append([g] + _late_row(p, s_free))
            md = _metadata("late", p0, mode="late-gamma", gamma_range=s["gamma_range"],
                           late_cutoff=late.late_cutoff(p0), rel_tol=1e-10)
            return SweepTable(["gamma"] + cols, rows, md)
        Ls = parse_range(s["L_range"], "--L-range")
        if np.any(Ls <= 0):
            raise UsageError("--L-range must be positive")
        p0 = _params(s)
        s_free = linear_entropy(late.v_late_exact("free", p0)).linear_entropy
        for L in Ls:
            rows.append([L] + _late_row(_params(s, distance=float(L)), s_free))
    md = _metadata("late", p0, mode="late-L", L_range=s["L_range"],
                   late_cutoff=late.late_cutoff(p0), rel_tol=1e-10)
    return SweepTable(["L"] + cols, rows, md)


def run_twin_scaling(s: dict) -> SweepTable:
    p = _params(s)
    Ls = parse_range(s["L_range"], "--L-range")
    try:
        fit = twin.twin_late_scaling(p, Ls)
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise UsageError(str(exc)) from None
    rows = []
    for L, c, sc in zip(fit.L, fit.cross_values, fit.self_values):
        dqq, _ = late.delta_v(p.replace(distance=float(L)))
        rows.append([L, c, sc, dqq])
    md = _metadata("twin", p, L_range=s["L_range"], cross_slope=fit.cross,
                   self_correction_slope=fit.self_correction)
    return SweepTable(["L", "cross_qq", "self_correction_qq", "delta_vqq"], rows, md)


def run_validate(fmt: str = "text", gamma0_corruption: float = 0.0):
    results = validate.run_checks(gamma0_corruption)
    ok = all(r.passed for r in results)
    if fmt == "json":
        text = json.dumps({"passed": ok, "checks": [r.as_dict() for r in results]}, indent=1) + "\n"
    else:
        text = validate.format_report(results) + "\n"
    return ok, text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=float, help="damping constant gamma (default 0.02)")
    common.add_argument("--omega-r", dest="omega_r", type=float, help="renormalized frequency (default 5)")
    common.add_argument("--mass", type=float, help="oscillator mass (default 1)")
    common.add_argument("--cutoff", type=float, help="frequency cutoff Lambda")
    common.add_argument("--L", dest="L", type=float, help="oscillator-image distance (default 2)")
    common.add_argument("--L-range", dest="L_range", help="a:b:n[:log]")
    common.add_argument("--t-range", dest="t_range", help="a:b:n")
    common.add_argument("--gamma-range", dest="gamma_range", help="a:b:n[:log] (late only)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    common.add_argument("--config", help="key=value file; flags take precedence")

    parser = _Parser(prog="oscfield", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"oscfield {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    e = sub.add_parser("early", parents=[common], help="entropy on an (L, t) grid")
    e.add_argument("--convention", choices=early.CONVENTIONS,
                   help="half-space mode weight normalization (default reduced)")
    sub.add_parser("late", parents=[common], help="late-time entropy vs L or gamma")
    sub.add_parser("twin", parents=[common], help="two-oscillator late-time scaling")
    v = sub.add_parser("validate", parents=[common], help="run oracle and property checks")
    v.add_argument("--corrupt-gamma0", dest="corrupt_gamma0", type=float, default=0.0,
                   help=argparse.SUPPRESS)
    return parser


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        s = _settings(args)
        if args.command == "validate":
            ok, text = run_validate("json" if args.format == "json" else "text",
                                    args.corrupt_gamma0)
            _emit(text, s["out"])
            return EXIT_OK if ok else EXIT_VALIDATION
        runner = {"early": run_early_grid, "late": run_late_sweep, "twin": run_twin_scaling}
        table = runner[args.command](s)
        _emit(table.to_json() if s["format"] == "json" else table.to_csv(), s["out"])
        return EXIT_OK
    except (UsageError, DomainError) as exc:
        print(f"oscfield: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, ArithmeticError, FloatingPointError) as exc:
        print(f"oscfield: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
