"""Command-line front end.

Every command writes one report (CSV with a single header row, or JSON) to
standard output or ``--out``; rows are ordered by ascending t and floats are
written in shortest round-trip form, so identical invocations give
byte-identical output. Progress goes to standard error, one line per phase.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import default_threads
from .bounds_lab import littlewood_gap_stat, moser_assumption_probe, omega_bound, omega_probe
from .cosmology import (
    PhysicalConstants,
    corollary_intervals,
    disjoint_intervals,
    positive_pressure_centers,
    state_equation_check,
    theorem1_scan,
)
from .errors import ConfigError, InsufficientTable, IoError, ZetaCosmoError
from .explicit_formula import admissible_points, lemma21_residual, lemma22_residual, lemma_tolerance
from .riemann_siegel import EvalConfig, z_eval
from .zero_engine import (
    ZeroTable,
    config_hash,
    find_stationary_points,
    find_zeros,
    ingest_zero_table,
    read_zero_table,
    sidecar,
    write_zero_table,
)

log = logging.getLogger("zetacosmo")

COMMANDS = ("eval", "zeros", "stationary", "verify-lemma", "cosmo-scan", "corollary", "gaps", "omega", "moser-probe", "export")
MIN_THRESHOLD_T = 16.0
STDOUT = "-"

COLUMNS = {
    "eval": ("t", "z", "dz", "d2z", "theta", "path"),
    "zeros": ("n", "gamma"),
    "stationary": ("t0", "z", "gap_lo", "gap_hi"),
    "verify-lemma": ("t", "zero_sum", "minus_dlog_ratio", "residual_22", "residual_21_plus", "residual_21_minus", "tolerance"),
    "cosmo-scan": ("t", "r", "rho", "p", "p_plus_c2rho", "p_plus_c2rho_paper", "threshold"),
    "corollary": ("t0", "delta", "p_min", "bound_value"),
    "gaps": ("gamma_lo", "gamma_hi", "gap", "normalized"),
    "omega": ("t", "abs_z", "kind", "implied_beta", "exceeds_bound", "exceeds_alpha_form"),
    "moser-probe": ("t0", "abs_z", "bound"),
    "export": ("gamma",),
}

EPILOG = "report columns:\n" + "\n".join(f"  {c:<13} {', '.join(cols)}" for c, cols in COLUMNS.items()) + """

zero tables: one ordinate per line; tables written by `zeros --cache DIR`
or `export --out PATH` carry a PATH.meta sidecar. Commands that consume a
table take it from --zeros PATH or from the cache directory and never
compute one implicitly.
"""


@dataclass
class RunConfig:
    command: str
    t_lo: float | None = None
    t_hi: float | None = None
    t: float | None = None
    zero_table_path: Path | None = None
    cache_dir: Path | None = None
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    eval: EvalConfig = field(default_factory=EvalConfig)
    output_format: str = "csv"
    output_path: str = STDOUT
    threads: int = 1
    beta: float = 0.49
    a2: float = 1.0
    c1: float = 0.01
    count: int = 20

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.output_format!r}")
        if self.t_lo is not None and not self.t_lo < self.t_hi:
            raise ConfigError(f"--range needs LO < HI, got {self.t_lo!r} {self.t_hi!r}")
        if self.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {self.threads!r}")
        if self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)

    def require_range(self):
        if self.t_lo is None:
            raise ConfigError(f"{self.command} needs --range LO HI")
        return self.t_lo, self.t_hi


@dataclass
class Report:
    command: str
    rows: list[dict]
    summary: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# zero tables
# ---------------------------------------------------------------------------

def cache_path(cache_dir, cfg: EvalConfig) -> Path:
    return Path(cache_dir) / f"zeros_{config_hash(cfg)}.txt"


def cache_roundtrip(table: ZeroTable, cache_dir, cfg: EvalConfig | None = None) -> ZeroTable:
    """Write ``table`` into the cache and read it back."""
    cache_dir = Path(cache_dir)
    name = f"zeros_{table.config_hash or 'table'}.txt"
    path = write_zero_table(table, cache_dir / name)
    return read_zero_table(path, cfg)


def load_table(rc: RunConfig, needed: float) -> ZeroTable:
    """The zero table for a consuming command, checked to cover ``needed``."""
    if rc.zero_table_path is not None:
        path = Path(rc.zero_table_path)
        if sidecar(path).exists():
            table = read_zero_table(path, rc.eval)
        else:
            table = ingest_zero_table(path)
        log.info("loaded %d ordinates from %s (h_max=%g)", len(table), path, table.h_max)
    elif rc.cache_dir is not None and cache_path(rc.cache_dir, rc.eval).exists():
        table = read_zero_table(cache_path(rc.cache_dir, rc.eval), rc.eval)
        log.info("loaded %d cached ordinates (h_max=%g)", len(table), table.h_max)
    else:
        raise InsufficientTable(needed, 0.0)
    if not table.covers(needed):
        raise InsufficientTable(needed, table.h_max)
    return table


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_eval(rc: RunConfig) -> Report:
    if rc.t is not None:
        ts = [rc.t]
    else:
        lo, hi = rc.require_range()
        ts = np.linspace(lo, hi, rc.count)
    rows = []
    for t in ts:
        p = z_eval(float(t), rc.eval)
        rows.append({"t": p.t, "z": p.z, "dz": p.dz, "d2z": p.d2z, "theta": p.theta, "path": p.path})
    return Report("eval", rows)


def _cmd_zeros(rc: RunConfig) -> Report:
    lo, hi = rc.require_range()
    log.info("scanning zeros on (%g, %g]", lo, hi)
    table = find_zeros(lo, hi, rc.eval, threads=rc.threads)
    log.info("found %d zeros", len(table))
    if rc.cache_dir is not None and lo == 0:
        write_zero_table(table, cache_path(rc.cache_dir, rc.eval))
        log.info("cached table in %s", rc.cache_dir)
    rows = [{"n": i + 1, "gamma": float(g)} for i, g in enumerate(table.ordinates)]
    return Report("zeros", rows, {"count": len(table)})


def _cmd_stationary(rc: RunConfig) -> Report:
    lo, hi = rc.require_range()
    table = load_table(rc, hi)
    sub = ZeroTable(table.ordinates[(table.ordinates >= lo) & (table.ordinates <= hi)], h_max=hi, source=table.source)
    pts = find_stationary_points(sub, rc.eval)
    rows = [{"t0": c.t0, "z": c.z_at, "gap_lo": c.gap[0], "gap_hi": c.gap[1]} for c in pts]
    return Report("stationary", rows, {"count": len(rows)})


def _cmd_verify_lemma(rc: RunConfig) -> Report:
    lo, hi = rc.require_range()
    table = load_table(rc, 2.0 * hi)
    rows = []
    n22 = n21p = n21m = 0
    for t in admissible_points(lo, hi, rc.count, table):
        r22 = lemma22_residual(t, table, rc.eval)
        r21 = lemma21_residual(t, table, rc.eval)
        tol = lemma_tolerance(t)
        n22 += abs(r22.residual) <= tol
        n21p += abs(r21.residual_plus) <= tol
        n21m += abs(r21.residual_minus) <= tol
        rows.append({
            "t": float(t), "zero_sum": r22.lhs, "minus_dlog_ratio": r22.rhs, "residual_22": r22.residual,
            "residual_21_plus": abs(r21.residual_plus), "residual_21_minus": abs(r21.residual_minus), "tolerance": tol,
        })
    return Report("verify-lemma", rows, {"points": len(rows), "pass_22": n22, "pass_21_plus": n21p, "pass_21_minus": n21m})


def _require_threshold_range(rc: RunConfig):
    lo, hi = rc.require_range()
    if lo < MIN_THRESHOLD_T:
        raise ConfigError(f"{rc.command} needs t_lo >= {MIN_THRESHOLD_T:g}, got {lo!r}")
    return lo, hi


def _cmd_cosmo_scan(rc: RunConfig) -> Report:
    lo, hi = _require_threshold_range(rc)
    table = load_table(rc, 2.0 * hi)
    scan = theorem1_scan(lo, hi, rc.constants, table, rc.eval)
    rows = [s.as_row() for s in scan.states]
    bands = [state_equation_check(s.t, rc.c1, rc.constants, rc.eval) for s in scan.states]
    summary = {
        "midpoints": len(rows),
        "all_positive": scan.all_positive,
        "A1": scan.a1.value,
        "A1_at": scan.a1.argument,
        "c1": rc.c1,
        "in_band": sum(b.in_band for b in bands),
    }
    return Report("cosmo-scan", rows, summary)


def _cmd_corollary(rc: RunConfig) -> Report:
    if rc.t is not None:
        if rc.t < MIN_THRESHOLD_T:
            raise ConfigError(f"corollary needs t >= {MIN_THRESHOLD_T:g}, got {rc.t!r}")
        table = load_table(rc, rc.t + 1.0)
        centers = np.array([rc.t])
    else:
        lo, hi = _require_threshold_range(rc)
        table = load_table(rc, hi + 1.0)
        sub = ZeroTable(table.upto(hi + 1.0), h_max=hi + 1.0, source=table.source)
        log.info("locating stationary points up to %g", hi)
        centers = positive_pressure_centers(find_stationary_points(sub, rc.eval), lo, hi, rc.constants, rc.eval)
    log.info("growing intervals around %d centers", centers.size)
    res = corollary_intervals(centers, rc.constants, table, rc.eval)
    rows = [{"t0": r.t0, "delta": r.delta, "p_min": r.p_min_on_interval, "bound_value": r.bound_value} for r in res]
    return Report("corollary", rows, {"intervals": len(rows), "disjoint": len(disjoint_intervals(res))})


def _cmd_gaps(rc: RunConfig) -> Report:
    table = load_table(rc, rc.t_hi if rc.t_hi is not None else 0.0)
    if rc.t_lo is not None:
        g = table.ordinates
        table = ZeroTable(g[(g >= rc.t_lo) & (g <= rc.t_hi)], h_max=rc.t_hi, source=table.source)
    stats, const = littlewood_gap_stat(table)
    rows = [{"gamma_lo": s.gamma_lo, "gamma_hi": s.gamma_hi, "gap": s.gap, "normalized": s.normalized} for s in stats]
    summary = {"gaps": len(rows), "A": const.value if const else None, "A_at": const.argument if const else None}
    return Report("gaps", rows, summary)


def _cmd_omega(rc: RunConfig) -> Report:
    lo, hi = rc.require_range()
    recs = omega_probe(lo, hi, rc.beta, rc.a2, rc.eval, threads=rc.threads)
    rows = [
        {"t": r.t, "abs_z": r.abs_z, "kind": r.kind, "implied_beta": r.implied_beta,
         "exceeds_bound": r.exceeds_bound, "exceeds_alpha_form": r.exceeds_alpha_form}
        for r in recs
    ]
    return Report("omega", rows, {"records": len(rows), "beta": rc.beta, "a2": rc.a2})


def _cmd_moser(rc: RunConfig) -> Report:
    lo, hi = rc.require_range()
    table = load_table(rc, hi)
    g = table.ordinates
    sub = ZeroTable(g[(g >= lo) & (g <= hi)], h_max=hi, source=table.source)
    rep = moser_assumption_probe(find_stationary_points(sub, rc.eval), rc.beta, rc.a2)
    rows = [{"t0": c.t0, "abs_z": abs(c.z_at), "bound": float(omega_bound(c.t0, rc.beta, rc.a2))} for c in rep.points]
    summary = {
        "stationary": rep.total, "count": rep.count, "fraction": rep.fraction,
        "max_abs_z": rep.max_abs_z, "t_at_max": rep.t_at_max, "alpha_count": rep.alpha_count,
    }
    return Report("moser-probe", rows, summary)


def _cmd_export(rc: RunConfig) -> Report:
    if rc.zero_table_path is not None or rc.cache_dir is not None:
        table = load_table(rc, rc.t_hi if rc.t_hi is not None else 0.0)
    else:
        lo, hi = rc.require_range()
        table = find_zeros(lo, hi, rc.eval, threads=rc.threads)
    if rc.t_hi is not None:
        g = table.ordinates
        table = ZeroTable(g[(g > rc.t_lo) & (g <= rc.t_hi)], h_max=rc.t_hi, h_min=rc.t_lo, source=table.source,
                          abs_error=table.abs_error, config_hash=table.config_hash)
    if rc.output_path != STDOUT:
        write_zero_table(table, rc.output_path)
        log.info("wrote %d ordinates to %s", len(table), rc.output_path)
        return Report("export", [], {"written": len(table)})
    return Report("export", [{"gamma": float(g)} for g in table.ordinates])


HANDLERS = {
    "eval": _cmd_eval,
    "zeros": _cmd_zeros,
    "stationary": _cmd_stationary,
    "verify-lemma": _cmd_verify_lemma,
    "cosmo-scan": _cmd_cosmo_scan,
    "corollary": _cmd_corollary,
    "gaps": _cmd_gaps,
    "omega": _cmd_omega,
    "moser-probe": _cmd_moser,
    "export": _cmd_export,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if not math.isfinite(v) else v
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def render(report: Report, fmt: str) -> str:
    cols = COLUMNS[report.command]
    if fmt == "json":
        doc = {
            "command": report.command,
            "version": __version__,
            "columns": list(cols),
            "rows": [{c: _json_value(r.get(c)) for c in cols} for r in report.rows],
            "summary": {k: _json_value(v) for k, v in report.summary.items()},
        }
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in report.rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


def run(rc: RunConfig) -> tuple[int, str]:
    """Dispatch one command; returns (exit status, rendered report)."""
    log.info("%s: start", rc.command)
    report = HANDLERS[rc.command](rc)
    if rc.command == "export" and rc.output_path != STDOUT:
        text = ""  # the table itself was written to --out
    else:
        text = render(report, rc.output_format)
    if report.summary:
        log.info("%s: %s", rc.command, ", ".join(f"{k}={_cell(v)}" for k, v in report.summary.items()))
    return 0, text


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"), help="t range")
    common.add_argument("--t", type=float, help="single abscissa")
    common.add_argument("--zeros", type=Path, metavar="PATH", help="zero table to read")
    common.add_argument("--cache", type=Path, metavar="DIR", help="zero-table cache directory")
    common.add_argument("--c", type=float, default=1.0, help="speed of light (model units)")
    common.add_argument("--g", type=float, default=1.0, help="gravitational coupling (model units)")
    common.add_argument("--k", type=int, choices=(-1, 0, 1), default=1, help="curvature index")
    common.add_argument("--beta", type=float, default=0.49, help="exponent in exp(log^beta t)")
    common.add_argument("--a2", type=float, default=1.0, help="constant in a2*exp(log^beta t)")
    common.add_argument("--c1", type=float, default=0.01, help="lower slope of the state-equation band")
    common.add_argument("--count", type=int, default=20, help="sample points for eval/verify-lemma")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=STDOUT, metavar="PATH", help="output file (default stdout)")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: cpu count)")
    common.add_argument("--abs-err", type=float, default=1e-10, help="target absolute error of Z")
    common.add_argument("-q", "--quiet", action="store_true", help="suppress the progress log")

    parser = argparse.ArgumentParser(
        prog="zetacosmo",
        description="Riemann-Siegel Z(t), its zeros, and the |Z| Friedmann model.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "eval": "Z, Z', Z'', theta at --t (or --count points of --range)",
        "zeros": "all zeros in --range, count-verified; cached with --cache when LO is 0",
        "stationary": "zeros of Z' between consecutive zeros in --range",
        "verify-lemma": "zero-sum identities at admissible points of --range",
        "cosmo-scan": "p + c^2 rho at every gap midpoint in --range",
        "corollary": "positive-pressure intervals around stationary points (or --t)",
        "gaps": "consecutive-gap statistics of the zero table",
        "omega": "running maxima of |Z| on a 0.05 grid over --range",
        "moser-probe": "stationary points with |Z| > a2 exp(log^beta t)",
        "export": "write a zero table (from --zeros/--cache or computed on --range) to --out",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name], description=helps[name] + ".",
                           epilog=f"columns: {', '.join(COLUMNS[name])}")
        p.set_defaults(command=name)
    return parser


def config_from_args(args) -> RunConfig:
    lo, hi = (args.range if args.range else (None, None))
    return RunConfig(
        command=args.command,
        t_lo=lo,
        t_hi=hi,
        t=args.t,
        zero_table_path=args.zeros,
        cache_dir=args.cache,
        constants=PhysicalConstants(c=args.c, g_coupling=args.g, k=args.k),
        eval=EvalConfig(target_abs_error=args.abs_err),
        output_format=args.format,
        output_path=args.out,
        threads=args.threads if args.threads is not None else default_threads(),
        beta=args.beta,
        a2=args.a2,
        c1=args.c1,
        count=args.count,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="zetacosmo: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        rc = config_from_args(args)
        status, text = run(rc)
    except ConfigError as exc:
        print(f"error: {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ZetaCosmoError as exc:
        print(f"error: {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if text:
        if rc.output_path == STDOUT:
            sys.stdout.write(text)
        else:
            try:
                Path(rc.output_path).write_text(text, encoding="utf-8")
            except OSError as exc:
                err = IoError(f"cannot write {rc.output_path}: {exc}")
                print(f"error: {args.command}: IoError: {err}", file=sys.stderr)
                return 3
    return status


if __name__ == "__main__":
    sys.exit(main())
