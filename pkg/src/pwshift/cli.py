"""Command-line driver.

    pwshift shifts <config>
    pwshift xsection <config> --mode {composite,nuclear_only,coulomb_only,rutherford}
    pwshift validate

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import traceback
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config
from .errors import ConfigError, NumericError
from .pvquad import QuadratureSpec
from .shifts import PhaseShiftTable, phase_shift_table
from . import xsection as xs

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

MODES = ("composite", "nuclear_only", "coulomb_only", "rutherford")
SHIFTS_HEADER = ("l", "delta1", "delta2", "total", "sigma_l", "exact_nuclear")
XS_HEADER = ("theta_rad", "dsigma_barn")

log = logging.getLogger("pwshift")


def fmt(value) -> str:
    """12 significant digits; ``-0`` is printed as ``0``."""
    if value is None:
        return ""
    v = float(value) + 0.0
    if not np.isfinite(v):
        raise NumericError(f"non-finite value {v!r} in output")
    return f"{v:.12g}"


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def write_shifts_csv(table: PhaseShiftTable, path):
    rows = [
        (r.l, fmt(r.delta1), fmt(r.delta2), fmt(r.total), fmt(r.sigma), fmt(r.oracle_exact))
        for r in table.records
    ]
    return _write_csv(Path(path), SHIFTS_HEADER, rows)


def write_curve_csv(curve, path):
    rows = [(fmt(t), fmt(d)) for t, d in zip(curve.theta, curve.dsigma_barns)]
    return _write_csv(Path(path), XS_HEADER, rows)


def _out_dir(cfg: RunConfig, override):
    d = Path(override) if override else Path(cfg.outputs.directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"[outputs] directory: cannot create {str(d)!r}: {exc.strerror}") from None
    return d


def _table(cfg: RunConfig):
    return phase_shift_table(cfg.to_scenario(), cfg.run.l_max, cfg.quadrature())


def format_table(table: PhaseShiftTable) -> str:
    head = f"{'l':>3} {'delta1':>12} {'delta2':>12} {'total':>12} {'sigma_l':>12} {'exact_nuclear':>14}"
    lines = [head]
    for r in table.records:
        ex = f"{r.oracle_exact:14.6f}" if r.oracle_exact is not None else " " * 14
        lines.append(f"{r.l:>3} {r.delta1:12.6f} {r.delta2:12.6f} {r.total:12.6f} {r.sigma:12.6f} {ex}")
    return "\n".join(lines)


def cmd_shifts(cfg: RunConfig, out=None):
    table = _table(cfg)
    d = _out_dir(cfg, out)
    written = [write_shifts_csv(table, d / "shifts.csv")]
    if "png" in cfg.outputs.formats:
        from .plotting import plot_shifts

        written.append(plot_shifts(table, d / "shifts.png"))
    print(format_table(table))
    return table, written


def _theta(cfg: RunConfig):
    return xs.default_theta_grid(cfg.run.theta_points)


def cmd_xsection(cfg: RunConfig, mode: str, out=None):
    if mode not in MODES:
        raise ConfigError(f"--mode: expected one of {', '.join(MODES)}")
    scen = cfg.to_scenario()
    params = scen.params
    theta = _theta(cfg)
    wp = xs.WavepacketSpec(cfg.run.epsilon)
    d = _out_dir(cfg, out)
    reference = None
    if mode == "composite":
        curve = xs.composite_cross_section(_table(cfg), wp, theta)
        reference = xs.rutherford_reference(params.p, params.eta_c, theta)
    elif mode == "nuclear_only":
        curve = xs.nuclear_only_cross_section(_table(cfg), params.p, theta=theta)
    elif mode == "coulomb_only":
        curve = xs.coulomb_only_cross_section(params.p, params.eta_c, wp, theta)
    else:
        curve = xs.rutherford_reference(params.p, params.eta_c, theta)
    written = [write_curve_csv(curve, d / f"xsection_{mode}.csv")]
    if reference is not None:
        written.append(write_curve_csv(reference, d / "xsection_rutherford.csv"))
    if "png" in cfg.outputs.formats:
        from .plotting import plot_cross_section

        written.append(plot_cross_section(curve, d / f"xsection_{mode}.png", reference, mode))
    return curve, written


def cmd_validate(rel_tol=None):
    from .validate import format_report, run_validation

    spec = QuadratureSpec() if rel_tol is None else QuadratureSpec(rel_tol=rel_tol)
    results = run_validation(spec)
    print(format_report(results))
    return all(r.passed for r, _ in results)


def _provenance(exc):
    # innermost pwshift module on the traceback
    names = [Path(f.filename).stem for f in traceback.extract_tb(exc.__traceback__) if "pwshift" in f.filename]
    return f"pwshift.{names[-1]}" if names else "pwshift"


def build_parser():
    ap = argparse.ArgumentParser(prog="pwshift", description="Perturbative phase shifts and cross sections.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("shifts", help="phase-shift table to shifts.csv")
    s.add_argument("config")
    s.add_argument("--out", help="output directory (overrides [outputs] directory)")

    x = sub.add_parser("xsection", help="differential cross section to xsection_<mode>.csv")
    x.add_argument("config")
    x.add_argument("--mode", choices=MODES, default="composite")
    x.add_argument("--out", help="output directory (overrides [outputs] directory)")

    v = sub.add_parser("validate", help="run the self-check suite")
    v.add_argument("--rel-tol", type=float, default=None, help="quadrature tolerance to validate")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "validate":
            if args.rel_tol is not None and not args.rel_tol > 0:
                raise ConfigError("--rel-tol: must be positive")
            return EXIT_OK if cmd_validate(args.rel_tol) else EXIT_NUMERIC
        cfg = load_config(args.config)
        if args.command == "shifts":
            _, written = cmd_shifts(cfg, args.out)
        else:
            _, written = cmd_xsection(cfg, args.mode, args.out)
        for path in written:
            log.info("wrote %s", path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"pwshift: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        origin = _provenance(exc)
        print(f"pwshift: numeric failure ({type(exc).__name__}, {origin}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
