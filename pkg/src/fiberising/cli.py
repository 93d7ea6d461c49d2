"""``fiberising`` command line.

Exit codes: 0 ok, 2 config, 3 pole proximity, 4 output I/O, 5 numerical
breakdown.
"""
from __future__ import annotations

import argparse
import cmath
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from .cavity_model import derive, validity_check
from .entanglement import entanglement_series
from .errors import ConfigError, FiberIsingError, OutputError
from .experiments import get_preset, run_preset, summarize, sweep_couplings
from .spin_dynamics import evolve

log = logging.getLogger("fiberising")

SWEEP_COLUMNS = ("delta", "gamma0", "j12", "j23", "j31", "pole_distance", "status")
EVOLVE_COLUMNS = ("t", "c12", "c23", "c13", "c1_23", "c123", "norm_error")
SWEEP_SCHEMA = "fiberising.sweep/1"
EVOLVE_SCHEMA = "fiberising.evolve/1"
RAISED_OFFSET = 0.1


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    return format(float(x) + 0.0, ".12g")  # + 0.0 turns -0.0 into 0


def _json_number(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(fmt(x)) if math.isfinite(x) else None
    if isinstance(x, dict):
        return {k: _json_number(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_number(v) for v in x]
    return x


def atomic_write(path: str | Path, text: str) -> None:
    """Write via a temp file in the destination directory and rename into place."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from None


def csv_text(schema: str, columns, rows, note: str | None = None) -> str:
    head = f"# schema: {schema} columns={','.join(columns)}"
    if note:
        head += f" note={note}"
    lines = [head, ",".join(columns)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def sweep_csv(grid) -> str:
    return csv_text(SWEEP_SCHEMA, SWEEP_COLUMNS, grid.cells())


def series_csv(series, raised: bool = False) -> str:
    columns = EVOLVE_COLUMNS
    data = [series.t, series.c12, series.c23, series.c13, series.c1_23, series.c123,
            series.norm_error]
    note = None
    if raised:
        columns = columns + ("c1_23_raised",)
        data.append(series.c1_23 + RAISED_OFFSET)
        note = f"c1_23_raised=c1_23+{RAISED_OFFSET:g} (plot offset only)"
    return csv_text(EVOLVE_SCHEMA, columns, zip(*data), note)


def _load_config(args, require_physical=False) -> cfgmod.RunConfig:
    raw = cfgmod.load(args.config) if args.config else {}
    if getattr(args, "literal_dissipation", False):
        raw["literal_dissipation"] = True
    for flag, key in (("t_max", "t_max"), ("dt", "dt")):
        value = getattr(args, flag, None)
        if value is not None:
            raw[key] = value
    for flag, key in (("delta_range", "delta_range"), ("gamma_range", "gamma_range")):
        value = getattr(args, flag, None)
        if value is not None:
            raw[key] = value
    if getattr(args, "out", None):
        raw["out"] = args.out
    return cfgmod.build(raw, require_physical=require_physical)


def cmd_couplings(args) -> int:
    cfg = _load_config(args)
    if cfg.mode != "physical":
        raise ConfigError("couplings needs physical parameters (delta, gamma0, ...)")
    p = cfg.params
    d = derive(p, cfg.thresholds)
    report = validity_check(p, d, cfg.thresholds)
    lines = [f"j12 = {fmt(d.couplings.j12)}", f"j23 = {fmt(d.couplings.j23)}",
             f"j31 = {fmt(d.couplings.j31)}", f"chi = {fmt(d.chi)}"]
    for k, a in enumerate(d.alpha, 1):
        lines.append(f"alpha{k}_abs = {fmt(abs(a))}")
        lines.append(f"alpha{k}_arg = {fmt(cmath.phase(a) if a else 0.0)}")
    lines += [f"pole_distance = {fmt(d.pole_distance)}",
              f"large_detuning_ratio = {fmt(report.large_detuning_ratio)}",
              f"adiabatic_ratio = {fmt(report.adiabatic_ratio)}",
              f"regime_ok = {str(report.regime_ok).lower()}"]
    lines += [f"# {r}" for r in report.reasons]
    print("\n".join(lines))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args, require_physical=True)
    if cfg.mode != "physical":
        raise ConfigError("sweep needs physical parameters, not direct j12/j23/j31")
    grid = sweep_couplings(cfg.params, cfg.delta_axis, cfg.gamma_axis, cfg.thresholds)
    out = cfg.out or "sweep.csv"
    atomic_write(out, sweep_csv(grid))
    print(f"wrote {len(grid)} cells to {out}")
    return 0


def cmd_evolve(args) -> int:
    cfg = _load_config(args)
    spec = cfg.hamiltonian()
    series = entanglement_series(evolve(spec, cfg.psi0(), cfg.t_max, cfg.dt))
    out = cfg.out or "evolve.csv"
    atomic_write(out, series_csv(series))
    print(f"wrote {len(series)} samples to {out}")
    return 0


def cmd_figure(args) -> int:
    preset = get_preset(args.id)
    out_dir = Path(args.out or preset.id)
    result = run_preset(preset.id)
    summary = summarize(preset.id, result)
    files = {}
    if preset.is_sweep:
        files[f"{preset.id}_sweep.csv"] = sweep_csv(result)
    else:
        for label, series in result.items():
            files[f"{preset.id}_{label}.csv"] = series_csv(series, raised=preset.id == "fig7")
    summary["files"] = sorted(files)
    for name, text in files.items():
        atomic_write(out_dir / name, text)
    atomic_write(out_dir / "summary.json",
                 json.dumps(_json_number(summary), indent=2, sort_keys=True) + "\n")
    for check in summary["checks"]:
        print(f"{'pass' if check['pass'] else 'FAIL'}: {check['claim']}")
    print(f"wrote {len(files) + 1} files to {out_dir}")
    return 0


def cmd_validate(args) -> int:
    from .selfcheck import run_checks

    results = run_checks()
    for name, ok, detail in results:
        print(f"{'pass' if ok else 'FAIL'}: {name} ({detail})")
    return 0 if all(ok for _, ok, _ in results) else 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fiberising", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--config", help="key=value or JSON config file")
        p.add_argument("--literal-dissipation", action="store_true",
                       help="attenuate only the f12 and f23 fiber factors")
        if out:
            p.add_argument("--out", help="output path")
        return p

    common(sub.add_parser("couplings", help="print couplings and regime diagnostics"),
           out=False).set_defaults(func=cmd_couplings)
    p = common(sub.add_parser("sweep", help="coupling map over (delta, gamma0) to CSV"))
    p.add_argument("--delta-range", metavar="A:B:N")
    p.add_argument("--gamma-range", metavar="A:B:N")
    p.set_defaults(func=cmd_sweep)
    p = common(sub.add_parser("evolve", help="entanglement time series to CSV"))
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--dt", type=float)
    p.set_defaults(func=cmd_evolve)
    p = sub.add_parser("figure", help="run a figure preset and write data + summary.json")
    p.add_argument("id", choices=[str(n) for n in range(2, 8)])
    p.add_argument("--out", help="output directory (default figN)")
    p.set_defaults(func=cmd_figure)
    sub.add_parser("validate", help="run built-in oracle self-checks").set_defaults(
        func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FiberIsingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"error: linear algebra failure: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
