"""Command-line driver: ``cmclab {solve,verify,convergence,sweep}``.

Configuration comes from a flat ``key = value`` file (``--config``) with
section prefixes such as ``solver.newton_tol``; command-line flags override the
file.  Recognised keys::

    r, H, grid, checks, out, format, source, fields, sweep.H, solver.<SolverConfig field>
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .catalog import cap_from_H, cap_height_field
from .errors import CMCLabError, ConfigError, FieldFormatError, HOutOfRange, NonConvergence
from .fieldio import load_field, save_field
from .grid import DiskGrid
from .identities import CHECKS, estimated_orders, run_check
from .solver import SolverConfig, check_h_window, error_vs_exact, solve_dirichlet

log = logging.getLogger("cmclab")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_H_OUT_OF_RANGE = 3
EXIT_NONCONVERGENCE = 4
EXIT_CHECK_FAILED = 5
EXIT_IO = 6

CSV_SCHEMA = "# cmclab-report v1"
CSV_COLUMNS = ["name", "grid", "lhs", "rhs", "residual", "relative_residual", "order", "pass"]
SWEEP_SCHEMA = "# cmclab-sweep v1"
SWEEP_COLUMNS = ["H", "grid", "chain_value", "surface_integral", "boundary_integral",
                 "chain_deviation", "umbilicity_deficit", "chain_pass", "umbilicity_pass"]

_SOURCES = ("solve", "exact", "files")
_FORMATS = ("csv", "json")


@dataclass
class ExperimentConfig:
    r: float = 1.0
    H: float = -0.5
    ladder: list = field(default_factory=lambda: [(64, 128)])
    solver: SolverConfig = field(default_factory=SolverConfig)
    checks: list = field(default_factory=lambda: list(CHECKS))
    out: Path = Path("cmclab-out")
    formats: tuple = ("csv",)
    source: str = "solve"
    fields: list = field(default_factory=list)
    sweep_H: list = field(default_factory=list)

    def grids(self):
        return [DiskGrid(self.r, n_rho, n_theta) for n_rho, n_theta in self.ladder]

    def echo(self):
        d = dataclasses.asdict(self)
        d["out"] = str(self.out)
        d["fields"] = [str(p) for p in self.fields]
        d["ladder"] = [f"{a}x{b}" for a, b in self.ladder]
        return d


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _parse_float(text, key):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", key) from None
    if not math.isfinite(value):
        raise ConfigError("value must be finite", key)
    return value


def _split(text):
    return [t for t in text.replace(",", " ").split() if t]


def parse_grid(text, key="grid"):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise ConfigError(f"grid must look like RHOxTHETA, got {text!r}", key) from None


def _apply(cfg: ExperimentConfig, key, value, solver_kw):
    if key == "r":
        cfg.r = _parse_float(value, key)
    elif key == "H":
        cfg.H = _parse_float(value, key)
    elif key == "grid":
        cfg.ladder = [parse_grid(t, key) for t in _split(value)]
    elif key == "checks":
        cfg.checks = _split(value)
    elif key == "out":
        cfg.out = Path(value)
    elif key == "format":
        cfg.formats = tuple(_split(value))
    elif key == "source":
        cfg.source = value.strip()
    elif key == "fields":
        cfg.fields = [Path(t) for t in _split(value)]
    elif key == "sweep.H":
        cfg.sweep_H = [_parse_float(t, key) for t in _split(value)]
    elif key.startswith("solver."):
        name = key.split(".", 1)[1]
        kinds = {f.name: f.type for f in dataclasses.fields(SolverConfig)}
        if name not in kinds:
            raise ConfigError("unknown solver setting", key)
        raw = _parse_float(value, key)
        solver_kw[name] = int(raw) if kinds[name] in (int, "int") else raw
    else:
        raise ConfigError("unknown configuration key", key)


def read_config_file(path):
    entries = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}", "config") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'", "config")
        key, value = (s.strip() for s in line.split("=", 1))
        entries.append((key, value))
    return entries


def build_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    entries = read_config_file(args.config) if args.config else []
    if args.r is not None:
        entries.append(("r", args.r))
    if args.H is not None:
        entries.append(("H", args.H))
    if args.grid:
        entries.append(("grid", " ".join(args.grid)))
    if args.checks:
        entries.append(("checks", args.checks))
    if args.out:
        entries.append(("out", args.out))
    if args.format:
        entries.append(("format", " ".join(args.format)))
    if args.source:
        entries.append(("source", args.source))
    if args.field:
        entries.append(("fields", " ".join(args.field)))
    if getattr(args, "H_list", None):
        entries.append(("sweep.H", args.H_list))
    entries.extend(tuple(s.split("=", 1)) for s in args.set or [])

    solver_kw = {}
    for key, value in entries:
        _apply(cfg, key.strip(), str(value).strip(), solver_kw)
    try:
        cfg.solver = SolverConfig(**solver_kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), "solver") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig):
    if not cfg.r > 0:
        raise ConfigError("must be positive", "r")
    if not cfg.ladder:
        raise ConfigError("ladder is empty", "grid")
    try:
        cfg.grids()
    except CMCLabError as exc:
        raise ConfigError(str(exc), "grid") from exc
    if cfg.checks == ["all"]:
        cfg.checks = list(CHECKS)
    unknown = [c for c in cfg.checks if c not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown check {unknown[0]!r}", "checks")
    bad = [f for f in cfg.formats if f not in _FORMATS]
    if bad or not cfg.formats:
        raise ConfigError(f"formats must be drawn from {_FORMATS}", "format")
    if cfg.source not in _SOURCES:
        raise ConfigError(f"source must be one of {_SOURCES}", "source")
    if cfg.source == "files" and len(cfg.fields) != len(cfg.ladder):
        raise ConfigError("need one field file per grid rung", "fields")


@dataclass
class ReportBundle:
    metadata: dict
    reports: list = field(default_factory=list)
    studies: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True, default=str)


def _metadata(cfg, command):
    return {
        "command": command,
        "config": cfg.echo(),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "tool_version": __version__,
    }


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _diagnostics(result, spec=None):
    d = {
        "grid": result.grid.label(),
        "H": result.H,
        "converged": result.converged,
        "newton_iterations": result.newton_iterations,
        "residual_history": result.residual_history,
        "continuation_path": result.continuation_path,
    }
    if spec is not None:
        linf, l2 = error_vs_exact(result, spec)
        d["error_vs_exact"] = {"linf": linf, "l2": l2}
    return d


def _exact_spec(cfg):
    try:
        return cap_from_H(cfg.r, cfg.H)
    except HOutOfRange:
        return None


def cmd_solve(cfg: ExperimentConfig) -> int:
    check_h_window(cfg.r, cfg.H, cfg.solver)
    spec = _exact_spec(cfg)
    bundle = ReportBundle(_metadata(cfg, "solve"))
    status = EXIT_OK
    try:
        for grid in cfg.grids():
            result = solve_dirichlet(cfg.r, cfg.H, cfg.solver, grid)
            cfg.out.mkdir(parents=True, exist_ok=True)
            save_field(cfg.out / f"field_{grid.label()}.txt", result.field)
            bundle.diagnostics.append(_diagnostics(result, spec))
            log.info("solved %s: %d Newton iterations, residual %.3e",
                     grid.label(), result.newton_iterations, result.final_residual)
    except NonConvergence as exc:
        bundle.diagnostics.append({"error": "NonConvergence", "message": str(exc),
                                   "H": exc.H, "residual_history": exc.residual_history})
        status = EXIT_NONCONVERGENCE
    _write(cfg.out / "solve_diagnostics.json", bundle.to_json())
    return status


def _fields_for(cfg: ExperimentConfig, bundle):
    grids = cfg.grids()
    if cfg.source == "files":
        fields = [load_field(p) for p in cfg.fields]
        for f, g in zip(fields, grids):
            if f.grid != g:
                raise ConfigError(f"field grid {f.grid.label()} does not match rung {g.label()}",
                                  "fields")
        return fields
    if cfg.source == "exact":
        spec = cap_from_H(cfg.r, cfg.H)
        return [cap_height_field(spec, g) for g in grids]
    check_h_window(cfg.r, cfg.H, cfg.solver)
    spec = _exact_spec(cfg)
    out = []
    for g in grids:
        result = solve_dirichlet(cfg.r, cfg.H, cfg.solver, g)
        bundle.diagnostics.append(_diagnostics(result, spec))
        out.append(result.field)
    return out


def verify_rows(cfg: ExperimentConfig, fields):
    """Run the configured checks on every rung; returns ``(rows, reports, studies)``."""
    reports = {name: [run_check(name, f, cfg.H) for f in fields] for name in cfg.checks}
    rows, flat, studies = [], [], []
    for name in cfg.checks:
        reps = reports[name]
        orders = estimated_orders(reps) if len(reps) > 1 else []
        studies.append({"name": name, "orders": orders,
                        "residuals": [r.residual for r in reps]})
        for k, rep in enumerate(reps):
            order = orders[k - 1] if k > 0 else None
            rows.append([rep.name, rep.grid_label, rep.lhs, rep.rhs, rep.residual,
                         rep.relative_residual, order, rep.passed])
            flat.append(rep.as_dict())
    return rows, flat, studies


def render_csv(rows, header=CSV_COLUMNS, schema=CSV_SCHEMA):
    buf = io.StringIO()
    buf.write(schema + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def cmd_verify(cfg: ExperimentConfig, command="verify") -> int:
    bundle = ReportBundle(_metadata(cfg, command))
    fields = _fields_for(cfg, bundle)
    rows, bundle.reports, bundle.studies = verify_rows(cfg, fields)
    if "csv" in cfg.formats:
        _write(cfg.out / "report.csv", render_csv(rows))
    if "json" in cfg.formats:
        _write(cfg.out / "report.json", bundle.to_json())
    return EXIT_OK if all(row[-1] for row in rows) else EXIT_CHECK_FAILED


def cmd_sweep(cfg: ExperimentConfig) -> int:
    if not cfg.sweep_H:
        raise ConfigError("empty sweep", "sweep.H")
    for H in cfg.sweep_H:
        check_h_window(cfg.r, H, cfg.solver)
    grid = cfg.grids()[-1]
    bundle = ReportBundle(_metadata(cfg, "sweep"))
    rows = []
    for H in cfg.sweep_H:
        result = solve_dirichlet(cfg.r, H, cfg.solver, grid)
        bundle.diagnostics.append(_diagnostics(result))
        chain = run_check("check_chain", result.field, H)
        umb = run_check("check_umbilicity", result.field, H)
        bundle.reports.extend([chain.as_dict(), umb.as_dict()])
        d = chain.details
        rows.append([H, grid.label(), d["chain_value"], d["surface_integral"],
                     d["boundary_integral"], chain.relative_residual, umb.residual,
                     chain.passed, umb.passed])
    if "csv" in cfg.formats:
        _write(cfg.out / "sweep.csv", render_csv(rows, SWEEP_COLUMNS, SWEEP_SCHEMA))
    if "json" in cfg.formats:
        _write(cfg.out / "sweep.json", bundle.to_json())
    return EXIT_OK if all(r[-1] and r[-2] for r in rows) else EXIT_CHECK_FAILED


def make_parser():
    p = argparse.ArgumentParser(prog="cmclab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("solve", "solve the CMC Dirichlet problem on each grid rung"),
        ("verify", "run identity checks on solved, exact or loaded fields"),
        ("convergence", "verify over a ladder with order estimation"),
        ("sweep", "solve and check chain/umbilicity for a list of H values"),
    ]:
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", help="flat key = value configuration file")
        s.add_argument("--r", help="boundary circle radius")
        s.add_argument("--H", help="prescribed mean curvature")
        s.add_argument("--grid", action="append", help="RHOxTHETA; repeat for a ladder")
        s.add_argument("--checks", help="comma-separated check names, or 'all'")
        s.add_argument("--out", help="output directory")
        s.add_argument("--format", action="append", choices=_FORMATS)
        s.add_argument("--source", choices=_SOURCES, help="where verify gets its fields")
        s.add_argument("--field", action="append", help="field file per rung (source=files)")
        s.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override any configuration key, e.g. solver.newton_tol=1e-9")
        if name == "sweep":
            s.add_argument("--H-list", dest="H_list", help="comma-separated H values")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        return cmd_verify(cfg, args.command)
    except ConfigError as exc:
        print(f"cmclab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HOutOfRange as exc:
        print(f"cmclab: HOutOfRange: {exc}", file=sys.stderr)
        return EXIT_H_OUT_OF_RANGE
    except NonConvergence as exc:
        print(f"cmclab: NonConvergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (OSError, FieldFormatError) as exc:
        print(f"cmclab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
