"""Command line experiment runner.

Subcommands: ``exact-ctmc`` (closed-form chain tables), ``simulate``
(trajectory dumps), ``estimate`` (Monte Carlo expectation/hit tables) and
``diagnose {ec,eprop,lowerbound,stability,assumptions}``.

Configuration is a flat ``key = value`` text file ('#' starts a comment);
command line flags override file values. Every output embeds a manifest of
the resolved configuration, and rerunning the same manifest reproduces the
file byte for byte regardless of worker count. Floats are printed with 17
significant digits so values round-trip exactly.

Exit status: 0 on success, 1 if any cell failed, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Callable, Optional, Sequence

from . import __version__
from ._svgplot import line_chart_svg
from .core import Ball, EmpiricalMeasure, TestFunction, bump_function, constant, xmin1
from .exact_ctmc import CtmcProcess, CtmcState, parse_ctmc_state, transition_prob
from .diagnostics import (
    DiagnosticReport,
    McSettings,
    check_b2,
    check_b3,
    check_b5,
    check_c2,
    ec_profile,
    eproperty_witness,
    lower_bound_scan,
    stability_report,
)
from .ifs_jump import (
    example_flip,
    example_halving,
    halving_tv_modulus,
    linear_modulus,
    sample_jump_chain,
)
from .montecarlo import StreamFactory, run_batch, SamplingPlan, resolve_workers


class CliError(Exception):
    """Configuration or validation failure; maps to exit status 2."""


# ---------------------------------------------------------------------------
# model registry


def _build_ctmc(lam: float):
    return CtmcProcess(), None


def _build_flip(lam: float):
    return example_flip(lam), None


def _build_halving(lam: float):
    model, assume = example_halving(lam)
    return model, assume


_MODELS: dict = {
    "ctmc": _build_ctmc,
    "flip": _build_flip,
    "halving": _build_halving,
}


def register_model(name: str, builder: Callable) -> None:
    """Register a custom model builder: ``builder(lam) -> (process, assume)``.

    ``assume`` may be None when the model carries no hypothesis data.
    """
    _MODELS[str(name)] = builder


def _build_model(name: str, lam: float):
    if name not in _MODELS:
        raise CliError(f"unknown model {name!r}; available: {', '.join(sorted(_MODELS))}")
    return _MODELS[name](lam)


def _parse_initial(model_name: str, token: str):
    if model_name == "ctmc":
        return parse_ctmc_state(token)
    try:
        v = float(token)
    except ValueError as exc:
        raise CliError(f"cannot parse initial point {token!r}") from exc
    if not (v >= 0.0 and math.isfinite(v)):
        raise CliError(f"initial point must be a finite nonnegative real, got {token!r}")
    return v


def _parse_function(spec: str) -> TestFunction:
    spec = spec.strip()
    if spec == "xmin1":
        return xmin1()
    if spec.startswith("const:"):
        return constant(float(spec.split(":", 1)[1]))
    if spec.startswith("bump:"):
        parts = [float(p) for p in spec.split(":", 1)[1].split(",")]
        if len(parts) != 3:
            raise CliError("bump function spec is bump:<lo>,<hi>,<eps>")
        return bump_function((parts[0], parts[1]), parts[2])
    raise CliError(f"unknown test function {spec!r}; use xmin1, const:<c> or bump:<lo>,<hi>,<eps>")


# ---------------------------------------------------------------------------
# configuration file handling


# the --lambda flag lands on args.lam (lambda is reserved in Python)
_KEY_ALIASES = {"lambda": "lam"}


def _read_config(path: str) -> dict:
    values: dict = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise CliError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
                key, _, val = line.partition("=")
                key = key.strip().replace("-", "_")
                values[_KEY_ALIASES.get(key, key)] = val.strip()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    return values


class Settings:
    """Resolved option lookup: flag value wins, then config file, then default."""

    def __init__(self, args: argparse.Namespace, allowed: Sequence[str]):
        self.args = args
        self.config = _read_config(args.config) if getattr(args, "config", None) else {}
        unknown = set(self.config) - set(allowed)
        if unknown:
            raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
        self.resolved: dict = {}

    def get(self, key: str, default=None, parse: Optional[Callable] = None,
            required: bool = False):
        flag = getattr(self.args, key, None)
        if flag is not None:
            raw = flag
        elif key in self.config:
            raw = self.config[key]
        else:
            if required and default is None:
                raise CliError(f"missing required option --{key.replace('_', '-')}")
            self.resolved[key] = default
            return default
        try:
            value = parse(raw) if parse else raw
        except CliError:
            raise
        except Exception as exc:
            raise CliError(f"bad value for {key}: {raw!r} ({exc})") from exc
        self.resolved[key] = value
        return value

    def manifest(self, command: str, schema: str) -> dict:
        reverse = {v: k for k, v in _KEY_ALIASES.items()}
        entries = {"command": command, "version": __version__, "schema": schema}
        for key, value in self.resolved.items():
            if key in ("out", "plot", "workers", "config"):
                continue
            if isinstance(value, (list, tuple)):
                entries[reverse.get(key, key)] = ",".join(str(v) for v in value)
            elif value is not None:
                entries[reverse.get(key, key)] = str(value)
        return entries


def _floats(text) -> list:
    if isinstance(text, list):
        return [float(v) for v in text]
    vals = [float(p) for p in str(text).split(",") if p.strip()]
    return vals


def _positive_float(text) -> float:
    v = float(text)
    if not (v > 0.0 and math.isfinite(v)):
        raise ValueError("must be a positive real")
    return v


def _nonneg_float(text) -> float:
    v = float(text)
    if not (v >= 0.0 and math.isfinite(v)):
        raise ValueError("must be a nonnegative real")
    return v


def _positive_int(text) -> int:
    v = int(text)
    if v < 1:
        raise ValueError("must be a positive integer")
    return v


def _seed(text) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    return v


def _confidence(text) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise ValueError("confidence must lie strictly between 0 and 1")
    return v


# ---------------------------------------------------------------------------
# output handling


def _fmt_float(v: float) -> str:
    return f"{v:.17g}"


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return _fmt_float(v)
    return "" if v is None else str(v)


def _format_table(manifest: dict, columns: Sequence[str], rows: Sequence[Sequence],
                  fmt: str) -> str:
    if fmt == "csv":
        head = "".join(f"# {k}={manifest[k]}\n" for k in sorted(manifest))
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])
        return head + buf.getvalue()
    if fmt == "json":
        doc = {
            "manifest": dict(sorted(manifest.items())),
            "columns": list(columns),
            "rows": [[v for v in row] for row in rows],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise CliError(f"unknown output format {fmt!r}; use csv or json")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_rows(report: DiagnosticReport):
    return [(r.label, r.x, r.t, r.value, r.half_width, r.error or "") for r in report.rows]


def _write_report(report: DiagnosticReport, manifest: dict, out, fmt, plot) -> int:
    text = _format_table(manifest, ("label", "x", "t", "value", "half_width", "error"),
                         _report_rows(report), fmt)
    _emit(text, out)
    if plot:
        series: dict = {}
        for row in report.rows:
            if row.error is not None:
                continue
            try:
                t = float(row.t)
            except ValueError:
                t = float(len(series.get(f"{row.label} {row.x}", [])))
            series.setdefault(f"{row.label} {row.x}", []).append((t, row.value))
        svg = line_chart_svg(sorted(series.items()),
                             title=report.metadata.get("diagnostic", ""),
                             xlabel="t", ylabel="value")
        with open(plot, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    return 1 if report.failed_rows() else 0


# ---------------------------------------------------------------------------
# subcommands


_COMMON_KEYS = ("model", "lam", "seed", "samples", "confidence", "out", "format",
                "plot", "workers")


def _mc_settings(settings: Settings, default_samples: int = 10_000) -> McSettings:
    return McSettings(
        n_samples=settings.get("samples", default_samples, _positive_int),
        seed=settings.get("seed", 0, _seed),
        confidence=settings.get("confidence", 0.999, _confidence),
        workers=resolve_workers(settings.get("workers", None, _positive_int)),
    )


def cmd_exact_ctmc(args: argparse.Namespace) -> int:
    settings = Settings(args, ("n", "t", "f", "out", "format", "plot"))
    n = settings.get("n", parse=int, required=True)
    if n < 2:
        raise CliError("n >= 2 required: the chain has no level below 2")
    t = settings.get("t", 1.0, _nonneg_float)
    fspec = settings.get("f", None)
    fmt = settings.get("format", "csv")
    states = (CtmcState.low(n), CtmcState.high(n), CtmcState.zero())
    rows = []
    if fspec is None:
        for i in states:
            for j in states:
                rows.append(("p", f"{i}->{j}", f"{t:g}", transition_prob(i, j, t), 0.0, ""))
    else:
        f = _parse_function(fspec)
        proc = CtmcProcess()
        for i in states:
            rows.append(("ptf", str(i), f"{t:g}", proc.exact_expectation(f, i, t), 0.0, ""))
    text = _format_table(settings.manifest("exact-ctmc", "table-v1"),
                         ("label", "x", "t", "value", "half_width", "error"), rows, fmt)
    _emit(text, settings.get("out", None))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    settings = Settings(args, _COMMON_KEYS + ("x0", "horizon", "trajectories"))
    name = settings.get("model", required=True)
    if name == "ctmc":
        raise CliError("simulate dumps jump-system trajectories; ctmc has no map records")
    lam = settings.get("lam", 1.0, _positive_float)
    model, _ = _build_model(name, lam)
    x0 = settings.get("x0", parse=lambda s: _parse_initial(name, s), required=True)
    horizon = settings.get("horizon", 10.0, _nonneg_float)
    count = settings.get("trajectories", 1, _positive_int)
    seed = settings.get("seed", 0, _seed)
    fmt = settings.get("format", "csv")
    factory = StreamFactory(seed)
    rows = []
    for k in range(count):
        traj = sample_jump_chain(model, x0, horizon, factory.stream(0, k))
        for j in range(len(traj)):
            rows.append((k, j + 1, traj.tau[j], traj.xi[j], int(traj.index[j]), traj.phi[j]))
    text = _format_table(settings.manifest("simulate", "trajectories-v1"),
                         ("traj_id", "k", "tau_k", "xi_k", "index_k", "phi_k"), rows, fmt)
    _emit(text, settings.get("out", None))
    plot = settings.get("plot", None)
    if plot:
        series: dict = {}
        for tid, _, tau, _, _, phi in rows:
            series.setdefault(f"traj {tid}", []).append((tau, phi))
        with open(plot, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(line_chart_svg(sorted(series.items()), title=f"{name} trajectories",
                                    xlabel="t", ylabel="state"))
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    settings = Settings(args, _COMMON_KEYS + ("x0", "times", "f", "ball"))
    name = settings.get("model", required=True)
    lam = settings.get("lam", 1.0, _positive_float)
    process, _ = _build_model(name, lam)
    initials = settings.get(
        "x0", parse=lambda s: [_parse_initial(name, p) for p in str(s).split(",")],
        required=True)
    times = settings.get("times", parse=_floats, required=True)
    if not times:
        raise CliError("grid empty")
    functionals: list = []
    fspec = settings.get("f", None)
    if fspec is not None:
        functionals.append(_parse_function(fspec))
    ball_spec = settings.get("ball", None)
    if ball_spec is not None:
        parts = _floats(ball_spec)
        if len(parts) != 2:
            raise CliError("ball spec is <center>,<radius>")
        functionals.append(Ball(parts[0], parts[1]))
    if not functionals:
        raise CliError("need --f and/or --ball")
    mc = _mc_settings(settings)
    plan = SamplingPlan(process, tuple(initials), tuple(times), tuple(functionals),
                        mc.n_samples, mc.seed, confidence=mc.confidence)
    results = run_batch(plan, workers=mc.workers)
    rows = []
    failed = False
    for cell in results:
        if cell.error is not None:
            failed = True
            rows.append((cell.initial, cell.time, cell.functional,
                         math.nan, math.nan, mc.n_samples, mc.confidence, math.nan, cell.error))
        else:
            est = cell.estimate
            rows.append((cell.initial, cell.time, cell.functional, est.mean,
                         est.half_width, est.n_samples, est.confidence, est.value_bound, ""))
    text = _format_table(settings.manifest("estimate", "estimates-v1"),
                         ("x", "t", "functional", "mean", "half_width", "n_samples",
                          "confidence", "value_bound", "error"), rows, fmt=settings.get("format", "csv"))
    _emit(text, settings.get("out", None))
    plot = settings.get("plot", None)
    if plot:
        series: dict = {}
        for cell in results:
            if cell.error is None:
                series.setdefault(f"{cell.initial} {cell.functional}", []).append(
                    (cell.time, cell.estimate.mean))
        with open(plot, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(line_chart_svg(sorted(series.items()), title=f"{name} estimates",
                                    xlabel="t", ylabel="mean"))
    return 1 if failed else 0


def _auto_pairs(model_name: str):
    if model_name == "ctmc":
        return [(CtmcState.low(n), float(n)) for n in range(2, 51)]
    if model_name == "flip":
        return [(1.0 / n, float(n)) for n in (5, 10, 20)]
    raise CliError(f"no automatic witness pairs for model {model_name!r}; pass --pairs")


def _parse_pairs(model_name: str, text: str):
    pairs = []
    for chunk in str(text).split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "@" not in chunk:
            raise CliError(f"pair {chunk!r} must look like x@t")
        xtok, _, ttok = chunk.partition("@")
        pairs.append((_parse_initial(model_name, xtok), float(ttok)))
    if not pairs:
        raise CliError("no pairs given")
    return pairs


def cmd_diagnose(args: argparse.Namespace) -> int:
    sub = args.subdiagnostic
    if sub == "ec":
        settings = Settings(args, _COMMON_KEYS + ("f", "z", "xs", "window_start",
                                                  "window_end", "grid"))
        name = settings.get("model", required=True)
        process, _ = _build_model(name, settings.get("lam", 1.0, _positive_float))
        f = _parse_function(settings.get("f", "xmin1"))
        z = settings.get("z", parse=lambda s: _parse_initial(name, s), required=True)
        xs = settings.get("xs", parse=lambda s: [_parse_initial(name, p)
                                                 for p in str(s).split(",")], required=True)
        T = settings.get("window_start", 0.0, _nonneg_float)
        t_max = settings.get("window_end", required=True, parse=_nonneg_float)
        grid = settings.get("grid", None, _floats)
        if grid is None:
            grid = [T + (t_max - T) * k / 7 for k in range(8)] if t_max > T else [T]
            settings.resolved["grid"] = grid
        report = ec_profile(process, f, z, xs, T, t_max, grid, _mc_settings(settings))
    elif sub == "eprop":
        settings = Settings(args, _COMMON_KEYS + ("f", "z", "pairs"))
        name = settings.get("model", required=True)
        process, _ = _build_model(name, settings.get("lam", 1.0, _positive_float))
        f = _parse_function(settings.get("f", "xmin1"))
        default_z = "zero" if name == "ctmc" else "0"
        z = settings.get("z", parse=lambda s: _parse_initial(name, s), default=None)
        if z is None:
            z = _parse_initial(name, default_z)
            settings.resolved["z"] = default_z
        pairs_spec = settings.get("pairs", "auto")
        pairs = _auto_pairs(name) if pairs_spec == "auto" else _parse_pairs(name, pairs_spec)
        report = eproperty_witness(process, f, z, pairs, _mc_settings(settings))
    elif sub == "lowerbound":
        settings = Settings(args, _COMMON_KEYS + ("z", "eps", "x_grid", "t_grid"))
        name = settings.get("model", required=True)
        process, _ = _build_model(name, settings.get("lam", 1.0, _positive_float))
        z = settings.get("z", parse=lambda s: _parse_initial(name, s), required=True)
        eps = settings.get("eps", 0.1, _positive_float)
        x_grid = settings.get("x_grid", parse=lambda s: [_parse_initial(name, p)
                                                         for p in str(s).split(",")],
                              required=True)
        t_grid = settings.get("t_grid", parse=_floats, required=True)
        report = lower_bound_scan(process, z, eps, x_grid, t_grid, _mc_settings(settings))
    elif sub == "stability":
        settings = Settings(args, _COMMON_KEYS + ("z", "initials", "t_grid"))
        name = settings.get("model", required=True)
        process, _ = _build_model(name, settings.get("lam", 1.0, _positive_float))
        z = settings.get("z", parse=lambda s: _parse_initial(name, s), default=None)
        anchor = 0.0 if z is None else (z.value if hasattr(z, "value") else z)
        initials = settings.get("initials", parse=lambda s: [_parse_initial(name, p)
                                                             for p in str(s).split(",")],
                                required=True)
        t_grid = settings.get("t_grid", parse=_floats, required=True)
        report = stability_report(process, initials, t_grid,
                                  EmpiricalMeasure.point_mass(anchor), _mc_settings(settings))
    elif sub == "assumptions":
        settings = Settings(args, _COMMON_KEYS + ("x_grid", "n_trunc", "c2", "eps",
                                                  "t_search", "c2_x_grid"))
        name = settings.get("model", "halving")
        model, assume = _build_model(name, settings.get("lam", 1.0, _positive_float))
        if assume is None:
            raise CliError(f"model {name!r} carries no assumption data to audit")
        x_grid = settings.get("x_grid", None, _floats)
        if x_grid is None:
            x_grid = [10.0 * (k + 1) / 1000 for k in range(1000)]
            settings.resolved["x_grid"] = "0.01..10:1000"
        n_trunc = settings.get("n_trunc", 10, _positive_int)
        report = DiagnosticReport({"diagnostic": "assumptions", "model": model.name,
                                   "lambda": model.rate})
        moduli = (("omega=s", linear_modulus), ("omega=2(1-exp(-s))", halving_tv_modulus))
        report.add("b2_max_violation", f"{len(x_grid)}-point grid", "",
                   check_b2(model, assume, x_grid), 0.0)
        for label, om in moduli:
            report.add("b3_max_violation", label, "",
                       check_b3(model, assume, x_grid, omega=om), 0.0)
        b5_grid = [x for x in x_grid if x <= assume.eta] or [assume.eta]
        if assume.eta not in b5_grid:
            b5_grid.append(assume.eta)
        for label, om in moduli:
            report.add("b5_residual", label, f"x<={assume.eta:g}",
                       check_b5(model, assume, n_trunc, b5_grid, omega=om), 0.0)
        if settings.get("c2", False, lambda s: str(s).lower() in ("1", "true", "yes")):
            radii = settings.get("eps", [0.1], _floats)
            t_search = settings.get("t_search", 512.0, _positive_float)
            c2_grid = settings.get("c2_x_grid", [0.25, 1.0, 4.0], _floats)
            c2_report = check_c2(model, assume.anchor, radii, c2_grid, t_search,
                                 _mc_settings(settings, default_samples=2000))
            report.rows.extend(c2_report.rows)
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(f"unknown diagnostic {sub!r}")

    manifest = settings.manifest(f"diagnose-{sub}", "diagnostics-v1")
    return _write_report(report, manifest, settings.get("out", None),
                         settings.get("format", "csv"), settings.get("plot", None))


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--model", help="ctmc, flip, halving or a registered custom model")
    parser.add_argument("--lambda", dest="lam", help="jump rate")
    parser.add_argument("--seed", help="master seed (unsigned 64-bit)")
    parser.add_argument("--samples", help="trajectories per cell")
    parser.add_argument("--confidence", help="confidence level in (0, 1)")
    parser.add_argument("--workers", help="worker processes (default: ERGOKIT_WORKERS or 1)")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), help="output format")
    parser.add_argument("--plot", help="write an SVG line chart to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergokit",
        description="simulation and ergodicity diagnostics for jump processes on the half-line",
    )
    parser.add_argument("--version", action="version", version=f"ergokit {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("exact-ctmc", help="closed-form chain tables")
    p.add_argument("--config")
    p.add_argument("--n", help="cascade level (n >= 2)")
    p.add_argument("--t", help="time")
    p.add_argument("--f", help="test function (xmin1, const:<c>, bump:<lo>,<hi>,<eps>)")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--plot")
    p.set_defaults(func=cmd_exact_ctmc)

    p = commands.add_parser("simulate", help="dump jump-chain trajectories")
    _add_common(p)
    p.add_argument("--x0", help="initial point")
    p.add_argument("--horizon", help="time horizon")
    p.add_argument("--trajectories", help="number of trajectories")
    p.set_defaults(func=cmd_simulate)

    p = commands.add_parser("estimate", help="Monte Carlo expectation / hit tables")
    _add_common(p)
    p.add_argument("--x0", help="comma list of initial points")
    p.add_argument("--times", help="comma list of times")
    p.add_argument("--f", help="test function spec")
    p.add_argument("--ball", help="hit region <center>,<radius>")
    p.set_defaults(func=cmd_estimate)

    p = commands.add_parser("diagnose", help="ergodicity diagnostics")
    sub = p.add_subparsers(dest="subdiagnostic", required=True)

    d = sub.add_parser("ec", help="late-time sensitivity profile near an anchor")
    _add_common(d)
    d.add_argument("--f")
    d.add_argument("--z", help="anchor point")
    d.add_argument("--xs", help="comma list of probe points")
    d.add_argument("--window-start", dest="window_start")
    d.add_argument("--window-end", dest="window_end")
    d.add_argument("--grid", help="comma list of times inside the window")
    d.set_defaults(func=cmd_diagnose)

    d = sub.add_parser("eprop", help="equicontinuity failure witnesses")
    _add_common(d)
    d.add_argument("--f")
    d.add_argument("--z")
    d.add_argument("--pairs", help="'auto' or comma list of x@t")
    d.set_defaults(func=cmd_diagnose)

    d = sub.add_parser("lowerbound", help="late-time neighborhood hit floor")
    _add_common(d)
    d.add_argument("--z")
    d.add_argument("--eps")
    d.add_argument("--x-grid", dest="x_grid")
    d.add_argument("--t-grid", dest="t_grid")
    d.set_defaults(func=cmd_diagnose)

    d = sub.add_parser("stability", help="bounded-Lipschitz distance decay")
    _add_common(d)
    d.add_argument("--z", help="reference point mass location")
    d.add_argument("--initials", help="comma list of initial points")
    d.add_argument("--t-grid", dest="t_grid")
    d.set_defaults(func=cmd_diagnose)

    d = sub.add_parser("assumptions", help="contraction / modulus / budget audits")
    _add_common(d)
    d.add_argument("--x-grid", dest="x_grid")
    d.add_argument("--n-trunc", dest="n_trunc")
    d.add_argument("--c2", help="also run the reachability floor scan (true/false)")
    d.add_argument("--eps")
    d.add_argument("--t-search", dest="t_search")
    d.add_argument("--c2-x-grid", dest="c2_x_grid")
    d.set_defaults(func=cmd_diagnose)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
