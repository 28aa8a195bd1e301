"""Command-line front end.

Subcommands: times | spectrum | evolve | sweep | verify.  Common flags:
--config PATH, --out DIR, --workers N, --tol X, --set key=value.  All
outputs are deterministic for a given configuration; CSV files carry a
'# timestamp:' metadata line that is the only run-to-run difference.

Exit codes: 0 success, 2 configuration error, 3 numerical-quality error,
4 unresolved analysis.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from . import plots
from .analysis import extract_times
from .config import SWEEPABLE, RunConfig, load_config, parse_config, write_config
from .dynamics import WavePacketSpec, evolve, resonance_center_mode
from .errors import (
    BasisSizeError,
    BranchDegeneracyError,
    ConfigError,
    NumericalQualityError,
    ResourceLimitError,
    StencilError,
    UnresolvedPeriodError,
    UnsupportedRegimeError,
)
from .spectrum import build_spectrum
from .timescales import TimeScales, case_relations, closed_form_times, numeric_times
from .verify import run_checks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_ANALYSIS = 4

_NUMERIC_ERRORS = (
    NumericalQualityError,
    BranchDegeneracyError,
    StencilError,
    ResourceLimitError,
    BasisSizeError,
    UnsupportedRegimeError,
)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _load(args) -> RunConfig:
    config = RunConfig()
    if args.config:
        config = load_config(args.config, config)
    if args.tol is not None:
        config = config.with_(tol=args.tol)
    if args.workers is not None:
        config = config.with_(workers=args.workers)
    for item in args.set or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        config = parse_config(item, config)
    return config


def _outdir(args) -> Path:
    out = Path(args.out) if args.out else Path("qrevival-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(config: RunConfig, out: Path) -> None:
    write_config(config, out / "effective_config.txt",
                 header_lines=(f"timestamp: {_timestamp()}",
                               "effective configuration; re-run with "
                               "--config this_file to reproduce"))


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        if x == 0.0:
            return "0"
        return f"{x:.10g}"
    return str(x)


def _predicted_times(config: RunConfig) -> TimeScales:
    """Closed-form prediction, falling back to the resonance-center mode
    when the classical period is infinite (omega = 0) but the center is
    stable."""
    params = config.resonance_params()
    predicted = closed_form_times(params)
    if not math.isfinite(predicted.Tl_cl):
        mode = resonance_center_mode(params)
        if mode.stable:
            predicted = dataclasses.replace(
                predicted, Tl_cl=mode.period, Tl_Q=mode.quantum_recurrence_time,
                flags=predicted.flags + ("resonance_center",),
            )
    return predicted


def cmd_times(args) -> int:
    config = _load(args)
    out = _outdir(args)
    params = config.resonance_params()
    closed = closed_form_times(params)
    numeric = None
    numeric_note = ""
    if params.zeta != 0:
        try:
            numeric = numeric_times(params, step=config.k_step, tol=config.tol)
        except StencilError as err:
            numeric_note = str(err)
    else:
        numeric_note = "zeta = 0: no Mathieu form (case a)"

    rows = [("T0_cl", closed.T0_cl, numeric.T0_cl if numeric else None),
            ("T0_Q", closed.T0_Q, numeric.T0_Q if numeric else None),
            ("Tl_cl", closed.Tl_cl, numeric.Tl_cl if numeric else None),
            ("Tl_Q", closed.Tl_Q, numeric.Tl_Q if numeric else None),
            ("M_cl", closed.M_cl, numeric.M_cl if numeric else None),
            ("M_Q", closed.M_Q, numeric.M_Q if numeric else None),
            ("mu", closed.mu, numeric.mu if numeric else None),
            ("alpha", closed.alpha, numeric.alpha if numeric else None),
            ("beta", closed.beta, numeric.beta if numeric else None)]
    width = max(len(r[0]) for r in rows)
    print(f"{'quantity':<{width}}  {'closed_form':>16}  {'numeric':>16}")
    for name, cval, nval in rows:
        print(f"{name:<{width}}  {_fmt(cval):>16}  {_fmt(nval):>16}")
    print(f"regime: {closed.regime}"
          + (f"  flags: {','.join(closed.flags)}" if closed.flags else ""))
    if math.isfinite(closed.T0_Q):
        r_b, r_c = case_relations(closed)
        print(f"case residuals (closed): r_b = {_fmt(r_b)}  r_c = {_fmt(r_c)}")
    if numeric_note:
        print(f"numeric: {numeric_note}")

    with open(out / "times.csv", "w", encoding="utf-8") as fh:
        fh.write(f"# timestamp: {_timestamp()}\n")
        fh.write("quantity,closed_form,numeric\n")
        for name, cval, nval in rows:
            fh.write(f"{name},{_fmt(cval)},{_fmt(nval)}\n")
        fh.write(f"regime,{closed.regime},"
                 f"{numeric.regime if numeric else 'n/a'}\n")
    _echo_config(config, out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    config = _load(args)
    out = _outdir(args)
    params = config.resonance_params()
    spec = build_spectrum(params, m_range=config.m_range, tol=config.tol)
    spec.to_csv(out / "spectrum.csv",
                header_lines=(f"timestamp: {_timestamp()}",
                              f"q: {spec.q}", f"nu0: {spec.nu0}"))
    if not args.no_plot:
        plots.spectrum_figure(spec, out / "spectrum.png")
    _echo_config(config, out)
    print(f"wrote {len(spec.entries)} entries "
          f"({len(spec.failures)} degenerate) to {out / 'spectrum.csv'}")
    return EXIT_OK


def cmd_evolve(args) -> int:
    config = _load(args)
    out = _outdir(args)
    params = config.resonance_params()
    packet = WavePacketSpec(mean_m=config.mean_m, sigma_m=config.sigma_m,
                            phase_gradient=config.theta0)
    trace = evolve(params, packet, dt=config.dt, steps=config.steps,
                   half_bandwidth=config.half_bandwidth)
    trace.to_csv(out / "trace.csv",
                 header_lines=(f"timestamp: {_timestamp()}",))
    predicted = _predicted_times(config)
    report = None
    try:
        report = extract_times(trace, predicted, threshold=config.threshold)
        report.write_json(out / "report.json")
        print(f"measured_Tcl = {_fmt(report.measured_Tcl)} "
              f"(predicted {_fmt(predicted.Tl_cl)}, "
              f"deviation {_fmt(report.deviations.get('Tcl_rel'))})")
        print(f"measured_TQ  = {_fmt(report.measured_TQ)} "
              f"(predicted {_fmt(predicted.Tl_Q)})")
    finally:
        if not args.no_plot:
            plots.trace_figure(trace, report, out / "trace.png")
        _echo_config(config, out)
    return EXIT_OK


@dataclasses.dataclass(frozen=True)
class SweepAxis:
    param: str
    values: tuple
    spacing: str


def _axis(config: RunConfig, which: str) -> SweepAxis | None:
    name = getattr(config, f"{which}_param")
    count = getattr(config, f"{which}_count")
    if not name or count < 1:
        return None
    lo = getattr(config, f"{which}_min")
    hi = getattr(config, f"{which}_max")
    spacing = getattr(config, f"{which}_spacing")
    if count == 1:
        values = (lo,)
    elif spacing == "log":
        ratio = (hi / lo) ** (1.0 / (count - 1))
        values = tuple(lo * ratio**i for i in range(count))
    else:
        step = (hi - lo) / (count - 1)
        values = tuple(lo + step * i for i in range(count))
    return SweepAxis(param=name, values=values, spacing=spacing)


_SWEEP_COLUMNS = (
    [f"cf_{f}" for f in TimeScales.FIELDS]
    + [f"num_{f}" for f in TimeScales.FIELDS]
    + ["r_b", "r_c", "note"]
)


def _sweep_row(task) -> dict:
    """One grid point; must stay a module-level function (pickled to workers)."""
    config_values, overrides, k_step, tol = task
    config = RunConfig(**config_values)
    field_overrides = {("lam" if k == "lambda" else k): v
                       for k, v in overrides.items()}
    params = config.resonance_params(**field_overrides)
    row = dict(overrides)
    closed = closed_form_times(params)
    for f in TimeScales.FIELDS:
        row[f"cf_{f}"] = getattr(closed, f)
    note = ""
    if params.zeta != 0:
        try:
            numeric = numeric_times(params, step=k_step, tol=tol)
            for f in TimeScales.FIELDS:
                row[f"num_{f}"] = getattr(numeric, f)
        except StencilError as err:
            note = f"numeric: {err}"
            for f in TimeScales.FIELDS:
                row[f"num_{f}"] = None
    else:
        note = "zeta = 0: case a, closed form only"
        for f in TimeScales.FIELDS:
            row[f"num_{f}"] = None
    if math.isfinite(closed.T0_Q) and math.isfinite(closed.T0_cl):
        row["r_b"], row["r_c"] = case_relations(closed)
    else:
        row["r_b"] = row["r_c"] = None
    row["note"] = note
    return row


def cmd_sweep(args) -> int:
    config = _load(args)
    out = _outdir(args)
    axis1 = _axis(config, "sweep1")
    axis2 = _axis(config, "sweep2")
    if axis1 is None and axis2 is not None:
        axis1, axis2 = axis2, None

    grid = []
    if axis1 is None:
        grid.append({})
    elif axis2 is None:
        grid.extend({axis1.param: v} for v in axis1.values)
    else:
        grid.extend({axis1.param: v1, axis2.param: v2}
                    for v1 in axis1.values for v2 in axis2.values)

    config_values = dataclasses.asdict(config)
    tasks = [(config_values, point, config.k_step, config.tol) for point in grid]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]

    axis_cols = [ax.param for ax in (axis1, axis2) if ax is not None]
    columns = axis_cols + _SWEEP_COLUMNS
    with open(out / "sweep.csv", "w", encoding="utf-8") as fh:
        fh.write(f"# timestamp: {_timestamp()}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            cells = []
            for col in columns:
                val = row.get(col)
                cells.append(val if col == "note" else _csv_num(val))
            fh.write(",".join(cells) + "\n")
    if not args.no_plot and axis1 is not None:
        plots.sweep_figure(rows, axis1, axis2, out / "sweep.png")
    _echo_config(config, out)
    print(f"wrote {len(rows)} rows to {out / 'sweep.csv'}")
    return EXIT_OK


def _csv_num(val) -> str:
    if val is None:
        return ""
    if isinstance(val, str):
        return val
    if isinstance(val, float):
        return f"{val:.17g}"
    return str(val)


def cmd_verify(args) -> int:
    selector = args.module
    results = run_checks(selector=selector, tol=args.tol)
    if not results:
        print(f"no checks match selector {selector!r}")
        return EXIT_CONFIG
    failed = 0
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        print(f"{tag} {res.name} - {res.detail}")
        failed += not res.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def _add_common(parser, with_plot=True):
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--out", help="output directory (default qrevival-out)")
    parser.add_argument("--workers", type=int, default=None,
                        help="parallel workers for sweep rows")
    parser.add_argument("--tol", type=float, default=None,
                        help="override the numeric tolerance")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a single config value (repeatable)")
    if with_plot:
        parser.add_argument("--no-plot", action="store_true",
                            help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrevival",
        description="Quantum recurrence times near a nonlinear resonance",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("times", help="closed-form and numeric time scales")
    _add_common(p, with_plot=False)
    p.set_defaults(fn=cmd_times)

    p = sub.add_parser("spectrum", help="quasi-energy spectrum CSV")
    _add_common(p)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("evolve", help="propagate a packet and analyze the trace")
    _add_common(p)
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("sweep", help="parameter sweep over a 1- or 2-axis grid")
    _add_common(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", help="run the invariant self-checks")
    p.add_argument("--module", default=None,
                   help="run only checks whose name starts with this prefix")
    p.add_argument("--tol", type=float, default=None,
                   help="override every check tolerance")
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as err:
        print(f"numerical-quality error: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except UnresolvedPeriodError as err:
        print(f"analysis unresolved: {err}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
