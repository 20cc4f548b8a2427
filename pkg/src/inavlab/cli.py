"""Command-line interface: coefficient tables, scenario runs and frequency sweeps.

Settings may come from a plain ``key = value`` file given with ``--config``;
flags given on the command line take precedence.  Keys are the long flag
names with dashes or underscores (``fc``, ``samples``, ``variants`` ...).
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .earth import EarthModel
from .fiter import FiterConfig
from .scenario import (
    ScenarioConfig,
    log_frequencies,
    records_to_csv,
    resolve_variant,
    run_scenario,
    summarize,
    sweep,
    sweep_to_csv,
)
from .symbolic import (
    EXAMPLE_MOTION,
    emit_tables,
    expected_order_pattern,
    error_order_pattern,
    format_table_csv,
    format_table_text,
    random_order_check,
)

EXIT_NONCONVERGED = 3

log = logging.getLogger("inavlab")


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _csv_list(text, cast=str):
    return [cast(x.strip()) for x in str(text).split(",") if x.strip()]


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--variants", type=_csv_list, help="comma list, e.g. typical,enhanced,vpif,fiter")
    p.add_argument("--duration", type=float, help="seconds (default 600)")
    p.add_argument("--fs", type=float, help="sampling rate in Hz (default 100)")
    p.add_argument("--coning-angle", type=float, help="coning angle in degrees (default 10)")
    p.add_argument("--normal-gravity", action="store_const", const=True, help="latitude/height dependent gravity")
    p.add_argument("--tolerance", type=float, help="functional iteration tolerance (default 1e-16)")
    p.add_argument("--max-iterations", type=int, help="functional iteration cap (default N+1)")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--allow-nonconverged", action="store_const", const=True, help="exit 0 even if iteration hit its cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="inavlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("tables", help="exact attitude/velocity coefficient tables and error orders")
    t.add_argument("--random-trials", type=int, default=0)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--csv", action="store_true", help="CSV instead of aligned text")
    t.add_argument("--component", type=int, default=0, choices=(0, 1, 2))

    r = sub.add_parser("run", help="navigate one scenario and write per-epoch errors")
    r.add_argument("--fc", type=float, help="coning frequency in Hz")
    r.add_argument("--samples", type=int, help="samples per update N")
    r.add_argument("--every", type=int, help="record every k-th update (default 1)")
    _add_common(r)

    s = sub.add_parser("sweep", help="maximum errors over a log-spaced coning-frequency grid")
    s.add_argument("--fc-min", type=float)
    s.add_argument("--fc-max", type=float)
    s.add_argument("--points", type=int)
    s.add_argument("--samples", type=lambda x: _csv_list(x, int), help="comma list of N values")
    s.add_argument("--jobs", type=int, help="worker processes (default 1)")
    _add_common(s)
    return parser


_DEFAULTS = {
    "fc": 0.037,
    "samples": 2,
    "every": 1,
    "variants": "typical,enhanced,fiter",
    "duration": 600.0,
    "fs": 100.0,
    "coning_angle": 10.0,
    "normal_gravity": False,
    "tolerance": 1e-16,
    "max_iterations": None,
    "out": None,
    "allow_nonconverged": False,
    "fc_min": 0.01,
    "fc_max": 20.0,
    "points": 25,
    "jobs": 1,
}


def _bool(x):
    if isinstance(x, bool):
        return x
    return str(x).strip().lower() in ("1", "true", "yes", "on")


def _merge(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then explicit flags."""
    opts = dict(_DEFAULTS)
    if args.command == "sweep":
        opts["samples"] = "2"
    if getattr(args, "config", None):
        opts.update(read_config(args.config))
    for k, v in vars(args).items():
        if v is not None and k not in ("config", "command", "verbose"):
            opts[k] = v
    casts = {
        "fc": float,
        "duration": float,
        "fs": float,
        "coning_angle": float,
        "tolerance": float,
        "fc_min": float,
        "fc_max": float,
        "points": int,
        "jobs": int,
        "every": int,
        "normal_gravity": _bool,
        "allow_nonconverged": _bool,
    }
    for k, cast in casts.items():
        opts[k] = cast(opts[k])
    if opts["max_iterations"] is not None:
        opts["max_iterations"] = int(opts["max_iterations"])
    if isinstance(opts["variants"], str):
        opts["variants"] = _csv_list(opts["variants"])
    if args.command == "sweep":
        if not isinstance(opts["samples"], list):
            opts["samples"] = _csv_list(opts["samples"], int)
    else:
        opts["samples"] = int(opts["samples"])
    for name in opts["variants"]:
        resolve_variant(name)
    return opts


def _scenario(opts, fc, samples) -> ScenarioConfig:
    return ScenarioConfig(
        coning_angle_deg=opts["coning_angle"],
        fc=fc,
        fs=opts["fs"],
        samples=samples,
        duration=opts["duration"],
        earth=EarthModel(normal_gravity=opts["normal_gravity"]),
    )


def _fiter_cfg(opts) -> FiterConfig:
    m = opts["max_iterations"]
    return FiterConfig(tolerance=opts["tolerance"], max_attitude_iterations=m, max_velocity_iterations=m)


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_tables(args) -> int:
    t1, t2 = emit_tables(EXAMPLE_MOTION, args.component)
    fmt = format_table_csv if args.csv else format_table_text
    print(fmt(t1))
    print(fmt(t2))
    pattern = error_order_pattern(EXAMPLE_MOTION)
    print("error orders (first power of t that differs from the functional-iteration reference):")
    for label, order in pattern.items():
        print(f"  {label}: O(t^{order})")
    if args.random_trials > 0:
        results = random_order_check(args.random_trials, args.seed)
        bad = [(mc, p) for mc, p in results if p != expected_order_pattern(mc)]
        generic = sum(1 for mc, _ in results if expected_order_pattern(mc) == pattern)
        print(
            f"random check: {len(results)} draws (seed {args.seed}), {generic} generic, "
            f"{len(results) - generic} degenerate, {len(bad)} mismatches"
        )
        if bad:
            return 1
    return 0


def _nonconverged_exit(flagged: list, opts) -> int:
    if not flagged:
        return 0
    msg = "functional iteration hit its iteration cap: " + ", ".join(flagged)
    if opts["allow_nonconverged"]:
        log.warning(msg)
        return 0
    print(msg + " (pass --allow-nonconverged to accept)", file=sys.stderr)
    return EXIT_NONCONVERGED


def cmd_run(args) -> int:
    opts = _merge(args)
    cfg = _scenario(opts, opts["fc"], opts["samples"])
    t0 = time.perf_counter()
    records = run_scenario(cfg, opts["variants"], _fiter_cfg(opts), opts["every"])
    _emit(records_to_csv(records), opts["out"])
    summary = summarize(records)
    for label, m in summary.items():
        log.info("%s: max att %.3e rad, vel %.3e m/s, pos %.3e m, west-east %.3e m", label, m["att"], m["vel"], m["pos"], m["we"])
    log.info("done in %.1f s", time.perf_counter() - t0)
    return _nonconverged_exit([k for k, m in summary.items() if not m["converged"]], opts)


def cmd_sweep(args) -> int:
    opts = _merge(args)
    fcs = log_frequencies(opts["fc_min"], opts["fc_max"], opts["points"])
    base = _scenario(opts, float(fcs[0]), opts["samples"][0])
    rows = sweep(base, fcs, opts["variants"], _fiter_cfg(opts), jobs=opts["jobs"], samples=opts["samples"])
    _emit(sweep_to_csv(rows), opts["out"])
    flagged = sorted({f"{r[2]} at {r[0]:g} Hz" for r in rows if not r[7]})
    return _nonconverged_exit(flagged, opts)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    handlers = {"tables": cmd_tables, "run": cmd_run, "sweep": cmd_sweep}
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"inavlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
