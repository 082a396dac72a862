"""Command line interface.

Subcommands: simulate, audit, power, scenario, frame-check, plot. Exit
codes: 0 success, 2 configuration or input error, 3 runtime error;
frame-check exits 1 when the requested angles give a degenerate frame.
Seeds resolve as --seed, then the ACQF_SEED environment variable, then
the [run] section of the config file. CSV and JSON outputs are byte
deterministic for identical inputs; PNG figures (written by default, off
with --no-figures) are informational.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import fileio, plots
from .audit import audit_log
from .bloch import DegenerateFrame, make_ready_frame, measurement_frame
from .chemotaxis import World, drift_statistic, make_bacterium, run_scenario
from .config import ValidationError, parse_config, parse_grid
from .rng import MAX_SEED, make_generator
from .sim import power_curve, run_replicates


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _resolve_seed(cli_seed, config_seed: int) -> int:
    if cli_seed is not None:
        return cli_seed
    env = os.environ.get("ACQF_SEED")
    if env is not None:
        try:
            seed = int(env, 10)
        except ValueError:
            raise ValidationError("seed", f"ACQF_SEED is not an integer: {env!r}") from None
        if not 0 <= seed <= MAX_SEED:
            raise ValidationError("seed", f"ACQF_SEED out of range: {seed}")
        return seed
    return config_seed


def _seed_arg(text: str) -> int:
    try:
        seed = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits, got {text!r}")
    return seed


def cmd_simulate(args) -> int:
    config = parse_config(_read_text(args.config))
    seed = _resolve_seed(args.seed, config.seed)
    workers = args.workers if args.workers is not None else config.workers
    os.makedirs(args.out, exist_ok=True)
    runs = run_replicates(config.sim_params(), seed, config.replicates, workers)
    fileio.write_events_csv(os.path.join(args.out, "events.csv"), runs)
    summary = fileio.summarize_run(config, runs, seed)
    fileio.write_json(os.path.join(args.out, "summary.json"), summary.to_dict())
    if not args.no_figures:
        plots.save_summary_png(summary, os.path.join(args.out, "summary.png"))
    print(
        f"simulate: {summary.n_events} events over {summary.replicates} replicates "
        f"-> {args.out} (macro R frequency {summary.macro_r_frequency:.4f})"
    )
    return 0


def cmd_audit(args) -> int:
    records = fileio.read_events_csv(args.log)
    report = audit_log(records, alpha=args.alpha, pool_systems=args.pool_systems)
    os.makedirs(args.out, exist_ok=True)
    fileio.write_json(os.path.join(args.out, "audit.json"), fileio.audit_report_to_dict(report))
    fileio.write_audit_csv(os.path.join(args.out, "audit.csv"), report)
    if not args.no_figures:
        plots.save_audit_png(report, os.path.join(args.out, "audit.png"))
    print(
        f"audit: {report.n_channels} channels, {report.n_events} events, "
        f"fisher_p={report.fisher_p:.3g}, bonferroni_p={report.bonferroni_p:.3g} "
        f"-> verdict {report.verdict}"
    )
    return 0


def cmd_power(args) -> int:
    config = parse_config(_read_text(args.config))
    grid = parse_grid(_read_text(args.grid))
    seed = _resolve_seed(args.seed, config.seed)
    workers = args.workers if args.workers is not None else config.workers
    cells = power_curve(
        config.sim_params(),
        grid,
        replicates=config.replicates,
        alpha=config.alpha,
        seed=seed,
        workers=workers,
        pool_systems=config.pool_systems,
    )
    os.makedirs(args.out, exist_ok=True)
    fileio.write_power_csv(os.path.join(args.out, "power.csv"), cells)
    if not args.no_figures:
        plots.save_power_png(cells, os.path.join(args.out, "power.png"))
    print(f"power: {len(cells)} grid cells x {config.replicates} replicates -> {args.out}")
    return 0


def cmd_scenario(args) -> int:
    config = parse_config(_read_text(args.config))
    seed = _resolve_seed(args.seed, config.seed)
    rng = make_generator(seed, cell=0, replicate=0)
    pool_config = config.pool_config()
    world = World(c0=config.c0, gradient=config.gradient)
    bacterium = make_bacterium(pool_config, config.policy(), rng)
    trajectory = run_scenario(world, bacterium, config.steps, pool_config, rng)
    mean_step, stderr = drift_statistic(trajectory)
    os.makedirs(args.out, exist_ok=True)
    fileio.write_trajectory_csv(os.path.join(args.out, "trajectory.csv"), trajectory.positions)
    fileio.write_events_csv(os.path.join(args.out, "events.csv"), [(0, list(trajectory.events))])
    fileio.write_json(
        os.path.join(args.out, "summary.json"),
        {
            "seed": seed,
            "steps": config.steps,
            "c0": config.c0,
            "gradient": config.gradient,
            "final_position": trajectory.positions[-1],
            "mean_step": mean_step,
            "mean_step_stderr": stderr,
            "override_rate": (
                sum(1 for ev in trajectory.events if ev.overridden) / len(trajectory.events)
            ),
        },
    )
    if not args.no_figures:
        plots.save_trajectory_png(trajectory.positions, os.path.join(args.out, "trajectory.png"))
    print(
        f"scenario: {config.steps} steps, final position {trajectory.positions[-1]}, "
        f"mean step {mean_step:.4f} -> {args.out}"
    )
    return 0


def cmd_frame_check(args) -> int:
    try:
        frame = make_ready_frame(args.yaw, args.pitch)
    except DegenerateFrame as exc:
        print(f"degenerate frame: {exc}")
        return 1
    lab = measurement_frame()
    print(f"ready frame for yaw={args.yaw:g}, pitch={args.pitch:g}")
    for axis, label in zip(frame.axes, frame.labels):
        x, y, z = axis.as_tuple()
        print(f"  {label}: ({x: .6f}, {y: .6f}, {z: .6f})")
    a, b, c = frame.axes
    print(
        "orthogonality residuals: "
        f"|a.b|={abs(a.dot(b)):.3e} |a.c|={abs(a.dot(c)):.3e} |b.c|={abs(b.dot(c)):.3e}"
    )
    print("dot products with measurement axes:")
    for axis, label in zip(frame.axes, frame.labels):
        dots = " ".join(
            f"{m_label}={axis.dot(m_axis): .6f}"
            for m_axis, m_label in zip(lab.axes, lab.labels)
        )
        print(f"  {label}: {dots}")
    return 0


def cmd_plot(args) -> int:
    cells = fileio.read_power_csv(args.infile)
    plots.render_power_svg(cells, args.out)
    print(f"plot: {len(cells)} rows -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acqf",
        description="Spin-1/2 measurement pools, choice policies, and Born-rule audits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_figures_flag(p) -> None:
        p.add_argument(
            "--no-figures", action="store_true", help="skip the PNG figure output"
        )

    p = sub.add_parser("simulate", help="run seeded replicates and write the event log")
    p.add_argument("--config", required=True, help="INI config path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=_seed_arg, default=None, help="64-bit master seed")
    p.add_argument("--workers", type=int, default=None, help="parallel worker processes")
    add_figures_flag(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("audit", help="test an event log against Born predictions")
    p.add_argument("--log", required=True, help="events.csv path")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p.add_argument(
        "--pool-systems",
        dest="pool_systems",
        action="store_true",
        help="merge channel statistics across system ids",
    )
    p.add_argument("--out", required=True, help="output directory")
    add_figures_flag(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("power", help="Monte Carlo detection power over a grid")
    p.add_argument("--config", required=True, help="INI config path")
    p.add_argument("--grid", required=True, help="INI grid path ([grid] n_systems/beta/trials)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=_seed_arg, default=None, help="64-bit master seed")
    p.add_argument("--workers", type=int, default=None, help="parallel worker processes")
    add_figures_flag(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("scenario", help="run the chemotaxis walk and write the trajectory")
    p.add_argument("--config", required=True, help="INI config path")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=_seed_arg, default=None, help="64-bit master seed")
    add_figures_flag(p)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("frame-check", help="print a ready frame and its residuals")
    p.add_argument("--yaw", type=float, required=True, help="yaw angle in radians")
    p.add_argument("--pitch", type=float, required=True, help="pitch angle in radians")
    p.set_defaults(func=cmd_frame_check)

    p = sub.add_parser("plot", help="render power.csv to a self-contained SVG chart")
    p.add_argument("--in", dest="infile", required=True, help="power.csv path")
    p.add_argument("--out", required=True, help="output SVG path")
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, IsADirectoryError, NotADirectoryError) as exc:
        # Covers ParseError, ValidationError, DegenerateFrame, EmptyLog,
        # and malformed input files.
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main(sys.argv[1:]))
