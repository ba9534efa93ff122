"""Command-line front end: single runs, paired batches, and the decoder
runtime-scaling study."""

from __future__ import annotations

import argparse
import csv
import io
import os
import statistics
import sys

import numpy as np

from .config import ConfigError, build_scenario, parse_config
from .sim import FRAMEWORKS, RunMetrics, bits_ratio, cost_ratio, run_scenario

__all__ = ["main", "cmd_run", "cmd_batch", "cmd_timing_study"]

EXIT_OK = 0
EXIT_RUN_FAILURE = 1
EXIT_CONFIG_ERROR = 2


def _atomic_write(path: str, data) -> None:
    """Write bytes/text via temp file + rename so interrupts leave nothing."""
    tmp = path + ".tmp"
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(tmp, mode) as fh:
        fh.write(data)
    os.replace(tmp, path)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _write_trace(metrics: RunMetrics, out_dir: str, tag: str = "") -> None:
    suffix = f"_{tag}" if tag else ""
    trace_rows = [
        (
            rec.t,
            rec.actor_pos[0],
            rec.actor_pos[1],
            "" if rec.sensor_pos is None else rec.sensor_pos[0],
            "" if rec.sensor_pos is None else rec.sensor_pos[1],
            rec.target_pos[0],
            rec.target_pos[1],
            "" if rec.theta is None else rec.theta,
            rec.bits_step,
            f"{rec.plan_cost:.9f}",
        )
        for rec in metrics.trace
    ]
    _atomic_write(
        os.path.join(out_dir, f"trace{suffix}.csv"),
        _csv_text(
            [
                "t",
                "actor_row",
                "actor_col",
                "sensor_row",
                "sensor_col",
                "target_row",
                "target_col",
                "theta",
                "bits_step",
                "plan_cost",
            ],
            trace_rows,
        ),
    )
    # decoder timings are nondeterministic, so they live in a sidecar file
    _atomic_write(
        os.path.join(out_dir, f"timings{suffix}.csv"),
        _csv_text(
            ["t", "decoder_seconds"],
            [(i, f"{s:.9f}") for i, s in enumerate(metrics.decoder_seconds)],
        ),
    )
    _atomic_write(
        os.path.join(out_dir, f"metrics{suffix}.csv"),
        _csv_text(
            ["cost", "bits", "steps", "reached"],
            [(f"{metrics.cost:.9f}", metrics.bits, metrics.steps, int(metrics.reached))],
        ),
    )


def _write_snapshots(metrics: RunMetrics, scenario, out_dir: str) -> None:
    rows, cols = scenario.grid.shape
    for t, estimate in metrics.belief_snapshots.items():
        img = np.clip(np.round(estimate.reshape(rows, cols) * 200), 0, 200)
        img = img.astype(np.uint8)
        for r, c in metrics.traversed[: t + 2]:
            img[r, c] = 255
        header = f"P5\n{cols} {rows}\n255\n".encode()
        _atomic_write(
            os.path.join(out_dir, f"belief_t{t:04d}.pgm"), header + img.tobytes()
        )
    if metrics.belief_snapshots:
        legend = (
            "Belief snapshot graymaps.\n"
            "Pixel 0-200: estimated cell value scaled by 200"
            " (0 = traversable, 200 = blocked).\n"
            "Pixel 255: cell traversed by the Actor up to that timestep.\n"
        )
        _atomic_write(os.path.join(out_dir, "belief_legend.txt"), legend)


def _default_out(args) -> str:
    out = args.out or os.environ.get("MAPCOMM_OUT", "out")
    os.makedirs(out, exist_ok=True)
    return out


def cmd_run(args) -> int:
    config = parse_config(args.config)
    overrides = {}
    if args.framework:
        overrides["framework"] = args.framework
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.decoder:
        overrides["decoder"] = args.decoder
    if args.sensor_horizon is not None:
        config["sensor"]["horizon"] = args.sensor_horizon
    scenario = build_scenario(config, **overrides)
    out_dir = _default_out(args)
    metrics = run_scenario(scenario, snapshot_every=args.snapshot_every)
    _write_trace(metrics, out_dir)
    _write_snapshots(metrics, scenario, out_dir)
    print(
        f"framework={scenario.framework} cost={metrics.cost:.3f} "
        f"bits={metrics.bits} steps={metrics.steps} reached={metrics.reached}"
    )
    return EXIT_OK


def cmd_batch(args) -> int:
    config = parse_config(args.config)
    frameworks = [f.strip() for f in args.frameworks.split(",")]
    for fw in frameworks:
        if fw not in FRAMEWORKS:
            raise ConfigError(f"--frameworks: unknown framework {fw!r}")
    out_dir = _default_out(args)
    base_seed = args.seed if args.seed is not None else config["run"]["seed"]

    results: dict[str, list[RunMetrics]] = {fw: [] for fw in frameworks}
    baselines: dict[str, dict[int, RunMetrics]] = {"U": {}, "FI": {}}
    needed = set(frameworks) | {"U", "FI"}
    for i in range(args.runs):
        seed = base_seed + i
        per_seed = {}
        for fw in sorted(needed):
            scenario = build_scenario(config, framework=fw, seed=seed)
            per_seed[fw] = run_scenario(scenario)
        for fw in frameworks:
            results[fw].append(per_seed[fw])
        baselines["U"][seed] = per_seed["U"]
        baselines["FI"][seed] = per_seed["FI"]

    rows = []
    for fw in frameworks:
        runs = results[fw]
        costs = [m.cost for m in runs]
        bits = [m.bits for m in runs]
        r_cost = cost_ratio(
            (m.cost, baselines["U"][base_seed + i].cost)
            for i, m in enumerate(runs)
        )
        r_bits = bits_ratio(
            (m.bits, baselines["FI"][base_seed + i].bits)
            for i, m in enumerate(runs)
        )
        rows.append(
            (
                fw,
                f"{statistics.mean(costs):.3f}",
                f"{statistics.pstdev(costs):.3f}",
                f"{statistics.mean(bits):.1f}",
                f"{statistics.pstdev(bits):.1f}",
                f"{100 * r_cost:.1f}",
                f"{100 * r_bits:.1f}",
            )
        )
        print(
            f"{fw}: mean_cost={rows[-1][1]} +- {rows[-1][2]} "
            f"mean_bits={rows[-1][3]} +- {rows[-1][4]} "
            f"r_cost={rows[-1][5]}% r_bits={rows[-1][6]}%"
        )
    _atomic_write(
        os.path.join(out_dir, "batch_summary.csv"),
        _csv_text(
            [
                "framework",
                "mean_cost",
                "std_cost",
                "mean_bits",
                "std_bits",
                "r_cost_pct",
                "r_bits_pct",
            ],
            rows,
        ),
    )
    return EXIT_OK


def cmd_timing_study(args) -> int:
    config = parse_config(args.config)
    horizons = [int(h) for h in args.horizons.split(",")]
    out_dir = _default_out(args)
    rows = []
    # warmup pass so cold caches don't skew the first measured horizon
    for decoder in ("iterative", "qp"):
        warm = dict(config)
        warm["sensor"] = dict(config["sensor"], horizon=min(horizons))
        run_scenario(build_scenario(warm, decoder=decoder, step_cap=min(horizons)))
    for horizon in horizons:
        for decoder in ("iterative", "qp"):
            cfg = dict(config)
            cfg["sensor"] = dict(config["sensor"], horizon=horizon)
            # cap the run at the horizon so every step has an active sensor
            scenario = build_scenario(cfg, decoder=decoder, step_cap=horizon)
            metrics = run_scenario(scenario)
            mean_s = statistics.mean(metrics.decoder_seconds)
            rows.append((horizon, decoder, f"{mean_s:.9f}", metrics.steps))
            print(
                f"horizon={horizon} decoder={decoder} "
                f"mean_step_seconds={mean_s:.6f} steps={metrics.steps}"
            )
    _atomic_write(
        os.path.join(out_dir, "timing_study.csv"),
        _csv_text(["sensor_horizon", "decoder", "mean_step_seconds", "steps"], rows),
    )
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mapcomm",
        description="Task-driven map compression simulator (Actor/Sensor grid world)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="scenario config file (TOML)")
        p.add_argument("--out", default=None, help="output directory (or $MAPCOMM_OUT)")
        p.add_argument("--seed", type=int, default=None)

    p_run = sub.add_parser("run", help="run one scenario")
    common(p_run)
    p_run.add_argument("--framework", choices=FRAMEWORKS, default=None)
    p_run.add_argument("--decoder", choices=("iterative", "qp"), default=None)
    p_run.add_argument("--sensor-horizon", type=int, default=None)
    p_run.add_argument("--snapshot-every", type=int, default=0, metavar="K")
    p_run.set_defaults(func=cmd_run)

    p_batch = sub.add_parser("batch", help="paired U/AS/FI runs over many seeds")
    common(p_batch)
    p_batch.add_argument("--runs", type=int, default=1)
    p_batch.add_argument("--frameworks", default="U,AS,FI")
    p_batch.set_defaults(func=cmd_batch)

    p_time = sub.add_parser(
        "timing-study", help="decoder runtime vs sensor horizon (iterative vs QP)"
    )
    common(p_time)
    p_time.add_argument("--horizons", default="10,20,40,80")
    p_time.set_defaults(func=cmd_timing_study)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUN_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
