"""Command line interface.

Subcommands: ``synth`` makes a reproducible belt, ``run`` executes one
search, ``sweep`` grids deterministic setups over beam width and branching
factor, ``batch`` runs one setup over many seeds, ``report`` turns saved
event logs into metric series, and ``correlate`` measures how well the
phasing indicator predicts true leg costs. Outputs are delimited text;
logs are JSON lines. Exit code 0 on success, 1 with a diagnostic on
configuration or data errors.
"""

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .harness import (
    AsteroidDataset,
    DatasetError,
    attainment_function,
    count_distinct_solutions,
    default_root_state,
    feasible_leg_fraction,
    generate_synthetic_belt,
    hypervolume_series,
    indicator_correlation_report,
    load_dataset,
    save_dataset,
)
from .mission import MissionConfig
from .phasing import PhasingConfig
from .search import RunLog, SearchParams, run_search


def _add_search_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dataset", required=True, help="asteroid catalog file")
    sub.add_argument("--bw", type=int, default=20, help="beam width")
    sub.add_argument("--bf", type=int, default=25, help="branching factor")
    sub.add_argument("--q0", type=float, default=0.5, help="greedy branching probability")
    sub.add_argument("--alpha", type=float, default=1.0, help="pheromone exponent")
    sub.add_argument("--beta", type=float, default=1.0, help="heuristic exponent")
    sub.add_argument("--k", type=int, default=3, help="pheromone population size per node")
    sub.add_argument("--gamma", type=float, default=50.0, help="rank-decay exponent")
    sub.add_argument("--dt-ref", type=float, default=125.0, help="reference transfer time, days")
    sub.add_argument("--budget", type=int, default=100_000, help="optimized-leg budget")
    sub.add_argument("--root", type=int, default=None, help="root body id")
    sub.add_argument("--root-epoch", type=float, default=None, help="root epoch, MJD")
    sub.add_argument("--max-revs", type=int, default=1, help="max Lambert revolutions")


def _search_setup(args) -> tuple[AsteroidDataset, MissionConfig, PhasingConfig]:
    dataset = load_dataset(args.dataset)
    config = MissionConfig(max_revs=args.max_revs)
    phasing_cfg = PhasingConfig(reference_transfer_time=args.dt_ref, gamma=args.gamma)
    return dataset, config, phasing_cfg


def _summarize(tag, archive, log, reference):
    hv = archive.hypervolume(reference)
    print(
        f"{tag} legs={log.leg_count} best_score={archive.best_score} "
        f"front={len(archive.front)} hypervolume={hv:.4f} "
        f"feasible_fraction={feasible_leg_fraction(log):.3f}"
    )


def _cmd_synth(args) -> int:
    dataset = generate_synthetic_belt(
        count=args.count,
        seed=args.seed,
        a_range_au=tuple(args.a_range),
        e_range=tuple(args.e_range),
        i_range_deg=tuple(args.i_range),
        epoch=args.epoch,
    )
    save_dataset(dataset, args.out)
    print(f"wrote {dataset.n} bodies to {args.out}")
    return 0


def _cmd_run(args) -> int:
    dataset, config, phasing_cfg = _search_setup(args)
    root = default_root_state(dataset, config, body=args.root, epoch=args.root_epoch)
    params = SearchParams(
        beam_width=args.bw,
        branching_factor=args.bf,
        q0=args.q0,
        alpha=args.alpha,
        beta=args.beta,
        population_size=args.k,
        leg_budget=args.budget,
        seed=args.seed,
    )
    started = time.perf_counter()
    archive, log = run_search(root, params, args.mode, config, phasing_cfg, dataset.eph)
    elapsed = time.perf_counter() - started
    reference = (config.usable_budget, config.max_mission_time)
    _summarize(f"mode={args.mode} seed={args.seed}", archive, log, reference)
    print(f"runtime_s={elapsed:.2f}")
    for traj in archive.front:
        score, mass, years = traj.objectives()
        print(f"solution score={score} mass_kg={mass:.3f} time_yr={years:.4f} "
              f"sequence={','.join(str(b) for b in traj.visited)}")
    if args.log:
        log.save(args.log)
        print(f"log written to {args.log}")
    return 0


def _cmd_sweep(args) -> int:
    dataset, config, phasing_cfg = _search_setup(args)
    root = default_root_state(dataset, config, body=args.root, epoch=args.root_epoch)
    bws = [int(t) for t in args.bw_grid.split(",")]
    bfs = [int(t) for t in args.bf_grid.split(",")]
    reference = (config.usable_budget, config.max_mission_time)
    print("bw,bf,legs,best_score,front,hypervolume,feasible_fraction")
    for bw in bws:
        for bf in bfs:
            params = SearchParams(
                beam_width=bw,
                branching_factor=bf,
                leg_budget=args.budget,
                seed=args.seed,
            )
            archive, log = run_search(root, params, "deterministic", config, phasing_cfg, dataset.eph)
            print(
                f"{bw},{bf},{log.leg_count},{archive.best_score},{len(archive.front)},"
                f"{archive.hypervolume(reference):.4f},{feasible_leg_fraction(log):.4f}"
            )
    return 0


def _parse_seeds(spec: str) -> list[int]:
    if ":" in spec:
        lo, hi = spec.split(":", 1)
        return list(range(int(lo), int(hi)))
    return [int(t) for t in spec.split(",")]


def _batch_one(payload):
    dataset, config, phasing_cfg, args_dict, seed = payload
    root = default_root_state(dataset, config, body=args_dict["root"], epoch=args_dict["root_epoch"])
    params = SearchParams(
        beam_width=args_dict["bw"],
        branching_factor=args_dict["bf"],
        q0=args_dict["q0"],
        alpha=args_dict["alpha"],
        beta=args_dict["beta"],
        population_size=args_dict["k"],
        leg_budget=args_dict["budget"],
        seed=seed,
    )
    archive, log = run_search(root, params, args_dict["mode"], config, phasing_cfg, dataset.eph)
    return seed, archive, log


def _cmd_batch(args) -> int:
    dataset, config, phasing_cfg = _search_setup(args)
    seeds = _parse_seeds(args.seeds)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    args_dict = dict(
        bw=args.bw, bf=args.bf, q0=args.q0, alpha=args.alpha, beta=args.beta,
        k=args.k, budget=args.budget, mode=args.mode, root=args.root,
        root_epoch=args.root_epoch,
    )
    payloads = [(dataset, config, phasing_cfg, args_dict, seed) for seed in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_batch_one, payloads))
    else:
        results = [_batch_one(p) for p in payloads]
    reference = (config.usable_budget, config.max_mission_time)
    results.sort(key=lambda r: r[0])
    for seed, archive, log in results:
        log.save(out_dir / f"run_seed{seed}.jsonl")
        _summarize(f"seed={seed}", archive, log, reference)
    return 0


def _cmd_report(args) -> int:
    logs = [RunLog.load(p) for p in args.logs]
    if args.metric == "distinct":
        for path, log in zip(args.logs, logs):
            for legs, count in count_distinct_solutions(log, args.min_score):
                print(f"{path}\t{legs}\t{count}")
    elif args.metric == "hypervolume":
        for path, log in zip(args.logs, logs):
            for legs, hv in hypervolume_series(log, args.score, tuple(args.ref)):
                print(f"{path}\t{legs}\t{hv:.6f}")
    elif args.metric == "feasibility":
        for path, log in zip(args.logs, logs):
            print(f"{path}\t{feasible_leg_fraction(log):.6f}")
    elif args.metric == "eaf":
        fronts = []
        for log in logs:
            front = [
                (e["mass"], e["time"])
                for e in log.events
                if e["kind"] == "solution_found" and e["score"] == args.score
            ]
            fronts.append(front)
        mass_axis = np.linspace(args.mass_grid[0], args.mass_grid[1], int(args.mass_grid[2]))
        time_axis = np.linspace(args.time_grid[0], args.time_grid[1], int(args.time_grid[2]))
        mm, tt = np.meshgrid(mass_axis, time_axis)
        grid = np.column_stack([mm.ravel(), tt.ravel()])
        att = attainment_function(fronts, grid)
        print("mass\ttime\tattainment")
        for (m, t), a in zip(grid, att):
            print(f"{m:.3f}\t{t:.5f}\t{a:.4f}")
    return 0


def _cmd_correlate(args) -> int:
    dataset = load_dataset(args.dataset)
    epoch = args.epoch if args.epoch is not None else float(dataset.eph.epoch0[0])
    report = indicator_correlation_report(
        dataset,
        epoch=epoch,
        sample_size=args.samples,
        seed=args.seed,
        source=args.source,
    )
    print(
        f"source={report.source} epoch={report.epoch} sampled={report.n_sampled} "
        f"feasible={report.n_feasible}\n"
        f"spearman_two_sided={report.spearman_two_sided:.4f} "
        f"spearman_forward={report.spearman_forward:.4f}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="astrobeam",
        description="Multi-rendezvous mission search over asteroid catalogs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic asteroid belt")
    p_synth.add_argument("--count", type=int, required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--a-range", type=float, nargs=2, default=(2.0, 3.5), metavar=("LO", "HI"))
    p_synth.add_argument("--e-range", type=float, nargs=2, default=(0.0, 0.3), metavar=("LO", "HI"))
    p_synth.add_argument("--i-range", type=float, nargs=2, default=(0.0, 10.0), metavar=("LO", "HI"))
    p_synth.add_argument("--epoch", type=float, default=59000.0)
    p_synth.set_defaults(func=_cmd_synth)

    p_run = sub.add_parser("run", help="run one search")
    _add_search_args(p_run)
    p_run.add_argument("--mode", choices=("deterministic", "stochastic", "paco"), default="paco")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--log", default=None, help="write the event log here (JSON lines)")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="deterministic sweep over bw/bf grids")
    _add_search_args(p_sweep)
    p_sweep.add_argument("--bw-grid", required=True, help="comma list, e.g. 5,10,20")
    p_sweep.add_argument("--bf-grid", required=True, help="comma list, e.g. 25,50,125")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_batch = sub.add_parser("batch", help="one setup across many seeds")
    _add_search_args(p_batch)
    p_batch.add_argument("--mode", choices=("deterministic", "stochastic", "paco"), default="paco")
    p_batch.add_argument("--seeds", required=True, help="range lo:hi or comma list")
    p_batch.add_argument("--out-dir", required=True)
    p_batch.add_argument("--jobs", type=int, default=1)
    p_batch.set_defaults(func=_cmd_batch)

    p_report = sub.add_parser("report", help="metric series from saved logs")
    p_report.add_argument("--metric", choices=("distinct", "hypervolume", "feasibility", "eaf"), required=True)
    p_report.add_argument("--logs", nargs="+", required=True)
    p_report.add_argument("--score", type=int, default=16)
    p_report.add_argument("--min-score", type=int, default=16)
    p_report.add_argument("--ref", type=float, nargs=2, default=(3500.0, 15.0), metavar=("MASS", "YEARS"))
    p_report.add_argument("--mass-grid", type=float, nargs=3, default=(0.0, 3500.0, 50), metavar=("LO", "HI", "N"))
    p_report.add_argument("--time-grid", type=float, nargs=3, default=(0.0, 15.0, 50), metavar=("LO", "HI", "N"))
    p_report.set_defaults(func=_cmd_report)

    p_corr = sub.add_parser("correlate", help="indicator vs ground-truth leg cost")
    p_corr.add_argument("--dataset", required=True)
    p_corr.add_argument("--epoch", type=float, default=None)
    p_corr.add_argument("--samples", type=int, default=100)
    p_corr.add_argument("--seed", type=int, default=0)
    p_corr.add_argument("--source", type=int, default=None)
    p_corr.set_defaults(func=_cmd_correlate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
