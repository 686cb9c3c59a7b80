"""Command-line entry point.

Subcommands::

    segclust simulate   --snr 1 --seed 7 --out sim/
    segclust fit        sim/signal.txt --sigma 1 --out fit/
    segclust experiment --snr 1 --reps 50 --seed 0 --out exp/
    segclust bound      --dprime 4 --dpp 12 --n 2000 --sigma 1

Exit status is 0 on success, 2 on invalid input and 3 on I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from segclust import io
from segclust.errors import ValidationError
from segclust.experiment import ExperimentConfig, run_experiment, write_experiment
from segclust.oracle import consistency_ratio, risk_bound
from segclust.penalty import PenaltySpec
from segclust.selector import estimate_sigma_mad, select
from segclust.signal import example1_spec, generate, rescale_spec, snr_to_sigma

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3

RESULT_HEADER = ("segments", "clusters", "d_prime", "d_double_prime", "crit", "runtime_ms")
CLUSTERS_HEADER = ("seg_start", "seg_end", "cluster", "level")


def _load_spec(args):
    if args.spec is not None:
        spec = io.read_spec(args.spec)
    else:
        spec = example1_spec(args.levels) if args.levels else example1_spec()
    if args.n is not None:
        spec = rescale_spec(spec, args.n)
    return spec


def _noise(args, spec) -> tuple[float | None, float | None]:
    if (args.snr is None) == (args.sigma is None):
        raise ValidationError("give exactly one of --snr and --sigma")
    return args.snr, args.sigma


def cmd_simulate(args) -> int:
    if args.reps != 1:
        raise ValidationError("simulate draws a single signal; use experiment for --reps > 1")
    spec = _load_spec(args)
    snr, sigma = _noise(args, spec)
    if sigma is None:
        sigma = snr_to_sigma(spec, snr)
    y = generate(spec, sigma, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_signal(out / "signal.txt", y.values)
    io.write_spec(out / "truth.csv", spec)
    io.write_signal(out / "truth_signal.txt", spec.truth())
    print(f"sigma={io.fmt(sigma)}")
    return EXIT_OK


def fit_signal(y, sigma: float, max_changes: int | None, k: float):
    n = len(y)
    if max_changes is None:
        max_changes = min(20, n - 1)
    spec = PenaltySpec(n=n, sigma2=sigma * sigma, max_changes=max_changes, k=k)
    return select(y, spec)


def write_fit(res, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_table(out / "result.csv", RESULT_HEADER, [(
        res.n_segments, res.n_clusters, res.d_prime, res.d_double_prime,
        res.crit_value, res.runtime_ms,
    )])
    io.write_table(out / "changepoints.csv", ("changepoint",), [(c,) for c in res.changepoints])
    rep = res.reported
    io.write_table(out / "clusters.csv", CLUSTERS_HEADER, [
        (a, b, lab, res.levels[lab - 1])
        for (a, b), lab in zip(rep.segmentation.segments, rep.labels)
    ])
    io.write_signal(out / "fitted.csv", res.fitted)


def cmd_fit(args) -> int:
    y = io.read_signal(args.signal)
    if args.sigma is None:
        if not args.estimate_sigma:
            raise ValidationError("--sigma is required (or pass --estimate-sigma)")
        sigma = estimate_sigma_mad(y)
        print(f"estimated sigma={io.fmt(sigma)}")
    else:
        sigma = args.sigma
    if not sigma > 0:
        raise ValidationError("sigma must be positive")
    res = fit_signal(y, sigma, args.max_changes, args.penalty_k)
    write_fit(res, args.out)
    print(
        f"segments={res.n_segments} clusters={res.n_clusters} "
        f"d'={res.d_prime} d''={res.d_double_prime} crit={io.fmt(res.crit_value)}"
    )
    return EXIT_OK


def cmd_experiment(args) -> int:
    spec = _load_spec(args)
    snr, sigma = _noise(args, spec)
    cfg = ExperimentConfig(
        spec=spec, reps=args.reps, seed=args.seed, snr=snr, sigma=sigma,
        max_changes=args.max_changes, k=args.penalty_k, tol=args.tol, jobs=args.jobs,
    )
    start = time.perf_counter()
    result = run_experiment(cfg)
    write_experiment(result, args.out)
    print(
        f"reps={len(result.records)} sigma={io.fmt(result.sigma)} "
        f"mean_cp_accuracy={io.fmt(result.mean_cp_accuracy)} "
        f"frac_mse_below_bound={io.fmt(result.frac_below_bound)} "
        f"bound_per_sample={io.fmt(result.bound)} "
        f"elapsed_s={time.perf_counter() - start:.1f}"
    )
    return EXIT_OK


def cmd_bound(args) -> int:
    total = risk_bound(args.dprime, args.dpp, args.n, args.sigma)
    print(f"bound={io.fmt(total)}")
    print(f"per_sample={io.fmt(total / args.n)}")
    print(f"consistency_ratio={io.fmt(consistency_ratio(args.dpp, args.n))}")
    return EXIT_OK


def _add_spec_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", type=Path, help="truth table (cluster_index,level,seg_start,seg_end); "
                   "defaults to the built-in 2000-sample benchmark")
    p.add_argument("--levels", type=float, nargs=5, metavar="L",
                   help="levels of the 5 benchmark clusters")
    p.add_argument("--n", type=int, help="rescale segment boundaries to this length")
    p.add_argument("--snr", type=float, help="smallest jump divided by the noise variance")
    p.add_argument("--sigma", type=float, help="noise standard deviation")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="segclust", description="Change point detection with shared segment levels."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw one noisy signal from a ground truth")
    _add_spec_args(p)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="select change points and clusters for a signal file")
    p.add_argument("signal", type=Path)
    p.add_argument("--sigma", type=float)
    p.add_argument("--estimate-sigma", action="store_true",
                   help="use a MAD estimate from first differences when --sigma is absent")
    p.add_argument("--max-changes", type=int)
    p.add_argument("--penalty-k", type=float, default=6.0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("experiment", help="replicated simulate-fit-evaluate runs")
    _add_spec_args(p)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--max-changes", type=int, default=20)
    p.add_argument("--penalty-k", type=float, default=6.0)
    p.add_argument("--tol", type=int, default=5)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("bound", help="adaptive risk bound for a true model")
    p.add_argument("--dprime", type=int, required=True)
    p.add_argument("--dpp", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
