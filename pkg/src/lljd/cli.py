"""Command-line surface tying the modules into reproducible runs.

Commands: simulate, estimate, mc-study, empirical. Exit codes: 0 on success,
2 on validation errors, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .bandwidth import cross_validate, default_cv_grid, rule_of_thumb
from .errors import NumericalError, ValidationError
from .estimators import EstimatorConfig, default_grid, estimate_curve
from .inference import attach_bands
from .io import (
    RunManifest,
    emit_report,
    ingest_prices,
    read_columns_csv,
    sha256_file,
    write_curve_csv,
    write_cv_csv,
    write_path_csv,
    write_proxy_csv,
)
from .kernels import get_kernel
from .mcstudy import (
    METHOD_ALIASES,
    McConfig,
    example_model,
    qq_data,
    run_study,
    table_presets,
)
from .proxy import ProxySeries, build_proxy
from .simulate import (
    CompoundPoisson,
    JumpSizeDist,
    NoJumps,
    PathConfig,
    VarianceGamma,
    default_model,
    simulate_path,
)

__all__ = ["main"]


def _parse_delta(text: str) -> float:
    """Accept plain floats or fractions like 1/48."""
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"cannot parse step {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lljd",
        description=(
            "Nonparametric drift and second-moment estimation for "
            "jump-diffusions observed through their integral"
        ),
    )
    parser.add_argument("--version", action="version", version=f"lljd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate an integrated jump-diffusion path")
    sim.add_argument("--model", default="default", choices=["default"])
    sim.add_argument("--jump", default="none", choices=["none", "cp", "vg"])
    sim.add_argument("--t", type=float, default=10.0, help="observation span")
    sim.add_argument("--n", type=int, default=1000, help="number of observations")
    sim.add_argument("--seed", type=int, default=1)
    sim.add_argument("--substeps", type=int, default=10)
    sim.add_argument("--burn-in", type=int, default=200)
    sim.add_argument("--x0", type=float, default=0.0)
    sim.add_argument("--y0", type=float, default=0.0)
    sim.add_argument("--lambda", dest="lam", type=float, default=2.0,
                     help="compound Poisson intensity")
    sim.add_argument("--size-dist", default="normal", choices=["normal", "cauchy"])
    sim.add_argument("--size-loc", type=float, default=0.0)
    sim.add_argument("--size-scale", type=float, default=0.036)
    sim.add_argument("--vg-c", type=float, default=-0.2)
    sim.add_argument("--vg-eta", type=float, default=0.2)
    sim.add_argument("--vg-b", type=float, default=0.23)
    sim.add_argument("--out", required=True)

    est = sub.add_parser("estimate", help="estimate drift/second-moment curves")
    est.add_argument("--in", dest="infile", required=True,
                     help="CSV with an xtilde column (proxy) or a y column (integrated path)")
    est.add_argument("--method", default="ll", choices=["ll", "nw"])
    est.add_argument("--h", default="auto",
                     help="'auto' (rule of thumb), 'cv' (cross-validation) or a number")
    est.add_argument("--kernel", default="gaussian", choices=["gaussian", "epanechnikov"])
    est.add_argument("--alignment", default="aligned", choices=["aligned", "as_written"])
    est.add_argument("--delta", default=None, help="override the step (float or a/b)")
    est.add_argument("--grid-lo", type=float, default=None)
    est.add_argument("--grid-hi", type=float, default=None)
    est.add_argument("--grid-n", type=int, default=101)
    est.add_argument("--bands", type=float, default=None, metavar="ALPHA",
                     help="append confidence band columns at this level")
    est.add_argument("--pilot-mult", type=float, default=2.0,
                     help="pilot bandwidth multiple for curvature estimation")
    est.add_argument("--cv-out", default=None, help="dump the CV curve to this CSV")
    est.add_argument("--out", required=True)

    mc = sub.add_parser("mc-study", help="Monte Carlo benchmark of the estimators")
    mc.add_argument("--example", type=int, default=1, choices=[1, 2],
                    help="1: compound Poisson jumps, 2: Variance Gamma jumps")
    mc.add_argument("--table", type=int, default=None, choices=[1, 2, 3, 4, 5, 6],
                    help="run a preset benchmark table instead of a single config")
    mc.add_argument("--t", type=float, default=10.0)
    mc.add_argument("--n", type=int, default=1000)
    mc.add_argument("--reps", type=int, default=100)
    mc.add_argument("--seed", type=int, default=1)
    mc.add_argument("--methods", default="ll,nw")
    mc.add_argument("--kernel", default="gaussian", choices=["gaussian", "epanechnikov"])
    mc.add_argument("--grid-n", type=int, default=101)
    mc.add_argument("--range", dest="range_mode", default="inner", choices=["inner", "full"])
    mc.add_argument("--threads", type=int, default=1)
    mc.add_argument("--csv-prefix", default=None,
                    help="also write per-config band and QQ CSV extracts")
    mc.add_argument("--out", required=True)

    emp = sub.add_parser("empirical", help="estimate from an observed price series")
    emp.add_argument("--in", dest="infile", required=True)
    emp.add_argument("--price-col", required=True)
    emp.add_argument("--time-col", default=None)
    emp.add_argument("--delta", default="1/48",
                     help="observation step in days (default five-minute: 1/48)")
    emp.add_argument("--h", default="auto")
    emp.add_argument("--kernel", default="gaussian", choices=["gaussian", "epanechnikov"])
    emp.add_argument("--grid-n", type=int, default=101)
    emp.add_argument("--bands", type=float, default=None, metavar="ALPHA")
    emp.add_argument("--pilot-mult", type=float, default=2.0)
    emp.add_argument("--proxy-out", default=None)
    emp.add_argument("--out", required=True)

    return parser


def _choose_bandwidth(spec: str, series: ProxySeries, cfg_kernel, alignment,
                      method: str = "local_linear"):
    if spec == "auto":
        return rule_of_thumb(series), None
    if spec == "cv":
        pilot = rule_of_thumb(series).h
        probe = EstimatorConfig(bandwidth=1.0, kernel=cfg_kernel, method=method,
                                index_alignment=alignment)
        choice = cross_validate(series, default_cv_grid(pilot), probe)
        return choice, choice
    try:
        h = float(spec)
    except ValueError:
        raise ValidationError(
            f"--h must be 'auto', 'cv' or a number, got {spec!r}"
        ) from None
    if h <= 0:
        raise ValidationError(f"bandwidth must be positive, got {h}")
    from .bandwidth import BandwidthChoice

    return BandwidthChoice(h=h, method="fixed"), None


def _cmd_simulate(args) -> int:
    if args.jump == "cp":
        jump = CompoundPoisson(
            lam=args.lam,
            size=JumpSizeDist(args.size_dist, args.size_loc, args.size_scale),
        )
    elif args.jump == "vg":
        jump = VarianceGamma(c=args.vg_c, eta=args.vg_eta, b=args.vg_b)
    else:
        jump = NoJumps()
    model = default_model(jump=jump, x0=args.x0, y0=args.y0)
    cfg = PathConfig(t_span=args.t, n=args.n, seed=args.seed,
                     burn_in=args.burn_in, substeps=args.substeps)
    start = time.perf_counter()
    path = simulate_path(model, cfg)
    write_path_csv(args.out, path)
    RunManifest(
        command="simulate",
        params={k: v for k, v in vars(args).items() if k != "command"},
        master_seed=args.seed,
        runtime_s=time.perf_counter() - start,
    ).write(args.out)
    print(f"wrote {args.out} ({len(path.x)} observations, delta={path.delta:g})")
    return 0


def _load_series(args) -> ProxySeries:
    cols = read_columns_csv(args.infile)
    if args.delta is not None:
        delta = _parse_delta(args.delta)
    elif "t" in cols and len(cols["t"]) > 1:
        steps = np.diff(cols["t"])
        if steps.min() <= 0 or np.ptp(steps) > 1e-8 * max(1.0, steps.mean()):
            raise ValidationError(
                f"{args.infile}: time column is not uniformly spaced; pass --delta"
            )
        delta = float(steps.mean())
    else:
        raise ValidationError(f"{args.infile}: no time column; pass --delta")
    if "xtilde" in cols:
        return ProxySeries(delta=delta, xt=cols["xtilde"])
    if "y" in cols:
        return build_proxy(cols["y"], delta)
    raise ValidationError(f"{args.infile}: need an 'xtilde' or 'y' column")


def _cmd_estimate(args) -> int:
    start = time.perf_counter()
    series = _load_series(args)
    kernel = get_kernel(args.kernel)
    choice, cv_choice = _choose_bandwidth(
        args.h, series, kernel, args.alignment, METHOD_ALIASES[args.method]
    )
    cfg = EstimatorConfig(
        bandwidth=choice.h,
        kernel=kernel,
        method=METHOD_ALIASES[args.method],
        index_alignment=args.alignment,
    )
    if args.grid_lo is not None and args.grid_hi is not None:
        grid = np.linspace(args.grid_lo, args.grid_hi, args.grid_n)
    else:
        grid = default_grid(series, args.grid_n)
    est = estimate_curve(series, grid, cfg)
    if args.bands is not None:
        attach_bands(est, series, alpha=args.bands, pilot_h=args.pilot_mult * est.h)
    write_curve_csv(args.out, est)
    if args.cv_out and cv_choice is not None:
        write_cv_csv(args.cv_out, cv_choice)
    RunManifest(
        command="estimate",
        params={k: v for k, v in vars(args).items() if k != "command"},
        input_digests={args.infile: sha256_file(args.infile)},
        runtime_s=time.perf_counter() - start,
    ).write(args.out)
    print(
        f"wrote {args.out} (h={est.h:g}, method={est.method}, "
        f"{est.undefined_count} undefined grid points)"
    )
    return 0


def _cmd_mc_study(args) -> int:
    start = time.perf_counter()
    methods = tuple(METHOD_ALIASES[m.strip()] for m in args.methods.split(","))
    if args.table is not None:
        configs = table_presets(
            args.table, replicates=args.reps, master_seed=args.seed, workers=args.threads
        )
        configs = [
            McConfig(**{**c.__dict__, "methods": methods, "grid_n": args.grid_n,
                        "range_mode": args.range_mode, "kernel": get_kernel(args.kernel)})
            for c in configs
        ]
    else:
        configs = [
            McConfig(
                model=example_model(args.example),
                t_span=args.t,
                n=args.n,
                replicates=args.reps,
                master_seed=args.seed,
                methods=methods,
                kernel=get_kernel(args.kernel),
                grid_n=args.grid_n,
                range_mode=args.range_mode,
                workers=args.threads,
                label=f"example {args.example} T={args.t:g} n={args.n}",
            )
        ]
    reports = [run_study(c) for c in configs]
    payload = {
        "kind": "mc_study_report",
        "configs": [r.to_dict() for r in reports],
    }
    emit_report(payload, "json", args.out)
    if args.csv_prefix:
        for idx, rep in enumerate(reports):
            for method in rep.methods:
                band = rep.mc_band[method]
                rows = [
                    {"x": x, "lo": lo, "hi": hi, "mean": mean}
                    for x, lo, hi, mean in zip(
                        band["grid"], band["lo"], band["hi"], band["mean"]
                    )
                ]
                emit_report(rows, "csv", f"{args.csv_prefix}_band_{idx}_{method}.csv")
                std = rep.standardized.get(method)
                if std is not None and len(std) >= 20:
                    pairs, ks = qq_data(np.asarray(std))
                    rows = [
                        {"theoretical": p[0], "sample": p[1]} for p in pairs
                    ]
                    emit_report(rows, "csv", f"{args.csv_prefix}_qq_{idx}_{method}.csv")
    runtime = time.perf_counter() - start
    RunManifest(
        command="mc-study",
        params={k: v for k, v in vars(args).items() if k != "command"},
        master_seed=args.seed,
        runtime_s=runtime,
    ).write(args.out)
    for rep in reports:
        line = ", ".join(f"rmse[{m}]={rep.rmse[m]:.4f}" for m in rep.methods)
        print(f"{rep.label or 'study'}: {line} (skipped {rep.skipped})")
    print(f"wrote {args.out} in {runtime:.1f}s")
    return 0


def _cmd_empirical(args) -> int:
    start = time.perf_counter()
    delta = _parse_delta(args.delta)
    series, info = ingest_prices(args.infile, args.price_col, delta, args.time_col)
    if args.proxy_out:
        write_proxy_csv(args.proxy_out, series)
    kernel = get_kernel(args.kernel)
    choice, _ = _choose_bandwidth(args.h, series, kernel, "aligned")
    cfg = EstimatorConfig(bandwidth=choice.h, kernel=kernel)
    est = estimate_curve(series, default_grid(series, args.grid_n), cfg)
    if args.bands is not None:
        attach_bands(est, series, alpha=args.bands, pilot_h=args.pilot_mult * est.h)
    write_curve_csv(args.out, est)
    RunManifest(
        command="empirical",
        params={k: v for k, v in vars(args).items() if k != "command"},
        input_digests={args.infile: sha256_file(args.infile)},
        runtime_s=time.perf_counter() - start,
    ).write(args.out)
    print(
        f"ingested {info['rows']} prices (delta={delta:g}, uniform steps assumed); "
        f"wrote {args.out} (h={est.h:g})"
    )
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "mc-study": _cmd_mc_study,
    "empirical": _cmd_empirical,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
