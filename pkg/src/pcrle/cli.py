"""Command-line interface.

Subcommands: ``sample`` (generate datasets), ``fit`` and ``test`` (run a
single estimator or signal-detection test on a CSV), ``sweep`` (the
Monte-Carlo protocols from a JSON config), ``cluster-demo``, and
``sparsify``.  Exit codes: 0 success, 2 usage or malformed input,
3 numerical failure.  Every command takes ``--seed``; a run manifest is
written before any other output file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import (
    SweepConfig,
    run_cluster_comparison,
    run_estimation_sweep,
    run_testing_sweep,
    run_tuning_sensitivity,
)
from .graph import build_graph, kernel_by_name, save_edge_list
from .regress import (
    SolverError,
    kernel_smoothing_fit,
    laplacian_smoothing_fit,
    pcr_le_fit,
    pcr_le_test,
    spectral_series_fit,
    spectral_series_test,
    uniform_least_squares_fit,
)
from .sampling import (
    circle_basis_values,
    constant,
    cube_basis_values,
    load_dataset_csv,
    make_responses,
    piecewise_cluster,
    sample_circle_manifold,
    sample_cluster_model,
    sample_uniform_cube,
    save_dataset_csv,
    single_eigenfunction,
)
from .seeding import make_rng
from .sparsify import certify_sigma, sparsify_uniform
from .spectra import EigensolveError, smallest_eigenpairs
from .svgplot import line_chart_svg
from .tune import TuningRule, choose_K, choose_eps

OUT_DIR_ENV = "PCRLE_OUT_DIR"


@dataclass
class RunManifest:
    """Record of a CLI invocation, written before its outputs."""

    command: str
    config: dict
    seed: int
    version: str = __version__
    outputs: list[str] = field(default_factory=list)

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(asdict(self), indent=2, default=str) + "\n")


def _out_dir(args) -> Path:
    # a direct --out CSV path overrides the directory/stem pair
    out = getattr(args, "out", None)
    if out:
        path = Path(out)
        args.out_dir = str(path.parent)
        args.stem = path.stem
        args.out = None
    base = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _manifest(args, name: str, outputs: list[Path]) -> Path:
    out = _out_dir(args)
    config = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = RunManifest(
        command=name,
        config=config,
        seed=getattr(args, "seed", 0),
        outputs=[str(p) for p in outputs],
    )
    path = out / f"{args.stem}.manifest.json"
    manifest.write(path)
    return path


def _auto_tune(args, n: int, dim: int, task: str) -> tuple[int, float]:
    rule = TuningRule(task=task, n=n, dim=dim, s=args.s, M=args.M)
    K = choose_K(rule)
    return K, choose_eps(rule, K)


# ---------------------------------------------------------------------------
# sample
# ---------------------------------------------------------------------------

def cmd_sample(args) -> int:
    rng = make_rng(args.seed)
    if args.model == "uniform-cube":
        design = sample_uniform_cube(args.n, args.d, rng)
    elif args.model == "cluster":
        design = sample_cluster_model(args.n, args.r, rng)
    else:
        design = sample_circle_manifold(args.n, args.d, rng)

    if args.f0 == "zero":
        f0 = constant(0.0)
    elif args.f0 == "constant":
        f0 = constant(args.value)
    elif args.f0 == "cluster":
        f0 = piecewise_cluster(args.theta, args.r)
    else:
        domain = "circle" if args.model == "circle" else "cube"
        f0 = single_eigenfunction(args.k, amplitude=args.M, smoothness=args.s,
                                  domain=domain, dim=args.d)

    dataset = make_responses(design, f0, args.noise_sd, rng)
    out = _out_dir(args)
    csv_path = out / f"{args.stem}.csv"
    _manifest(args, "sample", [csv_path])
    save_dataset_csv(dataset, csv_path)
    print(f"wrote {csv_path} ({dataset.n} rows)")
    return 0


# ---------------------------------------------------------------------------
# fit / test
# ---------------------------------------------------------------------------

def _resolve_tuning(args, n: int, dim: int, task: str) -> tuple[int | None, float | None]:
    K, eps = args.k, args.eps
    if args.auto_tune:
        K_auto, eps_auto = _auto_tune(args, n, dim, task)
        K = K if K is not None else K_auto
        eps = eps if eps is not None else eps_auto
    return K, eps


def cmd_fit(args) -> int:
    dataset = load_dataset_csv(args.input, intrinsic_dim=args.intrinsic_dim)
    kern = kernel_by_name(args.kernel)
    K, eps = _resolve_tuning(args, dataset.n, dataset.intrinsic_dim, "estimation")

    method = args.method
    if method == "pcr-le":
        if K is None or eps is None:
            raise ValueError("pcr-le needs --k and --eps (or --auto-tune)")
        graph = build_graph(dataset.points, eps, kern, dataset.intrinsic_dim)
        spectrum = smallest_eigenpairs(graph, K)
        fit = pcr_le_fit(spectrum, dataset.responses, K)
        fit.tuning["eps"] = eps
    elif method == "spectral-series":
        if K is None:
            raise ValueError("spectral-series needs --k (or --auto-tune)")
        basis_fn = circle_basis_values if args.basis == "circle" else cube_basis_values
        fit = spectral_series_fit(basis_fn(dataset.points, K), dataset.responses, K)
    elif method == "kernel-smoothing":
        if args.h is None:
            raise ValueError("kernel-smoothing needs --h")
        fit = kernel_smoothing_fit(dataset.points, dataset.responses, args.h, kern)
    elif method == "uniform-ls":
        if K is None:
            raise ValueError("uniform-ls needs --k (or --auto-tune)")
        fit = uniform_least_squares_fit(dataset.points, dataset.responses, K)
    else:  # laplacian-smoothing
        if eps is None:
            raise ValueError("laplacian-smoothing needs --eps (or --auto-tune)")
        graph = build_graph(dataset.points, eps, kern, dataset.intrinsic_dim)
        fit = laplacian_smoothing_fit(graph, dataset.responses, args.lam)
        fit.tuning["eps"] = eps

    out = _out_dir(args)
    csv_path = out / f"{args.stem}.csv"
    json_path = out / f"{args.stem}.json"
    _manifest(args, "fit", [csv_path, json_path])

    d = dataset.ambient_dim
    header = ",".join([f"x{i + 1}" for i in range(d)] + ["y", "f0", "fitted"])
    table = np.column_stack([dataset.points, dataset.responses, dataset.truth, fit.fitted])
    np.savetxt(csv_path, table, delimiter=",", header=header, comments="", fmt="%.17g")
    json_path.write_text(fit.to_json(indent=2) + "\n")
    print(f"wrote {csv_path} and {json_path}")
    return 0


def cmd_test(args) -> int:
    dataset = load_dataset_csv(args.input, intrinsic_dim=args.intrinsic_dim)
    kern = kernel_by_name(args.kernel)
    K, eps = _resolve_tuning(args, dataset.n, dataset.intrinsic_dim, "testing")

    if args.method == "pcr-le":
        if K is None or eps is None:
            raise ValueError("pcr-le test needs --k and --eps (or --auto-tune)")
        graph = build_graph(dataset.points, eps, kern, dataset.intrinsic_dim)
        spectrum = smallest_eigenpairs(graph, K)
        result = pcr_le_test(spectrum, dataset.responses, K, args.a)
        result.tuning["eps"] = eps
    else:
        if K is None:
            raise ValueError("spectral-series test needs --k (or --auto-tune)")
        basis_fn = circle_basis_values if args.basis == "circle" else cube_basis_values
        result = spectral_series_test(
            basis_fn(dataset.points, K), dataset.responses, K, args.a
        )

    out = _out_dir(args)
    json_path = out / f"{args.stem}.json"
    _manifest(args, "test", [json_path])
    json_path.write_text(result.to_json(indent=2) + "\n")
    print(json.dumps(result.to_dict()))
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    with open(args.config) as fh:
        data = json.load(fh)
    kind = data.pop("kind", "estimation")
    vary = data.pop("vary", "K")
    values = data.pop("values", None)
    if args.seed is not None:
        data["seed"] = args.seed
    cfg = SweepConfig.from_dict(data)

    out = _out_dir(args)
    csv_path = out / f"{args.stem}.csv"
    json_path = out / f"{args.stem}.manifest.json"
    svg_path = out / f"{args.stem}.svg"

    if args.dry_run:
        RunManifest(
            command="sweep",
            config={"kind": kind, **cfg.to_dict(), "dry_run": True},
            seed=cfg.seed,
            outputs=[],
        ).write(json_path)
        print(f"dry run: wrote {json_path}")
        return 0

    RunManifest(
        command="sweep",
        config={"kind": kind, **cfg.to_dict()},
        seed=cfg.seed,
        outputs=[str(csv_path), str(svg_path)],
    ).write(json_path)

    if kind == "estimation":
        result = run_estimation_sweep(cfg, threads=args.threads)
        series = {
            m: [(r["n"], r["mean"]) for r in result.rows if r["method"] == m]
            for m in cfg.methods
        }
        ylabel = "in-sample mse"
    elif kind == "testing":
        result = run_testing_sweep(cfg, threads=args.threads)
        series = {}
        for m in ("pcr-le", "spectral-series"):
            pts = [(r["n"], r["critical_radius"]) for r in result.rows
                   if r["method"] == m and np.isfinite(r["critical_radius"])]
            if pts:
                series[m] = pts
        ylabel = "critical radius"
    elif kind == "sensitivity":
        result = run_tuning_sensitivity(cfg, vary, values, threads=args.threads)
        series = {}
        for m in {r["method"] for r in result.rows}:
            series[m] = [(r["value"], r["mean"]) for r in result.rows if r["method"] == m]
        ylabel = "in-sample mse"
    else:
        raise ValueError(f"unknown sweep kind {kind!r}")

    csv_path.write_text(result.csv_text())
    full = result.manifest()
    full["command"] = "sweep"
    full["version"] = __version__
    full["outputs"] = [str(csv_path), str(svg_path)]
    json_path.write_text(json.dumps(full, indent=2, default=str) + "\n")
    if series:
        line_chart_svg(
            series, svg_path,
            title=f"{kind} sweep",
            xlabel="n" if kind != "sensitivity" else vary,
            ylabel=ylabel,
            reference_slope=result.reference_slope if kind != "sensitivity" else None,
        )
    print(f"wrote {csv_path}, {json_path}, {svg_path}")
    for method, slope in result.slopes.items():
        print(f"{method}: fitted slope {slope:+.3f} (reference {result.reference_slope:+.3f})")
    return 0


# ---------------------------------------------------------------------------
# cluster-demo / sparsify
# ---------------------------------------------------------------------------

def cmd_cluster_demo(args) -> int:
    out = _out_dir(args)
    csv_path = out / f"{args.stem}.csv"
    json_path = out / f"{args.stem}.json"
    _manifest(args, "cluster-demo", [csv_path, json_path])
    result = run_cluster_comparison(
        args.n, args.theta, args.r, args.reps, args.seed, threads=args.threads
    )
    csv_path.write_text(result.csv_text())
    json_path.write_text(json.dumps(result.to_dict(), indent=2) + "\n")
    print(result.csv_text(), end="")
    print(f"risk bound (graph method): {result.risk_bound_pcr_le:.6g}; "
          f"two-component frequency {result.two_component_frequency:.3f}")
    return 0


def cmd_sparsify(args) -> int:
    dataset = load_dataset_csv(args.input, intrinsic_dim=args.intrinsic_dim)
    kern = kernel_by_name(args.kernel)
    graph = build_graph(dataset.points, args.eps, kern, dataset.intrinsic_dim)
    rng = make_rng(args.seed)
    sparse = sparsify_uniform(graph, args.keep, rng)
    report = certify_sigma(graph, sparse)

    out = _out_dir(args)
    edges_path = out / f"{args.stem}.edges"
    json_path = out / f"{args.stem}.json"
    _manifest(args, "sparsify", [edges_path, json_path])
    save_edge_list(sparse, edges_path)
    json_path.write_text(report.to_json(indent=2) + "\n")
    print(f"kept {report.kept_edges}/{report.original_edges} edges, "
          f"sigma observed {report.sigma_observed:.4f}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcrle",
        description="Neighborhood-graph eigenvector regression: fits, tests, sweeps.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, stem_default):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir", default=None,
                       help=f"output directory (default: ${OUT_DIR_ENV} or cwd)")
        p.add_argument("--stem", default=stem_default, help="output file stem")
        p.add_argument("--out", default=None,
                       help="primary output path; overrides --out-dir/--stem")

    p = sub.add_parser("sample", help="generate a dataset CSV")
    common(p, "data")
    p.add_argument("--model", choices=["uniform-cube", "cluster", "circle"],
                   default="uniform-cube")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--r", type=float, default=0.05, help="cluster separation")
    p.add_argument("--f0", choices=["zero", "constant", "eigenfunction", "cluster"],
                   default="zero")
    p.add_argument("--k", type=int, default=2, help="eigenfunction index for --f0")
    p.add_argument("--value", type=float, default=0.0, help="constant f0 value")
    p.add_argument("--theta", type=float, default=1.0, help="cluster signal height")
    p.add_argument("--M", type=float, default=1.0)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("fit", help="fit one method to a dataset CSV")
    common(p, "fit")
    p.add_argument("--method", required=True,
                   choices=["pcr-le", "spectral-series", "kernel-smoothing",
                            "uniform-ls", "laplacian-smoothing"])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--kernel", default="boxcar")
    p.add_argument("--basis", choices=["cube", "circle"], default="cube")
    p.add_argument("--intrinsic-dim", type=int, default=None)
    p.add_argument("--auto-tune", action="store_true",
                   help="fill missing K/eps from the tuning rules")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--M", type=float, default=1.0)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("test", help="signal-detection test on a dataset CSV")
    common(p, "test")
    p.add_argument("--method", choices=["pcr-le", "spectral-series"], default="pcr-le")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--a", type=float, default=0.05)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--kernel", default="boxcar")
    p.add_argument("--basis", choices=["cube", "circle"], default="cube")
    p.add_argument("--intrinsic-dim", type=int, default=None)
    p.add_argument("--auto-tune", action="store_true")
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--M", type=float, default=1.0)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("sweep", help="run a Monte-Carlo sweep from a JSON config")
    common(p, "sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--dry-run", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_sweep, seed=None)

    p = sub.add_parser("cluster-demo", help="two-cluster risk comparison")
    common(p, "cluster")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--theta", type=float, default=5.0)
    p.add_argument("--r", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_cluster_demo)

    p = sub.add_parser("sparsify", help="subsample graph edges and certify sigma")
    common(p, "sparse")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--keep", type=float, required=True)
    p.add_argument("--kernel", default="boxcar")
    p.add_argument("--intrinsic-dim", type=int, default=None)
    p.set_defaults(func=cmd_sparsify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EigensolveError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
