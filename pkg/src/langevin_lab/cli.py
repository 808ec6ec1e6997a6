"""Command line interface.

Subcommands:

  sample    run a chain on a JSON-described target and export it
  bound     evaluate one of the closed-form W2 bounds
  plan      choose (h, K) for a requested precision
  figure1   iteration-count comparison curves across dimensions
  validate  bound-versus-oracle invariant sweep

Every file-producing subcommand writes a ``<output>.manifest.json``
next to its outputs with the parameters, wall time, and sha256 digest
of each file, so results can be traced back to the exact invocation.
Exit codes: 0 on success, 2 for unusable flag values, 1 for failures
at run time.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import BoundInputs, baseline_bound, lmc_bound, noisy_lmc_bound
from .planner import (
    DEFAULT_GRID_SIZE,
    DEFAULT_GRID_SPAN,
    UnreachablePrecisionError,
    figure1_curves,
    plan_for_epsilon,
)
from .sampler import (
    GradientOracle,
    LmcConfig,
    final_states,
    run_lmc,
    run_nlmc,
    trajectory_summary,
    trajectory_to_csv,
)
from .targets import load_target
from .validation import run_all_checks


class UsageError(Exception):
    """Flag combination or value that cannot be acted on."""


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (value > 0.0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonnegative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (value >= 0.0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def _nonnegative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return value


def _positive_float_list(text: str) -> list[float]:
    return [_positive_float(part) for part in text.split(",") if part != ""]


def _positive_int_list(text: str) -> list[int]:
    return [_positive_int(part) for part in text.split(",") if part != ""]


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(
    anchor: Path, subcommand: str, parameters: dict, outputs: list[Path], started: float
) -> Path:
    manifest = {
        "tool": "langevin-lab",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": parameters,
        "wall_time_s": round(time.perf_counter() - started, 6),
        "outputs": [
            {"path": out.name, "sha256": _sha256(out)} for out in outputs
        ],
    }
    path = anchor.with_name(anchor.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def cmd_sample(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    if args.sigma > 0.0 and args.oracle == "exact":
        raise UsageError("--sigma requires a noisy oracle; pass --oracle gaussian")
    target = load_target(args.target)
    if args.oracle == "subsampled":
        if target.parts is None:
            raise UsageError(
                "--oracle subsampled needs a finite-sum target (type 'logistic')"
            )
        if args.batch > target.parts.n_obs:
            raise UsageError(
                f"--batch {args.batch} exceeds the target's {target.parts.n_obs} observations"
            )
    try:
        oracle = GradientOracle(
            mode=args.oracle, sigma=args.sigma, batch=args.batch, noise=args.noise
        )
        config = LmcConfig(h=args.h, K=args.K, seed=args.seed, oracle=oracle)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.init is None:
        initial = np.zeros(target.dim)
    else:
        if len(args.init) != target.dim:
            raise UsageError(
                f"--init has {len(args.init)} coordinates but the target has dimension {target.dim}"
            )
        initial = np.asarray(args.init, dtype=float)

    out = Path(args.out)
    parameters = {
        "target": str(args.target),
        "h": args.h,
        "K": args.K,
        "seed": args.seed,
        "oracle": args.oracle,
        "sigma": args.sigma,
        "batch": args.batch,
        "noise": args.noise,
        "replicas": args.replicas,
        "init": None if args.init is None else list(args.init),
    }

    if args.replicas == 1:
        runner = run_lmc if args.oracle == "exact" else run_nlmc
        traj = runner(target, config, initial)
        trajectory_to_csv(traj, out)
        summary_path = out.with_name(out.stem + ".summary.json")
        _write_json(summary_path, trajectory_summary(traj))
        manifest = _write_manifest(out, "sample", parameters, [out, summary_path], started)
        print(f"wrote {out} and {summary_path} ({config.K} steps, dim {target.dim}); manifest {manifest}")
        return 0

    finals = final_states(target, config, initial, args.replicas)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("replica," + ",".join(f"theta_{j}" for j in range(target.dim)) + "\n")
        for r, row in enumerate(finals):
            fh.write(str(r) + "," + ",".join(repr(float(x)) for x in row) + "\n")
    summary_path = out.with_name(out.stem + ".summary.json")
    _write_json(
        summary_path,
        {
            "dim": target.dim,
            "iterations": config.K,
            "seed": config.seed,
            "oracle": args.oracle,
            "sigma": args.sigma,
            "replicas": args.replicas,
            "final_mean": [float(x) for x in finals.mean(axis=0)],
            "final_variance": [float(x) for x in finals.var(axis=0, ddof=1)]
            if args.replicas > 1
            else [0.0] * target.dim,
        },
    )
    manifest = _write_manifest(out, "sample", parameters, [out, summary_path], started)
    print(
        f"wrote {out} and {summary_path} ({args.replicas} replicas, {config.K} steps); "
        f"manifest {manifest}"
    )
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    try:
        inputs = BoundInputs(
            m=args.m, M=args.M, h=args.h, K=args.K, p=args.p, w2_init=args.w2init, sigma=args.sigma
        )
        if args.kind == "lmc":
            payload = lmc_bound(inputs).as_dict()
        elif args.kind == "noisy":
            payload = noisy_lmc_bound(inputs).as_dict()
        else:
            payload = {"value": baseline_bound(inputs)}
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out is not None:
        out = Path(args.out)
        out.write_text(text + "\n", encoding="utf-8")
        parameters = {
            "kind": args.kind,
            "m": args.m,
            "M": args.M,
            "h": args.h,
            "K": args.K,
            "p": args.p,
            "w2init": args.w2init,
            "sigma": args.sigma,
        }
        _write_manifest(out, "bound", parameters, [out], started)
    return 0


def cmd_plan(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    try:
        plan = plan_for_epsilon(args.m, args.M, args.p, args.w2init, args.eps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = plan.as_dict()
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out is not None:
        out = Path(args.out)
        out.write_text(text + "\n", encoding="utf-8")
        parameters = {
            "m": args.m,
            "M": args.M,
            "p": args.p,
            "eps": args.eps,
            "w2init": args.w2init,
        }
        _write_manifest(out, "plan", parameters, [out], started)
    return 0


def cmd_figure1(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    try:
        points = figure1_curves(
            m=args.m,
            M=args.M,
            epsilons=args.eps,
            p_values=args.p_values,
            grid_size=args.grid_size,
            span=args.span,
        )
    except UnreachablePrecisionError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    header = "p,epsilon,k_lmc,k_baseline,log10_k_lmc,log10_k_baseline,ratio"
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for point in points:
            log_l = math.log10(point.k_lmc) if point.k_lmc > 0 else math.nan
            log_b = math.log10(point.k_baseline) if point.k_baseline > 0 else math.nan
            fh.write(
                f"{point.p},{point.epsilon!r},{point.k_lmc},{point.k_baseline},"
                f"{log_l!r},{log_b!r},{point.ratio!r}\n"
            )
    parameters = {
        "m": args.m,
        "M": args.M,
        "eps": list(args.eps),
        "p_values": list(args.p_values),
        "grid_size": args.grid_size,
        "span": args.span,
    }
    manifest = _write_manifest(out, "figure1", parameters, [out], started)
    print(f"wrote {out} ({len(points)} points); manifest {manifest}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    results = run_all_checks(seed=args.seed)
    for result in results:
        print(result)
    if all(r.passed for r in results):
        print("all checks passed")
        return 0
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="langevin-lab",
        description="Langevin Monte Carlo with computable Wasserstein-2 guarantees",
    )
    parser.add_argument("--version", action="version", version=f"langevin-lab {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_sample = sub.add_parser("sample", help="run a chain and export the trajectory or finals")
    p_sample.add_argument("--target", required=True, help="path to a JSON target description")
    p_sample.add_argument("--h", required=True, type=_positive_float, help="step size")
    p_sample.add_argument("--K", required=True, type=_nonnegative_int, help="iteration count")
    p_sample.add_argument("--seed", type=_nonnegative_int, default=0, help="stream seed")
    p_sample.add_argument("--sigma", type=_nonnegative_float, default=0.0, help="gradient noise scale")
    p_sample.add_argument(
        "--oracle",
        choices=("exact", "gaussian", "subsampled"),
        default="exact",
        help="gradient oracle",
    )
    p_sample.add_argument(
        "--noise",
        choices=("gaussian", "rademacher"),
        default="gaussian",
        help="law of the additive gradient noise",
    )
    p_sample.add_argument("--batch", type=_positive_int, default=1, help="subsample size")
    p_sample.add_argument("--replicas", type=_positive_int, default=1, help="independent chains")
    p_sample.add_argument("--init", type=_float_list, default=None, help="comma-separated start")
    p_sample.add_argument("--out", default="sample.csv", help="output CSV path")
    p_sample.set_defaults(func=cmd_sample)

    p_bound = sub.add_parser("bound", help="evaluate a closed-form W2 bound")
    p_bound.add_argument("--kind", choices=("lmc", "noisy", "baseline"), default="lmc")
    p_bound.add_argument("--m", required=True, type=_positive_float, help="strong convexity")
    p_bound.add_argument("--M", required=True, type=_positive_float, help="gradient Lipschitz")
    p_bound.add_argument("--h", required=True, type=_positive_float, help="step size")
    p_bound.add_argument("--K", required=True, type=_nonnegative_int, help="iteration count")
    p_bound.add_argument("--p", required=True, type=_positive_int, help="dimension")
    p_bound.add_argument("--w2init", required=True, type=_nonnegative_float, help="initial W2")
    p_bound.add_argument("--sigma", type=_nonnegative_float, default=0.0, help="gradient noise scale")
    p_bound.add_argument("--out", default=None, help="optional JSON output path")
    p_bound.set_defaults(func=cmd_bound)

    p_plan = sub.add_parser("plan", help="choose (h, K) for a requested precision")
    p_plan.add_argument("--m", required=True, type=_positive_float, help="strong convexity")
    p_plan.add_argument("--M", required=True, type=_positive_float, help="gradient Lipschitz")
    p_plan.add_argument("--p", required=True, type=_positive_int, help="dimension")
    p_plan.add_argument("--eps", required=True, type=_positive_float, help="target W2 precision")
    p_plan.add_argument("--w2init", required=True, type=_nonnegative_float, help="initial W2")
    p_plan.add_argument("--out", default=None, help="optional JSON output path")
    p_plan.set_defaults(func=cmd_plan)

    p_fig = sub.add_parser("figure1", help="iteration-count comparison curves")
    p_fig.add_argument("--m", type=_positive_float, default=4.0, help="strong convexity")
    p_fig.add_argument("--M", type=_positive_float, default=5.0, help="gradient Lipschitz")
    p_fig.add_argument("--eps", type=_positive_float_list, default=[0.1, 0.3],
                       help="comma-separated precisions")
    p_fig.add_argument("--p-values", type=_positive_int_list, default=[10, 100, 1000, 10000],
                       help="comma-separated dimensions")
    p_fig.add_argument("--grid-size", type=_positive_int, default=DEFAULT_GRID_SIZE,
                       help="step-grid resolution")
    p_fig.add_argument("--span", type=_positive_float, default=DEFAULT_GRID_SPAN,
                       help="ratio between largest and smallest grid step")
    p_fig.add_argument("--out", default="figure1.csv", help="output CSV path")
    p_fig.set_defaults(func=cmd_figure1)

    p_val = sub.add_parser("validate", help="bound-versus-oracle invariant sweep")
    p_val.add_argument("--seed", type=_nonnegative_int, default=0, help="sweep seed")
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failures: bad files, unreachable precision, ...
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
