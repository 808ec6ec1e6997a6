"""Constant-step Langevin chains with exact and noisy gradient oracles.

The update is

    theta_{k+1} = theta_k - h * Y_k + sqrt(2h) * xi_{k+1}

with xi i.i.d. standard Gaussian and Y_k the gradient oracle's answer
at theta_k: the exact gradient, the gradient plus additive noise, or a
subsampled finite-sum estimate.

Reproducibility contract: every replica owns counter-based random
streams keyed by (seed, replica, channel).  Drive noise xi, oracle
noise zeta, and the initial draw live on separate channels, so changing
the oracle never shifts the drive noise, and a noisy run with sigma = 0
walks the exact same path as the exact-gradient run.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .parallel import parallel_map
from .targets import TargetPotential

__all__ = [
    "XI_STREAM",
    "ZETA_STREAM",
    "INIT_STREAM",
    "noise_stream",
    "GradientOracle",
    "LmcConfig",
    "Trajectory",
    "lmc_step",
    "oracle_gradient",
    "run_lmc",
    "run_nlmc",
    "run_tempered_lmc",
    "gradient_descent",
    "final_states",
    "trajectory_to_csv",
    "trajectory_summary",
]

XI_STREAM = 0
ZETA_STREAM = 1
INIT_STREAM = 2

_CHANNELS_PER_REPLICA = 4
_MAX_SEED = 2**64 // _CHANNELS_PER_REPLICA

InitialState = Union[np.ndarray, Callable[[np.random.Generator], np.ndarray]]


def noise_stream(seed: int, replica: int, channel: int) -> np.random.Generator:
    """Counter-based generator for one (seed, replica, channel) triple.

    Streams with distinct triples are statistically independent, and a
    given triple always yields the same draws, regardless of how many
    other replicas run or in what order.
    """
    if not (0 <= channel < _CHANNELS_PER_REPLICA):
        raise ValueError(f"channel must be in [0, {_CHANNELS_PER_REPLICA}), got {channel}")
    if replica < 0:
        raise ValueError(f"replica must be nonnegative, got {replica}")
    key = np.array([seed, _CHANNELS_PER_REPLICA * replica + channel], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class GradientOracle:
    """How the chain obtains gradients.

    mode:
      "exact"       true gradient
      "gaussian"    true gradient plus sigma * zeta with zeta drawn per
                    step from the oracle channel; the zeta law is
                    standard normal or scaled Rademacher per ``noise``
      "subsampled"  unbiased finite-sum estimate from ``batch``
                    observations drawn without replacement, plus the
                    exactly computed common term

    batch equal to the observation count reproduces the exact gradient.
    """

    mode: str = "exact"
    sigma: float = 0.0
    batch: int = 1
    noise: str = "gaussian"

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "gaussian", "subsampled"):
            raise ValueError(
                f"oracle mode must be 'exact', 'gaussian' or 'subsampled', got {self.mode!r}"
            )
        sigma = float(self.sigma)
        if not (sigma >= 0.0 and math.isfinite(sigma)):
            raise ValueError(f"sigma must be nonnegative and finite, got {self.sigma}")
        if self.mode == "exact" and sigma != 0.0:
            raise ValueError("sigma must be 0 for the exact oracle; use mode='gaussian'")
        object.__setattr__(self, "sigma", sigma)
        if int(self.batch) < 1:
            raise ValueError(f"batch must be at least 1, got {self.batch}")
        object.__setattr__(self, "batch", int(self.batch))
        if self.noise not in ("gaussian", "rademacher"):
            raise ValueError(f"noise law must be 'gaussian' or 'rademacher', got {self.noise!r}")


@dataclass(frozen=True)
class LmcConfig:
    """Step size, horizon and seeding for one chain."""

    h: float
    K: int
    seed: int = 0
    oracle: GradientOracle = field(default_factory=GradientOracle)

    def __post_init__(self) -> None:
        h = float(self.h)
        if not (h > 0.0 and math.isfinite(h)):
            raise ValueError(f"step size h must be positive and finite, got {self.h}")
        object.__setattr__(self, "h", h)
        K = int(self.K)
        if K < 0:
            raise ValueError(f"iteration count K must be nonnegative, got {self.K}")
        object.__setattr__(self, "K", K)
        seed = int(self.seed)
        if not (0 <= seed < _MAX_SEED):
            raise ValueError(f"seed must be in [0, {_MAX_SEED}), got {self.seed}")
        object.__setattr__(self, "seed", seed)


@dataclass(frozen=True)
class Trajectory:
    """A realized chain: iterates has shape (K + 1, dim), row k is step k."""

    iterates: np.ndarray
    config: LmcConfig
    wall_time: float
    replica: int = 0
    tau: Optional[float] = None

    @property
    def final(self) -> np.ndarray:
        return self.iterates[-1]


def _check_step_size(h: float, target: TargetPotential) -> None:
    limit = 2.0 / target.M
    if h >= limit:
        warnings.warn(
            f"step size h={h:.6g} is at or beyond 2/M = {limit:.6g}; the chain is "
            f"transient there and no error bound applies",
            RuntimeWarning,
            stacklevel=3,
        )


def _resolve_initial(
    initial: InitialState, target: TargetPotential, seed: int, replica: int
) -> np.ndarray:
    if callable(initial):
        theta0 = np.asarray(initial(noise_stream(seed, replica, INIT_STREAM)), dtype=float)
    else:
        theta0 = np.asarray(initial, dtype=float)
    theta0 = np.atleast_1d(theta0)
    if theta0.shape != (target.dim,):
        raise ValueError(
            f"initial state has shape {theta0.shape} but the target has dimension {target.dim}"
        )
    return theta0


def lmc_step(state: np.ndarray, target: TargetPotential, h: float, noise: np.ndarray) -> np.ndarray:
    """One update with an exact gradient and externally supplied noise."""
    if not (float(h) > 0.0):
        raise ValueError(f"step size h must be positive, got {h}")
    state = np.asarray(state, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if state.shape[-1] != target.dim:
        raise ValueError(
            f"state has dimension {state.shape[-1]} but the target has dimension {target.dim}"
        )
    if noise.shape != state.shape:
        raise ValueError(f"noise has shape {noise.shape} but state has shape {state.shape}")
    return state - h * target.grad(state) + math.sqrt(2.0 * h) * noise


def oracle_gradient(
    target: TargetPotential,
    oracle: GradientOracle,
    state: np.ndarray,
    rng: Optional[np.random.Generator],
) -> np.ndarray:
    """Evaluate the configured gradient oracle at one state or a batch.

    rng is the oracle's own channel and may be None only for the exact
    mode.  The subsampled mode handles single states only; replicated
    subsampled runs iterate chains one by one.
    """
    state = np.asarray(state, dtype=float)
    if oracle.mode == "exact":
        return target.grad(state)
    if rng is None:
        raise ValueError(f"oracle mode {oracle.mode!r} needs its noise stream, got rng=None")
    if oracle.mode == "gaussian":
        g = target.grad(state)
        if oracle.noise == "gaussian":
            zeta = rng.standard_normal(state.shape)
        else:
            zeta = 2.0 * rng.integers(0, 2, size=state.shape).astype(float) - 1.0
        return g + oracle.sigma * zeta
    # subsampled
    if target.parts is None:
        raise ValueError(
            "target has no finite-sum structure; the subsampled oracle needs "
            "per-observation gradients"
        )
    if state.ndim != 1:
        raise ValueError("the subsampled oracle supports single states, not batches")
    n = target.parts.n_obs
    if oracle.batch > n:
        raise ValueError(f"batch {oracle.batch} exceeds the observation count {n}")
    idx = rng.choice(n, size=oracle.batch, replace=False)
    scale = n / oracle.batch
    return scale * target.parts.obs_grad(state, idx).sum(axis=0) + target.parts.common_grad(state)


def _run_chain(
    target: TargetPotential, config: LmcConfig, initial: InitialState, replica: int
) -> Trajectory:
    t0 = time.perf_counter()
    _check_step_size(config.h, target)
    theta = _resolve_initial(initial, target, config.seed, replica)
    h, K, p = config.h, config.K, target.dim
    oracle = config.oracle
    xi_rng = noise_stream(config.seed, replica, XI_STREAM)
    zeta_rng = None if oracle.mode == "exact" else noise_stream(config.seed, replica, ZETA_STREAM)
    root = math.sqrt(2.0 * h)
    iterates = np.empty((K + 1, p))
    iterates[0] = theta
    for k in range(K):
        xi = xi_rng.standard_normal(p)
        y = oracle_gradient(target, oracle, theta, zeta_rng)
        theta = theta - h * y + root * xi
        iterates[k + 1] = theta
    return Trajectory(iterates, config, time.perf_counter() - t0, replica=replica)


def run_lmc(
    target: TargetPotential, config: LmcConfig, initial: InitialState, replica: int = 0
) -> Trajectory:
    """Run one exact-gradient chain for config.K steps."""
    if config.oracle.mode != "exact":
        raise ValueError(
            f"run_lmc uses the exact gradient but the oracle mode is {config.oracle.mode!r}; "
            f"use run_nlmc for noisy oracles"
        )
    return _run_chain(target, config, initial, replica)


def run_nlmc(
    target: TargetPotential, config: LmcConfig, initial: InitialState, replica: int = 0
) -> Trajectory:
    """Run one noisy-gradient chain (additive-noise or subsampled oracle).

    With mode "gaussian" and sigma = 0 the iterates coincide with
    run_lmc under the same seed, because the drive noise lives on its
    own channel.
    """
    if config.oracle.mode == "exact":
        raise ValueError("run_nlmc needs a noisy oracle; use run_lmc for the exact gradient")
    return _run_chain(target, config, initial, replica)


def gradient_descent(
    target: TargetPotential, h: float, K: int, initial: InitialState
) -> np.ndarray:
    """Plain descent iterates, shape (K + 1, dim); the zero-noise chain."""
    h = float(h)
    if not (h > 0.0 and math.isfinite(h)):
        raise ValueError(f"step size h must be positive and finite, got {h}")
    K = int(K)
    if K < 0:
        raise ValueError(f"iteration count K must be nonnegative, got {K}")
    theta = _resolve_initial(initial, target, 0, 0)
    iterates = np.empty((K + 1, target.dim))
    iterates[0] = theta
    for k in range(K):
        theta = theta - h * target.grad(theta)
        iterates[k + 1] = theta
    return iterates


def run_tempered_lmc(
    target: TargetPotential,
    tau: float,
    K: int,
    seed: int = 0,
    initial: InitialState = None,
    replica: int = 0,
) -> Trajectory:
    """Chain with unit-curvature step and temperature-scaled noise:

        theta_{k+1} = theta_k - (1/M) grad f(theta_k) + sqrt(2 tau / M) xi

    Identical in law to the exact-gradient chain on the rescaled
    potential f / tau with step h = tau / M, and identical draw by draw
    under the same seed.  tau = 0 collapses to gradient descent with
    step 1/M; the noise stream is then untouched.
    """
    tau = float(tau)
    if tau < 0.0 or not math.isfinite(tau):
        raise ValueError(f"tau must be nonnegative and finite, got {tau}")
    if initial is None:
        raise ValueError("an initial state is required")
    K = int(K)
    if K < 0:
        raise ValueError(f"iteration count K must be nonnegative, got {K}")
    t0 = time.perf_counter()
    M = target.M
    if tau == 0.0:
        iterates = gradient_descent(target, 1.0 / M, K, initial)
        config = LmcConfig(h=1.0 / M, K=K, seed=seed)
        return Trajectory(iterates, config, time.perf_counter() - t0, replica=replica, tau=0.0)
    theta = _resolve_initial(initial, target, seed, replica)
    xi_rng = noise_stream(seed, replica, XI_STREAM)
    scale = math.sqrt(2.0 * tau / M)
    iterates = np.empty((K + 1, target.dim))
    iterates[0] = theta
    for k in range(K):
        xi = xi_rng.standard_normal(target.dim)
        theta = theta - target.grad(theta) / M + scale * xi
        iterates[k + 1] = theta
    config = LmcConfig(h=tau / M, K=K, seed=seed)
    return Trajectory(iterates, config, time.perf_counter() - t0, replica=replica, tau=tau)


def _chunk_rows(K: int, p: int) -> int:
    # keep per-chunk noise tensors around 64 MB
    return max(1, min(4096, 8_000_000 // max(1, K * p)))


def final_states(
    target: TargetPotential, config: LmcConfig, initial: InitialState, replicas: int
) -> np.ndarray:
    """Final iterates of many independent replicas, shape (replicas, dim).

    Replica r reproduces the single-chain run with the same seed and
    replica index up to floating-point reassociation in batched linear
    algebra; its noise streams are exactly the same.  Results do not
    depend on the thread cap, and prefixes agree across different
    replica counts.  Exact and additive-noise oracles run vectorized;
    the subsampled oracle falls back to one chain at a time.
    """
    replicas = int(replicas)
    if replicas < 1:
        raise ValueError(f"replicas must be at least 1, got {replicas}")
    _check_step_size(config.h, target)
    oracle = config.oracle
    if oracle.mode == "subsampled":
        rows = parallel_map(
            lambda r: _run_chain(target, config, initial, r).iterates[-1], range(replicas)
        )
        return np.stack(rows)

    h, K, p, seed = config.h, config.K, target.dim, config.seed
    root = math.sqrt(2.0 * h)
    noisy = oracle.mode == "gaussian"
    out = np.empty((replicas, p))
    chunk = _chunk_rows(K, p)
    starts = list(range(0, replicas, chunk))

    def run_block(r0: int) -> None:
        r1 = min(r0 + chunk, replicas)
        n = r1 - r0
        theta = np.empty((n, p))
        if callable(initial):
            for j, r in enumerate(range(r0, r1)):
                theta[j] = _resolve_initial(initial, target, seed, r)
        else:
            theta[:] = _resolve_initial(initial, target, seed, 0)
        xi = np.empty((n, K, p))
        for j, r in enumerate(range(r0, r1)):
            xi[j] = noise_stream(seed, r, XI_STREAM).standard_normal((K, p))
        zeta = None
        if noisy:
            zeta = np.empty((n, K, p))
            for j, r in enumerate(range(r0, r1)):
                stream = noise_stream(seed, r, ZETA_STREAM)
                if oracle.noise == "gaussian":
                    zeta[j] = stream.standard_normal((K, p))
                else:
                    zeta[j] = 2.0 * stream.integers(0, 2, size=(K, p)).astype(float) - 1.0
        for k in range(K):
            y = target.grad(theta)
            if noisy:
                y = y + oracle.sigma * zeta[:, k, :]
            theta = theta - h * y + root * xi[:, k, :]
        out[r0:r1] = theta

    parallel_map(run_block, starts)
    return out


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Write iterates as CSV with header k,theta_0,...,theta_{p-1}.

    Floats are written with repr so the file round-trips bit for bit.
    """
    p = traj.iterates.shape[1]
    header = "k," + ",".join(f"theta_{j}" for j in range(p))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for k, row in enumerate(traj.iterates):
            fh.write(str(k) + "," + ",".join(repr(float(x)) for x in row) + "\n")


def trajectory_summary(traj: Trajectory) -> dict:
    """JSON-ready run summary: config echo, final state, per-coordinate path means."""
    summary = {
        "dim": int(traj.iterates.shape[1]),
        "iterations": int(traj.iterates.shape[0] - 1),
        "h": traj.config.h,
        "seed": traj.config.seed,
        "oracle": traj.config.oracle.mode,
        "sigma": traj.config.oracle.sigma,
        "replica": traj.replica,
        "wall_time_s": traj.wall_time,
        "final": [float(x) for x in traj.iterates[-1]],
        "path_mean": [float(x) for x in traj.iterates.mean(axis=0)],
    }
    if traj.tau is not None:
        summary["tau"] = traj.tau
    return summary
