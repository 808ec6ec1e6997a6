"""Systematic checks of the bounds against exact Gaussian calculations.

Each check sweeps randomized quadratic targets, where chain laws and
distances are available in closed form, and confirms an inequality the
library relies on.  All randomness is seeded, so a given seed always
checks the same grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import (
    BoundInputs,
    LARGE_STEP,
    SMALL_STEP,
    init_w2_from_f,
    init_w2_from_mean,
    lmc_bound,
    noisy_lmc_bound,
)
from .gaussian_oracle import (
    GaussianMoments,
    gaussian_w2,
    stationary_moments,
    w2_init_exact,
)
from .targets import quadratic_target

__all__ = [
    "CheckResult",
    "random_spd",
    "check_lmc_bound_validity",
    "check_regime_continuity",
    "check_noise_dominance",
    "check_stationary_gradient_norm",
    "check_init_bound_ordering",
    "run_all_checks",
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    cells: int
    worst: float
    detail: str = ""

    def __str__(self) -> str:
        status = "ok" if self.passed else "FAILED"
        line = f"{self.name}: {status} ({self.cells} cells, worst margin {self.worst:.3e})"
        if self.detail:
            line += f"\n  {self.detail}"
        return line


def _rng(seed: int, salt: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, salt], dtype=np.uint64)))


def random_spd(rng: np.random.Generator, p: int, lo: float = 1.0, hi: float = 10.0) -> np.ndarray:
    """Random symmetric positive definite matrix with spectrum in [lo, hi]."""
    q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    w = rng.uniform(lo, hi, p)
    a = (q * w) @ q.T
    return (a + a.T) / 2.0


def check_lmc_bound_validity(
    seed: int = 0,
    dims: tuple[int, ...] = (1, 2, 5, 10),
    targets_per_dim: int = 10,
    n_steps: int = 20,
    checkpoints: tuple[int, ...] = (1, 10, 100, 1000),
    slack: float = 1e-10,
) -> CheckResult:
    """Exact W2 error of the chain never exceeds the closed-form bound.

    Sweeps random quadratics, step sizes across both regimes, and
    iteration checkpoints; the exact distance comes from the Gaussian
    moment recursion.  Cell count is
    len(dims) * targets_per_dim * n_steps * len(checkpoints).
    """
    rng = _rng(seed, 1)
    checkpoints = tuple(sorted(set(int(k) for k in checkpoints)))
    horizon = max(checkpoints)
    cells = 0
    worst = -np.inf
    first_bad = ""
    for p in dims:
        for _ in range(targets_per_dim):
            target = quadratic_target(rng.standard_normal(p), random_spd(rng, p))
            spec = target.oracle_meta
            pi = stationary_moments(spec)
            theta0 = spec.mean + 3.0 * rng.standard_normal(p)
            w2_0 = w2_init_exact(spec, theta0)
            hs = np.linspace(0.02, 0.98, n_steps) * (2.0 / target.M)
            A, mu = spec.precision, spec.mean
            eye = np.eye(p)
            E = eye[None, :, :] - hs[:, None, None] * A[None, :, :]
            Et = np.swapaxes(E, 1, 2)
            drive = 2.0 * hs[:, None, None] * eye[None, :, :]
            mean = np.broadcast_to(theta0, (n_steps, p)).copy()
            cov = np.zeros((n_steps, p, p))
            for k in range(1, horizon + 1):
                mean = mean - hs[:, None] * ((mean - mu) @ A)
                cov = E @ cov @ Et + drive
                if k in checkpoints:
                    for j, h in enumerate(hs):
                        sym = (cov[j] + cov[j].swapaxes(0, 1)) / 2.0
                        w2 = gaussian_w2(GaussianMoments(mean[j], sym), pi)
                        bound = lmc_bound(
                            BoundInputs(m=target.m, M=target.M, h=float(h), K=k, p=p, w2_init=w2_0)
                        ).value
                        margin = w2 - bound
                        cells += 1
                        if margin > worst:
                            worst = margin
                        if margin > slack + slack * abs(bound) and not first_bad:
                            first_bad = (
                                f"p={p} h={h:.6g} K={k}: exact W2 {w2:.12g} exceeds "
                                f"bound {bound:.12g} by {margin:.3e}"
                            )
    return CheckResult("lmc bound dominates exact W2", not first_bad, cells, worst, first_bad)


def check_regime_continuity(seed: int = 0, trials: int = 100, rtol: float = 1e-12) -> CheckResult:
    """The two branches of the exact-gradient bound agree at h = 2/(m+M)."""
    rng = _rng(seed, 2)
    worst = 0.0
    first_bad = ""
    for _ in range(trials):
        m = float(rng.uniform(0.1, 5.0))
        M = m * float(rng.uniform(1.0, 20.0))
        K = int(rng.integers(0, 1000))
        p = int(rng.integers(1, 100))
        w2 = float(rng.uniform(0.0, 50.0))
        inputs = BoundInputs(m=m, M=M, h=2.0 / (m + M), K=K, p=p, w2_init=w2)
        a = lmc_bound(inputs, regime=SMALL_STEP).value
        b = lmc_bound(inputs, regime=LARGE_STEP).value
        rel = abs(a - b) / max(abs(a), abs(b), 1e-300)
        worst = max(worst, rel)
        if rel > rtol and not first_bad:
            first_bad = f"m={m:.6g} M={M:.6g} K={K} p={p} w2={w2:.6g}: branches {a!r} vs {b!r}"
    return CheckResult("bound branches agree at the regime boundary", not first_bad, trials, worst, first_bad)


def check_noise_dominance(seed: int = 0, trials: int = 1000) -> CheckResult:
    """At sigma = 0 the noisy-gradient bound is no tighter than the exact one.

    The noisy analysis pays for generality, so its zero-noise value must
    sit at or above the exact-gradient bound wherever both are stated.
    """
    rng = _rng(seed, 3)
    worst = -np.inf
    first_bad = ""
    for _ in range(trials):
        m = float(rng.uniform(0.1, 5.0))
        M = m * float(rng.uniform(1.0, 20.0))
        h = float(rng.uniform(0.0, 1.0)) * (2.0 / M)
        if h <= 0.0:
            h = 1.0 / (m + M)
        K = int(rng.integers(0, 2000))
        p = int(rng.integers(1, 100))
        w2 = float(rng.uniform(0.0, 50.0))
        inputs = BoundInputs(m=m, M=M, h=h, K=K, p=p, w2_init=w2, sigma=0.0)
        if h >= 2.0 / M:
            continue
        exact = lmc_bound(inputs).value
        noisy = noisy_lmc_bound(inputs).value
        margin = exact - noisy
        worst = max(worst, margin)
        if margin > 0.0 and not first_bad:
            first_bad = (
                f"m={m:.6g} M={M:.6g} h={h:.6g} K={K} p={p} w2={w2:.6g}: "
                f"noisy bound {noisy!r} below exact bound {exact!r}"
            )
    return CheckResult("noisy bound dominates exact bound at sigma=0", not first_bad, trials, worst, first_bad)


def check_stationary_gradient_norm(seed: int = 0, trials: int = 100, rtol: float = 1e-12) -> CheckResult:
    """Mean squared gradient norm under the target is at most M * p.

    For quadratics the mean is exactly tr(precision), computable without
    sampling, and the cap p * (largest eigenvalue) must dominate it.
    """
    rng = _rng(seed, 4)
    worst = -np.inf
    first_bad = ""
    for _ in range(trials):
        p = int(rng.integers(1, 30))
        target = quadratic_target(rng.standard_normal(p), random_spd(rng, p, 0.5, 20.0))
        exact = float(np.trace(target.oracle_meta.precision))
        cap = target.M * p
        margin = exact - cap
        worst = max(worst, margin / max(cap, 1e-300))
        if exact > cap * (1.0 + rtol) and not first_bad:
            first_bad = f"p={p}: tr(precision)={exact!r} exceeds M*p={cap!r}"
    return CheckResult("stationary gradient moment under M*p", not first_bad, trials, worst, first_bad)


def check_init_bound_ordering(seed: int = 0, trials: int = 100, rtol: float = 1e-12) -> CheckResult:
    """Computable initial-distance bounds dominate the exact initial W2.

    Checks both the mean-based and the potential-based bound, the latter
    with the generic lower bound 0 and with the exact stationary mean of
    f (p/2 for quadratics), which must be tighter yet still valid.
    """
    rng = _rng(seed, 5)
    worst = -np.inf
    first_bad = ""
    cells = 0
    for _ in range(trials):
        p = int(rng.integers(1, 30))
        target = quadratic_target(rng.standard_normal(p), random_spd(rng, p, 0.5, 20.0))
        spec = target.oracle_meta
        theta0 = spec.mean + float(rng.uniform(0.5, 5.0)) * rng.standard_normal(p)
        exact = w2_init_exact(spec, theta0)
        d2 = float(np.sum((theta0 - spec.mean) ** 2))
        f0 = float(target.eval(theta0))
        trio = (
            ("mean-based", init_w2_from_mean(d2, p, target.m)),
            ("f-based, generic floor", init_w2_from_f(f0, p, target.m, 0.0)),
            ("f-based, exact mean of f", init_w2_from_f(f0, p, target.m, p / 2.0)),
        )
        for label, val in trio:
            cells += 1
            margin = exact - val
            worst = max(worst, margin / max(val, 1e-300))
            if exact > val * (1.0 + rtol) and not first_bad:
                first_bad = f"p={p} {label}: exact {exact!r} exceeds bound {val!r}"
        if trio[2][1] > trio[1][1] * (1.0 + rtol) and not first_bad:
            first_bad = (
                f"p={p}: tighter floor gave looser bound "
                f"({trio[2][1]!r} > {trio[1][1]!r})"
            )
    return CheckResult("initial-distance bounds dominate exact W2", not first_bad, cells, worst, first_bad)


def run_all_checks(seed: int = 0) -> list[CheckResult]:
    """Full deterministic validation sweep, in a fixed order."""
    return [
        check_lmc_bound_validity(seed),
        check_regime_continuity(seed),
        check_noise_dominance(seed),
        check_stationary_gradient_norm(seed),
        check_init_bound_ordering(seed),
    ]
