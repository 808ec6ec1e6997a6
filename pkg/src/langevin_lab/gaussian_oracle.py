"""Exact distributional reference for the chain on quadratic targets.

For f(x) = (1/2)(x - mu)' A (x - mu) the update

    x_{k+1} = x_k - h A (x_k - mu) + sqrt(2h) xi_{k+1}

maps Gaussians to Gaussians, so the law of the chain after any number
of steps has closed-form moments, and the Wasserstein-2 distance
between two Gaussians is available in closed form as well.  Everything
here is deterministic linear algebra; it is the yardstick the error
bounds are validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .targets import QuadraticSpec

__all__ = [
    "GaussianMoments",
    "point_mass",
    "stationary_moments",
    "moments_after_k",
    "gaussian_w2",
    "empirical_w2_1d",
    "w2_init_exact",
]

_EIG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GaussianMoments:
    """Mean vector and covariance matrix of a Gaussian law.

    The covariance must be symmetric and positive semidefinite up to a
    small tolerance; eigenvalues in [-tol, 0) are clamped to zero so
    point masses and freshly iterated covariances round-trip cleanly.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.asarray(self.cov, dtype=float)
        if mean.ndim != 1:
            raise ValueError(f"mean must be a vector, got shape {mean.shape}")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov must have shape {(mean.size, mean.size)}, got {cov.shape}")
        scale = max(float(np.abs(cov).max()), 1.0)
        asym = float(np.abs(cov - cov.T).max())
        if asym > _EIG_TOL * scale:
            raise ValueError(f"cov is not symmetric: max |S - S'| = {asym:.3e}")
        cov = (cov + cov.T) / 2.0
        w, V = np.linalg.eigh(cov)
        if w[0] < -_EIG_TOL * scale:
            raise ValueError(f"cov is not positive semidefinite: smallest eigenvalue {w[0]:.3e}")
        if w[0] < 0.0:
            cov = (V * np.clip(w, 0.0, None)) @ V.T
            cov = (cov + cov.T) / 2.0
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def point_mass(theta: np.ndarray) -> GaussianMoments:
    """Degenerate law concentrated at theta."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    return GaussianMoments(theta, np.zeros((theta.size, theta.size)))


def stationary_moments(spec: QuadraticSpec) -> GaussianMoments:
    """Moments of the target density itself: N(mean, precision^{-1})."""
    w, V = np.linalg.eigh(spec.precision)
    if w[0] <= 0.0:
        raise ValueError(f"precision must be positive definite; smallest eigenvalue is {w[0]:.6e}")
    cov = (V / w) @ V.T
    return GaussianMoments(spec.mean, (cov + cov.T) / 2.0)


def moments_after_k(
    spec: QuadraticSpec,
    init: GaussianMoments | np.ndarray,
    h: float,
    k: int,
) -> GaussianMoments:
    """Exact law of the chain after k steps from a Gaussian start.

    With E = I - hA the moments evolve as

        mean <- mean - h A (mean - mu)
        cov  <- E cov E' + 2h I

    A deterministic start may be passed as a plain vector.  h > 0 is
    required; no constraint ties h to the curvature here, so transient
    step sizes can be studied too.
    """
    if float(h) <= 0.0:
        raise ValueError(f"step size h must be positive, got {h}")
    k = int(k)
    if k < 0:
        raise ValueError(f"step count k must be nonnegative, got {k}")
    if not isinstance(init, GaussianMoments):
        init = point_mass(init)
    if init.dim != spec.dim:
        raise ValueError(f"init has dimension {init.dim} but the target has dimension {spec.dim}")
    A, mu = spec.precision, spec.mean
    E = np.eye(spec.dim) - h * A
    two_h = 2.0 * h * np.eye(spec.dim)
    mean = init.mean.copy()
    cov = init.cov.copy()
    for _ in range(k):
        mean = mean - h * (A @ (mean - mu))
        cov = E @ cov @ E.T + two_h
        cov = (cov + cov.T) / 2.0
    return GaussianMoments(mean, cov)


def _psd_sqrt(S: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh((S + S.T) / 2.0)
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T


def gaussian_w2(a: GaussianMoments, b: GaussianMoments) -> float:
    """Wasserstein-2 distance between two Gaussian laws.

    W2^2 = ||mean_a - mean_b||^2
           + tr(cov_a + cov_b - 2 (cov_b^{1/2} cov_a cov_b^{1/2})^{1/2})

    Symmetric eigendecompositions keep the cross term stable; the
    squared distance is floored at zero before the final square root to
    absorb roundoff on nearly identical inputs.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} versus {b.dim}")
    delta = a.mean - b.mean
    root_b = _psd_sqrt(b.cov)
    cross = _psd_sqrt(root_b @ a.cov @ root_b)
    w2_sq = float(delta @ delta) + float(np.trace(a.cov) + np.trace(b.cov) - 2.0 * np.trace(cross))
    return math.sqrt(max(w2_sq, 0.0))


def empirical_w2_1d(xs: np.ndarray, ys: np.ndarray) -> float:
    """Wasserstein-2 distance between two equal-size 1-d samples.

    The optimal coupling in one dimension is monotone, so it suffices
    to sort both samples and average the squared gaps.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.size != ys.size:
        raise ValueError(f"samples must have equal size, got {xs.size} and {ys.size}")
    if xs.size == 0:
        raise ValueError("samples must be nonempty")
    gap = np.sort(xs) - np.sort(ys)
    return math.sqrt(float(np.mean(gap * gap)))


def w2_init_exact(spec: QuadraticSpec, theta0: np.ndarray) -> float:
    """Exact W2 distance from a point mass at theta0 to the target law.

    Against a point mass the coupling is forced, giving
    W2^2 = ||theta0 - mean||^2 + tr(precision^{-1}).
    """
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    if theta0.shape != spec.mean.shape:
        raise ValueError(f"theta0 must have shape {spec.mean.shape}, got {theta0.shape}")
    w = np.linalg.eigvalsh(spec.precision)
    if w[0] <= 0.0:
        raise ValueError(f"precision must be positive definite; smallest eigenvalue is {w[0]:.6e}")
    delta = theta0 - spec.mean
    return math.sqrt(float(delta @ delta) + float(np.sum(1.0 / w)))
