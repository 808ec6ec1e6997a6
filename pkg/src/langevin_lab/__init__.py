"""Langevin Monte Carlo with computable Wasserstein-2 guarantees.

The pieces fit together like this: ``targets`` describes the densities
(strongly convex potential plus curvature constants), ``sampler`` runs
the chains, ``bounds`` evaluates closed-form W2 error guarantees,
``planner`` inverts them into (step size, iteration count) choices,
``gaussian_oracle`` supplies exact reference laws on quadratic targets,
and ``validation`` sweeps the bounds against that reference.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundInputs,
    BoundReport,
    LARGE_STEP,
    SMALL_STEP,
    baseline_bound,
    contraction_factor,
    init_w2_from_f,
    init_w2_from_mean,
    lmc_bound,
    noisy_lmc_bound,
)
from .gaussian_oracle import (
    GaussianMoments,
    empirical_w2_1d,
    gaussian_w2,
    moments_after_k,
    point_mass,
    stationary_moments,
    w2_init_exact,
)
from .planner import (
    CurvePoint,
    Plan,
    UnreachablePrecisionError,
    default_h_grid,
    figure1_curves,
    minimal_k_baseline,
    minimal_k_lmc,
    plan_for_epsilon,
)
from .sampler import (
    GradientOracle,
    LmcConfig,
    Trajectory,
    final_states,
    gradient_descent,
    lmc_step,
    noise_stream,
    oracle_gradient,
    run_lmc,
    run_nlmc,
    run_tempered_lmc,
)
from .targets import (
    QuadraticSpec,
    SumStructure,
    TargetPotential,
    check_curvature,
    custom_target,
    load_target,
    logistic_target,
    quadratic_target,
    target_from_dict,
    temper,
)

__all__ = [
    "__version__",
    "BoundInputs",
    "BoundReport",
    "LARGE_STEP",
    "SMALL_STEP",
    "baseline_bound",
    "contraction_factor",
    "init_w2_from_f",
    "init_w2_from_mean",
    "lmc_bound",
    "noisy_lmc_bound",
    "GaussianMoments",
    "empirical_w2_1d",
    "gaussian_w2",
    "moments_after_k",
    "point_mass",
    "stationary_moments",
    "w2_init_exact",
    "CurvePoint",
    "Plan",
    "UnreachablePrecisionError",
    "default_h_grid",
    "figure1_curves",
    "minimal_k_baseline",
    "minimal_k_lmc",
    "plan_for_epsilon",
    "GradientOracle",
    "LmcConfig",
    "Trajectory",
    "final_states",
    "gradient_descent",
    "lmc_step",
    "noise_stream",
    "oracle_gradient",
    "run_lmc",
    "run_nlmc",
    "run_tempered_lmc",
    "QuadraticSpec",
    "SumStructure",
    "TargetPotential",
    "check_curvature",
    "custom_target",
    "load_target",
    "logistic_target",
    "quadratic_target",
    "target_from_dict",
    "temper",
]
