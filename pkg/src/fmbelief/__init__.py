"""Finite-memory belief approximation experiments for linear-Gaussian control."""

__version__ = "0.1.0"

from .control import LqrGain, lqr_gain, solve_dare  # noqa: E402
from .filtering import (IoWindow, boundary_belief, finite_memory_belief,  # noqa: E402
                        kalman_step, obs_only_belief)
from .gaussian import GaussianBelief, sqrt_psd, w2_gaussian  # noqa: E402
from .metrics import (discounted_cost, estimate_epsilon, fit_exponential_decay,  # noqa: E402
                      fit_gap_scaling)
from .model import (LqgModel, belief_stage_cost, default_model,  # noqa: E402
                    double_integrator, stage_cost)
from .simulation import TrajectoryRecord, rollout  # noqa: E402

__all__ = [
    "GaussianBelief", "sqrt_psd", "w2_gaussian",
    "LqgModel", "double_integrator", "default_model", "stage_cost", "belief_stage_cost",
    "LqrGain", "solve_dare", "lqr_gain",
    "IoWindow", "kalman_step", "boundary_belief", "finite_memory_belief", "obs_only_belief",
    "TrajectoryRecord", "rollout",
    "estimate_epsilon", "discounted_cost", "fit_exponential_decay", "fit_gap_scaling",
]
