"""Entanglement dynamics of two non-interacting qubits under independent
classical Ornstein-Uhlenbeck dephasing noise: closed-form, Kraus,
master-equation and Monte Carlo evolution engines plus concurrence and
sudden-death analysis."""

from .entangle import (
    AlphaState,
    ConcurrenceResult,
    XState,
    bell_phi_plus,
    concurrence_bound,
    concurrence_general,
    concurrence_xstate,
    esd_time,
    esd_time_xstate,
    evolve_xstate,
    q_alpha,
    q_alpha_values,
    random_x_state,
)
from .evolve import (
    DECAY_WEIGHTS,
    KrausSet,
    MCResult,
    integrate_master,
    kraus_set,
    mc_average,
    propagate_analytic,
    propagate_kraus,
)
from .noise import (
    NoiseParams,
    OUTrajectory,
    correlation,
    dephasing_exponent_f,
    estimate_autocovariance,
    memory_coefficient_G,
    ou_sample_path,
    path_seed,
    sample_path_batch,
)
from .qmat import hermitian_eigen, kron, matrix_sqrt_psd, random_density, validate_density

__version__ = "0.1.0"

__all__ = [
    "AlphaState",
    "ConcurrenceResult",
    "DECAY_WEIGHTS",
    "KrausSet",
    "MCResult",
    "NoiseParams",
    "OUTrajectory",
    "XState",
    "bell_phi_plus",
    "concurrence_bound",
    "concurrence_general",
    "concurrence_xstate",
    "correlation",
    "dephasing_exponent_f",
    "esd_time",
    "esd_time_xstate",
    "estimate_autocovariance",
    "evolve_xstate",
    "hermitian_eigen",
    "integrate_master",
    "kraus_set",
    "kron",
    "matrix_sqrt_psd",
    "mc_average",
    "memory_coefficient_G",
    "ou_sample_path",
    "path_seed",
    "propagate_analytic",
    "propagate_kraus",
    "q_alpha",
    "q_alpha_values",
    "random_density",
    "random_x_state",
    "sample_path_batch",
    "validate_density",
]
