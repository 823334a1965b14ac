"""Ornstein-Uhlenbeck dephasing noise: statistics and path sampling.

The frequency fluctuation Omega(t) driving each qubit is a stationary
Gaussian process with

    E[Omega(t)]          = 0
    E[Omega(t) Omega(s)] = (Gamma * gamma / 2) * exp(-gamma * |t - s|)

where Gamma is the long-time dephasing rate and gamma the noise bandwidth
(memory time tau_c = 1/gamma).  Integrating the kernel gives the memory
coefficient

    G(t) = (Gamma / 2) * (1 - exp(-gamma * t))

and integrating once more the dephasing exponent

    f(t) = (Gamma / 2) * (t + (exp(-gamma * t) - 1) / gamma)

with the limits f -> Gamma*t/2 for gamma*t >> 1 (markov) and
f -> Gamma*gamma*t^2/4 for gamma*t << 1 (short_time).

Path sampling uses the exact OU transition kernel, so the marginal law of
Omega is exact at any step size; only the accumulated phase integral
F(t) = int_0^t Omega ds carries O(dt^2) trapezoid error.  Normal variates
come from numpy's PCG64 generator seeded with the given integer, which
pins the trajectories bitwise for a given seed.
"""

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.signal import lfilter

from .errors import InsufficientData, InvalidStep, NegativeTime

FMode = Literal["exact", "markov", "short_time"]
F_MODES = ("exact", "markov", "short_time")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A1BC9


@dataclass(frozen=True)
class NoiseParams:
    """Noise strengths, identical for both qubits.

    Gamma : long-time dephasing rate (> 0)
    gamma : noise bandwidth (> 0); tau_c = 1/gamma is the memory time
    """

    Gamma: float
    gamma: float

    def __post_init__(self):
        for name in ("Gamma", "gamma"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    @property
    def tau_c(self) -> float:
        return 1.0 / self.gamma


@dataclass(frozen=True)
class OUTrajectory:
    """One sampled noise realization on a uniform time grid.

    omega[k] is Omega(k*dt); phase[k] is the trapezoid-accumulated
    F(k*dt) = int_0^{k dt} Omega ds, with phase[0] = 0.
    """

    dt: float
    omega: np.ndarray
    phase: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.omega))


def correlation(params: NoiseParams, tau: float) -> float:
    """Noise autocorrelation (Gamma*gamma/2) * exp(-gamma*|tau|)."""
    return 0.5 * params.Gamma * params.gamma * float(np.exp(-params.gamma * abs(tau)))


def memory_coefficient_G(params: NoiseParams, t):
    """Integrated kernel G(t) = (Gamma/2)(1 - exp(-gamma t)); t >= 0.

    Accepts a scalar or array of times.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise NegativeTime(f"t must be >= 0, got {t!r}")
    out = -0.5 * params.Gamma * np.expm1(-params.gamma * t_arr)
    return float(out) if t_arr.ndim == 0 else out


def dephasing_exponent_f(params: NoiseParams, t, mode: FMode = "exact"):
    """Dephasing exponent f(t) in the chosen approximation; t >= 0.

    mode "exact" integrates G(t) in closed form, "markov" uses the
    stationary limit Gamma*t/2, "short_time" the early-time quadratic
    Gamma*gamma*t^2/4.  Accepts a scalar or array of times.
    """
    if mode not in F_MODES:
        raise ValueError(f"unknown f mode {mode!r}; expected one of {F_MODES}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0.0):
        raise NegativeTime(f"t must be >= 0, got {t!r}")
    if mode == "exact":
        out = 0.5 * params.Gamma * (t_arr + np.expm1(-params.gamma * t_arr) / params.gamma)
    elif mode == "markov":
        out = 0.5 * params.Gamma * t_arr
    else:
        out = 0.25 * params.Gamma * params.gamma * t_arr * t_arr
    return float(out) if t_arr.ndim == 0 else out


def path_seed(master_seed: int, index: int) -> int:
    """Per-stream 64-bit seed: the index-th output of a splitmix64 sequence
    whose state starts at master_seed."""
    z = (master_seed + (index + 1) * _GOLDEN) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


def sample_path_batch(
    params: NoiseParams, dt: float, n_steps: int, seeds: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Sample one OU path per seed; rows are bitwise independent of the batch.

    Returns (omega, phase), each of shape (len(seeds), n_steps + 1).
    Omega(0) is drawn from the stationary law N(0, Gamma*gamma/2) and
    updated with the exact transition kernel

        Omega_{k+1} = Omega_k * exp(-gamma dt) + xi_k,
        xi_k ~ N(0, (Gamma*gamma/2) * (1 - exp(-2 gamma dt)));

    the phase is the trapezoid cumulative integral of omega.
    """
    if dt <= 0.0:
        raise InvalidStep(f"dt must be > 0, got {dt!r}")
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps!r}")
    var_stat = 0.5 * params.Gamma * params.gamma
    decay = float(np.exp(-params.gamma * dt))
    sig0 = np.sqrt(var_stat)
    sig_step = np.sqrt(var_stat * -np.expm1(-2.0 * params.gamma * dt))

    draws = np.empty((len(seeds), n_steps + 1))
    for i, seed in enumerate(seeds):
        rng = np.random.Generator(np.random.PCG64(int(seed)))
        draws[i] = rng.standard_normal(n_steps + 1)
    draws[:, 0] *= sig0
    if n_steps:
        draws[:, 1:] *= sig_step

    # lfilter runs the linear recursion y[k] = decay*y[k-1] + x[k] in C.
    omega = lfilter([1.0], [1.0, -decay], draws, axis=1)
    phase = np.empty_like(omega)
    phase[:, 0] = 0.0
    if n_steps:
        np.cumsum(0.5 * dt * (omega[:, :-1] + omega[:, 1:]), axis=1, out=phase[:, 1:])
    return omega, phase


def ou_sample_path(
    params: NoiseParams, dt: float, n_steps: int, rng_seed: int
) -> OUTrajectory:
    """Sample a single OU trajectory; deterministic for a given seed."""
    omega, phase = sample_path_batch(params, dt, n_steps, [rng_seed])
    return OUTrajectory(dt=dt, omega=omega[0], phase=phase[0])


def estimate_autocovariance(
    paths: Sequence[OUTrajectory], lag: int
) -> tuple[float, float]:
    """Ensemble-and-time averaged lag covariance with jackknife standard error.

    The process mean is zero by construction, so the raw product moment
    mean(omega[k] * omega[k + lag]) is used per path; the estimate averages
    over paths and the standard error is the leave-one-path-out jackknife.
    """
    n_paths = len(paths)
    if n_paths < 2:
        raise InsufficientData(f"need at least 2 paths, got {n_paths}")
    if lag < 0:
        raise ValueError(f"lag must be >= 0, got {lag}")
    lengths = {len(tr.omega) for tr in paths}
    if len(lengths) != 1:
        raise InsufficientData("paths must share a common length")
    n_pts = lengths.pop()
    if lag >= n_pts:
        raise InsufficientData(f"lag {lag} not below path length {n_pts}")

    omega = np.stack([tr.omega for tr in paths])
    prods = omega[:, : n_pts - lag] * omega[:, lag:]
    per_path = prods.mean(axis=1)
    estimate = float(per_path.mean())
    loo = (per_path.sum() - per_path) / (n_paths - 1)
    se = float(np.sqrt((n_paths - 1) / n_paths * np.sum((loo - loo.mean()) ** 2)))
    return estimate, se
