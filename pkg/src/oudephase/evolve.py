"""Evolution engines for the two-qubit pure-dephasing channel.

Three independent routes compute the same reduced state rho(t):

* ``propagate_analytic`` applies the closed-form element map: populations
  are constant, single-flip coherences pick up exp(-f(t)) and double-flip
  coherences exp(-2 f(t)).
* ``propagate_kraus`` applies the operator sum over the four diagonal
  Kraus operators built from p = exp(-f) and q = sqrt(1 - p^2).
* ``integrate_master`` integrates the time-local master equation
  d rho/dt = (G(t)/2) (Z_A rho Z_A + Z_B rho Z_B - 2 rho) with classic RK4.

``mc_average`` estimates rho(t) by averaging stochastic unitary
trajectories: each trajectory draws independent OU phase integrals F_A,
F_B and rotates the basis states by exp(-i (s_A F_A + s_B F_B)/2), the
half coming from the Omega/2 coupling in the Hamiltonian.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import noise, qmat
from .errors import (
    IncompleteKrausSet,
    InvalidStep,
    NegativeTime,
    TooFewTrajectories,
)

# z eigenvalue patterns of qubits A and B over the basis |00>..|11>.
_DIAG_Z_A = np.array([1.0, 1.0, -1.0, -1.0])
_DIAG_Z_B = np.array([1.0, -1.0, 1.0, -1.0])

# DECAY_WEIGHTS[j, k] counts the qubits whose bit differs between basis
# states j and k; element (j, k) decays as exp(-f * weight).
DECAY_WEIGHTS = 0.5 * (
    (1.0 - np.outer(_DIAG_Z_A, _DIAG_Z_A)) + (1.0 - np.outer(_DIAG_Z_B, _DIAG_Z_B))
)

_COMPLETENESS_ATOL = 1e-10
_CHUNK = 4096


@dataclass(frozen=True)
class KrausSet:
    """The four diagonal Kraus operators at one instant.

    k : tuple of four 4x4 complex arrays
    p : exp(-f(t)), in (0, 1]
    q : sqrt(1 - p^2)
    """

    k: tuple
    p: float
    q: float

    def completeness_residual(self) -> float:
        """max|sum_mu K_mu^dag K_mu - I|."""
        total = sum(op.conj().T @ op for op in self.k)
        return float(np.max(np.abs(total - qmat.EYE4)))


def kraus_set(params: noise.NoiseParams, t: float) -> KrausSet:
    """Kraus operators of the two-qubit dephasing channel at time t >= 0."""
    if t < 0.0:
        raise NegativeTime(f"t must be >= 0, got {t!r}")
    f = noise.dephasing_exponent_f(params, t)
    p = float(np.exp(-f))
    q = float(np.sqrt(-np.expm1(-2.0 * f)))
    keep = np.diag([p, 1.0]).astype(np.complex128)
    lose = np.diag([q, 0.0]).astype(np.complex128)
    ops = (
        qmat.kron(keep, keep),
        qmat.kron(keep, lose),
        qmat.kron(lose, keep),
        qmat.kron(lose, lose),
    )
    return KrausSet(k=ops, p=p, q=q)


def propagate_analytic(
    rho0: qmat.CMat4, params: noise.NoiseParams, t: float, *, check: bool = True
) -> qmat.CMat4:
    """Closed-form propagation of a density matrix to time t >= 0."""
    rho = qmat.validate_density(rho0) if check else np.asarray(rho0, dtype=np.complex128)
    if t < 0.0:
        raise NegativeTime(f"t must be >= 0, got {t!r}")
    f = noise.dephasing_exponent_f(params, t)
    return rho * np.exp(-f * DECAY_WEIGHTS)


def propagate_kraus(
    rho0: qmat.CMat4, ks: KrausSet, *, check: bool = True
) -> qmat.CMat4:
    """Operator-sum propagation rho -> sum_mu K_mu rho K_mu^dag."""
    rho = qmat.validate_density(rho0) if check else np.asarray(rho0, dtype=np.complex128)
    residual = ks.completeness_residual()
    if residual > _COMPLETENESS_ATOL:
        raise IncompleteKrausSet(
            f"completeness residual {residual:.3e} > {_COMPLETENESS_ATOL:.0e}")
    out = np.zeros((4, 4), dtype=np.complex128)
    for op in ks.k:
        out += op @ rho @ op.conj().T
    return out


def _master_rhs(rho: np.ndarray, g: float, sign: float) -> np.ndarray:
    # Z rho Z for diagonal Z is an elementwise scaling by outer(d, d).
    sandwich = (
        _DIAG_Z_A[:, None] * rho * _DIAG_Z_A[None, :]
        + _DIAG_Z_B[:, None] * rho * _DIAG_Z_B[None, :]
    )
    return sign * 0.5 * g * (sandwich - 2.0 * rho)


def integrate_master(
    rho0: qmat.CMat4,
    params: noise.NoiseParams,
    t_end: float,
    dt: float,
    *,
    check: bool = True,
    _flip_sign: bool = False,
) -> qmat.CMat4:
    """RK4 integration of the dephasing master equation up to t_end.

    G(t) is evaluated at the RK4 substep times.  ``_flip_sign`` is a debug
    hook that negates the generator so mutation checks can confirm the
    engine cross-validation notices.
    """
    rho = qmat.validate_density(rho0) if check else np.asarray(rho0, dtype=np.complex128)
    if t_end < 0.0:
        raise NegativeTime(f"t_end must be >= 0, got {t_end!r}")
    if dt <= 0.0:
        raise InvalidStep(f"dt must be > 0, got {dt!r}")
    sign = -1.0 if _flip_sign else 1.0

    n_full = int(t_end / dt + 1e-12)
    remainder = t_end - n_full * dt
    steps = [dt] * n_full
    if remainder > 1e-12 * max(1.0, t_end):
        steps.append(remainder)

    rho = rho.copy()
    t = 0.0
    for h in steps:
        g0 = noise.memory_coefficient_G(params, t)
        gh = noise.memory_coefficient_G(params, t + 0.5 * h)
        g1 = noise.memory_coefficient_G(params, t + h)
        k1 = _master_rhs(rho, g0, sign)
        k2 = _master_rhs(rho + 0.5 * h * k1, gh, sign)
        k3 = _master_rhs(rho + 0.5 * h * k2, gh, sign)
        k4 = _master_rhs(rho + h * k3, g1, sign)
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
    return rho


@dataclass(frozen=True)
class MCResult:
    """Monte Carlo estimate of rho on a time grid.

    rho_mean : (n_times, 4, 4) complex, trajectory average per time
    rho_stderr : (n_times, 4, 4) complex; real part holds the standard
        error of the real part, imaginary part that of the imaginary part
    """

    times: np.ndarray
    rho_mean: np.ndarray
    rho_stderr: np.ndarray
    n_traj: int


def _interp_rows(values: np.ndarray, t_grid: np.ndarray, dt: float) -> np.ndarray:
    """Linear interpolation of per-row uniform-grid samples at t_grid."""
    n_last = values.shape[1] - 1
    pos = t_grid / dt
    idx = np.minimum(pos.astype(int), n_last)
    frac = pos - idx
    over = idx >= n_last
    idx = np.where(over, n_last - 1 if n_last else 0, idx)
    frac = np.where(over, 1.0 if n_last else 0.0, frac)
    if n_last == 0:
        return np.repeat(values, len(t_grid), axis=1)
    return values[:, idx] * (1.0 - frac) + values[:, idx + 1] * frac


def _mc_chunk(job) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rho0, params, t_grid, n_steps, dt, seed, lo, hi = job
    seeds_a = [noise.path_seed(seed, 2 * i) for i in range(lo, hi)]
    seeds_b = [noise.path_seed(seed, 2 * i + 1) for i in range(lo, hi)]
    _, phase_a = noise.sample_path_batch(params, dt, n_steps, seeds_a)
    _, phase_b = noise.sample_path_batch(params, dt, n_steps, seeds_b)
    fa = _interp_rows(phase_a, t_grid, dt)          # (m, n_times)
    fb = _interp_rows(phase_b, t_grid, dt)
    phi = 0.5 * (fa[..., None] * _DIAG_Z_A + fb[..., None] * _DIAG_Z_B)
    factors = np.exp(-1j * (phi[..., :, None] - phi[..., None, :]))
    states = rho0[None, None, :, :] * factors       # (m, n_times, 4, 4)
    return (
        states.sum(axis=0),
        (states.real ** 2).sum(axis=0),
        (states.imag ** 2).sum(axis=0),
    )


def mc_average(
    rho0: qmat.CMat4,
    params: noise.NoiseParams,
    t_grid,
    n_traj: int,
    dt: float,
    seed: int,
    *,
    n_workers: int = 1,
) -> MCResult:
    """Average stochastic phase trajectories of the initial state.

    Each trajectory owns two OU paths seeded from (seed, trajectory index)
    through a splitmix64 stream, and partial sums are combined in fixed
    chunk order, so the result is bitwise independent of ``n_workers``.
    """
    rho = qmat.validate_density(rho0)
    if n_traj < 2:
        raise TooFewTrajectories(f"n_traj must be >= 2, got {n_traj}")
    if dt <= 0.0:
        raise InvalidStep(f"dt must be > 0, got {dt!r}")
    t_arr = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t_arr.size == 0:
        raise ValueError("t_grid must not be empty")
    if np.any(t_arr < 0.0):
        raise NegativeTime(f"t_grid entries must be >= 0, got {t_grid!r}")

    t_max = float(t_arr.max())
    n_steps = int(np.ceil(t_max / dt - 1e-9)) if t_max > 0.0 else 0

    bounds = list(range(0, n_traj, _CHUNK)) + [n_traj]
    jobs = [
        (rho, params, t_arr, n_steps, dt, seed, lo, hi)
        for lo, hi in zip(bounds[:-1], bounds[1:])
    ]
    if n_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            partials = list(pool.map(_mc_chunk, jobs))
    else:
        partials = [_mc_chunk(job) for job in jobs]

    sum1 = np.zeros((t_arr.size, 4, 4), dtype=np.complex128)
    sum2_re = np.zeros((t_arr.size, 4, 4))
    sum2_im = np.zeros((t_arr.size, 4, 4))
    for s1, s2r, s2i in partials:
        sum1 += s1
        sum2_re += s2r
        sum2_im += s2i

    mean = sum1 / n_traj
    var_re = np.clip((sum2_re - n_traj * mean.real ** 2) / (n_traj - 1), 0.0, None)
    var_im = np.clip((sum2_im - n_traj * mean.imag ** 2) / (n_traj - 1), 0.0, None)
    stderr = np.sqrt(var_re / n_traj) + 1j * np.sqrt(var_im / n_traj)
    return MCResult(times=t_arr, rho_mean=mean, rho_stderr=stderr, n_traj=n_traj)
