"""Entanglement measures and sudden-death analysis for two qubits.

Concurrence follows the Wootters construction: with
rho_tilde = (sigma_y x sigma_y) rho* (sigma_y x sigma_y) and lambda_i the
descending eigenvalues of sqrt(rho) rho_tilde sqrt(rho),

    Q = sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4),   C = max(0, Q).

For X-form states the closed form is

    Q = 2 * max(|rho23| - sqrt(rho11 rho44), |rho14| - sqrt(rho22 rho33)).

The one-parameter family rho_alpha = (1/3) diag-block(alpha, [[1,1],[1,1]],
1-alpha) has the closed-form quantity

    Q_alpha(t) = (2/3) (exp(-f(t)) - sqrt(alpha (1 - alpha)))

whose zero crossing defines the sudden-death time through
f(t_esd) = -ln(alpha (1 - alpha)) / 2; the end points alpha = 0, 1 never
disentangle.  Entanglement of any initial state is bounded by
C(t) <= exp(-2 f(t)) C(0).
"""

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from . import noise, qmat
from .errors import InvalidState, NegativeTime

SIGMA_YY = qmat.kron(qmat.SIGMA_Y, qmat.SIGMA_Y)

_XSTATE_ATOL = 1e-12
_ROOT_RESIDUAL_TOL = 1e-12

Branch = Literal["coherence_23", "coherence_14", "not_applicable"]


@dataclass(frozen=True)
class ConcurrenceResult:
    """Q value, concurrence C = max(0, Q), and the winning X-form branch."""

    q_value: float
    concurrence: float
    active_branch: Branch

    @classmethod
    def from_q(cls, q: float, branch: Branch) -> "ConcurrenceResult":
        return cls(q_value=q, concurrence=max(0.0, q), active_branch=branch)


@dataclass(frozen=True)
class XState:
    """Two-qubit state with entries only on the diagonal and anti-diagonal."""

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho14: complex = 0.0
    rho23: complex = 0.0

    def __post_init__(self):
        diags = (self.rho11, self.rho22, self.rho33, self.rho44)
        if any(d < -_XSTATE_ATOL for d in diags):
            raise InvalidState(f"negative diagonal in {diags}")
        total = sum(diags)
        if abs(total - 1.0) > _XSTATE_ATOL:
            raise InvalidState(f"diagonal sum {total!r} != 1")
        if abs(self.rho14) > math.sqrt(max(self.rho11 * self.rho44, 0.0)) + _XSTATE_ATOL:
            raise InvalidState("|rho14| exceeds sqrt(rho11*rho44)")
        if abs(self.rho23) > math.sqrt(max(self.rho22 * self.rho33, 0.0)) + _XSTATE_ATOL:
            raise InvalidState("|rho23| exceeds sqrt(rho22*rho33)")

    def to_density(self) -> qmat.CMat4:
        rho = np.zeros((4, 4), dtype=np.complex128)
        rho[0, 0], rho[1, 1], rho[2, 2], rho[3, 3] = (
            self.rho11, self.rho22, self.rho33, self.rho44)
        rho[0, 3] = self.rho14
        rho[3, 0] = np.conj(self.rho14)
        rho[1, 2] = self.rho23
        rho[2, 1] = np.conj(self.rho23)
        return rho

    @classmethod
    def from_density(cls, rho: qmat.CMat4, atol: float = 1e-12) -> "XState":
        a = np.asarray(rho, dtype=np.complex128)
        mask = np.ones((4, 4), dtype=bool)
        mask[np.arange(4), np.arange(4)] = False
        mask[0, 3] = mask[3, 0] = mask[1, 2] = mask[2, 1] = False
        worst = float(np.max(np.abs(a[mask])))
        if worst > atol:
            raise InvalidState(f"off-X entry of magnitude {worst:.3e}")
        return cls(
            rho11=a[0, 0].real, rho22=a[1, 1].real,
            rho33=a[2, 2].real, rho44=a[3, 3].real,
            rho14=complex(a[0, 3]), rho23=complex(a[1, 2]))


@dataclass(frozen=True)
class AlphaState:
    """Member of the one-parameter X family, alpha in [0, 1]."""

    alpha: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha!r}")

    def initial_xstate(self) -> XState:
        third = 1.0 / 3.0
        return XState(
            rho11=self.alpha * third, rho22=third, rho33=third,
            rho44=(1.0 - self.alpha) * third, rho14=0.0, rho23=third)


def bell_phi_plus() -> XState:
    """The maximally entangled state (|00> + |11>)/sqrt(2)."""
    return XState(rho11=0.5, rho22=0.0, rho33=0.0, rho44=0.5, rho14=0.5, rho23=0.0)


def concurrence_general(rho: qmat.CMat4, *, check: bool = True) -> ConcurrenceResult:
    """Wootters concurrence of an arbitrary two-qubit density matrix.

    Uses the Hermitian route: the eigenvalues of
    sqrt(rho) rho_tilde sqrt(rho) share the spectrum of rho * rho_tilde,
    and slightly negative values from roundoff are clamped to zero.
    """
    a = qmat.validate_density(rho) if check else np.asarray(rho, dtype=np.complex128)
    evals, vecs = qmat.hermitian_eigen(a)
    roots = np.sqrt(np.where(evals < 0.0, 0.0, evals))
    sqrt_rho = (vecs * roots) @ vecs.conj().T
    rho_tilde = SIGMA_YY @ a.conj() @ SIGMA_YY
    m = sqrt_rho @ rho_tilde @ sqrt_rho
    m = 0.5 * (m + m.conj().T)
    lam, _ = qmat.hermitian_eigen(m)
    lam = np.sqrt(np.where(lam < 0.0, 0.0, lam))[::-1]
    q = float(lam[0] - lam[1] - lam[2] - lam[3])
    return ConcurrenceResult.from_q(q, "not_applicable")


def concurrence_xstate(x: XState) -> ConcurrenceResult:
    """Closed-form concurrence of an X state; ties go to the 23 branch."""
    b23 = abs(x.rho23) - math.sqrt(max(x.rho11 * x.rho44, 0.0))
    b14 = abs(x.rho14) - math.sqrt(max(x.rho22 * x.rho33, 0.0))
    if b23 >= b14:
        return ConcurrenceResult.from_q(2.0 * b23, "coherence_23")
    return ConcurrenceResult.from_q(2.0 * b14, "coherence_14")


def evolve_xstate(
    x: XState, params: noise.NoiseParams, t: float, mode: noise.FMode = "exact"
) -> XState:
    """Dephasing map restricted to the X form: coherences pick up exp(-2f)."""
    if t < 0.0:
        raise NegativeTime(f"t must be >= 0, got {t!r}")
    factor = float(np.exp(-2.0 * noise.dephasing_exponent_f(params, t, mode)))
    return XState(
        rho11=x.rho11, rho22=x.rho22, rho33=x.rho33, rho44=x.rho44,
        rho14=x.rho14 * factor, rho23=x.rho23 * factor)


def q_alpha_values(
    params: noise.NoiseParams, a: AlphaState, t, mode: noise.FMode = "exact"
) -> np.ndarray:
    """Vectorized Q(t) for the alpha family in the chosen f mode."""
    f = noise.dephasing_exponent_f(params, t, mode)
    return (2.0 / 3.0) * (np.exp(-np.asarray(f)) - math.sqrt(a.alpha * (1.0 - a.alpha)))


def q_alpha(
    params: noise.NoiseParams, a: AlphaState, t: float, mode: noise.FMode = "exact"
) -> ConcurrenceResult:
    """Closed-form Q at one time for the alpha family (23 branch active)."""
    q = float(q_alpha_values(params, a, t, mode))
    return ConcurrenceResult.from_q(q, "coherence_23")


def _solve_f_equals(params: noise.NoiseParams, target: float, mode: noise.FMode) -> float:
    """Solve f(t) = target for t >= 0: geometric bracketing, bisection,
    then Newton polish to |f(t) - target| <= 1e-12 (or the fp floor)."""

    def f(t: float) -> float:
        return noise.dephasing_exponent_f(params, t, mode)

    def fprime(t: float) -> float:
        if mode == "markov":
            return 0.5 * params.Gamma
        if mode == "short_time":
            return 0.5 * params.Gamma * params.gamma * t
        return noise.memory_coefficient_G(params, t)

    if target <= 0.0:
        return 0.0
    hi = 1.0 / params.Gamma
    for _ in range(600):
        if f(hi) >= target:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < target:
            lo = mid
        else:
            hi = mid

    t = 0.5 * (lo + hi)
    best_t, best_res = t, abs(f(t) - target)
    for _ in range(60):
        if best_res <= _ROOT_RESIDUAL_TOL:
            break
        slope = fprime(t)
        if slope <= 0.0:
            break
        t -= (f(t) - target) / slope
        if t < 0.0:
            t = 0.0
        res = abs(f(t) - target)
        if res < best_res:
            best_t, best_res = t, res
        else:
            break
    return best_t


def esd_time(
    params: noise.NoiseParams, a: AlphaState, mode: noise.FMode = "exact"
) -> Optional[float]:
    """Sudden-death time of the alpha family, or None at alpha in {0, 1}.

    Solves f(t) = -ln(alpha (1 - alpha)) / 2, the zero of Q_alpha(t).
    """
    product = a.alpha * (1.0 - a.alpha)
    if product <= 0.0:
        return None
    return _solve_f_equals(params, -0.5 * math.log(product), mode)


def esd_time_xstate(
    params: noise.NoiseParams, x: XState, mode: noise.FMode = "exact"
) -> Optional[float]:
    """Sudden-death time of a general X state under the dephasing map.

    Each branch of the concurrence max decays as |coh| exp(-2f) minus a
    constant, so the state disentangles when the last initially positive
    branch crosses zero.  Returns 0.0 for states already separable and
    None when some positive branch has a vanishing diagonal floor (the
    coherence then only decays asymptotically and C stays positive).
    """
    branches = (
        (abs(x.rho23), math.sqrt(max(x.rho11 * x.rho44, 0.0))),
        (abs(x.rho14), math.sqrt(max(x.rho22 * x.rho33, 0.0))),
    )
    times = []
    for coh, floor in branches:
        if coh <= floor:
            continue                      # never positive, never crosses
        if floor == 0.0:
            return None                   # positive for all finite times
        times.append(_solve_f_equals(params, 0.5 * math.log(coh / floor), mode))
    if not times:
        return 0.0
    return max(times)


def concurrence_bound(
    rho0: qmat.CMat4, params: noise.NoiseParams, t: float, *, check: bool = True
) -> float:
    """Decay envelope exp(-2 f(t)) * C(rho0) bounding the concurrence."""
    if t < 0.0:
        raise NegativeTime(f"t must be >= 0, got {t!r}")
    c0 = concurrence_general(rho0, check=check).concurrence
    return float(np.exp(-2.0 * noise.dephasing_exponent_f(params, t))) * c0


def random_x_state(rng: np.random.Generator, min_diag: float = 0.0) -> XState:
    """Random valid X state; diagonals are floored at ``min_diag``."""
    if not 0.0 <= min_diag < 0.25:
        raise ValueError(f"min_diag must lie in [0, 0.25), got {min_diag!r}")
    diag = min_diag + (1.0 - 4.0 * min_diag) * rng.dirichlet(np.ones(4))
    mag14 = rng.uniform() * math.sqrt(diag[0] * diag[3])
    mag23 = rng.uniform() * math.sqrt(diag[1] * diag[2])
    ph14, ph23 = rng.uniform(0.0, 2.0 * math.pi, size=2)
    return XState(
        rho11=diag[0], rho22=diag[1], rho33=diag[2], rho44=diag[3],
        rho14=mag14 * complex(math.cos(ph14), math.sin(ph14)),
        rho23=mag23 * complex(math.cos(ph23), math.sin(ph23)))
