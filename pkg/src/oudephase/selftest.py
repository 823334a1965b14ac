"""Built-in invariant suites backing the ``selftest`` CLI command.

Each suite re-derives a cross-cutting property with fixed seeds so a
fresh build can be checked without the development test harness: engine
equivalence, the concurrence decay bound, non-revival, Kraus completeness
and the OU sampler statistics.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import entangle, evolve, noise, qmat


@dataclass(frozen=True)
class SuiteResult:
    name: str
    n_checks: int
    max_residual: float
    passed: bool
    note: str = ""


def _combos():
    return [
        (noise.NoiseParams(0.8, 0.4), 0.3),
        (noise.NoiseParams(0.8, 0.4), 1.2),
        (noise.NoiseParams(1.0, 1.0), 0.7),
        (noise.NoiseParams(1.0, 5.0), 0.5),
        (noise.NoiseParams(2.0, 0.2), 2.0),
        (noise.NoiseParams(0.5, 8.0), 1.5),
    ]


def suite_engine_equivalence(flip_master_sign: bool = False) -> SuiteResult:
    """Kraus vs analytic within 1e-14; RK4 master vs analytic within 1e-8."""
    rng = np.random.default_rng(7021)
    states = [entangle.random_x_state(rng).to_density() for _ in range(80)]
    states += [qmat.random_density(rng) for _ in range(20)]

    n_checks = 0
    worst = 0.0
    for params, t in _combos():
        ks = evolve.kraus_set(params, t)
        for rho in states:
            via_map = evolve.propagate_analytic(rho, params, t, check=False)
            via_kraus = evolve.propagate_kraus(rho, ks, check=False)
            worst = max(worst, float(np.max(np.abs(via_map - via_kraus))))
            n_checks += 1
    kraus_ok = worst <= 1e-14

    master_worst = 0.0
    for params, t in _combos()[:3]:
        dt = 1e-3 * min(1.0 / params.Gamma, 1.0 / params.gamma)
        for rho in states[:3]:
            via_map = evolve.propagate_analytic(rho, params, t, check=False)
            via_rk4 = evolve.integrate_master(
                rho, params, t, dt, check=False, _flip_sign=flip_master_sign)
            master_worst = max(master_worst, float(np.max(np.abs(via_map - via_rk4))))
            n_checks += 1
    master_ok = master_worst <= 1e-8

    return SuiteResult(
        name="engine_equivalence",
        n_checks=n_checks,
        max_residual=max(worst, master_worst),
        passed=kraus_ok and master_ok,
        note=f"kraus {worst:.2e}, master {master_worst:.2e}")


def suite_concurrence_bound() -> SuiteResult:
    """C(rho(t)) <= exp(-2f) C(rho(0)) + 1e-10 on random X states."""
    rng = np.random.default_rng(7022)
    params = noise.NoiseParams(1.0, 0.7)
    times = (0.2, 0.7, 1.5, 3.0)
    worst = -np.inf
    n_checks = 0
    for _ in range(400):
        x = entangle.random_x_state(rng)
        c0 = entangle.concurrence_xstate(x).concurrence
        for t in times:
            decay = math.exp(-2.0 * noise.dephasing_exponent_f(params, t))
            c_t = entangle.concurrence_xstate(
                entangle.evolve_xstate(x, params, t)).concurrence
            worst = max(worst, c_t - decay * c0)
            n_checks += 1
    return SuiteResult(
        name="concurrence_bound",
        n_checks=n_checks,
        max_residual=max(worst, 0.0),
        passed=worst <= 1e-10)


def suite_non_revival() -> SuiteResult:
    """Q nonincreasing in t; concurrence never returns from zero."""
    rng = np.random.default_rng(7023)
    params = noise.NoiseParams(1.0, 1.3)
    grid = np.linspace(0.0, 5.0, 81)
    worst_rise = -np.inf
    revivals = 0
    n_checks = 0
    for _ in range(100):
        x = entangle.random_x_state(rng)
        q = np.array([
            entangle.concurrence_xstate(entangle.evolve_xstate(x, params, t)).q_value
            for t in grid])
        worst_rise = max(worst_rise, float(np.max(np.diff(q))))
        c = np.maximum(q, 0.0)
        dead = np.flatnonzero(c == 0.0)
        if dead.size and np.any(c[dead[0]:] > 0.0):
            revivals += 1
        n_checks += grid.size
    return SuiteResult(
        name="non_revival",
        n_checks=n_checks,
        max_residual=max(worst_rise, 0.0),
        passed=worst_rise <= 1e-12 and revivals == 0,
        note=f"revivals {revivals}")


def suite_kraus_completeness() -> SuiteResult:
    """sum K^dag K = I within 1e-12 across a parameter grid."""
    worst = 0.0
    n_checks = 0
    for big in (0.5, 1.0, 2.0):
        for small in (0.05, 1.0, 20.0):
            params = noise.NoiseParams(big, small)
            for t in (0.0, 0.3, 1.0, 4.0, 20.0):
                worst = max(worst, evolve.kraus_set(params, t).completeness_residual())
                n_checks += 1
    return SuiteResult(
        name="kraus_completeness",
        n_checks=n_checks,
        max_residual=worst,
        passed=worst <= 1e-12)


def suite_ou_statistics() -> SuiteResult:
    """Sampler mean, stationary variance and kernel decay within 5 SE."""
    params = noise.NoiseParams(1.0, 2.0)
    dt = 0.02
    n_paths, n_steps = 400, 250
    seeds = [noise.path_seed(9090, i) for i in range(n_paths)]
    omega, _ = noise.sample_path_batch(params, dt, n_steps, seeds)
    paths = [noise.OUTrajectory(dt=dt, omega=row, phase=np.zeros_like(row))
             for row in omega]

    per_path_mean = omega.mean(axis=1)
    mean = per_path_mean.mean()
    mean_se = per_path_mean.std(ddof=1) / math.sqrt(n_paths)
    z_mean = abs(mean) / mean_se

    var_est, var_se = noise.estimate_autocovariance(paths, 0)
    z_var = abs(var_est - 0.5 * params.Gamma * params.gamma) / var_se

    lag = 25                                   # tau = 0.5
    cov_est, cov_se = noise.estimate_autocovariance(paths, lag)
    z_cov = abs(cov_est - noise.correlation(params, lag * dt)) / cov_se

    worst = max(z_mean, z_var, z_cov)
    return SuiteResult(
        name="ou_statistics",
        n_checks=3,
        max_residual=worst,
        passed=worst <= 5.0,
        note=f"|z| mean {z_mean:.2f}, var {z_var:.2f}, cov {z_cov:.2f}")


def run_suites(flip_master_sign: bool = False) -> list[SuiteResult]:
    return [
        suite_engine_equivalence(flip_master_sign=flip_master_sign),
        suite_concurrence_bound(),
        suite_non_revival(),
        suite_kraus_completeness(),
        suite_ou_statistics(),
    ]


def format_report(results: list[SuiteResult]) -> str:
    lines = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        note = f"  ({res.note})" if res.note else ""
        lines.append(
            f"suite {res.name:<22} {res.n_checks:5d} checks,"
            f" max residual {res.max_residual:.3e}  [{status}]{note}")
    n_pass = sum(res.passed for res in results)
    verdict = "PASS" if n_pass == len(results) else "FAIL"
    lines.append(f"selftest: {verdict} ({n_pass}/{len(results)} suites)")
    return "\n".join(lines)
