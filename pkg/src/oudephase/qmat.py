"""Dense complex linear algebra for 2x2 and 4x4 matrices.

Matrices are plain numpy arrays of dtype complex128.  The two-qubit basis
ordering is fixed globally as |00>, |01>, |10>, |11> (first qubit slowest);
every module in the package indexes matrix elements against this ordering.
"""

import math

import numpy as np

from .errors import (
    InvalidState,
    NoConvergence,
    NotHermitian,
    NotPositive,
    TraceNotOne,
)

# Type aliases: 2x2 / 4x4 complex matrices are bare ndarrays.
CMat2 = np.ndarray
CMat4 = np.ndarray

EYE2 = np.eye(2, dtype=np.complex128)
EYE4 = np.eye(4, dtype=np.complex128)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGENVALUE_FLOOR = -1e-10

_EIGEN_PRE_ATOL = 1e-10   # allowed asymmetry of eigensolver input
_JACOBI_TOL = 1e-14       # off-diagonal norm threshold, relative to ||m||_F
_JACOBI_MAX_SWEEPS = 100


def kron(a: CMat2, b: CMat2) -> CMat4:
    """Kronecker product in the fixed basis ordering."""
    return np.kron(np.asarray(a, dtype=np.complex128),
                   np.asarray(b, dtype=np.complex128))


def hermitian_eigen(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a small Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    m : ndarray
        Square complex matrix, Hermitian within 1e-10 (it is symmetrized
        before iterating).  Intended for the 2x2 and 4x4 matrices used here.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Real eigenvalues in ascending order and the unitary matrix whose
        columns are the matching eigenvectors.

    Raises
    ------
    NotHermitian
        If ``max|m - m^dag|`` exceeds 1e-10.
    NoConvergence
        If the off-diagonal norm has not dropped below 1e-14 * ||m||_F
        after 100 sweeps.
    """
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    asym = float(np.max(np.abs(a - a.conj().T)))
    if not np.all(np.isfinite(a)):
        raise NotHermitian("matrix has non-finite entries")
    if asym > _EIGEN_PRE_ATOL:
        raise NotHermitian(f"asymmetry {asym:.3e} exceeds {_EIGEN_PRE_ATOL:.0e}")

    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = float(np.linalg.norm(a))
    if scale == 0.0:
        return np.zeros(n), v
    threshold = _JACOBI_TOL * scale

    converged = False
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = math.sqrt(2.0 * sum(abs(a[i, j]) ** 2
                                  for i in range(n) for j in range(i + 1, n)))
        if off <= threshold:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, v, p, q)
    else:
        off = math.sqrt(2.0 * sum(abs(a[i, j]) ** 2
                                  for i in range(n) for j in range(i + 1, n)))
        converged = off <= threshold
    if not converged:
        raise NoConvergence(
            f"off-diagonal norm {off:.3e} above {threshold:.3e} "
            f"after {_JACOBI_MAX_SWEEPS} sweeps")

    evals = np.real(np.diag(a)).copy()
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """One two-sided unitary rotation zeroing a[p, q] (in place)."""
    apq = a[p, q]
    am = abs(apq)
    if am == 0.0:
        return
    phase = apq / am                      # e^{i arg(a_pq)}
    app = a[p, p].real
    aqq = a[q, q].real
    tau = (aqq - app) / (2.0 * am)
    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
    c = 1.0 / math.hypot(1.0, t)
    s = t * c
    sp = s * phase                        # s e^{i beta}

    # a <- G^dag a G with G[p,p]=G[q,q]=c, G[p,q]=s e^{i beta},
    # G[q,p]=-s e^{-i beta}.
    colp = a[:, p].copy()
    colq = a[:, q].copy()
    a[:, p] = c * colp - sp.conjugate() * colq
    a[:, q] = sp * colp + c * colq
    rowp = a[p, :].copy()
    rowq = a[q, :].copy()
    a[p, :] = c * rowp - sp * rowq
    a[q, :] = sp.conjugate() * rowp + c * rowq
    a[p, p] = app - t * am
    a[q, q] = aqq + t * am
    a[p, q] = 0.0
    a[q, p] = 0.0

    colp = v[:, p].copy()
    colq = v[:, q].copy()
    v[:, p] = c * colp - sp.conjugate() * colq
    v[:, q] = sp * colp + c * colq


def matrix_sqrt_psd(m: CMat4) -> CMat4:
    """Hermitian square root of a positive semidefinite matrix.

    Eigenvalues in [-1e-10, 0) are clamped to zero before taking roots;
    anything more negative raises NotPositive.
    """
    evals, vecs = hermitian_eigen(m)
    if evals[0] < EIGENVALUE_FLOOR:
        raise NotPositive(f"min eigenvalue {evals[0]:.3e} below {EIGENVALUE_FLOOR:.0e}")
    roots = np.sqrt(np.where(evals < 0.0, 0.0, evals))
    s = (vecs * roots) @ vecs.conj().T
    return 0.5 * (s + s.conj().T)


def validate_density(m: np.ndarray) -> CMat4:
    """Check the density-matrix invariants and return the matrix.

    Raises InvalidState (non-finite entries), NotHermitian, TraceNotOne or
    NotPositive, each reporting the size of the violation.
    """
    a = np.asarray(m, dtype=np.complex128)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidState("matrix has non-finite entries")
    herm = float(np.max(np.abs(a - a.conj().T)))
    if herm > HERMITICITY_ATOL:
        raise NotHermitian(f"max|rho - rho^dag| = {herm:.3e} > {HERMITICITY_ATOL:.0e}")
    tr = complex(np.trace(a))
    trdev = abs(tr - 1.0)
    if trdev > TRACE_ATOL:
        raise TraceNotOne(f"|trace - 1| = {trdev:.3e} > {TRACE_ATOL:.0e}")
    evals, _ = hermitian_eigen(a)
    if evals[0] < EIGENVALUE_FLOOR:
        raise NotPositive(f"min eigenvalue {evals[0]:.3e} below {EIGENVALUE_FLOOR:.0e}")
    return a


def random_density(rng: np.random.Generator) -> CMat4:
    """Random full-rank two-qubit density matrix (Ginibre construction)."""
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = g @ g.conj().T
    return m / np.trace(m).real
