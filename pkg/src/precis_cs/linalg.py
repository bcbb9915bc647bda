"""Small dense complex linear algebra.

Everything here is written against plain numpy arrays so the same code
serves both ``complex128`` matrices and object arrays of 113-bit mpmath
numbers. Sizes are tiny (at most ``2k x 2k`` with ``k <= 8``), so the
algorithms favour exactness of definition over speed: condition numbers
come from full singular value decompositions and explicit inverses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError, UsageError
from .numerics import complex_vector, is_extended, mode_of, sqrt, to_mode, unit_roundoff

_MAX_SWEEPS = 80


def as_matrix(A, mode: str | None = None) -> np.ndarray:
    """Validate a 2-d matrix with finite entries."""
    if mode is None:
        mode = mode_of(A)
    M = to_mode(A, mode)
    if M.ndim != 2 or M.shape[0] == 0 or M.shape[1] == 0:
        raise UsageError("a dense matrix must be two-dimensional and nonempty")
    if mode == "standard" and not np.all(np.isfinite(M)):
        raise UsageError("matrix entries must be finite")
    return M


def norm_inf(A) -> float:
    """Operator infinity-norm: the largest absolute row sum."""
    return np.abs(A).sum(axis=1).max()


def lu_factor(A):
    """Partial-pivoting LU of a square matrix.

    Returns ``(LU, perm)`` with unit-lower ``L`` and ``U`` packed into one
    array and ``perm`` the row order. Raises :class:`SingularMatrixError`
    when a pivot falls to ``dim * u * ||A||_inf`` or below.
    """
    A = as_matrix(A)
    n, cols = A.shape
    if n != cols:
        raise UsageError(f"matrix must be square, got {A.shape}")
    threshold = n * unit_roundoff(A) * norm_inf(A)
    LU = A.copy()
    perm = np.arange(n)
    for j in range(n):
        mags = np.abs(LU[j:, j])
        p = j + int(np.argmax(mags))
        pivot = mags[p - j]
        if pivot <= threshold:
            raise SingularMatrixError(pivot, threshold)
        if p != j:
            LU[[j, p]] = LU[[p, j]]
            perm[[j, p]] = perm[[p, j]]
        LU[j + 1:, j] = LU[j + 1:, j] / LU[j, j]
        LU[j + 1:, j + 1:] -= np.outer(LU[j + 1:, j], LU[j, j + 1:])
    return LU, perm


def lu_solve(LU, perm, b) -> np.ndarray:
    n = LU.shape[0]
    x = b[perm].copy()
    for i in range(1, n):
        x[i] = x[i] - (LU[i, :i] * x[:i]).sum()
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - (LU[i, i + 1:] * x[i + 1:]).sum()) / LU[i, i]
    return x


def solve_square(A, b) -> np.ndarray:
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    Parameters
    ----------
    A : (n, n) array
    b : (n,) array

    Raises
    ------
    SingularMatrixError
        Carries the failing pivot magnitude and the threshold it missed.
    """
    A = as_matrix(A)
    b = complex_vector(b, mode_of(A))
    if b.shape[0] != A.shape[0]:
        raise UsageError(f"right-hand side length {b.shape[0]} != {A.shape[0]} rows")
    LU, perm = lu_factor(A)
    return lu_solve(LU, perm, b)


def inverse(A) -> np.ndarray:
    LU, perm = lu_factor(A)
    n = LU.shape[0]
    eye = to_mode(np.eye(n), mode_of(A))
    return np.stack([lu_solve(LU, perm, eye[:, j]) for j in range(n)], axis=1)


def jacobi_svd(A):
    """One-sided (Hestenes) Jacobi SVD.

    Returns ``(sigma, V)`` with singular values in descending order and the
    matching right singular vectors as columns of the unitary ``V``. Wide
    inputs are padded with zero rows, which leaves ``sigma`` and ``V``
    unchanged apart from the extra zero singular values.
    """
    A = as_matrix(A)
    rows, cols = A.shape
    mode = mode_of(A)
    if rows < cols:
        pad = to_mode(np.zeros((cols - rows, cols)), mode)
        A = np.vstack([A, pad])
    W = A.copy()
    V = to_mode(np.eye(cols), mode)
    tol = unit_roundoff(A) * max(rows, cols)
    for _ in range(_MAX_SWEEPS):
        rotated = False
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                wp, wq = W[:, p], W[:, q]
                alpha = (np.conj(wp) * wp).sum().real
                beta = (np.conj(wq) * wq).sum().real
                gamma = (np.conj(wp) * wq).sum()
                g = abs(gamma)
                if g == 0 or g <= tol * sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2 * g)
                az = abs(zeta)
                t = 0.5 / az if az > 1e100 else 1 / (az + sqrt(1 + zeta * zeta))
                if zeta < 0:
                    t = -t
                c = 1 / sqrt(1 + t * t)
                s = c * t
                wq = wq * np.conj(phase)
                W[:, p], W[:, q] = c * wp - s * wq, s * wp + c * wq
                vp, vq = V[:, p], V[:, q] * np.conj(phase)
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
        if not rotated:
            break
    norms = np.array([sqrt((np.conj(W[:, j]) * W[:, j]).sum().real) for j in range(cols)],
                     dtype=object if mode == "extended" else float)
    order = sorted(range(cols), key=lambda j: -norms[j])
    return norms[order], V[:, order]


def singular_values(A) -> np.ndarray:
    """Singular values in descending order; ``min(rows, cols)`` of them.

    ``complex128`` input goes to LAPACK; extended-precision input uses
    :func:`jacobi_svd`.
    """
    A = as_matrix(A)
    if not is_extended(A):
        return np.linalg.svd(A, compute_uv=False)
    sigma, _ = jacobi_svd(A)
    return sigma[: min(A.shape)]


def null_vector(A) -> np.ndarray:
    """Right singular vector for the smallest singular value (unit 2-norm)."""
    A = as_matrix(A)
    if not is_extended(A):
        rows, cols = A.shape
        if rows < cols:
            A = np.vstack([A, np.zeros((cols - rows, cols), dtype=complex)])
        _, _, vh = np.linalg.svd(A)
        return vh[-1].conj()
    _, V = jacobi_svd(A)
    return V[:, -1].copy()


@dataclass(frozen=True)
class ConditionReport:
    kappa2: float
    kappa_inf: float
    sigma_min: float
    sigma_max: float

    def to_dict(self) -> dict:
        return {
            "kappa2": self.kappa2,
            "kappa_inf": self.kappa_inf,
            "sigma_min": self.sigma_min,
            "sigma_max": self.sigma_max,
        }


def condition_report(A) -> ConditionReport:
    """Spectral and infinity-norm condition numbers of a nonsingular square matrix.

    ``kappa_inf`` uses the explicit inverse, not an estimate.
    """
    A = as_matrix(A)
    Ainv = inverse(A)
    sigma = singular_values(A)
    smax, smin = float(sigma[0]), float(sigma[-1])
    kappa2 = smax / smin if smin > 0 else float("inf")
    return ConditionReport(
        kappa2=kappa2,
        kappa_inf=float(norm_inf(A)) * float(norm_inf(Ainv)),
        sigma_min=smin,
        sigma_max=smax,
    )
