"""Exhaustive minimum-support reconstruction for tiny instances.

Every support of size ``<= k`` is fitted by real least squares against
all syndromes. The answer is the sparsest support whose fit is within
``tolerance`` (the noisy form of ``min ||x||_0 s.t. Ax = y``); ties at
that size go to the smaller residual, then lexicographic order. Shares no
code with the algebraic decoder beyond the matrix itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .decoder import acceptance_tolerance
from .errors import UsageError
from .sensing import MeasurementVector, SparseSignal, VandermondeMatrix

MAX_N = 16
MAX_K = 3


@dataclass(frozen=True)
class OracleResult:
    signal: SparseSignal
    residual: float
    unique: bool


def _fit(A, y, E):
    cols = A[:, [e - 1 for e in E]]
    M = np.vstack([cols.real, cols.imag])
    rhs = np.concatenate([y.real, y.imag])
    x, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    r = cols @ x - y
    return x, float(np.abs(r).max())


def l0_decode(A: VandermondeMatrix, y_hat, k: int, tolerance: float | None = None) -> OracleResult:
    """Sparsest support of size ``<= k`` that reproduces ``y_hat`` within ``tolerance``.

    ``tolerance`` defaults to the decoder's acceptance tolerance for the
    measurement's recorded bits. ``unique`` is false when another support
    of the chosen size fits within twice the winning residual.
    """
    if A.n > MAX_N or k > MAX_K:
        raise UsageError(f"oracle limited to n <= {MAX_N}, k <= {MAX_K}")
    if 2 * k > A.n or k < 0:
        raise UsageError(f"need 0 <= k <= n/2, got n={A.n}, k={k}")
    bits = y_hat.bits if isinstance(y_hat, MeasurementVector) else None
    y = np.asarray(y_hat.syndromes if isinstance(y_hat, MeasurementVector) else y_hat,
                   dtype=complex)
    if y.shape[0] != A.m:
        raise UsageError(f"expected {A.m} syndromes, got {y.shape[0]}")
    if tolerance is None:
        tolerance = acceptance_tolerance(bits)
    scale = float(np.abs(y).max())
    if scale == 0:
        return OracleResult(SparseSignal(A.n, (), ()), 0.0, True)
    mat = np.asarray(A.matrix, dtype=complex)

    best_overall = None
    for size in range(1, k + 1):
        fits = []
        for E in itertools.combinations(range(1, A.n + 1), size):
            x, res = _fit(mat, y, E)
            fits.append((res / scale, E, x))
        fits.sort(key=lambda f: (f[0], f[1]))
        top = fits[0]
        if best_overall is None or top[0] < best_overall[0][0]:
            best_overall = (top, fits)
        if top[0] <= tolerance:
            return _result(A.n, top, fits, tolerance)
    top, fits = best_overall
    return _result(A.n, top, fits, tolerance)


def _result(n, top, fits, tolerance):
    res, E, x = top
    cutoff = 2 * max(res, tolerance)
    rivals = sum(1 for f in fits[1:] if f[0] <= cutoff)
    values = [float(v) for v in x]
    if any(v == 0 for v in values):
        # A zero coefficient means a smaller support explains the data.
        keep = [(e, v) for e, v in zip(E, values) if v != 0]
        E, values = tuple(e for e, _ in keep), [v for _, v in keep]
    return OracleResult(SparseSignal(n, E, values), res, rivals == 0)
