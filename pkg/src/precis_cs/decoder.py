"""Syndrome decoding over the complex field.

The pipeline mirrors Reed-Solomon syndrome decoding:

1. solve the Hankel system built from ``y_0..y_{2k-1}`` for the error
   locator ``h(x) = 1 + h_1 x + ... + h_k x**k``;
2. take the ``k`` roots of unity ``a_j`` whose inverses make ``|h|``
   smallest as the support;
3. solve the ``k x k`` Vandermonde system on that support for the values.

``decode_unknown_support`` repeats this for each candidate support size
and keeps the sparsest candidate that re-synthesizes the syndromes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateLocatorError,
    InconsistencyError,
    ReconstructionError,
    SingularMatrixError,
    UsageError,
)
from .linalg import condition_report, inverse, norm_inf, null_vector, solve_square
from .numerics import (
    MP,
    SIGNIFICAND_BITS,
    PrecisionSpec,
    imag_part,
    inf_norm,
    mode_of,
    real_part,
    relative_inf_error,
)
from .sensing import MeasurementVector, SparseSignal, VandermondeMatrix, _root_table

DEFAULT_KAPPA_THRESHOLD = 1e12
DEGENERATE_RTOL = 1e-12
IMAG_RTOL = 1e-6
#: Roundoff allowance in the acceptance test, in units of the unit roundoff.
ROUNDOFF_SLACK = 2.0 ** 20


@dataclass(frozen=True)
class LocatorPolynomial:
    """Coefficients ``h_0..h_k`` of ``h(x)``, lowest degree first, ``h_0 = 1``."""

    coeffs: np.ndarray = field(repr=False)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            acc = acc * x + c
        return acc

    def to_json(self) -> list[dict]:
        return [{"re": float(c.real), "im": float(c.imag)} for c in self.coeffs]


@dataclass(frozen=True)
class DecodeResult:
    signal: SparseSignal
    locator: LocatorPolynomial | None
    hankel_kappa2: float | None
    hankel_kappa_inf: float | None
    value_solve_kappa2: float | None
    residual: float
    separation: float | None = None
    attempts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "signal": self.signal.to_json(),
            "locator": None if self.locator is None else self.locator.to_json(),
            "hankel_kappa2": _finite_or_none(self.hankel_kappa2),
            "hankel_kappa_inf": _finite_or_none(self.hankel_kappa_inf),
            "value_solve_kappa2": _finite_or_none(self.value_solve_kappa2),
            "residual": self.residual,
            "separation": _finite_or_none(self.separation),
            "attempts": {str(t): r for t, r in sorted(self.attempts.items())},
        }


def _finite_or_none(v):
    return None if v is None or not np.isfinite(v) else float(v)


def _syndromes(y) -> np.ndarray:
    if isinstance(y, MeasurementVector):
        return y.syndromes
    return MeasurementVector(y).syndromes


def build_hankel(syndromes, k: int):
    """Return ``(B, r)`` with ``B[i, j] = y[i + j]`` and ``r[i] = -y[i + k]``.

    ``B`` multiplies ``(h_k, ..., h_1)``; fixing ``h_0 = 1`` moves the last
    column of the homogeneous Toeplitz system to the right-hand side.
    """
    y = _syndromes(syndromes)
    if k < 1:
        raise UsageError("k must be at least 1")
    if y.shape[0] < 2 * k:
        raise UsageError(f"need at least {2 * k} syndromes, got {y.shape[0]}")
    idx = np.arange(k)
    B = y[idx[:, None] + idx[None, :]]
    r = -y[idx + k]
    return B, r


def _locator_with_report(y, k, kappa_threshold):
    y = y[: 2 * k]
    if inf_norm(y) == 0:
        raise DegenerateLocatorError("all-zero syndromes: the signal has empty support")
    B, r = build_hankel(y, k)
    try:
        report = condition_report(B)
    except SingularMatrixError:
        report = None
    if report is not None and report.kappa2 <= kappa_threshold:
        tail = solve_square(B, r)
        h = np.concatenate([[tail[0] * 0 + 1], tail[::-1]])
        return LocatorPolynomial(h), report
    # Null vector of the full k x (k+1) system, ordered (h_k, ..., h_0).
    M = np.concatenate([B, -r[:, None]], axis=1)
    h = null_vector(M)[::-1]
    h0 = h[0]
    if abs(h0) <= DEGENERATE_RTOL * inf_norm(h):
        raise DegenerateLocatorError(
            f"|h_0| = {float(abs(h0)):.3e} is negligible: support smaller than {k}"
        )
    return LocatorPolynomial(h / h0), report


def solve_locator(syndromes, k: int, kappa_threshold: float = DEFAULT_KAPPA_THRESHOLD):
    """Error-locator coefficients from the first ``2k`` syndromes.

    Falls back to the smallest right singular vector of the full Toeplitz
    system when the Hankel matrix is singular or its ``kappa2`` exceeds
    ``kappa_threshold``.

    Raises
    ------
    DegenerateLocatorError
        If ``h_0`` cannot be normalized to 1, i.e. fewer than ``k`` errors.
    """
    h, _ = _locator_with_report(_syndromes(syndromes), k, kappa_threshold)
    return h


def find_support(h: LocatorPolynomial, n: int, k: int):
    """The ``k`` indices ``j`` minimizing ``|h(1/a_j)|``, plus a separation ratio.

    Ties go to the smaller index. The ratio of the ``(k+1)``-st to the
    ``k``-th smallest magnitude says how clearly the roots stand out
    (``inf`` when the ``k``-th is exactly zero).
    """
    if not 1 <= k <= n:
        raise UsageError(f"need 1 <= k <= n, got k={k}, n={n}")
    coeffs = h.coeffs
    table = _root_table(n, mode_of(coeffs))
    j = np.arange(1, n + 1)
    powers = np.arange(len(coeffs))
    # conj(a_j)**i = omega**(-j*i mod n)
    evals = table[(-np.outer(j, powers)) % n] @ coeffs
    mags = np.abs(evals).astype(float)
    order = np.argsort(mags, kind="stable")
    support = tuple(sorted((order[:k] + 1).tolist()))
    if k < n:
        kth, nxt = mags[order[k - 1]], mags[order[k]]
        separation = float("inf") if kth == 0 else nxt / kth
    else:
        separation = float("inf")
    return support, separation


def _noise_level(y, bits) -> float:
    """Absolute bound on the per-syndrome quantization error (0 when exact)."""
    return 0.0 if bits is None else float(inf_norm(y)) * 2.0 ** -bits


def _value_solve(y, E, n, noise=0.0):
    t = len(E)
    if y.shape[0] < t:
        raise UsageError(f"need at least {t} syndromes, got {y.shape[0]}")
    V = VandermondeMatrix(n, max(t, 1), mode_of(y)).block(range(t), E)
    z = solve_square(V, y[:t])
    re, im = real_part(z), imag_part(z)
    im_tol = IMAG_RTOL * float(inf_norm(z))
    if noise:
        # |Im z| <= ||V^-1||_inf * noise for the true support
        im_tol = max(im_tol, 2 * float(norm_inf(inverse(V))) * noise)
    im_max = float(np.abs(im).max())
    if im_max > im_tol:
        raise InconsistencyError(f"recovered values have imaginary residue {im_max:.3e}")
    if any(v == 0 for v in re):
        raise InconsistencyError("a recovered value on the support is exactly zero")
    return re, V


def solve_values(syndromes, E, n: int, bits=None) -> np.ndarray:
    """Real values on the 1-based support ``E`` from the first ``|E|`` syndromes.

    Imaginary parts are dropped after checking they are at roundoff level,
    or, for syndromes quantized to ``bits``, at the level the quantization
    noise can produce.
    """
    E = tuple(int(e) for e in E)
    y = _syndromes(syndromes)
    if bits is None and isinstance(syndromes, MeasurementVector):
        bits = syndromes.bits
    re, _ = _value_solve(y, E, n, _noise_level(y, bits))
    return re


def _resynthesize(y, E, values, n):
    A = VandermondeMatrix(n, y.shape[0], mode_of(y)).block(range(y.shape[0]), E)
    return A @ values


def consistency_residual(syndromes, E, n: int) -> float:
    """Relative inf-norm residual of the best real fit of all syndromes on columns ``E``.

    Depends on the support only. For the true support of a signal whose
    syndromes were quantized to ``b`` bits it is at most ``sqrt(m/2) * 2**-b``.
    """
    y = _syndromes(syndromes)
    E = tuple(int(e) for e in E)
    if not E:
        return 1.0
    m = y.shape[0]
    A = VandermondeMatrix(n, m, mode_of(y)).block(range(m), E)
    M = np.concatenate([real_part(A), imag_part(A)])
    rhs = np.concatenate([real_part(y), imag_part(y)])
    if mode_of(y) == "standard":
        x = np.linalg.lstsq(M.astype(float), rhs.astype(float), rcond=None)[0]
    else:
        sol, _ = MP.qr_solve(MP.matrix(M.tolist()), MP.matrix(rhs.tolist()))
        x = np.array([sol[i] for i in range(len(E))], dtype=object)
    return float(relative_inf_error(_resynthesize(y, E, x, n), y))


def _attempt(y, n, t, kappa_threshold, noise=0.0):
    """Decode assuming exactly ``t`` errors, from the first ``2t`` syndromes."""
    h, report = _locator_with_report(y, t, kappa_threshold)
    E, sep = find_support(h, n, t)
    values, V = _value_solve(y, E, n, noise)
    residual = float(relative_inf_error(_resynthesize(y, E, values, n), y))
    return dict(h=h, report=report, E=E, sep=sep, values=values, V=V, residual=residual)


def _result(cand, n, attempts) -> DecodeResult:
    report = cand["report"]
    try:
        vrep = condition_report(cand["V"])
        v_kappa = vrep.kappa2
    except SingularMatrixError:
        v_kappa = float("inf")
    signal = SparseSignal(n, cand["E"], [float(v) for v in cand["values"]])
    return DecodeResult(
        signal=signal,
        locator=cand["h"],
        hankel_kappa2=float("inf") if report is None else report.kappa2,
        hankel_kappa_inf=float("inf") if report is None else report.kappa_inf,
        value_solve_kappa2=v_kappa,
        residual=cand["residual"],
        separation=cand["sep"],
        attempts=attempts,
    )


def _bits_arg(y_hat, bits):
    if bits is None and isinstance(y_hat, MeasurementVector):
        bits = y_hat.bits
    if isinstance(bits, PrecisionSpec):
        bits = bits.bits
    return bits


def _check_shape(y, n, k):
    if y.shape[0] != 2 * k:
        raise UsageError(f"expected {2 * k} syndromes, got {y.shape[0]}")
    if 2 * k > n:
        raise UsageError(f"need k <= n/2, got n={n}, k={k}")


def decode(
    y_hat,
    n: int,
    k: int,
    bits=None,
    *,
    kappa_threshold: float = DEFAULT_KAPPA_THRESHOLD,
) -> DecodeResult:
    """Reconstruct an exactly-``k``-sparse signal from ``2k`` syndromes.

    ``bits`` (defaulting to ``y_hat.bits``) only widens the imaginary-part
    check in the value solve to the quantization noise level.

    Raises
    ------
    DegenerateLocatorError
        When the support is smaller than ``k``; use
        :func:`decode_unknown_support` instead.
    """
    y = _syndromes(y_hat)
    _check_shape(y, n, k)
    bits = _bits_arg(y_hat, bits)
    cand = _attempt(y, n, k, kappa_threshold, _noise_level(y, bits))
    return _result(cand, n, {k: cand["residual"]})


def acceptance_tolerance(bits, mode: str = "standard") -> float:
    """Consistency tolerance ``2**(2 - bits)`` plus a roundoff floor.

    ``bits=None`` means unquantized syndromes: only the floor applies.
    """
    floor = ROUNDOFF_SLACK * 2.0 ** -SIGNIFICAND_BITS[mode]
    if bits is None:
        return floor
    return 2.0 ** (2 - bits) + floor


def decode_unknown_support(
    y_hat,
    n: int,
    k: int,
    bits=None,
    *,
    tolerance: float | None = None,
    kappa_threshold: float = DEFAULT_KAPPA_THRESHOLD,
) -> DecodeResult:
    """Decode a signal with at most ``k`` nonzeros.

    Support sizes ``t = 0, 1, ..., k`` are tried sparsest first, each
    decoded from only the first ``2t`` syndromes. A candidate is accepted
    when its support can reproduce all ``2k`` syndromes, i.e. its
    :func:`consistency_residual` is within ``tolerance``. ``bits`` (int or
    :class:`PrecisionSpec`, defaulting to ``y_hat.bits``) sets the default
    tolerance and the value-solve noise level.

    Raises
    ------
    ReconstructionError
        No support size is consistent; carries the per-size residuals.
    """
    y = _syndromes(y_hat)
    _check_shape(y, n, k)
    bits = _bits_arg(y_hat, bits)
    tau = acceptance_tolerance(bits, mode_of(y)) if tolerance is None else tolerance
    noise = _noise_level(y, bits)

    attempts: dict[int, float | None] = {}
    if inf_norm(y) == 0:
        attempts[0] = 0.0
        return DecodeResult(SparseSignal(n, (), ()), None, None, None, None, 0.0,
                            attempts=attempts)
    attempts[0] = 1.0
    for t in range(1, k + 1):
        try:
            cand = _attempt(y, n, t, kappa_threshold, noise)
        except (DegenerateLocatorError, SingularMatrixError, InconsistencyError):
            attempts[t] = None
            continue
        fit = consistency_residual(y, cand["E"], n)
        attempts[t] = fit
        if fit <= tau:
            return _result(cand, n, attempts)
    raise ReconstructionError(attempts)
