"""Complex vectors, the fixed-point quantizer and the precision metrics.

Vectors are plain numpy arrays. In ``"standard"`` mode they hold
``complex128``; in ``"extended"`` mode they are object arrays of
``mpmath`` numbers bound to a private 113-bit context, so the same
array code runs at either precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainError, UsageError

STANDARD = "standard"
EXTENDED = "extended"
PRECISION_MODES = (STANDARD, EXTENDED)

#: Significand bits of each arithmetic mode.
SIGNIFICAND_BITS = {STANDARD: 53, EXTENDED: 113}

#: Private mpmath context; numbers created from it keep its precision.
MP = mpmath.MPContext()
MP.prec = SIGNIFICAND_BITS[EXTENDED]


@dataclass(frozen=True)
class PrecisionSpec:
    """A count of accurate bits."""

    bits: int

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 0:
            raise UsageError(f"bits must be a nonnegative integer, got {self.bits!r}")
        object.__setattr__(self, "bits", int(self.bits))

    @property
    def threshold(self) -> float:
        return 2.0 ** -self.bits


def _bits_of(spec) -> int:
    return spec.bits if isinstance(spec, PrecisionSpec) else PrecisionSpec(spec).bits


def check_mode(mode: str) -> str:
    if mode not in PRECISION_MODES:
        raise UsageError(f"precision mode must be one of {PRECISION_MODES}, got {mode!r}")
    return mode


def is_extended(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def mode_of(a) -> str:
    return EXTENDED if is_extended(a) else STANDARD


def unit_roundoff(a) -> float:
    return 2.0 ** -SIGNIFICAND_BITS[mode_of(a)]


def to_mode(values, mode: str = STANDARD) -> np.ndarray:
    """Convert an array-like of numbers to the array type of ``mode``."""
    check_mode(mode)
    if mode == STANDARD:
        if is_extended(values):
            return np.array([complex(v) for v in np.ravel(values)]).reshape(values.shape)
        return np.asarray(values, dtype=complex)
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = MP.mpc(v)
    return out


def real_part(a) -> np.ndarray:
    if is_extended(a):
        return np.array([MP.mpf(v.real) for v in a.ravel()], dtype=object).reshape(a.shape)
    return np.asarray(a).real


def imag_part(a) -> np.ndarray:
    if is_extended(a):
        return np.array([MP.mpf(v.imag) for v in a.ravel()], dtype=object).reshape(a.shape)
    return np.asarray(a).imag


def sqrt(x):
    """Square root of a nonnegative real scalar of either mode."""
    if isinstance(x, (float, int, np.floating)):
        return math.sqrt(x)
    return MP.sqrt(x)


def complex_vector(values, mode: str | None = None) -> np.ndarray:
    """Validate and return a 1-d complex vector.

    Raises
    ------
    UsageError
        If the vector is empty, not one-dimensional, or has a
        non-finite entry.
    """
    if mode is None:
        mode = mode_of(values)
    v = to_mode(values, mode)
    if v.ndim != 1 or v.size == 0:
        raise UsageError("a complex vector must be one-dimensional with length >= 1")
    if mode == STANDARD:
        finite = bool(np.all(np.isfinite(v)))
    else:
        finite = all(MP.isfinite(z.real) and MP.isfinite(z.imag) for z in v)
    if not finite:
        raise UsageError("complex vector entries must be finite")
    return v


def inf_norm(v) -> float:
    """Largest complex modulus over the entries (0 for an all-zero vector)."""
    mags = np.abs(v)
    return mags.max() if mags.size else 0.0


def relative_inf_error(approx, exact):
    """``||approx - exact||_inf / ||exact||_inf`` with the complex modulus per entry."""
    approx = np.asarray(approx)
    exact = np.asarray(exact)
    if approx.shape != exact.shape:
        raise UsageError(f"length mismatch: {approx.shape} vs {exact.shape}")
    denom = inf_norm(exact)
    if denom == 0:
        raise DomainError("relative error is undefined for an all-zero exact vector")
    return inf_norm(approx - exact) / denom


def meets_precision(approx, exact, spec) -> bool:
    """True iff ``approx`` carries ``spec`` accurate bits relative to ``exact`` (strict)."""
    return bool(relative_inf_error(approx, exact) < 2.0 ** -_bits_of(spec))


def _round_half_away(t):
    return np.sign(t) * np.floor(np.abs(t) + 0.5)


def quantize(v, spec) -> np.ndarray:
    """Round real and imaginary parts to the grid ``2**-bits * ||v||_inf``.

    Ties round away from zero. The per-part error is at most half a grid
    step, so the output always approximates ``v`` within ``bits`` bits.
    When the grid is finer than the working arithmetic can resolve
    (``bits > significand - 4``) the grid cannot be represented and ``v``
    is returned unchanged, which trivially meets the same guarantee.
    """
    b = _bits_of(spec)
    v = complex_vector(v)
    norm = inf_norm(v)
    if norm == 0:
        raise DomainError("cannot quantize the zero vector: grid step undefined")
    mode = mode_of(v)
    if b > SIGNIFICAND_BITS[mode] - 4:
        return v.copy()
    if mode == STANDARD:
        q = math.ldexp(float(norm), -b)
        re = _round_half_away(v.real / q) * q
        im = _round_half_away(v.imag / q) * q
        return re + 1j * im
    q = MP.ldexp(norm, -b)
    out = np.empty(v.shape, dtype=object)
    for i, z in enumerate(v):
        re = MP.sign(z.real) * MP.floor(abs(z.real) / q + MP.mpf(0.5)) * q
        im = MP.sign(z.imag) * MP.floor(abs(z.imag) / q + MP.mpf(0.5)) * q
        out[i] = MP.mpc(re, im)
    return out


def dynamic_range(x) -> float:
    """Ratio of the largest to the smallest nonzero magnitude of ``x``."""
    mags = np.abs(np.asarray(x))
    nz = mags[mags != 0]
    if nz.size == 0:
        raise DomainError("dynamic range is undefined for an all-zero vector")
    return nz.max() / nz.min()


def vector_to_json(v) -> list[dict]:
    return [{"re": float(z.real), "im": float(z.imag)} for z in np.ravel(v)]


def vector_from_json(items, mode: str = STANDARD) -> np.ndarray:
    try:
        values = [complex(float(d["re"]), float(d["im"])) for d in items]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed complex vector JSON: {exc}") from exc
    return complex_vector(values, mode)
