"""Vandermonde sensing on the unit circle, test signals and measurements.

Support indices are 1-based throughout: index ``j`` in ``1..n`` is the
column whose root is ``a_j = exp(2*pi*i*j/n)``, so ``a_n = 1``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .numerics import (
    MP,
    STANDARD,
    PrecisionSpec,
    check_mode,
    complex_vector,
    dynamic_range,
    quantize,
    vector_from_json,
    vector_to_json,
)


@functools.lru_cache(maxsize=256)
def _root_table(n: int, mode: str) -> np.ndarray:
    """``omega**t`` for ``t = 0..n-1`` with ``omega = exp(2*pi*i/n)``.

    Computed per angle at 113 bits and rounded once, so values such as
    ``i`` and ``-1`` come out exact.
    """
    vals = [MP.mpc(MP.cospi(MP.mpf(2 * t) / n), MP.sinpi(MP.mpf(2 * t) / n)) for t in range(n)]
    if mode == STANDARD:
        table = np.array([complex(v) for v in vals])
    else:
        table = np.array(vals, dtype=object)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class VandermondeMatrix:
    """The ``m x n`` matrix with entry ``a_j**r`` at row ``r``, column ``j``."""

    n: int
    m: int
    mode: str = STANDARD

    def __post_init__(self):
        check_mode(self.mode)
        if self.n < 1 or self.m < 1:
            raise UsageError("n and m must be positive")
        if self.m > self.n:
            raise UsageError(f"m = {self.m} rows exceeds n = {self.n}")

    @property
    def roots(self) -> np.ndarray:
        """``(a_1, ..., a_n)``."""
        table = _root_table(self.n, self.mode)
        return table[np.arange(1, self.n + 1) % self.n]

    def block(self, rows, columns) -> np.ndarray:
        """Entries at row indices ``rows`` (0-based powers) and 1-based ``columns``."""
        r = np.asarray(rows, dtype=np.int64)[:, None]
        j = np.asarray(columns, dtype=np.int64)[None, :]
        if j.size and (j.min() < 1 or j.max() > self.n):
            raise UsageError(f"column indices must lie in 1..{self.n}")
        return _root_table(self.n, self.mode)[(r * j) % self.n]

    @functools.cached_property
    def matrix(self) -> np.ndarray:
        return self.block(range(self.m), range(1, self.n + 1))


def build_vandermonde(n: int, m: int, mode: str = STANDARD) -> VandermondeMatrix:
    return VandermondeMatrix(int(n), int(m), mode)


@dataclass(frozen=True)
class SparseSignal:
    """A real ``n``-vector stored by its support and nonzero values.

    ``ell``, when given, declares the dynamic range bound ``2**ell``.
    An empty support is the zero signal.
    """

    n: int
    support: tuple[int, ...]
    values: tuple[float, ...]
    ell: int | None = None

    def __post_init__(self):
        support = tuple(int(e) for e in self.support)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)
        if self.n < 1:
            raise UsageError("signal dimension must be positive")
        if len(support) != len(values):
            raise UsageError("support and values differ in length")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise UsageError("support must be strictly increasing")
        if support and (support[0] < 1 or support[-1] > self.n):
            raise UsageError(f"support indices must lie in 1..{self.n}")
        if any(v == 0 or not np.isfinite(v) for v in values):
            raise UsageError("signal values must be finite and nonzero")
        if self.ell is not None:
            if self.ell < 0:
                raise UsageError("ell must be nonnegative")
            if values and dynamic_range(values) > 2.0 ** self.ell:
                raise UsageError(f"dynamic range exceeds 2**{self.ell}")

    @property
    def sparsity(self) -> int:
        return len(self.support)

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.n)
        if self.support:
            x[np.array(self.support) - 1] = self.values
        return x

    def to_json(self) -> dict:
        return {"n": self.n, "support": list(self.support), "values": list(self.values),
                "ell": self.ell}

    @classmethod
    def from_json(cls, obj: dict) -> "SparseSignal":
        try:
            return cls(int(obj["n"]), obj["support"], obj["values"], obj.get("ell"))
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed signal JSON: {exc}") from exc


@dataclass(frozen=True)
class MeasurementVector:
    """Syndromes ``y_0..y_{m-1}``; ``bits`` records the quantization applied, if any."""

    syndromes: np.ndarray = field(repr=False)
    bits: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "syndromes", complex_vector(self.syndromes))
        if self.bits is not None:
            object.__setattr__(self, "bits", PrecisionSpec(self.bits).bits)

    @property
    def m(self) -> int:
        return self.syndromes.shape[0]

    def quantized(self, spec) -> "MeasurementVector":
        spec = spec if isinstance(spec, PrecisionSpec) else PrecisionSpec(spec)
        return MeasurementVector(quantize(self.syndromes, spec), spec.bits)

    def to_json(self) -> dict:
        return {"syndromes": vector_to_json(self.syndromes), "bits": self.bits}

    @classmethod
    def from_json(cls, obj: dict, mode: str = STANDARD) -> "MeasurementVector":
        if not isinstance(obj, dict) or "syndromes" not in obj:
            raise UsageError("measurement JSON needs a 'syndromes' array")
        return cls(vector_from_json(obj["syndromes"], mode), obj.get("bits"))


def measure(A: VandermondeMatrix, x: SparseSignal) -> MeasurementVector:
    """Exact syndromes ``y_r = sum_e x_e * a_e**r`` for ``r < A.m``."""
    if x.n != A.n:
        raise UsageError(f"signal dimension {x.n} != matrix columns {A.n}")
    if not x.support:
        zeros = np.zeros(A.m, dtype=complex)
        return MeasurementVector(zeros if A.mode == STANDARD else np.array(
            [MP.mpc(0)] * A.m, dtype=object))
    cols = A.block(range(A.m), x.support)
    if A.mode == STANDARD:
        vals = np.asarray(x.values, dtype=float)
    else:
        vals = np.array([MP.mpf(v) for v in x.values], dtype=object)
    return MeasurementVector(cols @ vals)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream; the same seed gives the same stream everywhere."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


RNG_NAME = "numpy.random.Philox (4x64, SeedSequence-keyed)"


def gen_sparse_signal(n: int, k: int, ell: int, rng_seed: int) -> SparseSignal:
    """Random exactly-``k``-sparse signal with dynamic range at most ``2**ell``.

    The smallest magnitude is 1. With probability 1/2 (and ``k >= 2``) the
    extremes 1 and ``2**ell`` are both present; otherwise log-magnitudes
    are uniform on ``[0, ell]`` and shifted so their minimum is 0.
    """
    if k < 1 or 2 * k > n:
        raise UsageError(f"need 1 <= k <= n/2, got n={n}, k={k}")
    if ell < 0:
        raise UsageError("ell must be nonnegative")
    rng = make_rng(rng_seed)
    support = np.sort(rng.choice(n, size=k, replace=False)) + 1
    logs = rng.uniform(0.0, ell, size=k)
    force_extremes = rng.random() < 0.5
    if force_extremes and k >= 2:
        slots = rng.choice(k, size=2, replace=False)
        logs[slots[0]], logs[slots[1]] = 0.0, float(ell)
    logs -= logs.min()
    mags = np.exp2(logs)
    signs = rng.choice([-1.0, 1.0], size=k)
    return SparseSignal(n, tuple(support.tolist()), tuple((signs * mags).tolist()), ell)

