"""Closed-form precision and conditioning budgets.

Every calculator returns a :class:`BoundReport` (or a plain number for the
one-line formulas). Factorials and binomials go through ``lgamma`` or
exact integers so nothing overflows.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import AmbiguityError, DomainError, InconsistencyError, UsageError

#: Default stability constant of the RIP-based l1 recovery guarantee.
DEFAULT_RIP_C = 10.0


@dataclass(frozen=True)
class BoundReport:
    name: str
    inputs: dict
    value: float
    bits: int | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0:
            raise DomainError(f"bound {self.name} evaluated to {self.value!r}")
        if self.bits is not None and self.bits < 0:
            raise DomainError(f"bound {self.name} has negative bit count {self.bits}")

    def to_json(self) -> dict:
        out = {"name": self.name, "inputs": dict(self.inputs), "value": self.value,
               "bits": self.bits}
        out.update(self.extras)
        return out


@dataclass(frozen=True)
class RipParams:
    m: int
    k: int
    ell: float
    C: float = DEFAULT_RIP_C

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise UsageError("m and k must be positive")
        if self.ell < 0:
            raise UsageError("ell must be nonnegative")
        if self.C < 1:
            raise UsageError("the stability constant C must be at least 1")


def _check_nk(n, k, allow_zero=True):
    if n < 1 or k < (0 if allow_zero else 1) or 2 * k > n:
        raise UsageError(f"need 0 <= k <= n/2, got n={n}, k={k}")


def locator_min_magnitude_paper(n: int, k: int) -> float:
    """``k! * (2*pi/n)**k``, the first-order chord estimate.

    Not a true lower bound: it replaces each chord ``2 sin(pi d/n)`` by the
    longer arc ``2 pi d / n``.
    """
    _check_nk(n, k)
    return math.exp(math.lgamma(k + 1) + k * math.log(2 * math.pi / n))


def locator_min_magnitude_rigorous(n: int, k: int) -> float:
    """Provable lower bound ``(4/n)**k * ceil(k/2)! * floor(k/2)!``.

    For a root of unity ``w`` off the zero set, ``|L(w)|`` is a product of
    ``k`` chords ``2 sin(pi d/n) >= 4d/n`` at distinct positions, and at
    most two positions share a folded distance ``d``.
    """
    _check_nk(n, k)
    half_up, half_down = (k + 1) // 2, k // 2
    return math.exp(k * math.log(4 / n) + math.lgamma(half_up + 1) + math.lgamma(half_down + 1))


def _bits_below(log2_ratio: float) -> int:
    """Smallest integer ``b >= 0`` with ``b > log2_ratio``."""
    return max(0, math.floor(log2_ratio) + 1)


def required_locator_bits(n: int, k: int) -> BoundReport:
    """Bits for the locator coefficients so that ``k**2 * 2**-bits`` stays under the bound.

    ``bits`` is the value for the rigorous bound; the figure for the
    first-order bound is reported as ``paper_bits``.
    """
    _check_nk(n, k, allow_zero=False)
    paper = locator_min_magnitude_paper(n, k)
    rigorous = locator_min_magnitude_rigorous(n, k)
    paper_bits = _bits_below(math.log2(k * k) - math.log2(paper))
    # The rigorous bound is rational, so its bit count is exact; powers of two
    # sit right on the strict inequality and float logs would misplace them.
    exact = Fraction(4, n) ** k * math.factorial((k + 1) // 2) * math.factorial(k // 2)
    rig_bits = math.floor(k * k / exact).bit_length()
    return BoundReport(
        name="locator",
        inputs={"n": n, "k": k},
        value=float(rig_bits),
        bits=rig_bits,
        extras={"paper_bits": paper_bits, "paper_bound": paper, "rigorous_bound": rigorous},
    )


def toeplitz_condition_bound(k: int, ell: float) -> float:
    """``k * 2**(ell + 1)``: claimed spectral condition bound for the Hankel minor."""
    if k < 1 or ell < 0:
        raise UsageError("need k >= 1 and ell >= 0")
    return k * 2.0 ** (ell + 1)


def perturbation_error_bound(kappa_inf: float, epsilon: float) -> float:
    """Relative solution error ``4 * epsilon * kappa_inf`` of a perturbed linear solve.

    Valid only while ``epsilon * kappa_inf <= 1/2``.
    """
    if kappa_inf < 1 or epsilon < 0:
        raise UsageError("need kappa_inf >= 1 and epsilon >= 0")
    if epsilon * kappa_inf > 0.5:
        raise DomainError(
            f"epsilon * kappa_inf = {epsilon * kappa_inf:g} > 1/2: the bound does not apply"
        )
    return 4 * epsilon * kappa_inf


def _support_bits(n: int, k: int) -> int:
    return math.ceil(k * math.log2(n / k))


def theorem1_measurement_bits(n: int, k: int, ell: int, C0: int = 0) -> BoundReport:
    """Per-syndrome budget ``ell + ceil(k*log2(n/k)) + C0``; total over ``2k`` syndromes."""
    if k < 1 or 2 * k > n or ell < 0:
        raise UsageError(f"need 1 <= k <= n/2 and ell >= 0, got n={n}, k={k}, ell={ell}")
    per = int(ell) + _support_bits(n, k) + int(C0)
    return BoundReport(
        name="theorem1",
        inputs={"n": n, "k": k, "ell": ell, "C0": C0},
        value=float(per),
        bits=per,
        extras={"total_bits": 2 * k * per},
    )


def rip_precision_budget(p: RipParams) -> BoundReport:
    """Bits per measurement keeping the relative error under ``2**-ell / (C k sqrt(m))``.

    The extra bit absorbs the quantizer's margin so the inequality is strict.
    """
    per = math.ceil(p.ell + math.log2(p.C * p.k * math.sqrt(p.m))) + 1
    return BoundReport(
        name="rip",
        inputs={"m": p.m, "k": p.k, "ell": p.ell, "C": p.C},
        value=float(per),
        bits=per,
        extras={"total_bits": p.m * per},
    )


def counting_lower_bound(n: int, k: int, ell: int) -> int:
    """Fewest rows ``m`` with ``(k * 2**(ell+1) + 1)**m >= binom(n, k)``.

    Exact integer arithmetic; ``0`` when ``binom(n, k) == 1``.
    """
    if not 1 <= k <= n or ell < 0:
        raise UsageError(f"need 1 <= k <= n and ell >= 0, got n={n}, k={k}, ell={ell}")
    count = math.comb(n, k)
    base = k * 2 ** (int(ell) + 1) + 1
    if count == 1:
        return 0
    m = max(1, math.ceil(math.log(count) / math.log(base)) - 1)
    while base ** m < count:
        m += 1
    while m > 1 and base ** (m - 1) >= count:
        m -= 1
    return m


def shift_width(k: int) -> int:
    """``ceil(log2(k + 1))``: bits per packed row so a row sum ``<= k`` cannot carry."""
    if k < 0:
        raise UsageError("k must be nonnegative")
    return int(k).bit_length()


def _binary_matrix(A) -> np.ndarray:
    M = np.asarray(A)
    if M.ndim != 2 or not np.isin(M, (0, 1)).all():
        raise UsageError("expected a two-dimensional 0/1 matrix")
    return M.astype(np.int64)


def single_measurement_encode(A, k: int) -> list[int]:
    """Pack the rows of binary ``A`` into one integer weight per column.

    ``a_i = sum_j A[j, i] * 2**(j * s)`` with rows numbered from 1 and
    ``s = ceil(log2(k + 1))``.
    """
    M = _binary_matrix(A)
    s = shift_width(k)
    return [sum(int(M[j, i]) << ((j + 1) * s) for j in range(M.shape[0]))
            for i in range(M.shape[1])]


def single_measurement_decode(dot: int, A, k: int) -> list[int]:
    """Recover the ``k``-sparse binary ``x`` from the single measurement ``a . x``.

    Raises
    ------
    InconsistencyError
        ``dot`` is not of the form ``a . x`` for any ``k``-sparse binary ``x``.
    AmbiguityError
        More than one ``x`` matches, so ``A`` does not separate ``k``-sparse vectors.
    """
    M = _binary_matrix(A)
    m, n = M.shape
    s = shift_width(k)
    dot = int(dot)
    mask = (1 << s) - 1
    if dot < 0 or dot & mask or dot >> ((m + 1) * s):
        raise InconsistencyError(f"{dot} is not a packed row-sum vector for this matrix")
    digits = np.array([(dot >> (j * s)) & mask for j in range(1, m + 1)])
    matches = []
    for size in range(k + 1):
        for cols in itertools.combinations(range(n), size):
            if np.array_equal(M[:, list(cols)].sum(axis=1), digits):
                matches.append(cols)
    if not matches:
        raise InconsistencyError(f"no {k}-sparse binary vector gives digits {digits.tolist()}")
    if len(matches) > 1:
        raise AmbiguityError(f"{len(matches)} sparse vectors give digits {digits.tolist()}")
    x = [0] * n
    for c in matches[0]:
        x[c] = 1
    return x


def information_floor_bits(n: int, k: int) -> float:
    """``k * log2(n/k)``: order of the bits needed to name a ``k``-sparse binary signal."""
    return k * math.log2(n / k)


BOUND_NAMES = ("theorem1", "rip", "counting", "locator", "toeplitz", "perturbation")


def evaluate(name: str, params: dict) -> BoundReport:
    """Dispatch a named bound with string or numeric parameters (CLI entry)."""

    def get(key, cast=int, default=None):
        if key in params:
            try:
                return cast(params[key])
            except ValueError as exc:
                raise UsageError(f"parameter {key}={params[key]!r} is not a valid number") from exc
        if default is None:
            raise UsageError(f"bound {name!r} needs parameter {key!r}")
        return default

    if name == "theorem1":
        return theorem1_measurement_bits(get("n"), get("k"), get("ell"), get("C0", int, 0))
    if name == "rip":
        p = RipParams(get("m"), get("k"), get("ell", float), get("C", float, DEFAULT_RIP_C))
        return rip_precision_budget(p)
    if name == "counting":
        n, k, ell = get("n"), get("k"), get("ell")
        m = counting_lower_bound(n, k, ell)
        return BoundReport("counting", {"n": n, "k": k, "ell": ell}, float(m))
    if name == "locator":
        return required_locator_bits(get("n"), get("k"))
    if name == "toeplitz":
        k, ell = get("k"), get("ell", float)
        return BoundReport("toeplitz", {"k": k, "ell": ell}, toeplitz_condition_bound(k, ell))
    if name == "perturbation":
        kap, eps = get("kappa_inf", float), get("epsilon", float)
        return BoundReport("perturbation", {"kappa_inf": kap, "epsilon": eps},
                           perturbation_error_bound(kap, eps))
    raise UsageError(f"unknown bound {name!r}; choose from {', '.join(BOUND_NAMES)}")
