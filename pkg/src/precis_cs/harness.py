"""Experiment engine: seeded trials, precision sweeps, C0 calibration and
the empirical checks of the conditioning and locator bounds.

Aggregation only ever sums counts and takes maxima, so results do not
depend on trial order.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds
from .decoder import decode, decode_unknown_support
from .errors import PrecisCSError, UsageError
from .linalg import condition_report
from .numerics import STANDARD, PrecisionSpec, check_mode, meets_precision
from .oracle import l0_decode
from .sensing import (
    RNG_NAME,
    MeasurementVector,
    SparseSignal,
    build_vandermonde,
    gen_sparse_signal,
    make_rng,
    measure,
)

CSV_COLUMNS = (
    "n", "k", "ell", "bits", "trials", "successes", "support_failures",
    "precision_failures", "mean_hankel_kappa2", "max_hankel_kappa2", "theoretical_bits",
)
#: Additive constant of the per-syndrome budget, from ``precis-cs sweep`` at
#: n=64, k in 1..4, ell in {0,4,8}, 500 trials, seed 0.
DEFAULT_C0 = 7
DEFAULT_WINDOW = 3
DEFAULT_BITS_SLACK = 16


@dataclass(frozen=True)
class TrialConfig:
    n: int
    k: int
    ell: int
    bits: PrecisionSpec
    trials: int = 1
    seed: int = 0
    precision_mode: str = STANDARD

    def __post_init__(self):
        if not isinstance(self.bits, PrecisionSpec):
            object.__setattr__(self, "bits", PrecisionSpec(self.bits))
        check_mode(self.precision_mode)
        if self.k < 1 or 2 * self.k > self.n:
            raise UsageError(f"need 1 <= k <= n/2, got n={self.n}, k={self.k}")
        if self.ell < 0:
            raise UsageError("ell must be nonnegative")
        if self.trials < 1:
            raise UsageError("trials must be at least 1")


@dataclass(frozen=True)
class TrialOutcome:
    success: bool
    support_ok: bool
    precision_ok: bool
    signal: SparseSignal
    result: object = None  # DecodeResult, or None when decoding failed
    error: str | None = None


def trial_seed(seed: int, trial_index: int) -> int:
    return (int(seed) ^ int(trial_index)) & 0xFFFFFFFFFFFFFFFF


def _judge(x: SparseSignal, y: MeasurementVector, n, k, ell) -> TrialOutcome:
    try:
        res = decode_unknown_support(y, n, k)
    except PrecisCSError as exc:
        return TrialOutcome(False, False, False, x, None, f"{type(exc).__name__}: {exc}")
    support_ok = res.signal.support == x.support
    precision_ok = support_ok and meets_precision(
        np.array(res.signal.values), np.array(x.values), ell)
    return TrialOutcome(support_ok and precision_ok, support_ok, precision_ok, x, res)


def run_trial(cfg: TrialConfig, trial_index: int) -> TrialOutcome:
    """Generate, measure, quantize at ``cfg.bits`` and decode one signal.

    Success means the exact support and ``ell``-bit accurate values.
    Decoding failures are unsuccessful outcomes, not exceptions.
    """
    A = build_vandermonde(cfg.n, 2 * cfg.k, cfg.precision_mode)
    x = gen_sparse_signal(cfg.n, cfg.k, cfg.ell, trial_seed(cfg.seed, trial_index))
    y = measure(A, x).quantized(cfg.bits)
    return _judge(x, y, cfg.n, cfg.k, cfg.ell)


@dataclass
class _Tally:
    trials: int = 0
    successes: int = 0
    support_failures: int = 0
    precision_failures: int = 0
    kappa_sum: float = 0.0
    kappa_count: int = 0
    kappa_max: float = 0.0

    def add(self, out: TrialOutcome):
        self.trials += 1
        self.successes += out.success
        self.support_failures += not out.support_ok
        self.precision_failures += out.support_ok and not out.precision_ok
        kap = None if out.result is None else out.result.hankel_kappa2
        if kap is not None and math.isfinite(kap):
            self.kappa_sum += kap
            self.kappa_count += 1
            self.kappa_max = max(self.kappa_max, kap)


@dataclass(frozen=True)
class SweepRow:
    n: int
    k: int
    ell: int
    bits: int
    trials: int
    successes: int
    support_failures: int
    precision_failures: int
    mean_hankel_kappa2: float | None
    max_hankel_kappa2: float | None
    theoretical_bits: int

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


@dataclass(frozen=True)
class CellSummary:
    n: int
    k: int
    ell: int
    min_sufficient_bits: int | None
    theoretical_bits: int
    bits_range: tuple[int, int]

    @property
    def c0_needed(self) -> int | None:
        if self.min_sufficient_bits is None:
            return None
        return self.min_sufficient_bits - self.theoretical_bits


@dataclass(frozen=True)
class SweepResult:
    rows: list[SweepRow]
    cells: list[CellSummary]
    calibrated_C0: int | None
    window: int = DEFAULT_WINDOW
    seed: int = 0
    precision_mode: str = STANDARD
    rng: str = RNG_NAME

    def success_rates(self, n, k, ell) -> dict[int, float]:
        return {r.bits: r.success_rate for r in self.rows if (r.n, r.k, r.ell) == (n, k, ell)}

    def summary(self) -> dict:
        return {
            "rng": self.rng,
            "seed": self.seed,
            "precision_mode": self.precision_mode,
            "window": self.window,
            "calibrated_C0": self.calibrated_C0,
            "cells": [dict(asdict(c), c0_needed=c.c0_needed) for c in self.cells],
        }


def min_sufficient_bits(rates: dict[int, float], window: int = DEFAULT_WINDOW) -> int | None:
    """Smallest ``b`` with 100% success at ``b, b+1, ..., b+window-1``, all inside the range."""
    for b in sorted(rates):
        if all(rates.get(b + i) == 1.0 for i in range(window)):
            return b
    return None


def default_bits_range(n, k, ell, slack=DEFAULT_BITS_SLACK):
    return ell, ell + k * math.ceil(math.log2(n / k)) + slack


def sweep_min_bits(
    n_values,
    k_values,
    ell_values,
    trials: int,
    seed: int = 0,
    bits_min: int | None = None,
    bits_max: int | None = None,
    window: int = DEFAULT_WINDOW,
    precision_mode: str = STANDARD,
    progress=None,
) -> SweepResult:
    """Success rates over a bit range for every ``(n, k, ell)`` cell.

    Each cell's range defaults to ``[ell, ell + k*ceil(log2(n/k)) + 16]``;
    ``bits_min``/``bits_max`` override it. ``calibrated_C0`` is the largest
    ``min_sufficient_bits - ell - ceil(k*log2(n/k))`` over the grid, or
    ``None`` if some cell never stabilizes at 100%.
    """
    check_mode(precision_mode)
    grid = [(n, k, ell) for n in n_values for k in k_values for ell in ell_values]
    if not grid:
        raise UsageError("empty sweep grid")
    if trials < 1 or window < 1:
        raise UsageError("trials and window must be positive")
    rows, cells = [], []
    for n, k, ell in grid:
        TrialConfig(n, k, ell, 0, trials, seed, precision_mode)
        lo, hi = default_bits_range(n, k, ell)
        lo = lo if bits_min is None else bits_min
        hi = hi if bits_max is None else bits_max
        if hi < lo:
            raise UsageError(f"empty bit range [{lo}, {hi}]")
        theo = bounds.theorem1_measurement_bits(n, k, ell).bits
        A = build_vandermonde(n, 2 * k, precision_mode)
        tallies = {b: _Tally() for b in range(lo, hi + 1)}
        for t in range(trials):
            x = gen_sparse_signal(n, k, ell, trial_seed(seed, t))
            exact = measure(A, x)
            for b, tally in tallies.items():
                tally.add(_judge(x, exact.quantized(b), n, k, ell))
        for b, tl in tallies.items():
            rows.append(SweepRow(
                n, k, ell, b, tl.trials, tl.successes, tl.support_failures,
                tl.precision_failures,
                tl.kappa_sum / tl.kappa_count if tl.kappa_count else None,
                tl.kappa_max if tl.kappa_count else None,
                theo,
            ))
        rates = {b: tl.successes / tl.trials for b, tl in tallies.items()}
        cells.append(CellSummary(n, k, ell, min_sufficient_bits(rates, window), theo, (lo, hi)))
        if progress is not None:
            progress(cells[-1])
    needed = [c.c0_needed for c in cells]
    c0 = None if any(v is None for v in needed) else max(needed)
    return SweepResult(rows, cells, c0, window, seed, precision_mode)


def _fmt(v):
    if v is None:
        return ""
    return repr(float(v)) if isinstance(v, float) else str(v)


def render_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in result.rows:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def render_json(result: SweepResult) -> str:
    body = {
        "header": result.summary(),
        "rows": [{c: getattr(r, c) for c in CSV_COLUMNS} for r in result.rows],
    }
    return json.dumps(body, indent=2, sort_keys=False) + "\n"


def emit_report(results: SweepResult, format: str, path) -> None:
    """Write the sweep rows as CSV (exactly :data:`CSV_COLUMNS`) or JSON."""
    if not results.rows:
        raise UsageError("nothing to report")
    if format == "csv":
        text = render_csv(results)
    elif format == "json":
        text = render_json(results)
    else:
        raise UsageError(f"unknown report format {format!r}")
    with open(path, "w", newline="") as fh:
        fh.write(text)


# -- bound verification suites ------------------------------------------------


def _subsets(n, k, count, rng):
    """All k-subsets of 1..n when there are at most ``count``, else ``count`` random ones."""
    if math.comb(n, k) <= count:
        return [tuple(c) for c in itertools.combinations(range(1, n + 1), k)]
    return [tuple(int(e) + 1 for e in np.sort(rng.choice(n, size=k, replace=False)))
            for _ in range(count)]


def vandermonde_condition_suite(pairs, samples: int, seed: int = 0) -> dict:
    """``kappa2`` of the ``k x k`` Vandermonde block on random root subsets vs ``sqrt(2k)``."""
    rng = make_rng(seed)
    total, violations, worst = 0, 0, None
    for n, k in pairs:
        A = build_vandermonde(n, k)
        for E in _subsets(n, k, samples, rng):
            kappa = condition_report(A.block(range(k), E)).kappa2
            bound = math.sqrt(2 * k)
            total += 1
            if kappa > bound * (1 + 1e-8):
                violations += 1
                ratio = kappa / bound
                if worst is None or ratio > worst["ratio"]:
                    worst = {"n": n, "k": k, "support": list(E), "kappa2": kappa,
                             "bound": bound, "ratio": ratio}
    return {"total": total, "violations": violations, "worst": worst}


def hankel_condition_suite(n_values, ell_values, trials: int, seed: int = 0, k_max: int = 8,
                           precision_mode: str = STANDARD) -> dict:
    """Hankel ``kappa2`` on exact syndromes vs ``k * 2**(ell+1)``."""
    total, violations, worst = 0, 0, None
    for n in n_values:
        for k in range(1, min(k_max, n // 2) + 1):
            A = build_vandermonde(n, 2 * k, precision_mode)
            for ell in ell_values:
                bound = bounds.toeplitz_condition_bound(k, ell)
                for t in range(trials):
                    x = gen_sparse_signal(n, k, ell, trial_seed(seed, t))
                    kappa = decode(measure(A, x), n, k).hankel_kappa2
                    total += 1
                    if kappa > bound * (1 + 1e-6):
                        violations += 1
                        ratio = kappa / bound
                        if worst is None or ratio > worst["ratio"]:
                            worst = {"n": n, "k": k, "ell": ell, "support": list(x.support),
                                     "kappa2": kappa, "bound": bound, "ratio": ratio}
    return {"total": total, "violations": violations, "worst": worst}


def locator_min_over_nonroots(n: int, support) -> float:
    """``min |prod_e (1 - w a_e)|`` over ``n``-th roots of unity ``w`` with no zero factor.

    Each factor is the chord ``2 |sin(pi d / n)|`` with ``d = (t + e) mod n``
    for ``w = exp(2 pi i t / n)``.
    """
    t = np.arange(n)[:, None]
    e = np.asarray(support)[None, :]
    d = (t + e) % n
    chords = 2 * np.abs(np.sin(np.pi * d / n))
    rows = (d != 0).all(axis=1)
    if not rows.any():
        return math.inf
    return float(np.prod(chords[rows], axis=1).min())


def locator_bound_suite(n_values, k_max: int = 4, samples: int = 500, seed: int = 0) -> dict:
    """Empirical ``min |L(w)|`` against the rigorous and first-order bounds."""
    rng = make_rng(seed)
    cells, rig_violations, total = [], 0, 0
    for n in n_values:
        for k in range(1, min(k_max, n // 2) + 1):
            emp = math.inf
            for E in _subsets(n, k, samples, rng):
                emp = min(emp, locator_min_over_nonroots(n, E))
                total += 1
            rig = bounds.locator_min_magnitude_rigorous(n, k)
            paper = bounds.locator_min_magnitude_paper(n, k)
            rig_violations += emp < rig
            cells.append({"n": n, "k": k, "empirical_min": emp, "rigorous_bound": rig,
                          "paper_bound": paper, "rigorous_holds": emp >= rig,
                          "paper_exceeds_empirical": paper > emp})
    paper_cases = [(c["n"], c["k"]) for c in cells if c["paper_exceeds_empirical"]]
    return {"total_supports": total, "rigorous_violations": rig_violations,
            "paper_bound_exceeds_empirical": paper_cases, "cells": cells}


# -- oracle cross-checks ------------------------------------------------------


def budget_bits(n: int, k: int, ell: int, C0: int = DEFAULT_C0) -> int:
    return bounds.theorem1_measurement_bits(n, k, ell, C0).bits


def _compare(x, A, y, n, k, value_rtol):
    oracle = l0_decode(A, y, k)
    try:
        dec = decode_unknown_support(y, n, k).signal
    except PrecisCSError as exc:
        return {"support": list(x.support), "error": str(exc)}
    if dec.support != oracle.signal.support:
        return {"support": list(x.support), "decoder": list(dec.support),
                "oracle": list(oracle.signal.support)}
    if value_rtol is not None and dec.support:
        a, b = np.array(dec.values), np.array(oracle.signal.values)
        if np.abs(a - b).max() > value_rtol * np.abs(b).max():
            return {"support": list(x.support), "values": [dec.values, oracle.signal.values]}
    return None


def oracle_equivalence_suite(n_max: int = 12, k_max: int = 2, C0: int = DEFAULT_C0,
                             value_set=(1.0, -1.0, 2.0, -2.0)) -> dict:
    """Decoder vs exhaustive oracle on every support of size ``1..k`` and value pattern.

    Runs on exact syndromes and on syndromes quantized at the budget
    ``ell + ceil(k*log2(n/k)) + C0`` with ``ell = ceil(log2(max|v|/min|v|))``.
    """
    mags = [abs(v) for v in value_set]
    ell = math.ceil(math.log2(max(mags) / min(mags)))
    checked, mismatches = 0, []
    for k in range(1, k_max + 1):
        for n in range(2 * k, n_max + 1):
            A = build_vandermonde(n, 2 * k)
            b = budget_bits(n, k, ell, C0)
            for size in range(1, k + 1):
                for E in itertools.combinations(range(1, n + 1), size):
                    for vals in itertools.product(value_set, repeat=size):
                        x = SparseSignal(n, E, vals)
                        exact = measure(A, x)
                        for y, rtol in ((exact, 1e-6), (exact.quantized(b), None)):
                            checked += 1
                            bad = _compare(x, A, y, n, k, rtol)
                            if bad is not None:
                                bad.update(n=n, k=k, bits=y.bits)
                                mismatches.append(bad)
    return {"checked": checked, "mismatches": mismatches, "ell": ell, "C0": C0}


def oracle_check(n: int, k: int, seed: int, trials: int = 50, C0: int = DEFAULT_C0) -> dict:
    """Random-instance decoder/oracle agreement, exact and at the budget."""
    A = build_vandermonde(n, 2 * k)
    rng = make_rng(seed)
    checked, mismatches = 0, []
    for _ in range(trials):
        size = int(rng.integers(1, k + 1))
        E = tuple(np.sort(rng.choice(n, size=size, replace=False)) + 1)
        vals = rng.choice([1.0, -1.0, 2.0, -2.0], size=size)
        x = SparseSignal(n, E, vals)
        exact = measure(A, x)
        for y, rtol in ((exact, 1e-6), (exact.quantized(budget_bits(n, k, 1, C0)), None)):
            checked += 1
            bad = _compare(x, A, y, n, k, rtol)
            if bad is not None:
                bad.update(bits=y.bits)
                mismatches.append(bad)
    return {"n": n, "k": k, "seed": seed, "checked": checked, "mismatches": mismatches}
