"""Compressed sensing with Vandermonde measurements and complex syndrome decoding."""

from .decoder import (
    DecodeResult,
    LocatorPolynomial,
    build_hankel,
    decode,
    decode_unknown_support,
    find_support,
    solve_locator,
    solve_values,
)
from .errors import (
    AmbiguityError,
    DegenerateLocatorError,
    DomainError,
    InconsistencyError,
    PrecisCSError,
    ReconstructionError,
    SingularMatrixError,
    UsageError,
)
from .numerics import PrecisionSpec, dynamic_range, meets_precision, quantize, relative_inf_error
from .sensing import MeasurementVector, SparseSignal, build_vandermonde, gen_sparse_signal, measure

__version__ = "0.1.0"
