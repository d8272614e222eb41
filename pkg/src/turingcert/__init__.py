"""turingcert: certified spectral enclosures and instability thresholds
for a two-component reaction-diffusion system with a nonlocal coupling.

The package is organized bottom-up:

* :mod:`turingcert.interval` -- directed-rounding interval arithmetic;
* :mod:`turingcert.harmonic` -- problem data, Fourier-cosine coefficients
  of the nonlocal kernel, and its decay constant;
* :mod:`turingcert.linalg` -- verified matrix products and inverses;
* :mod:`turingcert.gershgorin` -- disk enclosures of the full spectrum of
  the (rescaled, approximately diagonalized) linearization, with explicit
  tail bounds, and the resulting stable/unstable classification;
* :mod:`turingcert.nk` -- Newton-Kantorovich validation of the leading
  eigenpair and its parameter derivative;
* :mod:`turingcert.threshold` -- the delta-sweep + refinement pipeline
  that certifies the instability threshold;
* :mod:`turingcert.cli` -- command-line front end.
"""

from .errors import (
    TuringCertError,
    DivisionByZeroInterval,
    EmptyIntersection,
    NegativeBase,
    DimensionMismatch,
    ConvergenceFailure,
    NotVerifiablyInvertible,
    NoThresholdFound,
    TruncationTooSmall,
    SingularDenominator,
    ContractionFails,
    NotIdentified,
    CannotCertifyUniqueness,
    NeumannSeriesDiverges,
    ComplexLeadingEigenvalue,
)
from .interval import (
    Interval,
    ComplexInterval,
    EMPTY,
    PI,
    pow_real,
    rigorous_sum,
    sum_enclosure,
    hull,
    intersect,
    enclose_decimal,
    enclose_rational,
)

__version__ = "0.1.0"

__all__ = [
    "Interval", "ComplexInterval", "EMPTY", "PI", "pow_real",
    "rigorous_sum", "sum_enclosure", "hull", "intersect",
    "enclose_decimal", "enclose_rational",
    "TuringCertError", "DivisionByZeroInterval", "EmptyIntersection",
    "NegativeBase", "DimensionMismatch", "ConvergenceFailure",
    "NotVerifiablyInvertible", "NoThresholdFound", "TruncationTooSmall",
    "SingularDenominator", "ContractionFails", "NotIdentified",
    "CannotCertifyUniqueness", "NeumannSeriesDiverges",
    "ComplexLeadingEigenvalue",
    "__version__",
]
