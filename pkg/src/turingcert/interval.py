"""Directed-rounding interval arithmetic on float64 arrays.

Rigor model
-----------
All endpoint computations are performed in IEEE-754 binary64
round-to-nearest and then widened *outward* with ``np.nextafter`` steps.
This avoids touching the global rounding mode (thread-safe, and safe
against libraries that reset it) at the cost of one deliberately wasted
ulp per operation:

* exact-result ops (negation, absolute value) do not widen;
* single rounded ops (``+ - * /``, ``sqrt``) widen 1 ulp outward, which
  strictly contains the correctly rounded-down/up endpoints;
* transcendental endpoint evaluations (``sin``, ``pow_real``) widen by a
  fixed 4-ulp slop, covering libm/SIMD implementations that are not
  correctly rounded (documented vendor bounds are well under 4 ulp for
  the argument ranges this library uses; containment is regression-tested
  against a high-precision oracle).

Any NaN produced by an endpoint computation (e.g. ``0 * inf``) is cleaned
up conservatively: NaN lower endpoints become ``-inf``, NaN upper
endpoints become ``+inf``.

Endpoints are stored as ``float64`` ndarrays of identical (broadcast)
shape, so a whole matrix of intervals is two arrays, and all arithmetic
is vectorized.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DivisionByZeroInterval, NegativeBase

__all__ = [
    "Interval",
    "ComplexInterval",
    "EMPTY",
    "PI",
    "pow_real",
    "rigorous_sum",
    "sum_enclosure",
    "hull",
    "intersect",
    "where",
    "imax",
    "imin",
    "enclose_decimal",
    "enclose_rational",
]

_U = 2.0 ** -53  # unit roundoff of binary64


# --------------------------------------------------------------------------
# directed-rounding helpers
# --------------------------------------------------------------------------

def _down(x, steps: int = 1):
    """``steps`` nextafter steps toward -inf (elementwise)."""
    for _ in range(steps):
        x = np.nextafter(x, -np.inf)
    return x


def _up(x, steps: int = 1):
    """``steps`` nextafter steps toward +inf (elementwise)."""
    for _ in range(steps):
        x = np.nextafter(x, np.inf)
    return x


def _nan_cleanup(lo, hi):
    lo = np.where(np.isnan(lo), -np.inf, lo)
    hi = np.where(np.isnan(hi), np.inf, hi)
    return lo, hi


def _asarray(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    return a


def gamma_bound(n: int) -> float:
    """Upper bound on gamma_n = n*u/(1 - n*u), the classical accumulated
    rounding factor for n elementary round-to-nearest operations."""
    if n <= 0:
        return 0.0
    nu = n * _U  # exact for n < 2**53
    if nu >= 1.0:
        return math.inf
    return float(_up(_up(nu) / _down(1.0 - nu)))


# --------------------------------------------------------------------------
# Interval
# --------------------------------------------------------------------------

class Interval:
    """Closed real interval(s) ``[lo, hi]`` with float64 endpoint arrays.

    ``lo`` and ``hi`` may be any broadcast-compatible shape (scalars give
    0-d arrays).  Invariant: ``lo <= hi`` elementwise and no NaN.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        lo = _asarray(lo)
        hi = _asarray(hi)
        lo, hi = np.broadcast_arrays(lo, hi)
        lo = np.array(lo, dtype=np.float64)
        hi = np.array(hi, dtype=np.float64)
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("NaN endpoint in Interval construction")
        if np.any(lo > hi):
            raise ValueError("Interval requires lo <= hi elementwise")
        self.lo = lo
        self.hi = hi

    # -- fast internal constructor (no validation) --------------------
    @classmethod
    def _raw(cls, lo: np.ndarray, hi: np.ndarray) -> "Interval":
        obj = object.__new__(cls)
        obj.lo = lo
        obj.hi = hi
        return obj

    @classmethod
    def point(cls, x) -> "Interval":
        a = _asarray(x).copy()
        return cls(a, a.copy())

    @classmethod
    def zeros(cls, shape=()) -> "Interval":
        return cls._raw(np.zeros(shape), np.zeros(shape))

    # -- basic descriptors ---------------------------------------------
    @property
    def shape(self):
        return self.lo.shape

    @property
    def size(self):
        return self.lo.size

    @property
    def ndim(self):
        return self.lo.ndim

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, idx) -> "Interval":
        lo = self.lo[idx]
        hi = self.hi[idx]
        return Interval._raw(np.asarray(lo, dtype=np.float64),
                             np.asarray(hi, dtype=np.float64))

    def reshape(self, *shape) -> "Interval":
        return Interval._raw(self.lo.reshape(*shape), self.hi.reshape(*shape))

    def copy(self) -> "Interval":
        return Interval._raw(self.lo.copy(), self.hi.copy())

    def is_empty(self) -> bool:
        return False

    def is_point(self):
        return self.lo == self.hi

    @property
    def inf(self):
        """Lower endpoint as float (scalar intervals only)."""
        return float(self.lo)

    @property
    def sup(self):
        """Upper endpoint as float (scalar intervals only)."""
        return float(self.hi)

    def mid(self) -> np.ndarray:
        """Round-to-nearest midpoint (NOT rigorous; for seeding numerics)."""
        m = 0.5 * (self.lo + self.hi)
        bad = ~np.isfinite(m)
        if np.any(bad):
            m = np.where(bad, self.lo + 0.5 * (self.hi - self.lo), m)
            m = np.where(np.isnan(m), 0.0, m)
        return m

    def width(self) -> np.ndarray:
        """Rigorous upper bound on hi - lo."""
        return _up(self.hi - self.lo)

    def mag(self) -> np.ndarray:
        """sup |x| over the interval (exact)."""
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def mig(self) -> np.ndarray:
        """inf |x| over the interval (exact)."""
        straddle = (self.lo <= 0.0) & (self.hi >= 0.0)
        return np.where(straddle, 0.0,
                        np.minimum(np.abs(self.lo), np.abs(self.hi)))

    def contains(self, x) -> np.ndarray:
        x = _asarray(x)
        return (self.lo <= x) & (x <= self.hi)

    def contains_interval(self, other: "Interval") -> np.ndarray:
        return (self.lo <= other.lo) & (other.hi <= self.hi)

    def contains_zero(self) -> np.ndarray:
        return (self.lo <= 0.0) & (0.0 <= self.hi)

    # -- arithmetic ------------------------------------------------------
    def __neg__(self) -> "Interval":
        return Interval._raw(-self.hi, -self.lo)

    def __add__(self, other) -> "Interval":
        other = as_interval(other)
        with np.errstate(all="ignore"):
            lo = _down(self.lo + other.lo)
            hi = _up(self.hi + other.hi)
        return Interval._raw(*_nan_cleanup(lo, hi))

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        other = as_interval(other)
        with np.errstate(all="ignore"):
            lo = _down(self.lo - other.hi)
            hi = _up(self.hi - other.lo)
        return Interval._raw(*_nan_cleanup(lo, hi))

    def __rsub__(self, other) -> "Interval":
        return as_interval(other).__sub__(self)

    def __mul__(self, other) -> "Interval":
        other = as_interval(other)
        with np.errstate(all="ignore"):
            p1 = self.lo * other.lo
            p2 = self.lo * other.hi
            p3 = self.hi * other.lo
            p4 = self.hi * other.hi
            # NaN (0*inf) must not win the min/max silently
            stack = np.stack(np.broadcast_arrays(p1, p2, p3, p4))
            any_nan = np.any(np.isnan(stack), axis=0)
            lo = _down(np.min(np.where(np.isnan(stack), np.inf, stack),
                              axis=0))
            hi = _up(np.max(np.where(np.isnan(stack), -np.inf, stack),
                            axis=0))
            lo = np.where(any_nan, -np.inf, lo)
            hi = np.where(any_nan, np.inf, hi)
        return Interval._raw(*_nan_cleanup(lo, hi))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        other = as_interval(other)
        if np.any((other.lo <= 0.0) & (other.hi >= 0.0)):
            raise DivisionByZeroInterval(
                "interval division by an interval containing zero")
        with np.errstate(all="ignore"):
            q1 = self.lo / other.lo
            q2 = self.lo / other.hi
            q3 = self.hi / other.lo
            q4 = self.hi / other.hi
            stack = np.stack(np.broadcast_arrays(q1, q2, q3, q4))
            any_nan = np.any(np.isnan(stack), axis=0)
            lo = _down(np.min(np.where(np.isnan(stack), np.inf, stack),
                              axis=0))
            hi = _up(np.max(np.where(np.isnan(stack), -np.inf, stack),
                            axis=0))
            lo = np.where(any_nan, -np.inf, lo)
            hi = np.where(any_nan, np.inf, hi)
        return Interval._raw(*_nan_cleanup(lo, hi))

    def __rtruediv__(self, other) -> "Interval":
        return as_interval(other).__truediv__(self)

    def abs_val(self) -> "Interval":
        """Interval enclosure of |x| (exact endpoints)."""
        return Interval._raw(self.mig(), self.mag())

    def square(self) -> "Interval":
        """Tight enclosure of x**2 (never negative, unlike self*self)."""
        lo_m = self.mig()
        hi_m = self.mag()
        with np.errstate(all="ignore"):
            lo = np.maximum(_down(lo_m * lo_m), 0.0)
            hi = _up(hi_m * hi_m)
        return Interval._raw(*_nan_cleanup(lo, hi))

    def sqrt(self) -> "Interval":
        if np.any(self.lo < 0.0):
            raise NegativeBase("sqrt of an interval extending below zero")
        with np.errstate(all="ignore"):
            lo = np.maximum(_down(np.sqrt(self.lo)), 0.0)
            hi = _up(np.sqrt(self.hi))
        return Interval._raw(*_nan_cleanup(lo, hi))

    # -- reductions ------------------------------------------------------
    def sum(self, axis=None) -> "Interval":
        return sum_enclosure(self, axis=axis)

    def hull_reduce(self, axis=None) -> "Interval":
        """Hull over an axis: [min lo, max hi]."""
        return Interval._raw(np.min(self.lo, axis=axis),
                             np.max(self.hi, axis=axis))

    # -- serialization ----------------------------------------------------
    def to_json(self):
        if self.lo.ndim == 0:
            return {"lo": float(self.lo), "hi": float(self.hi)}
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist()}

    @classmethod
    def from_json(cls, d) -> "Interval":
        return cls(d["lo"], d["hi"])

    def as_pair(self):
        """Scalar interval as a [lo, hi] 2-list (pipeline file format)."""
        if self.lo.ndim != 0:
            raise ValueError("as_pair requires a scalar interval")
        return [float(self.lo), float(self.hi)]

    @classmethod
    def from_pair(cls, pair) -> "Interval":
        lo, hi = pair
        return cls(float(lo), float(hi))

    def __repr__(self):
        if self.lo.ndim == 0:
            return f"Interval([{float(self.lo)!r}, {float(self.hi)!r}])"
        if self.lo.size <= 4:
            return (f"Interval(lo={self.lo.tolist()!r}, "
                    f"hi={self.hi.tolist()!r})")
        return f"Interval(shape={self.lo.shape})"

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        if other.is_empty() or self.is_empty():
            return self is other
        return (self.lo.shape == other.lo.shape
                and bool(np.all(self.lo == other.lo))
                and bool(np.all(self.hi == other.hi)))

    def __hash__(self):
        if self.lo.ndim == 0:
            return hash((float(self.lo), float(self.hi)))
        return hash((self.lo.tobytes(), self.hi.tobytes()))


class _EmptyInterval(Interval):
    """Singleton returned by :func:`intersect` when intervals are disjoint."""

    def __init__(self):
        self.lo = np.asarray(np.inf)
        self.hi = np.asarray(-np.inf)

    def is_empty(self) -> bool:
        return True

    def __repr__(self):
        return "EMPTY"


EMPTY = _EmptyInterval()

PI = Interval._raw(np.asarray(math.pi), np.asarray(np.nextafter(math.pi,
                                                                np.inf)))
"""1-ulp enclosure of pi.  ``math.pi`` rounds *down* (verified against a
high-precision oracle in the tests), so [math.pi, nextafter(math.pi, +inf)]
straddles the true value."""


def as_interval(x) -> Interval:
    """Coerce numbers / ndarrays to point intervals; pass Intervals through."""
    if isinstance(x, Interval):
        return x
    return Interval.point(x)


def where(cond, a: Interval, b: Interval) -> Interval:
    """Elementwise select: a where cond, b elsewhere."""
    a, b = as_interval(a), as_interval(b)
    return Interval._raw(
        np.asarray(np.where(cond, a.lo, b.lo), dtype=np.float64),
        np.asarray(np.where(cond, a.hi, b.hi), dtype=np.float64))


def imax(*xs) -> Interval:
    """Enclosure of the elementwise maximum of intervals."""
    ivs = [as_interval(x) for x in xs]
    lo = ivs[0].lo
    hi = ivs[0].hi
    for v in ivs[1:]:
        lo = np.maximum(lo, v.lo)
        hi = np.maximum(hi, v.hi)
    return Interval._raw(np.asarray(lo, dtype=np.float64).copy(),
                         np.asarray(hi, dtype=np.float64).copy())


def imin(*xs) -> Interval:
    """Enclosure of the elementwise minimum of intervals."""
    ivs = [as_interval(x) for x in xs]
    lo = ivs[0].lo
    hi = ivs[0].hi
    for v in ivs[1:]:
        lo = np.minimum(lo, v.lo)
        hi = np.minimum(hi, v.hi)
    return Interval._raw(np.asarray(lo, dtype=np.float64).copy(),
                         np.asarray(hi, dtype=np.float64).copy())


def hull(a: Interval, b: Interval) -> Interval:
    """Smallest interval containing both (elementwise)."""
    a, b = as_interval(a), as_interval(b)
    if a.is_empty():
        return b
    if b.is_empty():
        return a
    return Interval._raw(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi))


def intersect(a: Interval, b: Interval):
    """Elementwise intersection; returns ``EMPTY`` if any element is empty."""
    a, b = as_interval(a), as_interval(b)
    if a.is_empty() or b.is_empty():
        return EMPTY
    lo = np.maximum(a.lo, b.lo)
    hi = np.minimum(a.hi, b.hi)
    if np.any(lo > hi):
        return EMPTY
    return Interval._raw(np.array(lo, dtype=np.float64),
                         np.array(hi, dtype=np.float64))


# --------------------------------------------------------------------------
# transcendental functions
# --------------------------------------------------------------------------

_TRANS_SLOP = 4  # fixed outward ulp slop for libm endpoint evaluations
_SIN_ARG_TRUST = 1e8  # beyond this, skip argument reduction and return [-1,1]


def pow_real(x: Interval, alpha: float) -> Interval:
    """Enclosure of ``t**alpha`` for t in x, x >= 0, real alpha.

    ``t**alpha`` is monotone on [0, inf) for fixed alpha, so endpoints are
    evaluated with libm ``pow`` (round-to-nearest, error well under the
    slop) and widened by the fixed 4-ulp transcendental slop.
    ``alpha == 0`` returns exactly [1, 1]; a zero lower endpoint with
    alpha > 0 keeps an exact 0 lower bound.
    """
    x = as_interval(x)
    alpha = float(alpha)
    if math.isnan(alpha):
        raise ValueError("alpha must not be NaN")
    if alpha == 0.0:
        ones = np.ones_like(x.lo)
        return Interval._raw(ones, ones.copy())
    if np.any(x.lo < 0.0):
        raise NegativeBase("pow_real requires a nonnegative base interval")
    with np.errstate(all="ignore"):
        if alpha > 0.0:
            lo = np.power(x.lo, alpha)
            hi = np.power(x.hi, alpha)
        else:
            lo = np.power(x.hi, alpha)
            hi = np.power(x.lo, alpha)  # +inf where x.lo == 0
        lo = _down(lo, _TRANS_SLOP)
        hi = _up(hi, _TRANS_SLOP)
    lo = np.maximum(lo, 0.0)  # t**alpha >= 0 on t >= 0
    return Interval._raw(*_nan_cleanup(lo, hi))


def sin(x: Interval) -> Interval:
    """Enclosure of sin over x, via critical-point tests with interval pi.

    The interval ``t = (x - PI/2) / (2 PI)`` encloses the set of k with
    ``pi/2 + 2 pi k`` in x; if it provably contains no integer, x contains
    no maximum of sin, and similarly for minima with ``+PI/2``.  With
    neither kind of critical point inside, sin's extrema over x sit at the
    endpoints, which are evaluated with libm and widened by the 4-ulp
    slop.  Wherever a test fires (including infinite or huge endpoints,
    where the enclosing t has infinite width) the corresponding bound is
    the trivial +-1.
    """
    x = as_interval(x)
    two_pi = PI * 2.0
    half_pi = PI * 0.5

    t_max = (x - half_pi) / two_pi
    t_min = (x + half_pi) / two_pi
    with np.errstate(all="ignore"):
        has_max = np.floor(t_max.hi) >= np.ceil(t_max.lo)
        has_min = np.floor(t_min.hi) >= np.ceil(t_min.lo)
        untrusted = (np.abs(x.lo) > _SIN_ARG_TRUST) | \
                    (np.abs(x.hi) > _SIN_ARG_TRUST)
        has_max = has_max | untrusted
        has_min = has_min | untrusted

        s_lo = np.sin(x.lo)
        s_hi = np.sin(x.hi)
        end_lo = _down(np.minimum(s_lo, s_hi), _TRANS_SLOP)
        end_hi = _up(np.maximum(s_lo, s_hi), _TRANS_SLOP)

    lo = np.where(has_min, -1.0, np.maximum(end_lo, -1.0))
    hi = np.where(has_max, 1.0, np.minimum(end_hi, 1.0))
    return Interval._raw(*_nan_cleanup(lo, hi))


# --------------------------------------------------------------------------
# rigorous sums
# --------------------------------------------------------------------------

def rigorous_sum(xs) -> Interval:
    """Left-to-right interval sum of a sequence of intervals/numbers."""
    total = Interval.point(0.0)
    for x in xs:
        total = total + as_interval(x)
    return total


def _rn_sum_with_error(a: np.ndarray, axis):
    """Round-to-nearest sum along ``axis`` plus a rigorous bound on its
    absolute error: |fl(sum a) - sum a| <= gamma_n * sum |a| for any
    summation order with n summands (numpy's pairwise order included)."""
    s = np.sum(a, axis=axis)
    n = a.size if axis is None else a.shape[axis]
    if n <= 1:
        return s, np.zeros_like(s)
    g = gamma_bound(n)
    abs_sum = np.sum(np.abs(a), axis=axis)
    # |true sum |a|| <= abs_sum * (1 + gamma_n); two extra _up steps cover
    # the bound's own two multiplications.
    err = _up(_up(abs_sum * _up(1.0 + g)) * g, 2)
    return s, err


def sum_enclosure(x: Interval, axis=None) -> Interval:
    """Vectorized enclosure of the elementwise-interval sum along ``axis``.

    Equivalent in meaning to folding with interval addition but O(n) with
    numpy reductions: round-to-nearest endpoint sums widened by the
    classical gamma_n accumulated-rounding bound.
    """
    with np.errstate(all="ignore"):
        s_lo, e_lo = _rn_sum_with_error(x.lo, axis)
        s_hi, e_hi = _rn_sum_with_error(x.hi, axis)
        lo = _down(s_lo - e_lo)
        hi = _up(s_hi + e_hi)
    return Interval._raw(*_nan_cleanup(np.asarray(lo, dtype=np.float64),
                                       np.asarray(hi, dtype=np.float64)))


def dot_enclosure(a: Interval, b: Interval) -> Interval:
    """Enclosure of the dot product of two interval vectors."""
    return sum_enclosure(a * b, axis=None)


# --------------------------------------------------------------------------
# exact decimal / rational enclosure
# --------------------------------------------------------------------------

def enclose_rational(q: Fraction) -> Interval:
    """Tightest float64 interval containing an exact rational."""
    f = float(q)
    if math.isinf(f):
        if f > 0:
            return Interval._raw(np.asarray(np.finfo(np.float64).max),
                                 np.asarray(np.inf))
        return Interval._raw(np.asarray(-np.inf),
                             np.asarray(np.finfo(np.float64).min))
    fr = Fraction(f)
    if fr == q:
        return Interval.point(f)
    if fr > q:
        return Interval._raw(np.asarray(np.nextafter(f, -np.inf)),
                             np.asarray(f))
    return Interval._raw(np.asarray(f), np.asarray(np.nextafter(f, np.inf)))


def enclose_decimal(s: str) -> Interval:
    """Tightest float64 interval containing an exact decimal literal."""
    return enclose_rational(Fraction(s))


# --------------------------------------------------------------------------
# ComplexInterval
# --------------------------------------------------------------------------

class ComplexInterval:
    """Rectangular complex interval: independent real/imaginary Intervals."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=None):
        self.re = as_interval(re)
        if im is None:
            z = np.zeros(self.re.shape)
            self.im = Interval._raw(z, z.copy())
        else:
            self.im = as_interval(im)
        if self.re.shape != self.im.shape:
            lo_re, lo_im = np.broadcast_arrays(self.re.lo, self.im.lo)
            hi_re, hi_im = np.broadcast_arrays(self.re.hi, self.im.hi)
            self.re = Interval._raw(np.array(lo_re), np.array(hi_re))
            self.im = Interval._raw(np.array(lo_im), np.array(hi_im))

    @classmethod
    def from_complex(cls, z) -> "ComplexInterval":
        z = np.asarray(z, dtype=np.complex128)
        return cls(Interval.point(z.real), Interval.point(z.imag))

    @property
    def shape(self):
        return self.re.shape

    def __getitem__(self, idx) -> "ComplexInterval":
        return ComplexInterval(self.re[idx], self.im[idx])

    def __neg__(self):
        return ComplexInterval(-self.re, -self.im)

    def __add__(self, other):
        other = as_complex_interval(other)
        return ComplexInterval(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_complex_interval(other)
        return ComplexInterval(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_complex_interval(other).__sub__(self)

    def __mul__(self, other):
        other = as_complex_interval(other)
        return ComplexInterval(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conj(self):
        return ComplexInterval(self.re, -self.im)

    def abs_val(self) -> Interval:
        """Enclosure of |z| = sqrt(re^2 + im^2)."""
        s = self.re.square() + self.im.square()
        # the additive widening can dip an ulp below zero; the true sum of
        # squares cannot
        s = Interval._raw(np.maximum(s.lo, 0.0), s.hi)
        return s.sqrt()

    def mag(self) -> np.ndarray:
        """sup |z| over the rectangle."""
        return self.abs_val().hi

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        return self.re.contains(z.real) & self.im.contains(z.imag)

    def is_real(self) -> bool:
        return bool(np.all(self.im.lo == 0.0) and np.all(self.im.hi == 0.0))

    def to_json(self):
        return {"re": self.re.to_json(), "im": self.im.to_json()}

    @classmethod
    def from_json(cls, d) -> "ComplexInterval":
        return cls(Interval.from_json(d["re"]), Interval.from_json(d["im"]))

    def __repr__(self):
        if self.re.lo.ndim == 0:
            return f"ComplexInterval(re={self.re!r}, im={self.im!r})"
        return f"ComplexInterval(shape={self.re.shape})"


def as_complex_interval(z) -> ComplexInterval:
    if isinstance(z, ComplexInterval):
        return z
    if isinstance(z, Interval):
        return ComplexInterval(z)
    zc = np.asarray(z)
    if np.iscomplexobj(zc):
        return ComplexInterval.from_complex(zc)
    return ComplexInterval(Interval.point(zc))
