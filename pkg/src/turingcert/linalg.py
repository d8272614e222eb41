"""Verified dense linear algebra on interval matrices.

The workhorse is a midpoint-radius verified matrix product: the
round-to-nearest BLAS product of the midpoints plus a radius that accounts
for (i) the input radii, (ii) the accumulated rounding of the midpoint
product, and (iii) the rounding of the radius computation itself, using
the classical ``gamma_n`` factors.  This assumes the BLAS computes each
output entry as a reordered / possibly fused dot product (true of
reference BLAS, OpenBLAS and MKL dgemm; Strassen-type algorithms, which
form differences, would break the entrywise model).

``verified_inverse`` encloses the exact inverse of a floating-point
matrix around its numeric inverse V via the residual contraction
``||inv(p) - V|| <= ||V|| rho / (1 - rho)`` with ``rho = ||I - V p||_inf``
bounded rigorously.

``approx_eig`` is the one deliberately *non-rigorous* routine here: a
plain dense eigensolve used only to seed basis changes and Newton
iterations; every certified statement downstream re-derives its own
bounds.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotVerifiablyInvertible
from .interval import (
    ComplexInterval,
    Interval,
    as_complex_interval,
    as_interval,
    gamma_bound,
    sum_enclosure,
    _down,
    _nan_cleanup,
    _up,
)

__all__ = [
    "FloatMatrix",
    "IntervalMatrix",
    "interval_matmul",
    "interval_matvec",
    "verified_inverse",
    "approx_eig",
    "norm_inf_upper",
]

FloatMatrix = np.ndarray
"""Plain float64 2-d array (non-rigorous data)."""

IntervalMatrix = Interval
"""An Interval whose endpoint arrays are 2-d."""

_ETA = np.finfo(np.float64).tiny  # smallest positive normal


def _midrad(x: Interval) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint m in [lo, hi] and radius r with [lo, hi] in [m-r, m+r]."""
    m = 0.5 * (x.lo + x.hi)
    bad = ~np.isfinite(m)
    if np.any(bad):
        m = np.where(bad, 0.0, m)
    r = _up(np.maximum(x.hi - m, m - x.lo))
    r = np.where(np.isnan(r), np.inf, r)
    return m, r


def _rump_matmul_real(a: Interval, b: Interval) -> Interval:
    """Verified product of real interval matrices (midpoint-radius)."""
    ma, ra = _midrad(a)
    mb, rb = _midrad(b)
    k = ma.shape[-1]
    with np.errstate(all="ignore"):
        mc = ma @ mb
        abs_ma = np.abs(ma)
        abs_mb = np.abs(mb)
        g_dot = _up(gamma_bound(k + 2))
        rc = g_dot * (abs_ma @ abs_mb)
        has_ra = bool(np.any(ra != 0.0))
        has_rb = bool(np.any(rb != 0.0))
        if has_ra and has_rb:
            rc = rc + (abs_ma @ rb + ra @ (abs_mb + rb))
        elif has_rb:
            rc = rc + abs_ma @ rb
        elif has_ra:
            rc = rc + ra @ abs_mb
        rc = _up(rc * _up(1.0 + gamma_bound(k + 8)), 4) + (k + 4) * _ETA
        lo = _down(mc - rc)
        hi = _up(mc + rc)
    return Interval._raw(*_nan_cleanup(lo, hi))


def interval_matmul(a, b):
    """Verified matrix x matrix product; real or complex-rectangle operands.

    Accepts Interval / ComplexInterval / plain arrays (cast to point
    intervals).  Complex products are assembled from four real verified
    products via the rectangle identities.
    """
    a_cplx = isinstance(a, ComplexInterval) or (
        isinstance(a, np.ndarray) and np.iscomplexobj(a))
    b_cplx = isinstance(b, ComplexInterval) or (
        isinstance(b, np.ndarray) and np.iscomplexobj(b))
    if a_cplx or b_cplx:
        za = as_complex_interval(a)
        zb = as_complex_interval(b)
        _check_dims(za.re, zb.re)
        re = _rump_matmul_real(za.re, zb.re) - \
            _rump_matmul_real(za.im, zb.im)
        im = _rump_matmul_real(za.re, zb.im) + \
            _rump_matmul_real(za.im, zb.re)
        return ComplexInterval(re, im)
    ia = as_interval(a)
    ib = as_interval(b)
    _check_dims(ia, ib)
    return _rump_matmul_real(ia, ib)


def _check_dims(a: Interval, b: Interval):
    if a.lo.ndim != 2 or b.lo.ndim not in (1, 2):
        raise DimensionMismatch(
            f"matmul needs a 2-d left operand and 1-/2-d right operand, "
            f"got {a.lo.ndim}-d and {b.lo.ndim}-d")
    k_right = b.lo.shape[0]
    if a.lo.shape[1] != k_right:
        raise DimensionMismatch(
            f"inner dimensions differ: {a.lo.shape} x {b.lo.shape}")


def interval_matvec(a, x):
    """Verified matrix x vector product (returns a 1-d interval vector)."""
    if isinstance(x, ComplexInterval):
        col = ComplexInterval(x.re.reshape(-1, 1), x.im.reshape(-1, 1))
        out = interval_matmul(a, col)
        return ComplexInterval(out.re.reshape(-1), out.im.reshape(-1))
    xi = as_interval(x)
    out = interval_matmul(a, xi.reshape(-1, 1))
    return out.reshape(-1)


def norm_inf_upper(a) -> float:
    """Rigorous upper bound on the infinity (max row sum) norm."""
    if isinstance(a, ComplexInterval):
        row = sum_enclosure(a.abs_val(), axis=-1)
        return float(np.max(row.hi))
    ia = as_interval(a)
    row = sum_enclosure(ia.abs_val(), axis=-1)
    return float(np.max(row.hi))


def verified_inverse(p):
    """Interval enclosure of the exact inverse of a float matrix.

    Computes the numeric inverse V, bounds ``rho = ||I - V p||_inf`` with a
    verified product, and, if rho < 1, widens every entry of V uniformly by
    ``||V||_inf * rho / (1 - rho)`` (the Neumann-series bound on
    ``inv(p) - V``).  Raises NotVerifiablyInvertible when the contraction
    cannot be established (including numerically singular input).
    """
    p = np.asarray(p)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {p.shape}")
    n = p.shape[0]
    try:
        v = np.linalg.inv(p)
    except np.linalg.LinAlgError as exc:
        raise NotVerifiablyInvertible(
            "numeric inversion failed (singular to machine precision)"
        ) from exc
    if not np.all(np.isfinite(v)):
        raise NotVerifiablyInvertible("numeric inverse has non-finite entries")

    vp = interval_matmul(v, p)
    eye = np.eye(n)
    if isinstance(vp, ComplexInterval):
        resid = ComplexInterval(as_interval(eye) - vp.re, -vp.im)
        rho = norm_inf_upper(resid)
        norm_v_enc = norm_inf_upper(ComplexInterval.from_complex(v))
    else:
        resid = as_interval(eye) - vp
        rho = norm_inf_upper(resid)
        norm_v_enc = norm_inf_upper(Interval.point(v))

    if not (rho < 1.0):
        raise NotVerifiablyInvertible(
            f"residual norm {rho:.3e} is not a contraction")
    w = float(_up(_up(norm_v_enc * rho) / _down(1.0 - rho), 2))

    if np.iscomplexobj(v):
        re = Interval(_down(v.real - w), _up(v.real + w))
        im = Interval(_down(v.imag - w), _up(v.imag + w))
        return ComplexInterval(re, im)
    return Interval(_down(v - w), _up(v + w))


def approx_eig(m: FloatMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Numeric eigendecomposition sorted by descending real part.

    Returns ``(values, vectors)`` with ``vectors[:, i]`` the eigenvector
    of ``values[i]``.  Ordering ties break on the imaginary part so the
    output is deterministic; each eigenvector is rotated so its largest
    component is real and positive (stable seeds for Newton refinements).
    NON-RIGOROUS: consumers must re-verify anything they rely on.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"square matrix required, got {m.shape}")
    values, vectors = np.linalg.eig(m)
    order = np.lexsort((values.imag, -values.real))
    values = values[order]
    vectors = vectors[:, order]
    for i in range(vectors.shape[1]):
        col = vectors[:, i]
        j = int(np.argmax(np.abs(col)))
        piv = col[j]
        if np.abs(piv) > 0:
            col = col * (np.conj(piv) / np.abs(piv))
        nrm = np.linalg.norm(col)
        if nrm > 0:
            col = col / nrm
        vectors[:, i] = col
    return values, vectors
