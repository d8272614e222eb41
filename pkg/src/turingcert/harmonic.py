"""Problem data and rigorous Fourier-cosine analysis of the nonlocal kernel.

The model couples two scalar fields on the interval (0, length) with
homogeneous Neumann conditions.  In the cosine basis
``phi_j(x) = cos(pi j x / length)`` the linearization at the homogeneous
steady state is block-tridiagonal-free: mode j carries the 2x2 reaction
block shifted by the Laplacian eigenvalue, plus a nonlocal coupling whose
matrix elements are *separable*:

    B[i, j] = (|Omega| / |Omega1|) * F_i(ind_Omega1) * Ftilde_j(ind_Omega2)

where ``F_j(u) = (1/length) * integral u(x) cos(pi j x / length) dx`` is
evaluated in closed form (sin differences at the subdomain endpoints) and
``Ftilde_0 = F_0``, ``Ftilde_j = 2 F_j`` for j >= 1.  Everything here is
interval arithmetic end to end: subdomain endpoints are themselves
intervals (they are typically rational multiples of pi).

The decay bound ``|B[i, j]| <= C / (max(1,i)^q1 * max(1,j)^q2)`` with
q1 = q2 = 1 and an explicitly computed C is what the Gershgorin tail
estimates and the Newton-Kantorovich remainder bounds consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .interval import (
    PI,
    Interval,
    as_interval,
    imax,
    rigorous_sum,
    sin,
    where,
)

__all__ = [
    "ProblemInstance",
    "KernelBound",
    "default_instance",
    "measure",
    "laplacian_eigenvalue",
    "fourier_indicator_coeff",
    "b_coeff",
    "b_factors",
    "b_matrix",
    "b_constant",
]

Piece = tuple[Interval, Interval]


@dataclass(eq=False)
class ProblemInstance:
    """Reaction coefficients, diffusion ratio, domain and subdomains.

    ``omega1`` / ``omega2`` are unions of closed subintervals of
    (0, length); each endpoint is a (typically 1-ulp) scalar Interval.
    The construction enforces the standing assumptions that make the
    homogeneous state linearly stable without coupling at mode 0:
    trace a + d < 0 and determinant a*d - b*c > 0 (checked exactly).
    """

    a: float
    b: float
    c: float
    d: float
    vartheta: float = 1.0
    length: float = 2.0
    omega1: tuple[Piece, ...] = ()
    omega2: tuple[Piece, ...] = ()

    def __post_init__(self):
        fa, fb = Fraction(self.a), Fraction(self.b)
        fc, fd = Fraction(self.c), Fraction(self.d)
        if fa + fd >= 0:
            raise ValueError("requires trace a + d < 0")
        if fa * fd - fb * fc <= 0:
            raise ValueError("requires determinant a*d - b*c > 0")
        if self.vartheta <= 0:
            raise ValueError("requires positive diffusion ratio")
        if self.length <= 0:
            raise ValueError("requires positive domain length")
        self.omega1 = tuple((as_interval(s), as_interval(e))
                            for s, e in self.omega1)
        self.omega2 = tuple((as_interval(s), as_interval(e))
                            for s, e in self.omega2)
        for name, dom in (("omega1", self.omega1), ("omega2", self.omega2)):
            if not dom:
                raise ValueError(f"{name} must have at least one piece")
            for s, e in dom:
                if float(s.lo) < -1e-12 or float(e.hi) > self.length + 1e-12:
                    raise ValueError(f"{name} piece outside the domain")
                if float(e.lo) < float(s.hi):
                    raise ValueError(f"{name} piece with end before start")

    def to_json(self):
        return {
            "a": self.a, "b": self.b, "c": self.c, "d": self.d,
            "vartheta": self.vartheta, "length": self.length,
            "omega1": [[s.as_pair(), e.as_pair()] for s, e in self.omega1],
            "omega2": [[s.as_pair(), e.as_pair()] for s, e in self.omega2],
        }


@dataclass(eq=False)
class KernelBound:
    """Separable decay bound |B[i,j]| <= C / (max(1,i)^q1 max(1,j)^q2)."""

    q1: int
    q2: int
    C: Interval


def default_instance() -> ProblemInstance:
    """The worked configuration: a=-3, b=2, c=3, d=-3, vartheta=1,
    domain (0,2), omega1=(pi/4, pi/2), omega2=(pi/5, pi/2 + 1/4)."""
    quarter_pi = PI / 4.0
    half_pi = PI / 2.0
    fifth_pi = PI / 5.0
    return ProblemInstance(
        a=-3.0, b=2.0, c=3.0, d=-3.0,
        vartheta=1.0, length=2.0,
        omega1=((quarter_pi, half_pi),),
        omega2=((fifth_pi, half_pi + 0.25),),
    )


def measure(D: tuple[Piece, ...]) -> Interval:
    """Total length of a union of disjoint pieces."""
    return rigorous_sum([e - s for s, e in D])


def laplacian_eigenvalue(j, inst: ProblemInstance) -> Interval:
    """Neumann Laplacian eigenvalue lambda_j = (pi j / length)^2.

    ``j`` may be an int or an integer array; returns a matching Interval.
    """
    jj = np.asarray(j, dtype=np.float64)
    lam = (PI * Interval.point(jj) / inst.length).square()
    # keep lambda_0 = 0 exact (the widening ulp would otherwise leak into
    # the zeroth disk center)
    return where(jj == 0.0, Interval.point(np.zeros(jj.shape)), lam)


def fourier_indicator_coeff(D, j, inst: ProblemInstance) -> Interval:
    """F_j of the indicator of D: (1/length) * integral_D cos(pi j x / length).

    Closed form: for j >= 1,
        F_j = (1/(pi j)) * sum_pieces [sin(pi j e / length) - sin(pi j s / length)]
    and F_0 = |D| / length.  ``j`` may be an int or integer array.
    """
    jj = np.asarray(j, dtype=np.float64)
    if np.any(jj < 0) or np.any(jj != np.floor(jj)):
        raise ValueError("mode index must be a nonnegative integer")
    scalar_in = jj.ndim == 0
    jv = np.atleast_1d(jj)
    base = PI * Interval.point(jv) / inst.length  # pi j / length
    acc = Interval.zeros(jv.shape)
    for s, e in D:
        acc = acc + (sin(e * base) - sin(s * base))
    jv_safe = np.where(jv == 0.0, 1.0, jv)
    f_pos = acc / (PI * Interval.point(jv_safe))
    f_zero = measure(D) / inst.length
    out = where(jv == 0.0,
                Interval._raw(np.broadcast_to(f_zero.lo, jv.shape).copy(),
                              np.broadcast_to(f_zero.hi, jv.shape).copy()),
                f_pos)
    if scalar_in:
        return out[0]
    return out


def b_factors(inst: ProblemInstance, n: int) -> tuple[Interval, Interval]:
    """Separable factors g (length n) and h (length n) with B = outer(g, h):

        g_i = (length/|omega1|) * F_i(ind_omega1)
        h_j = Ftilde_j(ind_omega2)   (factor 2 for j >= 1)
    """
    idx = np.arange(n)
    f1 = fourier_indicator_coeff(inst.omega1, idx, inst)
    f2 = fourier_indicator_coeff(inst.omega2, idx, inst)
    g = f1 * (Interval.point(inst.length) / measure(inst.omega1))
    doubler = np.where(idx == 0, 1.0, 2.0)
    h = f2 * Interval.point(doubler)
    return g, h


def b_coeff(i: int, j: int, inst: ProblemInstance) -> Interval:
    """Single kernel matrix element B[i, j] (separable product form)."""
    f1 = fourier_indicator_coeff(inst.omega1, int(i), inst)
    f2 = fourier_indicator_coeff(inst.omega2, int(j), inst)
    g = f1 * (Interval.point(inst.length) / measure(inst.omega1))
    if int(j) >= 1:
        f2 = f2 * 2.0
    return g * f2


def b_matrix(inst: ProblemInstance, n: int) -> Interval:
    """Dense (n, n) interval table of kernel coefficients."""
    g, h = b_factors(inst, n)
    return g.reshape(n, 1) * h.reshape(1, n)


def b_constant(inst: ProblemInstance) -> KernelBound:
    """Decay constant: C = max of the four closed-form candidates

        8*I1*I2*|Omega| / (pi^2 |Omega1|),   4*I2 / pi,
        2*I1*|Omega2| / (|Omega1| pi),       |Omega2| / |Omega|

    (I1, I2 = numbers of pieces), valid with exponents q1 = q2 = 1.
    """
    i1 = float(len(inst.omega1))
    i2 = float(len(inst.omega2))
    m1 = measure(inst.omega1)
    m2 = measure(inst.omega2)
    el = Interval.point(inst.length)
    cands = [
        (8.0 * i1 * i2) * el / (PI.square() * m1),
        (4.0 * i2) / PI,
        (2.0 * i1) * m2 / (m1 * PI),
        m2 / el,
    ]
    C = cands[0]
    for cand in cands[1:]:
        C = imax(C, cand)
    return KernelBound(q1=1, q2=1, C=C)
