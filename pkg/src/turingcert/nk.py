"""Validated enclosure of the leading eigenvalue and its coupling
derivative.

The leading eigenpair of the linearization solves

    F(lambda, u, v) = ( utilde . u + vtilde . v - 1,
                        (a - lambda) u_i - vartheta lam_i u_i + b v_i,
                        c u_i + delta (B u)_i + (d - lambda) v_i - lam_i v_i )

on C x l1_alpha x l1_alpha, where ``utilde, vtilde`` fix phase and scale.
A numeric eigenpair ``X_bar`` of the truncated problem plus an
approximate inverse ``A_N`` of the truncated derivative yield a
Newton-Kantorovich certificate: rigorous bounds

    Y  >= ||A F(X_bar)||         (residual),
    Z1 >= ||I - A DF(x)||        (contraction defect on the ball),
    Z2 >= curvature / tail operator norms,

imply a genuine zero of F within radius ``r_min`` of ``X_bar`` and no
other zero within ``r_max``.  The lambda component of the zero is the
eigenvalue; combined with the Gershgorin bound on the rest of the
spectrum it is *identified* as the eigenvalue with largest real part.

The derivative of the leading eigenvalue with respect to the coupling
strength is enclosed the same way: the exact derivative is a resolvent
row applied to the kernel image of the eigenfunction, approximated by
``-a2 . (B u)`` with ``a2`` the relevant row block of ``A_N``, and the
approximation error is bounded by a Neumann series argument.

All tail sums are controlled by two closed forms: ``bound_E`` (weighted
resolvent column sums past the truncation) and ``bound_R`` (the scalar
resolvent bound on truncated diagonal blocks).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ComplexLeadingEigenvalue,
    ContractionFails,
    NeumannSeriesDiverges,
    SingularDenominator,
    TruncationTooSmall,
)
from .harmonic import KernelBound, ProblemInstance, b_constant, b_factors, \
    laplacian_eigenvalue
from .interval import (
    Interval,
    as_interval,
    dot_enclosure,
    imax,
    pow_real,
    sum_enclosure,
)
from .linalg import interval_matmul, interval_matvec

__all__ = [
    "ApproxEigenData",
    "NkCertificate",
    "DerivEnclosure",
    "mode_weights",
    "l1_alpha_norm",
    "x_alpha_norm",
    "x_alpha_op_colnorms",
    "x_alpha_op_norm",
    "approx_eigendata",
    "residual_F",
    "truncated_derivative",
    "bound_E",
    "bound_R",
    "bound_Y",
    "bound_Z1",
    "bound_Z2",
    "nk_radii",
    "enclose_d0",
    "derivative_enclosure",
]

_IMAG_TOL = 1e-10


# ---------------------------------------------------------------------------
# weighted norms
# ---------------------------------------------------------------------------

def mode_weights(n: int, alpha: float) -> Interval:
    """Sequence-space weights (1, 2*1^alpha, 2*2^alpha, ..., 2*(n-1)^alpha)."""
    if n < 1:
        raise ValueError("need at least one mode")
    idx = np.arange(n, dtype=np.float64)
    w = 2.0 * pow_real(Interval.point(idx), float(alpha))
    return Interval(np.concatenate(([1.0], w.lo[1:])),
                    np.concatenate(([1.0], w.hi[1:])))


def l1_alpha_norm(v, alpha: float) -> Interval:
    """Weighted l1 norm |v_0| + 2 sum_{k>=1} |v_k| k^alpha of one component."""
    v = as_interval(v)
    return sum_enclosure(v.abs_val() * mode_weights(v.shape[0], alpha))


def _x_weights(n_modes: int, alpha: float) -> Interval:
    w = mode_weights(n_modes, alpha)
    return Interval(np.concatenate(([1.0], w.lo, w.lo)),
                    np.concatenate(([1.0], w.hi, w.hi)))


def x_alpha_norm(x, alpha: float) -> Interval:
    """Norm |x_0| + ||u||_alpha + ||v||_alpha of a (1 + 2N)-vector in the
    split ordering (eigenvalue slot, u modes, v modes)."""
    x = as_interval(x)
    n = x.shape[0]
    if n % 2 != 1:
        raise ValueError("split vector must have odd length 1 + 2N")
    return sum_enclosure(x.abs_val() * _x_weights((n - 1) // 2, alpha))


def _vec_max(iv: Interval) -> Interval:
    return Interval(float(np.max(iv.lo)), float(np.max(iv.hi)))


def x_alpha_op_colnorms(L, alpha: float) -> tuple[Interval, Interval, Interval]:
    """Weighted column norms of an operator on the split space, grouped:
    the eigenvalue column, the worst u column, the worst v column."""
    L = as_interval(L)
    n = L.shape[0]
    if L.shape != (n, n) or n % 2 != 1:
        raise ValueError("operator must be square with odd size 1 + 2N")
    n_modes = (n - 1) // 2
    w = _x_weights(n_modes, alpha)
    weighted = L.abs_val() * w.reshape(n, 1)
    col = sum_enclosure(weighted, axis=0) / w
    c0 = col[0]
    c1 = _vec_max(col[1:1 + n_modes])
    c2 = _vec_max(col[1 + n_modes:])
    return c0, c1, c2


def x_alpha_op_norm(L, alpha: float) -> Interval:
    c0, c1, c2 = x_alpha_op_colnorms(L, alpha)
    return imax(imax(c0, c1), c2)


# ---------------------------------------------------------------------------
# numeric eigendata
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class ApproxEigenData:
    """Numeric approximate leading eigenpair of the truncated problem,
    normalized so that utilde . u_bar + vtilde . v_bar = 1."""

    lambda_bar: float
    u_bar: np.ndarray
    v_bar: np.ndarray
    u_tilde: np.ndarray
    v_tilde: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.u_bar.shape[0]


def _dense_leading_pair(a, b, c, d, vartheta, lam, delta, g, h):
    """Leading eigenpair of the interleaved 2n x 2n float section."""
    n = lam.shape[0]
    m = np.zeros((2 * n, 2 * n))
    ev = np.arange(0, 2 * n, 2)
    od = ev + 1
    m[ev, ev] = -vartheta * lam + a
    m[od, od] = -lam + d
    m[ev, od] = b
    m[np.ix_(od, ev)] = delta * np.outer(g, h)
    m[od, ev] += c
    vals, vecs = np.linalg.eig(m)
    k = int(np.argmax(vals.real))
    lam0, vec = vals[k], vecs[:, k]
    if abs(lam0.imag) >= _IMAG_TOL * max(1.0, abs(lam0.real)):
        raise ComplexLeadingEigenvalue(
            f"numeric leading eigenvalue {lam0} is not real")
    piv = vec[np.argmax(np.abs(vec))]
    vec = (vec * np.conj(piv) / abs(piv)).real
    return float(lam0.real), vec[0::2].copy(), vec[1::2].copy()


def approx_eigendata(inst: ProblemInstance, delta_mid: float, N: int,
                     n_eig: int = 600,
                     newton_steps: int = 80) -> ApproxEigenData:
    """Numeric approximate leading eigenpair of the N-mode truncation.

    The separable coupling makes the spectrum secular: eigenvalues of the
    coupled problem solve ``sum_i t_i / D_i(lambda) = 1`` with
    ``t_i = delta b g_i h_i`` and ``D_i`` the mode-i block determinant.
    A dense eigensolve of a smaller section seeds Newton iteration on the
    full secular function; the eigenvector then comes in closed form.
    Falls back to the zero-padded dense pair if Newton stalls.
    """
    if N < 2:
        raise ValueError("need at least two modes")
    lam = (np.pi * np.arange(N) / inst.length) ** 2
    gi, hi = b_factors(inst, N)
    g = gi.mid()
    h = hi.mid()
    a, b, c, d = inst.a, inst.b, inst.c, inst.d
    vt = inst.vartheta

    t = delta_mid * b * g * h
    if np.max(np.abs(t)) == 0.0:
        # decoupled: the leading eigenvalue is the mode-0 block's
        disc = ((a - d) / 2.0) ** 2 + b * c
        if disc < 0.0:
            raise ComplexLeadingEigenvalue(
                "decoupled mode-0 block has a complex leading pair")
        lam0 = (a + d) / 2.0 + np.sqrt(disc)
        u = np.zeros(N)
        v = np.zeros(N)
        u[0] = 1.0
        v[0] = (lam0 - a) / b
    else:
        n_seed = min(N, n_eig)
        lam0, _, _ = _dense_leading_pair(
            a, b, c, d, vt, lam[:n_seed], delta_mid, g[:n_seed], h[:n_seed])

        def secular(x):
            du = x + vt * lam - a
            dv = x + lam - d
            dd = du * dv - b * c
            f = np.sum(t / dd) - 1.0
            df = -np.sum(t * (du + dv) / dd ** 2)
            return f, df

        x = lam0
        converged = False
        for _ in range(newton_steps):
            f, df = secular(x)
            if df == 0.0 or not np.isfinite(f):
                break
            step = f / df
            x -= step
            if abs(f) < 1e-14 and abs(step) < 1e-13 * max(1.0, abs(x)):
                converged = True
                break
        if converged or abs(secular(x)[0]) < 1e-9:
            lam0 = x
            dd = (lam0 + vt * lam - a) * (lam0 + lam - d) - b * c
            u = delta_mid * b * g / dd
            v = (lam0 + vt * lam - a) * u / b
        else:
            # zero-padded dense fallback
            lam0, u_s, v_s = _dense_leading_pair(
                a, b, c, d, vt, lam[:n_seed], delta_mid,
                g[:n_seed], h[:n_seed])
            u = np.zeros(N)
            v = np.zeros(N)
            u[:n_seed] = u_s
            v[:n_seed] = v_s

    s2 = float(np.sqrt(np.sum(u * u) + np.sum(v * v)))
    u = u / s2
    v = v / s2
    return ApproxEigenData(lambda_bar=float(lam0), u_bar=u, v_bar=v,
                           u_tilde=u.copy(), v_tilde=v.copy())


# ---------------------------------------------------------------------------
# residual and truncated derivative
# ---------------------------------------------------------------------------

def _kernel_image(data: ApproxEigenData, inst: ProblemInstance) -> Interval:
    """Interval enclosure of (B u_bar)_i over the truncated modes; the
    kernel is separable, so B u = g (h . u)."""
    n = data.n_modes
    g, h = b_factors(inst, n)
    s = dot_enclosure(h, Interval.point(data.u_bar))
    return g * s


def residual_F(data: ApproxEigenData, delta, inst: ProblemInstance) -> Interval:
    """Interval enclosure of the truncated map at the numeric eigenpair,
    split ordering (normalization slot, u rows, v rows)."""
    delta = as_interval(delta)
    n = data.n_modes
    lam = laplacian_eigenvalue(np.arange(n), inst)
    lam_bar = Interval.point(np.float64(data.lambda_bar))
    ub = Interval.point(data.u_bar)
    vb = Interval.point(data.v_bar)

    r0 = dot_enclosure(Interval.point(data.u_tilde), ub) + \
        dot_enclosure(Interval.point(data.v_tilde), vb) - 1.0
    ru = (Interval.point(inst.a) - lam_bar - inst.vartheta * lam) * ub + \
        Interval.point(inst.b) * vb
    rv = Interval.point(inst.c) * ub + delta * _kernel_image(data, inst) + \
        (Interval.point(inst.d) - lam_bar - lam) * vb

    lo = np.concatenate(([r0.lo], ru.lo, rv.lo))
    hi = np.concatenate(([r0.hi], ru.hi, rv.hi))
    return Interval(lo, hi)


def truncated_derivative(data: ApproxEigenData, delta,
                         inst: ProblemInstance) -> Interval:
    """Interval enclosure of the truncated derivative DF at the numeric
    eigenpair:

        [ 0        utilde^T            vtilde^T          ]
        [ -u_bar   diag(a-lb-vt*lam)   b I               ]
        [ -v_bar   c I + delta B       diag(d-lb-lam)    ]
    """
    delta = as_interval(delta)
    n = data.n_modes
    size = 1 + 2 * n
    lam = laplacian_eigenvalue(np.arange(n), inst)
    lam_bar = Interval.point(np.float64(data.lambda_bar))
    du = Interval.point(inst.a) - lam_bar - inst.vartheta * lam
    dv = Interval.point(inst.d) - lam_bar - lam
    g, h = b_factors(inst, n)
    coupling = Interval.point(inst.c) * Interval.point(np.eye(n)) + \
        delta * (g.reshape(n, 1) * h.reshape(1, n))

    lo = np.zeros((size, size))
    hi = np.zeros((size, size))
    rows = np.arange(n)

    lo[0, 1:1 + n] = data.u_tilde
    hi[0, 1:1 + n] = data.u_tilde
    lo[0, 1 + n:] = data.v_tilde
    hi[0, 1 + n:] = data.v_tilde

    lo[1 + rows, 0] = -data.u_bar
    hi[1 + rows, 0] = -data.u_bar
    lo[1 + rows, 1 + rows] = du.lo
    hi[1 + rows, 1 + rows] = du.hi
    lo[1 + rows, 1 + n + rows] = inst.b
    hi[1 + rows, 1 + n + rows] = inst.b

    lo[1 + n + rows, 0] = -data.v_bar
    hi[1 + n + rows, 0] = -data.v_bar
    lo[np.ix_(1 + n + rows, 1 + rows)] = coupling.lo
    hi[np.ix_(1 + n + rows, 1 + rows)] = coupling.hi
    lo[1 + n + rows, 1 + n + rows] = dv.lo
    hi[1 + n + rows, 1 + n + rows] = dv.hi
    return Interval(lo, hi)


# ---------------------------------------------------------------------------
# tail bounds
# ---------------------------------------------------------------------------

def bound_E(alpha: float, N: int, lambda_bar, inst: ProblemInstance,
            kb: KernelBound) -> Interval:
    """Closed-form bound on the weighted resolvent tail

        sum_{i >= N} i^alpha / (|d - lambda_bar| + lam_i)-type columns:

        E = (l/pi)^2 (N - 1 - nu)^(alpha - (1+q1)) / ((1+q1) - alpha)

    with nu = (l/pi) sqrt(max(0, d - lambda_bar)).  Requires
    0 <= alpha < 1 + q1 and a truncation deep enough that the shifted
    index stays positive (TruncationTooSmall otherwise).
    """
    q1 = kb.q1
    if not (0.0 <= alpha < 1.0 + q1):
        raise ValueError(
            f"weight exponent alpha={alpha} outside [0, 1+q1) breaks the "
            f"tail column sums")
    from .interval import PI

    lam_bar = as_interval(lambda_bar)
    lop = Interval.point(inst.length) / PI
    shift = Interval.point(inst.d) - lam_bar
    margin = lop * (shift.abs_val().sqrt())
    if not (float(margin.hi) < N - 1):
        raise TruncationTooSmall(
            f"truncation N={N} too shallow for the eigenvalue shift "
            f"(needs N > 1 + {float(margin.hi):.3f})")
    nu_base = imax(Interval.point(np.float64(0.0)), shift)
    nu = lop * nu_base.sqrt()
    base = Interval.point(np.float64(N - 1.0)) - nu
    return lop.square() * pow_real(base, alpha - (1.0 + q1)) / \
        ((1.0 + q1) - alpha)


def bound_R(theta: float, x: float, N: int, lambda_bar,
            inst: ProblemInstance) -> Interval:
    """Scalar resolvent bound sup_{i >= N} 1 / |{-theta lam_i + x -
    lambda_bar}|, valid when the denominator is provably negative at
    i = N (it only decreases beyond); SingularDenominator otherwise."""
    lam_bar = as_interval(lambda_bar)
    lam_n = laplacian_eigenvalue(N, inst)
    den = Interval.point(-theta) * lam_n + (Interval.point(x) - lam_bar)
    if not (float(den.hi) < 0.0):
        raise SingularDenominator(
            f"truncated diagonal block at mode {N} may vanish "
            f"(denominator {den.as_pair()})")
    return 1.0 / den.abs_val()


def _chi(n: int, q: int) -> Interval:
    """Decay comparison vector (1, 1, 1/2^q, ..., 1/(n-1)^q)."""
    idx = np.arange(n, dtype=np.float64)
    return 1.0 / imax(Interval.point(np.ones(n)),
                      pow_real(Interval.point(idx), float(q)))


# ---------------------------------------------------------------------------
# the three Kantorovich bounds
# ---------------------------------------------------------------------------

def bound_Y(data: ApproxEigenData, delta, A_N, inst: ProblemInstance,
            kb: KernelBound, alpha: float) -> Interval:
    """Residual bound: ||A_N F(X_bar)||_alpha plus the tail rows of F,
    which only see the kernel image of u_bar."""
    delta = as_interval(delta)
    n = data.n_modes
    res = residual_F(data, delta, inst)
    head = x_alpha_norm(interval_matvec(A_N, res), alpha)
    e = bound_E(alpha, n, data.lambda_bar, inst, kb)
    decay = dot_enclosure(Interval.point(np.abs(data.u_bar)), _chi(n, kb.q2))
    tail = 2.0 * kb.C * delta.abs_val() * e * decay
    return head + tail


def _a_blocks(A_N: Interval, n: int):
    a2 = A_N[0, 1 + n:]
    a12 = A_N[1:1 + n, 1 + n:]
    a22 = A_N[1 + n:, 1 + n:]
    return a2, a12, a22


def bound_Z1(data: ApproxEigenData, delta, A_N, inst: ProblemInstance,
             kb: KernelBound, alpha: float, DF: Interval | None = None) -> Interval:
    """Contraction defect: the finite block ||I - A_N DF_N|| plus closed
    forms for every way the infinite problem leaks around the truncation
    (tail columns hit by A_N's kernel rows, truncated resolvent rows)."""
    delta = as_interval(delta)
    n = data.n_modes
    size = 1 + 2 * n
    if DF is None:
        DF = truncated_derivative(data, delta, inst)
    gap = Interval.point(np.eye(size)) - interval_matmul(A_N, DF)
    e = bound_E(alpha, n, data.lambda_bar, inst, kb)
    cd = kb.C * delta.abs_val()
    z1a = x_alpha_op_norm(gap, alpha) + 2.0 * cd * e

    a2, a12, a22 = _a_blocks(as_interval(A_N), n)
    chi1 = _chi(n, kb.q1)
    block = dot_enclosure(a2.abs_val(), chi1) + \
        l1_alpha_norm(interval_matvec(a12.abs_val(), chi1), alpha) + \
        l1_alpha_norm(interval_matvec(a22.abs_val(), chi1), alpha)
    npow = pow_real(Interval.point(np.float64(n)), alpha + kb.q2)
    z1b = cd / (2.0 * npow) * block + \
        abs(inst.c) * bound_R(1.0, inst.d, n, data.lambda_bar, inst) + \
        (cd / npow) * e

    z1c = abs(inst.b) * bound_R(inst.vartheta, inst.a, n,
                                data.lambda_bar, inst)
    return imax(imax(z1a, z1b), z1c)


def bound_Z2(A_N, lambda_bar, N: int, inst: ProblemInstance,
             alpha: float) -> Interval:
    """Curvature/operator bound: the norm of A_N itself and the two
    truncated resolvent bounds (the second derivative of F is the
    constant coupling tensor, so this is all that is needed)."""
    op = x_alpha_op_norm(as_interval(A_N), alpha)
    ru = bound_R(inst.vartheta, inst.a, N, lambda_bar, inst)
    rv = bound_R(1.0, inst.d, N, lambda_bar, inst)
    return imax(op, imax(ru, rv))


def nk_radii(Y: Interval, Z1: Interval, Z2: Interval,
             strict_discriminant: bool = False) -> tuple[Interval, Interval]:
    """Solve the Kantorovich quadratic Y - (1 - Z1) r + (Z2/2) r^2 <= 0.

    Returns (r_min, r_max): a zero of F exists within r_min of the
    numeric pair and is unique within any radius below r_max.  The
    radicand is (1-Z1)^2 - 2 Z2 Y; ``strict_discriminant`` tightens it to
    the classical (1-Z1)^2 - 4 Z2 Y sufficient condition instead.
    Raises ContractionFails when the certificate does not close.
    """
    if not (float(Z1.hi) < 1.0):
        raise ContractionFails(
            f"derivative defect Z1 = {Z1.as_pair()} reaches 1")
    if float(Y.hi) < 0.0 or float(Z2.hi) <= 0.0:
        raise ContractionFails("negative residual or curvature bound")
    # the exact Y and Z2 are norms; a summation error term can push the
    # computed lower ends microscopically below zero, so clamp them
    Y = Interval(max(0.0, float(Y.lo)), Y.hi)
    Z2 = Interval(max(0.0, float(Z2.lo)), Z2.hi)
    one_minus = 1.0 - Z1
    factor = 4.0 if strict_discriminant else 2.0
    disc = one_minus.square() - factor * Z2 * Y
    if not (float(disc.lo) >= 0.0):
        raise ContractionFails(
            f"residual too large: discriminant {disc.as_pair()} may be "
            f"negative")
    r_min = 2.0 * Y / (one_minus + disc.sqrt())
    r_max = one_minus / Z2
    if not (float(r_min.hi) <= float(r_max.lo)):
        raise ContractionFails(
            f"existence radius {r_min.as_pair()} does not fit below the "
            f"uniqueness radius {r_max.as_pair()}")
    return r_min, r_max


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class NkCertificate:
    """Validated enclosure of the leading eigenvalue on one coupling cell.

    ``identified_as_d0`` records that the enclosure lies strictly above
    the certified bound on the rest of the spectrum, so the validated
    eigenvalue is the one in the leading Gershgorin disk; combined with
    that disk's separation it *is* the spectral bound d0.
    """

    delta: Interval
    alpha: float
    N: int
    Y: Interval
    Z1: Interval
    Z2: Interval
    r_min: Interval
    r_max: Interval
    d0_enclosure: Interval
    identified_as_d0: bool
    eigendata: ApproxEigenData = field(repr=False, default=None)
    A_N: Interval = field(repr=False, default=None)

    def to_json(self):
        return {
            "delta": self.delta.as_pair(),
            "alpha": self.alpha,
            "N": self.N,
            "Y": self.Y.as_pair(),
            "Z1": self.Z1.as_pair(),
            "Z2": self.Z2.as_pair(),
            "r_min": self.r_min.as_pair(),
            "r_max": self.r_max.as_pair(),
            "d0": self.d0_enclosure.as_pair(),
            "identified_as_d0": self.identified_as_d0,
        }


@dataclass(eq=False)
class DerivEnclosure:
    """Enclosure of the coupling derivative of the leading eigenvalue."""

    app: Interval
    err: Interval
    range: Interval

    def to_json(self):
        return {
            "app": self.app.as_pair(),
            "err": self.err.as_pair(),
            "range": self.range.as_pair(),
        }


def enclose_d0(inst: ProblemInstance, delta, N: int, alpha: float,
               mu_from_gershgorin: Interval | None = None,
               strict_discriminant: bool = False,
               n_eig: int = 600) -> NkCertificate:
    """Run the full Newton-Kantorovich pipeline on one coupling cell.

    Numeric eigendata at the cell midpoint, an approximate inverse of
    the truncated derivative, then Y/Z1/Z2 and the radii.  The leading
    eigenvalue of the full problem lies in ``lambda_bar +/- r_min`` for
    every coupling value in the cell.  When a Gershgorin bound ``mu`` on
    the rest of the spectrum is supplied and the enclosure clears it,
    the eigenvalue is flagged as identified.
    """
    delta = as_interval(delta)
    kb = b_constant(inst)
    data = approx_eigendata(inst, float(delta.mid()), N, n_eig=n_eig)

    df = truncated_derivative(data, delta, inst)
    try:
        a_float = np.linalg.inv(df.mid())
    except np.linalg.LinAlgError as exc:
        raise ContractionFails(
            "truncated derivative is numerically singular") from exc
    a_n = Interval.point(a_float)

    y = bound_Y(data, delta, a_n, inst, kb, alpha)
    z1 = bound_Z1(data, delta, a_n, inst, kb, alpha, DF=df)
    z2 = bound_Z2(a_n, data.lambda_bar, N, inst, alpha)
    r_min, r_max = nk_radii(y, z1, z2, strict_discriminant)

    rad = float(r_min.hi)
    d0 = Interval.point(np.float64(data.lambda_bar)) + Interval(-rad, rad)
    identified = mu_from_gershgorin is not None and \
        float(d0.lo) > float(mu_from_gershgorin.hi)
    return NkCertificate(
        delta=delta, alpha=alpha, N=N, Y=y, Z1=z1, Z2=z2,
        r_min=r_min, r_max=r_max, d0_enclosure=d0,
        identified_as_d0=identified, eigendata=data, A_N=a_n)


def derivative_enclosure(cert: NkCertificate, data: ApproxEigenData,
                         A_N, inst: ProblemInstance,
                         kb: KernelBound) -> DerivEnclosure:
    """Enclose d/d(delta) of the validated leading eigenvalue.

    The exact derivative is the eigenvalue row of the exact inverse
    applied to the delta-direction of F, which only sees the kernel
    image of the exact eigenfunction.  The numeric value is
    ``-a2 . (B u_bar)``; the error combines the kernel's column decay,
    the tail bound E, and a Neumann series controlling how far A_N is
    from the exact inverse on the certified ball.
    """
    delta = cert.delta
    alpha = cert.alpha
    n = data.n_modes
    a_n = as_interval(A_N)
    a2, a12, a22 = _a_blocks(a_n, n)

    blow = cert.Z1 + cert.Z2 * cert.r_min
    if not (float(blow.hi) < 1.0):
        raise NeumannSeriesDiverges(
            f"Z1 + Z2 r_min = {blow.as_pair()} reaches 1")

    w = _kernel_image(data, inst)
    app = -dot_enclosure(a2, w)

    e = bound_E(alpha, n, data.lambda_bar, inst, kb)
    chi1 = _chi(n, kb.q1)
    col_block = dot_enclosure(a2.abs_val(), chi1) + \
        l1_alpha_norm(interval_matvec(a12.abs_val(), chi1), alpha) + \
        l1_alpha_norm(interval_matvec(a22.abs_val(), chi1), alpha)
    image_block = app.abs_val() + \
        l1_alpha_norm(interval_matvec(a12, w), alpha) + \
        l1_alpha_norm(interval_matvec(a22, w), alpha)
    decay = dot_enclosure(Interval.point(np.abs(data.u_bar)),
                          _chi(n, kb.q2))

    err = (kb.C * (col_block + 2.0 * e) * cert.r_min +
           2.0 * kb.C * e * decay +
           blow * image_block) / (1.0 - blow)
    half = float(err.hi)
    rng = app + Interval(-half, half)
    return DerivEnclosure(app=app, err=err, range=rng)
