"""Certified Gershgorin enclosure of the full linearization spectrum.

In the cosine basis the linearization at coupling strength delta is an
infinite matrix with 2x2 reaction blocks on the mode diagonal and the
separable nonlocal kernel coupling v-rows to u-columns.  Two basis
changes make its Gershgorin disks informative:

1. a diagonal *scaling* by ``f(i) = max(1, i^p)`` on mode i (row times
   f(row mode), column times 1/f(column mode)), which crushes the kernel
   column tails so the off-diagonal mass of high modes is summable;
2. an *approximate diagonalizer* P of the scaled truncated matrix
   (numeric eigenvectors; nothing rigorous assumed about it), which
   shrinks the finite-section off-diagonal mass to numerical noise.

Everything after the numeric eigensolve is interval arithmetic: the
similarity sandwich uses verified products and a verified inverse of P,
the finite-row radii add an explicit bound on the coupling to the
truncated tail, and the tail rows are covered by closed-form disks whose
worst top ``m_bar`` is maximized rigorously over the (provably unimodal)
tail index.

The classification of a coupling cell is then:

* ``Stable``       -- every disk top is negative;
* ``UnstableOne``  -- the leading disk lies strictly in the right half
  plane and every other disk top is negative (exactly one eigenvalue,
  counted with multiplicity, has positive real part);
* ``Undetermined`` -- anything else (including any verification failure,
  which degrades the certificate rather than raising).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotVerifiablyInvertible
from .harmonic import (
    KernelBound,
    ProblemInstance,
    b_constant,
    b_factors,
    laplacian_eigenvalue,
)
from .interval import (
    PI,
    ComplexInterval,
    Interval,
    as_interval,
    imax,
    pow_real,
    sum_enclosure,
)
from .linalg import approx_eig, interval_matmul, interval_matvec, \
    verified_inverse

__all__ = [
    "ScalingBasis",
    "DiagonalizerBasis",
    "GershgorinDisk",
    "SpectrumCertificate",
    "build_truncated_M",
    "build_diagonalizer",
    "build_frak_block",
    "radius_finite",
    "radii_finite",
    "rho_Np",
    "m_bar",
    "classify_cell",
    "tail_threshold_qbasis",
]

_TAIL_CANDIDATE_CAP = 4096
_TAIL_SCAN_CAP = 1 << 20


@dataclass(eq=False)
class ScalingBasis:
    """Diagonal scaling by f(i) = max(1, i^p) on mode i."""

    p: float

    def __post_init__(self):
        if not (self.p > 0):
            raise ValueError("scaling exponent p must be positive")

    def weights(self, n: int) -> Interval:
        """Interval vector (f(0), ..., f(n-1))."""
        idx = np.arange(n, dtype=np.float64)
        return imax(Interval.point(np.ones(n)),
                    pow_real(Interval.point(idx), self.p))


@dataclass(eq=False)
class DiagonalizerBasis:
    """Numeric diagonalizer P of the scaled truncated matrix, with a
    verified enclosure of its exact inverse."""

    N: int
    P_N: np.ndarray
    P_N_inv: object  # Interval or ComplexInterval enclosure of inv(P_N)


@dataclass(eq=False)
class GershgorinDisk:
    center: ComplexInterval
    radius_bound: Interval


@dataclass(eq=False)
class SpectrumCertificate:
    delta: Interval
    N: int
    p: float
    disks: list[GershgorinDisk] = field(repr=False)
    m_bar: Interval
    mu: Interval
    classification: str
    first_disk_bounds: Interval

    def to_json(self):
        d0 = self.disks[0] if self.disks else None
        return {
            "delta": self.delta.as_pair(),
            "N": self.N,
            "p": self.p,
            "mu": self.mu.as_pair(),
            "m_bar": self.m_bar.as_pair(),
            "disk0": None if d0 is None else {
                "center_re": d0.center.re.as_pair(),
                "radius": d0.radius_bound.as_pair(),
            },
            "classification": self.classification,
        }


def _require_summable(p: float, q2: int):
    if not (p + q2 > 1.0):
        raise ValueError(
            f"scaling exponent p={p} with kernel decay q2={q2} leaves the "
            f"column tails non-summable (needs p + q2 > 1)")


def _tail_sum_coeff(p: float, q2: int, n: int) -> Interval:
    """Enclosure of 1 / ((p + q2 - 1) (n-1)^(p + q2 - 1)), the closed-form
    bound on sum_{j >= n} 1 / (f(j) j^q2)."""
    s = p + q2 - 1.0
    denom = Interval.point(s) * pow_real(Interval.point(float(n - 1)), s)
    return 1.0 / denom


# --------------------------------------------------------------------------
# matrix assembly
# --------------------------------------------------------------------------

def build_truncated_M(inst: ProblemInstance, delta, N: int) -> Interval:
    """Finite section (modes 0..N-1) of the linearization, interleaved
    layout: row 2i is the u-equation of mode i, row 2i+1 the v-equation.

    Entries: block diagonal ``[[-vartheta*lam_i + a, b], [c, -lam_i + d]]``
    plus ``delta * B[i, j]`` at (2i+1, 2j) for all i, j.
    """
    if N < 2:
        raise ValueError("truncation N must be at least 2")
    delta = as_interval(delta)
    lam = laplacian_eigenvalue(np.arange(N), inst)
    g, h = b_factors(inst, N)
    dB = delta * (g.reshape(N, 1) * h.reshape(1, N))

    n2 = 2 * N
    lo = np.zeros((n2, n2))
    hi = np.zeros((n2, n2))
    ev = np.arange(0, n2, 2)
    od = ev + 1

    diag_u = Interval.point(-inst.vartheta) * lam + inst.a
    diag_v = -lam + Interval.point(inst.d)
    lo[ev, ev] = diag_u.lo
    hi[ev, ev] = diag_u.hi
    lo[od, od] = diag_v.lo
    hi[od, od] = diag_v.hi
    lo[ev, od] = inst.b
    hi[ev, od] = inst.b
    lo[np.ix_(od, ev)] = dB.lo
    hi[np.ix_(od, ev)] = dB.hi
    lo[od, ev] += inst.c
    hi[od, ev] += inst.c
    return Interval(lo, hi)


def _apply_scaling(m: Interval, basis: ScalingBasis, N: int) -> Interval:
    f = basis.weights(N)
    fr = Interval._raw(np.repeat(f.lo, 2), np.repeat(f.hi, 2))
    ratio = fr.reshape(-1, 1) * (1.0 / fr).reshape(1, -1)
    return m * ratio


def build_diagonalizer(inst: ProblemInstance, delta, N: int,
                       basis: ScalingBasis) -> DiagonalizerBasis:
    """Numeric eigenvector basis of the scaled truncated matrix (midpoint),
    columns sorted by descending real part of the eigenvalue, with a
    verified inverse enclosure.  Falls back to a complex P only when the
    numeric spectrum is genuinely complex."""
    m = build_truncated_M(inst, delta, N)
    scaled = _apply_scaling(m, basis, N)
    mid = scaled.mid()
    _, vecs = approx_eig(mid)
    if np.max(np.abs(vecs.imag)) <= 1e-9 * max(1.0, np.max(np.abs(vecs.real))):
        p_mat = np.ascontiguousarray(vecs.real)
    else:
        p_mat = vecs
    p_inv = verified_inverse(p_mat)
    return DiagonalizerBasis(N=N, P_N=p_mat, P_N_inv=p_inv)


def build_frak_block(inst: ProblemInstance, delta, basis: ScalingBasis,
                     diag: DiagonalizerBasis):
    """Verified similarity sandwich: inv(P) (scaled section) P.

    Returns an Interval matrix (or ComplexInterval if P is complex); its
    diagonal gives the finite disk centers, its off-diagonal rows the
    numerically-small part of the radii.
    """
    m = build_truncated_M(inst, delta, diag.N)
    scaled = _apply_scaling(m, basis, diag.N)
    left = interval_matmul(diag.P_N_inv, scaled)
    return interval_matmul(left, diag.P_N)


# --------------------------------------------------------------------------
# finite-row radii
# --------------------------------------------------------------------------

def radii_finite(frak, diag: DiagonalizerBasis, delta, p: float,
                 kb: KernelBound) -> Interval:
    """All 2N finite-row radii at once:

        R_r = C|delta| * tail_coeff(N) * sum_k |invP[r, 2k+1]| w_k
              + sum_{c != r} |frak[r, c]|

    with ``w_k = f(k) / max(1, k^q1)`` (the tail term bounds the coupling
    of finite rows into the truncated columns j >= N)."""
    N = diag.N
    _require_summable(p, kb.q2)
    delta = as_interval(delta)
    basis = ScalingBasis(p)

    fa = frak.abs_val() if isinstance(frak, ComplexInterval) \
        else as_interval(frak).abs_val()
    off_lo = fa.lo.copy()
    off_hi = fa.hi.copy()
    np.fill_diagonal(off_lo, 0.0)
    np.fill_diagonal(off_hi, 0.0)
    off_sum = sum_enclosure(Interval._raw(off_lo, off_hi), axis=1)

    idx = np.arange(N, dtype=np.float64)
    denom = imax(Interval.point(np.ones(N)),
                 pow_real(Interval.point(idx), float(kb.q1)))
    w = basis.weights(N) / denom

    abs_pinv = diag.P_N_inv.abs_val()
    odd_cols = abs_pinv[:, 1::2]
    row_term = interval_matvec(odd_cols, w)

    coeff = kb.C * delta.abs_val() * _tail_sum_coeff(p, kb.q2, N)
    return coeff * row_term + off_sum


def radius_finite(i: int, eps: int, frak, diag: DiagonalizerBasis, delta,
                  p: float, kb: KernelBound) -> Interval:
    """Single finite-row radius R_{2i+eps} (row index 2*i + eps)."""
    if eps not in (0, 1):
        raise ValueError("eps must be 0 or 1")
    r = 2 * i + eps
    if not (0 <= r < 2 * diag.N):
        raise ValueError(f"row index {r} outside the finite section")
    return radii_finite(frak, diag, delta, p, kb)[r]


# --------------------------------------------------------------------------
# tail disks
# --------------------------------------------------------------------------

def rho_Np(diag: DiagonalizerBasis, p: float, q2: int) -> Interval:
    """Kernel-column weight of the diagonalizer:

        rho = sum_{k<N} (sum_j |P[2k, 2j]| + |P[2k, 2j+1]|)
                          / (f(k) max(1, k^q2))
              + tail_coeff(N)

    This is what multiplies C|delta| i^{p-q1} in the odd tail-row radii:
    tail v-rows couple into the u-components (even original rows of P)
    of the finite section, plus directly into the truncated tail."""
    _require_summable(p, q2)
    N = diag.N
    p_mat = diag.P_N
    abs_p = np.abs(p_mat)
    even_rows = Interval.point(abs_p[0::2, :])
    row_sums = sum_enclosure(even_rows, axis=1)

    idx = np.arange(N, dtype=np.float64)
    f = ScalingBasis(p).weights(N)
    kq = imax(Interval.point(np.ones(N)),
              pow_real(Interval.point(idx), float(q2)))
    contrib = row_sums / (f * kq)
    return sum_enclosure(contrib) + _tail_sum_coeff(p, q2, N)


def _odd_tail_top(inst: ProblemInstance, i_vals: np.ndarray, K: Interval,
                  p: float, q1: int) -> Interval:
    """Disk top of odd tail rows at modes i: -lam_i + d + |c| + K i^(p-q1)."""
    lam = laplacian_eigenvalue(i_vals, inst)
    growth = pow_real(Interval.point(i_vals.astype(np.float64)), p - q1)
    return -lam + (inst.d + abs(inst.c)) + K * growth


def m_bar(inst: ProblemInstance, delta, N: int, p: float,
          rho: Interval) -> Interval:
    """Enclosure of the supremum over all tail disks (modes i >= N) of
    center + radius:

    * even rows: -vartheta lam_i + a + |b|, decreasing, max at i = N;
    * odd rows:  -lam_i + d + |c| + C|delta| rho i^(p-q1), unimodal in i
      with the single critical point abar, so the integer maximum is
      attained at N or at an integer adjacent to abar.

    For p >= q1 + 2 the odd growth term wins and the bound is +inf
    (degrading the classification), except at p = q1 + 2 with
    C|delta| rho provably below (pi/length)^2.
    """
    kb = b_constant(inst)
    q1 = kb.q1
    _require_summable(p, kb.q2)
    delta = as_interval(delta)
    K = kb.C * delta.abs_val() * rho

    lam_n = laplacian_eigenvalue(N, inst)
    even_top = Interval.point(-inst.vartheta) * lam_n + \
        (inst.a + abs(inst.b))

    kappa = (PI / inst.length).square()

    if p > q1 + 2:
        odd_top = Interval(
            float(_odd_tail_top(inst, np.asarray(N), K, p, q1).lo), np.inf)
    elif p == q1 + 2:
        at_n = _odd_tail_top(inst, np.asarray(N), K, p, q1)
        if float(K.hi) <= float(kappa.lo):
            odd_top = at_n
        else:
            odd_top = Interval(float(at_n.lo), np.inf)
    elif p <= q1:
        odd_top = _odd_tail_top(inst, np.asarray(N), K, p, q1)
    else:
        # unimodal with critical point abar = (K (p - q1) l^2 / (2 pi^2))
        # ** (1 / (2 + q1 - p))
        cands = {N}
        if float(K.hi) > 0.0:
            base = K * float(p - q1) * float(inst.length) ** 2 / \
                (2.0 * PI.square())
            base = Interval(max(0.0, float(base.lo)), float(base.hi))
            abar = pow_real(base, 1.0 / (2.0 + q1 - p))
            lo_i = max(N, int(np.floor(float(abar.lo))) - 1)
            hi_i = int(np.ceil(float(abar.hi))) + 1
            if hi_i >= N:
                hi_i = max(hi_i, lo_i)
                if hi_i - lo_i > _TAIL_CANDIDATE_CAP:
                    # window too wide to enumerate: bound the integer max
                    # by the real max over the critical window
                    wide = Interval(max(float(abar.lo), float(N)),
                                    max(float(abar.hi), float(N)))
                    lam_w = (PI * wide / inst.length).square()
                    growth = pow_real(wide, p - q1)
                    over = -lam_w + (inst.d + abs(inst.c)) + K * growth
                    at_n = _odd_tail_top(inst, np.asarray(N), K, p, q1)
                    odd_top = Interval(float(at_n.lo),
                                       max(float(over.hi), float(at_n.hi)))
                    return imax(even_top, odd_top)
                cands.update(range(lo_i, hi_i + 1))
        i_vals = np.array(sorted(cands), dtype=np.float64)
        tops = _odd_tail_top(inst, i_vals, K, p, q1)
        odd_top = Interval(float(np.max(tops.lo)), float(np.max(tops.hi)))

    return imax(even_top, odd_top)


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------

def _degenerate_certificate(inst, delta, N, p) -> SpectrumCertificate:
    full = Interval(-np.inf, np.inf)
    return SpectrumCertificate(
        delta=as_interval(delta), N=N, p=p, disks=[],
        m_bar=full, mu=full, classification="Undetermined",
        first_disk_bounds=full)


def classify_cell(inst: ProblemInstance, delta, N: int,
                  p: float) -> SpectrumCertificate:
    """Full certified classification of one coupling cell.

    Builds the scaled section, the numeric diagonalizer with verified
    inverse, the finite disks and the tail bound, then classifies.  Any
    verification failure (e.g. the diagonalizer is not verifiably
    invertible) degrades to an Undetermined certificate with infinite
    bounds instead of raising.
    """
    delta = as_interval(delta)
    kb = b_constant(inst)
    basis = ScalingBasis(p)
    _require_summable(p, kb.q2)
    try:
        diag = build_diagonalizer(inst, delta, N, basis)
    except NotVerifiablyInvertible:
        return _degenerate_certificate(inst, delta, N, p)

    frak = build_frak_block(inst, delta, basis, diag)
    radii = radii_finite(frak, diag, delta, p, kb)
    rho = rho_Np(diag, p, kb.q2)
    mb = m_bar(inst, delta, N, p, rho)

    if isinstance(frak, ComplexInterval):
        centers = ComplexInterval(
            Interval._raw(np.diagonal(frak.re.lo).copy(),
                          np.diagonal(frak.re.hi).copy()),
            Interval._raw(np.diagonal(frak.im.lo).copy(),
                          np.diagonal(frak.im.hi).copy()))
    else:
        diag_iv = Interval._raw(np.diagonal(frak.lo).copy(),
                                np.diagonal(frak.hi).copy())
        centers = ComplexInterval(diag_iv)

    n2 = 2 * diag.N
    disks = [GershgorinDisk(center=centers[r], radius_bound=radii[r])
             for r in range(n2)]

    tops = centers.re + radii
    first = Interval(float((centers.re[0] - radii[0]).lo),
                     float(tops[0].hi))
    rest = Interval(float(np.max(tops.lo[1:])), float(np.max(tops.hi[1:])))
    mu = imax(mb, rest)

    if float(first.hi) < 0.0 and float(mu.hi) < 0.0:
        classification = "Stable"
    elif float(first.lo) > 0.0 and float(mu.hi) < 0.0 and \
            float(first.lo) > float(mu.hi):
        classification = "UnstableOne"
    else:
        classification = "Undetermined"

    return SpectrumCertificate(
        delta=delta, N=N, p=p, disks=disks, m_bar=mb, mu=mu,
        classification=classification, first_disk_bounds=first)


# --------------------------------------------------------------------------
# scaled-basis tail diagnostic (no diagonalizer)
# --------------------------------------------------------------------------

def tail_threshold_qbasis(inst: ProblemInstance, delta, p: float) -> int:
    """Smallest mode index i0 such that *every* scaled-basis disk with mode
    i >= i0 provably lies in the left half plane:

        even rows: -vartheta kappa i^2 + a + |b| < 0
        odd rows:  -kappa i^2 + C' |delta| i^(p-q1) + d + |c| < 0

    with kappa = (pi/length)^2 and C' = C * sum_{j>=0} 1/max(1, j^(p+q2))
    (the odd-row radius now sums the kernel column bound over all modes).
    Both expressions are eventually decreasing; the odd one is unimodal,
    so a sign at i is sticky once i is past its critical point.  Raises
    NoThresholdFound if the scan hits the hard cap.
    """
    from .errors import NoThresholdFound

    kb = b_constant(inst)
    q1, q2 = kb.q1, kb.q2
    _require_summable(p, q2)
    delta = as_interval(delta)

    # C' = C * (sum of the first n0 terms + integral tail bound)
    n0 = 1000
    s = p + q2
    j = np.arange(n0, dtype=np.float64)
    terms = 1.0 / imax(Interval.point(np.ones(n0)),
                       pow_real(Interval.point(j), s))
    head = sum_enclosure(terms)
    tail_hi = _tail_sum_coeff(p, q2, n0)  # = (n0-1)^(1-s) / (s-1)
    series = head + Interval(0.0, float(tail_hi.hi))
    c_prime = kb.C * series
    K = c_prime * delta.abs_val()

    kappa = (PI / inst.length).square()
    # stickiness threshold for the odd condition: past the critical point
    # of -kappa t^2 + K t^(p-q1) the expression is decreasing
    if p > q1 and float(K.hi) > 0.0:
        base = K * float(p - q1) / (2.0 * kappa)
        base = Interval(max(0.0, float(base.lo)), float(base.hi))
        if p >= q1 + 2:
            raise NoThresholdFound(
                f"odd tail rows grow without bound for p={p} >= q1+2")
        crit = pow_real(base, 1.0 / (2.0 + q1 - p))
        sticky_from = int(np.ceil(float(crit.hi)))
    else:
        sticky_from = 0

    i0 = 0
    block = 256
    while i0 <= _TAIL_SCAN_CAP:
        i_vals = np.arange(i0, i0 + block, dtype=np.float64)
        even = Interval.point(-inst.vartheta) * kappa * \
            Interval.point(i_vals).square() + (inst.a + abs(inst.b))
        growth = pow_real(Interval.point(i_vals), float(p - q1))
        odd = -kappa * Interval.point(i_vals).square() + K * growth + \
            (inst.d + abs(inst.c))
        ok = (even.hi < 0.0) & (odd.hi < 0.0) & \
            (i_vals >= max(sticky_from, 0))
        hit = np.nonzero(ok)[0]
        if hit.size:
            return int(i_vals[hit[0]])
        i0 += block
    raise NoThresholdFound(
        f"no all-negative tail index found below {_TAIL_SCAN_CAP}")
