"""Tests for the certified Gershgorin spectrum enclosure.

Oracle notes
------------
* Matrix structure entries are checked against 200-bit pi windows and
  exact Fraction arithmetic, and against the quadrature kernel table
  from tests/_oracles.py.
* The mode-0 leading eigenvalue at zero coupling is -3 + sqrt(6)
  (eigenvalue of [[-3, 2], [3, -3]]); its high-precision window is
  frozen via gmpy2 and must land inside the first disk.
* Eigenvalues of any member matrix of the interval section must lie in
  the union of the finite disks (similarity preserves spectra; the
  certified radii only ever over-cover).  We check the numeric spectrum
  of the midpoint matrix, which is a member by construction.
* rho_Np and m_bar are checked against a hand-derived closed form on an
  identity diagonalizer and against exact-Fraction tail-top windows.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

import tests._oracles as orc
from turingcert.errors import NoThresholdFound
from turingcert.gershgorin import (
    DiagonalizerBasis,
    ScalingBasis,
    build_diagonalizer,
    build_frak_block,
    build_truncated_M,
    classify_cell,
    m_bar,
    radii_finite,
    radius_finite,
    rho_Np,
    tail_threshold_qbasis,
)
from turingcert.harmonic import b_constant, default_instance
from turingcert.interval import ComplexInterval, Interval, enclose_rational

INST = default_instance()
KB = b_constant(INST)


def as_iv(x):
    return Interval.point(np.float64(x))


def grid_cell(k: int, grid: int = 1000, delta_max: Fraction = Fraction(4)):
    """Outward-rounded float enclosure of [k, k+1] * delta_max / grid."""
    lo = enclose_rational(Fraction(delta_max * k, grid))
    hi = enclose_rational(Fraction(delta_max * (k + 1), grid))
    return Interval(float(lo.lo), float(hi.hi))


# ---------------------------------------------------------------------------
# section assembly
# ---------------------------------------------------------------------------


class TestTruncatedSection:
    def test_rejects_tiny_truncation(self):
        with pytest.raises(ValueError):
            build_truncated_M(INST, 1.0, 1)

    def test_zero_blocks_are_exact(self):
        m = build_truncated_M(INST, 2.0, 5)
        for i in range(5):
            for j in range(5):
                if j == i:
                    continue
                # u-rows couple only inside their own mode
                assert m.lo[2 * i, 2 * j] == 0.0 == m.hi[2 * i, 2 * j]
                assert m.lo[2 * i, 2 * j + 1] == 0.0 == m.hi[2 * i, 2 * j + 1]
                # v-rows to v-columns: only the diagonal survives
                assert m.lo[2 * i + 1, 2 * j + 1] == 0.0
                assert m.hi[2 * i + 1, 2 * j + 1] == 0.0

    def test_reaction_entries(self):
        m = build_truncated_M(INST, 2.0, 5)
        for i in range(5):
            assert m.lo[2 * i, 2 * i + 1] == INST.b == m.hi[2 * i, 2 * i + 1]

    def test_diffusion_diagonal_against_pi_window(self):
        # (2i, 2i) must contain -vartheta (pi i / l)^2 + a, and
        # (2i+1, 2i+1) must contain -(pi i / l)^2 + d.
        m = build_truncated_M(INST, 0.7, 8)
        plo, phi = orc.pi_window()
        v = Fraction(INST.vartheta)
        a, d = Fraction(INST.a), Fraction(INST.d)
        ell = Fraction(INST.length)
        for i in range(8):
            lam_lo = (plo * i / ell) ** 2
            lam_hi = (phi * i / ell) ** 2
            du = Interval(float(m.lo[2 * i, 2 * i]), float(m.hi[2 * i, 2 * i]))
            dv = Interval(float(m.lo[2 * i + 1, 2 * i + 1]),
                          float(m.hi[2 * i + 1, 2 * i + 1]))
            assert orc.contains_window(du, (-v * lam_hi + a, -v * lam_lo + a))
            assert orc.contains_window(dv, (-lam_hi + d, -lam_lo + d))

    def test_coupling_block_against_quadrature(self):
        # (2i+1, 2j) must be c*[i==j] + delta * B[i, j] with B the
        # separable kernel table, here recomputed by adaptive quadrature.
        n = 6
        delta = 2.0
        m = build_truncated_M(INST, delta, n)
        om1 = [(float(s.mid()), float(e.mid())) for s, e in INST.omega1]
        om2 = [(float(s.mid()), float(e.mid())) for s, e in INST.omega2]
        table = orc.quad_b_table(om1, om2, INST.length, n)
        for i in range(n):
            for j in range(n):
                want = delta * table[i, j] + (INST.c if i == j else 0.0)
                got_mid = 0.5 * (m.lo[2 * i + 1, 2 * j]
                                 + m.hi[2 * i + 1, 2 * j])
                assert got_mid == pytest.approx(want, abs=1e-9)


class TestScalingBasis:
    def test_rejects_nonpositive_exponent(self):
        with pytest.raises(ValueError):
            ScalingBasis(0.0)

    def test_weights_floor_at_one(self):
        w = ScalingBasis(2.0).weights(6)
        assert w.lo[0] == 1.0 == w.hi[0]
        assert w.lo[1] == 1.0 and w.hi[1] <= 1.0 + 1e-14
        for k in range(2, 6):
            assert w.lo[k] <= k * k <= w.hi[k]
            assert w.hi[k] - w.lo[k] < 1e-9

    def test_scaling_preserves_spectrum(self):
        from turingcert.gershgorin import _apply_scaling

        m = build_truncated_M(INST, 1.7, 6)
        s = _apply_scaling(m, ScalingBasis(2.0), 6)
        e1 = np.sort_complex(np.linalg.eigvals(m.mid()))
        e2 = np.sort_complex(np.linalg.eigvals(s.mid()))
        assert np.max(np.abs(e1 - e2)) < 1e-7


class TestSimilaritySandwich:
    def test_frak_block_preserves_midpoint_spectrum(self):
        basis = ScalingBasis(2.0)
        diag = build_diagonalizer(INST, 1.7, 6, basis)
        frak = build_frak_block(INST, 1.7, basis, diag)
        if isinstance(frak, ComplexInterval):
            mid = frak.re.mid() + 1j * frak.im.mid()
        else:
            mid = frak.mid()
        e1 = np.sort_complex(np.linalg.eigvals(mid))
        e2 = np.sort_complex(
            np.linalg.eigvals(build_truncated_M(INST, 1.7, 6).mid()))
        assert np.max(np.abs(e1 - e2)) < 1e-6

    def test_frak_block_is_nearly_diagonal(self):
        basis = ScalingBasis(2.0)
        diag = build_diagonalizer(INST, 2.44, 8, basis)
        frak = build_frak_block(INST, 2.44, basis, diag)
        off = frak.abs_val().hi.copy()
        np.fill_diagonal(off, 0.0)
        assert np.max(off) < 1e-8


# ---------------------------------------------------------------------------
# finite-row radii
# ---------------------------------------------------------------------------


class TestFiniteRadii:
    def test_radii_are_nonnegative_and_finite(self):
        basis = ScalingBasis(2.0)
        diag = build_diagonalizer(INST, 2.44, 10, basis)
        frak = build_frak_block(INST, 2.44, basis, diag)
        radii = radii_finite(frak, diag, as_iv(2.44), 2.0, KB)
        assert np.all(radii.lo >= 0.0)
        assert np.all(np.isfinite(radii.hi))

    def test_single_row_wrapper_matches_batch(self):
        basis = ScalingBasis(2.0)
        diag = build_diagonalizer(INST, 2.44, 10, basis)
        frak = build_frak_block(INST, 2.44, basis, diag)
        batch = radii_finite(frak, diag, as_iv(2.44), 2.0, KB)
        for (i, eps) in [(0, 0), (0, 1), (3, 0), (7, 1), (9, 1)]:
            one = radius_finite(i, eps, frak, diag, as_iv(2.44), 2.0, KB)
            r = 2 * i + eps
            assert one.lo == batch.lo[r] and one.hi == batch.hi[r]

    def test_single_row_wrapper_validates_index(self):
        basis = ScalingBasis(2.0)
        diag = build_diagonalizer(INST, 2.44, 4, basis)
        frak = build_frak_block(INST, 2.44, basis, diag)
        with pytest.raises(ValueError):
            radius_finite(0, 2, frak, diag, as_iv(2.44), 2.0, KB)
        with pytest.raises(ValueError):
            radius_finite(4, 0, frak, diag, as_iv(2.44), 2.0, KB)

    def test_zero_coupling_kills_tail_term(self):
        # at delta = 0 the tail contribution vanishes and the radii are
        # pure numerical off-diagonal noise
        basis = ScalingBasis(2.0)
        diag = build_diagonalizer(INST, 0.0, 8, basis)
        frak = build_frak_block(INST, 0.0, basis, diag)
        radii = radii_finite(frak, diag, as_iv(0.0), 2.0, KB)
        assert np.max(radii.hi) < 1e-9


# ---------------------------------------------------------------------------
# tail: rho and m_bar
# ---------------------------------------------------------------------------


class TestRho:
    def test_identity_diagonalizer_closed_form(self):
        # oracle: with P = I (N=2, p=2, q2=1):
        #   even rows 0 and 2 each sum to 1; weights f(0)=f(1)=1 and
        #   k^q2 floored at 1, so the head is 1 + 1 = 2; the tail adds
        #   1/((p+q2-1)(N-1)^(p+q2-1)) = 1/2.  Total 2.5.
        ident = np.eye(4)
        diag = DiagonalizerBasis(N=2, P_N=ident,
                                 P_N_inv=Interval.point(ident))
        rho = rho_Np(diag, 2.0, 1)
        assert rho.lo <= 2.5 <= rho.hi
        assert rho.hi - rho.lo < 1e-12

    def test_real_diagonalizer_rho_is_moderate(self):
        basis = ScalingBasis(2.0)
        diag = build_diagonalizer(INST, 2.44, 50, basis)
        rho = rho_Np(diag, 2.0, KB.q2)
        assert 0.0 < rho.lo and rho.hi < 50.0
        assert rho.hi - rho.lo < 1e-6


def exact_odd_top_window(i: int, k_frac: Fraction, p_minus_q1: int):
    """Exact Fraction window of -lam_i + d + |c| + k i^(p-q1), using the
    200-bit pi window; integer growth exponents keep everything exact."""
    plo, phi = orc.pi_window()
    ell = Fraction(INST.length)
    lam_lo = (plo * i / ell) ** 2
    lam_hi = (phi * i / ell) ** 2
    base = Fraction(INST.d) + abs(Fraction(INST.c))
    grow = k_frac * Fraction(i) ** p_minus_q1
    return (-lam_hi + base + grow, -lam_lo + base + grow)


def exact_even_top_window(i: int):
    """Exact Fraction window of -vartheta lam_i + a + |b|."""
    plo, phi = orc.pi_window()
    ell = Fraction(INST.length)
    v = Fraction(INST.vartheta)
    base = Fraction(INST.a) + abs(Fraction(INST.b))
    return (-v * (phi * i / ell) ** 2 + base,
            -v * (plo * i / ell) ** 2 + base)


class TestMBar:
    def test_two_sided_against_exact_tail_tops(self):
        # oracle: p=2, q1=1: growth is linear, tops decrease beyond a
        # tiny critical point, so the tail supremum sits at i = N.
        N = 50
        rho = as_iv(3.0)
        delta = as_iv(2.44)
        mb = m_bar(INST, delta, N, 2.0, rho)
        k_iv = KB.C * delta.abs_val() * rho
        k_hi = Fraction(float(k_iv.hi))
        mb_hi = Fraction(float(mb.hi))
        mb_lo = Fraction(float(mb.lo))

        # the upper bound must dominate every exact odd tail top ...
        for i in list(range(N, N + 60)) + [200, 1000, 5000]:
            assert mb_hi >= exact_odd_top_window(i, k_hi, 1)[0]
        # ... and the even tops (decreasing, so i = N is the largest)
        assert mb_hi >= exact_even_top_window(N)[0]

        # the lower bound cannot exceed the supremum, which for these
        # parameters is max(even top, odd top) at i = N
        sup_hi = max(exact_even_top_window(N)[1],
                     exact_odd_top_window(N, k_hi, 1)[1])
        assert mb_lo <= sup_hi
        # and the whole tail is decisively negative here
        assert mb.hi < 0.0

    def test_growth_dominates_policy(self):
        rho = as_iv(3.0)
        # p > q1 + 2: odd tops grow without bound
        mb = m_bar(INST, as_iv(2.44), 50, 3.5, rho)
        assert mb.hi == math.inf
        # p = q1 + 2 with large coupling: undecidable, upper bound +inf
        mb = m_bar(INST, as_iv(2.44), 50, 3.0, rho)
        assert mb.hi == math.inf
        # p = q1 + 2 with coupling provably below (pi/l)^2: finite
        mb = m_bar(INST, as_iv(0.1), 50, 3.0, as_iv(1e-3))
        assert math.isfinite(mb.hi) and mb.hi < 0.0

    def test_wide_critical_window_falls_back_to_real_max(self):
        # p close to q1 + 2 pushes the critical window past the candidate
        # cap; the bound must stay finite and dominate sampled tops.
        rho = as_iv(3.0)
        delta = as_iv(2.44)
        p = 2.9
        mb = m_bar(INST, delta, 50, p, rho)
        assert math.isfinite(mb.hi)
        k_lo = float((KB.C * delta.abs_val() * rho).lo)
        # float sampling is adequate: margins near the real maximum are
        # not astronomically small
        for i in np.unique(np.logspace(np.log10(50), 8, 200).astype(int)):
            lam = (math.pi * i / INST.length) ** 2
            top = -lam * (1 + 1e-12) + (INST.d + abs(INST.c)) \
                + k_lo * float(i) ** (p - KB.q1) * (1 - 1e-12)
            assert float(mb.hi) >= top

    def test_flat_growth_maximum_at_truncation(self):
        # p <= q1: the growth term is non-increasing, so the tail
        # supremum is the value at i = N.
        rho = as_iv(3.0)
        delta = as_iv(2.44)
        mb = m_bar(INST, delta, 50, 1.0, rho)
        k_hi = Fraction(float((KB.C * delta.abs_val() * rho).hi))
        assert Fraction(float(mb.hi)) >= exact_odd_top_window(50, k_hi, 0)[0]
        assert mb.hi < 0.0


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


class TestClassifyZeroCoupling:
    def test_stable_and_first_disk_pins_leading_eigenvalue(self):
        # oracle: at delta = 0 the mode-0 block is [[-3, 2], [3, -3]]
        # with leading eigenvalue -3 + sqrt(6).
        cert = classify_cell(INST, 0.0, N=8, p=2.0)
        assert cert.classification == "Stable"
        slo, shi = orc.sqrt_window(6.0)
        assert orc.contains_window(cert.first_disk_bounds, (slo - 3, shi - 3))
        # tight: zero coupling kills the tail inflation entirely
        assert cert.first_disk_bounds.hi - cert.first_disk_bounds.lo < 1e-9

    def test_mu_tracks_second_mode_leading_eigenvalue(self):
        # oracle: the runner-up disk top is mode 1's leading eigenvalue
        # -(pi/2)^2 - 3 + sqrt(6).  mu's upper end must dominate it (it
        # is a rigorous bound on every non-leading eigenvalue) and the
        # whole interval must sit within numerical noise of it.
        cert = classify_cell(INST, 0.0, N=8, p=2.0)
        plo, phi = orc.pi_window()
        slo, shi = orc.sqrt_window(6.0)
        val_lo = -(phi / 2) ** 2 - 3 + slo
        val_hi = -(plo / 2) ** 2 - 3 + shi
        assert Fraction(float(cert.mu.hi)) >= val_lo
        assert abs(float(cert.mu.lo) - float(val_lo)) < 1e-9
        assert abs(float(cert.mu.hi) - float(val_hi)) < 1e-9
        assert cert.mu.hi < 0.0


class TestClassifyMidpointContainment:
    @pytest.mark.parametrize("delta", [0.0, 1.0, 2.5, 4.0])
    def test_member_spectrum_inside_finite_disks(self, delta):
        # oracle: the midpoint matrix is a member of the interval
        # section, so each of its eigenvalues must fall in some disk.
        N = 8
        cert = classify_cell(INST, delta, N=N, p=2.0)
        assert len(cert.disks) == 2 * N
        eigs = np.linalg.eigvals(build_truncated_M(INST, delta, N).mid())
        for z in eigs:
            zi = ComplexInterval(Interval.point(np.float64(z.real)),
                                 Interval.point(np.float64(z.imag)))
            hit = False
            for disk in cert.disks:
                dist = (zi - disk.center).abs_val()
                if float(dist.lo) <= float(disk.radius_bound.hi) + 1e-8:
                    hit = True
                    break
            assert hit, f"eigenvalue {z} escaped every disk at delta={delta}"


class TestClassifySweepAnchors:
    def test_anchor_cells(self):
        # strict anchors away from the band, loose at the band edges
        # (certifying there legitimately depends on how tight the radii
        # come out on a given BLAS)
        c606 = classify_cell(INST, grid_cell(606), N=50, p=2.0)
        c610 = classify_cell(INST, grid_cell(610), N=50, p=2.0)
        c615 = classify_cell(INST, grid_cell(615), N=50, p=2.0)
        assert c606.classification == "Stable"
        assert c610.classification == "Undetermined"
        assert c615.classification == "UnstableOne"

        c607 = classify_cell(INST, grid_cell(607), N=50, p=2.0)
        c614 = classify_cell(INST, grid_cell(614), N=50, p=2.0)
        assert c607.classification in ("Stable", "Undetermined")
        assert c614.classification in ("UnstableOne", "Undetermined")

    def test_band_cell_keeps_leading_disk_separated(self):
        # even when the sign of the first disk is undetermined, it stays
        # far above everything else -- the separation the validated
        # eigenvalue pipeline keys on.
        cert = classify_cell(INST, grid_cell(610), N=50, p=2.0)
        assert cert.classification == "Undetermined"
        assert float(cert.first_disk_bounds.lo) > float(cert.mu.hi)
        assert cert.mu.hi < 0.0

    def test_certificate_serialization_shape(self):
        cert = classify_cell(INST, grid_cell(610), N=50, p=2.0)
        js = cert.to_json()
        assert js["classification"] == "Undetermined"
        assert js["N"] == 50 and js["p"] == 2.0
        assert js["delta"] == cert.delta.as_pair()
        assert js["disk0"]["center_re"] == cert.disks[0].center.re.as_pair()
        assert js["disk0"]["radius"] == cert.disks[0].radius_bound.as_pair()
        assert js["mu"] == cert.mu.as_pair()


# ---------------------------------------------------------------------------
# scaled-basis tail diagnostic
# ---------------------------------------------------------------------------


class TestTailThreshold:
    def test_zero_coupling(self):
        # even rows are negative from i = 0 (a + |b| = -1); odd rows need
        # -kappa i^2 < 0, which fails at i = 0 and holds from i = 1.
        assert tail_threshold_qbasis(INST, 0.0, 2.0) == 1

    def test_full_coupling_value_and_minimality(self):
        i0 = tail_threshold_qbasis(INST, 4.0, 2.0)
        assert i0 == 8
        # minimality: an under-approximation of the odd top just below
        # i0 is still positive, so no smaller index can qualify
        kappa_hi = math.pi ** 2 / INST.length ** 2 * 1.0000001
        series_lo = sum(1.0 / max(1.0, j ** 3.0) for j in range(2000))
        k_lo = 2.06 * series_lo * 4.0
        i = i0 - 1
        assert -kappa_hi * i * i + k_lo * i > 0.0

    def test_stickiness_window(self):
        # beyond the returned index both conditions keep holding, checked
        # with a conservative float over-approximation of the tops
        i0 = tail_threshold_qbasis(INST, 4.0, 2.0)
        kappa_lo = (float(orc.pi_window()[0]) / INST.length) ** 2 \
            * 0.9999999
        series_hi = sum(1.0 / max(1.0, j ** 3.0) for j in range(2000)) + 1e-3
        k_hi = 2.07 * series_hi * 4.0
        for i in range(i0, i0 + 400):
            even = -INST.vartheta * kappa_lo * i * i + INST.a + abs(INST.b)
            odd = -kappa_lo * i * i + k_hi * i + INST.d + abs(INST.c)
            assert even < 0.0
            assert odd < 0.0

    def test_monotone_in_coupling(self):
        vals = [tail_threshold_qbasis(INST, d, 2.0)
                for d in (0.0, 1.0, 2.5, 4.0)]
        assert vals == sorted(vals)
        assert vals[0] == 1 and vals[-1] == 8

    def test_growth_beyond_budget_raises(self):
        with pytest.raises(NoThresholdFound):
            tail_threshold_qbasis(INST, 2.0, 3.0)
