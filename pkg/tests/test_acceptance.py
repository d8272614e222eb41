"""Acceptance suite: one test per release criterion.

Criteria 1-4 and 9 evaluate the bundles produced by the full-resolution
production runs (session fixture ``production_runs``; roughly a quarter
hour per run on one core).  Criteria 5-8 are standalone oracle checks.

Each criterion is a single test named ``test_criterion_<n>_...``; the
terminal summary (see conftest) prints an ``ACCEPTANCE n: PASS/FAIL``
line per criterion.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest

import tests._oracles as orc
from turingcert.gershgorin import build_truncated_M, classify_cell
from turingcert.harmonic import b_constant, b_matrix, default_instance
from turingcert.interval import ComplexInterval, Interval
from turingcert.nk import enclose_d0

INST = default_instance()

# reference windows for the leading eigenvalue over the eight transition
# cells (k = 607..614 on the 1000-cell grid), frozen from an independent
# reference computation of the same system
D0_REFERENCE = {
    607: (-4.6e-3, -1.5e-3),
    608: (-3.7e-3, -0.7e-3),
    609: (-2.9e-3, 0.1e-3),
    610: (-2.1e-3, 1.0e-3),
    611: (-1.2e-3, 1.8e-3),
    612: (-0.4e-3, 2.7e-3),
    613: (0.5e-3, 3.5e-3),
    614: (1.3e-3, 4.3e-3),
}


def read_jsonl(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def load_bundle(run):
    d = run["dir"]
    return {
        "sweep": read_jsonl(d / "sweep.jsonl"),
        "band": {row["k"]: row for row in read_jsonl(d / "nk_band.jsonl")},
        "summary": json.loads((d / "threshold.json").read_text()),
    }


# ---------------------------------------------------------------------------
# 1. full threshold reproduction
# ---------------------------------------------------------------------------


def test_criterion_1_threshold_reproduction(production_runs):
    run = production_runs[0]
    assert run["exit"] == 0, "threshold command must certify uniqueness"
    assert run["seconds"] <= 1800.0, "single run must finish within 30 min"

    summary = load_bundle(run)["summary"]
    assert summary["unique"] is True
    lo, hi = summary["delta_star"]
    assert 2.40 <= lo <= hi <= 2.49
    assert 2.42 < lo and hi < 2.47


# ---------------------------------------------------------------------------
# 2. sweep classifications
# ---------------------------------------------------------------------------


def test_criterion_2_sweep_classifications(production_runs):
    sweep = load_bundle(production_runs[0])["sweep"]
    assert len(sweep) == 1000
    classes = {row["k"]: row["classification"] for row in sweep}

    undetermined = sorted(k for k, c in classes.items()
                          if c == "Undetermined")
    assert undetermined, "a transition band must exist"
    assert undetermined == list(range(undetermined[0], undetermined[-1] + 1))
    # nominal band 607..614 with one cell of slack per side
    assert set(undetermined) <= set(range(606, 616))
    for k in range(0, undetermined[0]):
        assert classes[k] == "Stable", f"cell {k}"
    for k in range(undetermined[-1] + 1, 1000):
        assert classes[k] == "UnstableOne", f"cell {k}"

    for row in sweep:
        assert row["mu"][1] < 0.0, f"sup mu >= 0 at cell {row['k']}"


# ---------------------------------------------------------------------------
# 3. validated band enclosures
# ---------------------------------------------------------------------------


def test_criterion_3_band_enclosures(production_runs):
    band = load_bundle(production_runs[0])["band"]
    for k, (ref_lo, ref_hi) in D0_REFERENCE.items():
        assert k in band, f"cell {k} missing from the refined band"
        d0_lo, d0_hi = band[k]["nk"]["d0"]
        assert d0_hi - d0_lo <= 8e-3, f"cell {k} enclosure too wide"
        assert d0_lo <= ref_hi and d0_hi >= ref_lo, \
            f"cell {k} enclosure [{d0_lo}, {d0_hi}] misses " \
            f"reference [{ref_lo}, {ref_hi}]"


# ---------------------------------------------------------------------------
# 4. derivative positivity
# ---------------------------------------------------------------------------


def test_criterion_4_derivative_positivity(production_runs):
    band = load_bundle(production_runs[0])["band"]
    los, his = [], []
    for k in D0_REFERENCE:
        rng = band[k]["derivative"]["range"]
        assert rng[0] > 0.0, f"cell {k} derivative not certainly positive"
        assert rng[0] <= 0.26 and rng[1] >= 0.16, \
            f"cell {k} derivative range {rng} misses [0.16, 0.26]"
        los.append(rng[0])
        his.append(rng[1])
    assert min(los) >= 0.05 and max(his) <= 0.40


# ---------------------------------------------------------------------------
# 5. closed-form leading eigenvalue at zero coupling
# ---------------------------------------------------------------------------


def test_criterion_5_zero_coupling_closed_form():
    mu = classify_cell(INST, 0.0, N=8, p=2.0).mu
    cert = enclose_d0(INST, 0.0, N=400, alpha=1.0, mu_from_gershgorin=mu)
    slo, shi = orc.sqrt_window(6.0)
    assert orc.contains_window(cert.d0_enclosure, (slo - 3, shi - 3))
    assert float(cert.d0_enclosure.hi) - float(cert.d0_enclosure.lo) <= 1e-6


# ---------------------------------------------------------------------------
# 6. disk containment of member-matrix eigenvalues
# ---------------------------------------------------------------------------


def test_criterion_6_disk_containment():
    for delta in (0.0, 1.0, 2.5, 4.0):
        cert = classify_cell(INST, delta, N=8, p=2.0)
        assert len(cert.disks) == 16
        eigs = np.linalg.eigvals(build_truncated_M(INST, delta, 8).mid())
        for z in eigs:
            zi = ComplexInterval(Interval.point(np.float64(z.real)),
                                 Interval.point(np.float64(z.imag)))
            hit = any(
                float((zi - disk.center).abs_val().lo)
                <= float(disk.radius_bound.hi) + 1e-8
                for disk in cert.disks)
            assert hit, f"eigenvalue {z} escaped all disks at delta={delta}"


# ---------------------------------------------------------------------------
# 7. interval kernel property suite
# ---------------------------------------------------------------------------


def test_criterion_7_interval_property_suite():
    rng = np.random.default_rng(271828)
    field_checks = orc.check_field_containment(rng, 100_000)
    assert field_checks >= 4 * 100_000
    fn_checks = orc.check_function_containment(rng, 100_000, 100_000,
                                               100_000)
    assert fn_checks >= 4 * 100_000
    nested = orc.check_inclusion_monotone(rng, 10_000)
    assert nested >= 10_000


# ---------------------------------------------------------------------------
# 8. kernel coefficient bounds
# ---------------------------------------------------------------------------


def test_criterion_8_kernel_bounds():
    n_decay, n_quad = 201, 51
    table = b_matrix(INST, n_decay)
    kb = b_constant(INST)
    c_lo = Fraction(float(kb.C.lo))
    for i in range(n_decay):
        wi = max(1, i)
        for j in range(n_decay):
            mag = max(abs(float(table.lo[i, j])), abs(float(table.hi[i, j])))
            assert Fraction(mag) * wi * max(1, j) <= c_lo, \
                f"decay bound violated at ({i}, {j})"

    om1 = [(float(s.mid()), float(e.mid())) for s, e in INST.omega1]
    om2 = [(float(s.mid()), float(e.mid())) for s, e in INST.omega2]
    quad = orc.quad_b_table(om1, om2, INST.length, n_quad)
    for i in range(n_quad):
        for j in range(n_quad):
            gap = max(float(table.lo[i, j]) - quad[i, j],
                      quad[i, j] - float(table.hi[i, j]), 0.0)
            assert gap <= 1e-10, f"quadrature mismatch at ({i}, {j}): {gap}"


# ---------------------------------------------------------------------------
# 9. byte-determinism of the certificate bundle
# ---------------------------------------------------------------------------


def test_criterion_9_determinism(production_runs):
    a, b = production_runs[0]["dir"], production_runs[1]["dir"]
    assert production_runs[1]["exit"] == 0

    for name in ("sweep.jsonl", "nk_band.jsonl", "threshold.json",
                 "d0_bounds.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), \
            f"{name} differs between identical runs"

    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    ma.pop("created_utc")
    mb.pop("created_utc")
    assert ma == mb

    ra = json.loads((a / "run_manifest.json").read_text())
    rb = json.loads((b / "run_manifest.json").read_text())
    for volatile in ("wall_clock_seconds", "phases"):
        ra.pop(volatile)
        rb.pop(volatile)
    assert ra == rb
