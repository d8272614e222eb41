"""Certified instability threshold for the coupling strength.

The pipeline has two stages:

1. **Sweep** — partition ``[0, delta_max]`` into ``grid_count`` equal cells
   with exact rational endpoints, and classify the spectrum on every cell
   with the disk machinery (:func:`turingcert.gershgorin.classify_cell`).
   Away from the threshold every cell resolves to ``Stable`` or
   ``UnstableOne``; a narrow run of ``Undetermined`` cells remains around
   the crossing.

2. **Refine** — validate the leading eigenvalue ``d0`` and its coupling
   derivative on each undetermined cell (:mod:`turingcert.nk`), extending
   the refined range outward cell by cell until the leftmost refined cell
   has ``sup d0 < 0`` and the rightmost has ``inf d0 > 0``.  Together with
   a positive derivative bound on every refined cell, the stable prefix,
   and the unstable suffix, this certifies a *unique* crossing
   ``delta_star`` inside the gap between those two sign-definite cells.

``write_bundle`` serializes the whole certificate to a directory in a
byte-deterministic way (the manifest timestamp is the only field that
varies between identical runs).
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from multiprocessing import get_context

from .errors import TuringCertError
from .gershgorin import SpectrumCertificate, classify_cell
from .harmonic import ProblemInstance, b_constant, default_instance
from .interval import Interval, enclose_rational, hull
from .nk import DerivEnclosure, NkCertificate, derivative_enclosure, enclose_d0

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "CellRefinement",
    "ThresholdCertificate",
    "grid_cell_fractions",
    "grid_cell_interval",
    "sweep",
    "certify_threshold",
    "write_bundle",
    "canonical_json",
    "BUNDLE_FILES",
]

BUNDLE_FILES = ("sweep.jsonl", "nk_band.jsonl", "threshold.json",
                "d0_bounds.csv")


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("TURINGCERT_JOBS", "1")))
    except ValueError:
        return 1


@dataclass(eq=False)
class SweepConfig:
    """Parameters of a threshold certification run.

    ``delta_max`` is kept as an exact :class:`~fractions.Fraction` so that
    cell endpoints are exact rationals (outward-rounded only when
    converted to float intervals).
    """

    grid_count: int = 1000
    N: int = 50
    p: float = 2.0
    alpha: float = 1.0
    delta_max: Fraction = Fraction(4)
    nk_n: int = 1500
    max_extension: int = 4
    jobs: int = field(default_factory=_default_jobs)

    def __post_init__(self):
        self.delta_max = Fraction(self.delta_max)
        if self.grid_count < 2:
            raise ValueError("grid_count must be at least 2")
        if self.delta_max <= 0:
            raise ValueError("delta_max must be positive")
        if self.max_extension < 0:
            raise ValueError("max_extension must be nonnegative")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")

    def to_json(self):
        return {
            "grid_count": self.grid_count,
            "N": self.N,
            "p": self.p,
            "alpha": self.alpha,
            "delta_max": str(self.delta_max),
            "nk_n": self.nk_n,
            "max_extension": self.max_extension,
        }


def grid_cell_fractions(cfg: SweepConfig, k: int) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of sweep cell ``k``."""
    if not 0 <= k < cfg.grid_count:
        raise ValueError(f"cell index {k} outside 0..{cfg.grid_count - 1}")
    step = cfg.delta_max / cfg.grid_count
    return k * step, (k + 1) * step


def grid_cell_interval(cfg: SweepConfig, k: int) -> Interval:
    """Outward-rounded float interval covering sweep cell ``k``."""
    lo, hi = grid_cell_fractions(cfg, k)
    return Interval(enclose_rational(lo).lo, enclose_rational(hi).hi)


@dataclass(eq=False)
class SweepRecord:
    """Disk classification of one sweep cell."""

    k: int
    delta: Interval
    classification: str
    first_disk: Interval
    mu: Interval
    m_bar: Interval

    def to_json(self):
        return {
            "k": self.k,
            "delta": self.delta.as_pair(),
            "classification": self.classification,
            "first_disk": self.first_disk.as_pair(),
            "mu": self.mu.as_pair(),
            "m_bar": self.m_bar.as_pair(),
        }


def _sweep_cell(inst: ProblemInstance, cfg: SweepConfig, k: int) -> SweepRecord:
    cert: SpectrumCertificate = classify_cell(
        inst, grid_cell_interval(cfg, k), N=cfg.N, p=cfg.p)
    return SweepRecord(
        k=k,
        delta=grid_cell_interval(cfg, k),
        classification=cert.classification,
        first_disk=cert.first_disk_bounds,
        mu=cert.mu,
        m_bar=cert.m_bar,
    )


_POOL_STATE: dict = {}


def _pool_init(inst, cfg):
    _POOL_STATE["inst"] = inst
    _POOL_STATE["cfg"] = cfg


def _pool_cell(k):
    return _sweep_cell(_POOL_STATE["inst"], _POOL_STATE["cfg"], k)


def sweep(inst: ProblemInstance | None = None,
          cfg: SweepConfig | None = None,
          log=None) -> list[SweepRecord]:
    """Classify every sweep cell; returns records ordered by cell index."""
    inst = default_instance() if inst is None else inst
    cfg = SweepConfig() if cfg is None else cfg
    ks = range(cfg.grid_count)
    if cfg.jobs > 1:
        ctx = get_context("fork")
        chunk = max(1, cfg.grid_count // (cfg.jobs * 8))
        with ctx.Pool(cfg.jobs, initializer=_pool_init,
                      initargs=(inst, cfg)) as pool:
            records = pool.map(_pool_cell, ks, chunksize=chunk)
    else:
        records = []
        for k in ks:
            records.append(_sweep_cell(inst, cfg, k))
            if log is not None and (k + 1) % 100 == 0:
                log(f"sweep: {k + 1}/{cfg.grid_count} cells classified")
    return records


@dataclass(eq=False)
class CellRefinement:
    """Validated leading-eigenvalue data for one sweep cell."""

    k: int
    delta: Interval
    nk: NkCertificate
    derivative: DerivEnclosure

    def to_json(self):
        return {
            "k": self.k,
            "delta": self.delta.as_pair(),
            "nk": self.nk.to_json(),
            "derivative": self.derivative.to_json(),
        }


@dataclass(eq=False)
class ThresholdCertificate:
    """Outcome of a full threshold run.

    When ``unique`` is true, the fields assert: the system is stable for
    every coupling below ``stable_up_to``, has exactly one unstable
    eigenvalue for every coupling in ``[unstable_from, delta_max]``, and
    the *only* crossing of the leading eigenvalue through zero lies in
    ``delta_star`` (with ``derivative_range`` bounding its slope on the
    refined cells).  When ``unique`` is false, ``reason`` records the
    first condition that could not be verified; disk-level fields are
    still populated when available.
    """

    config: SweepConfig
    unique: bool
    reason: str | None
    stable_up_to: float | None
    unstable_from: float | None
    delta_star: Interval | None
    delta_star_exact: tuple[str, str] | None
    derivative_range: Interval | None
    max_mu_hi: float
    band: list[int]
    refined: list[CellRefinement]
    records: list[SweepRecord] = field(repr=False)

    def to_json(self):
        return {
            "config": self.config.to_json(),
            "unique": self.unique,
            "reason": self.reason,
            "stable_up_to": self.stable_up_to,
            "unstable_from": self.unstable_from,
            "delta_star": None if self.delta_star is None
            else self.delta_star.as_pair(),
            "delta_star_exact": None if self.delta_star_exact is None
            else list(self.delta_star_exact),
            "derivative_range": None if self.derivative_range is None
            else self.derivative_range.as_pair(),
            "max_mu_hi": self.max_mu_hi,
            "band": list(self.band),
            "refined_cells": [r.k for r in self.refined],
        }


_STAGES = {"Stable": 0, "Undetermined": 1, "UnstableOne": 2}


def _staircase_ok(records: list[SweepRecord]) -> bool:
    """True iff classifications form (Stable)* (Undetermined)* (UnstableOne)*."""
    stage = 0
    for rec in records:
        s = _STAGES.get(rec.classification)
        if s is None or s < stage:
            return False
        stage = s
    return True


def _refine_cell(inst, cfg, k, records, kb) -> CellRefinement:
    delta = grid_cell_interval(cfg, k)
    nk_cert = enclose_d0(inst, delta, N=cfg.nk_n, alpha=cfg.alpha,
                         mu_from_gershgorin=records[k].mu)
    deriv = derivative_enclosure(nk_cert, nk_cert.eigendata, nk_cert.A_N,
                                 inst, kb)
    return CellRefinement(k=k, delta=delta, nk=nk_cert, derivative=deriv)


def certify_threshold(inst: ProblemInstance | None = None,
                      cfg: SweepConfig | None = None,
                      log=None,
                      records: list[SweepRecord] | None = None) -> ThresholdCertificate:
    """Run the sweep, refine the undetermined band, and certify the
    unique instability threshold.

    ``records`` short-circuits the sweep with precomputed results (they
    must come from :func:`sweep` with the same ``inst`` and ``cfg``).

    Never raises on a certification failure: the returned certificate has
    ``unique=False`` and a ``reason`` instead.  (Malformed inputs still
    raise ``ValueError``.)
    """
    inst = default_instance() if inst is None else inst
    cfg = SweepConfig() if cfg is None else cfg
    kb = b_constant(inst)

    if records is None:
        records = sweep(inst, cfg, log=log)
    elif len(records) != cfg.grid_count:
        raise ValueError("precomputed sweep records do not match grid_count")
    band = [r.k for r in records if r.classification == "Undetermined"]
    max_mu_hi = max(float(r.mu.hi) for r in records)

    def partial(reason: str, refined=()):
        stable_hi = None
        unstable_lo = None
        if _staircase_ok(records):
            stables = [r for r in records if r.classification == "Stable"]
            unstables = [r for r in records
                         if r.classification == "UnstableOne"]
            if stables:
                stable_hi = float(stables[-1].delta.hi)
            if unstables:
                unstable_lo = float(unstables[0].delta.lo)
        if log is not None:
            log(f"threshold: NOT certified ({reason})")
        return ThresholdCertificate(
            config=cfg, unique=False, reason=reason,
            stable_up_to=stable_hi, unstable_from=unstable_lo,
            delta_star=None, delta_star_exact=None, derivative_range=None,
            max_mu_hi=max_mu_hi, band=band, refined=list(refined),
            records=records)

    if not _staircase_ok(records):
        return partial("sweep classifications do not form a "
                       "stable/undetermined/unstable staircase")
    if records[0].classification != "Stable":
        return partial("no stable cells at the low-coupling end")
    if records[-1].classification != "UnstableOne":
        return partial("no single-instability cells at the "
                       "high-coupling end")
    if max_mu_hi >= 0.0:
        return partial("secondary spectrum not uniformly negative: "
                       f"max sup(mu) = {max_mu_hi}")

    # contiguous refined range [a, b]; empty (a > b) when no cell was
    # left undetermined, in which case it straddles the transition
    if band:
        a, b = band[0], band[-1]
    else:
        first_unstable = next(r.k for r in records
                              if r.classification == "UnstableOne")
        a, b = first_unstable, first_unstable - 1

    refined: dict[int, CellRefinement] = {}

    def refine(k: int) -> str | None:
        try:
            refined[k] = _refine_cell(inst, cfg, k, records, kb)
        except TuringCertError as exc:
            return f"cell {k}: {type(exc).__name__}: {exc}"
        if log is not None:
            cell = refined[k]
            log(f"refine: cell {k} d0={cell.nk.d0_enclosure.as_pair()} "
                f"d0'={cell.derivative.range.as_pair()}")
        return None

    for k in range(a, b + 1):
        err = refine(k)
        if err is not None:
            return partial(err, refined.values())

    # extend left until the leftmost refined cell is certainly negative
    ext = 0
    while not (a <= b and float(refined[a].nk.d0_enclosure.hi) < 0.0):
        if a == 0:
            return partial("reached coupling 0 without a certified "
                           "negative cell", refined.values())
        if ext >= cfg.max_extension:
            return partial(
                f"left extension cap ({cfg.max_extension}) reached without "
                f"certifying sup d0 < 0", refined.values())
        a -= 1
        ext += 1
        err = refine(a)
        if err is not None:
            return partial(err, refined.values())

    # extend right until the rightmost refined cell is certainly positive
    ext = 0
    while not (float(refined[b].nk.d0_enclosure.lo) > 0.0):
        if b == cfg.grid_count - 1:
            return partial("reached delta_max without a certified "
                           "positive cell", refined.values())
        if ext >= cfg.max_extension:
            return partial(
                f"right extension cap ({cfg.max_extension}) reached without "
                f"certifying inf d0 > 0", refined.values())
        b += 1
        ext += 1
        err = refine(b)
        if err is not None:
            return partial(err, refined.values())

    cells = [refined[k] for k in range(a, b + 1)]

    # the refined range must cover the whole undetermined band, and the
    # cells outside it must already be classified sign-definitely
    for rec in records[:a]:
        if rec.classification != "Stable":
            return partial(f"cell {rec.k} left of the refined range is "
                           f"{rec.classification}, not Stable", cells)
    for rec in records[b + 1:]:
        if rec.classification != "UnstableOne":
            return partial(f"cell {rec.k} right of the refined range is "
                           f"{rec.classification}, not UnstableOne", cells)

    # every refined cell: the validated eigenvalue is the leading one
    # (hence real) and moves strictly upward with the coupling
    for cell in cells:
        if not cell.nk.identified_as_d0:
            return partial(
                f"cell {cell.k}: validated eigenvalue not separated from "
                f"the rest of the spectrum", cells)
        if not float(cell.derivative.range.lo) > 0.0:
            return partial(
                f"cell {cell.k}: derivative lower bound "
                f"{float(cell.derivative.range.lo)} not positive", cells)

    # unique crossing: d0 < 0 on cell a, d0 > 0 on cell b, d0 strictly
    # increasing across [a, b], all other eigenvalues negative everywhere,
    # stable prefix and single-unstable suffix outside
    last_neg_frac = grid_cell_fractions(cfg, a)[1]
    first_pos_frac = grid_cell_fractions(cfg, b)[0]
    stable_up_to = float(enclose_rational(last_neg_frac).lo)
    unstable_from = float(enclose_rational(first_pos_frac).hi)
    delta_star = Interval(stable_up_to, unstable_from)
    deriv_range = cells[0].derivative.range
    for cell in cells[1:]:
        deriv_range = hull(deriv_range, cell.derivative.range)

    if log is not None:
        log(f"threshold: certified unique crossing in "
            f"[{stable_up_to}, {unstable_from}]")
    return ThresholdCertificate(
        config=cfg, unique=True, reason=None,
        stable_up_to=stable_up_to, unstable_from=unstable_from,
        delta_star=delta_star,
        delta_star_exact=(str(last_neg_frac), str(first_pos_frac)),
        derivative_range=deriv_range, max_mu_hi=max_mu_hi,
        band=band, refined=cells, records=records)


# --------------------------------------------------------------------------
# bundle serialization
# --------------------------------------------------------------------------

def canonical_json(obj) -> str:
    """Deterministic JSON encoding (sorted keys, no whitespace, shortest
    round-trip float representation)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _csv_num(x: float) -> str:
    return repr(float(x))


def write_bundle(cert: ThresholdCertificate, out_dir: str) -> dict:
    """Write the certificate to ``out_dir`` and return the manifest.

    Files: ``sweep.jsonl`` (one line per sweep cell), ``nk_band.jsonl``
    (one line per refined cell), ``threshold.json`` (summary),
    ``d0_bounds.csv`` (refined-cell table), ``manifest.json`` (sha256 of
    each file).  All content except the manifest's ``created_utc`` field
    is a pure function of the certificate, so two runs with equal inputs
    produce byte-identical files.
    """
    os.makedirs(out_dir, exist_ok=True)
    payloads: dict[str, str] = {}

    payloads["sweep.jsonl"] = "".join(
        canonical_json(rec.to_json()) + "\n" for rec in cert.records)
    payloads["nk_band.jsonl"] = "".join(
        canonical_json(cell.to_json()) + "\n" for cell in cert.refined)
    payloads["threshold.json"] = canonical_json(cert.to_json()) + "\n"

    rows = ["k,delta_lo,delta_hi,d0_lo,d0_hi,mu"]
    for cell in cert.refined:
        mu = cert.records[cell.k].mu
        rows.append(",".join([
            str(cell.k),
            _csv_num(cell.delta.lo), _csv_num(cell.delta.hi),
            _csv_num(cell.nk.d0_enclosure.lo),
            _csv_num(cell.nk.d0_enclosure.hi),
            _csv_num(mu.hi),
        ]))
    payloads["d0_bounds.csv"] = "\n".join(rows) + "\n"

    hashes = {}
    for name in BUNDLE_FILES:
        data = payloads[name].encode("utf-8")
        with open(os.path.join(out_dir, name), "wb") as fh:
            fh.write(data)
        hashes[name] = hashlib.sha256(data).hexdigest()

    manifest = {
        "algorithm": "sha256",
        "config": cert.config.to_json(),
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "files": hashes,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w",
              encoding="utf-8") as fh:
        fh.write(canonical_json(manifest) + "\n")
    return manifest
