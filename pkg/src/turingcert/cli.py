"""Command-line front end for the certification pipeline.

Subcommands
-----------
``spectrum``
    Classify one coupling interval (optionally split into a grid of
    cells) with the disk machinery; writes ``sweep.jsonl`` and
    ``disks.csv``.
``eigen``
    Validate the leading eigenvalue and its coupling derivative on one
    interval; writes a single JSON certificate.
``threshold``
    Full pipeline: sweep, refinement, unique-crossing certificate;
    writes the certificate bundle directory.
``disks``
    Dump all certified disks of one interval as CSV (for plotting).

Exit codes: 0 success; 2 invalid configuration or command line; 3 a
rigorous computation refused to certify (e.g. contraction failure); 4
threshold ran but uniqueness was not certified.

Stdout carries a short human summary; all machine-readable data goes to
the output files.  Progress lines go to stderr (silence with
``--quiet``).  Coupling ranges are given as ``LO:HI`` with exact decimal
or rational endpoints (``2.428``, ``12/5``); they are outward-rounded to
binary intervals.  Config files are JSON with keys ``a, b, c, d, theta,
l, omega1, omega2``; domain endpoints accept exact arithmetic tokens
such as ``"pi/4"`` or ``"pi/2 + 1/4"``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .errors import TuringCertError
from .gershgorin import SpectrumCertificate, classify_cell
from .harmonic import ProblemInstance, b_constant, default_instance
from .interval import PI, Interval, enclose_rational
from .nk import derivative_enclosure, enclose_d0
from .threshold import (
    SweepConfig,
    canonical_json,
    certify_threshold,
    sweep,
    write_bundle,
)

__all__ = [
    "ConfigError",
    "RunManifest",
    "load_instance",
    "parse_domain_value",
    "parse_delta_range",
    "cmd_spectrum",
    "cmd_eigen",
    "cmd_threshold",
    "cmd_disks",
    "main",
    "main_entry",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CERTIFICATION = 3
EXIT_NOT_UNIQUE = 4


class ConfigError(Exception):
    """Malformed configuration file or command-line input."""


# --------------------------------------------------------------------------
# input parsing
# --------------------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse {text!r} as an exact number: {exc}")


def _term_interval(term: str) -> Interval:
    """One additive term: ``pi``, ``pi/4``, ``3*pi/4``, or an exact
    decimal/rational literal."""
    t = term.strip()
    if not t:
        raise ConfigError("empty term in domain expression")
    if "pi" not in t:
        return enclose_rational(_fraction(t))
    left, _, right = t.partition("pi")
    coef = Fraction(1)
    left = left.strip()
    if left:
        if not left.endswith("*"):
            raise ConfigError(f"cannot parse term {term!r} "
                              f"(expected COEF*pi or pi/DIV)")
        coef = _fraction(left[:-1])
    right = right.strip()
    if right:
        if not right.startswith("/"):
            raise ConfigError(f"cannot parse term {term!r} "
                              f"(expected COEF*pi or pi/DIV)")
        div = _fraction(right[1:])
        if div == 0:
            raise ConfigError(f"division by zero in term {term!r}")
        coef = coef / div
    return PI * enclose_rational(coef)


def _split_terms(expr: str) -> list[str]:
    """Split an expression at top-level + and - (signs stay attached)."""
    terms: list[str] = []
    cur = ""
    for ch in expr:
        if ch in "+-" and cur.strip() and cur.strip()[-1] not in "eE*/":
            terms.append(cur)
            cur = ch if ch == "-" else ""
        else:
            cur += ch
    terms.append(cur)
    return terms


def parse_domain_value(value) -> Interval:
    """Enclose a config-file scalar: a JSON number (read as an exact
    decimal) or a string expression of exact terms like ``pi/2 + 1/4``."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return enclose_rational(_fraction(repr(value)))
    if not isinstance(value, str):
        raise ConfigError(f"expected a number or token string, got {value!r}")
    total = None
    for term in _split_terms(value):
        t = term.strip()
        negate = False
        if t.startswith("-"):
            negate, t = True, t[1:]
        elif t.startswith("+"):
            t = t[1:]
        iv = _term_interval(t)
        if negate:
            iv = -iv
        total = iv if total is None else total + iv
    return total


_SCALAR_KEYS = ("a", "b", "c", "d", "theta", "l")
_ALL_KEYS = set(_SCALAR_KEYS) | {"omega1", "omega2"}


def _scalar_number(raw, key: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"config key {key!r} must be a number")
    return float(raw)


def _domain_pieces(raw, key: str):
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"config key {key!r} must be a nonempty list "
                          f"of [lo, hi] pairs")
    pieces = []
    for pair in raw:
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"each {key!r} entry must be a [lo, hi] pair")
        pieces.append((parse_domain_value(pair[0]),
                       parse_domain_value(pair[1])))
    return tuple(pieces)


def load_instance(path: str | None) -> ProblemInstance:
    """Build the problem data from a JSON config file (or the built-in
    configuration when ``path`` is None)."""
    if path is None:
        return default_instance()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config file must contain a JSON object")
    unknown = sorted(set(raw) - _ALL_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = sorted(k for k in ("a", "b", "c", "d", "omega1", "omega2")
                     if k not in raw)
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    try:
        return ProblemInstance(
            a=_scalar_number(raw["a"], "a"),
            b=_scalar_number(raw["b"], "b"),
            c=_scalar_number(raw["c"], "c"),
            d=_scalar_number(raw["d"], "d"),
            vartheta=_scalar_number(raw.get("theta", 1.0), "theta"),
            length=_scalar_number(raw.get("l", 2.0), "l"),
            omega1=_domain_pieces(raw["omega1"], "omega1"),
            omega2=_domain_pieces(raw["omega2"], "omega2"),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid problem data: {exc}")


def parse_delta_range(text: str) -> tuple[Fraction, Fraction]:
    """Parse ``LO:HI`` with exact decimal/rational endpoints."""
    if ":" not in text:
        raise ConfigError("coupling range must be LO:HI "
                          "(exact decimals, e.g. 2.428:2.432)")
    lo_s, hi_s = text.split(":", 1)
    lo, hi = _fraction(lo_s), _fraction(hi_s)
    if hi < lo:
        raise ConfigError(f"empty coupling range {text!r}")
    return lo, hi


def _range_interval(lo: Fraction, hi: Fraction) -> Interval:
    return Interval(enclose_rational(lo).lo, enclose_rational(hi).hi)


# --------------------------------------------------------------------------
# run manifest
# --------------------------------------------------------------------------

@dataclass(eq=False)
class RunManifest:
    """Provenance record of one CLI invocation: configuration snapshot,
    tool version, timings, and a content hash for every output file."""

    command: str
    version: str
    config: dict
    wall_clock_seconds: float
    phases: dict
    outputs: dict

    def to_json(self):
        return {
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "wall_clock_seconds": self.wall_clock_seconds,
            "phases": self.phases,
            "outputs": self.outputs,
        }


def _sha256_file(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


# Hash only the deterministic data products.  run_manifest.json cannot
# hash itself, and manifest.json embeds a creation timestamp, so its
# digest would make otherwise identical runs compare unequal.
_UNHASHED = ("run_manifest.json", "manifest.json")


def _write_run_manifest(out_dir: str, command: str, config: dict,
                        t0: float, phases: dict) -> RunManifest:
    outputs = {
        name: _sha256_file(os.path.join(out_dir, name))
        for name in sorted(os.listdir(out_dir))
        if name not in _UNHASHED
        and os.path.isfile(os.path.join(out_dir, name))
    }
    manifest = RunManifest(
        command=command, version=__version__, config=config,
        wall_clock_seconds=time.monotonic() - t0,
        phases=phases, outputs=outputs)
    with open(os.path.join(out_dir, "run_manifest.json"), "w",
              encoding="utf-8") as fh:
        fh.write(canonical_json(manifest.to_json()) + "\n")
    return manifest


def _progress(args):
    if getattr(args, "quiet", False):
        return None
    return lambda msg: print(msg, file=sys.stderr)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

_DISK_COLUMNS = ("center_re_lo", "center_re_hi", "center_im_lo",
                 "center_im_hi", "radius_hi")


def _disk_rows(cert: SpectrumCertificate):
    for i, disk in enumerate(cert.disks):
        yield (i,
               repr(float(disk.center.re.lo)),
               repr(float(disk.center.re.hi)),
               repr(float(disk.center.im.lo)),
               repr(float(disk.center.im.hi)),
               repr(float(disk.radius_bound.hi)))


def cmd_spectrum(args) -> int:
    inst = load_instance(args.config)
    lo, hi = parse_delta_range(args.delta)
    if args.grid < 1:
        raise ConfigError("--grid must be at least 1")
    if args.grid > 1 and hi == lo:
        raise ConfigError("cannot split a single point into a grid")
    t0 = time.monotonic()
    log = _progress(args)

    step = (hi - lo) / args.grid
    certs: list[SpectrumCertificate] = []
    for k in range(args.grid):
        cell = _range_interval(lo + k * step, lo + (k + 1) * step)
        certs.append(classify_cell(inst, cell, N=args.n, p=args.p))
        if log is not None and (k + 1) % 50 == 0:
            log(f"spectrum: {k + 1}/{args.grid} cells classified")
    t_classify = time.monotonic() - t0

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "sweep.jsonl"), "w",
              encoding="utf-8") as fh:
        for cert in certs:
            fh.write(canonical_json(cert.to_json()) + "\n")
    with open(os.path.join(args.out, "disks.csv"), "w",
              encoding="utf-8") as fh:
        fh.write(",".join(("k", "index") + _DISK_COLUMNS) + "\n")
        for k, cert in enumerate(certs):
            for row in _disk_rows(cert):
                fh.write(",".join((str(k),) + tuple(map(str, row))) + "\n")
    _write_run_manifest(
        args.out, "spectrum",
        {"instance": inst.to_json(), "delta": [str(lo), str(hi)],
         "grid": args.grid, "N": args.n, "p": args.p},
        t0, {"classify_seconds": t_classify})

    counts: dict[str, int] = {}
    for cert in certs:
        counts[cert.classification] = counts.get(cert.classification, 0) + 1
    summary = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
    print(f"classified {len(certs)} cell(s) over delta in "
          f"[{lo}, {hi}]: {summary}")
    for cert in certs if len(certs) <= 8 else []:
        print(f"  delta={cert.delta.as_pair()} -> {cert.classification}, "
              f"leading disk {cert.first_disk_bounds.as_pair()}")
    print(f"wrote sweep.jsonl, disks.csv to {args.out}")
    return EXIT_OK


def cmd_eigen(args) -> int:
    inst = load_instance(args.config)
    lo, hi = parse_delta_range(args.delta)
    cell = _range_interval(lo, hi)
    t0 = time.monotonic()

    gersh = classify_cell(inst, cell, N=args.disk_n, p=args.p)
    cert = enclose_d0(inst, cell, N=args.n, alpha=args.alpha,
                      mu_from_gershgorin=gersh.mu)
    deriv = derivative_enclosure(cert, cert.eigendata, cert.A_N, inst,
                                 b_constant(inst))

    payload = {
        "delta": cell.as_pair(),
        "delta_exact": [str(lo), str(hi)],
        "mu": gersh.mu.as_pair(),
        "nk": cert.to_json(),
        "derivative": deriv.to_json(),
        "wall_clock_seconds": time.monotonic() - t0,
    }
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(payload) + "\n")

    d0 = cert.d0_enclosure.as_pair()
    print(f"leading eigenvalue for delta in [{lo}, {hi}]: "
          f"[{d0[0]:.9g}, {d0[1]:.9g}] (width {d0[1] - d0[0]:.3g})")
    print(f"identified as the leading eigenvalue: "
          f"{'yes' if cert.identified_as_d0 else 'no'}; rest of spectrum "
          f"below {float(gersh.mu.hi):.6g}")
    rng = deriv.range.as_pair()
    print(f"coupling derivative: [{rng[0]:.6g}, {rng[1]:.6g}]")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_threshold(args) -> int:
    inst = load_instance(args.config)
    try:
        cfg = SweepConfig(
            grid_count=args.grid, N=args.n, p=args.p, alpha=args.alpha,
            delta_max=_fraction(args.delta_max), nk_n=args.nk_n,
            max_extension=args.max_extension,
            **({} if args.jobs is None else {"jobs": args.jobs}))
    except ValueError as exc:
        raise ConfigError(str(exc))
    t0 = time.monotonic()
    log = _progress(args)

    records = sweep(inst, cfg, log=log)
    t_sweep = time.monotonic() - t0
    cert = certify_threshold(inst, cfg, log=log, records=records)
    t_refine = time.monotonic() - t0 - t_sweep

    write_bundle(cert, args.out)
    _write_run_manifest(
        args.out, "threshold",
        {"instance": inst.to_json(), "sweep": cfg.to_json()},
        t0, {"sweep_seconds": t_sweep, "refine_seconds": t_refine})

    if cert.unique:
        star = cert.delta_star.as_pair()
        rng = cert.derivative_range.as_pair()
        print(f"unique instability threshold certified: delta* in "
              f"[{star[0]:.9g}, {star[1]:.9g}]")
        print(f"  exact bracket: [{cert.delta_star_exact[0]}, "
              f"{cert.delta_star_exact[1]}]")
        print(f"  stable for delta <= {cert.stable_up_to:.9g}; one "
              f"unstable eigenvalue for delta >= {cert.unstable_from:.9g}")
        print(f"  leading-eigenvalue derivative in "
              f"[{rng[0]:.6g}, {rng[1]:.6g}]")
        print(f"wrote certificate bundle to {args.out}")
        return EXIT_OK
    print(f"threshold NOT certified: {cert.reason}")
    print(f"wrote partial certificate bundle to {args.out}")
    return EXIT_NOT_UNIQUE


def cmd_disks(args) -> int:
    inst = load_instance(args.config)
    lo, hi = parse_delta_range(args.delta)
    cell = _range_interval(lo, hi)
    t0 = time.monotonic()

    cert = classify_cell(inst, cell, N=args.n, p=args.p)

    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "disks.csv"), "w",
              encoding="utf-8") as fh:
        fh.write(",".join(("index",) + _DISK_COLUMNS) + "\n")
        for row in _disk_rows(cert):
            fh.write(",".join(map(str, row)) + "\n")
    _write_run_manifest(
        args.out, "disks",
        {"instance": inst.to_json(), "delta": [str(lo), str(hi)],
         "N": args.n, "p": args.p},
        t0, {"classify_seconds": time.monotonic() - t0})

    print(f"wrote {len(cert.disks)} disks for delta in [{lo}, {hi}] "
          f"({cert.classification}) to {args.out}/disks.csv")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser / entry points
# --------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="turingcert",
        description="Certified spectral enclosures and instability "
                    "thresholds for a nonlocally coupled "
                    "reaction-diffusion system.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, delta_required=True):
        p.add_argument("--config", metavar="PATH", default=None,
                       help="JSON problem configuration "
                            "(default: built-in data)")
        if delta_required:
            p.add_argument("--delta", metavar="LO:HI", required=True,
                           help="coupling range, exact decimal endpoints")
        p.add_argument("--quiet", action="store_true",
                       help="suppress progress output on stderr")

    sp = sub.add_parser("spectrum",
                        help="classify coupling cells via certified disks")
    common(sp)
    sp.add_argument("--n", type=int, default=50, metavar="N",
                    help="truncation size (default 50)")
    sp.add_argument("--p", type=float, default=2.0, metavar="P",
                    help="scaling exponent (default 2)")
    sp.add_argument("--grid", type=int, default=1, metavar="COUNT",
                    help="split the range into COUNT equal cells "
                         "(default 1)")
    sp.add_argument("--out", metavar="DIR", required=True,
                    help="output directory")
    sp.set_defaults(func=cmd_spectrum)

    ep = sub.add_parser("eigen",
                        help="validate the leading eigenvalue and its "
                             "coupling derivative")
    common(ep)
    ep.add_argument("--n", type=int, default=600, metavar="N",
                    help="validation truncation size (default 600)")
    ep.add_argument("--alpha", type=float, default=1.0, metavar="A",
                    help="sequence-space weight exponent (default 1)")
    ep.add_argument("--disk-n", type=int, default=50, metavar="N",
                    help="disk truncation for the identification step "
                         "(default 50)")
    ep.add_argument("--p", type=float, default=2.0, metavar="P",
                    help="scaling exponent for the identification step "
                         "(default 2)")
    ep.add_argument("--out", metavar="FILE", default="eigen.json",
                    help="output JSON file (default eigen.json)")
    ep.set_defaults(func=cmd_eigen)

    tp = sub.add_parser("threshold",
                        help="certify the unique instability threshold")
    common(tp, delta_required=False)
    tp.add_argument("--grid", type=int, default=1000, metavar="COUNT",
                    help="number of sweep cells (default 1000)")
    tp.add_argument("--n", type=int, default=50, metavar="N",
                    help="sweep truncation size (default 50)")
    tp.add_argument("--p", type=float, default=2.0, metavar="P",
                    help="scaling exponent (default 2)")
    tp.add_argument("--alpha", type=float, default=1.0, metavar="A",
                    help="sequence-space weight exponent (default 1)")
    tp.add_argument("--delta-max", default="4", metavar="Q",
                    help="sweep upper endpoint, exact (default 4)")
    tp.add_argument("--nk-n", type=int, default=1500, metavar="N",
                    help="refinement truncation size (default 1500)")
    tp.add_argument("--max-extension", type=int, default=4, metavar="K",
                    help="max refined cells beyond the undetermined band "
                         "per side (default 4)")
    tp.add_argument("--jobs", type=int, default=None, metavar="J",
                    help="sweep worker processes (default: "
                         "TURINGCERT_JOBS or 1)")
    tp.add_argument("--out", metavar="DIR", required=True,
                    help="certificate bundle directory")
    tp.set_defaults(func=cmd_threshold)

    dp = sub.add_parser("disks",
                        help="dump all certified disks of one cell as CSV")
    common(dp)
    dp.add_argument("--n", type=int, default=50, metavar="N",
                    help="truncation size (default 50)")
    dp.add_argument("--p", type=float, default=2.0, metavar="P",
                    help="scaling exponent (default 2)")
    dp.add_argument("--out", metavar="DIR", required=True,
                    help="output directory")
    dp.set_defaults(func=cmd_disks)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TuringCertError as exc:
        print(f"certification error: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_CERTIFICATION


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
