"""Shared fixtures and the acceptance-criteria terminal report.

The ``production_runs`` fixture performs the full-resolution threshold
certification twice through the CLI (the second run feeds the
determinism criterion).  It is session-scoped and lazy: only the
acceptance tests request it, so ``pytest tests/test_interval.py`` etc.
stay fast.

After the run, a summary block prints one PASS/FAIL line per acceptance
criterion, derived from the outcomes of the ``test_criterion_<n>_*``
tests.
"""

from __future__ import annotations

import re
import time

import pytest


@pytest.fixture(scope="session")
def production_runs(tmp_path_factory):
    """Two identical full-resolution threshold runs via the CLI.

    Returns a list of two dicts: {"dir": Path, "exit": int,
    "seconds": float}.
    """
    from turingcert.cli import main

    base = tmp_path_factory.mktemp("production")
    runs = []
    for name in ("run_a", "run_b"):
        out = base / name
        t0 = time.monotonic()
        code = main(["threshold", "--out", str(out), "--quiet"])
        runs.append({"dir": out, "exit": code,
                     "seconds": time.monotonic() - t0})
    return runs


_CRITERION = re.compile(r"test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results: dict[int, bool] = {}
    for status, ok in (("passed", True), ("failed", False),
                       ("error", False)):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            match = _CRITERION.search(nodeid)
            if match is None:
                continue
            n = int(match.group(1))
            results[n] = results.get(n, True) and ok
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        verdict = "PASS" if results[n] else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {n}: {verdict}")
