"""Tests for the command-line front end.

Each subcommand is driven through ``main(argv)`` in-process (no
subprocess overhead); the console entry point itself is exercised once.
Exit-code contract: 0 success, 2 bad input, 3 certification refusal,
4 threshold uniqueness not certified.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

import pytest

import tests._oracles as orc
from turingcert.cli import (
    ConfigError,
    load_instance,
    main,
    main_entry,
    parse_delta_range,
    parse_domain_value,
)
from turingcert.harmonic import default_instance
from turingcert.interval import PI
from turingcert.threshold import canonical_json

DEFAULT_CONFIG = {
    "a": -3, "b": 2, "c": 3, "d": -3, "theta": 1, "l": 2,
    "omega1": [["pi/4", "pi/2"]],
    "omega2": [["pi/5", "pi/2 + 1/4"]],
}


@pytest.fixture
def config_file(tmp_path):
    def write(contents) -> str:
        path = tmp_path / "config.json"
        path.write_text(contents if isinstance(contents, str)
                        else json.dumps(contents))
        return str(path)
    return write


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


class TestDomainParser:
    def test_pi_fractions_match_library_constants(self):
        assert parse_domain_value("pi/4").as_pair() == (PI / 4.0).as_pair()
        assert parse_domain_value("pi/2 + 1/4").as_pair() == \
            (PI / 2.0 + 0.25).as_pair()
        assert parse_domain_value("-pi/4").as_pair() == (-(PI / 4.0)).as_pair()

    def test_enclosures_contain_exact_values(self):
        plo, phi = orc.pi_window()
        for expr, flo, fhi in [
            ("pi/5", plo / 5, phi / 5),
            ("3*pi/4", plo * 3 / 4, phi * 3 / 4),
            ("pi/2 + 1/4", plo / 2 + Fraction(1, 4),
             phi / 2 + Fraction(1, 4)),
        ]:
            assert orc.contains_window(parse_domain_value(expr), (flo, fhi))

    def test_plain_numbers(self):
        assert parse_domain_value(0.25).as_pair() == [0.25, 0.25]
        assert parse_domain_value(2).as_pair() == [2.0, 2.0]
        assert orc.contains_frac(parse_domain_value("1/3"), Fraction(1, 3))
        assert orc.contains_frac(parse_domain_value(0.1), Fraction(1, 10))

    def test_rejects_malformed_tokens(self):
        for bad in ("pi*2", "2pi", "", "pi/0", "foo", "pi pi", True, [1]):
            with pytest.raises(ConfigError):
                parse_domain_value(bad)


class TestDeltaRange:
    def test_exact_decimal_endpoints(self):
        lo, hi = parse_delta_range("2.428:2.432")
        assert lo == Fraction(607, 250)
        assert hi == Fraction(304, 125)

    def test_rational_and_point_ranges(self):
        assert parse_delta_range("12/5:5/2") == (Fraction(12, 5),
                                                 Fraction(5, 2))
        assert parse_delta_range("1:1") == (Fraction(1), Fraction(1))

    def test_rejects_malformed(self):
        for bad in ("1", "4:2", "abc:1", "1:xyz", ":"):
            with pytest.raises(ConfigError):
                parse_delta_range(bad)


class TestLoadInstance:
    def test_default_when_no_path(self):
        inst = load_instance(None)
        assert canonical_json(inst.to_json()) == \
            canonical_json(default_instance().to_json())

    def test_file_reproduces_builtin_exactly(self, config_file):
        inst = load_instance(config_file(DEFAULT_CONFIG))
        assert canonical_json(inst.to_json()) == \
            canonical_json(default_instance().to_json())

    def test_theta_and_length_default(self, config_file):
        cfg = {k: v for k, v in DEFAULT_CONFIG.items()
               if k not in ("theta", "l")}
        inst = load_instance(config_file(cfg))
        assert inst.vartheta == 1.0 and inst.length == 2.0

    def test_rejects_bad_files(self, config_file):
        with pytest.raises(ConfigError):
            load_instance("/nonexistent/config.json")
        with pytest.raises(ConfigError):
            load_instance(config_file("not json {"))
        with pytest.raises(ConfigError):
            load_instance(config_file([1, 2]))

    def test_rejects_bad_keys(self, config_file):
        extra = dict(DEFAULT_CONFIG, bogus=1)
        with pytest.raises(ConfigError, match="unknown"):
            load_instance(config_file(extra))
        missing = {k: v for k, v in DEFAULT_CONFIG.items() if k != "b"}
        with pytest.raises(ConfigError, match="missing"):
            load_instance(config_file(missing))

    def test_rejects_unstable_kinetics(self, config_file):
        bad = dict(DEFAULT_CONFIG, a=3)
        with pytest.raises(ConfigError, match="trace"):
            load_instance(config_file(bad))

    def test_rejects_malformed_domains(self, config_file):
        bad = dict(DEFAULT_CONFIG, omega1=[["pi/4"]])
        with pytest.raises(ConfigError, match="pair"):
            load_instance(config_file(bad))
        bad = dict(DEFAULT_CONFIG, omega1=[])
        with pytest.raises(ConfigError, match="nonempty"):
            load_instance(config_file(bad))


# ---------------------------------------------------------------------------
# subcommands through main()
# ---------------------------------------------------------------------------


class TestSpectrumCommand:
    def test_single_stable_cell(self, tmp_path, capsys):
        out = tmp_path / "run"
        rc = main(["spectrum", "--delta", "1:1.004",
                   "--out", str(out), "--quiet"])
        assert rc == 0
        assert "Stable" in capsys.readouterr().out
        lines = (out / "sweep.jsonl").read_text().splitlines()
        assert len(lines) == 1
        row = json.loads(lines[0])
        assert row["classification"] == "Stable"
        assert row["N"] == 50 and row["p"] == 2.0
        assert row["disk0"]["center_re"][1] < 0

    def test_zero_coupling_disk_left_of_half(self, tmp_path):
        out = tmp_path / "run"
        assert main(["spectrum", "--delta", "0:0.004",
                     "--out", str(out), "--quiet"]) == 0
        row = json.loads((out / "sweep.jsonl").read_text())
        assert row["classification"] == "Stable"
        top = row["disk0"]["center_re"][1] + row["disk0"]["radius"][1]
        assert top < -0.5

    def test_unstable_cell(self, tmp_path):
        out = tmp_path / "run"
        assert main(["spectrum", "--delta", "3.996:4",
                     "--out", str(out), "--quiet"]) == 0
        row = json.loads((out / "sweep.jsonl").read_text())
        assert row["classification"] == "UnstableOne"

    def test_undetermined_cell_still_exits_zero(self, tmp_path):
        out = tmp_path / "run"
        assert main(["spectrum", "--delta", "2.44:2.444",
                     "--out", str(out), "--quiet"]) == 0
        row = json.loads((out / "sweep.jsonl").read_text())
        assert row["classification"] == "Undetermined"

    def test_grid_splits_range(self, tmp_path):
        out = tmp_path / "run"
        assert main(["spectrum", "--delta", "0:0.008", "--grid", "2",
                     "--n", "16", "--out", str(out), "--quiet"]) == 0
        lines = (out / "sweep.jsonl").read_text().splitlines()
        assert len(lines) == 2
        a, b = (json.loads(x) for x in lines)
        assert a["delta"][1] >= 0.004 >= b["delta"][0]

    def test_disks_csv_and_manifest(self, tmp_path):
        out = tmp_path / "run"
        assert main(["spectrum", "--delta", "1:1.004", "--n", "12",
                     "--out", str(out), "--quiet"]) == 0
        lines = (out / "disks.csv").read_text().splitlines()
        assert lines[0] == ("k,index,center_re_lo,center_re_hi,"
                            "center_im_lo,center_im_hi,radius_hi")
        assert len(lines) == 1 + 24   # 2N disks
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert manifest["command"] == "spectrum"
        assert sorted(manifest["outputs"]) == ["disks.csv", "sweep.jsonl"]
        for name, digest in manifest["outputs"].items():
            data = (out / name).read_bytes()
            assert hashlib.sha256(data).hexdigest() == digest

    def test_point_range_with_grid_rejected(self, tmp_path):
        rc = main(["spectrum", "--delta", "1:1", "--grid", "2",
                   "--out", str(tmp_path / "x"), "--quiet"])
        assert rc == 2


class TestEigenCommand:
    def test_zero_coupling_closed_form(self, tmp_path, capsys):
        out = tmp_path / "eigen.json"
        rc = main(["eigen", "--delta", "0:0", "--n", "300",
                   "--out", str(out), "--quiet"])
        assert rc == 0
        assert "identified as the leading eigenvalue: yes" in \
            capsys.readouterr().out
        payload = json.loads(out.read_text())
        slo, shi = orc.sqrt_window(6.0)
        d0 = payload["nk"]["d0"]
        assert d0[0] <= float(slo) - 3 and float(shi) - 3 <= d0[1]
        assert payload["nk"]["identified_as_d0"] is True
        assert payload["derivative"]["range"][0] > 0
        assert payload["delta_exact"] == ["0", "0"]

    def test_contraction_failure_exits_three(self, tmp_path, capsys):
        rc = main(["eigen", "--delta", "2.44:2.444", "--n", "8",
                   "--out", str(tmp_path / "x.json"), "--quiet"])
        assert rc == 3
        assert "ContractionFails" in capsys.readouterr().err


class TestDisksCommand:
    def test_csv_format(self, tmp_path):
        out = tmp_path / "run"
        rc = main(["disks", "--delta", "1:1.004", "--n", "10",
                   "--out", str(out), "--quiet"])
        assert rc == 0
        lines = (out / "disks.csv").read_text().splitlines()
        assert lines[0] == ("index,center_re_lo,center_re_hi,"
                            "center_im_lo,center_im_hi,radius_hi")
        assert len(lines) == 1 + 20
        for line in lines[1:]:
            parts = line.split(",")
            assert int(parts[0]) >= 0
            assert float(parts[5]) >= 0.0   # radius


class TestThresholdCommand:
    def test_uncertifiable_run_exits_four(self, tmp_path, capsys):
        out = tmp_path / "bundle"
        rc = main(["threshold", "--grid", "40", "--n", "24",
                   "--nk-n", "120", "--out", str(out), "--quiet"])
        assert rc == 4
        assert "NOT certified" in capsys.readouterr().out
        summary = json.loads((out / "threshold.json").read_text())
        assert summary["unique"] is False
        assert "derivative" in summary["reason"]
        assert (out / "sweep.jsonl").exists()
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert manifest["command"] == "threshold"
        assert "sweep_seconds" in manifest["phases"]
        assert "refine_seconds" in manifest["phases"]

    def test_bad_sweep_parameters_exit_two(self, tmp_path):
        rc = main(["threshold", "--grid", "1",
                   "--out", str(tmp_path / "x"), "--quiet"])
        assert rc == 2

    def test_unstable_kinetics_config_exits_two(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps(dict(DEFAULT_CONFIG, a=3)))
        rc = main(["threshold", "--config", str(cfg),
                   "--out", str(tmp_path / "x"), "--quiet"])
        assert rc == 2
        assert "trace" in capsys.readouterr().err


class TestEntryPoints:
    def test_bad_delta_exits_two(self, tmp_path):
        assert main(["eigen", "--delta", "bogus",
                     "--out", str(tmp_path / "x.json")]) == 2

    def test_unknown_command_exits_two(self, capsys):
        assert main(["frobnicate"]) == 2
        capsys.readouterr()

    def test_version_flag(self, capsys):
        assert main(["--version"]) == 0
        assert "turingcert" in capsys.readouterr().out

    def test_console_entry_raises_system_exit(self, monkeypatch, capsys):
        monkeypatch.setattr("sys.argv", ["turingcert", "--version"])
        with pytest.raises(SystemExit) as exc:
            main_entry()
        assert exc.value.code == 0
        capsys.readouterr()

    def test_jobs_env_fallback(self, monkeypatch):
        from turingcert.threshold import SweepConfig
        monkeypatch.setenv("TURINGCERT_JOBS", "3")
        assert SweepConfig().jobs == 3
        monkeypatch.setenv("TURINGCERT_JOBS", "junk")
        assert SweepConfig().jobs == 1
