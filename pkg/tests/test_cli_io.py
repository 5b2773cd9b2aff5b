"""Tests for configuration handling, orchestration and the command line."""

import json
import math

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specmp import cli_io, reproductions
from specmp.cli_io import ConfigError, ExperimentConfig

BLOWUP_RUN = """
[experiment]
kind = run
name = blowup_run

[scheme]
equation = allen_cahn
scheme = galerkin_imex
nu = 1.0
N = 4
steps = 400
tau = 3.0

[initial]
kind = band_limited_expression
payload = 0.6666666666666666 + 0*x
"""

FAILING_SWEEP = """
[experiment]
kind = sweep
name = too_steep

[params]
target = strang_error
N = 16
nu = 0.05
T = 0.5

[axes]
steps = 10, 20

[fit]
x = tau
y = error
slope_min = 3.0
"""


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def shipped_text(name):
    return cli_io._config_dir().joinpath(f"{name}.ini").read_text()


class TestValues:
    @given(st.floats(allow_nan=False, allow_infinity=False))
    @settings(max_examples=100)
    def test_float_round_trip(self, v):
        assert cli_io.parse_value(cli_io.format_value(v)) == v
        assert cli_io.parse_value(cli_io.format_value(v, shortest=True)) == v

    def test_lists_and_scalars(self):
        assert cli_io.parse_value("1, 2, 4") == [1, 2, 4]
        assert cli_io.parse_value("true") is True
        assert cli_io.parse_value("none") is None
        assert cli_io.parse_value("clip(x, -1, 1)") == "clip(x, -1, 1)"

    def test_csv_digits(self):
        text = cli_io.csv_text(["a"], [(0.1,)])
        assert text.splitlines() == ["a", "0.10000000000000001"]


class TestExperimentConfig:
    @pytest.mark.parametrize("name", cli_io.list_configs())
    def test_shipped_round_trip(self, name):
        cfg = cli_io.load_named(name)
        again = ExperimentConfig.from_ini(cfg.to_ini())
        assert again == cfg
        assert again.to_ini() == cfg.to_ini()
        assert again.hash() == cfg.hash()

    @given(st.integers(0, 2**64 - 1), st.floats(1e-6, 10.0), st.integers(2, 512))
    @settings(max_examples=50)
    def test_generated_round_trip(self, seed, nu, N):
        cfg = ExperimentConfig("run", "gen", seed, scheme={"equation": "allen_cahn", "nu": nu, "N": N})
        assert ExperimentConfig.from_ini(cfg.to_ini()) == cfg

    def test_every_check_has_a_config(self):
        shipped = set(cli_io.list_configs())
        assert set(reproductions.CHECKS) <= shipped

    @pytest.mark.parametrize("text, field", [
        ("[experiment]\nkind = banana\n", "experiment.kind"),
        ("[experiment]\nkind = check\nname = nothing\n", "experiment.name"),
        ("[experiment]\nkind = run\nseed = -1\n", "experiment.seed"),
        ("[params]\nx = 1\n", "experiment"),
    ])
    def test_invalid_experiment(self, text, field):
        with pytest.raises(ConfigError, match=f"^{field}"):
            ExperimentConfig.from_ini(text)

    def test_scheme_field_errors(self):
        cfg = ExperimentConfig("run", scheme={"equation": "allen_cahn", "scheme": "strang", "nu": 1, "N": 7,
                                              "tau": 0.1})
        with pytest.raises(ConfigError, match=r"^scheme\.N:"):
            cfg.scheme_config()
        cfg = ExperimentConfig("run", scheme={"equation": "allen_cahn", "scheme": "strang", "nu": 1, "N": 8,
                                              "tau": 0.1, "colour": 3})
        with pytest.raises(ConfigError, match=r"^scheme\.colour"):
            cfg.scheme_config()

    def test_expression_payload_kept_verbatim(self):
        cfg = ExperimentConfig.from_ini(BLOWUP_RUN)
        assert cfg.initial["payload"] == "0.6666666666666666 + 0*x"


class TestOrchestration:
    def test_empty_sweep(self):
        with pytest.raises(ConfigError, match="empty sweep"):
            cli_io.sweep(ExperimentConfig("sweep", "e", params={"target": "kernel_tail"}))

    def test_cap_checked_before_running(self, monkeypatch):
        calls = []
        monkeypatch.setattr(cli_io, "_sweep_point", lambda c, p: calls.append(p) or (1.0, 1.0))
        cfg = ExperimentConfig("sweep", "c", params={"target": "kernel_tail"}, axes={"N": list(range(1, 12))},
                               cap=10)
        with pytest.raises(ConfigError, match="cap"):
            cli_io.sweep(cfg)
        assert calls == []

    def test_default_cap(self):
        assert ExperimentConfig("sweep").cap == 10_000

    def test_kernel_sweep_band(self):
        cfg = ExperimentConfig("sweep", "k", params={"target": "kernel_tail", "d": 1, "beta": 1.0},
                               axes={"N": [2, 4, 8, 16]})
        b = cli_io.sweep(cfg)
        assert len(b.rows) == 4 and b.metrics["ratio_band"] < 25

    def test_threads_do_not_change_rows(self):
        cfg = ExperimentConfig.from_ini(shipped_text("kernel_ratio_sweep"))
        cfg = ExperimentConfig(cfg.kind, cfg.name, cfg.seed, cfg.params, axes={"N": [2, 4, 8, 16, 32]})
        assert cli_io.sweep(cfg, threads=1).rows == cli_io.sweep(cfg, threads=3).rows


class TestCommandLine:
    def test_run_csv_header(self, tmp_path, capsys):
        rc = cli_io.main(["reproduce", "ac_imex_minimal", "--out", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "ac_imex_minimal.csv").read_text().splitlines()
        assert lines[0] == "step,t,linf,l2,energy,margin"
        assert len(lines) == 52

    def test_dry_run_writes_nothing(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc = cli_io.main(["reproduce", "ac_imex_minimal", "--out", str(out), "--dry-run"])
        assert rc == 0
        assert not out.exists()
        assert "[experiment]" in capsys.readouterr().out

    def test_sstar_json(self, tmp_path, capsys):
        rc = cli_io.main(["reproduce", "paper/sstar", "--out", str(tmp_path)])
        assert rc == 0
        summary = json.loads((tmp_path / "sstar.json").read_text())
        jsonschema.validate(summary, cli_io.summary_schema())
        assert summary["verdict"] == "pass"
        assert 0.308443 < summary["metrics"]["s_star"] < 0.308444

    def test_identical_bytes(self, tmp_path, capsys):
        for sub in ("a", "b"):
            assert cli_io.main(["reproduce", "ac_imex_minimal", "--out", str(tmp_path / sub)]) == 0
        assert (tmp_path / "a" / "ac_imex_minimal.csv").read_bytes() == \
            (tmp_path / "b" / "ac_imex_minimal.csv").read_bytes()

    def test_seed_override_changes_output(self, tmp_path, capsys):
        cli_io.main(["reproduce", "ac_imex_minimal", "--out", str(tmp_path / "a")])
        cli_io.main(["reproduce", "ac_imex_minimal", "--out", str(tmp_path / "b"), "--seed", "8"])
        assert (tmp_path / "a" / "ac_imex_minimal.csv").read_bytes() != \
            (tmp_path / "b" / "ac_imex_minimal.csv").read_bytes()

    def test_missing_config_exit_2(self, tmp_path, capsys):
        assert cli_io.main(["run", str(tmp_path / "nope.ini")]) == 2
        assert "config error" in capsys.readouterr().err

    def test_unknown_reproduction_exit_2(self, capsys):
        assert cli_io.main(["reproduce", "nothing_here"]) == 2

    def test_wrong_kind_exit_2(self, capsys):
        path = cli_io._config_dir().joinpath("strang_order_sweep.ini")
        assert cli_io.main(["run", str(path)]) == 2

    def test_field_level_message(self, tmp_path, capsys):
        bad = BLOWUP_RUN.replace("N = 4", "N = 0")
        assert cli_io.main(["run", write(tmp_path, bad)]) == 2
        assert "scheme.N" in capsys.readouterr().err

    def test_numerical_failure_exit_3(self, tmp_path, capsys):
        assert cli_io.main(["run", write(tmp_path, BLOWUP_RUN), "--out", str(tmp_path / "o")]) == 3
        assert "numerical failure" in capsys.readouterr().err

    def test_failed_check_exit_4(self, tmp_path, capsys):
        assert cli_io.main(["sweep", write(tmp_path, FAILING_SWEEP), "--out", str(tmp_path / "o")]) == 4
        assert "FAIL" in capsys.readouterr().out

    def test_format_json_only(self, tmp_path, capsys):
        cli_io.main(["stability", "tau1", "--out", str(tmp_path), "--format", "json"])
        files = sorted(p.name for p in tmp_path.iterdir())
        assert files == ["stability_tau1.json"]

    def test_list(self, capsys):
        assert cli_io.main(["list"]) == 0
        assert "sstar" in capsys.readouterr().out.split()

    @pytest.mark.parametrize("argv", [
        ["kernel", "profile", "--N", "4", "--beta", "0.01"],
        ["kernel", "threshold", "--beta", "0.01", "--N-max", "8"],
        ["stability", "envelope", "--tau", "2", "--alpha", "1.4142135623730951"],
        ["stability", "iterate", "--tau", "0.25", "--alpha0", "2"],
        ["stability", "amplify", "--mode", "resolvent", "--N", "64"],
        ["stability", "adversarial", "--N", "128"],
    ])
    def test_direct_commands_validate(self, argv, tmp_path, capsys):
        rc = cli_io.main(argv + ["--out", str(tmp_path)])
        assert rc == 0
        (summary_path,) = [p for p in tmp_path.iterdir() if p.suffix == ".json"]
        summary = json.loads(summary_path.read_text())
        jsonschema.validate(summary, cli_io.summary_schema())
        assert all(math.isfinite(v) for v in summary["metrics"].values() if isinstance(v, float))

    def test_summary_csv_paths_listed(self, tmp_path, capsys):
        cli_io.main(["stability", "tau1", "--out", str(tmp_path)])
        summary = json.loads((tmp_path / "stability_tau1.json").read_text())
        assert summary["csv"] == [str(tmp_path / "stability_tau1.csv")]
