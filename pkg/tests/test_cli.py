"""End-to-end tests of the command-line interface.

Each test drives main(argv) in-process and inspects the exit code plus
captured stdout/stderr.  Exit code contract: 0 = checks passed, 1 = a
certain violation or falsified claim, 2 = configuration or input error.
"""

import json

import pytest

from divisum.cli import EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION, RunConfig, main
from divisum.errors import DomainError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("DIVISUM_PRECISION", raising=False)


class TestRunConfig:
    def test_defaults_validate(self):
        RunConfig().validate()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"precision_bits": 32},
            {"segment_size": 100},
            {"workers": 0},
            {"output_format": "yaml"},
        ],
    )
    def test_bad_values_rejected(self, kwargs):
        with pytest.raises(DomainError):
            RunConfig(**kwargs).validate()


class TestConstantsCommand:
    def test_text(self, capsys):
        assert main(["constants"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "constants table at 256 bits" in out
        assert "gamma" in out and "C4" in out and "beta" in out

    def test_structured(self, capsys):
        assert main(["constants", "--format", "structured"]) == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["precision_bits"] == 256
        assert obj["gamma"]["mid"] == pytest.approx(0.5772156649015329, rel=1e-15)
        assert obj["gamma"]["rad"] < 1e-25
        assert obj["C1"]["formula"] == "1/6 (exact)"

    def test_tabular(self, capsys):
        assert main(["constants", "--format", "tabular"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "name,value,radius,formula"
        assert any(line.startswith("gamma,") for line in lines)


class TestSumCommand:
    def test_identity_frozen_value(self, capsys):
        assert main(["sum", "d4", "1e6"]) == EXIT_OK
        assert "578262093" in capsys.readouterr().out

    def test_methods_agree(self, capsys):
        assert main(["sum", "dsq", "10_000", "--method", "both"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "methods agree" in out

    def test_structured(self, capsys):
        assert main(["sum", "d", "1000", "--method", "both", "--format",
                     "structured"]) == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["identity"] == obj["sieve"] == 7069
        assert obj["agree"] is True

    def test_tabular(self, capsys):
        assert main(["sum", "d", "100", "--format", "tabular"]) == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "kind,x,method,value"
        assert lines[1] == "d,100,identity,482"

    def test_sieve_cap(self, capsys):
        assert main(["sum", "d", "1e9", "--method", "sieve"]) == EXIT_CONFIG
        assert "identity" in capsys.readouterr().err


class TestEvalCommand:
    def test_text_enclosure(self, capsys):
        assert main(["eval", "main-d4", "10"]) == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("main-d4(10) = 80.3709945557148")

    def test_structured_enclosure(self, capsys):
        assert main(["eval", "delta", "100", "--format", "structured"]) == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["mid"] == pytest.approx(6.039848420884291, rel=1e-12)
        assert obj["lower"] <= obj["mid"] <= obj["upper"]

    def test_approx_result_text(self, capsys):
        assert main(["eval", "s1-approx", "100"]) == EXIT_OK
        assert "+/-" in capsys.readouterr().out

    def test_approx_result_structured_below_range(self, capsys):
        assert main(["eval", "s3-approx", "100", "--format", "structured"]) == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["certified"] is False
        assert "main" in obj and "radius" in obj

    def test_rational_point(self, capsys):
        assert main(["eval", "env-d4", "19/2"]) == EXIT_OK
        assert "env-d4(19/2)" in capsys.readouterr().out

    def test_domain_error_exits_two(self, capsys):
        assert main(["eval", "games", "3"]) == EXIT_CONFIG
        assert "error:" in capsys.readouterr().err

    def test_unknown_quantity_rejected_by_parser(self):
        with pytest.raises(SystemExit):
            main(["eval", "nonsense", "10"])


class TestVerifyCommand:
    def test_full_spec_clean_range(self, capsys):
        rc = main(["verify", "d4-full", "--to", "2000", "--workers", "1"])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        assert "violations      0" in out
        assert "spec            d4-full" in out

    def test_alias_resolves(self, capsys):
        rc = main(["verify", "thm1", "--to", "500", "--workers", "1"])
        assert rc == EXIT_OK
        assert "d4-full" in capsys.readouterr().out

    def test_structured_report(self, capsys):
        rc = main(["verify", "dsq-full", "--to", "300", "--workers", "1",
                   "--format", "structured"])
        assert rc == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["schema"] == "divisum.report/1"
        assert obj["spec"] == "dsq-full"
        assert obj["range"] == [2, 300]
        assert obj["violations"] == []

    def test_violations_exit_one(self, capsys):
        rc = main(["verify", "delta", "--from", "5700", "--to", "5800",
                   "--workers", "1"])
        out = capsys.readouterr().out
        assert rc == EXIT_VIOLATION
        assert "x=5760 (left)" in out

    def test_violations_tabular(self, capsys):
        rc = main(["verify", "d4-clean", "--from", "2", "--to", "50",
                   "--workers", "1", "--format", "tabular"])
        assert rc == EXIT_VIOLATION
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "x,side,lhs,rhs_lo,rhs_hi,ratio"
        assert len(lines) > 1

    def test_clean_spec_default_range_starts_at_threshold(self, capsys):
        rc = main(["verify", "dsq-clean-unit", "--to", "3000", "--workers", "1",
                   "--format", "structured"])
        assert rc == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["range"] == [7, 3000]

    def test_s1_spot(self, capsys):
        rc = main(["verify", "s1", "--to", "3000"])
        assert rc == EXIT_OK
        assert "s1-direct" in capsys.readouterr().out

    def test_s2_points(self, capsys):
        rc = main(["verify", "s2", "--to", "20000", "--points", "5",
                   "--format", "structured"])
        assert rc == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["spec"] == "s2-checkpoints"
        assert obj["checked"] == 5

    def test_unknown_spec(self, capsys):
        assert main(["verify", "thm99", "--to", "100"]) == EXIT_CONFIG
        assert "unknown spec" in capsys.readouterr().err


class TestThresholdCommand:
    def test_recovers_claimed_threshold(self, capsys):
        rc = main(["threshold", "d4-clean", "--limit", "1000"])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        assert "threshold 193" in out
        assert "last violation at 192" in out

    def test_structured(self, capsys):
        rc = main(["threshold", "dsq-clean-unit", "--limit", "500",
                   "--format", "structured"])
        assert rc == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["threshold"] == 7
        assert obj["last_violation"] == 6
        assert obj["crossing"] == pytest.approx(6.2212395668029785, abs=2e-6)

    def test_tabular(self, capsys):
        rc = main(["threshold", "dsq-clean-quarter", "--limit", "600",
                   "--format", "tabular"])
        assert rc == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "spec,scan_limit,threshold,last_violation,crossing"
        assert lines[1].startswith("dsq-clean-quarter,600,433,432,")

    def test_unknown_spec(self, capsys):
        assert main(["threshold", "delta", "--limit", "100"]) == EXIT_CONFIG

    def test_limit_too_small(self, capsys):
        assert main(["threshold", "dsq-clean-quarter", "--limit", "100"]) == EXIT_CONFIG


class TestClassBoundCommand:
    def test_single_field_text(self, capsys):
        rc = main(["class-bound", "--nk", "4", "--r2", "2", "--disc", "125"])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        assert "b = 1.699207906" in out
        assert "class-number bound (exact sum): 1" in out

    def test_r1_defaults_from_signature(self, capsys):
        rc = main(["class-bound", "--nk", "4", "--r2", "0", "--disc", "725",
                   "--format", "structured"])
        assert rc == EXIT_OK
        obj = json.loads(capsys.readouterr().out)
        assert obj["r1"] == 4
        assert obj["bound_exact"] == 5
        assert obj["bound_formula"] is None

    def test_fraction_disc(self, capsys):
        rc = main(["class-bound", "--nk", "4", "--r2", "0", "--disc", "1024/9"])
        assert rc == EXIT_OK
        assert "bound (exact sum): 1" in capsys.readouterr().out

    def test_missing_args(self, capsys):
        assert main(["class-bound", "--nk", "4"]) == EXIT_CONFIG
        assert "single mode" in capsys.readouterr().err

    def test_bad_signature_exits_two(self, capsys):
        rc = main(["class-bound", "--nk", "4", "--r1", "3", "--r2", "1",
                   "--disc", "99"])
        assert rc == EXIT_CONFIG

    def test_batch_ok(self, tmp_path, capsys):
        src = tmp_path / "fields.csv"
        src.write_text(
            "label,n_K,r1,r2,abs_disc\ncyclo5,4,0,2,125\nreal725,4,4,0,725\n"
        )
        rc = main(["class-bound", "--batch", str(src)])
        assert rc == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("label,n_K,r1,r2,abs_disc,b_mid")
        assert len(lines) == 3

    def test_batch_with_errors(self, tmp_path, capsys):
        src = tmp_path / "fields.csv"
        src.write_text("label,n_K,r1,r2,abs_disc\nbad,4,3,1,99\n")
        rc = main(["class-bound", "--batch", str(src)])
        assert rc == EXIT_CONFIG
        assert "SignatureError" in capsys.readouterr().out

    def test_batch_missing_file(self, capsys):
        assert main(["class-bound", "--batch", "/nonexistent.csv"]) == EXIT_CONFIG


class TestCompareCommand:
    def test_default_points(self, capsys):
        rc = main(["compare"])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        assert "sharper" in out
        assert "yes" in out

    def test_explicit_point_below_games_domain(self, capsys):
        rc = main(["compare", "2", "--format", "tabular"])
        assert rc == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        # the games column is empty below its domain
        assert lines[1].split(",")[5] == ""

    def test_structured(self, capsys):
        rc = main(["compare", "10", "1000", "--format", "structured"])
        assert rc == EXIT_OK
        rows = json.loads(capsys.readouterr().out)
        assert [r["x"] for r in rows] == [10.0, 1000.0]
        assert all(r["d4_sharper"] for r in rows)


class TestConfigResolution:
    def test_precision_flag(self, capsys):
        rc = main(["constants", "--precision", "128", "--format", "structured"])
        assert rc == EXIT_OK
        assert json.loads(capsys.readouterr().out)["precision_bits"] == 128

    def test_env_precision(self, capsys, monkeypatch):
        monkeypatch.setenv("DIVISUM_PRECISION", "128")
        rc = main(["constants", "--format", "structured"])
        assert rc == EXIT_OK
        assert json.loads(capsys.readouterr().out)["precision_bits"] == 128

    def test_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("DIVISUM_PRECISION", "128")
        rc = main(["constants", "--precision", "256", "--format", "structured"])
        assert rc == EXIT_OK
        assert json.loads(capsys.readouterr().out)["precision_bits"] == 256

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"format": "structured", "precision": 128}')
        rc = main(["constants", "--config", str(cfg)])
        assert rc == EXIT_OK
        assert json.loads(capsys.readouterr().out)["precision_bits"] == 128

    def test_config_file_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"precison": 128}')
        assert main(["constants", "--config", str(cfg)]) == EXIT_CONFIG
        assert "unknown config keys" in capsys.readouterr().err

    def test_invalid_precision_exits_two(self, capsys):
        assert main(["constants", "--precision", "32"]) == EXIT_CONFIG

    def test_invalid_segment_size_exits_two(self, capsys):
        assert main(["sum", "d", "100", "--segment-size", "10"]) == EXIT_CONFIG

    def test_output_file(self, tmp_path):
        path = tmp_path / "out.json"
        rc = main(["sum", "d4", "1000", "--format", "structured",
                   "--output", str(path)])
        assert rc == EXIT_OK
        obj = json.loads(path.read_text())
        assert obj["identity"] == 93237
