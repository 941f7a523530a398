"""Unit tests for the command-line entry point."""

import json

import pytest

from main import EXIT_PASS, EXIT_TOLERANCE, EXIT_USAGE, main
from spacetime_qc.harness.schemas import ExperimentKind, ResultRecord
from spacetime_qc.harness.storage import load_records

BOUNDS_ARGS = ["bounds-table", "--param", "ms=4", "--param", "ns=4", "--param", "ds=160"]


@pytest.mark.unit
class TestCommands:
    """Tests for successful invocations."""

    def test_emit_plot(self, results_dir, capsys):
        """Test the bounds table is printed as TSV."""
        assert main(BOUNDS_ARGS + ["--emit-plot", "bounds"]) == EXIT_PASS
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "m\tn\td\tthm1_bound\tL\tin_domain\tswap_layers\tlower_bound"
        assert lines[1] == "4\t4\t160\t0.8\t13.75\tTrue\t40\t13.75"

    def test_prints_record(self, results_dir, capsys):
        """Test the record is printed as one JSON line by default."""
        assert main(["teleport-verify", "--param", "n=1", "--param", "trials=3", "--seed", "4"]) == EXIT_PASS
        record = json.loads(capsys.readouterr().out.strip())
        assert record["kind"] == "teleport-verify"
        assert record["seed"] == 4

    def test_out_bare_name_goes_to_results_dir(self, results_dir, capsys):
        """Test --out without a directory writes under the results directory."""
        assert main(BOUNDS_ARGS + ["--out", "runs.ndjson"]) == EXIT_PASS
        assert main(BOUNDS_ARGS + ["--out", "runs.ndjson"]) == EXIT_PASS
        records = load_records(results_dir / "runs.ndjson")
        assert len(records) == 2
        assert records[0].payload_json() == records[1].payload_json()
        assert capsys.readouterr().out == ""

    def test_out_with_directory(self, results_dir, tmp_path):
        """Test explicit paths are used as given."""
        path = tmp_path / "elsewhere" / "out.ndjson"
        assert main(BOUNDS_ARGS + ["--out", str(path)]) == EXIT_PASS
        assert path.exists()

    def test_config_file(self, results_dir, tmp_path, capsys):
        """Test a config file with command-line overrides."""
        path = tmp_path / "bounds.cfg"
        path.write_text("# grid\nkind = bounds-table\nms = 4\nns = 4\nds = 0\n")
        assert main(["bounds-table", "--config", str(path), "--param", "ds=400", "--emit-plot", "bounds"]) == 0
        row = capsys.readouterr().out.splitlines()[1].split("\t")
        assert row[2] == "400"
        assert row[3] == "2.0"


@pytest.mark.unit
class TestCheckConfig:
    """Tests for configuration printing."""

    def test_settings_banner(self, clean_env, capsys):
        """Test the top-level flag prints environment settings."""
        assert main(["--check-config"]) == EXIT_PASS
        out = capsys.readouterr().out
        assert "CONFIGURATION" in out
        assert "Max dense qubits: 24" in out

    def test_experiment_banner(self, clean_env, capsys):
        """Test the subcommand flag prints the resolved config and digest."""
        assert main(["accdim", "--seed", "5", "--param", "ds=0,1", "--check-config"]) == EXIT_PASS
        out = capsys.readouterr().out
        assert "EXPERIMENT accdim" in out
        assert "seed = 5" in out
        assert "ds = 0,1" in out
        assert "digest = " in out


@pytest.mark.unit
class TestExitCodes:
    """Tests for usage and tolerance exit codes."""

    def test_no_subcommand(self, clean_env):
        """Test a missing experiment is a usage error."""
        assert main([]) == EXIT_USAGE

    def test_unknown_subcommand(self, clean_env):
        """Test unknown experiments exit with status 1."""
        with pytest.raises(SystemExit) as excinfo:
            main(["quantum-supremacy"])
        assert excinfo.value.code == EXIT_USAGE

    def test_invalid_param(self, clean_env, capsys):
        """Test invalid values and malformed overrides."""
        assert main(["teleport-verify", "--param", "n=0"]) == EXIT_USAGE
        assert main(["teleport-verify", "--param", "oops"]) == EXIT_USAGE
        assert "error:" in capsys.readouterr().err

    def test_unknown_series(self, clean_env):
        """Test an unknown plot series is rejected before running."""
        assert main(BOUNDS_ARGS + ["--emit-plot", "histogram"]) == EXIT_USAGE

    def test_config_file_errors(self, clean_env, tmp_path):
        """Test missing files and kind mismatches."""
        assert main(["accdim", "--config", str(tmp_path / "missing.cfg")]) == EXIT_USAGE
        path = tmp_path / "bounds.cfg"
        path.write_text("kind = bounds-table\n")
        assert main(["accdim", "--config", str(path)]) == EXIT_USAGE

    def test_tolerance_failure(self, results_dir, monkeypatch):
        """Test failed tolerances exit with status 2."""

        def failing_run(config):
            return ResultRecord(
                digest=config.digest(),
                kind=ExperimentKind.TELEPORT_VERIFY,
                seed=config.seed,
                version="test",
                passed=False,
                failures=["min fidelity below tolerance"],
            )

        monkeypatch.setattr("spacetime_qc.harness.runner.run", failing_run)
        assert main(["teleport-verify", "--param", "n=1"]) == EXIT_TOLERANCE
