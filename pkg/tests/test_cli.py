"""
Tests for the omega-lab command line.
Uses click.testing.CliRunner to drive the root command group.
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

from omega_lab.main import cli, dispatch

ROOT = Path(__file__).resolve().parent.parent
MACHINES = ROOT / "machines"
WORKED = str(MACHINES / "worked-example.json")
BOUNDARY = str(MACHINES / "kraft-boundary.json")
FIXTURE = str(MACHINES / "berry-fixture.json")
UNIVERSAL = str(MACHINES / "bitbf-v1.json")
BAD_PREFIX = str(MACHINES / "bad-prefix.json")


@pytest.fixture
def runner():
    """Provide a CLI runner."""
    return CliRunner()


@pytest.fixture
def inconsistent_table(tmp_path):
    path = tmp_path / "three-quarters.json"
    path.write_text(json.dumps({
        "format": 1,
        "type": "table",
        "programs": [{"bits": "01"}, {"bits": "10"}, {"bits": "11"}],
    }))
    return str(path)


class TestOmegaCommands:
    """Test suite for omega-exact, omega-stages and oracle."""

    def test_omega_exact_worked_example(self, runner):
        result = runner.invoke(cli, ["omega-exact", "--machine", WORKED])
        assert result.exit_code == 0
        assert result.stdout == "3/2^5 = 0.000110\n"

    def test_omega_exact_boundary(self, runner):
        result = runner.invoke(cli, ["omega-exact", "--machine", BOUNDARY])
        assert result.exit_code == 0
        assert result.stdout == "1/2^0 = 1.0\n"
        assert "warning" in result.stderr

    def test_omega_exact_universal_fails(self, runner):
        result = runner.invoke(cli, ["omega-exact", "--machine", UNIVERSAL])
        assert result.exit_code == 2
        assert result.stderr.startswith("error: ")
        assert result.stdout == ""

    def test_omega_exact_structured(self, runner):
        result = runner.invoke(cli, ["omega-exact", "--machine", WORKED, "--format", "structured"])
        record = json.loads(result.stdout)
        assert record == {"omega": "3/2^5", "digits": 6, "boundary": False, "omega_binary": "0.000110"}

    def test_omega_stages_text(self, runner):
        result = runner.invoke(cli, ["omega-stages", "--machine", WORKED, "--stages", "6"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert len(lines) == 6
        assert lines[-1].startswith("stage 6: omega_lower 3/2^5 = 0.000110")

    def test_omega_stages_structured(self, runner):
        result = runner.invoke(cli, ["omega-stages", "--machine", WORKED, "--stages", "6", "--format", "structured"])
        records = [json.loads(line) for line in result.stdout.splitlines()]
        assert [r["stage"] for r in records] == [1, 2, 3, 4, 5, 6]
        assert records[-1]["omega_lower"] == "3/2^5"
        assert [h["program"] for h in records[5]["newly_halted"]] == ["000001", "000011"]

    def test_omega_stages_resume(self, runner, tmp_path):
        checkpoint = str(tmp_path / "stages.json")
        fresh = runner.invoke(cli, ["omega-stages", "--machine", UNIVERSAL, "--stages", "12"])
        first = runner.invoke(cli, ["omega-stages", "--machine", UNIVERSAL, "--stages", "5", "--checkpoint", checkpoint])
        rest = runner.invoke(cli, ["omega-stages", "--machine", UNIVERSAL, "--stages", "12", "--checkpoint", checkpoint])
        assert first.stdout + rest.stdout == fresh.stdout

    def test_omega_stages_checkpoint_mismatch(self, runner, tmp_path):
        checkpoint = str(tmp_path / "stages.json")
        runner.invoke(cli, ["omega-stages", "--machine", WORKED, "--stages", "3", "--checkpoint", checkpoint])
        result = runner.invoke(cli, ["omega-stages", "--machine", FIXTURE, "--stages", "6", "--checkpoint", checkpoint])
        assert result.exit_code == 2

    def test_output_is_reproducible(self, runner):
        args = ["omega-stages", "--machine", UNIVERSAL, "--stages", "10", "--format", "structured"]
        assert runner.invoke(cli, args).stdout == runner.invoke(cli, args).stdout

    def test_output_is_identical_across_processes(self):
        args = [sys.executable, "-m", "omega_lab.main", "omega-stages", "--machine", UNIVERSAL, "--stages", "12", "--format", "structured"]
        first = subprocess.run(args, cwd=ROOT, capture_output=True, check=True)
        second = subprocess.run(args, cwd=ROOT, capture_output=True, check=True)
        assert first.stdout
        assert first.stdout == second.stdout

    def test_oracle_resolved(self, runner):
        result = runner.invoke(cli, ["oracle", "--machine", WORKED, "--bits", "000110"])
        assert result.exit_code == 0
        assert "resolved at stage 6" in result.stdout
        assert "halts: 0001 000001 000011" in result.stdout

    def test_oracle_ceiling(self, runner):
        result = runner.invoke(cli, ["oracle", "--machine", WORKED, "--bits", "000111", "--fuel", "8"])
        assert result.exit_code == 0
        assert "unresolved after stage 8" in result.stdout
        assert "ceiling" in result.stderr

    def test_oracle_inconsistent_bits(self, runner, inconsistent_table):
        result = runner.invoke(cli, ["oracle", "--machine", inconsistent_table, "--bits", "01"])
        assert result.exit_code == 2
        assert "cannot be the first 2 bits" in result.stderr

    def test_oracle_structured(self, runner):
        result = runner.invoke(cli, ["oracle", "--machine", WORKED, "--bits", "0001", "--format", "structured"])
        record = json.loads(result.stdout)
        assert record["resolved"] is True
        assert record["halting"] == ["0001"]
        assert record["max_length"] == 4


class TestMachineCommands:
    """Test suite for run, validate and kraft."""

    def test_validate_bad_prefix(self, runner):
        result = runner.invoke(cli, ["validate", "--machine", BAD_PREFIX])
        assert result.exit_code == 2
        assert "(0, 01)" in result.stderr

    def test_validate_table(self, runner):
        result = runner.invoke(cli, ["validate", "--machine", WORKED])
        assert result.exit_code == 0
        assert "programs=3" in result.stdout
        assert "kraft sum 3/2^5 = 0.000110" in result.stdout

    def test_validate_boundary_warns(self, runner):
        result = runner.invoke(cli, ["validate", "--machine", BOUNDARY])
        assert result.exit_code == 0
        assert "exactly 1" in result.stderr

    def test_validate_malformed_spec(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"format": 1, "type": "universal", "isa": "bitbf-v9"}')
        result = runner.invoke(cli, ["validate", "--machine", str(path)])
        assert result.exit_code == 2

    def test_run_slow_halter(self, runner):
        result = runner.invoke(cli, ["run", "--machine", UNIVERSAL, "--program", "00101001001101010110"])
        assert result.exit_code == 0
        assert result.stdout == "halted output=(empty) steps=7 bits_consumed=20\n"

    def test_run_exhausted(self, runner):
        result = runner.invoke(cli, ["run", "--machine", UNIVERSAL, "--program", "011001101110", "--fuel", "30"])
        assert result.stdout == "exhausted fuel=30\n"

    def test_run_invalid_program(self, runner):
        result = runner.invoke(cli, ["run", "--machine", UNIVERSAL, "--program", "10000", "--format", "structured"])
        assert result.exit_code == 0
        record = json.loads(result.stdout)
        assert record["kind"] == "invalid"
        assert record["reason"] == "trailing bits"

    def test_run_rejects_non_bits(self, runner):
        result = runner.invoke(cli, ["run", "--machine", UNIVERSAL, "--program", "10a0"])
        assert result.exit_code == 2

    def test_run_program_beyond_length_bound(self, runner):
        result = runner.invoke(cli, ["run", "--machine", UNIVERSAL, "--program", "1" * 100])
        assert result.exit_code == 2
        assert "100" in result.stderr

    def test_kraft_arguments(self, runner):
        result = runner.invoke(cli, ["kraft", "0", "10", "11"])
        assert result.exit_code == 0
        assert "kraft sum 1/2^0 = 1.00" in result.stdout
        assert "complete (sum = 1)" in result.stdout

    def test_kraft_machine(self, runner):
        result = runner.invoke(cli, ["kraft", "--machine", WORKED, "--format", "structured"])
        record = json.loads(result.stdout)
        assert record["kraft_sum"] == "3/2^5"
        assert record["complete"] is False

    def test_kraft_violation(self, runner):
        result = runner.invoke(cli, ["kraft", "0", "01"])
        assert result.exit_code == 2
        assert "(0, 01)" in result.stderr

    def test_kraft_needs_one_source(self, runner):
        assert runner.invoke(cli, ["kraft"]).exit_code == 2
        assert runner.invoke(cli, ["kraft", "--machine", WORKED, "0"]).exit_code == 2

    def test_unknown_flag(self, runner):
        result = runner.invoke(cli, ["validate", "--machine", WORKED, "--colour"])
        assert result.exit_code == 2


class TestComplexityCommands:
    """Test suite for complexity and berry."""

    def test_complexity_table(self, runner):
        result = runner.invoke(cli, ["complexity", "--machine", WORKED, "--target", "1", "--max-size", "8"])
        assert result.exit_code == 0
        assert result.stdout.splitlines()[0] == "H(1) <= 4 (exact) witness=0001 steps=1"

    def test_complexity_empty_target(self, runner):
        result = runner.invoke(cli, [
            "complexity", "--machine", UNIVERSAL, "--target", "", "--max-size", "4", "--fuel", "10", "--format", "structured",
        ])
        record = json.loads(result.stdout)
        assert (record["bound_kind"], record["value"], record["witness"]) == ("exact", 4, "1000")

    def test_complexity_not_found(self, runner):
        result = runner.invoke(cli, ["complexity", "--machine", WORKED, "--target", "0", "--max-size", "8"])
        assert "infinite within 8 bits (exact)" in result.stdout

    def test_berry_first_complex_integer(self, runner):
        result = runner.invoke(cli, ["berry", "--machine", FIXTURE, "--max-size", "6"])
        assert result.exit_code == 0
        assert result.stdout.splitlines()[0] == "integer 4"

    def test_berry_never_halts_decider(self, runner):
        decider = str(MACHINES / "never-halts-decider.json")
        result = runner.invoke(cli, ["berry", "--machine", FIXTURE, "--decider", decider, "--n", "1", "--multiplier", "6"])
        assert result.exit_code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "integer 1"
        assert sum(line.startswith("contradiction ") for line in lines) == 3
        assert "3 decider claims contradicted" in result.stderr

    def test_berry_exact_decider(self, runner):
        decider = str(MACHINES / "berry-fixture-decider.json")
        result = runner.invoke(cli, [
            "berry", "--machine", FIXTURE, "--decider", decider, "--n", "1", "--multiplier", "6", "--format", "structured",
        ])
        record = json.loads(result.stdout)
        assert record["integer_found"] == 4
        assert record["contradictions"] == []

    def test_berry_needs_size(self, runner):
        assert runner.invoke(cli, ["berry", "--machine", FIXTURE]).exit_code == 2
        decider = str(MACHINES / "never-halts-decider.json")
        assert runner.invoke(cli, ["berry", "--machine", FIXTURE, "--decider", decider]).exit_code == 2

    def test_berry_bound_beyond_length_limit(self, runner):
        decider = str(MACHINES / "never-halts-decider.json")
        result = runner.invoke(cli, ["berry", "--machine", FIXTURE, "--decider", decider, "--n", "1"])
        assert result.exit_code == 2

    def test_berry_decider_failure(self, runner, tmp_path):
        result = runner.invoke(cli, [
            "berry", "--machine", FIXTURE, "--decider", str(tmp_path / "missing-decider"), "--n", "1", "--multiplier", "6",
        ])
        assert result.exit_code == 1
        assert result.stderr.startswith("error: ")


class TestRootCommand:
    """Test suite for settings, logging options and dispatch."""

    def test_config_file(self, runner, tmp_path):
        config = tmp_path / "settings.yaml"
        config.write_text("DEFAULT_FUEL: 6\n")
        result = runner.invoke(cli, ["--config", str(config), "run", "--machine", UNIVERSAL, "--program", "00101001001101010110"])
        assert result.stdout == "exhausted fuel=6\n"

    def test_config_length_bound(self, runner, tmp_path):
        config = tmp_path / "settings.yaml"
        config.write_text("MAX_BITS: 4\n")
        result = runner.invoke(cli, ["--config", str(config), "validate", "--machine", WORKED])
        assert result.exit_code == 2

    def test_config_unknown_key(self, runner, tmp_path):
        config = tmp_path / "settings.yaml"
        config.write_text("TAPE_LENGTH: 30000\n")
        result = runner.invoke(cli, ["--config", str(config), "validate", "--machine", WORKED])
        assert result.exit_code == 2
        assert "Invalid settings" in result.stderr

    def test_log_level_option(self, runner):
        result = runner.invoke(cli, ["--log-level", "debug", "omega-exact", "--machine", WORKED])
        assert result.exit_code == 0
        assert result.stdout == "3/2^5 = 0.000110\n"

    def test_dispatch_exit_statuses(self, capsys):
        assert dispatch(["omega-exact", "--machine", WORKED]) == 0
        assert capsys.readouterr().out == "3/2^5 = 0.000110\n"
        assert dispatch(["validate", "--machine", BAD_PREFIX]) == 2
        assert "(0, 01)" in capsys.readouterr().err
        assert dispatch(["no-such-command"]) == 2
