import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "randecon"]


def run_cli(*args, check=True):
    proc = subprocess.run(CLI + list(args), capture_output=True, text=True)
    if check:
        assert proc.returncode == 0, proc.stderr
    return proc


def data_rows(output):
    return [line for line in output.splitlines()
            if line and not line.startswith("#")]


class TestSaddle:
    def test_csv_output(self):
        proc = run_cli("saddle", "--n", "3", "--pi", "0.65", "--f", "0.5",
                       "--eps", "0.1")
        rows = data_rows(proc.stdout)
        assert rows[0].split(",")[0] == "n"   # header row
        assert len(rows) == 2
        assert rows[1].split(",")[4] == "industrial"

    def test_metadata_header(self):
        proc = run_cli("saddle", "--n", "3", "--pi", "0.65", "--f", "0.5",
                       "--eps", "0.1")
        meta = [l for l in proc.stdout.splitlines() if l.startswith("#")]
        assert any("version" in l for l in meta)
        assert any("command" in l for l in meta)

    def test_json_format(self):
        proc = run_cli("saddle", "--n", "3", "--pi", "0.65", "--f", "0.5",
                       "--eps", "0.1", "--format", "json")
        payload = json.loads(proc.stdout)
        row = dict(zip(payload["columns"], payload["rows"][0]))
        assert row["branch"] == "industrial"
        assert payload["meta"]["command"] == "saddle"

    def test_byte_identical_reruns(self):
        args = ("saddle", "--n", "1", "--pi", "0.6", "--f", "0.5",
                "--eps", "0.1")
        a = data_rows(run_cli(*args).stdout)
        b = data_rows(run_cli(*args).stdout)
        assert a == b


class TestSweep:
    def test_n_sweep(self):
        proc = run_cli("sweep", "--var", "n", "--from", "2", "--to", "3",
                       "--points", "3", "--pi", "0.65", "--f", "0.5",
                       "--eps", "0.1")
        rows = data_rows(proc.stdout)
        assert len(rows) == 4  # header + 3 points

    def test_intermediate_sweep(self):
        proc = run_cli("sweep", "--var", "i", "--from", "0.1", "--to", "0.3",
                       "--points", "3", "--fix", "f-over-n=0.3",
                       "--fix", "pi-over-n=0.4", "--eps", "0.1")
        rows = data_rows(proc.stdout)
        assert len(rows) == 4

    def test_unknown_variable_is_config_error(self):
        proc = run_cli("sweep", "--var", "bogus", "--from", "0", "--to", "1",
                       "--points", "2", check=False)
        assert proc.returncode == 2


class TestCriticalLine:
    def test_values(self):
        proc = run_cli("critical-line", "--eps", "0.1", "--from", "1",
                       "--to", "2", "--points", "2")
        rows = data_rows(proc.stdout)
        assert len(rows) == 3
        first = rows[1].split(",")
        assert float(first[2]) == pytest.approx(0.330440, abs=2e-5)


class TestFiniteCommands:
    def test_finite(self):
        proc = run_cli("finite", "--n", "3", "--pi", "0.65", "--f", "0.5",
                       "--eps", "0.1", "--C", "20", "--instances", "2",
                       "--seed", "0")
        rows = data_rows(proc.stdout)
        assert len(rows) == 2

    def test_lp_fraction_pi_grid(self):
        proc = run_cli("lp-fraction", "--n", "1", "--eps", "0.1", "--f",
                       "0.5", "--C", "40", "--trials", "5", "--seed", "0",
                       "--from", "0.2", "--to", "0.6", "--points", "3")
        rows = data_rows(proc.stdout)
        assert len(rows) == 4
        fracs = [float(r.split(",")[-1]) for r in rows[1:]]
        assert all(0.0 <= x <= 1.0 for x in fracs)
        # fraction grows with the primary share
        assert fracs == sorted(fracs)

    def test_pca_probe(self):
        proc = run_cli("pca-probe", "--n", "1", "--pi", "0.6", "--f", "0.5",
                       "--eps", "0.1", "--C", "25", "--tech-draws", "2",
                       "--objective-draws", "4", "--seed", "0")
        rows = data_rows(proc.stdout)
        assert len(rows) == 2


class TestValidate:
    def test_green(self):
        proc = run_cli("validate")
        assert "FAIL" not in proc.stdout


class TestPlumbing:
    def test_output_file(self, tmp_path):
        target = tmp_path / "out.csv"
        run_cli("saddle", "--n", "3", "--pi", "0.65", "--f", "0.5",
                "--eps", "0.1", "-o", str(target))
        assert target.exists()
        assert len(data_rows(target.read_text())) == 2

    def test_config_file_overrides(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("pi=0.9\n")
        with_flag = run_cli("saddle", "--n", "3", "--pi", "0.65", "--f",
                            "0.5", "--eps", "0.1")
        with_cfg = run_cli("saddle", "--n", "3", "--pi", "0.65", "--f",
                           "0.5", "--eps", "0.1", "--config", str(cfg))
        row_flag = data_rows(with_flag.stdout)[1].split(",")
        row_cfg = data_rows(with_cfg.stdout)[1].split(",")
        assert float(row_flag[1]) == 0.65
        assert float(row_cfg[1]) == 0.9

    def test_bad_config_path_exit_2(self):
        proc = run_cli("saddle", "--n", "3", "--pi", "0.65", "--f", "0.5",
                       "--eps", "0.1", "--config", "/nonexistent/x.cfg",
                       check=False)
        assert proc.returncode == 2

    def test_invalid_params_exit_2(self):
        proc = run_cli("saddle", "--n", "-1", "--pi", "0.65", "--f", "0.5",
                       "--eps", "0.1", check=False)
        assert proc.returncode == 2
