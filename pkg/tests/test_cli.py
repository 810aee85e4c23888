import numpy as np
import pytest

from smcm.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_SHOTS, main
from smcm.experiments import read_scan, read_timeseries


def test_run_writes_timeseries(tmp_path):
    out = tmp_path / "det.csv"
    rc = main(["run", "--mode", "deterministic", "--t-end", "2", "--out", str(out)])
    assert rc == EXIT_OK
    series = read_timeseries(out)
    assert series.times[-1] == pytest.approx(2.0)
    assert np.abs(series.sigmas.sum(axis=1) - 1.0).max() < 1e-12


def test_run_defaults_to_stdout(capsys):
    rc = main(["run", "--t-end", "1"])
    assert rc == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "time_h,sigma_cs,sigma_c,sigma_d,sigma_s"
    assert len(lines) == 12  # header + 11 steps


def test_run_is_bit_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["run", "--mode", "montecarlo", "--sites", "50", "--t-end", "3", "--seed", "4"]
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# short monte carlo run\n"
        "mode = montecarlo\n"
        "sites = 25\n"
        "t-end = 2\n"
        "seed = 1\n"
    )
    from_file = tmp_path / "file.csv"
    overridden = tmp_path / "override.csv"
    assert main(["run", "--config", str(cfg), "--out", str(from_file)]) == EXIT_OK
    assert (
        main(["run", "--config", str(cfg), "--seed", "2", "--out", str(overridden)])
        == EXIT_OK
    )
    assert from_file.read_bytes() != overridden.read_bytes()  # seed override took


def test_unknown_config_key_is_config_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("sites = 25\nturbo = yes\n")
    assert main(["run", "--config", str(cfg)]) == EXIT_CONFIG


def test_missing_config_file_is_config_error(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.cfg")]) == EXIT_CONFIG


def test_oversized_dt_is_numeric_error(capsys):
    rc = main(["run", "--dt", "10"])
    assert rc == EXIT_NUMERIC
    assert "numerical error" in capsys.readouterr().err


def test_starved_quantum_run_is_shot_error(capsys):
    rc = main(
        ["run", "--mode", "quantum", "--shots", "1", "--t-end", "0.1", "--seed", "0"]
    )
    assert rc == EXIT_SHOTS
    assert "insufficient shots" in capsys.readouterr().err


def test_invalid_choice_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--mode", "nonsense"])
    assert exc.value.code == EXIT_CONFIG


def test_scan_and_report(tmp_path, capsys):
    scan_out = tmp_path / "scan.csv"
    rc = main(
        [
            "scan",
            "--mode",
            "montecarlo",
            "--t-end",
            "10",
            "--spinup",
            "2",
            "--values",
            "10,60,360",
            "--repeats",
            "3",
            "--seed",
            "11",
            "--out",
            str(scan_out),
        ]
    )
    assert rc == EXIT_OK
    result = read_scan(scan_out)
    assert result.x.tolist() == [10.0, 60.0, 360.0]
    capsys.readouterr()

    rc = main(["report", "--mc", str(scan_out), "--quantum", str(scan_out)])
    assert rc == EXIT_OK
    out = capsys.readouterr().out
    assert "montecarlo: exponent=" in out
    assert "quantum: exponent=" in out
    assert "prefactor ratio (quantum / montecarlo): 1.0000" in out


def test_scan_defaults_to_stdout(capsys):
    rc = main(
        [
            "scan",
            "--mode",
            "montecarlo",
            "--t-end",
            "5",
            "--spinup",
            "1",
            "--values",
            "10,60,360",
            "--repeats",
            "3",
        ]
    )
    assert rc == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,rms_mean,rms_std,repeats"
    assert len(lines) == 4


def test_report_without_inputs_is_config_error():
    assert main(["report"]) == EXIT_CONFIG


def test_scan_with_deterministic_mode_is_config_error():
    assert main(["scan", "--mode", "deterministic", "--values", "10,100,1000"]) == EXIT_CONFIG
