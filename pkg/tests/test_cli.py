# tests/test_cli.py
from pathlib import Path

import pytest

import pastnoc_app
from pastnoc_app import EXIT_CONFIG, EXIT_MISMATCH, EXIT_OK, build_parser, main
from validators.errors import MismatchReport

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def log_file(tmp_path):
    return str(tmp_path / "pastnoc.log")


def test_validate_passes(log_file, capsys):
    code = main(["--log-file", log_file, "validate", "--policy", "round_robin", "--epochs", "20"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "round_robin" in out and "exhaustive" in out and "random" in out
    assert "tool=validate" in Path(log_file).read_text()


def test_validate_mismatch_exit_code(log_file, capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise MismatchReport([{"epoch": 0}], 1)

    monkeypatch.setattr(pastnoc_app, "validate", broken)
    assert main(["--log-file", log_file, "validate"]) == EXIT_MISMATCH
    assert "Validation mismatch" in capsys.readouterr().err


def test_simulate_scenario(log_file, tmp_path, capsys):
    out = tmp_path / "fig11"
    code = main(["--log-file", log_file, "simulate", "--config", str(CONFIG_DIR / "fig11.ini"), "--out", str(out)])
    assert code == EXIT_OK
    assert (out / "results.csv").exists()
    assert "simulate finished" in capsys.readouterr().out


def test_simulate_bad_config(log_file, tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\ntopology = torus9\n")
    assert main(["--log-file", log_file, "simulate", "--config", str(bad)]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert err.startswith("Input Error:")
    assert "experiment.topology" in err and "line 2" in err


def test_simulate_missing_file(log_file, tmp_path):
    assert main(["--log-file", log_file, "simulate", "--config", str(tmp_path / "nope.ini")]) == EXIT_CONFIG


def test_sweep_without_axes(log_file, tmp_path, capsys):
    assert main(["--log-file", log_file, "sweep", "--config", str(CONFIG_DIR / "fig14.ini"),
                 "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "at least one axis" in capsys.readouterr().err


def test_sweep_with_limit(log_file, tmp_path):
    cfg = tmp_path / "sweep.ini"
    cfg.write_text("[experiment]\nmode = analytic\ntopology = router2\n[sweep]\ndata_period = 300, 600\n")
    code = main(["--log-file", log_file, "sweep", "--config", str(cfg), "--out", str(tmp_path / "out"),
                 "--limit", "1"])
    assert code == EXIT_OK
    assert len((tmp_path / "out" / "sweep.csv").read_text().splitlines()) == 4


def test_config_is_required_for_simulate():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["simulate"])
    assert info.value.code == 2


def test_trace_choice_is_checked():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["simulate", "--config", "x.ini", "--trace", "fst"])
