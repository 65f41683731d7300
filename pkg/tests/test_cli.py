import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from eitsim import cli
from eitsim.csvio import read_csv
from eitsim.errors import ConfigError

PRESETS = Path(__file__).resolve().parent.parent / "presets"

SMALL = """
[run]
model = three, six
doppler_width_mhz = 10
control_rabi_mhz = 12

[probe]
start_mhz = -150
stop_mhz = 150
steps = 121
fine_steps = 41

[velocity]
nodes = 128
"""


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_parse_defaults_and_sweeps():
    cfg = cli.parse_config(SMALL)
    assert cfg.get("run", "model") == ("three", "six")
    assert cfg.get("run", "doppler_width_mhz") == (10.0,)
    assert cfg.get("velocity", "nodes") == 128
    assert cfg.get("run", "n0_cm3") == 1.1e10
    assert not cfg.has_pumping


@pytest.mark.parametrize("text,line,fragment", [
    ("[run]\nmodel = seven\n", 2, "not one of"),
    ("[run]\n\nn0_cm3 = lots\n", 3, "cannot read"),
    ("[run]\nmodle = six\n", 2, "unknown key"),
    ("[rnu]\nmodel = six\n", 1, "unknown section"),
    ("model = six\n", 1, "outside"),
    ("[run]\nmodel = six\nmodel = three\n", 3, "duplicate"),
    ("[probe]\nstart_mhz = 5\nstop_mhz = 1\n", 3, "empty"),
    ("[run]\nlength_cm = -1\n", 2, "out of range"),
    ("[run]\ntemperature_K = 300\ndoppler_width_mhz = 10\n", 3, "either"),
    ("[resonances]\nshift_ranges_mhz = 1:2\n", 2, "start:stop:steps"),
])
def test_config_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ConfigError) as exc:
        cli.parse_config(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)


def test_overrides():
    cfg = cli.parse_config(SMALL, overrides=["run.model=six", "velocity.nodes = 64"])
    assert cfg.get("run", "model") == ("six",)
    assert cfg.get("velocity", "nodes") == 64
    with pytest.raises(ConfigError):
        cli.parse_config(SMALL, overrides=["nodes=64"])


def test_all_presets_validate():
    names = sorted(p.name for p in PRESETS.glob("*.cfg"))
    assert {"fig2.cfg", "fig4.cfg", "fig5.cfg", "fig6.cfg", "fig7.cfg", "fig8.cfg"} <= set(names)
    for p in PRESETS.glob("*.cfg"):
        cli.load_config(p)


def test_spectrum_outputs_are_byte_identical(tmp_path):
    cfg = write(tmp_path, SMALL)
    assert cli.main(["spectrum", str(cfg), "-o", str(tmp_path / "a")]) == 0
    assert cli.main(["spectrum", str(cfg), "-o", str(tmp_path / "b"), "-j", "3"]) == 0
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(files) == 3
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    meta, header, arr = read_csv(tmp_path / "a" / "spectrum_summary.csv")
    assert "config_hash" in meta
    assert list(arr[:, 0]) == ["three", "six"]


def test_empty_pumping_block_uses_gaussian(tmp_path):
    cfg = write(tmp_path, SMALL + "\n[pumping]\n")
    assert cli.main(["spectrum", str(cfg), "-o", str(tmp_path / "o")]) == 0


def test_resonances_command(tmp_path):
    text = SMALL + "\n[resonances]\ndoppler_shifts_mhz = -50, 50\nspectra = yes\n"
    assert cli.main(["resonances", str(write(tmp_path, text)), "-o", str(tmp_path)]) == 0
    meta, header, arr = read_csv(tmp_path / "resonances.csv")
    assert header[:4] == ["model", "control_rabi_MHz", "delta_c_MHz", "delta_D_MHz"]
    assert arr.shape[0] == 4
    assert (tmp_path / "absorption_six_control12_dc0.csv").exists()


def test_pump_command(tmp_path):
    text = """
[run]
model = six
temperature_K = 300
n0_cm3 = 3.5e11
[probe]
start_mhz = -150
stop_mhz = 150
steps = 301
fine_steps = 61
[pumping]
pump_rabi_gamma = 0.15
delta_pump_mhz = -40
grid_nodes = 161
"""
    assert cli.main(["pump", str(write(tmp_path, text)), "-o", str(tmp_path)]) == 0
    meta, header, arr = read_csv(tmp_path / "pump_report.csv")
    assert header[-1] == "contrast_ratio"
    assert arr.shape[0] == 2
    assert float(arr[1, -1]) > 1


def test_exit_codes(tmp_path, capsys):
    assert cli.main(["spectrum", str(write(tmp_path, "[run]\nmodel = x\n"))]) == cli.EXIT_CONFIG
    assert "line 2" in capsys.readouterr().err
    assert cli.main(["spectrum", str(tmp_path / "missing.cfg")]) == cli.EXIT_CONFIG
    # a resonance search with no Doppler shifts is a config error
    assert cli.main(["resonances", str(write(tmp_path, SMALL))]) == cli.EXIT_CONFIG


def test_numeric_failure_exit_code(tmp_path, monkeypatch):
    from eitsim.errors import NumericalError

    def boom(*a, **k):
        raise NumericalError("singular")

    monkeypatch.setattr(cli, "average_chi", boom)
    assert cli.main(["spectrum", str(write(tmp_path, SMALL)), "-o", str(tmp_path)]) == cli.EXIT_NUMERIC


def test_worker_env(monkeypatch):
    monkeypatch.setenv("EITSIM_WORKERS", "3")
    assert cli._workers(None) == 3
    assert cli._workers(2) == 2
    monkeypatch.setenv("EITSIM_WORKERS", "many")
    with pytest.raises(ConfigError):
        cli._workers(None)


def test_validate_config_subprocess(tmp_path):
    out = subprocess.run([sys.executable, "-m", "eitsim.cli", "validate-config", str(PRESETS / "fig8.cfg")],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "pumping.delta_pump_mhz = (-60.0, -40.0, -20.0, 20.0, 40.0, 60.0)" in out.stdout
