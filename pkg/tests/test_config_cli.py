import csv
from dataclasses import fields

import numpy as np
import pytest

from pap_attitude.cli import (EXIT_CONFIG, EXIT_NONFINITE, SUMMARY_COLUMNS, main, summary_row,
                              write_summary_csv, write_trace_csv)
from pap_attitude.analysis import derived_constants
from pap_attitude.config import parse_config, robust_config
from pap_attitude.controller import ControllerGains
from pap_attitude.dynamics import DEG
from pap_attitude.errors import ParseError, UnitRangeError, UnknownKey
from pap_attitude.sim import TRACE_COLUMNS, ScenarioConfig, SimulationTrace

HEADER = ("t,qev1,qev2,qev3,qe0,rho1,rho2,rho3,s1,s2,s3,ws1,ws2,ws3,we1,we2,we3,z21,z22,z23,"
          "u1,u2,u3,d1,d2,d3,dhat1,dhat2,dhat3,H,h,lambda_v,lambda_u")


def test_empty_document_defaults():
    cfg = parse_config("")
    g = cfg.gains
    expected = dict(K_H=2, K_h=1, K_s=0.1, K_2=2, delta_H=1e-5, delta_h=2e-3, alpha=0.5, sigma1=0.05,
                    sigma2=1, Delta_e=1e-5, Delta_h=1e-5)
    assert {k: getattr(g, k) for k in expected} == expected
    assert cfg.observer.beta == 1 and cfg.t_sd == 50 and cfg.spacecraft.u_max == 0.05
    assert cfg.gains == ScenarioConfig().gains and cfg.disturbance == ScenarioConfig().disturbance


def test_single_override():
    base = parse_config("")
    cfg = parse_config("gains.alpha = 0.7  # faster\n")
    assert cfg.gains.alpha == 0.7
    assert cfg.gains == ControllerGains(alpha=0.7)
    for f in fields(ScenarioConfig):
        if f.name not in ("gains", "spacecraft"):
            assert getattr(cfg, f.name) == getattr(base, f.name)
    assert np.array_equal(cfg.spacecraft.J, base.spacecraft.J)


def test_degrees_at_boundary():
    cfg = parse_config("initial.omega_s = 5, 5, 5\ntarget.omega_d_amplitude = 0.3")
    assert np.allclose(cfg.omega_s0, 5 * DEG)
    assert cfg.omega_s0 == robust_config().omega_s0


def test_full_document():
    text = """
    # comment line
    sim.t_final = 20
    sim.dt_inner = 0.005
    spacecraft.J = 2 0 0  0 2 0  0 0 1
    disturbance.kind = composite
    disturbance.pulse = 0.1, 0, 0
    observer.beta = 2
    rpf.offset = 0 0 0
    """
    cfg = parse_config(text)
    assert cfg.t_final == 20 and cfg.substeps == 20
    assert np.allclose(cfg.spacecraft.J, np.diag([2, 2, 1]))
    assert cfg.disturbance.kind == "composite" and cfg.disturbance.pulse == (0.1, 0, 0)
    assert cfg.observer.beta == 2


@pytest.mark.parametrize("text,exc,line", [
    ("gains.alpha = -1", UnitRangeError, None),
    ("sim.dt_inner = 0", UnitRangeError, None),
    ("sim.dt_inner = 0.03", UnitRangeError, None),
    ("\n\ngains.alpah = 1", UnknownKey, 3),
    ("gains.alpha 0.5", ParseError, 1),
    ("# ok\ngains.alpha = abc", ParseError, 2),
    ("initial.q_s = 1 2 3", ParseError, 1),
])
def test_errors(text, exc, line):
    with pytest.raises(exc) as info:
        parse_config(text)
    if line is not None:
        assert info.value.lineno == line


def _trace(n=2):
    data = np.arange(n * len(TRACE_COLUMNS), dtype=float).reshape(n, -1) * np.pi * 1e-3
    data[:, 0] = np.arange(n) * 0.1
    return SimulationTrace(data=data)


def test_trace_csv(tmp_path):
    p = tmp_path / "t.csv"
    tr = _trace()
    write_trace_csv(tr, p)
    text = p.read_text()
    lines = text.split("\n")
    assert text.endswith("\n") and len(lines) == 4 and lines[0] == HEADER
    assert all(len(l.split(",")) == len(TRACE_COLUMNS) for l in lines[:-1])
    back = np.loadtxt(p, delimiter=",", skiprows=1)
    # 9 significant digits: half a unit in the last place is 5e-9 relative
    assert np.allclose(back, tr.data, rtol=5e-9, atol=0)
    assert "e" in lines[1].split(",")[1]


def test_summary_csv_na(tmp_path):
    b = derived_constants(ControllerGains(), robust_config().spacecraft, robust_config().observer, 0.0)
    p = tmp_path / "s.csv"
    write_summary_csv([summary_row(i, 10 + i, None, b, 0.0) for i in range(3)], p)
    rows = list(csv.DictReader(p.open()))
    assert len(rows) == 3 and [r["case"] for r in rows] == ["0", "1", "2"]
    assert rows[0]["feasible"] == "false" and rows[0]["T_H1"] == "NA"
    assert list(rows[0].keys()) == SUMMARY_COLUMNS


def test_cli_normal(tmp_path):
    assert main(["normal", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "normal_trace.csv").read_text().split("\n", 1)[0] == HEADER
    rows = list(csv.DictReader((tmp_path / "normal_summary.csv").open()))
    assert len(rows) == 1 and rows[0]["pap_satisfied"] == "true"


def test_cli_exit_codes(tmp_path):
    assert main(["custom", "--out", str(tmp_path)]) == EXIT_CONFIG
    cfg = tmp_path / "c.cfg"
    cfg.write_text("gains.nope = 1\n")
    assert main(["custom", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["normal", "--set", "gains.alpha=-1", "--out", str(tmp_path)]) == EXIT_CONFIG
    blown = ["normal", "--set", "sim.t_final=5", "--set", "spacecraft.u_max=1e300",
             "--set", "gains.K_2=1e300", "--out", str(tmp_path)]
    assert main(blown) == EXIT_NONFINITE


def test_cli_montecarlo_small(tmp_path):
    rc = main(["montecarlo", "--cases", "2", "--set", "sim.t_final=5", "--out", str(tmp_path)])
    assert rc == 0
    rows = list(csv.DictReader((tmp_path / "montecarlo_summary.csv").open()))
    assert [r["case"] for r in rows] == ["0", "1"]
    assert (tmp_path / "montecarlo_case0001.csv").exists()
