import csv
import json
import math
from pathlib import Path

import pytest

from attractor_bounds.cli import main

ROOT = Path(__file__).resolve().parents[1]
C_FIX = 1 / 24


def write_config(tmp_path, **doc):
    base = {
        "domain": {"kind": "box", "sides": [1.0, 1.0]},
        "params": {"lambda": 1.0, "alpha": 0.0, "kappa": 1.0, "beta": 0.0, "gamma": 25.0},
        "consts": {"c": C_FIX, "C_star": 1.0},
        "output_dir": str(tmp_path / "out"),
    }
    base.update(doc)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(base))
    return path


def sim_section(**kw):
    sim = {"modes_per_axis": 16, "dt": 1e-3, "t_end": 1.0, "burn_in": 0.0,
           "initial_condition": {"kind": "random_smooth", "seed": 3, "decay_rate": 0.5},
           "tangent_count": 4, "reorth_interval": 10}
    sim.update(kw)
    return sim


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_spectrum_passes(tmp_path):
    cfg = write_config(tmp_path, m_max=1000)
    assert main(["spectrum", "--config", str(cfg)]) == 0
    rows = read_csv(tmp_path / "out" / "verification.csv")
    assert len(rows) == 1000
    assert list(rows[0]) == ["m", "sum_enumerated", "li_yau", "melas", "doubled_sum_bound", "pass"]
    assert all(r["pass"] == "true" for r in rows)


def test_spectrum_single_row(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["spectrum", "--config", str(cfg), "--m-max", "1"]) == 0
    assert len(read_csv(tmp_path / "out" / "verification.csv")) == 1


def test_spectrum_c_outside_window(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["spectrum", "--config", str(cfg), "--c", "5.0"]) == 2
    err = capsys.readouterr().err
    assert "(2π)²" in err and "ω_n" in err
    assert not (tmp_path / "out").exists()


def test_spectrum_verification_failure_exit_1(tmp_path):
    # admissible c, but the added linear term exceeds the true gap on the interval at m=1
    cfg = write_config(tmp_path, m_max=50, domain={"kind": "box", "sides": [1.0]},
                       consts={"c": 2.4, "C_star": 1.0})
    assert main(["spectrum", "--config", str(cfg)]) == 1
    rows = read_csv(tmp_path / "out" / "verification.csv")
    assert any(r["pass"] == "false" for r in rows)


def test_bounds_worked_example(tmp_path):
    cfg = write_config(tmp_path, delta=0.0)
    assert main(["bounds", "--config", str(cfg)]) == 0
    doc = json.loads((tmp_path / "out" / "bounds.json").read_text())
    rep = doc["report"]
    assert rep["d_star"] == pytest.approx(2 * (25 - 1 / 32) / math.pi, rel=1e-12)
    assert rep["d_star_baseline"] == pytest.approx(50 / math.pi, rel=1e-12)
    assert set(rep) == {"Lambda1", "regime", "delta", "A", "B", "d_star", "d_star_baseline"}
    assert doc["config"]["consts"] == {"c": C_FIX, "C_star": 1.0}


def test_bounds_trivial(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["bounds", "--config", str(cfg), "--gamma", "10"]) == 0
    rep = json.loads((tmp_path / "out" / "bounds.json").read_text())["report"]
    assert rep["regime"] == "trivial" and rep["d_star"] == 0


def test_bounds_missing_delta_warns(tmp_path, caplog):
    cfg = write_config(tmp_path)
    with caplog.at_level("WARNING"):
        assert main(["bounds", "--config", str(cfg)]) == 0
    assert "delta" in caplog.text


def test_bounds_sweep(tmp_path, monkeypatch):
    monkeypatch.setenv("ATTRACTOR_BOUNDS_THREADS", "2")
    sweep = [{"gamma": g} for g in range(20, 41, 2)]
    cfg = write_config(tmp_path, delta=0.0, sweep=sweep)
    assert main(["bounds", "--config", str(cfg)]) == 0
    rows = read_csv(tmp_path / "out" / "sweep.csv")
    assert [float(r["gamma"]) for r in rows] == [float(g) for g in range(20, 41, 2)]
    d = [float(r["d_star"]) for r in rows if r["regime"] == "nontrivial"]
    assert len(d) == 11 and all(a < b for a, b in zip(d, d[1:]))
    points = sorted((tmp_path / "out" / "sweep").glob("point_*.json"))
    assert len(points) == len(sweep)
    assert json.loads(points[3].read_text())["config"]["params"]["gamma"] == 26.0


def test_bounds_invalid_constants(tmp_path):
    cfg = write_config(tmp_path, consts={"c": C_FIX, "C_star": -1.0})
    assert main(["bounds", "--config", str(cfg)]) == 2
    cfg = write_config(tmp_path, consts={"c": C_FIX})
    assert main(["bounds", "--config", str(cfg)]) == 2
    cfg = write_config(tmp_path, sweep=[{"gamma": 30}, {"bogus": 1}])
    assert main(["bounds", "--config", str(cfg)]) == 2
    assert not (tmp_path / "out").exists()


def test_bad_json_is_config_error(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert main(["bounds", "--config", str(p)]) == 2


def test_simulate_trivial_below_envelope(tmp_path):
    cfg = write_config(tmp_path, domain={"kind": "box", "sides": [1.0]},
                       params={"lambda": 1.0, "alpha": 0.0, "kappa": 1.0, "beta": 0.0, "gamma": 5.0},
                       sim=sim_section())
    assert main(["simulate", "--config", str(cfg)]) == 0
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["below_envelope"]
    assert summary["final_l2_norm_sq"] <= summary["l2_envelope"]
    assert summary["config"]["consts"]["C_star"] == 1.0
    rows = read_csv(tmp_path / "out" / "diagnostics.csv")
    assert list(rows[0]) == ["t", "l2_norm_sq", "lp_norm_pow", "trace_m", "running_qm", "running_delta"]


def test_simulate_zero_data(tmp_path):
    sim = sim_section(initial_condition={"kind": "single_mode", "k": 1, "amplitude": 0.0})
    cfg = write_config(tmp_path, domain={"kind": "box", "sides": [1.0]}, sim=sim)
    assert main(["simulate", "--config", str(cfg)]) == 0
    rows = read_csv(tmp_path / "out" / "diagnostics.csv")
    for r in rows:
        assert float(r["l2_norm_sq"]) == 0 and float(r["lp_norm_pow"]) == 0
        assert float(r["running_delta"]) == 0


def test_simulate_deterministic(tmp_path):
    cfg = write_config(tmp_path, domain={"kind": "box", "sides": [1.0]}, sim=sim_section())
    outs = []
    for name in ("a", "b"):
        assert main(["simulate", "--config", str(cfg), "--seed", "11", "--out", str(tmp_path / name)]) == 0
        outs.append([(tmp_path / name / f).read_bytes() for f in ("diagnostics.csv", "summary.json")])
    assert outs[0][0] == outs[1][0]
    # summaries differ only in the echoed output directory
    a, b = (json.loads(o[1]) for o in outs)
    a["config"].pop("output_dir"), b["config"].pop("output_dir")
    assert a == b


def test_simulate_blow_up_exit_3(tmp_path, capsys):
    cfg = write_config(tmp_path, domain={"kind": "box", "sides": [1.0]},
                       sim=sim_section(overflow_guard=0.5,
                                       initial_condition={"kind": "single_mode", "k": 1, "amplitude": 0.1}))
    assert main(["simulate", "--config", str(cfg)]) == 3
    assert "last stable t" in capsys.readouterr().err


def test_report_missing_sim(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["report", "--config", str(cfg)]) == 2
    assert not (tmp_path / "out").exists()


def test_report_trivial(tmp_path):
    cfg = ROOT / "configs" / "unit_interval_trivial.json"
    assert main(["report", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["report"]["regime"] == "trivial" and doc["report"]["d_star"] == 0
    trend = [row["delta"] for row in doc["simulation"]["delta_trend"]]
    assert trend[0] > trend[1] > trend[2]


def test_report_short_nontrivial(tmp_path):
    cfg = ROOT / "configs" / "unit_interval_report.json"
    assert main(["report", "--config", str(cfg), "--out", str(tmp_path), "--t-end", "2.0"]) == 2
    # burn_in 5 > t_end 2 is rejected; shorten burn-in through a derived config
    doc = json.loads(cfg.read_text())
    doc["sim"].update(t_end=2.0, burn_in=0.5)
    doc["output_dir"] = str(tmp_path)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    assert main(["report", "--config", str(p)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["report"]["regime"] == "nontrivial"
    assert rep["advisory"]["pass"]
    assert rep["config"]["consts"] == {"c": doc["consts"]["c"], "C_star": doc["consts"]["C_star"]}


def test_report_flags_small_lieb_thirring_constant(tmp_path):
    cfg = write_config(tmp_path, domain={"kind": "box", "sides": [1.0]},
                       consts={"c": C_FIX, "C_star": 1e-3}, sim=sim_section())
    assert main(["report", "--config", str(cfg)]) == 0
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    assert not rep["advisory"]["lieb_thirring_constant_ok"]
    assert not rep["advisory"]["pass"]


def test_ball_domain_needs_lambda1(tmp_path):
    ball = {"kind": "ball", "n": 2, "radius": 1.0}
    params = {"lambda": 1.0, "alpha": 0.0, "kappa": 1.0, "beta": 0.0, "gamma": 50.0}
    cfg = write_config(tmp_path, domain=ball, params=params, delta=0.0)
    assert main(["bounds", "--config", str(cfg)]) == 2
    assert main(["spectrum", "--config", str(cfg)]) == 2
    assert not (tmp_path / "out").exists()
    # first Dirichlet eigenvalue of the unit disk, j_{0,1}^2
    cfg = write_config(tmp_path, domain=ball, params=params, delta=0.0, Lambda1=5.783185962946784)
    assert main(["bounds", "--config", str(cfg)]) == 0
    doc = json.loads((tmp_path / "out" / "bounds.json").read_text())
    assert doc["report"]["regime"] == "nontrivial" and doc["report"]["d_star"] > 0
    assert doc["config"]["Lambda1"] == 5.783185962946784
