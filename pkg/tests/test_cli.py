import json
import math

import numpy as np
import pytest

from lacki.cli import load_model, main
from lacki.core import Dataset, KiConfig, fit


def run(*argv, capsys=None):
    code = main([str(a) for a in argv])
    if capsys is not None:
        return code, capsys.readouterr()
    return code


def write_dataset(path, rows, header="x_1,y_1"):
    path.write_text(header + "\n" + "".join(f"{','.join(map(str, r))}\n" for r in rows))


# ---------------------------------------------------------------------------
# fit


def test_fit_two_point(tmp_path, capsys):
    data = tmp_path / "data.csv"
    write_dataset(data, [(0.0, 0.0), (1.0, 1.0)])
    code, out = run("fit", data, "--out", tmp_path, capsys=capsys)
    assert code == 0
    assert "ell=1.0" in out.out
    doc = json.loads((tmp_path / "model.json").read_text())
    assert doc["version"] == "lacki-model-v1"
    assert doc["ell"] == 1.0
    assert len(doc["data"]["inputs"]) == 2


def test_fit_empty_body_uses_floor(tmp_path, capsys):
    data = tmp_path / "data.csv"
    data.write_text("x_1,y_1\n")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"l_floor": 0.75}))
    code, out = run("fit", data, "--config", cfg, "--out", tmp_path, capsys=capsys)
    assert code == 0
    assert "ell=0.75" in out.out
    assert "n=0" in out.out


def test_fit_nan_cell_diagnosed(tmp_path, capsys):
    data = tmp_path / "data.csv"
    data.write_text("x_1,y_1\n0.0,0.0\n1.0,nan\n")
    code, out = run("fit", data, "--out", tmp_path, capsys=capsys)
    assert code == 2
    assert "row 3" in out.err and "y_1" in out.err


def test_fit_bad_header(tmp_path, capsys):
    data = tmp_path / "data.csv"
    data.write_text("a,b\n0,0\n")
    code, out = run("fit", data, "--out", tmp_path, capsys=capsys)
    assert code == 2
    assert "header" in out.err


def test_fit_missing_file(tmp_path, capsys):
    code, out = run("fit", tmp_path / "absent.csv", "--out", tmp_path, capsys=capsys)
    assert code == 3


def test_fit_unknown_config_key(tmp_path, capsys):
    data = tmp_path / "data.csv"
    write_dataset(data, [(0.0, 0.0)])
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 1.0, "spline_order": 3}))
    code, out = run("fit", data, "--config", cfg, "--out", tmp_path, capsys=capsys)
    assert code == 2
    assert "spline_order" in out.err


# ---------------------------------------------------------------------------
# predict


def _fit_model(tmp_path):
    data = tmp_path / "data.csv"
    write_dataset(data, [(0.0, 0.0), (1.0, 1.0)])
    assert run("fit", data, "--out", tmp_path) == 0
    return tmp_path / "model.json"


def test_predict_midpoint(tmp_path):
    model = _fit_model(tmp_path)
    q = tmp_path / "q.csv"
    q.write_text("x_1\n0.5\n0.0\n")
    assert run("predict", model, q, "--out", tmp_path) == 0
    lines = (tmp_path / "predictions.csv").read_text().splitlines()
    assert lines[0] == "x_1,value_1,halfwidth_1"
    assert lines[1].split(",") == ["0.5", "0.5", "0.0"]
    assert lines[2].split(",")[1] == "0.0"  # value at a training input


def test_predict_empty_queries(tmp_path):
    model = _fit_model(tmp_path)
    q = tmp_path / "q.csv"
    q.write_text("x_1\n")
    assert run("predict", model, q, "--out", tmp_path) == 0
    assert (tmp_path / "predictions.csv").read_text().splitlines() == ["x_1,value_1,halfwidth_1"]


def test_predict_dimension_mismatch(tmp_path, capsys):
    model = _fit_model(tmp_path)
    q = tmp_path / "q.csv"
    q.write_text("x_1,x_2\n0.5,0.5\n")
    code, out = run("predict", model, q, "--out", tmp_path, capsys=capsys)
    assert code == 2


def test_roundtrip_predictions_bitwise(tmp_path):
    rng = np.random.default_rng(12)
    rows = [(float(x), float(y)) for x, y in zip(rng.uniform(0, 1, 20), rng.normal(size=20))]
    data = tmp_path / "data.csv"
    write_dataset(data, [(repr(x), repr(y)) for x, y in rows])
    assert run("fit", data, "--out", tmp_path) == 0
    loaded = load_model(tmp_path / "model.json")
    in_memory = fit(
        Dataset(np.array([[x] for x, _ in rows]), np.array([[y] for _, y in rows])), KiConfig()
    )
    assert loaded.ell == in_memory.ell
    q = rng.uniform(0, 1, (50, 1))
    assert np.array_equal(loaded.predict_batch(q).value, in_memory.predict_batch(q).value)


def test_load_model_rejects_corrupted_constant(tmp_path):
    model = _fit_model(tmp_path)
    doc = json.loads(model.read_text())
    doc["ell"] = 0.1
    model.write_text(json.dumps(doc))
    from lacki.cli import CliError

    with pytest.raises(CliError):
        load_model(model)


# ---------------------------------------------------------------------------
# complexity, bounds


def test_complexity_worked_example(capsys):
    code, out = run("complexity", 0.5, 0.1, 1, 1, capsys=capsys)
    assert code == 0
    assert out.out.strip() == "k=2 N=13"


def test_complexity_invalid_args(capsys):
    code, out = run("complexity", -1, 0.1, 1, 1, capsys=capsys)
    assert code == 2


def test_bounds_nominal_system(tmp_path, capsys):
    cfg = tmp_path / "b.json"
    cfg.write_text(
        json.dumps({"m": 1, "delta": 0.005, "k1": 1, "k2": 1, "innovation_bound": 1, "n_max": 20})
    )
    code, out = run("bounds", "--config", cfg, "--out", tmp_path, capsys=capsys)
    assert code == 0
    doc = json.loads((tmp_path / "bounds.json").read_text())
    assert doc["spectral_radius"] == pytest.approx(0.997509, abs=1e-6)
    assert len(doc["variant1"]) == 21
    plot = (tmp_path / "bounds_variant1_vs_n.dat").read_text().splitlines()
    assert len(plot) == 21
    assert len(plot[0].split()) == 2


# ---------------------------------------------------------------------------
# bench / simulate / campaign artifacts (small configs)


def test_bench_artifacts_and_determinism(tmp_path):
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps({"n_train": 30, "n_test": 100, "n_repeats": 2, "seed": 3}))
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run("bench", "--config", cfg, "--out", out1) == 0
    assert run("bench", "--config", cfg, "--out", out2) == 0
    body1 = (out1 / "bench_results.csv").read_bytes()
    assert body1 == (out2 / "bench_results.csv").read_bytes()
    lines = body1.decode().splitlines()
    assert lines[0] == "repeat,learner,rms,me"
    assert len(lines) == 5  # header + 2 repeats x 2 learners
    assert (out1 / "bench_lacki_rms_quantiles.dat").exists()
    assert (out1 / "bench_timings.csv").read_text().splitlines()[0] == "repeat,learner,log_tt,log_pt"
    assert json.loads((out1 / "bench_summary.json").read_text())["spec"]["n_train"] == 30


def test_bench_dimension_sweep(tmp_path):
    cfg = tmp_path / "bench.json"
    cfg.write_text(
        json.dumps({"n_train": 25, "n_test": 80, "n_repeats": 2, "seed": 3, "dims": [1, 2]})
    )
    assert run("bench", "--config", cfg, "--out", tmp_path) == 0
    lines = (tmp_path / "bench_sweep.csv").read_text().splitlines()
    assert len(lines) == 5
    assert (tmp_path / "bench_rms_vs_d_lacki.dat").read_text().count("\n") == 2


def test_simulate_short_trial(tmp_path, capsys):
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps({"tf": 1.0, "x0": [1.0, 1.0]}))
    code, out = run("simulate", "--config", cfg, "--out", tmp_path, capsys=capsys)
    assert code == 0
    lines = (tmp_path / "simulate_trajectory.csv").read_text().splitlines()
    assert lines[0].startswith("t,x1,x2,")
    assert len(lines) == 202  # header + 200 steps + terminal row
    metrics = json.loads((tmp_path / "simulate_metrics.json").read_text())
    assert metrics["n_steps"] == 200
    assert not metrics["diverged"]


def test_simulate_divergence_exit_code(tmp_path, capsys):
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps({"tf": 50.0, "k1": -40.0, "k2": -40.0, "adaptive": False}))
    code, out = run("simulate", "--config", cfg, "--out", tmp_path, capsys=capsys)
    assert code == 4
    assert "diverged" in out.err


def test_campaign_artifacts(tmp_path):
    cfg = tmp_path / "camp.json"
    cfg.write_text(json.dumps({"base": {"tf": 0.5}, "n_trials": 2}))
    assert run("campaign", "--config", cfg, "--out", tmp_path) == 0
    lines = (tmp_path / "campaign_results.csv").read_text().splitlines()
    assert len(lines) == 5  # header + 2 trials x 2 learners
    summary = json.loads((tmp_path / "campaign_summary.json").read_text())
    assert "lacki" in summary and "pd" in summary
    assert (tmp_path / "campaign_lacki_log_xerr_quantiles.dat").exists()


def test_campaign_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "camp.json"
    cfg.write_text(json.dumps({"trials": 2}))
    code, out = run("campaign", "--config", cfg, "--out", tmp_path, capsys=capsys)
    assert code == 2


def test_seed_override_changes_bench(tmp_path):
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps({"n_train": 20, "n_test": 50, "n_repeats": 2, "seed": 3}))
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run("bench", "--config", cfg, "--out", out1) == 0
    assert run("bench", "--config", cfg, "--seed", 4, "--out", out2) == 0
    assert (out1 / "bench_results.csv").read_bytes() != (out2 / "bench_results.csv").read_bytes()
