"""Smoke tests for the python bindings."""

import json
import math

import numpy as np
import pytest

import berest


def toy_dataset(n_per_class=30, offset=3.0, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n_per_class, 2))
    b = rng.normal(size=(n_per_class, 2)) + offset
    x = np.vstack([a, b])
    labels = [0] * n_per_class + [1] * n_per_class
    return x, labels


def test_scenario_roundtrip_and_sampling():
    spec = berest.build_scenario("GvG", d=3, mu=1.2, var_a=0.3, var_b=0.3)
    assert spec.family == "GvG"
    assert abs(np.linalg.norm(spec.centers_b[0]) - 1.2) < 1e-9

    again = berest.ScenarioSpec.from_json(spec.to_json())
    assert again.scenario_id == spec.scenario_id

    pts = berest.sample(spec, label=0, count=500, seed=7)
    assert pts.shape == (500, 3)
    lp = berest.log_pdf(spec, 0, pts)
    assert np.all(np.isfinite(lp))


def test_log_pdf_known_value():
    spec = berest.build_scenario("GvG", d=2, mu=1.0, var_a=1.0, var_b=1.0)
    lp = berest.log_pdf(spec, 0, np.zeros((1, 2)))
    assert abs(lp[0] - math.log(1.0 / (2.0 * math.pi))) < 1e-12


def test_mc_ber_matches_closed_form():
    sigma = 1.0
    spec = berest.build_scenario("GvG", d=1, mu=2.0, var_a=sigma, var_b=sigma)
    ber, std_err, n_mc = berest.mc_ber(spec, batches=64, batch_size=1024, seed=3)
    closed_form = 0.5 * math.erfc(1.0 / math.sqrt(2.0))  # Phi(-1)
    assert n_mc == 64 * 1024
    assert abs(ber - closed_form) < 3.0 * std_err


def test_knn_bounds_on_separated_clusters():
    x, labels = toy_dataset(offset=50.0)
    est = berest.knn_estimate(x, labels)
    assert est.upper == 0.0
    assert est.lower == 0.0
    assert est.k0 >= 1

    assert berest.knn_lower_bound(0.3, 4) == pytest.approx(0.2)


def test_ghp_on_separated_clusters():
    x, labels = toy_dataset(offset=50.0)
    est = berest.ghp_estimate(x, labels)
    assert est.cross_edges == 1
    assert est.lower <= est.mid <= est.upper
    assert est.divergence > 0.9


def test_density_estimators_run():
    x, labels = toy_dataset(n_per_class=40, offset=2.0, seed=1)
    h = berest.silverman_bandwidth(x)
    assert h > 0
    gkde = berest.gkde_estimate(x, labels, h)
    clakde = berest.clakde_estimate(x, labels)
    nb = berest.naive_bayes_error(x, labels)
    assert 0.0 <= gkde <= 1.0
    assert 0.0 <= clakde <= 0.5
    assert 0.0 <= nb <= 1.0
    assert berest.gc_estimate(0.2, 0.3) == pytest.approx(0.25)


def test_evaluate_estimators_shares_ids():
    spec = berest.build_scenario("TvT", d=2, mu=2.0)
    x, labels = toy_dataset(n_per_class=50, offset=1.0, seed=2)
    wanted = ["bayes", "knn_H", "ghp_L", "gkde_h0.25", "nb"]
    result = berest.evaluate_estimators(spec, x, labels, wanted)
    assert sorted(result) == sorted(wanted)
    assert all(np.isfinite(v) for v in result.values())
    assert set(wanted) <= set(berest.all_estimator_ids())


def test_percentile_and_loess():
    values = list(range(1, 101))
    assert berest.percentile(values, 2.5) == pytest.approx(3.475)
    x = np.linspace(0, 1, 50)
    y = 2.0 * x + 1.0
    fit = berest.loess_fit(list(x), list(y), span=0.4)
    assert np.allclose(fit, y, atol=1e-9)


def test_run_campaign_smoke(tmp_path):
    config = {
        "family": "GvG",
        "d": [2],
        "n_per_class": [30],
        "runs": 4,
        "ber_range": [0.05, 0.45],
        "master_seed": 5,
        "estimators": ["bayes", "knn_H", "nb"],
        "profile": "desk",
        "output_dir": str(tmp_path),
    }
    cells = berest.run_campaign(json.dumps(config))
    assert len(cells) == 1
    assert cells[0]["completed"] == 4
    records = [
        json.loads(line)
        for line in open(cells[0]["records_path"])
        if line.strip()
    ]
    assert len(records) == 4
    assert all(set(r["estimates"]) == {"bayes", "knn_H", "nb"} for r in records)
