import math
import pathlib

import numpy as np
import pytest

import morozov

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def test_true_sigma_examples():
    assert morozov.pde.true_sigma(0.0, 0.0) == pytest.approx(0.24, abs=1e-15)
    assert morozov.pde.true_sigma(0.3, 1.0) == 0.4
    assert morozov.pde.initial_condition(-5.0) == pytest.approx(0.993262, abs=1e-6)


def test_grid_shape_and_nodes():
    g = morozov.Grid.from_steps(0.1, 0.5)
    assert g.shape == (11, 21)
    assert g.t(10) == pytest.approx(1.0)
    assert g.y(0) == pytest.approx(-5.0)


def test_closed_form_matches_iterative():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(5, 4))
    y = rng.normal(size=5)
    x0 = np.zeros(4)
    exact = morozov.closed_form_minimizer(a, y, 0.1, x0)
    it = morozov.minimize_quadratic(a, y, 0.1, x0)
    assert np.max(np.abs(it["x"] - exact)) < 1e-8


def test_morozov_alpha_lands_in_band():
    a = np.diag([1.0, 0.5, 0.1, 0.02])
    y = np.array([1.0, 0.8, 0.4, 0.3])
    delta = 0.05 * np.linalg.norm(y)
    band = morozov.DiscrepancyBand.make(1.5, 2.5, 2.0)
    r = morozov.morozov_alpha(a, y, delta, band)
    assert r["status"] == "in-band"
    assert band.tau1 * delta <= r["residual"] <= band.tau2 * delta


def test_sequential_residuals_shrink_with_alpha():
    a = np.diag([1.0, 0.3, 0.05])
    y = np.array([1.0, 0.5, 0.2])
    delta = 0.05
    r = morozov.sequential_discrepancy(a, y, 1.5, 10.0, 0.5, 60, delta)
    res = [p[1] for p in r["trace"]]
    assert not r["exhausted"]
    assert all(b <= a + 1e-12 for a, b in zip(res, res[1:]))
    assert res[-1] <= 1.5 * delta


def test_forward_solve_boundaries_and_bounds():
    g = morozov.Grid.from_steps(0.05, 0.25)
    coef = morozov.pde.true_coefficient(g)
    u = morozov.pde.solve(g, coef, g)
    assert u.shape == g.shape
    assert np.all(u[:, 0] == 1.0)
    assert np.all(u[:, -1] == 0.0)
    assert u.min() >= -1e-10 and u.max() <= 1.0 + 1e-10


def test_gradient_vanishes_at_exact_data():
    g = morozov.Grid.from_steps(0.05, 0.2)
    coef = morozov.pde.true_coefficient(g)
    u = morozov.pde.solve(g, coef, g)
    assert np.linalg.norm(morozov.pde.misfit_gradient(g, coef, u)) < 1e-10


def test_simpson_exact_on_cubics():
    g = morozov.Grid.from_counts(5, 7)
    t = np.array([g.t(i) for i in range(5)])
    y = np.array([g.y(j) for j in range(7)])
    u = np.outer(t**3, y**2)
    assert morozov.synthdata.simpson_2d(g, u) == pytest.approx(0.25 * 250.0 / 3.0, rel=1e-12)


def test_generated_data_is_reproducible():
    fine = morozov.Grid.from_steps(0.02, 0.1)
    coarse = morozov.Grid.from_steps(0.1, 0.5)
    d1 = morozov.synthdata.generate(fine, coarse, 0.01, 7)
    d2 = morozov.synthdata.generate(fine, coarse, 0.01, 7)
    assert np.array_equal(d1["u_delta"], d2["u_delta"])
    assert d1["delta"] > 0.0 and math.isfinite(d1["delta"])


def test_loglog_slope():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    assert morozov.loglog_slope(x, 3.0 * x**1.5) == pytest.approx(1.5)


def test_config_validation(tmp_path):
    text = morozov.validate_config(CONFIGS / "linear_oracle.ini")
    assert "kind = linear-oracle" in text
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\nkind = nonsense\n")
    with pytest.raises(ValueError):
        morozov.validate_config(bad)


def test_run_oracle_experiment(tmp_path):
    assert morozov.run_experiment(CONFIGS / "linear_oracle.ini", tmp_path) == 0
    assert any(tmp_path.iterdir())
