import numpy as np
import pytest

from gpgibbs import (
    GibbsParams,
    ParameterError,
    build_basis,
    entropy_experiment,
    fit_rate,
    free_energy_experiment,
    shell_rate_target,
)


def test_fit_rate_exact_linear_data():
    pts = [(e, -2.0 / e + 0.3, 1.0) for e in (0.5, 0.25, 0.125)]
    fit = fit_rate(pts)
    assert fit.slope_c == pytest.approx(2.0, abs=1e-12)
    assert fit.intercept_b == pytest.approx(0.3, abs=1e-12)
    assert fit.residual < 1e-12


def test_fit_rate_with_noise():
    rng = np.random.default_rng(0)
    pts = [(e, -2.0 / e + 0.3 + 0.05 * rng.standard_normal(), 0.05)
           for e in (0.5, 0.25, 0.125, 0.0625)]
    fit = fit_rate(pts)
    assert abs(fit.slope_c - 2.0) < 3.0 * fit.slope_se


def test_fit_rate_flat_line():
    pts = [(e, 1.7, 1.0) for e in (0.5, 0.25, 0.125)]
    assert fit_rate(pts).slope_c == pytest.approx(0.0, abs=1e-12)


def test_fit_rate_needs_three_epsilons():
    with pytest.raises(ParameterError):
        fit_rate([(0.5, 1.0, 1.0), (0.25, 2.0, 1.0)])
    with pytest.raises(ParameterError):
        fit_rate([(0.5, 1.0, 1.0), (0.5, 1.1, 1.0), (0.25, 2.0, 1.0)])


def test_free_energy_trivial_at_zero_coupling(basis1):
    params = GibbsParams(epsilon=0.4, truncation=1, mass_level=1.0,
                         shell_width=0.2, coupling=0.0, chem_potential=0.0)
    rep = free_energy_experiment(basis1, params, [0.4, 0.2, 0.1], 2000)
    assert rep.verdict
    for row in rep.rows:
        assert row["eps_log_z"] == pytest.approx(0.0, abs=1e-12)


def test_shell_rate_target_zero_coupling(basis8):
    # no interaction, no taming: the decay rate of the mass shell is D
    target, res = shell_rate_target(basis8, 0.0, 0.0, 3.0)
    assert target == pytest.approx(3.0, rel=1e-9)
    assert res.energy == pytest.approx(1.5, rel=1e-9)


def test_entropy_shell_probability_monotone_in_r(basis1):
    params = GibbsParams(epsilon=0.25, truncation=1, mass_level=1.0,
                         shell_width=0.2, coupling=1.0, chem_potential=0.1)
    rep = entropy_experiment(basis1, params, [0.5, 0.25, 0.125], 20_000,
                             r_schedule=[0.4, 0.2, 0.1], seed=9)
    by_eps = {}
    for row in rep.rows:
        by_eps.setdefault(row["epsilon"], []).append((row["r"], row["log_prob"]))
    for cells in by_eps.values():
        cells.sort()
        probs = [p for _, p in cells]
        assert probs == sorted(probs)  # larger r, larger probability


def test_entropy_report_carries_target_provenance(basis1):
    params = GibbsParams(epsilon=0.25, truncation=1, mass_level=1.0,
                         shell_width=0.2, coupling=0.0, chem_potential=0.0)
    rep = entropy_experiment(basis1, params, [0.5, 0.25, 0.125], 5000, seed=2)
    assert "shell_rate_target" in rep.target_source
    assert rep.fit is not None
