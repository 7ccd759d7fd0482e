import math

import numpy as np
import pytest

from gpgibbs import (
    ChainConfig,
    DiagnosticError,
    GibbsParams,
    ParameterError,
    build_basis,
    default_step_beta,
    estimate_partition,
    estimate_shell_probability,
    make_shell_init,
    minimize_constrained,
    renorm_constant,
    run_chain,
    run_conditioned_chain,
    wick_mass,
)


def free_params(N, eps, **kw):
    base = dict(epsilon=eps, truncation=N, mass_level=1.0, shell_width=0.2,
                coupling=0.0, chem_potential=0.0)
    base.update(kw)
    return GibbsParams(**base)


def chain_config(params, n, seed=0, beta=None, init=None, thin=1, n_burn=None):
    dim = params.truncation + 1
    return ChainConfig(
        params=params,
        step_beta=beta if beta is not None else default_step_beta(params.epsilon),
        n_steps=n,
        n_burn=n_burn if n_burn is not None else n // 10,
        thin=thin,
        seed=seed,
        init=np.zeros(dim, dtype=complex) if init is None else init,
    )


def test_config_validation():
    params = free_params(2, 0.5)
    with pytest.raises(ParameterError):
        chain_config(params, 100, beta=1.5)
    with pytest.raises(ParameterError):
        chain_config(params, 100, n_burn=100)
    with pytest.raises(ParameterError):
        ChainConfig(params=params, step_beta=0.5, n_steps=10, n_burn=0,
                    seed=0, init=np.zeros(3, dtype=complex), thin=0)


def test_default_step_beta():
    assert default_step_beta(0.5) == 0.5
    assert default_step_beta(0.2) == 0.5
    assert default_step_beta(0.1) == 0.1


def test_seed_determinism(basis1):
    params = free_params(1, 0.5, coupling=1.0, chem_potential=0.1)
    a = run_chain(basis1, chain_config(params, 2000, seed=3))
    b = run_chain(basis1, chain_config(params, 2000, seed=3))
    assert np.array_equal(a.samples, b.samples)
    assert a.accept_rate == b.accept_rate


def test_free_chain_marginals_match_reference(basis1):
    # V = 0: stationary law is the Gaussian reference; check the first
    # four moments of |c_n|^2 (exponential with mean eps / lambda_n^2)
    params = free_params(1, 1.0)
    result = run_chain(basis1, chain_config(params, 120_000, seed=5))
    u = np.abs(result.samples) ** 2
    n_eff = u.shape[0] / max(result.iact, 1.0)
    for mode in range(2):
        mean = params.epsilon / basis1.eigenvalues[mode] ** 2
        for k in range(1, 5):
            moment = math.factorial(k) * mean**k
            sd_k = np.sqrt(
                math.factorial(2 * k) * mean ** (2 * k) - moment**2
            )
            sample_k = np.mean(u[:, mode] ** k)
            assert abs(sample_k - moment) < 3.0 * sd_k / np.sqrt(n_eff)


def test_conditioned_chain_stays_in_shell(basis1):
    params = free_params(1, 0.5, coupling=1.0, mass_level=1.0, shell_width=0.3)
    q = minimize_constrained(basis1, 0.5, 1.0).q_coeffs
    init = make_shell_init(basis1, params, q)
    result = run_conditioned_chain(basis1, chain_config(params, 20_000, init=init))
    masses = np.array([wick_mass(basis1, params, s) for s in result.samples])
    assert np.all(np.abs(masses - params.mass_level) <= params.shell_width)


def test_conditioned_chain_rejects_bad_init(basis1):
    params = free_params(1, 0.5, mass_level=1.0, shell_width=0.1)
    with pytest.raises(ParameterError):
        run_conditioned_chain(
            basis1, chain_config(params, 1000, init=np.zeros(2, dtype=complex))
        )


def test_make_shell_init_mass(basis8):
    params = free_params(8, 0.4, mass_level=2.0, shell_width=0.1)
    q = np.zeros(9, dtype=complex)
    q[0] = 1.0
    init = make_shell_init(basis8, params, q)
    target = params.mass_level + renorm_constant(params)
    assert np.sum(np.abs(init) ** 2) == pytest.approx(target, rel=1e-12)


def test_partition_trivial_when_potential_vanishes(basis1, rng):
    params = free_params(1, 0.7)
    est = estimate_partition(basis1, params, 2000, rng)
    assert est.value == pytest.approx(0.0, abs=1e-14)
    assert est.std_error == pytest.approx(0.0, abs=1e-14)


def test_partition_sample_floor(basis1, rng):
    with pytest.raises(ParameterError):
        estimate_partition(basis1, free_params(1, 0.7), 100, rng)


def test_partition_bounded_by_one_when_potential_positive(basis0, rng):
    # coupling 0 with taming on: V >= 0, so log Z <= 0 up to noise
    params = free_params(0, 0.5, chem_potential=0.5)
    est = estimate_partition(basis0, params, 50_000, rng)
    assert est.value <= 3.0 * est.std_error


def test_shell_estimator_standard_error_scaling(basis0):
    # naive estimator on the closed-form benchmark: SE ~ 1/sqrt(n)
    params = free_params(0, 0.5, mass_level=1.0, shell_width=0.2)
    q = np.array([1.0 + 0j])
    ses = []
    for n in (10**3, 10**4, 10**5):
        est = estimate_shell_probability(
            basis0, params, q, n, np.random.default_rng(8), importance=False
        )
        ses.append(est.std_error)
    for a, b in zip(ses, ses[1:]):
        assert b / a == pytest.approx(1.0 / np.sqrt(10.0), rel=0.2)


def test_importance_and_naive_agree(basis1, rng):
    params = free_params(1, 0.5, coupling=1.0, chem_potential=0.1,
                         mass_level=1.0, shell_width=0.3)
    q = minimize_constrained(basis1, 0.5, 1.0).q_coeffs
    a = estimate_shell_probability(basis1, params, q, 100_000,
                                   np.random.default_rng(10))
    b = estimate_shell_probability(basis1, params, q, 100_000,
                                   np.random.default_rng(11), importance=False)
    combined = np.hypot(a.std_error, b.std_error)
    assert abs(a.value - b.value) < 3.0 * combined


def test_low_acceptance_warning(basis1):
    # untamed focusing potential at moderate temperature collapses the
    # acceptance rate and must be flagged
    params = free_params(1, 0.5, coupling=1.0, chem_potential=0.0)
    result = run_chain(basis1, chain_config(params, 30_000, seed=2, beta=0.5))
    if result.accept_rate < 0.01:
        assert result.warnings
