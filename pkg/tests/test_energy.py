import numpy as np
import pytest

from gpgibbs import (
    CalibrationError,
    GibbsParams,
    ParameterError,
    build_basis,
    calibrate_A,
    grand_hamiltonian,
    gradient_h,
    hamiltonian,
    laplace_rate,
    mass,
    quartic_integral,
    rate_jd,
    tamed_potential,
)


def test_ground_state_energy(basis0):
    e0 = np.array([1.0 + 0j])
    # (1/2) - 1/(4 sqrt(2 pi)) at unit coupling
    assert hamiltonian(basis0, e0, 1.0).total_h == pytest.approx(
        0.5 - 1.0 / (4.0 * np.sqrt(2.0 * np.pi)), rel=1e-13
    )


def test_quartic_ground_state(basis0):
    assert quartic_integral(basis0, np.array([1.0 + 0j])) == pytest.approx(
        1.0 / np.sqrt(2.0 * np.pi), rel=1e-13
    )


def test_grand_hamiltonian_adds_cubed_mass(basis8, rng):
    phi = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    h = hamiltonian(basis8, phi, 1.0).total_h
    m = mass(basis8, phi)
    assert grand_hamiltonian(basis8, phi, 1.0, 0.3) == pytest.approx(
        h + 0.3 * m**3, rel=1e-12
    )


def test_phase_invariance(basis8, rng):
    phi = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    params = GibbsParams(epsilon=0.5, truncation=8, mass_level=1.0,
                         shell_width=0.1, coupling=1.0, chem_potential=0.2)
    rot = np.exp(1j * 1.234) * phi
    assert hamiltonian(basis8, rot, 1.0).total_h == pytest.approx(
        hamiltonian(basis8, phi, 1.0).total_h, rel=1e-12
    )
    assert tamed_potential(basis8, params, rot) == pytest.approx(
        tamed_potential(basis8, params, phi), rel=1e-12
    )
    assert laplace_rate(basis8, rot, 1.0, 0.2) == pytest.approx(
        laplace_rate(basis8, phi, 1.0, 0.2), rel=1e-12
    )


def test_gradient_matches_finite_differences(basis8, rng):
    phi = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    grad = gradient_h(basis8, phi, 1.0)
    for _ in range(5):
        psi = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        t = 1e-6
        fd = (
            hamiltonian(basis8, phi + t * psi, 1.0).total_h
            - hamiltonian(basis8, phi - t * psi, 1.0).total_h
        ) / (2.0 * t)
        pairing = np.sum((np.conj(grad) * psi).real)
        assert fd == pytest.approx(pairing, rel=1e-6)


def test_gradient_linear_part_at_zero_coupling(basis8, rng):
    phi = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    grad = gradient_h(basis8, phi, 0.0)
    assert np.allclose(grad, basis8.eigenvalues**2 * phi)


def test_rate_jd_off_shell_is_infinite(basis8, rng):
    phi = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    phi *= np.sqrt(2.0 / mass(basis8, phi))
    assert rate_jd(basis8, phi, 1.0, 1.0, 0.5) == np.inf
    assert np.isfinite(rate_jd(basis8, phi, 1.0, 2.0, 0.5))


def test_rate_jd_zero_at_minimizer(basis8):
    from gpgibbs import minimize_constrained

    res = minimize_constrained(basis8, 1.0, 2.0)
    value = rate_jd(basis8, res.q_coeffs, 1.0, 2.0, res.energy, mass_tol=1e-6)
    assert abs(value) < 1e-10


def test_tamed_potential_signs(basis0):
    params = GibbsParams(epsilon=1.0, truncation=0, mass_level=1.0,
                         shell_width=0.1, coupling=1.0, chem_potential=0.0)
    # pure quartic term, negative for any nonzero field
    assert tamed_potential(basis0, params, np.array([1.0 + 0j])) < 0.0


def test_calibrate_rejects_tiny_probe_budget(basis0):
    with pytest.raises(ParameterError):
        calibrate_A(basis0, 1.0, probes=10)


def test_calibrate_zero_coupling_needs_no_taming(basis0):
    res = calibrate_A(basis0, 0.0, probes=1000, rng=np.random.default_rng(0))
    assert res.a0 == 0.0


def test_calibrated_value_tames_probes(basis8):
    res = calibrate_A(basis8, 1.0, rng=np.random.default_rng(0))
    assert res.a0 > 0.0
    assert res.gns_constant >= 1.0 / np.sqrt(2.0 * np.pi) - 1e-12
    rng = np.random.default_rng(99)
    fields = (rng.standard_normal((2000, 9)) + 1j * rng.standard_normal((2000, 9)))
    fields /= basis8.eigenvalues
    fields *= np.exp(rng.uniform(-2, 3, size=(2000, 1)))
    values = np.array([grand_hamiltonian(basis8, f, 1.0, res.a0) for f in fields])
    assert np.min(values) >= 0.0
