import numpy as np
import pytest

from gpgibbs import (
    ParameterError,
    analyze,
    build_basis,
    gns_ratio,
    norm_lp,
    norm_sobolev,
    synthesize,
)
from gpgibbs.spectral import hermite_function_table, scaled_hermite_rule


def test_ground_state_value_at_origin():
    table = hermite_function_table(1, np.array([0.0]))
    assert table[0, 0] == pytest.approx(np.pi ** (-0.25), abs=1e-14)


def test_eigenvalues():
    basis = build_basis(5)
    assert np.allclose(basis.eigenvalues, np.sqrt(1.0 + 2.0 * np.arange(6)))


def test_orthonormality_gram():
    basis = build_basis(32)
    gram = (basis.basis_table * basis.quad_weights) @ basis.basis_table.T
    assert np.max(np.abs(gram - np.eye(33))) < 1e-10


def test_scaled_rule_integrates_gaussian_polynomials():
    nodes, weights = scaled_hermite_rule(20, np.sqrt(2.0))
    # int x^2 exp(-2 x^2) dx = sqrt(pi/2) / 4
    value = np.sum(weights * nodes**2 * np.exp(-2.0 * nodes**2))
    assert value == pytest.approx(np.sqrt(np.pi / 2.0) / 4.0, rel=1e-13)


def test_round_trip(rng):
    basis = build_basis(16)
    coeffs = rng.standard_normal(17) + 1j * rng.standard_normal(17)
    back = analyze(basis, synthesize(basis, coeffs))
    assert np.max(np.abs(back - coeffs)) < 1e-12


def test_norm_sobolev_s0_is_euclidean(rng):
    basis = build_basis(6)
    coeffs = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    assert norm_sobolev(basis, coeffs, 0.0) == pytest.approx(
        np.sqrt(np.sum(np.abs(coeffs) ** 2)), rel=1e-14
    )


def test_norm_l2_matches_coefficient_norm(rng):
    basis = build_basis(10)
    coeffs = rng.standard_normal(11) + 1j * rng.standard_normal(11)
    assert norm_lp(basis, coeffs, 2.0) == pytest.approx(
        norm_sobolev(basis, coeffs, 0.0), rel=1e-12
    )


def test_quartic_norm_ground_state(basis0):
    # int h_0^4 = 1 / sqrt(2 pi)
    value = norm_lp(basis0, np.array([1.0 + 0j]), 4.0) ** 4
    assert value == pytest.approx(1.0 / np.sqrt(2.0 * np.pi), rel=1e-13)


def test_gns_ratio_ground_state(basis0):
    # ||h0||_{L4}^4 / (||h0||_{H1} ||h0||_{L2}^3) with unit norms
    assert gns_ratio(basis0, np.array([1.0 + 0j])) == pytest.approx(
        1.0 / np.sqrt(2.0 * np.pi), rel=1e-12
    )


def test_gns_ratio_scale_invariant(basis8, rng):
    coeffs = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    r1 = gns_ratio(basis8, coeffs)
    r2 = gns_ratio(basis8, 3.7 * coeffs)
    assert r1 == pytest.approx(r2, rel=1e-12)


def test_parameter_errors(basis8):
    with pytest.raises(ParameterError):
        build_basis(-1)
    with pytest.raises(ParameterError):
        build_basis(10, quad_size=5)
    with pytest.raises(ParameterError):
        norm_lp(basis8, np.zeros(9, dtype=complex), 0.5)
    with pytest.raises(ParameterError):
        gns_ratio(basis8, np.zeros(9, dtype=complex))
    with pytest.raises(ParameterError):
        synthesize(basis8, np.zeros(5, dtype=complex))


def test_high_order_recurrence_stays_normalized():
    basis = build_basis(64)
    gram_diag = np.sum(basis.basis_table**2 * basis.quad_weights, axis=1)
    assert np.max(np.abs(gram_diag - 1.0)) < 1e-9
