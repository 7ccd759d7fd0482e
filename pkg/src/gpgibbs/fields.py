"""Finite-dimensional Gaussian reference measure and Wick-renormalized mass.

The reference measure on the truncated eigenspace assigns mode n an
independent complex Gaussian coordinate with E|c_n|^2 = eps / lambda_n^2
(real and imaginary parts of variance eps / (2 lambda_n^2) each).  All
densities, the Wick constant, and the importance weights downstream
follow this single convention.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .spectral import HermiteBasis, _check_coeffs

__all__ = [
    "GibbsParams",
    "sample_gaussian",
    "sample_gaussian_batch",
    "renorm_constant",
    "wick_mass",
    "gaussian_logdensity",
]


@dataclass(frozen=True)
class GibbsParams:
    """Parameters fixing one Gibbs measure.

    epsilon        temperature
    coupling       strength of the focusing quartic interaction
    chem_potential taming coefficient A in front of |M^w|^3
    truncation     highest retained mode index N
    mass_level     center D of the mass shell
    shell_width    half-width r of the mass shell
    """

    epsilon: float
    truncation: int
    mass_level: float
    shell_width: float
    coupling: float = 1.0
    chem_potential: float = 0.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")
        if self.mass_level <= 0:
            raise ParameterError(f"mass_level must be > 0, got {self.mass_level}")
        if self.shell_width <= 0:
            raise ParameterError(f"shell_width must be > 0, got {self.shell_width}")
        if self.coupling < 0:
            raise ParameterError(f"coupling must be >= 0, got {self.coupling}")
        if self.chem_potential < 0:
            raise ParameterError(
                f"chem_potential must be >= 0, got {self.chem_potential}"
            )
        if self.truncation < 0:
            raise ParameterError(f"truncation must be >= 0, got {self.truncation}")


def sample_gaussian(
    basis: HermiteBasis, params: GibbsParams, rng: np.random.Generator
) -> np.ndarray:
    """One draw from the Gaussian reference measure on E_N.

    Coordinate n is sqrt(eps) g_n / lambda_n with g_n a unit complex
    Gaussian (E|g_n|^2 = 1).
    """
    n = basis.n_modes
    g = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return np.sqrt(params.epsilon) * g / basis.eigenvalues


def sample_gaussian_batch(
    basis: HermiteBasis, params: GibbsParams, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Matrix of ``size`` independent reference draws (rows are fields)."""
    n = basis.n_modes
    g = (rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))) / np.sqrt(2.0)
    return np.sqrt(params.epsilon) * g / basis.eigenvalues


def renorm_constant(params: GibbsParams) -> float:
    """Expected L^2 mass under the reference measure, eps * sum 1/(1+2n)."""
    n = np.arange(params.truncation + 1)
    return params.epsilon * float(np.sum(1.0 / (1.0 + 2.0 * n)))


def wick_mass(basis: HermiteBasis, params: GibbsParams, phi) -> float:
    """Renormalized mass ||phi||_{L^2}^2 minus the reference expectation.

    Mean zero under the reference measure; may be negative.
    """
    phi = _check_coeffs(basis, phi)
    return float(np.sum(np.abs(phi) ** 2)) - renorm_constant(params)


def gaussian_logdensity(basis: HermiteBasis, params: GibbsParams, phi) -> float:
    """Log density of the reference measure w.r.t. flat coordinate measure.

    With E|c_n|^2 = eps/lambda_n^2, each complex coordinate contributes
    log(lambda_n^2 / (pi eps)) - lambda_n^2 |c_n|^2 / eps.  Shifting by a
    deterministic Q changes the value by
    -2 Re<Q, phi>_{H^1} / eps - ||Q||_{H^1}^2 / eps.
    """
    phi = _check_coeffs(basis, phi)
    lam2 = basis.eigenvalues**2
    eps = params.epsilon
    return float(
        np.sum(np.log(lam2 / (np.pi * eps)) - lam2 * np.abs(phi) ** 2 / eps)
    )
