"""Hermite eigenbasis of the 1D harmonic oscillator L = -d^2/dx^2 + x^2.

Provides the truncated eigenspace spanned by the first N+1 normalized
Hermite functions, Gauss-Hermite quadrature exact for the quadratic and
quartic functionals used elsewhere, transforms between coefficient and
grid representations, and the weighted-coefficient (harmonic Sobolev)
and grid L^p norms.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

__all__ = [
    "HermiteBasis",
    "build_basis",
    "synthesize",
    "analyze",
    "norm_sobolev",
    "norm_lp",
    "gns_ratio",
]


def hermite_function_table(orders: int, x: np.ndarray) -> np.ndarray:
    """Evaluate h_0..h_{orders-1} at the points x.

    Uses the stable three-term recurrence for the L^2-normalized Hermite
    functions,

        h_0(x)     = pi^{-1/4} exp(-x^2/2),
        h_1(x)     = sqrt(2) x h_0(x),
        h_{n+1}(x) = x sqrt(2/(n+1)) h_n(x) - sqrt(n/(n+1)) h_{n-1}(x).

    The Rodrigues form loses all accuracy past n ~ 20 and is never used.
    """
    x = np.asarray(x, dtype=float)
    table = np.empty((orders, x.size))
    table[0] = np.pi ** (-0.25) * np.exp(-0.5 * x * x)
    if orders > 1:
        table[1] = np.sqrt(2.0) * x * table[0]
    for n in range(1, orders - 1):
        table[n + 1] = x * np.sqrt(2.0 / (n + 1)) * table[n] - np.sqrt(
            n / (n + 1.0)
        ) * table[n - 1]
    return table


def scaled_hermite_rule(size: int, alpha: float = 1.0):
    """Quadrature nodes/weights for integrals of p(x) exp(-alpha^2 x^2).

    Returns (nodes, weights) with sum_j w_j f(x_j) = int f(x) dx exact
    whenever f(x) = p(x) exp(-alpha^2 x^2) with deg p <= 2*size - 1.
    The weights absorb the Gaussian factor of the raw Gauss-Hermite rule,
    so f is evaluated directly (no exp overflow for size <~ 350).
    """
    t, w = np.polynomial.hermite.hermgauss(size)
    nodes = t / alpha
    weights = np.exp(np.log(w) + t * t) / alpha
    return nodes, weights


@dataclass
class HermiteBasis:
    """Truncated oscillator eigenbasis with its quadrature grids.

    ``quad_nodes``/``quad_weights`` integrate pair products h_m h_n
    exactly; ``quartic_nodes``/``quartic_weights`` (the x -> x/sqrt(2)
    substituted rule) integrate quartic products exactly.
    """

    order: int
    eigenvalues: np.ndarray
    quad_nodes: np.ndarray
    quad_weights: np.ndarray
    basis_table: np.ndarray
    quartic_nodes: np.ndarray
    quartic_weights: np.ndarray
    quartic_table: np.ndarray
    _lp_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_modes(self) -> int:
        return self.order + 1

    def lp_rule(self, p: float):
        """Grid (nodes, weights, table) used for the L^p norm.

        Exact for even p (substitution x -> x / sqrt(p/2)); for other p
        the same construction is a plain quadrature approximation.
        """
        key = round(float(p), 12)
        if key not in self._lp_cache:
            alpha = np.sqrt(p / 2.0)
            size = max(self.quad_nodes.size, int(np.ceil((p * self.order + 1) / 2)) + 1)
            nodes, weights = scaled_hermite_rule(size, alpha)
            table = hermite_function_table(self.n_modes, nodes)
            self._lp_cache[key] = (nodes, weights, table)
        return self._lp_cache[key]


def build_basis(N: int, quad_size: int | None = None) -> HermiteBasis:
    """Build the order-N basis with a quadrature of ``quad_size`` points.

    quad_size defaults to max(2N + 2, 40) and must be at least 2N + 2 so
    that quartic integrands remain exact after weight factoring.
    """
    if N < 0:
        raise ParameterError(f"basis order must be >= 0, got {N}")
    if quad_size is None:
        quad_size = max(2 * N + 2, 40)
    if quad_size < 2 * N + 2:
        raise ParameterError(
            f"quad_size must be >= 2N + 2 = {2 * N + 2}, got {quad_size}"
        )
    eigenvalues = np.sqrt(1.0 + 2.0 * np.arange(N + 1))
    nodes, weights = scaled_hermite_rule(quad_size, 1.0)
    table = hermite_function_table(N + 1, nodes)
    q_size = max(quad_size, 2 * N + 1)
    q_nodes, q_weights = scaled_hermite_rule(q_size, np.sqrt(2.0))
    q_table = hermite_function_table(N + 1, q_nodes)
    return HermiteBasis(
        order=N,
        eigenvalues=eigenvalues,
        quad_nodes=nodes,
        quad_weights=weights,
        basis_table=table,
        quartic_nodes=q_nodes,
        quartic_weights=q_weights,
        quartic_table=q_table,
    )


def _check_coeffs(basis: HermiteBasis, coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (basis.n_modes,):
        raise ParameterError(
            f"expected {basis.n_modes} coefficients, got shape {coeffs.shape}"
        )
    return coeffs


def synthesize(basis: HermiteBasis, coeffs) -> np.ndarray:
    """Coefficient vector -> grid values on ``basis.quad_nodes``."""
    coeffs = _check_coeffs(basis, coeffs)
    return coeffs @ basis.basis_table


def analyze(basis: HermiteBasis, values) -> np.ndarray:
    """Grid values -> coefficients; left inverse of synthesize on E_N."""
    values = np.asarray(values, dtype=complex)
    if values.shape != basis.quad_nodes.shape:
        raise ParameterError(
            f"expected {basis.quad_nodes.size} grid values, got shape {values.shape}"
        )
    return basis.basis_table @ (basis.quad_weights * values)


def norm_sobolev(basis: HermiteBasis, coeffs, s: float) -> float:
    """Weighted coefficient norm (sum_n lambda_n^{2s} |c_n|^2)^{1/2}."""
    coeffs = _check_coeffs(basis, coeffs)
    return float(
        np.sqrt(np.sum(basis.eigenvalues ** (2.0 * s) * np.abs(coeffs) ** 2))
    )


def norm_lp(basis: HermiteBasis, coeffs, p: float) -> float:
    """Grid L^p norm of the field with the given coefficients.

    Exact for p in {2, 4, 6} (and any even p); other p >= 1 use the same
    substituted rule and are approximate.
    """
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    coeffs = _check_coeffs(basis, coeffs)
    nodes, weights, table = basis.lp_rule(p)
    values = np.abs(coeffs @ table)
    return float(np.sum(weights * values**p) ** (1.0 / p))


def gns_ratio(basis: HermiteBasis, coeffs) -> float:
    """Ratio ||u||_{L^4}^4 / (||u||_{H^1} ||u||_{L^2}^3).

    Scale invariant (both sides are degree-4 homogeneous); its empirical
    supremum calibrates the chemical potential needed for coercivity.
    """
    coeffs = _check_coeffs(basis, coeffs)
    l2 = norm_sobolev(basis, coeffs, 0.0)
    if l2 == 0.0:
        raise ParameterError("gns_ratio undefined for the zero field")
    h1 = norm_sobolev(basis, coeffs, 1.0)
    l4 = norm_lp(basis, coeffs, 4.0)
    return l4**4 / (h1 * l2**3)
