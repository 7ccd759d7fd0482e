"""Deterministic quadrature ground truth at tiny truncation.

At N <= 1 every estimator target reduces to low-dimensional integrals in
the mode intensities u_n = |c_n|^2 (independent exponentials under the
reference measure) and one relative phase.  Radial coordinates make the
shell indicator an exact integration limit instead of a discontinuous
integrand, so shell probabilities come out to quadrature accuracy.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ParameterError
from .fields import GibbsParams, renorm_constant
from .spectral import HermiteBasis

__all__ = ["OracleGrid", "quadrature_oracle"]

_OBSERVABLES = ("partition", "shell_prob", "moment_u0", "shell_moment_u0")


@dataclass(frozen=True)
class OracleGrid:
    radial_nodes: int = 80     # Gauss-Legendre points per intensity coordinate
    angle_nodes: int = 48      # midpoint rule on the relative phase
    radial_span: float = 40.0  # upper integration limit, in units of the mode mean


def _quartic_tensor(basis):
    """Self- and cross-integrals of the first two eigenfunction densities."""
    w = basis.quartic_weights
    t = basis.quartic_table
    a = float(np.sum(w * t[0] ** 4))
    if basis.order == 0:
        return a, 0.0, 0.0
    b = float(np.sum(w * t[1] ** 4))
    c = float(np.sum(w * t[0] ** 2 * t[1] ** 2))
    return a, b, c


def _oracle_1d(basis, params, observable, power, grid):
    """N = 0: adaptive quadrature in the single intensity u = |c_0|^2."""
    eps = params.epsilon
    lam, A = params.coupling, params.chem_potential
    c_ren = renorm_constant(params)
    a4, _, _ = _quartic_tensor(basis)
    lo = max(0.0, params.mass_level - params.shell_width + c_ren)
    hi = params.mass_level + params.shell_width + c_ren
    upper = grid.radial_span * eps

    def integrand(u, k=0):
        v = -(lam / 4.0) * a4 * u**2 + A * abs(u - c_ren) ** 3
        return u**k * np.exp(-u / eps - v / eps) / eps

    def integrate(k, a, b):
        if b <= a:
            return 0.0
        pts = [p for p in (c_ren,) if a < p < b]
        val, _err = quad(integrand, a, b, args=(k,), points=pts or None, limit=200)
        return val

    z = integrate(0, 0.0, upper)
    if observable == "partition":
        return z
    if observable == "moment_u0":
        return integrate(power, 0.0, upper) / z
    num0 = integrate(0, lo, min(hi, upper))
    if observable == "shell_prob":
        return num0 / z
    return integrate(power, lo, min(hi, upper)) / num0  # shell_moment_u0


def _gl_nodes(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def _oracle_2mode(basis, params, observable, power, grid):
    """N = 1: tensor quadrature in (u_0, u_1, relative phase).

    The quartic functional of c_0 = sqrt(u0), c_1 = sqrt(u1) e^{i psi}
    reduces to  a u0^2 + b u1^2 + 2 c u0 u1 (1 + 2 cos^2 psi).  For shell
    observables the u1 integral runs over the exact shell interval given
    u0, so the indicator never enters as a discontinuity.
    """
    eps = params.epsilon
    lam, A = params.coupling, params.chem_potential
    c_ren = renorm_constant(params)
    a4, b4, c4 = _quartic_tensor(basis)
    eps0, eps1 = eps, eps / 3.0

    psi, wpsi = _gl_nodes(grid.angle_nodes, 0.0, np.pi)
    wpsi = wpsi / np.pi  # average over the phase
    phase = 1.0 + 2.0 * np.cos(psi) ** 2

    def weight(u0, u1, ps):
        # u0, u1, ps broadcastable; density x Boltzmann factor
        quart = a4 * u0**2 + b4 * u1**2 + 2.0 * c4 * u0 * u1 * ps
        v = -(lam / 4.0) * quart + A * np.abs(u0 + u1 - c_ren) ** 3
        return (
            np.exp(-u0 / eps0 - u1 / eps1 - v / eps) / (eps0 * eps1)
        )

    def bulk(k):
        """E[u0^k exp(-V/eps)] over the full quadrant."""
        total = 0.0
        u0, w0 = _gl_nodes(grid.radial_nodes, 0.0, grid.radial_span * eps0)
        u1, w1 = _gl_nodes(grid.radial_nodes, 0.0, grid.radial_span * eps1)
        f = weight(u0[:, None, None], u1[None, :, None], phase[None, None, :])
        f = f * u0[:, None, None] ** k
        total = np.einsum("i,j,k,ijk->", w0, w1, wpsi, f)
        return float(total)

    def shell(k):
        """E[u0^k exp(-V/eps) 1_shell] with exact u1 limits."""
        lo = max(0.0, params.mass_level - params.shell_width + c_ren)
        hi = params.mass_level + params.shell_width + c_ren
        total = 0.0
        # piecewise in u0 at the lower-edge kink
        segments = [(0.0, lo), (lo, hi)] if lo > 0 else [(0.0, hi)]
        for a, b in segments:
            if b <= a:
                continue
            u0, w0 = _gl_nodes(grid.radial_nodes, a, b)
            u1_lo = np.maximum(0.0, lo - u0)
            u1_hi = hi - u0
            x, xw = np.polynomial.legendre.leggauss(grid.radial_nodes)
            half = 0.5 * (u1_hi - u1_lo)
            mid = 0.5 * (u1_hi + u1_lo)
            u1 = mid[:, None] + half[:, None] * x[None, :]
            w1 = half[:, None] * xw[None, :]
            f = weight(u0[:, None, None], u1[:, :, None], phase[None, None, :])
            f = f * u0[:, None, None] ** k
            total += np.einsum("i,ij,k,ijk->", w0, w1, wpsi, f)
        return float(total)

    z = bulk(0)
    if observable == "partition":
        return z
    if observable == "moment_u0":
        return bulk(power) / z
    num0 = shell(0)
    if observable == "shell_prob":
        return num0 / z
    return shell(power) / num0


def quadrature_oracle(
    basis: HermiteBasis,
    params: GibbsParams,
    observable: str,
    power: int = 1,
    grid: OracleGrid | None = None,
) -> float:
    """Deterministic ground-truth value of a named estimator target.

    observable: "partition" (plain scale), "shell_prob",
    "moment_u0" (E_rho |c_0|^{2 power}), or "shell_moment_u0" (same,
    conditioned on the shell).  Only N <= 1 is supported.
    """
    if observable not in _OBSERVABLES:
        raise ParameterError(
            f"unknown observable {observable!r}; choose from {_OBSERVABLES}"
        )
    if basis.order != params.truncation:
        raise ParameterError("basis order and params.truncation disagree")
    if 2 * (params.truncation + 1) > 4:
        raise ParameterError(
            f"oracle supports real dimension <= 4, got N = {params.truncation}"
        )
    if grid is None:
        grid = OracleGrid()
    if params.truncation == 0:
        return _oracle_1d(basis, params, observable, power, grid)
    return _oracle_2mode(basis, params, observable, power, grid)
