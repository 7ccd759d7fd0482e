"""Constrained and unconstrained energy minimization.

Mass-constrained ground states via normalized gradient flow (projected
descent with rescaling to the mass sphere, backtracking line search),
the negative-energy mass threshold scan, the coercivity check through
unconstrained descent on the grand Hamiltonian, and distances to the
phase orbit of a minimizer.
"""

from dataclasses import dataclass

import math
import numpy as np

from .errors import ConvergenceError, DiagnosticError, ParameterError
from .energy import grand_hamiltonian, gradient_h, hamiltonian, mass
from .spectral import HermiteBasis, _check_coeffs

__all__ = [
    "MinimizeOptions",
    "SolitonResult",
    "ThresholdScan",
    "OrbitDistance",
    "minimize_constrained",
    "scan_mass_threshold",
    "minimize_unconstrained_hg",
    "orbit_distance",
]


@dataclass(frozen=True)
class MinimizeOptions:
    step: float = 0.1
    tol: float = 1e-7          # scaled by max(1, |I|); the float floor of
                               # the energy limits residuals to ~1e-8
    max_iter: int = 100_000
    restarts: int = 5
    seed: int = 7


@dataclass(frozen=True)
class SolitonResult:
    q_coeffs: np.ndarray
    energy: float
    mass_residual: float
    grad_residual: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class ThresholdScan:
    d_star: float              # +inf when no grid mass turns I(D) negative
    masses: np.ndarray
    energies: np.ndarray
    upper_bounds: np.ndarray   # ground-mode competitor D/2 - coupling D^2/(4 sqrt(2 pi))


@dataclass(frozen=True)
class OrbitDistance:
    theta_star: float
    distance: float
    p: float


def _gauge_fix(q: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the leading coefficient is real >= 0."""
    pivot = q[0] if abs(q[0]) > 1e-14 else q[np.argmax(np.abs(q))]
    if abs(pivot) == 0.0:
        return q.copy()
    out = q * (pivot.conjugate() / abs(pivot))
    out[0] = abs(out[0]) if abs(q[0]) > 1e-14 else out[0]
    return out


def _rescale_to_mass(phi: np.ndarray, D: float) -> np.ndarray:
    m = np.sum(np.abs(phi) ** 2)
    return phi * np.sqrt(D / m)


def _flow(basis, coupling, D, start, opts):
    """One normalized-gradient-flow run from ``start``."""
    phi = _rescale_to_mass(start.astype(complex), D)
    energy = hamiltonian(basis, phi, coupling).total_h
    tau = opts.step
    it = 0
    grad_res = math.inf
    eff_tol = opts.tol
    while it < opts.max_iter:
        it += 1
        g = gradient_h(basis, phi, coupling)
        # project out the sphere normal (real pairing)
        g_t = g - (np.sum((np.conj(g) * phi).real) / D) * phi
        grad_res = float(np.sqrt(np.sum(np.abs(g_t) ** 2)))
        if grad_res <= opts.tol * max(1.0, abs(energy)):
            break
        accepted = False
        for _ in range(40):
            trial = _rescale_to_mass(phi - tau * g_t, D)
            e_trial = hamiltonian(basis, trial, coupling).total_h
            if e_trial <= energy - 1e-4 * tau * grad_res**2:
                decrease = energy - e_trial
                phi, energy = trial, e_trial
                tau = min(tau * 1.25, 10.0)
                accepted = True
                break
            tau *= 0.5
        if accepted and decrease <= 1e-14 * max(1.0, abs(energy)):
            accepted = False  # decrease at rounding level: same as a stall
        if not accepted:
            # line search exhausted at float precision; a near-tolerance
            # residual still counts as converged (the energy decrease is
            # below rounding there)
            eff_tol = max(opts.tol, 1e-6)
            break
    converged = grad_res <= eff_tol * max(1.0, abs(energy))
    q = _gauge_fix(phi)
    return SolitonResult(
        q_coeffs=q,
        energy=float(energy),
        mass_residual=abs(mass(basis, q) - D),
        grad_residual=grad_res,
        iterations=it,
        converged=converged,
    )


def minimize_constrained(
    basis: HermiteBasis,
    coupling: float,
    D: float,
    opts: MinimizeOptions | None = None,
) -> SolitonResult:
    """Minimize H over the mass-D sphere; gauge-fixed best of restarts.

    Starts from sqrt(D) h_0 and from perturbed restarts; ties within
    1e-12 in energy break lexicographically on the gauge-fixed
    coefficients.  Raises ConvergenceError (carrying the best iterate)
    when no run converges.
    """
    if D <= 0:
        raise ParameterError(f"mass level must be > 0, got {D}")
    if opts is None:
        opts = MinimizeOptions()
    rng = np.random.default_rng(opts.seed)
    n = basis.n_modes
    base = np.zeros(n, dtype=complex)
    base[0] = np.sqrt(D)
    starts = [base]
    for _ in range(max(0, opts.restarts - 1)):
        bump = 0.2 * np.sqrt(D) * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / basis.eigenvalues
        starts.append(base + bump)

    best = None
    for start in starts:
        res = _flow(basis, coupling, D, start, opts)
        if best is None:
            best = res
            continue
        if res.converged and not best.converged:
            best = res
        elif res.converged == best.converged:
            if res.energy < best.energy - 1e-12:
                best = res
            elif abs(res.energy - best.energy) <= 1e-12:
                a = np.concatenate([res.q_coeffs.real, res.q_coeffs.imag])
                b = np.concatenate([best.q_coeffs.real, best.q_coeffs.imag])
                if tuple(a) < tuple(b):
                    best = res
    if not best.converged:
        raise ConvergenceError(
            f"no restart reached gradient tolerance (best residual "
            f"{best.grad_residual:.3e})",
            best=best,
        )
    return best


def scan_mass_threshold(
    basis: HermiteBasis,
    coupling: float,
    d_grid,
    opts: MinimizeOptions | None = None,
) -> ThresholdScan:
    """Find the smallest grid mass with negative constrained minimum.

    Returns the full I(D) table with the ground-mode competitor upper
    bound; d_star is +inf when the grid is exhausted without a sign
    change.
    """
    d_grid = np.asarray(d_grid, dtype=float)
    if d_grid.ndim != 1 or np.any(np.diff(d_grid) <= 0):
        raise ParameterError("d_grid must be strictly increasing")
    energies = np.empty_like(d_grid)
    for i, d in enumerate(d_grid):
        energies[i] = minimize_constrained(basis, coupling, d, opts).energy
    bounds = d_grid / 2.0 - coupling * d_grid**2 / (4.0 * np.sqrt(2.0 * np.pi))
    negative = np.nonzero(energies < 0.0)[0]
    d_star = float(d_grid[negative[0]]) if negative.size else math.inf
    return ThresholdScan(
        d_star=d_star, masses=d_grid, energies=energies, upper_bounds=bounds
    )


def minimize_unconstrained_hg(
    basis: HermiteBasis,
    coupling: float,
    A: float,
    opts: MinimizeOptions | None = None,
) -> np.ndarray:
    """Descend the grand Hamiltonian from random starts.

    With A at or above the coercivity threshold the unique minimizer is
    the zero field; converging anywhere else (or reaching a negative
    objective) raises DiagnosticError, signalling A below threshold.
    """
    if opts is None:
        opts = MinimizeOptions(restarts=3)
    rng = np.random.default_rng(opts.seed)
    n = basis.n_modes
    starts = [
        (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / basis.eigenvalues
        for _ in range(max(1, opts.restarts))
    ]
    starts.append(3.0 * np.eye(n, dtype=complex)[0])
    result = None
    for start in starts:
        phi = start.astype(complex)
        obj = grand_hamiltonian(basis, phi, coupling, A)
        tau = opts.step
        for _ in range(opts.max_iter):
            if obj < -1e-10:
                raise DiagnosticError(
                    f"grand Hamiltonian reached {obj:.3e} < 0; chemical "
                    f"potential {A} is below the coercivity threshold"
                )
            m = np.sum(np.abs(phi) ** 2)
            g = gradient_h(basis, phi, coupling) + 6.0 * A * m**2 * phi
            gn2 = float(np.sum(np.abs(g) ** 2))
            if gn2 <= (1e-12 * max(1.0, obj)) ** 2:
                break
            accepted = False
            for _ in range(60):
                trial = phi - tau * g
                o_trial = grand_hamiltonian(basis, trial, coupling, A)
                if o_trial <= obj - 1e-4 * tau * gn2:
                    phi, obj = trial, o_trial
                    tau = min(tau * 1.25, 10.0)
                    accepted = True
                    break
                tau *= 0.5
            if not accepted:
                break
        l2 = float(np.sqrt(np.sum(np.abs(phi) ** 2)))
        if l2 > 1e-6 or obj > 1e-10:
            raise DiagnosticError(
                f"descent stalled at L2 norm {l2:.3e}, objective {obj:.3e}; "
                f"chemical potential {A} appears below the coercivity threshold"
            )
        result = phi
    return result


def orbit_distance(basis: HermiteBasis, phi, Q, p: float = 2.0) -> OrbitDistance:
    """Distance from phi to the phase orbit {exp(i theta) Q} in L^p.

    For p = 2 the optimal phase is closed form; otherwise a 64-point
    phase grid (seeded with the L^2 solution) is refined by golden
    section.  This upper-bounds the distance to the full minimizer set.
    """
    phi = _check_coeffs(basis, phi)
    Q = _check_coeffs(basis, Q)
    inner = complex(np.sum(np.conj(Q) * phi))
    theta2 = float(np.angle(inner)) % (2.0 * np.pi)
    if p == 2.0:
        d = float(np.sqrt(np.sum(np.abs(phi - np.exp(1j * theta2) * Q) ** 2)))
        return OrbitDistance(theta_star=theta2, distance=d, p=2.0)

    nodes, weights, table = basis.lp_rule(p)
    phi_v = phi @ table
    q_v = Q @ table

    def dist_p(theta):
        return float(
            np.sum(weights * np.abs(phi_v - np.exp(1j * theta) * q_v) ** p)
        ) ** (1.0 / p)

    thetas = np.concatenate(
        [np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False), [theta2]]
    )
    values = [dist_p(t) for t in thetas]
    k = int(np.argmin(values))
    width = 2.0 * np.pi / 64.0
    lo, hi = thetas[k] - width, thetas[k] + width
    gr = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - gr * (b - a)
    c2 = a + gr * (b - a)
    f1, f2 = dist_p(c1), dist_p(c2)
    while b - a > 1e-9:
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - gr * (b - a)
            f1 = dist_p(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + gr * (b - a)
            f2 = dist_p(c2)
    theta_star = float((a + b) / 2.0) % (2.0 * np.pi)
    return OrbitDistance(theta_star=theta_star, distance=dist_p(theta_star), p=float(p))
