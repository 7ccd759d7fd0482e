"""Experiment drivers for the three low-temperature limits.

Free energy of the partition function, shell (microcanonical) entropy,
and concentration of the conditioned measure on the minimizer orbit.
Slopes are fitted against 1/eps by weighted least squares and compared
with variational targets computed from the minimization module.

The variational targets use the decay-rate functional of the sampled
measure (see energy.laplace_rate): with the unit-variance reference
convention the Gaussian factor contributes the full squared H^1 norm,
so the shell slope is 2 I_{lambda/2}(D) + A D^3, and the measure
concentrates on the constrained minimizer at effective coupling
lambda/2.  The pure-Gaussian control (coupling 0, A 0, N 0) has slope D
under the same convention, which fixes the normalization unambiguously.
"""

from dataclasses import dataclass, replace

import math
import numpy as np

from .errors import ParameterError
from .fields import GibbsParams
from .mcmc import (
    ChainConfig,
    Estimate,
    default_step_beta,
    estimate_partition,
    estimate_shell_probability,
    make_shell_init,
    run_conditioned_chain,
)
from .oracle import OracleGrid, quadrature_oracle
from .soliton import MinimizeOptions, minimize_constrained, minimize_unconstrained_hg
from .spectral import HermiteBasis

__all__ = [
    "RateFit",
    "ExperimentReport",
    "fit_rate",
    "shell_rate_target",
    "free_energy_experiment",
    "entropy_experiment",
    "concentration_experiment",
    "quadrature_oracle",
    "OracleGrid",
]


@dataclass(frozen=True)
class RateFit:
    slope_c: float          # sign convention log P ~ -c/eps + b
    intercept_b: float
    slope_se: float
    residual: float
    points: tuple           # of (epsilon, log_value, std_error)


@dataclass(frozen=True)
class ExperimentReport:
    kind: str
    config: dict
    rows: tuple             # per-cell dictionaries
    fit: RateFit | None
    target: float
    target_source: str
    tolerance: float
    verdict: bool
    notes: tuple = ()


def fit_rate(points) -> RateFit:
    """Weighted least squares of log-values against 1/eps.

    Weights are inverse squared standard errors (floored at 1e-12 so
    exact synthetic data is allowed); the reported slope flips sign so
    that positive c means decay.
    """
    pts = [(float(e), float(v), float(s)) for e, v, s in points]
    if len({e for e, _, _ in pts}) < 3:
        raise ParameterError("rate fit needs at least 3 distinct epsilon values")
    x = np.array([1.0 / e for e, _, _ in pts])
    y = np.array([v for _, v, _ in pts])
    se = np.maximum(np.array([s for _, _, s in pts]), 1e-12)
    w = 1.0 / se**2
    design = np.column_stack([x, np.ones_like(x)])
    wd = design * w[:, None]
    cov = np.linalg.inv(design.T @ wd)
    beta = cov @ (wd.T @ y)
    resid = y - design @ beta
    return RateFit(
        slope_c=float(-beta[0]),
        intercept_b=float(beta[1]),
        slope_se=float(np.sqrt(cov[0, 0])),
        residual=float(np.sqrt(np.average(resid**2, weights=w))),
        points=tuple(pts),
    )


def shell_rate_target(basis: HermiteBasis, coupling: float, A: float, D: float,
                      opts: MinimizeOptions | None = None):
    """Predicted shell-entropy slope and the minimizer realizing it.

    inf over mass D of the decay-rate functional equals
    2 I_{coupling/2}(D) + A D^3, attained at the constrained minimizer
    with effective coupling lambda/2 (the doubled quadratic part simply
    rescales the variational problem).
    """
    res = minimize_constrained(basis, coupling / 2.0, D, opts)
    return 2.0 * res.energy + A * D**3, res


def free_energy_experiment(
    basis: HermiteBasis,
    base_params: GibbsParams,
    eps_grid,
    n_samples: int,
    seed: int = 0,
    tolerance: float = 0.05,
) -> ExperimentReport:
    """eps log Z along the temperature grid; the limit target is zero.

    Passes when |eps log Z| decreases along the (descending) grid and is
    below tolerance at the smallest temperature.
    """
    eps_grid = sorted(set(float(e) for e in eps_grid), reverse=True)
    rows = []
    points = []
    for i, eps in enumerate(eps_grid):
        params = replace(base_params, epsilon=eps)
        rng = np.random.default_rng([seed, i])
        est = estimate_partition(basis, params, n_samples, rng)
        rows.append(
            {
                "epsilon": eps,
                "log_z": est.value,
                "std_error": est.std_error,
                "eps_log_z": eps * est.value,
                "n_effective": est.n_effective,
            }
        )
        points.append((eps, est.value, est.std_error))
    minimizer = minimize_unconstrained_hg(
        basis, base_params.coupling, base_params.chem_potential
    )
    target = 0.0  # objective at the verified zero minimizer
    scaled = [abs(r["eps_log_z"]) for r in rows]
    decreasing = all(b <= a + 3.0 * eps_grid[i + 1] * rows[i + 1]["std_error"]
                     for i, (a, b) in enumerate(zip(scaled, scaled[1:])))
    verdict = decreasing and scaled[-1] <= tolerance
    notes = (
        f"unconstrained minimizer L2 norm {float(np.sqrt(np.sum(np.abs(minimizer) ** 2))):.2e}",
    )
    return ExperimentReport(
        kind="free_energy",
        config={"eps_grid": eps_grid, "n_samples": n_samples, "seed": seed,
                "params": _params_dict(base_params)},
        rows=tuple(rows),
        fit=fit_rate(points) if len(eps_grid) >= 3 else None,
        target=target,
        target_source="soliton.minimize_unconstrained_hg (zero field)",
        tolerance=tolerance,
        verdict=bool(verdict),
        notes=notes,
    )


def entropy_experiment(
    basis: HermiteBasis,
    base_params: GibbsParams,
    eps_grid,
    n_samples: int,
    r_schedule=None,
    seed: int = 0,
    tolerance: float = 0.15,
) -> ExperimentReport:
    """Shell log-probabilities over (eps, r); slope vs variational target.

    The iterated limit (r after eps) is approximated by a shrinking
    geometric r schedule; the smallest-r fit is the headline number and
    carries an O(r) bias toward the shell's inner edge, noted in the
    report.  Tolerances are engineering choices validated against the
    N = 0 closed form.
    """
    D = base_params.mass_level
    if r_schedule is None:
        r_schedule = [0.2 * D, 0.1 * D, 0.05 * D]
    r_schedule = sorted(set(float(r) for r in r_schedule), reverse=True)
    eps_grid = sorted(set(float(e) for e in eps_grid), reverse=True)

    target, q_res = shell_rate_target(
        basis, base_params.coupling, base_params.chem_potential, D
    )
    rows = []
    fits = {}
    for j, r in enumerate(r_schedule):
        points = []
        for i, eps in enumerate(eps_grid):
            params = replace(base_params, epsilon=eps, shell_width=r)
            rng = np.random.default_rng([seed, j, i])
            est = estimate_shell_probability(
                basis, params, q_res.q_coeffs, n_samples, rng
            )
            rows.append(
                {
                    "r": r,
                    "epsilon": eps,
                    "log_prob": est.value,
                    "std_error": est.std_error,
                    "n_effective": est.n_effective,
                }
            )
            points.append((eps, est.value, est.std_error))
        fits[r] = fit_rate(points)
    headline = fits[r_schedule[-1]]
    verdict = abs(headline.slope_c - target) <= tolerance * abs(target)
    notes = (
        f"minimizer at effective coupling {base_params.coupling / 2.0}",
        f"I_eff(D) = {q_res.energy:.6f}, A D^3 = "
        f"{base_params.chem_potential * D**3:.6f}",
        "headline fit at smallest r; residual r-bias is O(r)",
    ) + tuple(
        f"fit at r={r:.6g}: c={f.slope_c:.6f} +/- {f.slope_se:.3g}"
        for r, f in fits.items()
    )
    return ExperimentReport(
        kind="entropy",
        config={"eps_grid": eps_grid, "r_schedule": r_schedule,
                "n_samples": n_samples, "seed": seed,
                "params": _params_dict(base_params)},
        rows=tuple(rows),
        fit=headline,
        target=float(target),
        target_source="ldp.shell_rate_target (constrained minimizer)",
        tolerance=tolerance,
        verdict=bool(verdict),
        notes=notes,
    )


def concentration_experiment(
    basis: HermiteBasis,
    base_params: GibbsParams,
    eps_grid,
    delta_grid,
    p: float = 4.0,
    n_steps: int = 200_000,
    seed: int = 0,
    step_beta=None,
    n_burn: int | None = None,
    thin: int = 10,
) -> ExperimentReport:
    """Orbit-distance exceedance rates from shell-conditioned chains.

    For each temperature, a conditioned chain started at the mass-
    adjusted minimizer produces the exceedance fraction of each delta;
    per-delta rates are then fitted in 1/eps.  Cells with zero
    exceedances are censored (upper bound only) and excluded from fits.
    Passes when every fitted c(delta) clears 3 fit-SEs and the rates are
    non-decreasing in delta.
    """
    D = base_params.mass_level
    eps_grid = sorted(set(float(e) for e in eps_grid), reverse=True)
    delta_grid = sorted(set(float(d) for d in delta_grid))
    target_rate, q_res = shell_rate_target(
        basis, base_params.coupling, base_params.chem_potential, D
    )
    q = q_res.q_coeffs
    nodes, weights, table = basis.lp_rule(p)
    q_vals = q @ table
    thetas = np.linspace(0.0, 2.0 * np.pi, 128, endpoint=False)
    phases = np.exp(1j * thetas)

    rows = []
    per_delta = {d: [] for d in delta_grid}
    for i, eps in enumerate(eps_grid):
        params = replace(base_params, epsilon=eps)
        beta = step_beta(eps) if callable(step_beta) else (
            step_beta if step_beta is not None else default_step_beta(eps)
        )
        init = make_shell_init(basis, params, q)
        config = ChainConfig(
            params=params,
            step_beta=beta,
            n_steps=n_steps,
            n_burn=n_burn if n_burn is not None else n_steps // 10,
            thin=thin,
            seed=int(np.random.default_rng([seed, i]).integers(2**63)),
            init=init,
        )
        chain = run_conditioned_chain(basis, config)
        dists = _orbit_distances(chain.samples, q_vals, table, weights, phases, p)
        n_kept = dists.size
        n_eff = max(n_kept / max(chain.iact, 1.0), 1.0)
        for d in delta_grid:
            frac = float(np.mean(dists >= d))
            se = float(np.sqrt(max(frac * (1.0 - frac), 1.0 / n_kept) / n_eff))
            censored = frac == 0.0
            rows.append(
                {
                    "epsilon": eps,
                    "delta": d,
                    "fraction": frac,
                    "std_error": se,
                    "censored": censored,
                    "accept_rate": chain.accept_rate,
                    "iact": chain.iact,
                    "n_kept": n_kept,
                }
            )
            if not censored and frac < 1.0:
                # SE of log fraction by the delta method
                per_delta[d].append((eps, math.log(frac), se / frac))
            # saturated (frac == 1) and censored cells stay out of the fit

    fits = {}
    notes = []
    for d in delta_grid:
        pts = per_delta[d]
        if len({e for e, _, _ in pts}) >= 3:
            fits[d] = fit_rate(pts)
        else:
            fits[d] = None
            notes.append(f"delta={d:g}: too many censored/saturated cells to fit")
    fitted = [f for f in fits.values() if f is not None]
    positive = bool(fitted) and all(f.slope_c > 3.0 * f.slope_se for f in fitted)
    slopes = [fits[d].slope_c for d in delta_grid if fits[d] is not None]
    monotone = all(b >= a - 1e-12 for a, b in zip(slopes, slopes[1:]))
    decreasing = True
    for d in delta_grid:
        fracs = [row["fraction"] for row in rows
                 if row["delta"] == d and not row["censored"]]
        decreasing &= all(b < a for a, b in zip(fracs, fracs[1:]))
    verdict = len(fitted) == len(delta_grid) and positive and monotone and decreasing
    notes += [
        f"c({d:g}) = {fits[d].slope_c:.4f} +/- {fits[d].slope_se:.4f}"
        for d in delta_grid
        if fits[d] is not None
    ]
    return ExperimentReport(
        kind="concentration",
        config={"eps_grid": eps_grid, "delta_grid": delta_grid, "p": p,
                "n_steps": n_steps, "seed": seed,
                "params": _params_dict(base_params)},
        rows=tuple(rows),
        fit=fits[delta_grid[-1]],
        target=0.0,
        target_source="positivity of the fitted rates (stability margin)",
        tolerance=0.0,
        verdict=verdict,
        notes=tuple(notes),
    )


def _orbit_distances(samples, q_vals, table, weights, phases, p):
    """Minimum L^p distance to the phase orbit, per sample row.

    Phase minimization over a 128-point grid with one parabolic
    refinement; adequate for exceedance counting.
    """
    vals = samples @ table
    n = vals.shape[0]
    best = np.full(n, np.inf)
    second = np.zeros(n)
    dist_grid = np.empty((phases.size, n))
    for k, ph in enumerate(phases):
        diff = np.abs(vals - ph * q_vals[None, :])
        dist_grid[k] = (diff**p) @ weights
    idx = np.argmin(dist_grid, axis=0)
    m = phases.size
    f0 = dist_grid[(idx - 1) % m, np.arange(n)]
    f1 = dist_grid[idx, np.arange(n)]
    f2 = dist_grid[(idx + 1) % m, np.arange(n)]
    denom = f0 - 2.0 * f1 + f2
    shift = np.where(np.abs(denom) > 1e-300, 0.5 * (f0 - f2) / np.where(denom == 0, 1, denom), 0.0)
    shift = np.clip(shift, -1.0, 1.0)
    # quadratic interpolation of the minimum value
    fmin = f1 - 0.25 * (f0 - f2) * shift
    return np.maximum(fmin, 0.0) ** (1.0 / p)


def _params_dict(params: GibbsParams) -> dict:
    return {
        "epsilon": params.epsilon,
        "coupling": params.coupling,
        "chem_potential": params.chem_potential,
        "truncation": params.truncation,
        "mass_level": params.mass_level,
        "shell_width": params.shell_width,
    }
