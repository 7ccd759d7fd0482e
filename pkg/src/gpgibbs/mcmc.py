"""Samplers and estimators for the tamed Gibbs measure and its mass shell.

The chain proposal mixes the current state with an independent reference
draw, so acceptance depends only on differences of the taming potential
and stays well behaved toward small temperature.  Shell conditioning is
enforced inside the Metropolis filter by rejection, which preserves the
exact invariant measure.
"""

from dataclasses import dataclass

import math
import numpy as np
from scipy.special import i0e

from .errors import DiagnosticError, ParameterError
from .energy import tamed_potential
from .fields import (
    GibbsParams,
    renorm_constant,
    sample_gaussian,
    sample_gaussian_batch,
    wick_mass,
)
from .spectral import HermiteBasis, _check_coeffs

__all__ = [
    "ChainConfig",
    "ChainResult",
    "Estimate",
    "pcn_step",
    "run_chain",
    "run_conditioned_chain",
    "make_shell_init",
    "estimate_partition",
    "estimate_shell_probability",
]

_CHUNK = 20_000


@dataclass(frozen=True)
class ChainConfig:
    params: GibbsParams
    step_beta: float
    n_steps: int
    n_burn: int
    seed: int
    init: np.ndarray
    thin: int = 1

    def __post_init__(self):
        if not 0.0 < self.step_beta <= 1.0:
            raise ParameterError(f"step_beta must be in (0, 1], got {self.step_beta}")
        if not self.n_steps > self.n_burn >= 0:
            raise ParameterError(
                f"need n_steps > n_burn >= 0, got {self.n_steps}, {self.n_burn}"
            )
        if self.thin < 1:
            raise ParameterError(f"thin must be >= 1, got {self.thin}")


@dataclass(frozen=True)
class ChainResult:
    samples: np.ndarray       # (n_kept, N+1) complex
    accept_rate: float
    iact: float               # integrated autocorrelation of the L^2 mass
    warnings: tuple = ()


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    n_effective: float
    log_scale: bool = False


def default_step_beta(epsilon: float) -> float:
    """Proposal mixing weight; smaller at low temperature."""
    return 0.5 if epsilon >= 0.2 else 0.1


def pcn_step(basis, state, config: ChainConfig, rng):
    """One Gaussian-reference Metropolis step; returns (state, accepted).

    Proposal sqrt(1 - beta^2) phi + beta xi with xi a fresh reference
    draw; the acceptance ratio involves only the taming potential.
    """
    params = config.params
    beta = config.step_beta
    xi = sample_gaussian(basis, params, rng)
    proposal = np.sqrt(1.0 - beta**2) * state + beta * xi
    dv = tamed_potential(basis, params, state) - tamed_potential(basis, params, proposal)
    if np.log(rng.uniform()) < dv / params.epsilon:
        return proposal, True
    return state, False


def _iact(series: np.ndarray) -> float:
    """Integrated autocorrelation time by the windowed (5 tau) estimate."""
    x = series - series.mean()
    n = x.size
    if n < 8 or np.allclose(x, 0.0):
        return 1.0
    f = np.fft.rfft(x, n=2 * n)
    acf = np.fft.irfft(f * np.conj(f))[:n].real
    if acf[0] <= 0:
        return 1.0
    acf /= acf[0]
    tau = 1.0
    for m in range(1, n):
        tau += 2.0 * acf[m]
        if m >= 5.0 * tau:
            break
    return max(tau, 1.0)


def _drive_chain(basis, config, shell=False):
    params = config.params
    rng = np.random.default_rng(config.seed)
    beta = config.step_beta
    state = _check_coeffs(basis, config.init).copy()
    d, r = params.mass_level, params.shell_width
    if shell and abs(wick_mass(basis, params, state) - d) > r:
        raise ParameterError("conditioned chain must start inside the mass shell")
    v_state = tamed_potential(basis, params, state)
    accepted = 0
    kept = []
    mass_series = []
    contraction = np.sqrt(1.0 - beta**2)
    for step in range(config.n_steps):
        xi = sample_gaussian(basis, params, rng)
        proposal = contraction * state + beta * xi
        ok = True
        if shell and abs(wick_mass(basis, params, proposal) - d) > r:
            ok = False
            rng.uniform()  # keep the stream aligned with the free chain
        if ok:
            v_prop = tamed_potential(basis, params, proposal)
            if np.log(rng.uniform()) < (v_state - v_prop) / params.epsilon:
                state, v_state = proposal, v_prop
                accepted += 1
        if step >= config.n_burn and (step - config.n_burn) % config.thin == 0:
            kept.append(state.copy())
            mass_series.append(np.sum(np.abs(state) ** 2))
    samples = np.array(kept)
    rate = accepted / config.n_steps
    warnings = ()
    if rate < 0.01:
        warnings = (
            f"acceptance rate {rate:.4f} < 1%: step_beta {beta} too large "
            f"for epsilon {params.epsilon}",
        )
    return ChainResult(
        samples=samples,
        accept_rate=rate,
        iact=_iact(np.asarray(mass_series)),
        warnings=warnings,
    )


def run_chain(basis: HermiteBasis, config: ChainConfig) -> ChainResult:
    """Run the unconditioned chain; deterministic for a fixed seed."""
    return _drive_chain(basis, config, shell=False)


def run_conditioned_chain(basis: HermiteBasis, config: ChainConfig) -> ChainResult:
    """Chain restricted to the mass shell |M^w - D| <= r by rejection.

    Every emitted sample satisfies the shell constraint exactly; the
    initial state must already be inside the shell.
    """
    return _drive_chain(basis, config, shell=True)


def make_shell_init(basis: HermiteBasis, params: GibbsParams, Q) -> np.ndarray:
    """Rescale Q so its renormalized mass sits exactly at the shell center."""
    Q = _check_coeffs(basis, Q)
    m = float(np.sum(np.abs(Q) ** 2))
    target = params.mass_level + renorm_constant(params)
    return Q * np.sqrt(target / m)


def _log_mean_exp(logw: np.ndarray):
    """(log mean, SE of the log, effective sample size) of exp(logw).

    Max-shifted accumulation; -inf entries contribute zero weight.
    """
    n = logw.size
    m = np.max(logw)
    if not np.isfinite(m):
        return -math.inf, math.inf, 0.0
    w = np.exp(logw - m)
    mean = np.mean(w)
    se = np.std(w) / (mean * np.sqrt(n))
    ess = float(np.sum(w) ** 2 / np.sum(w**2))
    return float(m + np.log(mean)), float(se), ess


def _potential_batch(basis, params, fields_):
    """Vectorized taming potential over rows of ``fields_``."""
    out = np.empty(fields_.shape[0])
    c = renorm_constant(params)
    for lo in range(0, fields_.shape[0], _CHUNK):
        chunk = fields_[lo : lo + _CHUNK]
        values = np.abs(chunk @ basis.quartic_table)
        quart = np.sum(basis.quartic_weights * values**4, axis=1)
        mw = np.sum(np.abs(chunk) ** 2, axis=1) - c
        out[lo : lo + _CHUNK] = (
            -(params.coupling / 4.0) * quart
            + params.chem_potential * np.abs(mw) ** 3
        )
    return out


def estimate_partition(
    basis: HermiteBasis,
    params: GibbsParams,
    n_samples: int,
    rng: np.random.Generator,
) -> Estimate:
    """log E[exp(-V/eps)] under the reference measure, by plain Monte Carlo.

    The integrand concentrates where the reference measure sits, so no
    tilting is needed.  Log-scale accumulation with a delta-method
    standard error; raises DiagnosticError on ESS collapse.
    """
    if n_samples < 1000:
        raise ParameterError(f"n_samples must be >= 1000, got {n_samples}")
    fields_ = sample_gaussian_batch(basis, params, n_samples, rng)
    logw = -_potential_batch(basis, params, fields_) / params.epsilon
    value, se, ess = _log_mean_exp(logw)
    if ess < 10:
        raise DiagnosticError(
            f"partition estimator variance blow-up: effective sample size {ess:.2f}"
        )
    return Estimate(value=value, std_error=se, n_effective=ess, log_scale=True)


def estimate_shell_probability(
    basis: HermiteBasis,
    params: GibbsParams,
    Q,
    n_samples: int,
    rng: np.random.Generator,
    importance: bool = True,
) -> Estimate:
    """Log probability of the mass shell under the tamed Gibbs measure.

    Numerator E[exp(-V/eps) 1_shell] by importance sampling from the
    reference measure recentered at exp(i theta) Q with theta uniform
    (Q mass-adjusted to the shell center).  Averaging the shift over the
    phase orbit matches the symmetry of the target, and the mixture
    density ratio is closed form through the Bessel function I_0, so the
    weights stay tame where a fixed-phase shift has lognormal tails.
    Denominator from estimate_partition.  ``importance=False`` gives the
    naive estimator (for cross-checks at moderate temperature).
    """
    if n_samples < 1000:
        raise ParameterError(f"n_samples must be >= 1000, got {n_samples}")
    eps = params.epsilon
    lam2 = basis.eigenvalues**2
    c = renorm_constant(params)
    d, r = params.mass_level, params.shell_width

    noise = sample_gaussian_batch(basis, params, n_samples, rng)
    if importance:
        center = make_shell_init(basis, params, Q)
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n_samples)
        fields_ = noise + np.exp(1j * theta)[:, None] * center[None, :]
        # log mu(phi) - log of the phase-mixture density:
        #   mixture/mu = exp(-|Q|_{H1}^2/eps) I_0(2 |<Q, phi>_{H1}| / eps)
        q_h1 = float(np.sum(lam2 * np.abs(center) ** 2))
        overlap = np.abs(fields_ @ (lam2 * np.conj(center)))
        x = 2.0 * overlap / eps
        log_bessel = np.log(i0e(x)) + x
        log_ratio = q_h1 / eps - log_bessel
    else:
        fields_ = noise
        log_ratio = np.zeros(n_samples)

    logw = -_potential_batch(basis, params, fields_) / eps + log_ratio
    in_shell = np.abs(np.sum(np.abs(fields_) ** 2, axis=1) - c - d) <= r
    logw[~in_shell] = -np.inf
    if not np.any(in_shell):
        raise DiagnosticError(
            "no sample landed in the mass shell; importance design failed"
        )
    log_num, se_num, ess = _log_mean_exp(logw)
    if ess < 10:
        raise DiagnosticError(
            f"shell estimator variance blow-up: effective sample size {ess:.2f}"
        )
    den = estimate_partition(basis, params, n_samples, rng)
    return Estimate(
        value=log_num - den.value,
        std_error=float(np.hypot(se_num, den.std_error)),
        n_effective=min(ess, den.n_effective),
        log_scale=True,
    )
