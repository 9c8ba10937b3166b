"""Sampler diagnostics: effective sample size, mode discovery and frequency
error, weight-convergence validation against the quadrature oracle, energy
barrier profiles, and posterior risk."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import EnergyPartition, TargetDensity, ThetaWeights, region_index
from .quadrature import occupancy_from_masses, region_masses
from .samplers import RunRecord


@dataclass(frozen=True)
class EssReport:
    """Per-coordinate effective sample sizes with the run-time summary."""

    per_coordinate: np.ndarray
    seconds_per_min_ess: float

    @property
    def minimum(self) -> float:
        return float(np.min(self.per_coordinate))

    @property
    def median(self) -> float:
        return float(np.median(self.per_coordinate))

    @property
    def maximum(self) -> float:
        return float(np.max(self.per_coordinate))

    def to_dict(self) -> dict:
        return {
            "ess": self.per_coordinate.tolist(),
            "min": self.minimum,
            "med": self.median,
            "max": self.maximum,
            "seconds_per_min_ess": self.seconds_per_min_ess,
        }


@dataclass(frozen=True)
class ModeReport:
    """Mode discovery and visit frequencies for one chain."""

    n_dis: int
    freq: np.ndarray

    def to_dict(self) -> dict:
        return {"n_dis": self.n_dis, "freq": self.freq.tolist()}


def _autocovariance(x: np.ndarray) -> np.ndarray:
    n = x.size
    x = x - x.mean()
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conj(f))[:n].real
    return acov / n


def ess(samples: np.ndarray, coordinate: int = 0) -> float:
    """Effective sample size n / (1 + 2 sum rho_k), with the autocovariance
    sum truncated by the initial-monotone-positive-sequence rule.

    A constant sequence is flagged as degenerate and reported as 1.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 2:
        x = x[:, coordinate]
    n = x.size
    if n < 100:
        raise ValueError("need at least 100 samples for an ESS estimate")
    acov = _autocovariance(x)
    if acov[0] <= 0:
        warnings.warn("degenerate chain: constant sequence")
        return 1.0
    rho = acov / acov[0]
    # pair sums Gamma_k = rho_{2k} + rho_{2k+1}: keep while positive, then
    # force the sequence to be nonincreasing
    n_pairs = n // 2
    tau = 0.0
    prev = np.inf
    for k in range(n_pairs):
        g = rho[2 * k] + (rho[2 * k + 1] if 2 * k + 1 < n else 0.0)
        if g <= 0.0:
            break
        g = min(g, prev)
        tau += 2.0 * g
        prev = g
    tau -= 1.0  # rho_0 counted twice in the pair sums
    tau = max(tau, 1e-12)
    return float(np.clip(n / tau, 1.0, n))


def ess_report(record: RunRecord) -> EssReport:
    """ESS of every coordinate on the post-burn-in chain."""
    post = record.post_burn_in()
    values = np.array([ess(post[:, i]) for i in range(post.shape[1])])
    spm = record.wall_time / max(float(np.min(values)), 1e-12)
    return EssReport(per_coordinate=values, seconds_per_min_ess=spm)


def mode_assignment(samples: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Nearest-mode index (0-based) per sample; ties go to the lowest index."""
    modes = np.atleast_2d(np.asarray(modes, dtype=float))
    if modes.shape[0] == 0:
        raise ValueError("modes must be nonempty")
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    d2 = ((samples[:, None, :] - modes[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def mode_report(samples: np.ndarray, modes: np.ndarray) -> ModeReport:
    assign = mode_assignment(samples, modes)
    counts = np.bincount(assign, minlength=np.atleast_2d(modes).shape[0])
    return ModeReport(n_dis=int(np.count_nonzero(counts)), freq=counts / counts.sum())


def frequency_error(assignments_per_chain: Sequence[np.ndarray], n_modes: int) -> float:
    """Mean absolute deviation of per-chain mode-visit proportions from the
    uniform 1/K, averaged over chains and modes."""
    chains = list(assignments_per_chain)
    if not chains:
        raise ValueError("need at least one chain")
    total = 0.0
    for assign in chains:
        assign = np.asarray(assign)
        if assign.size == 0:
            raise ValueError("chain with zero samples")
        freq = np.bincount(assign, minlength=n_modes) / assign.size
        total += float(np.sum(np.abs(freq - 1.0 / n_modes)))
    return total / (len(chains) * n_modes)


@dataclass(frozen=True)
class ThetaConvergenceReport:
    """Pairwise deviation of theta differences from the oracle limit."""

    max_pairwise_deviation: float
    theta: np.ndarray
    oracle_log_weights: np.ndarray  # log(omega_i / (pi_i + nu)), non-empty regions
    nonempty: np.ndarray  # boolean mask over regions

    def to_dict(self) -> dict:
        return {
            "max_pairwise_deviation": self.max_pairwise_deviation,
            "theta": self.theta.tolist(),
            "oracle_log_weights": self.oracle_log_weights.tolist(),
            "nonempty": self.nonempty.tolist(),
        }


def theta_convergence_check(
    record: RunRecord,
    target: TargetDensity,
    partition: EnergyPartition,
    bounds,
    masses: Optional[np.ndarray] = None,
    tol: float = 1e-10,
    tail_average: float = 0.0,
) -> ThetaConvergenceReport:
    """Compare final theta differences against the stochastic-approximation
    limit log(omega_i/(pi_i + nu)) - log(omega_j/(pi_j + nu)) with omega from
    the quadrature oracle.

    With tail_average in (0, 1], the estimate averages the recorded theta
    snapshots over that trailing fraction of the run instead of using the
    final iterate alone, which suppresses the gain-scale noise floor.
    """
    if not 0.0 <= tail_average <= 1.0:
        raise ValueError("tail_average must be in [0, 1]")
    if masses is None:
        masses = region_masses(target, partition, bounds, tol)
    masses = np.asarray(masses, dtype=float)
    m = partition.m
    pi = record.config.pi if record.config.pi is not None else np.full(m, 1.0 / m)
    nonempty = masses > 0.0
    m0 = int(np.count_nonzero(~nonempty))
    nu = float(pi[~nonempty].sum()) / (m - m0) if m0 else 0.0
    oracle = np.log(masses[nonempty]) - np.log(pi[nonempty] + nu)
    theta_full = np.asarray(record.theta_final, dtype=float)
    if tail_average > 0.0 and record.theta_trace is not None:
        trace = np.asarray(record.theta_trace, dtype=float)
        start = min(trace.shape[0] - 1, int(np.floor(trace.shape[0] * (1.0 - tail_average))))
        theta_full = trace[start:].mean(axis=0)
    theta = theta_full[nonempty]
    dev = np.abs(
        (theta[:, None] - theta[None, :]) - (oracle[:, None] - oracle[None, :])
    )
    return ThetaConvergenceReport(
        max_pairwise_deviation=float(dev.max()) if dev.size else 0.0,
        theta=theta_full,
        oracle_log_weights=oracle,
        nonempty=nonempty,
    )


def barrier_profile(
    target: TargetDensity,
    x1: np.ndarray,
    x2: np.ndarray,
    theta=None,
    partition: Optional[EnergyPartition] = None,
    grid_n: int = 256,
):
    """Energy barrier estimates along the straight segment from x1 to x2.

    Returns (plain barrier, weight-adjusted barrier, profile) where profile
    has columns (t, U, U_adjusted). The straight path upper-bounds the true
    infimum over continuous paths.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    ts = np.linspace(0.0, 1.0, grid_n)
    us = np.array([target.potential((1 - t) * x1 + t * x2) for t in ts])
    adjusted = us.copy()
    if theta is not None:
        if isinstance(theta, ThetaWeights):
            theta = theta.theta
        theta = np.asarray(theta, dtype=float)
        if partition is None:
            raise ValueError("a partition is required with theta")
        j1 = region_index(partition, us[0])
        adjusted = us + np.array(
            [theta[region_index(partition, u) - 1] - theta[j1 - 1] for u in us]
        )
    b_h = float(us.max() - us[0])
    b_sa = float(adjusted.max() - us[0])
    profile = np.column_stack([ts, us, adjusted])
    return b_h, b_sa, profile


def min_energy(record: RunRecord) -> float:
    """Smallest potential value seen anywhere in the run."""
    if record.energies.size == 0:
        raise ValueError("empty record")
    return float(np.min(record.energies))


def posterior_risk(
    record: RunRecord,
    f0: Callable[[np.ndarray], np.ndarray],
    inputs: np.ndarray,
    predict: Callable[[np.ndarray, np.ndarray], np.ndarray],
    max_samples: int = 2000,
) -> float:
    """Monte Carlo posterior expectation of sum_i (f0(x_i) - f(x_i|z))^2 over
    the post-burn-in samples (evenly thinned to at most ``max_samples``)."""
    post = record.post_burn_in()
    stride = max(1, post.shape[0] // max_samples)
    post = post[::stride]
    inputs = np.asarray(inputs, dtype=float)
    truth = np.asarray(f0(inputs), dtype=float).ravel()
    total = 0.0
    for z in post:
        pred = np.asarray(predict(z, inputs), dtype=float).ravel()
        total += float(np.sum((truth - pred) ** 2))
    return total / post.shape[0]
