"""The adaptive sampler and its vanilla HMC baseline.

Both samplers share the leapfrog proposal; the adaptive one reweights the
acceptance ratio by the difference of the region log-weights and updates the
weights after every iteration. ``run_chain`` drives either a compiled kernel
(targets built by :mod:`sahmc.targets`) or the pure-numpy step functions.
"""

from __future__ import annotations

import time
import warnings as _warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import _kernels
from .core import (
    EnergyPartition,
    GainSchedule,
    MassMatrix,
    SamplerConfig,
    TargetDensity,
    ThetaWeights,
    gain_factor,
    region_index,
    theta_update,
)
from .integrator import DivergentTrajectory, PhasePoint, kinetic_energy, leapfrog, sample_momentum

ALGORITHMS = ("sahmc", "hmc")


@dataclass
class ChainState:
    """Current chain position with its cached potential and region index."""

    x: np.ndarray
    potential: float
    region: int
    iteration: int
    rng: np.random.Generator

    @classmethod
    def initialize(
        cls,
        x0: np.ndarray,
        target: TargetDensity,
        partition: Optional[EnergyPartition],
        rng: np.random.Generator,
    ) -> "ChainState":
        u = float(target.potential(x0))
        region = region_index(partition, u) if partition is not None else 1
        return cls(x=np.asarray(x0, dtype=float), potential=u, region=region, iteration=0, rng=rng)


@dataclass
class RunRecord:
    """Full per-iteration trace of one chain plus run metadata."""

    samples: np.ndarray  # (iterations, d)
    energies: np.ndarray
    regions: np.ndarray  # 1-based region indices
    accept_flags: np.ndarray
    visit_counts: np.ndarray
    config: SamplerConfig
    algorithm: str
    target_name: str
    wall_time: float
    theta_trace_iters: Optional[np.ndarray] = None
    theta_trace: Optional[np.ndarray] = None
    theta_final: Optional[np.ndarray] = None
    momenta_head: Optional[np.ndarray] = None
    n_divergent: int = 0
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self):
        n = self.samples.shape[0]
        if not (self.energies.size == self.regions.size == self.accept_flags.size == n):
            raise ValueError("record sequences must share one length")
        if int(self.visit_counts.sum()) != n:
            raise ValueError("visit_counts must sum to the iteration count")

    @property
    def iterations(self) -> int:
        return self.samples.shape[0]

    @property
    def burn_in(self) -> int:
        return self.config.burn_in

    def post_burn_in(self) -> np.ndarray:
        return self.samples[self.burn_in:]

    def post_burn_in_energies(self) -> np.ndarray:
        return self.energies[self.burn_in:]

    def post_burn_in_regions(self) -> np.ndarray:
        return self.regions[self.burn_in:]

    def acceptance_rate(self) -> float:
        return float(np.mean(self.accept_flags))


def sahmc_accept_ratio(
    u_t: float,
    u_star: float,
    k_t: float,
    k_star: float,
    theta: ThetaWeights,
    partition: EnergyPartition,
) -> float:
    """r = exp{theta[J(U_t)] - theta[J(U_*)]} exp{U_t + K_t - U_* - K_*},
    computed in log space; a non-finite proposal potential forces r = 0."""
    if not np.isfinite(u_star):
        return 0.0
    log_r = (
        theta.theta[region_index(partition, u_t) - 1]
        - theta.theta[region_index(partition, u_star) - 1]
        + (u_t + k_t - u_star - k_star)
    )
    with np.errstate(over="ignore"):
        return float(np.exp(log_r))


_TRIVIAL_PARTITION = EnergyPartition.single_region()


def _step(
    state: ChainState,
    theta: ThetaWeights,
    target: TargetDensity,
    partition: EnergyPartition,
    mass: MassMatrix,
    epsilon: float,
    L: int,
    gain_t: float,
):
    """Shared momentum/proposal/decision/weight-update step. With a trivial
    partition and zero gain this is exactly vanilla HMC, consuming the same
    random stream."""
    rng = state.rng
    y = sample_momentum(mass, rng)
    k_t = kinetic_energy(y, mass)
    u_t = state.potential
    try:
        proposal = leapfrog(PhasePoint(state.x, y), target, mass, epsilon, L)
        diverged = False
    except DivergentTrajectory:
        proposal = None
        diverged = True
    # the uniform is always drawn so the stream does not depend on outcome
    u_rand = rng.uniform()
    accepted = False
    if not diverged:
        u_star = float(target.potential(proposal.position))
        k_star = kinetic_energy(proposal.momentum, mass)
        r = sahmc_accept_ratio(u_t, u_star, k_t, k_star, theta, partition)
        if r > 0 and (r >= 1.0 or u_rand < r):
            accepted = True
    if accepted:
        state.x = proposal.position
        state.potential = u_star
    state.region = region_index(partition, state.potential)
    state.iteration += 1
    if gain_t > 0.0:
        theta = theta_update(theta, state.region, gain_t)
    return state, theta, accepted, diverged, y


def sahmc_step(
    state: ChainState,
    theta: ThetaWeights,
    target: TargetDensity,
    partition: EnergyPartition,
    mass: MassMatrix,
    epsilon: float,
    L: int,
    gain_t: float,
):
    """One adaptive iteration; the weight update uses the region of the
    post-decision state. Returns (state, theta, accepted)."""
    state, theta, accepted, _, _ = _step(state, theta, target, partition, mass, epsilon, L, gain_t)
    return state, theta, accepted


def hmc_step(
    state: ChainState,
    target: TargetDensity,
    mass: MassMatrix,
    epsilon: float,
    L: int,
):
    """One vanilla HMC iteration. Returns (state, accepted)."""
    theta = ThetaWeights.uniform(1)
    state, _, accepted, _, _ = _step(
        state, theta, target, _TRIVIAL_PARTITION, mass, epsilon, L, 0.0
    )
    return state, accepted


def _validate(config: SamplerConfig, target: TargetDensity, algorithm: str) -> None:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if algorithm == "sahmc":
        if config.partition is None:
            raise ValueError("sahmc requires an energy partition")
        if config.gain is None and config.adapt_theta:
            raise ValueError("sahmc requires a gain schedule unless theta is frozen")
    config.resolve_mass(target.dim)


def _kernel_inputs(config: SamplerConfig, target: TargetDensity, algorithm: str):
    mass = config.resolve_mass(target.dim)
    mass_diag = mass.diag_vector()
    if algorithm == "sahmc":
        partition = config.partition
        m = partition.m
        thresholds = partition.thresholds
        pi = config.pi if config.pi is not None else np.full(m, 1.0 / m)
        theta0 = config.initial_theta if config.initial_theta is not None else np.zeros(m)
        adapt = config.adapt_theta
        gain_t0 = config.gain.t0 if config.gain is not None else 1.0
    else:
        thresholds = np.empty(0)
        pi = np.ones(1)
        theta0 = np.zeros(1)
        adapt = False
        gain_t0 = 1.0
    theta0 = np.asarray(theta0, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if pi.size != thresholds.size + 1 or theta0.size != pi.size:
        raise ValueError("pi / initial_theta sized inconsistently with the partition")
    lo, hi = config.theta_bounds
    return mass_diag, thresholds, pi, theta0, adapt, float(gain_t0), float(lo), float(hi)


def run_chain(
    config: SamplerConfig,
    target: TargetDensity,
    algorithm: str = "sahmc",
    engine: str = "auto",
) -> RunRecord:
    """Run one chain for ``config.iterations`` iterations.

    Burn-in samples are recorded and flagged by the config, never deleted;
    theta keeps adapting for the whole run unless ``adapt_theta`` is False.
    """
    _validate(config, target, algorithm)
    mass_diag, thresholds, pi, theta0, adapt, gain_t0, lo, hi = _kernel_inputs(
        config, target, algorithm
    )
    if engine == "auto":
        engine = "numba" if (target.jit_spec is not None and mass_diag is not None) else "numpy"
    if engine == "numba" and (target.jit_spec is None or mass_diag is None):
        raise ValueError("numba engine needs a compiled target and a diagonal mass")

    rng = np.random.default_rng(config.seed)
    x0 = config.resolve_initial_position(target.dim, rng)
    snap_every = config.theta_snapshot_every or max(1, config.iterations // 1000)

    start = time.perf_counter()
    if engine == "numba":
        pot, grad, pars = target.jit_spec
        (
            samples,
            energies,
            regions,
            accepts,
            visits,
            theta_final,
            snap_iters,
            snap_theta,
            momenta,
            n_div,
        ) = _kernels.chain_kernel(
            pot,
            grad,
            pars,
            x0,
            np.asarray(mass_diag, dtype=float),
            float(config.epsilon),
            int(config.leapfrog_steps),
            int(config.iterations),
            int(config.seed),
            np.asarray(thresholds, dtype=float),
            theta0,
            pi,
            gain_t0,
            adapt,
            lo,
            hi,
            int(snap_every),
            int(config.momenta_head),
        )
    elif engine == "numpy":
        (
            samples,
            energies,
            regions,
            accepts,
            visits,
            theta_final,
            snap_iters,
            snap_theta,
            momenta,
            n_div,
        ) = _run_numpy(
            config, target, algorithm, x0, rng, thresholds, pi, theta0, adapt, gain_t0, snap_every
        )
    else:
        raise ValueError(f"unknown engine {engine!r}")
    wall = time.perf_counter() - start

    return RunRecord(
        samples=samples,
        energies=energies,
        regions=regions,
        accept_flags=accepts,
        visit_counts=visits,
        config=config,
        algorithm=algorithm,
        target_name=target.name,
        wall_time=wall,
        theta_trace_iters=snap_iters,
        theta_trace=snap_theta,
        theta_final=theta_final,
        momenta_head=momenta,
        n_divergent=int(n_div),
    )


def _run_numpy(config, target, algorithm, x0, rng, thresholds, pi, theta0, adapt, gain_t0, snap_every):
    n = config.iterations
    d = target.dim
    mass = config.resolve_mass(d)
    partition = config.partition if algorithm == "sahmc" else _TRIVIAL_PARTITION
    gain = config.gain if (algorithm == "sahmc" and adapt) else None
    theta = ThetaWeights(theta=theta0.copy(), pi=pi, bounds=config.theta_bounds)
    state = ChainState.initialize(x0, target, partition, rng)

    samples = np.empty((n, d))
    energies = np.empty(n)
    regions = np.empty(n, dtype=np.int64)
    accepts = np.zeros(n, dtype=bool)
    visits = np.zeros(theta.m, dtype=np.int64)
    n_head = min(config.momenta_head, n)
    momenta = np.empty((n_head, d))
    snap_iters = [0]
    snap_theta = [theta.theta.copy()]
    n_div = 0

    for t in range(n):
        gain_t = gain_factor(gain, t + 1) if gain is not None else 0.0
        state, theta, accepted, diverged, y = _step(
            state, theta, target, partition, mass, config.epsilon, config.leapfrog_steps, gain_t
        )
        if t < n_head:
            momenta[t] = y
        n_div += int(diverged)
        samples[t] = state.x
        energies[t] = state.potential
        regions[t] = state.region
        accepts[t] = accepted
        visits[state.region - 1] += 1
        if (t + 1) % snap_every == 0:
            snap_iters.append(t + 1)
            snap_theta.append(theta.theta.copy())
    if snap_iters[-1] != n:
        snap_iters.append(n)
        snap_theta.append(theta.theta.copy())
    return (
        samples,
        energies,
        regions,
        accepts,
        visits,
        theta.theta,
        np.asarray(snap_iters, dtype=np.int64),
        np.asarray(snap_theta),
        momenta,
        n_div,
    )


def run_parallel(
    configs,
    target: TargetDensity,
    algorithm: str = "sahmc",
    engine: str = "auto",
    max_workers: int = 1,
) -> List[RunRecord]:
    """Run independent chains, one per config. Chains never share weights, so
    the results equal sequential ``run_chain`` outputs chain by chain."""
    configs = list(configs)
    if not configs:
        return []
    seeds = [c.seed for c in configs]
    dup_warning = None
    if len(set(seeds)) != len(seeds):
        dup_warning = f"duplicate seeds across chains: {sorted(seeds)}"
        _warnings.warn(dup_warning)
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            records = list(
                pool.map(lambda c: run_chain(c, target, algorithm, engine), configs)
            )
    else:
        records = [run_chain(c, target, algorithm, engine) for c in configs]
    if dup_warning:
        for r in records:
            r.warnings.append(dup_warning)
    return records
