"""Shared domain types: target densities, energy partitions, gain schedules,
adaptive weights, and sampler configuration."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np


class ThetaRangeError(ValueError):
    """No constant shift can bring the updated weights back inside their box."""


@dataclass(frozen=True)
class TargetDensity:
    """A potential/gradient pair defining the density to sample.

    ``potential(x)`` returns ``U(x) = -log psi(x)`` and ``gradient(x)`` its
    gradient, both on the natural-log scale. Targets built by
    :mod:`sahmc.targets` additionally carry compiled callables used by the
    fast chain kernel; user-supplied targets without them fall back to the
    pure-numpy engine.
    """

    dim: int
    potential: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    name: str = "target"
    # compiled (potential, gradient, parameter-vector) triple for the numba
    # kernel; None for hand-built targets
    jit_spec: Optional[tuple] = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")

    def check_gradient(self, x: np.ndarray, rel_tol: float = 1e-5) -> float:
        """Max relative error of ``gradient`` vs central finite differences."""
        x = np.asarray(x, dtype=float)
        g = np.asarray(self.gradient(x), dtype=float)
        if g.shape != (self.dim,):
            raise ValueError(f"gradient returned shape {g.shape}, expected ({self.dim},)")
        fd = np.empty(self.dim)
        for i in range(self.dim):
            h = 1e-6 * (1.0 + abs(x[i]))
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            fd[i] = (self.potential(xp) - self.potential(xm)) / (2.0 * h)
        scale = np.maximum(np.abs(fd), 1.0)
        return float(np.max(np.abs(g - fd) / scale))


@dataclass(frozen=True)
class MassMatrix:
    """Mass matrix of the momentum distribution N(0, M).

    ``kind`` is one of ``identity``, ``diagonal`` or ``dense``. Only the
    diagonal of M is needed by the fast kernel; dense masses are supported by
    the numpy engine.
    """

    kind: str
    dim: int
    diag: Optional[np.ndarray] = None
    dense: Optional[np.ndarray] = None

    @classmethod
    def identity(cls, dim: int) -> "MassMatrix":
        return cls(kind="identity", dim=dim)

    @classmethod
    def diagonal(cls, diag: Sequence[float]) -> "MassMatrix":
        d = np.asarray(diag, dtype=float)
        if d.ndim != 1 or np.any(d <= 0):
            raise ValueError("diagonal mass entries must be strictly positive")
        return cls(kind="diagonal", dim=d.size, diag=d)

    @classmethod
    def full(cls, matrix: np.ndarray) -> "MassMatrix":
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("dense mass must be square")
        if not np.allclose(m, m.T):
            raise ValueError("dense mass must be symmetric")
        np.linalg.cholesky(m)  # raises if not positive definite
        return cls(kind="dense", dim=m.shape[0], dense=m)

    def diag_vector(self) -> Optional[np.ndarray]:
        """Diagonal representation, or None for a genuinely dense mass."""
        if self.kind == "identity":
            return np.ones(self.dim)
        if self.kind == "diagonal":
            return self.diag
        return None

    def logdet(self) -> float:
        if self.kind == "identity":
            return 0.0
        if self.kind == "diagonal":
            return float(np.sum(np.log(self.diag)))
        sign, ld = np.linalg.slogdet(self.dense)
        return float(ld)

    def inv_mul(self, y: np.ndarray) -> np.ndarray:
        """Velocity M^{-1} y."""
        if self.kind == "identity":
            return y
        if self.kind == "diagonal":
            return y / self.diag
        return np.linalg.solve(self.dense, y)

    def inv_quad(self, y: np.ndarray) -> float:
        """Quadratic form y' M^{-1} y."""
        return float(y @ self.inv_mul(y))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw y ~ N(0, M)."""
        z = rng.standard_normal(self.dim)
        if self.kind == "identity":
            return z
        if self.kind == "diagonal":
            return np.sqrt(self.diag) * z
        return np.linalg.cholesky(self.dense) @ z


@dataclass(frozen=True)
class EnergyPartition:
    """Energy-space partition E_1..E_m with right-closed subregions.

    Thresholds (u_1, ..., u_{m-1}) are strictly increasing; region i is
    {u_{i-1} < U <= u_i} with u_0 = -inf, u_m = +inf.
    """

    thresholds: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.thresholds, dtype=float)
        if t.ndim != 1 or t.size < 1:
            raise ValueError("thresholds must be a non-empty 1-D vector")
        if not np.all(np.diff(t) > 0):
            raise ValueError("thresholds not increasing")
        object.__setattr__(self, "thresholds", t)

    @classmethod
    def regular(cls, u1: float, delta_u: float, m: int) -> "EnergyPartition":
        """m regions with equal bandwidth: thresholds u1, u1+delta, ..."""
        if m < 2:
            raise ValueError("regular partition needs m >= 2")
        return cls(thresholds=u1 + delta_u * np.arange(m - 1))

    @classmethod
    def single_region(cls) -> "EnergyPartition":
        """Trivial one-region partition (reduces SAHMC to HMC)."""
        p = object.__new__(cls)
        object.__setattr__(p, "thresholds", np.empty(0))
        return p

    @property
    def m(self) -> int:
        return self.thresholds.size + 1

    def index(self, energy: float) -> int:
        return region_index(self, energy)


def region_index(partition: EnergyPartition, energy: float) -> int:
    """Subregion index J(U) in 1..m; the boundary u_i belongs to region i."""
    if not np.isfinite(energy):
        raise ValueError("non-finite potential")
    return int(np.searchsorted(partition.thresholds, energy, side="left")) + 1


@dataclass(frozen=True)
class GainSchedule:
    """Gain sequence a_t = t0 / max(t0, t) of the weight update."""

    t0: float = 5000.0
    zeta_check_horizon: int = 100_000  # only used by the divergence tests

    def __post_init__(self):
        if self.t0 <= 1:
            raise ValueError("t0 must exceed 1")

    def factor(self, t: int) -> float:
        return gain_factor(self, t)


def gain_factor(gain: GainSchedule, t: int) -> float:
    """a_t = t0 / max(t0, t) for t >= 1."""
    if t < 1:
        raise ValueError("t must be a positive integer")
    return gain.t0 / max(gain.t0, float(t))


DEFAULT_THETA_BOUND = 1e8


@dataclass(frozen=True)
class ThetaWeights:
    """Adaptive log-weights theta (estimates of log(omega_i/pi_i)) together
    with the desired sampling frequencies pi and the box Theta = [lo, hi]^m.

    Only pairwise differences of theta enter the acceptance ratio, so the box
    projection is a constant shift and never changes the sampled law.
    """

    theta: np.ndarray
    pi: np.ndarray
    bounds: tuple = (-DEFAULT_THETA_BOUND, DEFAULT_THETA_BOUND)

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        pi = np.asarray(self.pi, dtype=float)
        if th.shape != pi.shape or th.ndim != 1:
            raise ValueError("theta and pi must be 1-D vectors of equal length")
        if np.any(pi <= 0) or abs(pi.sum() - 1.0) > 1e-9:
            raise ValueError("pi must be strictly positive and sum to 1")
        lo, hi = self.bounds
        if not lo < hi:
            raise ValueError("theta bounds must satisfy lo < hi")
        if np.any(th < lo) or np.any(th > hi):
            raise ValueError("initial theta outside its bounds")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "pi", pi)

    @classmethod
    def uniform(cls, m: int, bounds: tuple = (-DEFAULT_THETA_BOUND, DEFAULT_THETA_BOUND)) -> "ThetaWeights":
        """Zero weights with the uniform desired distribution."""
        return cls(theta=np.zeros(m), pi=np.full(m, 1.0 / m), bounds=bounds)

    @property
    def m(self) -> int:
        return self.theta.size


def theta_update(weights: ThetaWeights, visited_region: int, a: float) -> ThetaWeights:
    """One stochastic-approximation step theta* = theta + a (e - pi), with a
    constant-shift projection back into the box when needed.

    ``visited_region`` is 1-based. The shift preserves every pairwise
    difference theta_i - theta_j.
    """
    if not 1 <= visited_region <= weights.m:
        raise ValueError("visited_region out of range")
    star = weights.theta - a * weights.pi
    star[visited_region - 1] += a
    lo, hi = weights.bounds
    shift = _projection_shift(star, lo, hi)
    if shift != 0.0:
        star = star + shift
    return replace(weights, theta=star)


def _projection_shift(theta: np.ndarray, lo: float, hi: float) -> float:
    """Smallest-magnitude constant c with theta + c inside [lo, hi]^m."""
    mn = float(np.min(theta))
    mx = float(np.max(theta))
    c = 0.0
    if mx > hi:
        c = hi - mx
    elif mn < lo:
        c = lo - mn
    if mn + c < lo or mx + c > hi:
        raise ThetaRangeError("theta range overflow")
    return c


@dataclass(frozen=True)
class SamplerConfig:
    """Everything needed to run one chain."""

    epsilon: float
    leapfrog_steps: int
    iterations: int
    mass: Optional[MassMatrix] = None  # defaults to identity of the target dim
    partition: Optional[EnergyPartition] = None  # SAHMC only
    gain: Optional[GainSchedule] = None  # SAHMC only
    burn_in: int = 0
    seed: int = 0
    initial_position: Union[str, np.ndarray] = "random"
    adapt_theta: bool = True  # freeze flag: False keeps theta fixed all run
    initial_theta: Optional[np.ndarray] = None
    pi: Optional[np.ndarray] = None
    theta_bounds: tuple = (-DEFAULT_THETA_BOUND, DEFAULT_THETA_BOUND)
    theta_snapshot_every: int = 0  # 0 -> auto (~1000 snapshots per run)
    momenta_head: int = 1000  # momenta recorded for the first iterations only

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.leapfrog_steps < 1:
            raise ValueError("leapfrog_steps must be at least 1")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")

    def resolve_mass(self, dim: int) -> MassMatrix:
        if self.mass is None:
            return MassMatrix.identity(dim)
        if self.mass.dim != dim:
            raise ValueError("mass dimension does not match target")
        return self.mass

    def resolve_initial_position(self, dim: int, rng: np.random.Generator) -> np.ndarray:
        if isinstance(self.initial_position, str):
            if self.initial_position != "random":
                raise ValueError(f"unknown initial_position spec {self.initial_position!r}")
            return rng.uniform(-1.0, 1.0, size=dim)
        x0 = np.asarray(self.initial_position, dtype=float)
        if x0.shape != (dim,):
            raise ValueError("initial_position has wrong dimension")
        return x0
