"""Leapfrog integration of Hamiltonian dynamics.

The integrator is the proposal mechanism shared by both samplers: a half
momentum step, full position/momentum alternations, a final half momentum
step, and momentum negation at the end of the trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MassMatrix, TargetDensity

LOG_2PI = float(np.log(2.0 * np.pi))

# any coordinate beyond this magnitude aborts the trajectory
DIVERGENCE_LIMIT = 1e100


class DivergentTrajectory(RuntimeError):
    """Raised when the trajectory leaves the representable range."""

    def __init__(self, step: int):
        super().__init__(f"divergent trajectory at leapfrog step {step}")
        self.step = step


@dataclass(frozen=True)
class PhasePoint:
    """Position/momentum pair."""

    position: np.ndarray
    momentum: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.position, dtype=float)
        y = np.asarray(self.momentum, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("position and momentum must be 1-D vectors of equal length")
        object.__setattr__(self, "position", x)
        object.__setattr__(self, "momentum", y)


def kinetic_energy(y: np.ndarray, mass: MassMatrix) -> float:
    """K(y) = (d/2) log 2pi + (1/2) log|M| + (1/2) y' M^{-1} y."""
    y = np.asarray(y, dtype=float)
    if y.shape != (mass.dim,):
        raise ValueError(f"momentum has shape {y.shape}, mass expects ({mass.dim},)")
    return 0.5 * mass.dim * LOG_2PI + 0.5 * mass.logdet() + 0.5 * mass.inv_quad(y)


def sample_momentum(mass: MassMatrix, rng: np.random.Generator) -> np.ndarray:
    """Draw a fresh momentum y ~ N(0, M)."""
    return mass.sample(rng)


def hamiltonian(point: PhasePoint, target: TargetDensity, mass: MassMatrix) -> float:
    """Total energy H(x, y) = U(x) + K(y)."""
    return float(target.potential(point.position)) + kinetic_energy(point.momentum, mass)


def _check_finite(x: np.ndarray, step: int) -> None:
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) > DIVERGENCE_LIMIT):
        raise DivergentTrajectory(step)


def leapfrog(
    start: PhasePoint,
    target: TargetDensity,
    mass: MassMatrix,
    epsilon: float,
    L: int,
) -> PhasePoint:
    """Integrate L leapfrog steps and return the end point with negated momentum.

    Scheme: half momentum step, then L alternations of a full position step
    x <- x + eps * M^{-1} y and a momentum step (full except the last, which
    is a half step). Costs L + 1 gradient evaluations. The returned momentum
    is -y_L, making the proposal map an involution.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if L < 1:
        raise ValueError("L must be at least 1")
    x = start.position.copy()
    y = start.momentum.copy()
    if x.size != target.dim:
        raise ValueError("start dimension does not match target")

    y -= 0.5 * epsilon * np.asarray(target.gradient(x), dtype=float)
    for i in range(1, L + 1):
        x += epsilon * mass.inv_mul(y)
        _check_finite(x, i)
        g = np.asarray(target.gradient(x), dtype=float)
        if i < L:
            y -= epsilon * g
        else:
            y -= 0.5 * epsilon * g
        _check_finite(y, i)
    return PhasePoint(position=x, momentum=-y)
