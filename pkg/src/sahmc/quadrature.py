"""Quadrature oracle for region masses, independent of the sampler code.

Computes omega_i = integral of psi(x) = exp(-U(x)) over each energy subregion
by splitting integration paths at the threshold crossings of U (so every
piece is smooth) and applying adaptive Gauss-Kronrod G7/K15 rules, nested
outer-over-inner for 2-D targets. Potentials are evaluated in batches via the
compiled grid evaluator when the target carries one.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .core import EnergyPartition, TargetDensity


class QuadratureError(RuntimeError):
    """Requested tolerance was not reached."""

    def __init__(self, achieved: float, requested: float):
        super().__init__(
            f"quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}"
        )
        self.achieved = achieved
        self.requested = requested


# Kronrod-15 nodes on [0, 1] (ascending) with the embedded Gauss-7 weights
_XK = np.array(
    [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
        0.0,
    ]
)
_WK = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
    ]
)
_WG = np.array(
    [0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469]
)

NODES_15 = np.concatenate([-_XK[:-1], _XK[::-1]])  # ascending on [-1, 1]
WEIGHTS_K15 = np.concatenate([_WK[:-1], _WK[::-1]])
GAUSS_IDX = np.arange(1, 14, 2)
WEIGHTS_G7 = np.concatenate([_WG[:-1], _WG[::-1]])


def line_potential_evaluator(target: TargetDensity, embed):
    """Batch evaluator t_array -> U(embed(t_array)) along a 1-D path.

    ``embed`` maps an (n,) array of path parameters to (n, dim) points.
    """
    if target.jit_spec is not None:
        pot, _, pars = target.jit_spec

        def evaluate(ts):
            pts = np.ascontiguousarray(embed(np.asarray(ts, dtype=float)))
            return _kernels.potential_on_grid(pot, pars, pts)

    else:

        def evaluate(ts):
            pts = embed(np.asarray(ts, dtype=float))
            return np.array([target.potential(p) for p in pts])

    return evaluate


def _axis_embed(fixed, axis, dim):
    """Embed a scalar parameter as coordinate ``axis`` with the others fixed."""

    def embed(ts):
        pts = np.tile(np.asarray(fixed, dtype=float), (ts.size, 1))
        pts[:, axis] = ts
        return pts

    return embed


def adaptive_quad_batch(f_batch, a, b, tol=1e-12, max_panels=512):
    """Adaptive G7/K15 for a scalar integrand given as a batch evaluator."""
    def panel(pa, pb):
        c, h = 0.5 * (pa + pb), 0.5 * (pb - pa)
        vals = f_batch(c + h * NODES_15)
        ik = h * float(WEIGHTS_K15 @ vals)
        ig = h * float(WEIGHTS_G7 @ vals[GAUSS_IDX])
        return abs(ik - ig), pa, pb, ik

    panels = [panel(a, b)]
    while True:
        err = sum(p[0] for p in panels)
        if err <= tol:
            break
        if len(panels) >= max_panels:
            break  # caller accumulates the achieved error
        panels.sort(key=lambda p: p[0])
        e, pa, pb, _ = panels.pop()
        mid = 0.5 * (pa + pb)
        panels.append(panel(pa, mid))
        panels.append(panel(mid, pb))
    return sum(p[3] for p in panels), sum(p[0] for p in panels)


def adaptive_vector_quad(f, a, b, tol=1e-10, max_panels=4000):
    """Adaptive G7/K15 integration of a vector-valued integrand over [a, b]."""

    def panel(pa, pb):
        c, h = 0.5 * (pa + pb), 0.5 * (pb - pa)
        vals = np.array([f(c + h * t) for t in NODES_15])
        ik = h * np.tensordot(WEIGHTS_K15, vals, axes=1)
        ig = h * np.tensordot(WEIGHTS_G7, vals[GAUSS_IDX], axes=1)
        return float(np.max(np.abs(ik - ig))), pa, pb, ik

    panels = [panel(a, b)]
    while True:
        err = sum(p[0] for p in panels)
        if err <= tol:
            break
        if len(panels) >= max_panels:
            raise QuadratureError(err, tol)
        panels.sort(key=lambda p: p[0])
        _, pa, pb, _ = panels.pop()
        mid = 0.5 * (pa + pb)
        panels.append(panel(pa, mid))
        panels.append(panel(mid, pb))
    return sum(p[3] for p in panels), sum(p[0] for p in panels)


def _crossings(evaluate, lo, hi, thresholds, n_scan=1024, refine=60):
    """Threshold crossings of the path potential on [lo, hi]."""
    grid = np.linspace(lo, hi, n_scan)
    vals = evaluate(grid)
    lows, highs, marks = [], [], []
    for u in thresholds:
        s = np.sign(vals - u)
        idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
        lows.extend(grid[idx])
        highs.extend(grid[idx + 1])
        marks.extend([u] * idx.size)
    if not lows:
        return np.empty(0)
    a = np.asarray(lows)
    b = np.asarray(highs)
    u = np.asarray(marks)
    fa = evaluate(a) - u
    for _ in range(refine):
        mid = 0.5 * (a + b)
        fm = evaluate(mid) - u
        left = fa * fm <= 0
        b = np.where(left, mid, b)
        a = np.where(left, a, mid)
        fa = np.where(left, fa, fm)
    return np.sort(0.5 * (a + b))


def _masses_along_line(evaluate, lo, hi, partition: EnergyPartition, piece_tol):
    """Integrate exp(-U) along the path, binned by region index."""
    cuts = _crossings(evaluate, lo, hi, partition.thresholds)
    edges = np.concatenate([[lo], cuts, [hi]])
    masses = np.zeros(partition.m)
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 1e-300:
            continue
        region = partition.index(float(evaluate(np.array([0.5 * (a + b)]))[0]))
        val, e = adaptive_quad_batch(lambda ts: np.exp(-evaluate(ts)), a, b, tol=piece_tol)
        masses[region - 1] += val
        err += e
    return masses, err


def region_masses_1d(
    target: TargetDensity, partition: EnergyPartition, bounds, tol: float = 1e-10
):
    lo, hi = bounds
    evaluate = line_potential_evaluator(target, lambda ts: ts.reshape(-1, 1))
    masses, err = _masses_along_line(evaluate, lo, hi, partition, tol / 10.0)
    if err > max(tol, 1e-12):
        raise QuadratureError(err, tol)
    return masses


def region_masses_2d(
    target: TargetDensity,
    partition: EnergyPartition,
    bounds,
    tol: float = 1e-10,
    inner_tol: float = 1e-13,
):
    (x_lo, x_hi), (y_lo, y_hi) = bounds

    def inner(x1):
        evaluate = line_potential_evaluator(target, _axis_embed([x1, 0.0], 1, 2))
        m, _ = _masses_along_line(evaluate, y_lo, y_hi, partition, inner_tol)
        return m

    masses, _ = adaptive_vector_quad(inner, x_lo, x_hi, tol=tol)
    return masses


def region_masses(
    target: TargetDensity, partition: EnergyPartition, bounds, tol: float = 1e-10
):
    """Region masses omega_i = int_{E_i} exp(-U) dx for 1-D or 2-D targets."""
    if target.dim == 1:
        if np.ndim(bounds[0]) > 0:
            bounds = bounds[0]
        return region_masses_1d(target, partition, bounds, tol)
    if target.dim == 2:
        return region_masses_2d(target, partition, bounds, tol)
    raise ValueError("quadrature oracle supports dimension 1 or 2 only")


def occupancy_from_masses(masses: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Region occupancy of the reweighted density psi(x) exp(-theta_{J(U)})."""
    w = masses * np.exp(-np.asarray(theta, dtype=float))
    return w / w.sum()
