"""End-to-end acceptance checks for the sampler library.

Each test exercises one release criterion on a fixed-seed workload and prints
a single CRITERION line summarizing the measured values, then asserts them.
Heavy runs shared by several criteria (the trimodal benchmark and the
eight-mode mixture) live in module fixtures so they execute once.
"""

import json
import time

import numpy as np
import pytest

from sahmc.core import (
    EnergyPartition,
    GainSchedule,
    MassMatrix,
    SamplerConfig,
    ThetaWeights,
)
from sahmc.diagnostics import (
    barrier_profile,
    ess,
    frequency_error,
    mode_assignment,
    theta_convergence_check,
)
from sahmc.harness import parse_config, run_experiment
from sahmc.integrator import PhasePoint, hamiltonian, leapfrog
from sahmc.quadrature import occupancy_from_masses, region_masses
from sahmc.samplers import run_chain
from sahmc.targets import (
    bimodal_1d,
    harmonic_oscillator,
    mixture_8,
    mixture_8_modes,
    standard_normal,
    trimodal_2d,
)


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} ({detail})")


def _replace(cfg: SamplerConfig, **kw) -> SamplerConfig:
    return SamplerConfig(**{**cfg.__dict__, **kw})


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    """Trigger compilation of every chain kernel family before timed runs."""
    part = EnergyPartition.regular(0.0, 2.0, 4)
    gain = GainSchedule(t0=100.0)
    small = dict(epsilon=0.1, leapfrog_steps=2, iterations=200, seed=1)
    run_chain(SamplerConfig(partition=part, gain=gain, **small), standard_normal(2), "sahmc")
    run_chain(SamplerConfig(**small), standard_normal(2), "hmc")
    sensor_cfg = parse_config("configs/sensor.json")
    run_chain(
        _replace(sensor_cfg.sampler_config("sahmc", "smoke", 0), iterations=200, burn_in=50),
        sensor_cfg.build_target(),
        "sahmc",
    )
    mlp_cfg = parse_config("configs/mlp_sim.json")
    run_chain(
        _replace(mlp_cfg.sampler_config("sahmc", "smoke", 0), iterations=50, burn_in=10),
        mlp_cfg.build_target(),
        "sahmc",
    )


# ---------------------------------------------------------------------------
# Shared heavy runs


@pytest.fixture(scope="module")
def trimodal_runs():
    """Ten-chain benchmark on the widely separated trimodal target.

    The adaptive sampler runs in two stages per chain: a weight-adaptation
    stage followed by a frozen-weight sampling stage of the same total length
    as the plain-HMC baseline (2 * 10^5 iterations per chain).
    """
    target = trimodal_2d(-8.0, 6.0)
    part = EnergyPartition.regular(0.0, 2.0, 12)
    base = dict(epsilon=0.3, leapfrog_steps=20)
    start = time.time()
    sahmc_records = []
    hmc_records = []
    for i in range(10):
        stage1 = SamplerConfig(
            iterations=40000,
            burn_in=0,
            seed=101 + i,
            partition=part,
            gain=GainSchedule(t0=5000.0),
            **base,
        )
        r1 = run_chain(stage1, target, "sahmc")
        stage2 = SamplerConfig(
            iterations=160000,
            burn_in=0,
            seed=5101 + i,
            partition=part,
            gain=GainSchedule(t0=5000.0),
            adapt_theta=False,
            initial_theta=r1.theta_final,
            initial_position=r1.samples[-1],
            **base,
        )
        sahmc_records.append(run_chain(stage2, target, "sahmc"))
        hmc = SamplerConfig(iterations=200000, burn_in=40000, seed=101 + i, **base)
        hmc_records.append(run_chain(hmc, target, "hmc"))
    elapsed = time.time() - start
    modes = np.array([[-8.0, -8.0], [6.0, 6.0], [0.0, 0.0]])
    return {
        "sahmc": sahmc_records,
        "hmc": hmc_records,
        "modes": modes,
        "elapsed": elapsed,
    }


@pytest.fixture(scope="module")
def mixture8_runs():
    """Ten chains per algorithm on the eight-mode mixture in dimension 7."""
    target = mixture_8(7)
    part = EnergyPartition.regular(8.0, 2.0, 14)
    start = time.time()
    out = {"sahmc": [], "hmc": []}
    for i in range(10):
        shared = dict(
            epsilon=0.25, leapfrog_steps=3, iterations=200000, burn_in=40000, seed=301 + i
        )
        out["sahmc"].append(
            run_chain(
                SamplerConfig(partition=part, gain=GainSchedule(t0=5000.0), **shared),
                target,
                "sahmc",
            )
        )
        out["hmc"].append(run_chain(SamplerConfig(**shared), target, "hmc"))
    out["elapsed"] = time.time() - start
    return out


def _mode_stats(records, modes):
    """Per-chain assignments, minimum mode frequency, and discovered counts."""
    assigns, min_freqs, n_dis = [], [], []
    for r in records:
        a = mode_assignment(r.post_burn_in(), modes)
        freq = np.bincount(a, minlength=modes.shape[0]) / a.size
        assigns.append(a)
        min_freqs.append(freq.min())
        n_dis.append(np.unique(a).size)
    return assigns, np.array(min_freqs), np.array(n_dis)


def _cluster_sizes(points: np.ndarray, radius: float = 0.1):
    """Sizes of connected components under fixed-radius single linkage."""
    n = points.shape[0]
    d2 = ((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=-1)
    adjacent = d2 <= radius * radius
    seen = np.zeros(n, dtype=bool)
    sizes = []
    for i in range(n):
        if seen[i]:
            continue
        stack = [i]
        seen[i] = True
        size = 0
        while stack:
            j = stack.pop()
            size += 1
            neighbors = np.where(adjacent[j] & ~seen)[0]
            seen[neighbors] = True
            stack.extend(neighbors.tolist())
        sizes.append(size)
    return sorted(sizes, reverse=True)


# ---------------------------------------------------------------------------
# Criteria


def test_criterion_1_reduction_equivalence():
    target = standard_normal(2)
    shared = dict(epsilon=0.4, leapfrog_steps=8, iterations=10000, burn_in=0, seed=42)
    start = time.time()
    adaptive = run_chain(
        SamplerConfig(
            partition=EnergyPartition.single_region(),
            gain=GainSchedule(t0=1000.0),
            **shared,
        ),
        target,
        "sahmc",
    )
    plain = run_chain(SamplerConfig(**shared), target, "hmc")
    elapsed = time.time() - start
    identical = (
        np.array_equal(adaptive.samples, plain.samples)
        and np.array_equal(adaptive.energies, plain.energies)
        and np.array_equal(adaptive.accept_flags, plain.accept_flags)
    )
    ok = identical and elapsed < 1.0
    _report(1, ok, f"bit-identical={identical}, {elapsed:.2f}s < 1s")
    assert ok


def test_criterion_2_integrator_suite():
    start = time.time()
    mass2 = MassMatrix.identity(2)
    target2 = trimodal_2d(-6.0, 4.0)
    rng = np.random.default_rng(2)
    rev_err = 0.0
    for _ in range(20):
        p0 = PhasePoint(rng.normal(size=2), rng.normal(size=2))
        back = leapfrog(leapfrog(p0, target2, mass2, 0.15, 25), target2, mass2, 0.15, 25)
        rev_err = max(
            rev_err,
            float(np.max(np.abs(back.position - p0.position))),
            float(np.max(np.abs(back.momentum - p0.momentum))),
        )

    z0 = np.array([0.4, -0.3, 0.8, 0.1])

    def flow(z):
        out = leapfrog(PhasePoint(z[:2].copy(), z[2:].copy()), target2, mass2, 0.1, 10)
        return np.concatenate([out.position, out.momentum])

    h = 1e-6
    jac = np.empty((4, 4))
    for j in range(4):
        zp, zm = z0.copy(), z0.copy()
        zp[j] += h
        zm[j] -= h
        jac[:, j] = (flow(zp) - flow(zm)) / (2 * h)
    vol_err = abs(abs(np.linalg.det(jac)) - 1.0)

    target1 = harmonic_oscillator(1)
    mass1 = MassMatrix.identity(1)
    p0 = PhasePoint(np.array([1.3]), np.array([0.4]))
    h0 = hamiltonian(p0, target1, mass1)

    def dh(eps, L):
        return abs(hamiltonian(leapfrog(p0, target1, mass1, eps, L), target1, mass1) - h0)

    ratio = dh(0.2, 16) / dh(0.1, 32)
    elapsed = time.time() - start
    ok = rev_err <= 1e-10 and vol_err < 1e-6 and 3.5 <= ratio <= 4.5 and elapsed < 5.0
    _report(
        2,
        ok,
        f"reversibility {rev_err:.1e}, |det J - 1| {vol_err:.1e}, "
        f"dH ratio {ratio:.2f}, {elapsed:.1f}s < 5s",
    )
    assert ok


def test_criterion_3_theta_convergence():
    target = bimodal_1d(3.0, 1.0)
    part = EnergyPartition(thresholds=np.array([2.0, 3.0]))
    start = time.time()
    masses = region_masses(target, part, bounds=(-10.0, 10.0), tol=1e-10)
    cfg = SamplerConfig(
        epsilon=0.5,
        leapfrog_steps=10,
        iterations=1000000,
        burn_in=100000,
        seed=11,
        partition=part,
        gain=GainSchedule(t0=1000.0),
    )
    record = run_chain(cfg, target, "sahmc")
    report = theta_convergence_check(
        record, target, part, (-10.0, 10.0), masses=masses, tail_average=0.5
    )
    elapsed = time.time() - start
    dev = report.max_pairwise_deviation
    ok = dev < 0.1 and elapsed < 120.0
    _report(3, ok, f"max pairwise deviation {dev:.4f} < 0.1, {elapsed:.1f}s < 120s")
    assert ok


def test_criterion_4_trimodal_mode_coverage(trimodal_runs):
    start = time.time()
    modes = trimodal_runs["modes"]
    _, sahmc_min, _ = _mode_stats(trimodal_runs["sahmc"], modes)
    _, hmc_min, _ = _mode_stats(trimodal_runs["hmc"], modes)
    elapsed = trimodal_runs["elapsed"] + time.time() - start
    sahmc_cover = int(np.sum(sahmc_min >= 0.01))
    hmc_miss = int(np.sum(hmc_min < 0.01))
    ok = sahmc_cover == 10 and hmc_miss >= 8 and elapsed < 300.0
    _report(
        4,
        ok,
        f"SAHMC chains covering all modes {sahmc_cover}/10, "
        f"HMC chains missing a mode {hmc_miss}/10 >= 8, {elapsed:.0f}s < 300s",
    )
    assert ok


def test_criterion_5_ess_advantage(trimodal_runs):
    start = time.time()

    def min_ess(records):
        vals = []
        for r in records:
            post = r.post_burn_in()
            vals.append(min(ess(post[:, i]) for i in range(post.shape[1])))
        return np.array(vals)

    sahmc_vals = min_ess(trimodal_runs["sahmc"])
    hmc_vals = min_ess(trimodal_runs["hmc"])
    ratio = float(np.median(sahmc_vals) / np.median(hmc_vals))
    elapsed = trimodal_runs["elapsed"] + time.time() - start
    ok = ratio >= 10.0 and elapsed < 300.0
    _report(
        5,
        ok,
        f"median min-coordinate ESS {np.median(sahmc_vals):.1f} vs "
        f"{np.median(hmc_vals):.1f}, ratio {ratio:.2f} >= 10, {elapsed:.0f}s < 300s",
    )
    assert ok


def test_criterion_6_high_dimensional_mixture(mixture8_runs):
    start = time.time()
    modes = mixture_8_modes(7)
    sahmc_assigns, _, sahmc_ndis = _mode_stats(mixture8_runs["sahmc"], modes)
    hmc_assigns, _, _ = _mode_stats(mixture8_runs["hmc"], modes)
    f_err_s = frequency_error(sahmc_assigns, 8)
    f_err_h = frequency_error(hmc_assigns, 8)
    n_dis = float(np.mean(sahmc_ndis))
    elapsed = mixture8_runs["elapsed"] + time.time() - start
    ok = n_dis == 8.0 and f_err_s < 0.05 and f_err_h > 0.08 and elapsed < 600.0
    _report(
        6,
        ok,
        f"SAHMC N_dis {n_dis:.1f} (need 8), F_err {f_err_s:.4f} (< 0.05), "
        f"HMC F_err {f_err_h:.4f} (> 0.08), {elapsed:.0f}s < 600s",
    )
    assert ok


def test_criterion_7_sensor_multimodality():
    cfg = parse_config("configs/sensor.json")
    target = cfg.build_target()
    start = time.time()
    counts = {}
    for algorithm in ("sahmc", "hmc"):
        record = run_chain(cfg.sampler_config(algorithm, "desk", 0), target, algorithm)
        post = record.post_burn_in()
        idx = np.linspace(0, post.shape[0] - 1, 1000).astype(int)
        counts[algorithm] = _cluster_sizes(post[idx][:, 6:8])
    elapsed = time.time() - start
    ok = len(counts["sahmc"]) >= 2 and len(counts["hmc"]) == 1 and elapsed < 600.0
    _report(
        7,
        ok,
        f"SAHMC clusters {len(counts['sahmc'])} (sizes {counts['sahmc'][:3]}), "
        f"HMC clusters {len(counts['hmc'])}, {elapsed:.0f}s < 600s",
    )
    assert ok


def test_criterion_8_mlp_energy_exploration(tmp_path):
    cfg = parse_config("configs/mlp_sim.json")
    target = cfg.build_target()
    start = time.time()
    stats = {}
    for algorithm in ("sahmc", "hmc"):
        sc = _replace(
            cfg.sampler_config(algorithm, "desk", 1), iterations=55000, burn_in=5000
        )
        record = run_chain(sc, target, algorithm)
        e = record.post_burn_in_energies()
        stats[algorithm] = (float(e.min()), float(e.max() - e.min()))
    range_ratio = stats["sahmc"][1] / stats["hmc"][1]
    min_ok = stats["sahmc"][0] <= stats["hmc"][0]

    pima = parse_config("configs/pima_smoke.json")
    table = run_experiment(pima, profile="smoke", out_dir=tmp_path / "pima")
    keys = {tuple(k.split("|")[1:]) for k in json.loads(table.to_json())["rows"]}
    emitted = keys >= {
        (a, m) for a in ("sahmc", "hmc") for m in ("min_energy", "acceptance", "test_error")
    }
    elapsed = time.time() - start
    ok = range_ratio >= 1.5 and min_ok and emitted and elapsed < 600.0
    _report(
        8,
        ok,
        f"energy range ratio {range_ratio:.2f} >= 1.5, min energy "
        f"{stats['sahmc'][0]:.2f} <= {stats['hmc'][0]:.2f}: {min_ok}, "
        f"Pima smoke metrics emitted: {emitted}, {elapsed:.0f}s < 600s",
    )
    assert ok


def test_criterion_9_diagnostics_oracles():
    start = time.time()
    worst = 0.0
    for rho, seed in ((0.5, 50), (0.9, 90), (0.99, 7)):
        n = 400000
        rng = np.random.default_rng(seed)
        innov = rng.normal(size=n) * np.sqrt(1 - rho**2)
        x = np.empty(n)
        x[0] = rng.normal()
        for i in range(1, n):
            x[i] = rho * x[i - 1] + innov[i]
        analytic = n * (1 - rho) / (1 + rho)
        worst = max(worst, abs(ess(x) - analytic) / analytic)

    freq_exact = frequency_error([np.zeros(1000, dtype=int)], 8) == 0.21875

    target = trimodal_2d(-6.0, 4.0)
    part = EnergyPartition.regular(0.0, 2.0, 12)
    theta = np.arange(12.0)
    ends = (np.array([-6.0, -6.0]), np.array([4.0, 4.0]))
    _, b1, _ = barrier_profile(target, *ends, theta=theta, partition=part)
    _, b2, _ = barrier_profile(target, *ends, theta=theta + 123.0, partition=part)
    shift_exact = b1 == b2
    elapsed = time.time() - start
    ok = worst < 0.15 and freq_exact and shift_exact and elapsed < 30.0
    _report(
        9,
        ok,
        f"AR(1) worst rel error {worst:.3f} < 0.15, frequency error exact: "
        f"{freq_exact}, barrier shift invariant: {shift_exact}, {elapsed:.0f}s < 30s",
    )
    assert ok


def test_criterion_10_frozen_theta_detailed_balance():
    target = trimodal_2d(-6.0, 4.0)
    part = EnergyPartition.regular(0.0, 2.0, 12)
    theta = -1.0 * np.arange(12.0)
    bounds = ((-14.0, 12.0), (-14.0, 12.0))
    start = time.time()
    masses = region_masses(target, part, bounds, tol=1e-9)
    oracle = occupancy_from_masses(masses, theta)
    cfg = SamplerConfig(
        epsilon=0.3,
        leapfrog_steps=20,
        iterations=1000000,
        burn_in=100000,
        seed=909,
        partition=part,
        gain=GainSchedule(t0=5000.0),
        adapt_theta=False,
        initial_theta=theta,
    )
    record = run_chain(cfg, target, "sahmc")
    regions = record.post_burn_in_regions()
    empirical = np.bincount(regions, minlength=13)[1:] / regions.size
    sel = oracle >= 0.02
    rel = np.abs(empirical[sel] - oracle[sel]) / oracle[sel]
    elapsed = time.time() - start
    ok = float(rel.max()) < 0.02 and elapsed < 180.0
    _report(
        10,
        ok,
        f"max relative occupancy error {rel.max():.4f} < 0.02 over regions "
        f"{[int(v) for v in np.where(sel)[0] + 1]}, {elapsed:.0f}s < 180s",
    )
    assert ok
