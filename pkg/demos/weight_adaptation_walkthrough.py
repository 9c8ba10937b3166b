"""Watch the region weights converge on a small one-dimensional problem.

The target is an equal two-component Gaussian mixture at -3 and +3.  The
energy axis is split into three regions, and the stochastic-approximation
update drives the log-weights toward log(region mass / desired frequency)
up to a common constant.  The script prints the weight differences next to
the values computed independently by adaptive quadrature.
"""

import argparse

import numpy as np

from sahmc.core import EnergyPartition, GainSchedule, SamplerConfig
from sahmc.diagnostics import theta_convergence_check
from sahmc.quadrature import region_masses
from sahmc.samplers import run_chain
from sahmc.targets import bimodal_1d


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iterations", type=int, default=200000)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    target = bimodal_1d(3.0, 1.0)
    partition = EnergyPartition(thresholds=np.array([2.0, 3.0]))
    bounds = (-10.0, 10.0)
    masses = region_masses(target, partition, bounds, tol=1e-10)
    print(f"quadrature region masses: {np.round(masses, 5)}")

    cfg = SamplerConfig(
        epsilon=0.5,
        leapfrog_steps=10,
        iterations=args.iterations,
        burn_in=args.iterations // 10,
        seed=args.seed,
        partition=partition,
        gain=GainSchedule(t0=1000.0),
    )
    record = run_chain(cfg, target, "sahmc")

    trace = record.theta_trace
    print("weight trajectory (differences against region 1):")
    for frac in (0.01, 0.1, 0.5, 1.0):
        row = trace[min(len(trace) - 1, int(frac * len(trace)))]
        print(f"  {frac:4.0%} of run: {np.round(row - row[0], 3)}")

    report = theta_convergence_check(
        record, target, partition, bounds, masses=masses, tail_average=0.5
    )
    limit = report.oracle_log_weights
    print(f"quadrature limit differences:  {np.round(limit - limit[0], 3)}")
    print(f"max pairwise deviation: {report.max_pairwise_deviation:.4f}")


if __name__ == "__main__":
    main()
