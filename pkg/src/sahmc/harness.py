"""Experiment harness: config files, chain execution, metric aggregation,
and plot-ready data exports.

Config files are strict JSON: unknown keys are rejected, every experiment
declares per-profile iteration counts, and identical configs with identical
seeds reproduce byte-identical result tables (wall times are stored apart).
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import diagnostics, targets
from .core import EnergyPartition, GainSchedule, SamplerConfig
from .samplers import RunRecord, run_parallel

OUTPUT_ROOT_ENV = "SAHMC_OUTPUT_ROOT"

PLOT_KINDS = ("scatter", "trace_position", "trace_momentum", "trace_energy", "theta_trace")

_TOP_KEYS = {
    "experiment",
    "target",
    "algorithms",
    "epsilon",
    "leapfrog_steps",
    "partition",
    "t0",
    "profiles",
    "n_chains",
    "seed_base",
    "seeds",
    "metrics",
    "initial_position",
    "pi",
}
_PROFILE_KEYS = {"iterations", "burn_in"}
_PARTITION_KEYS = {"u1", "delta_u", "m"}

_TARGET_KINDS = {
    "trimodal": {"a", "b"},
    "mixture8": {"d"},
    "sensor": {"data_seed", "true_locations", "anchors", "detection_range", "noise_sd", "data_file"},
    "mlp_regression": {"n", "hidden_units", "data_seed", "prior_sd"},
    "pima": {"csv_path", "hidden_units", "split_seed", "prior_sd"},
    "standard_normal": {"d"},
    "bimodal1d": {"mu", "sd"},
}

_METRICS = ("ess", "min_energy", "n_dis", "f_err", "acceptance", "test_error", "posterior_risk")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a target, the algorithms to run on it, sampler
    settings, per-profile iteration counts, and the metrics to report."""

    experiment: str
    target: dict
    algorithms: tuple
    epsilon: float
    leapfrog_steps: int
    profiles: dict
    n_chains: int
    seeds: tuple
    metrics: tuple
    partition: Optional[dict] = None
    t0: Optional[float] = None
    initial_position: Optional[list] = None
    pi: Optional[list] = None

    def sampler_config(self, algorithm: str, profile: str, chain: int) -> SamplerConfig:
        if profile not in self.profiles:
            raise ConfigError(f"unknown profile {profile!r}")
        prof = self.profiles[profile]
        part = None
        gain = None
        if algorithm == "sahmc":
            if self.partition is None:
                raise ConfigError("sahmc requires a partition")
            part = EnergyPartition.regular(
                self.partition["u1"], self.partition["delta_u"], self.partition["m"]
            )
            gain = GainSchedule(t0=self.t0 if self.t0 is not None else 5000.0)
        init = "random" if self.initial_position is None else np.asarray(self.initial_position)
        pi = None
        if algorithm == "sahmc" and self.pi is not None:
            pi = np.asarray(self.pi, dtype=float)
        return SamplerConfig(
            pi=pi,
            epsilon=self.epsilon,
            leapfrog_steps=self.leapfrog_steps,
            iterations=prof["iterations"],
            burn_in=prof["burn_in"],
            seed=self.seeds[chain],
            partition=part,
            gain=gain,
            initial_position=init,
        )

    def build_target(self):
        return build_target(self.target)

    def modes(self) -> Optional[np.ndarray]:
        kind = self.target["kind"]
        if kind == "trimodal":
            a, b = self.target["a"], self.target["b"]
            return np.array([[a, a], [b, b], [0.0, 0.0]])
        if kind == "mixture8":
            return targets.mixture_8_modes(self.target["d"])
        return None


def build_target(spec: dict):
    kind = spec.get("kind")
    params = {k: v for k, v in spec.items() if k != "kind"}
    if kind == "trimodal":
        return targets.trimodal_2d(params["a"], params["b"])
    if kind == "mixture8":
        return targets.mixture_8(params["d"])
    if kind == "standard_normal":
        return targets.standard_normal(params["d"])
    if kind == "bimodal1d":
        return targets.bimodal_1d(params.get("mu", 3.0), params.get("sd", 1.0))
    if kind == "sensor":
        if "data_file" in params:
            data = targets.SensorNetworkSpec.from_json(Path(params["data_file"]).read_text())
        else:
            data = targets.generate_sensor_data(
                true_locations=np.asarray(
                    params.get("true_locations", targets.DEFAULT_TRUE_LOCATIONS)
                ),
                anchors=np.asarray(params.get("anchors", targets.DEFAULT_ANCHORS)),
                detection_range=params.get("detection_range", 0.3),
                noise_sd=params.get("noise_sd", 0.02),
                seed=params.get("data_seed", 0),
            )
        return targets.sensor_posterior(data)
    if kind == "mlp_regression":
        spec_ = targets.simulated_regression_spec(
            n=params.get("n", 100),
            hidden_units=params.get("hidden_units", 4),
            seed=params.get("data_seed", 0),
            prior_sd=params.get("prior_sd", 5.0),
        )
        return targets.mlp_regression_posterior(spec_)
    if kind == "pima":
        data = targets.load_pima_csv(params["csv_path"], seed=params.get("split_seed", 0))
        return targets.mlp_classification_posterior(
            data.to_mlp_spec(
                hidden_units=params.get("hidden_units", 25),
                prior_sd=params.get("prior_sd", 5.0),
            )
        )
    raise ConfigError(f"unknown target kind {kind!r}")


def _check_keys(mapping: dict, allowed: set, context: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {context}: {', '.join(sorted(unknown))}")


def parse_config(path) -> ExperimentConfig:
    """Load and validate a strict-JSON experiment config."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None
    return parse_config_dict(raw)


def parse_config_dict(raw: dict) -> ExperimentConfig:
    _check_keys(raw, _TOP_KEYS, "config")
    for key in ("experiment", "target", "algorithms", "epsilon", "leapfrog_steps", "profiles", "n_chains"):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
    target = raw["target"]
    kind = target.get("kind")
    if kind not in _TARGET_KINDS:
        raise ConfigError(f"unknown target kind {kind!r}")
    _check_keys({k: v for k, v in target.items() if k != "kind"}, _TARGET_KINDS[kind], f"target {kind!r}")
    algorithms = tuple(raw["algorithms"])
    for alg in algorithms:
        if alg not in ("sahmc", "hmc"):
            raise ConfigError(f"unknown algorithm {alg!r}")
    partition = raw.get("partition")
    if partition is not None:
        _check_keys(partition, _PARTITION_KEYS, "partition")
        if partition["delta_u"] <= 0:
            raise ConfigError("thresholds not increasing")
    profiles = raw["profiles"]
    for name, prof in profiles.items():
        _check_keys(prof, _PROFILE_KEYS, f"profile {name!r}")
        if prof["iterations"] < 1:
            raise ConfigError("iterations must be positive")
        if not 0 <= prof["burn_in"] < prof["iterations"]:
            raise ConfigError(f"profile {name!r}: burn_in must be in [0, iterations)")
    n_chains = int(raw["n_chains"])
    if "seeds" in raw:
        seeds = tuple(int(s) for s in raw["seeds"])
        if len(seeds) != n_chains:
            raise ConfigError("seeds length must equal n_chains")
    else:
        base = int(raw.get("seed_base", 1))
        seeds = tuple(base + i for i in range(n_chains))
    metrics = tuple(raw.get("metrics", ("ess", "min_energy", "acceptance")))
    for metric in metrics:
        if metric not in _METRICS:
            raise ConfigError(f"unknown metric {metric!r}")
    return ExperimentConfig(
        experiment=str(raw["experiment"]),
        target=target,
        algorithms=algorithms,
        epsilon=float(raw["epsilon"]),
        leapfrog_steps=int(raw["leapfrog_steps"]),
        profiles=profiles,
        n_chains=n_chains,
        seeds=seeds,
        metrics=metrics,
        partition=partition,
        t0=float(raw["t0"]) if "t0" in raw else None,
        initial_position=raw.get("initial_position"),
        pi=raw.get("pi"),
    )


@dataclass
class ResultTable:
    """Metric values keyed by (target, algorithm, metric)."""

    experiment: str
    rows: Dict[str, dict] = field(default_factory=dict)
    wall_times: Dict[str, float] = field(default_factory=dict)

    def put(self, target: str, algorithm: str, metric: str, value) -> None:
        self.rows[f"{target}|{algorithm}|{metric}"] = _plain(value)

    def get(self, target: str, algorithm: str, metric: str):
        return self.rows[f"{target}|{algorithm}|{metric}"]

    def to_json(self) -> str:
        return json.dumps({"experiment": self.experiment, "rows": self.rows}, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ResultTable":
        d = json.loads(text)
        return cls(experiment=d["experiment"], rows=d["rows"])


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def save_record(record: RunRecord, path) -> None:
    """Persist a record as compressed binary with a JSON sidecar schema."""
    path = Path(path)
    np.savez_compressed(
        path,
        samples=record.samples,
        energies=record.energies,
        regions=record.regions,
        accept_flags=record.accept_flags,
        visit_counts=record.visit_counts,
        theta_trace_iters=record.theta_trace_iters,
        theta_trace=record.theta_trace,
        theta_final=record.theta_final,
        momenta_head=record.momenta_head,
    )
    sidecar = {
        "algorithm": record.algorithm,
        "target": record.target_name,
        "iterations": record.iterations,
        "burn_in": record.burn_in,
        "seed": record.config.seed,
        "epsilon": record.config.epsilon,
        "leapfrog_steps": record.config.leapfrog_steps,
        "thresholds": record.config.partition.thresholds.tolist()
        if record.config.partition is not None
        else None,
        "t0": record.config.gain.t0 if record.config.gain is not None else None,
        "wall_time": record.wall_time,
        "n_divergent": record.n_divergent,
        "warnings": record.warnings,
        "arrays": "samples energies regions accept_flags visit_counts theta_trace_iters theta_trace theta_final momenta_head".split(),
    }
    path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2))


def load_record(path) -> RunRecord:
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_suffix(".npz")
    data = np.load(path)
    sidecar = json.loads(path.with_suffix(".json").read_text())
    thresholds = sidecar.get("thresholds")
    config = SamplerConfig(
        epsilon=sidecar["epsilon"],
        leapfrog_steps=sidecar["leapfrog_steps"],
        iterations=sidecar["iterations"],
        burn_in=sidecar["burn_in"],
        seed=sidecar["seed"],
        partition=EnergyPartition(np.asarray(thresholds)) if thresholds else None,
        gain=GainSchedule(t0=sidecar["t0"]) if sidecar.get("t0") else None,
    )
    return RunRecord(
        samples=data["samples"],
        energies=data["energies"],
        regions=data["regions"],
        accept_flags=data["accept_flags"],
        visit_counts=data["visit_counts"],
        config=config,
        algorithm=sidecar["algorithm"],
        target_name=sidecar["target"],
        wall_time=sidecar["wall_time"],
        theta_trace_iters=data["theta_trace_iters"],
        theta_trace=data["theta_trace"],
        theta_final=data["theta_final"],
        momenta_head=data["momenta_head"],
        n_divergent=sidecar.get("n_divergent", 0),
        warnings=list(sidecar.get("warnings", [])),
    )


def default_output_root() -> Path:
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "sahmc_results"))


def run_experiment(
    config: ExperimentConfig,
    profile: str = "smoke",
    out_dir=None,
    max_workers: int = 1,
) -> ResultTable:
    """Run every (algorithm x chain) combination, persist records and plot
    data, and aggregate the requested metrics into a ResultTable."""
    out_dir = Path(out_dir) if out_dir is not None else default_output_root() / config.experiment / profile
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory not writable: {out_dir} ({exc})") from None

    target = config.build_target()
    modes = config.modes()
    table = ResultTable(experiment=config.experiment)
    for algorithm in config.algorithms:
        chain_configs = [
            config.sampler_config(algorithm, profile, i) for i in range(config.n_chains)
        ]
        records = run_parallel(chain_configs, target, algorithm, max_workers=max_workers)
        for i, record in enumerate(records):
            save_record(record, out_dir / f"{algorithm}_chain{i}.npz")
        emit_plot_data(records[0], "trace_energy", out_dir / f"{algorithm}_trace_energy.csv")
        emit_plot_data(records[0], "scatter", out_dir / f"{algorithm}_scatter.csv", stride=100)
        if records[0].theta_trace is not None:
            emit_plot_data(records[0], "theta_trace", out_dir / f"{algorithm}_theta_trace.csv")
        _aggregate_metrics(table, config, target, algorithm, records, modes)
    (out_dir / "result_table.json").write_text(table.to_json())
    (out_dir / "wall_times.json").write_text(json.dumps(table.wall_times, sort_keys=True, indent=2))
    return table


def _aggregate_metrics(table, config, target, algorithm, records: List[RunRecord], modes) -> None:
    name = target.name
    table.wall_times[f"{name}|{algorithm}"] = float(np.sum([r.wall_time for r in records]))
    for metric in config.metrics:
        if metric == "ess":
            reports = [diagnostics.ess_report(r) for r in records]
            mins = [rep.minimum for rep in reports]
            table.put(name, algorithm, "ess", {
                "min": float(np.min(mins)),
                "med": float(np.median(mins)),
                "max": float(np.max(mins)),
            })
            wall = float(np.median([r.wall_time for r in records]))
            table.wall_times[f"{name}|{algorithm}|s_per_min_ess"] = wall / max(
                float(np.median(mins)), 1e-12
            )
        elif metric == "min_energy":
            table.put(name, algorithm, "min_energy",
                      float(np.min([diagnostics.min_energy(r) for r in records])))
        elif metric == "acceptance":
            table.put(name, algorithm, "acceptance",
                      float(np.mean([r.acceptance_rate() for r in records])))
        elif metric in ("n_dis", "f_err"):
            if modes is None:
                raise ConfigError(f"metric {metric!r} needs a target with known modes")
            assigns = [diagnostics.mode_assignment(r.post_burn_in(), modes) for r in records]
            if metric == "n_dis":
                n_dis = [int(np.unique(a).size) for a in assigns]
                table.put(name, algorithm, "n_dis", float(np.mean(n_dis)))
            else:
                table.put(name, algorithm, "f_err",
                          diagnostics.frequency_error(assigns, modes.shape[0]))
        elif metric == "posterior_risk":
            spec = targets.simulated_regression_spec(
                n=config.target.get("n", 100),
                hidden_units=config.target.get("hidden_units", 4),
                seed=config.target.get("data_seed", 0),
            )
            predict = targets.mlp_predictor(spec)
            grid = spec.x
            risks = [
                diagnostics.posterior_risk(r, targets.true_regression_function, grid, predict)
                for r in records
            ]
            table.put(name, algorithm, "posterior_risk", float(np.mean(risks)))
        elif metric == "test_error":
            data = targets.load_pima_csv(
                config.target["csv_path"], seed=config.target.get("split_seed", 0)
            )
            spec = data.to_mlp_spec(hidden_units=config.target.get("hidden_units", 25))
            predict = targets.mlp_predictor(spec)
            errors = []
            for r in records:
                post = r.post_burn_in()[:: max(1, r.post_burn_in().shape[0] // 500)]
                probs = np.mean([predict(z, data.x_test) for z in post], axis=0)
                errors.append(float(np.mean((probs > 0.5) != (data.y_test > 0.5))))
            table.put(name, algorithm, "test_error", float(np.mean(errors)))


def emit_plot_data(record: RunRecord, kind: str, path, stride: int = 1, head: int = 1000) -> Path:
    """Write one CSV of plot-ready data for the given record."""
    if kind not in PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}")
    path = Path(path)
    d = record.samples.shape[1]
    if kind == "scatter":
        post = record.post_burn_in()[::stride]
        header = "iter," + ",".join(f"x{i+1}" for i in range(d))
        iters = np.arange(record.burn_in, record.iterations)[::stride]
        body = np.column_stack([iters[: post.shape[0]], post])
    elif kind == "trace_position":
        n = min(head, record.iterations)
        header = "iter," + ",".join(f"x{i+1}" for i in range(d))
        body = np.column_stack([np.arange(n), record.samples[:n]])
    elif kind == "trace_momentum":
        if record.momenta_head is None:
            raise ValueError("record holds no momenta")
        n = min(head, record.momenta_head.shape[0])
        header = "iter," + ",".join(f"y{i+1}" for i in range(d))
        body = np.column_stack([np.arange(n), record.momenta_head[:n]])
    elif kind == "trace_energy":
        n = min(head, record.iterations)
        header = "iter,energy"
        body = np.column_stack([np.arange(n), record.energies[:n]])
    else:  # theta_trace
        if record.theta_trace is None:
            raise ValueError("record holds no theta trace")
        m = record.theta_trace.shape[1]
        header = "iter," + ",".join(f"theta_{i+1}" for i in range(m))
        body = np.column_stack([record.theta_trace_iters, record.theta_trace])
    if body.shape[0] == 0:
        import warnings

        warnings.warn(f"no data rows for plot kind {kind!r}; writing header only")
    with open(path, "w") as fh:
        fh.write(header + "\n")
        np.savetxt(fh, body, delimiter=",", fmt="%.10g")
    return path


def compare_summary(tables: List[ResultTable]) -> dict:
    """Seconds-per-minimum-ESS comparison across algorithms, normalized to
    the HMC baseline when present; returns a JSON-ready summary with an
    aligned text rendering under the 'text' key."""
    entries = {}
    for table in tables:
        for key, value in table.wall_times.items():
            if key.endswith("|s_per_min_ess"):
                tgt, alg, _ = key.split("|")
                entries[(tgt, alg)] = value
    summary = {"rows": [], "note": None}
    lines = [f"{'target':<30} {'algorithm':<8} {'s/minESS':>12} {'relative':>10}"]
    targets_seen = sorted({t for t, _ in entries})
    for tgt in targets_seen:
        baseline = entries.get((tgt, "hmc"))
        for (etgt, alg), value in sorted(entries.items()):
            if etgt != tgt:
                continue
            rel = baseline / value if baseline else None
            summary["rows"].append(
                {"target": tgt, "algorithm": alg, "s_per_min_ess": value, "relative_speed": rel}
            )
            rel_s = f"{rel:.2f}" if rel is not None else "-"
            lines.append(f"{tgt:<30} {alg:<8} {value:>12.5f} {rel_s:>10}")
        if baseline is None:
            summary["note"] = "no HMC baseline; relative column omitted"
    summary["text"] = "\n".join(lines)
    return summary
