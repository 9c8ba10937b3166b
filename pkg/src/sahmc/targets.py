"""Benchmark target densities with analytic gradients.

Three families are implemented as compiled ``pot(x, pars)`` /
``grad(x, pars, out)`` pairs so every shipped target also works inside the
fast chain kernel: general Gaussian mixtures (trimodal, eight-mode cube,
validation targets), the sensor-network localization posterior, and
single-hidden-layer network posteriors (regression and classification).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .core import TargetDensity

LOG_2PI = float(np.log(2.0 * np.pi))


def _make_target(dim: int, pot, grad, pars: np.ndarray, name: str) -> TargetDensity:
    pars = np.ascontiguousarray(pars, dtype=np.float64)

    def potential(x):
        return float(pot(np.asarray(x, dtype=np.float64), pars))

    def gradient(x):
        out = np.empty(dim)
        grad(np.asarray(x, dtype=np.float64), pars, out)
        return out

    return TargetDensity(
        dim=dim, potential=potential, gradient=gradient, name=name, jit_spec=(pot, grad, pars)
    )


# ---------------------------------------------------------------------------
# Gaussian mixtures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Mixture of Gaussians; covariances default to shared identity."""

    weights: np.ndarray
    means: np.ndarray  # (K, d)
    covariances: Optional[np.ndarray] = None  # (K, d, d), or None for identity
    normalized: bool = True  # include the Gaussian normalizing constants

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        mu = np.atleast_2d(np.asarray(self.means, dtype=float))
        if w.ndim != 1 or w.size != mu.shape[0]:
            raise ValueError("weights and means are inconsistent")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights must be positive and sum to 1")
        if self.covariances is not None:
            cov = np.asarray(self.covariances, dtype=float)
            if cov.shape != (mu.shape[0], mu.shape[1], mu.shape[1]):
                raise ValueError("covariance dimensions inconsistent with means")
            for c in cov:
                np.linalg.cholesky(c)  # SPD check
            object.__setattr__(self, "covariances", cov)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)


@njit(cache=True)
def _gauss_mix_terms(x, pars, expo):
    K = int(pars[0])
    d = int(pars[1])
    off_c = 2
    off_mu = off_c + K
    off_p = off_mu + K * d
    mx = -1e308
    for k in range(K):
        q = 0.0
        base_mu = off_mu + k * d
        base_p = off_p + k * d * d
        for i in range(d):
            di = x[i] - pars[base_mu + i]
            row = 0.0
            for j in range(d):
                row += pars[base_p + i * d + j] * (x[j] - pars[base_mu + j])
            q += di * row
        e = pars[off_c + k] - 0.5 * q
        expo[k] = e
        if e > mx:
            mx = e
    return mx


@njit(cache=True)
def gauss_mix_potential(x, pars):
    K = int(pars[0])
    expo = np.empty(K)
    mx = _gauss_mix_terms(x, pars, expo)
    s = 0.0
    for k in range(K):
        s += np.exp(expo[k] - mx)
    return -(mx + np.log(s))


@njit(cache=True)
def gauss_mix_gradient(x, pars, out):
    K = int(pars[0])
    d = int(pars[1])
    off_mu = 2 + K
    off_p = off_mu + K * d
    expo = np.empty(K)
    mx = _gauss_mix_terms(x, pars, expo)
    s = 0.0
    for k in range(K):
        expo[k] = np.exp(expo[k] - mx)
        s += expo[k]
    for i in range(d):
        out[i] = 0.0
    for k in range(K):
        r = expo[k] / s
        base_mu = off_mu + k * d
        base_p = off_p + k * d * d
        for i in range(d):
            row = 0.0
            for j in range(d):
                row += pars[base_p + i * d + j] * (x[j] - pars[base_mu + j])
            out[i] += r * row


def gaussian_mixture(spec: GaussianMixtureSpec, name: str = "gaussian_mixture") -> TargetDensity:
    """Build the target U(x) = -log sum_k w_k N(x; mu_k, Sigma_k)."""
    K, d = spec.means.shape
    if spec.covariances is None:
        precisions = np.broadcast_to(np.eye(d), (K, d, d)).copy()
        logdets = np.zeros(K)
    else:
        precisions = np.stack([np.linalg.inv(c) for c in spec.covariances])
        logdets = np.array([np.linalg.slogdet(c)[1] for c in spec.covariances])
    coefs = np.log(spec.weights)
    if spec.normalized:
        coefs = coefs - 0.5 * d * LOG_2PI - 0.5 * logdets
    pars = np.concatenate(
        [[float(K), float(d)], coefs, spec.means.ravel(), precisions.ravel()]
    )
    return _make_target(d, gauss_mix_potential, gauss_mix_gradient, pars, name)


def trimodal_2d(a: float, b: float) -> TargetDensity:
    """The three-component 2-D benchmark mixture: correlated modes at (a, a)
    and (b, b) with correlations +0.9 / -0.9 and a standard-normal mode at
    the origin, equal weights."""
    spec = GaussianMixtureSpec(
        weights=np.full(3, 1.0 / 3.0),
        means=np.array([[a, a], [b, b], [0.0, 0.0]]),
        covariances=np.array(
            [
                [[1.0, 0.9], [0.9, 1.0]],
                [[1.0, -0.9], [-0.9, 1.0]],
                [[1.0, 0.0], [0.0, 1.0]],
            ]
        ),
    )
    return gaussian_mixture(spec, name=f"trimodal_2d(a={a:g},b={b:g})")


def mixture_8_modes(d: int) -> np.ndarray:
    """Mode locations of the eight-component cube mixture in dimension d.

    First three coordinates run over the vertices of a cube with edge 10;
    the remaining coordinates alternate 0 and 10, starting opposite to the
    third coordinate.
    """
    if d < 3:
        raise ValueError("mixture_8 requires d >= 3")
    verts = [
        (10, 10, 10),
        (0, 0, 0),
        (10, 0, 10),
        (0, 10, 10),
        (0, 0, 10),
        (0, 10, 0),
        (10, 0, 0),
        (10, 10, 0),
    ]
    mus = np.zeros((8, d))
    for j, v in enumerate(verts):
        mus[j, :3] = v
        for k in range(3, d):
            mus[j, k] = 10.0 - v[2] if (k - 3) % 2 == 0 else float(v[2])
    return mus


def mixture_8(d: int) -> TargetDensity:
    """Equal mixture of eight unit-variance isotropic Gaussians on the cube
    vertex pattern, pi(x) ~ sum_j exp(-0.5 |x - mu_j|^2)."""
    spec = GaussianMixtureSpec(
        weights=np.full(8, 0.125), means=mixture_8_modes(d), normalized=False
    )
    return gaussian_mixture(spec, name=f"mixture_8(d={d})")


def standard_normal(d: int) -> TargetDensity:
    """Standard d-variate normal (validation target)."""
    spec = GaussianMixtureSpec(weights=np.array([1.0]), means=np.zeros((1, d)))
    return gaussian_mixture(spec, name=f"standard_normal(d={d})")


def harmonic_oscillator(d: int = 1) -> TargetDensity:
    """U(x) = |x|^2 / 2 without normalizing constants (integrator tests)."""
    spec = GaussianMixtureSpec(
        weights=np.array([1.0]), means=np.zeros((1, d)), normalized=False
    )
    return gaussian_mixture(spec, name=f"harmonic(d={d})")


def bimodal_1d(mu: float = 3.0, sd: float = 1.0) -> TargetDensity:
    """Equal mixture of N(-mu, sd^2) and N(+mu, sd^2)."""
    spec = GaussianMixtureSpec(
        weights=np.array([0.5, 0.5]),
        means=np.array([[-mu], [mu]]),
        covariances=np.array([[[sd**2]], [[sd**2]]]),
    )
    return gaussian_mixture(spec, name=f"bimodal_1d(mu={mu:g})")


# ---------------------------------------------------------------------------
# Sensor network localization
# ---------------------------------------------------------------------------

DEFAULT_TRUE_LOCATIONS = np.array(
    [[0.57, 0.91], [0.10, 0.37], [0.26, 0.14], [0.85, 0.04]]
)
DEFAULT_ANCHORS = np.array([[0.5, 0.3], [0.3, 0.7]])


@dataclass(frozen=True)
class SensorNetworkSpec:
    """Observed pairwise-distance data for the localization posterior.

    ``observations`` holds one row per sensor pair as (t, u, observed, y)
    where u >= n_unknown indexes an anchor; y is the observed distance (0 for
    unobserved pairs).
    """

    anchors: np.ndarray
    observations: np.ndarray  # (n_pairs, 4)
    n_unknown: int = 4
    detection_range: float = 0.3
    noise_sd: float = 0.02
    prior_sd: float = 10.0

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        if obs.ndim != 2 or obs.shape[1] != 4:
            raise ValueError("observations must be (n_pairs, 4) rows (t, u, observed, y)")
        if np.any(obs[:, 3] < 0):
            raise ValueError("observed distances must be nonnegative")
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "anchors", np.asarray(self.anchors, dtype=float))

    @property
    def dim(self) -> int:
        return 2 * self.n_unknown

    def to_json(self) -> str:
        return json.dumps(
            {
                "anchors": self.anchors.tolist(),
                "observations": self.observations.tolist(),
                "n_unknown": self.n_unknown,
                "detection_range": self.detection_range,
                "noise_sd": self.noise_sd,
                "prior_sd": self.prior_sd,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "SensorNetworkSpec":
        d = json.loads(text)
        return cls(
            anchors=np.asarray(d["anchors"], dtype=float),
            observations=np.asarray(d["observations"], dtype=float),
            n_unknown=int(d["n_unknown"]),
            detection_range=float(d["detection_range"]),
            noise_sd=float(d["noise_sd"]),
            prior_sd=float(d["prior_sd"]),
        )


def generate_sensor_data(
    true_locations: np.ndarray = DEFAULT_TRUE_LOCATIONS,
    anchors: np.ndarray = DEFAULT_ANCHORS,
    detection_range: float = 0.3,
    noise_sd: float = 0.02,
    seed: int = 0,
) -> SensorNetworkSpec:
    """Simulate the pairwise observation process: each pair is detected with
    probability exp(-0.5 d^2 / R^2); detected distances get N(d, sigma^2)
    noise truncated at zero."""
    locs = np.asarray(true_locations, dtype=float)
    anchors = np.asarray(anchors, dtype=float)
    n = locs.shape[0]
    rng = np.random.default_rng(seed)
    all_points = np.vstack([locs, anchors])
    rows = []
    pairs = [(t, u) for t in range(n) for u in range(t + 1, n)]
    pairs += [(t, n + a) for t in range(n) for a in range(anchors.shape[0])]
    for t, u in pairs:
        delta = all_points[t] - all_points[u]
        dist = float(np.hypot(delta[0], delta[1]))
        p_obs = np.exp(-0.5 * dist**2 / detection_range**2)
        if rng.uniform() < p_obs:
            y = rng.normal(dist, noise_sd)
            while y < 0:
                y = rng.normal(dist, noise_sd)
            rows.append((t, u, 1.0, y))
        else:
            rows.append((t, u, 0.0, 0.0))
    return SensorNetworkSpec(
        anchors=anchors,
        observations=np.array(rows, dtype=float),
        n_unknown=n,
        detection_range=detection_range,
        noise_sd=noise_sd,
        prior_sd=10.0,
    )


@njit(cache=True)
def _sensor_point(x, pars, idx, out):
    n_unknown = int(pars[0])
    if idx < n_unknown:
        out[0] = x[2 * idx]
        out[1] = x[2 * idx + 1]
    else:
        a = idx - n_unknown
        out[0] = pars[5 + 2 * a]
        out[1] = pars[5 + 2 * a + 1]


@njit(cache=True)
def sensor_potential(x, pars):
    n_unknown = int(pars[0])
    rr = pars[1] * pars[1]
    sig2 = pars[2] * pars[2]
    prior2 = pars[3] * pars[3]
    n_anchor = int(pars[4])
    off = 5 + 2 * n_anchor
    n_pairs = int(pars[off])
    base = off + 1
    pt = np.empty(2)
    pu = np.empty(2)
    u_val = 0.0
    for p in range(n_pairs):
        t = int(pars[base + 4 * p])
        u = int(pars[base + 4 * p + 1])
        observed = pars[base + 4 * p + 2] > 0.5
        y = pars[base + 4 * p + 3]
        _sensor_point(x, pars, t, pt)
        _sensor_point(x, pars, u, pu)
        dx = pt[0] - pu[0]
        dy = pt[1] - pu[1]
        d2 = dx * dx + dy * dy
        if observed:
            dist = np.sqrt(d2)
            u_val += 0.5 * d2 / rr
            u_val += 0.5 * (y - dist) * (y - dist) / sig2 + 0.5 * np.log(2.0 * np.pi * sig2)
        else:
            p_det = np.exp(-0.5 * d2 / rr)
            if p_det > 1.0 - 1e-12:
                p_det = 1.0 - 1e-12
            u_val += -np.log(1.0 - p_det)
    for i in range(2 * n_unknown):
        u_val += 0.5 * x[i] * x[i] / prior2
    return u_val


@njit(cache=True)
def sensor_gradient(x, pars, out):
    n_unknown = int(pars[0])
    rr = pars[1] * pars[1]
    sig2 = pars[2] * pars[2]
    prior2 = pars[3] * pars[3]
    n_anchor = int(pars[4])
    off = 5 + 2 * n_anchor
    n_pairs = int(pars[off])
    base = off + 1
    pt = np.empty(2)
    pu = np.empty(2)
    for i in range(2 * n_unknown):
        out[i] = x[i] / prior2
    for p in range(n_pairs):
        t = int(pars[base + 4 * p])
        u = int(pars[base + 4 * p + 1])
        observed = pars[base + 4 * p + 2] > 0.5
        y = pars[base + 4 * p + 3]
        _sensor_point(x, pars, t, pt)
        _sensor_point(x, pars, u, pu)
        dx = pt[0] - pu[0]
        dy = pt[1] - pu[1]
        d2 = dx * dx + dy * dy
        if observed:
            dist = np.sqrt(d2)
            safe = dist if dist > 1e-12 else 1e-12
            # detection term + distance likelihood
            cx = dx / rr - (y - dist) / sig2 * (dx / safe)
            cy = dy / rr - (y - dist) / sig2 * (dy / safe)
        else:
            p_det = np.exp(-0.5 * d2 / rr)
            if p_det > 1.0 - 1e-12:
                p_det = 1.0 - 1e-12
            fac = -p_det / (1.0 - p_det) / rr
            cx = fac * dx
            cy = fac * dy
        if t < n_unknown:
            out[2 * t] += cx
            out[2 * t + 1] += cy
        if u < n_unknown:
            out[2 * u] -= cx
            out[2 * u + 1] -= cy


def sensor_posterior(spec: SensorNetworkSpec) -> TargetDensity:
    """Posterior potential over the unknown sensor coordinates (dimension
    2 * n_unknown), combining distance likelihoods, detection terms for every
    pair, and independent Gaussian priors."""
    pars = np.concatenate(
        [
            [
                float(spec.n_unknown),
                spec.detection_range,
                spec.noise_sd,
                spec.prior_sd,
                float(spec.anchors.shape[0]),
            ],
            spec.anchors.ravel(),
            [float(spec.observations.shape[0])],
            spec.observations.ravel(),
        ]
    )
    return _make_target(spec.dim, sensor_potential, sensor_gradient, pars, "sensor_network")


# ---------------------------------------------------------------------------
# Single-hidden-layer network posteriors
# ---------------------------------------------------------------------------

_ACTIVATIONS = {"relu": 0, "sigmoid": 1, "tanh": 2}


@dataclass(frozen=True)
class MlpSpec:
    """Single-hidden-layer network posterior specification.

    The weight vector is ordered (alpha_0, alpha_1..N, beta_10..beta_1p, ...,
    beta_N0..beta_Np), giving dimension N(p+1) + (N+1).
    """

    hidden_units: int
    input_dim: int
    x: np.ndarray  # (n, p)
    y: np.ndarray  # (n,)
    activation: str = "relu"
    output_activation: str = "identity"  # identity (regression) | sigmoid
    noise_sd: float = 1.0
    prior_sd: float = 5.0

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape != (y.size, self.input_dim):
            raise ValueError("dataset shapes inconsistent with input_dim")
        if y.size == 0:
            raise ValueError("dataset must be nonempty")
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.output_activation not in ("identity", "sigmoid"):
            raise ValueError(f"unknown output activation {self.output_activation!r}")
        if self.noise_sd <= 0 or self.prior_sd <= 0:
            raise ValueError("noise_sd and prior_sd must be positive")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def weight_dim(self) -> int:
        n, p = self.hidden_units, self.input_dim
        return n * (p + 1) + (n + 1)


@njit(cache=True)
def _act(v, kind):
    if kind == 0:
        return v if v > 0.0 else 0.0
    if kind == 1:
        return 1.0 / (1.0 + np.exp(-v))
    return np.tanh(v)


@njit(cache=True)
def _act_deriv(v, kind):
    if kind == 0:
        return 1.0 if v > 0.0 else 0.0
    if kind == 1:
        s = 1.0 / (1.0 + np.exp(-v))
        return s * (1.0 - s)
    t = np.tanh(v)
    return 1.0 - t * t


@njit(cache=True)
def mlp_network_output(z, pars, xi):
    """Pre-output activation a_0 + sum_k a_k phi(pre_k) for one input row."""
    kind = int(pars[1])
    nh = int(pars[2])
    p = int(pars[3])
    s = z[0]
    for k in range(nh):
        base = 1 + nh + k * (p + 1)
        pre = z[base]
        for j in range(p):
            pre += z[base + 1 + j] * xi[j]
        s += z[1 + k] * _act(pre, kind)
    return s


@njit(cache=True)
def mlp_potential(z, pars):
    mode = int(pars[0])
    nh = int(pars[2])
    p = int(pars[3])
    noise2 = pars[4] * pars[4]
    prior2 = pars[5] * pars[5]
    n = int(pars[6])
    off_x = 7
    off_y = off_x + n * p
    u_val = 0.0
    xi = np.empty(p)
    for i in range(n):
        for j in range(p):
            xi[j] = pars[off_x + i * p + j]
        s = mlp_network_output(z, pars, xi)
        y = pars[off_y + i]
        if mode == 0:
            u_val += 0.5 * (y - s) * (y - s) / noise2
        else:
            # Bernoulli with logistic output, in the numerically stable form
            if s > 0.0:
                u_val += np.log(1.0 + np.exp(-s)) + (1.0 - y) * s
            else:
                u_val += np.log(1.0 + np.exp(s)) - y * s
    for i in range(z.size):
        u_val += 0.5 * z[i] * z[i] / prior2
    return u_val


@njit(cache=True)
def mlp_gradient(z, pars, out):
    mode = int(pars[0])
    kind = int(pars[1])
    nh = int(pars[2])
    p = int(pars[3])
    noise2 = pars[4] * pars[4]
    prior2 = pars[5] * pars[5]
    n = int(pars[6])
    off_x = 7
    off_y = off_x + n * p
    for i in range(z.size):
        out[i] = z[i] / prior2
    xi = np.empty(p)
    pre = np.empty(nh)
    hid = np.empty(nh)
    for i in range(n):
        for j in range(p):
            xi[j] = pars[off_x + i * p + j]
        s = z[0]
        for k in range(nh):
            base = 1 + nh + k * (p + 1)
            a = z[base]
            for j in range(p):
                a += z[base + 1 + j] * xi[j]
            pre[k] = a
            hid[k] = _act(a, kind)
            s += z[1 + k] * hid[k]
        y = pars[off_y + i]
        if mode == 0:
            ds = (s - y) / noise2
        else:
            ds = 1.0 / (1.0 + np.exp(-s)) - y
        out[0] += ds
        for k in range(nh):
            out[1 + k] += ds * hid[k]
            dpre = ds * z[1 + k] * _act_deriv(pre[k], kind)
            base = 1 + nh + k * (p + 1)
            out[base] += dpre
            for j in range(p):
                out[base + 1 + j] += dpre * xi[j]


def _mlp_target(spec: MlpSpec, name: str) -> TargetDensity:
    mode = 0 if spec.output_activation == "identity" else 1
    pars = np.concatenate(
        [
            [
                float(mode),
                float(_ACTIVATIONS[spec.activation]),
                float(spec.hidden_units),
                float(spec.input_dim),
                spec.noise_sd,
                spec.prior_sd,
                float(spec.y.size),
            ],
            spec.x.ravel(),
            spec.y,
        ]
    )
    return _make_target(spec.weight_dim, mlp_potential, mlp_gradient, pars, name)


def mlp_regression_posterior(spec: MlpSpec) -> TargetDensity:
    """Gaussian-likelihood posterior over the network weights."""
    if spec.output_activation != "identity":
        raise ValueError("regression posterior requires identity output")
    return _mlp_target(spec, "mlp_regression")


def mlp_classification_posterior(spec: MlpSpec) -> TargetDensity:
    """Bernoulli-likelihood posterior with a logistic output unit."""
    if spec.output_activation != "sigmoid":
        raise ValueError("classification posterior requires sigmoid output")
    return _mlp_target(spec, "mlp_classification")


@njit(cache=True)
def _mlp_forward_batch(z, pars, xs, out):
    mode = int(pars[0])
    n = xs.shape[0]
    for i in range(n):
        s = mlp_network_output(z, pars, xs[i])
        if mode == 1:
            s = 1.0 / (1.0 + np.exp(-s))
        out[i] = s


def mlp_predictor(spec: MlpSpec):
    """Batch prediction function (z, inputs) -> network outputs for the
    network defined by ``spec`` (sigmoid applied for classification)."""
    target = _mlp_target(spec, "mlp_predictor")
    _, _, pars = target.jit_spec

    def predict(z, inputs):
        xs = np.ascontiguousarray(np.atleast_2d(np.asarray(inputs, dtype=float)))
        if xs.shape[1] != spec.input_dim:
            xs = xs.reshape(-1, spec.input_dim)
        out = np.empty(xs.shape[0])
        _mlp_forward_batch(np.asarray(z, dtype=float), pars, xs, out)
        return out

    return predict


def true_regression_function(x) -> np.ndarray:
    """The piecewise-linear regression truth used by the simulated benchmark:
    3 relu(x - 1.5) - relu(x + 1) - 3 relu(x - 1) + 2 relu(x)."""
    x = np.asarray(x, dtype=float)
    r = np.maximum
    return (
        3.0 * r(x - 1.5, 0.0) - r(x + 1.0, 0.0) - 3.0 * r(x - 1.0, 0.0) + 2.0 * r(x, 0.0)
    )


def generate_regression_data(
    n: int = 100, noise_sd: float = 1.0, seed: int = 0, x_range: tuple = (-3.0, 3.0)
) -> tuple:
    """Simulated dataset y = f0(x) + N(0, noise_sd^2) on uniform inputs."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(x_range[0], x_range[1], size=n)
    y = true_regression_function(x) + rng.normal(0.0, noise_sd, size=n)
    return x.reshape(-1, 1), y


def simulated_regression_spec(
    n: int = 100, hidden_units: int = 4, seed: int = 0, prior_sd: float = 5.0
) -> MlpSpec:
    x, y = generate_regression_data(n=n, seed=seed)
    return MlpSpec(
        hidden_units=hidden_units,
        input_dim=1,
        x=x,
        y=y,
        activation="relu",
        output_activation="identity",
        noise_sd=1.0,
        prior_sd=prior_sd,
    )


# ---------------------------------------------------------------------------
# Pima CSV ingestion
# ---------------------------------------------------------------------------

PIMA_COLUMNS = 9  # eight predictors + binary label


@dataclass(frozen=True)
class PimaDataset:
    """Standardized train/test split of the diabetes records."""

    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray

    def to_mlp_spec(self, hidden_units: int = 25, prior_sd: float = 5.0) -> MlpSpec:
        return MlpSpec(
            hidden_units=hidden_units,
            input_dim=self.x_train.shape[1],
            x=self.x_train,
            y=self.y_train,
            activation="relu",
            output_activation="sigmoid",
            prior_sd=prior_sd,
        )


def load_pima_csv(path, seed: int = 0, train_fraction: float = 0.9) -> PimaDataset:
    """Load the 9-column diabetes CSV, z-score the predictors on the training
    fold, and split train/test deterministically by seed (floor convention)."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != PIMA_COLUMNS:
                raise ValueError(
                    f"line {lineno}: expected {PIMA_COLUMNS} columns, got {len(row)}"
                )
            if lineno == 1 and not _is_numeric_row(row):
                continue  # header
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: malformed row ({exc})") from None
    data = np.asarray(rows, dtype=float)
    labels = data[:, -1]
    if not np.all(np.isin(labels, (0.0, 1.0))):
        raise ValueError("labels must be binary 0/1")
    n = data.shape[0]
    n_train = int(np.floor(train_fraction * n))
    perm = np.random.default_rng(seed).permutation(n)
    train_idx, test_idx = perm[:n_train], perm[n_train:]
    x_train = data[train_idx, :-1]
    x_test = data[test_idx, :-1]
    mean = x_train.mean(axis=0)
    sd = x_train.std(axis=0)
    sd[sd == 0] = 1.0
    return PimaDataset(
        x_train=(x_train - mean) / sd,
        y_train=labels[train_idx],
        x_test=(x_test - mean) / sd,
        y_test=labels[test_idx],
    )


def _is_numeric_row(row: Sequence[str]) -> bool:
    try:
        [float(v) for v in row]
        return True
    except ValueError:
        return False
