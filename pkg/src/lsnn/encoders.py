"""Conversion of task observations into input spike trains or analog channels."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass
class TuningCurveSpec:
    """Gaussian population rate code over an analog value range."""

    n_neurons: int
    value_min: float
    value_max: float
    sigma: float
    r_max: float          # peak rate in Hz
    dt: float = 1.0       # ms

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.value_max <= self.value_min:
            raise ValueError("value range must be increasing")

    @property
    def centers(self) -> np.ndarray:
        return np.linspace(self.value_min, self.value_max, self.n_neurons)

    def rates(self, value: float) -> np.ndarray:
        v = np.clip(value, self.value_min, self.value_max)
        return self.r_max * np.exp(-((self.centers - v) ** 2) / (2.0 * self.sigma ** 2))

    def probabilities(self, value) -> np.ndarray:
        """Per-step Bernoulli probabilities min(1, rate*dt), dt in seconds."""
        value = np.asarray(value, dtype=float)
        v = np.clip(value, self.value_min, self.value_max)
        r = self.r_max * np.exp(-((self.centers - v[..., None]) ** 2) / (2.0 * self.sigma ** 2))
        return np.minimum(1.0, r * self.dt * 1e-3)


def l2l_tuning_spec(value_min: float, value_max: float, n_neurons: int = 100,
                    r_max: float = 200.0, dt: float = 1.0) -> TuningCurveSpec:
    """Tuning curves for the learning-to-learn inputs: sigma = range/1000."""
    return TuningCurveSpec(n_neurons=n_neurons, value_min=value_min, value_max=value_max,
                           sigma=(value_max - value_min) / 1000.0, r_max=r_max, dt=dt)


def rl_tuning_spec(n_neurons: int = 40, dt: float = 1.0) -> TuningCurveSpec:
    """Position tuning for the arena task: rate = 500 * exp(-100 (xi_i - xi)^2) Hz
    over [-1, 1], i.e. sigma^2 = 1/200."""
    return TuningCurveSpec(n_neurons=n_neurons, value_min=-1.0, value_max=1.0,
                           sigma=np.sqrt(1.0 / 200.0), r_max=500.0, dt=dt)


def encode_gaussian_tuning(value, spec: TuningCurveSpec, rng: np.random.Generator) -> np.ndarray:
    """Bernoulli spike vector for one step; value may be scalar or (...,) array."""
    p = spec.probabilities(value)
    return (rng.random(p.shape) < p).astype(float)


def encode_population_rate(gray: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Each of n neurons spikes independently with probability `gray` this step."""
    if gray < 0.0 or gray > 1.0:
        warnings.warn(f"gray value {gray} outside [0, 1]; clamping", stacklevel=2)
        gray = float(np.clip(gray, 0.0, 1.0))
    return (rng.random(n) < gray).astype(float)


@dataclass
class ThresholdCodeSpec:
    """Two neurons per level: even index = up-crossing, odd index = down-crossing."""

    n_thresholds: int = 40

    @property
    def levels(self) -> np.ndarray:
        n = self.n_thresholds
        return np.arange(1, n + 1) / (n + 1)

    @property
    def n_neurons(self) -> int:
        return 2 * self.n_thresholds


def encode_threshold_crossing(prev: float, cur: float, spec: ThresholdCodeSpec) -> np.ndarray:
    """Up-neuron for level L fires iff prev < L <= cur; down iff cur <= L < prev."""
    levels = spec.levels
    out = np.zeros(spec.n_neurons)
    out[0::2] = ((prev < levels) & (levels <= cur)).astype(float)
    out[1::2] = ((cur <= levels) & (levels < prev)).astype(float)
    return out


def encode_threshold_sequence(values: np.ndarray, spec: ThresholdCodeSpec,
                              initial: float = 0.0) -> np.ndarray:
    """Threshold-crossing code for a whole (T,) trajectory at once."""
    values = np.asarray(values, dtype=float)
    prev = np.concatenate([[initial], values[:-1]])
    levels = spec.levels
    out = np.zeros((values.size, spec.n_neurons))
    out[:, 0::2] = (prev[:, None] < levels) & (levels <= values[:, None])
    out[:, 1::2] = (values[:, None] <= levels) & (levels < prev[:, None])
    return out.astype(float)


REWARD_PULSE_NEURONS = 80  # two synchronous groups of 40


def encode_reward_pulse(reward: float) -> np.ndarray:
    """Group A (neurons 0..39) fires on the goal reward, group B (40..79) on the
    wall penalty; silence otherwise."""
    out = np.zeros(REWARD_PULSE_NEURONS)
    if reward == 1.0:
        out[:40] = 1.0
    elif reward < 0.0:
        out[40:] = 1.0
    return out


def analog_channel(values: np.ndarray, repeat: int = 1) -> np.ndarray:
    """Pass-through analog inputs x_i(t); optionally repeat each frame for
    `repeat` consecutive steps (frame-to-millisecond expansion)."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if repeat > 1:
        values = np.repeat(values, repeat, axis=0)
    return values


def presentation_cue(total_steps: int, window: int, n_channels: int = 1) -> np.ndarray:
    """One extra input channel firing every step of the output window."""
    cue = np.zeros((total_steps, n_channels))
    cue[total_steps - window:] = 1.0
    return cue
