"""Loss functions and regularizers whose cotangents feed the backward pass.

Each loss returns (value, seed arrays) where the seeds are already normalized
(mean over batch/steps), so backward() can consume them directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LossSpec:
    kind: str = "cross-entropy-averaged"   # cross-entropy-averaged | mse | ppo-composite
    window: int = 1                        # averaging window in steps
    rate_target: float = 0.0               # f0 in Hz
    rate_coeff: float = 0.0                # regularization weight

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.rate_target < 0:
            raise ValueError("rate_target must be >= 0")


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = logits - logits.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def loss_crossentropy_avg(readout_trace: np.ndarray, window: int, labels) -> tuple[float, np.ndarray]:
    """Cross entropy of the softmaxed time-averaged readout over the final window.

    readout_trace: (batch, T, n_out) or (T, n_out). Returns the batch-mean loss
    and dL/dy seeds (nonzero only inside the window).
    """
    y = np.asarray(readout_trace, dtype=float)
    squeeze = y.ndim == 2
    if squeeze:
        y = y[None]
    batch, T, n_out = y.shape
    if T < window:
        raise ValueError("trace shorter than averaging window")
    labels = np.atleast_1d(np.asarray(labels, dtype=int))
    if np.any(labels < 0) or np.any(labels >= n_out):
        raise ValueError("label out of range")
    avg = y[:, T - window:].mean(axis=1)           # (batch, n_out)
    p = softmax(avg)
    logp = avg - avg.max(axis=1, keepdims=True)
    logz = np.log(np.exp(logp).sum(axis=1))
    loss = float(np.mean(logz - logp[np.arange(batch), labels]))
    g_avg = p.copy()
    g_avg[np.arange(batch), labels] -= 1.0
    g_avg /= batch
    g_y = np.zeros_like(y)
    g_y[:, T - window:] = g_avg[:, None, :] / window
    if squeeze:
        g_y = g_y[0]
    return loss, g_y


def loss_mse(predictions: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean over all elements of squared error; returns (value, dL/dpred)."""
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(targets, dtype=float)
    if p.shape != t.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {t.shape}")
    diff = p - t
    loss = float(np.mean(diff ** 2))
    return loss, 2.0 * diff / diff.size


def firing_rates_hz(raster: np.ndarray, dt_ms: float) -> np.ndarray:
    """Per-neuron firing rate in Hz, pooled over batch and time."""
    z = np.asarray(raster, dtype=float)
    if z.ndim == 2:
        z = z[None]
    return z.mean(axis=(0, 1)) * 1000.0 / dt_ms


def firing_rate_regularizer(raster: np.ndarray, target_hz: float, dt_ms: float) -> tuple[float, np.ndarray]:
    """R = mean_j (rate_j - f0)^2 in Hz^2, with dR/dz seeds for the backward pass."""
    z = np.asarray(raster, dtype=float)
    squeeze = z.ndim == 2
    if squeeze:
        z = z[None]
    if z.size == 0:
        raise ValueError("raster is empty")
    batch, T, n = z.shape
    rates = z.mean(axis=(0, 1)) * 1000.0 / dt_ms
    dev = rates - target_hz
    value = float(np.mean(dev ** 2))
    # d rate_j / d z[b,t,j] = 1000 / (B*T*dt)
    g = np.broadcast_to(2.0 * dev / n * 1000.0 / (batch * T * dt_ms), z.shape).copy()
    if squeeze:
        g = g[0]
    return value, g
