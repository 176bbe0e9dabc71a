"""CSV export of metrics, spike rasters, readout traces and RL trajectories."""

from __future__ import annotations

import csv
import os

import numpy as np

METRICS_FIELDS = ("iteration", "loss", "mse", "rate_reg", "accuracy")


class MetricsWriter:
    """Append-only metrics CSV (`iteration,loss,mse,rate_reg,accuracy`); a
    crashed run keeps every row written so far."""

    def __init__(self, path: str):
        self.path = path
        new = not os.path.exists(path) or os.path.getsize(path) == 0
        self._fh = open(path, "a", newline="")
        self._writer = csv.writer(self._fh)
        if new:
            self._writer.writerow(METRICS_FIELDS)
            self._fh.flush()

    def append(self, **fields) -> None:
        self._writer.writerow([fields.get(k, "") for k in METRICS_FIELDS])
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def export_raster(path: str, raster: np.ndarray, dt_ms: float = 1.0) -> None:
    """Spike events as `t_ms,neuron_id` rows, time-ordered."""
    z = np.asarray(raster)
    if z.ndim == 3:
        if z.shape[0] != 1:
            raise ValueError("raster export expects a single trial")
        z = z[0]
    times, neurons = np.nonzero(z)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t_ms", "neuron_id"])
        for t, j in zip(times, neurons):
            w.writerow([t * dt_ms, j])


def export_readout(path: str, readout_trace: np.ndarray, dt_ms: float = 1.0) -> None:
    """Readout trace as `t_ms,out_0,out_1,...`."""
    y = np.asarray(readout_trace, dtype=float)
    if y.ndim == 3:
        if y.shape[0] != 1:
            raise ValueError("readout export expects a single trial")
        y = y[0]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t_ms"] + [f"out_{i}" for i in range(y.shape[1])])
        for t, row in enumerate(y):
            w.writerow([t * dt_ms] + [f"{v:.10g}" for v in row])


def export_trajectories(path: str, positions: np.ndarray, rewards: np.ndarray,
                        dt_ms: float = 1.0) -> None:
    """Agent paths as `episode,t_ms,x,y,reward`; positions (K, T, 2)."""
    positions = np.asarray(positions, dtype=float)
    rewards = np.asarray(rewards, dtype=float)
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["episode", "t_ms", "x", "y", "reward"])
        for ep in range(positions.shape[0]):
            for t in range(positions.shape[1]):
                x, y = positions[ep, t]
                w.writerow([ep, t * dt_ms, f"{x:.10g}", f"{y:.10g}",
                            f"{rewards[ep, t]:.10g}"])


def read_metrics(path: str) -> list[dict]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))
