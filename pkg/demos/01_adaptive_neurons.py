"""Spike-frequency adaptation in a single recurrent network.

Drives the same Poisson input into two small networks -- one with plain LIF
neurons, one where half the population has adaptive thresholds -- and shows
how the adaptive population slows its firing as thresholds build up.

Run:  python3 demos/01_adaptive_neurons.py
Writes demo_out/adaptive_raster.png
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lsnn import build_network, simulate

OUT = pathlib.Path("demo_out")
OUT.mkdir(exist_ok=True)

rng = np.random.default_rng(0)
T = 1000  # ms
n_in = 20
x = (rng.random((T, n_in)) < 0.05).astype(float)  # ~50 Hz Poisson inputs

nets = {}
for label, beta in (("LIF (beta=0)", 0.0), ("adaptive (beta=1.8)", 1.8)):
    params = build_network(np.random.default_rng(1), n_in=n_in, n_regular=0,
                           n_adaptive=40, n_out=2, tau_a=500.0,
                           beta_adaptive=beta, b0=0.02, refractory=2.0)
    params.w_in *= 30.0
    params.w_rec *= 5.0
    raster, ytrace, tape = simulate(params, x, record=True)
    nets[label] = (raster, tape)
    early = raster[:T // 2].mean() * 1000.0
    late = raster[T // 2:].mean() * 1000.0
    print(f"{label:22s} first half {early:6.1f} Hz   second half {late:6.1f} Hz")

fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
for ax, (label, (raster, tape)) in zip(axes, nets.items()):
    t_idx, n_idx = np.nonzero(raster)
    ax.plot(t_idx, n_idx, "|", markersize=3, color="k")
    ax.set_ylabel("neuron")
    ax.set_title(label)
axes[-1].set_xlabel("time (ms)")
fig.tight_layout()
fig.savefig(OUT / "adaptive_raster.png", dpi=120)
print(f"wrote {OUT / 'adaptive_raster.png'}")
