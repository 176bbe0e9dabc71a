"""Sparse connectivity maintained during training (DEEP R).

The rewiring rule keeps a fixed fraction of synapses active while training:
an L1 prior plus random-walk noise drives weak synapses to zero, dormant ones
are detached, and an equal number of new synapses is activated at random --
so the network explores different wiring diagrams at constant cost.

Run:  python3 demos/03_rewiring.py
"""

import numpy as np

from lsnn import RewireConfig, active_count, build_network, deepr_step
from lsnn.backprop import Gradients

rng = np.random.default_rng(0)
params = build_network(rng, n_in=20, n_regular=40, n_adaptive=20, n_out=5,
                       connectivity=0.1, dale=True)
cfg = RewireConfig(l1_coeff=0.01, target_connectivity=0.1)

initial_mask = params.mask_rec.copy()
counts = {name: active_count(params, name) for name in ("w_in", "w_rec", "w_out")}
print("active synapses:", counts)

for step in range(500):
    # stand-in for task gradients: random walk exercises the rewiring dynamics
    grads = Gradients(dw_in=rng.standard_normal(params.w_in.shape),
                      dw_rec=rng.standard_normal(params.w_rec.shape),
                      dw_out=rng.standard_normal(params.w_out.shape))
    deepr_step(params, grads, cfg, lr=0.02, rng=rng)
    if step in (0, 9, 99, 499):
        overlap = (params.mask_rec & initial_mask).sum() / initial_mask.sum()
        assert active_count(params, "w_rec") == counts["w_rec"]
        print(f"step {step:3d}: recurrent count {active_count(params, 'w_rec')} "
              f"(constant), overlap with initial wiring {overlap:.2f}")

signs_ok = np.all(params.w_rec * np.where(params.mask_rec, 1, 0)
                  * params.signs_rec[None, :] >= 0)
print(f"Dale's law respected throughout: {bool(signs_ok)}")
print(f"dormant weights exactly zero: {bool(np.all(params.w_rec[~params.mask_rec] == 0))}")
