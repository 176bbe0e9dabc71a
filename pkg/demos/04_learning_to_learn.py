"""Learning-to-learn: a network that learns sine curves from examples.

Outer loop: BPTT tunes the network weights across many short episodes, each
drawn from a family of sinusoids (random amplitude and phase).  Inner loop:
within an episode the weights are frozen -- the network sees (x, f(x)) example
pairs through its input stream and must predict f(x) for new x values, so any
"learning" inside the episode happens purely in the network dynamics.

This is a short smoke run (a few minutes); training to convergence takes a
couple thousand iterations.

Run:  python3 demos/04_learning_to_learn.py
"""

import numpy as np

from lsnn.supervised import (build_l2l_episode, gen_sinus_task, l2l_predictions,
                             linear_baseline, train_l2l_outer)
from lsnn import simulate

res = train_l2l_outer(family="sinus", n_regular=60, n_adaptive=40, n_steps=100,
                      batch=10, iterations=60, seed=0, log_every=10)

mse = res["mse"]
print(f"\nepisode MSE, first 10 iterations: {mse[:10].mean():.3f}")
print(f"episode MSE, last 10 iterations:  {mse[-10:].mean():.3f}")

# evaluate on a fresh, never-seen task from the family
rng = np.random.default_rng(12345)
task = gen_sinus_task(rng)
ep = build_l2l_episode(task, 100, rng, step_ms=20)
raster, _, _ = simulate(res["params"], ep.inputs)
pred = l2l_predictions(res["params"], raster, 20)
print(f"held-out task (A={task.amplitude:.2f}, phi={task.phase:.2f}): "
      f"MSE {np.mean((pred - ep.targets) ** 2):.3f}")
ridge = linear_baseline(raster, ep.targets, protocol="batch",
                        rng=np.random.default_rng(1))
print(f"ridge regression on the same spike trains: MSE {ridge:.3f}")
