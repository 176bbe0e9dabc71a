"""Classifying digits presented one pixel at a time.

Each image is flattened to a pixel sequence and delivered through a
threshold-crossing code: input neuron i fires when the gray value crosses
level i going up (or down, for the paired neuron).  The network must integrate
the whole sequence before a cue signals "answer now"; classification reads the
softmaxed average readout over the cue window.  Connectivity is kept sparse
by rewiring during training.

Short run on sklearn's 8x8 digits -- expect ~50-60% after a few hundred
iterations (several minutes on one core); accuracy keeps climbing well
past 80% with more iterations.

Run:  python3 demos/06_sequential_digits.py
"""

import numpy as np
from sklearn.datasets import load_digits

from lsnn.supervised import run_seq_pixel_task

bunch = load_digits()
images = bunch.data / 16.0  # 64 pixels -> 64 time steps
labels = bunch.target

rng = np.random.default_rng(0)
perm = rng.permutation(len(images))
test, train = perm[:300], perm[300:]

res = run_seq_pixel_task(images=images[train], labels=labels[train],
                         test_images=images[test], test_labels=labels[test],
                         encoding="threshold", window=20, n_regular=80,
                         n_adaptive=60, tau_a=350.0, connectivity=0.12,
                         dale=True, iterations=300, batch_size=64,
                         lr_initial=0.01, lr_factor=0.8, lr_interval=2500,
                         gamma=0.3, seed=0, eval_every=100, log_every=50)

print(f"\nfinal test accuracy: {res['accuracy']:.3f} (chance is 0.1)")
