"""Convenience constructors wiring initialization, masks and neuron constants
into a ready-to-train NetworkParams."""

from __future__ import annotations

import numpy as np

from .initialization import init_dale, init_gaussian, sample_signs, sparse_mask
from .network import NetworkParams, NeuronParams


def _sample_range(spec, n, rng):
    if isinstance(spec, (tuple, list)):
        lo, hi = spec
        return rng.uniform(lo, hi, size=n)
    return np.full(n, float(spec))


def build_network(rng: np.random.Generator, *, n_in: int, n_regular: int,
                  n_adaptive: int, n_out: int, tau_m=20.0, tau_a=700.0,
                  beta_adaptive: float = 1.8, b0: float = 0.01,
                  refractory: float = 0.0, dt: float = 1.0, tau_out: float = 20.0,
                  delay_range: tuple[int, int] = (0, 0),
                  connectivity: float | None = None, dale: bool = False,
                  frac_excitatory: float = 0.8, frac_excitatory_in: float = 0.75,
                  noise_sigma: float | None = None, w0: float | None = None) -> NetworkParams:
    """Build an LSNN with n_regular non-adapting and n_adaptive adapting neurons.

    Adaptive neurons occupy the trailing indices. connectivity=None means dense;
    otherwise a fixed fraction of synapses is active (DEEP R-ready). With
    dale=True, weights are sign-constrained per presynaptic neuron.
    """
    n_rec = n_regular + n_adaptive
    if w0 is None:
        w0 = dt  # 1 V * dt / R_m convention, numerically dt in model units
    beta = np.concatenate([np.zeros(n_regular), np.full(n_adaptive, beta_adaptive)])
    neuron = NeuronParams(n=n_rec, tau_m=_sample_range(tau_m, n_rec, rng),
                          tau_a=_sample_range(tau_a, n_rec, rng), beta=beta,
                          b0=b0, refractory=refractory, dt=dt)

    dmin, dmax = delay_range
    d_in = rng.integers(dmin, dmax + 1, size=(n_rec, n_in))
    d_rec = rng.integers(dmin, dmax + 1, size=(n_rec, n_rec))

    if connectivity is None:
        mask_in = np.ones((n_rec, n_in), dtype=bool)
        mask_rec = ~np.eye(n_rec, dtype=bool)
        mask_out = np.ones((n_out, n_rec), dtype=bool)
    else:
        mask_in = sparse_mask((n_rec, n_in), connectivity, rng)
        mask_rec = sparse_mask((n_rec, n_rec), connectivity, rng, exclude_diagonal=True)
        mask_out = sparse_mask((n_out, n_rec), connectivity, rng)

    signs_in = signs_rec = None
    if dale:
        signs_in = sample_signs(n_in, frac_excitatory_in, rng)
        signs_rec = sample_signs(n_rec, frac_excitatory, rng)
        w_in = init_dale(n_rec, n_in, signs_in, w0, rng)
        w_rec = init_dale(n_rec, n_rec, signs_rec, w0, rng)
        w_out = init_dale(n_out, n_rec, signs_rec, w0, rng)
    else:
        w_in = init_gaussian(n_rec, n_in, w0, rng)
        w_rec = init_gaussian(n_rec, n_rec, w0, rng)
        w_out = init_gaussian(n_out, n_rec, w0, rng)

    w_in = np.where(mask_in, w_in, 0.0)
    np.fill_diagonal(w_rec, 0.0)
    w_rec = np.where(mask_rec, w_rec, 0.0)
    w_out = np.where(mask_out, w_out, 0.0)

    ns = np.full(n_rec, noise_sigma) if noise_sigma is not None else None
    return NetworkParams(w_in=w_in, w_rec=w_rec, w_out=w_out, neuron=neuron,
                         d_in=d_in, d_rec=d_rec, mask_in=mask_in, mask_rec=mask_rec,
                         mask_out=mask_out, signs_in=signs_in, signs_rec=signs_rec,
                         tau_out=tau_out, noise_sigma=ns)
