"""DEEP R rewiring: fixed connectivity level and fixed synapse signs during training.

Active weights take the optimizer step plus an L1 pull toward zero (and optional
temperature noise); any weight whose candidate value crosses zero against its
presynaptic sign goes dormant (exactly 0), and for each dormancy event one
dormant coordinate is reactivated uniformly at random with magnitude 0,
restoring the exact active count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backprop import Gradients
from .network import NetworkParams
from .optimizers import AdamState, adam_step


class RewireInvariantError(RuntimeError):
    """Raised when no dormant coordinate is available for reactivation."""


@dataclass
class RewireConfig:
    l1_coeff: float = 0.01
    temperature: float = 0.0
    target_connectivity: float = 0.12

    def __post_init__(self):
        if self.l1_coeff < 0 or self.temperature < 0:
            raise ValueError("l1_coeff and temperature must be >= 0")
        if not 0.0 < self.target_connectivity <= 1.0:
            raise ValueError("target_connectivity must be in (0, 1]")


_PRESYN_SIGNS = {"w_in": "signs_in", "w_rec": "signs_rec", "w_out": "signs_rec"}


def _allowed(params: NetworkParams, name: str) -> np.ndarray:
    allowed = np.ones(getattr(params, name).shape, dtype=bool)
    if name == "w_rec":
        np.fill_diagonal(allowed, False)
    return allowed


def deepr_step(params: NetworkParams, grads: Gradients, cfg: RewireConfig,
               lr: float, rng: np.random.Generator,
               adam: AdamState | None = None,
               matrices: tuple[str, ...] = ("w_in", "w_rec", "w_out"),
               budget: str = "per-matrix",
               also_update: tuple[str, ...] = ()) -> NetworkParams:
    """One combined optimizer + rewiring update; mutates params (and adam) in place.

    The L1 term and the sign test apply to the post-Adam candidate value; Adam
    moments of reactivated coordinates are reset to zero. budget="global" pools
    reactivation candidates across all rewired matrices. Names in also_update
    (e.g. noise_sigma) take the same optimizer step without rewiring.
    """
    if budget not in ("per-matrix", "global"):
        raise ValueError("budget must be 'per-matrix' or 'global'")
    gdict = grads.as_dict()
    pdict = params.trainable()
    masks = {name: getattr(params, f"mask_{name[2:]}") for name in matrices}
    names = tuple(matrices) + tuple(also_update)
    if adam is not None:
        cand = adam_step(adam, {n: gdict[n] for n in names},
                         {n: pdict[n] for n in names}, lr,
                         active={n: masks[n] for n in matrices})
    else:
        cand = {n: pdict[n] - lr * (np.where(masks[n], gdict[n], 0.0)
                                    if n in masks else gdict[n]) for n in names}
    for n in also_update:
        pdict[n][...] = cand[n]

    events = {}
    for name in matrices:
        signs_vec = getattr(params, _PRESYN_SIGNS[name])
        if signs_vec is None:
            raise ValueError(f"DEEP R on {name} requires presynaptic signs")
        kappa = np.broadcast_to(np.asarray(signs_vec)[None, :], cand[name].shape)
        w_old = pdict[name]
        mask = masks[name]
        c = cand[name]
        c = np.where(mask, c - lr * cfg.l1_coeff * np.sign(w_old), c)
        if cfg.temperature > 0:
            noise = rng.standard_normal(c.shape) * np.sqrt(2.0 * lr * cfg.temperature)
            c = np.where(mask, c + noise, c)
        dormant_new = mask & (c * kappa < 0)
        c = np.where(dormant_new, 0.0, c)
        c = np.where(mask | dormant_new, c, 0.0)  # keep dormant coords exactly 0
        mask &= ~dormant_new
        if adam is not None:
            adam.reset_coords(name, dormant_new)
        w_old[...] = np.where(mask, c, 0.0)
        events[name] = int(dormant_new.sum())

    if budget == "per-matrix":
        for name in matrices:
            _reactivate(params, adam, name, events[name], rng)
    else:
        total = sum(events.values())
        _reactivate_global(params, adam, matrices, total, rng)
    return params


def _reactivate(params: NetworkParams, adam: AdamState | None, name: str,
                n_events: int, rng: np.random.Generator) -> None:
    if n_events == 0:
        return
    mask = getattr(params, f"mask_{name[2:]}")
    dormant = _allowed(params, name) & ~mask
    idx = np.flatnonzero(dormant.ravel())
    if idx.size < n_events:
        raise RewireInvariantError(f"no dormant coordinates left to reactivate in {name}")
    chosen = rng.choice(idx, size=n_events, replace=False)
    flat = np.zeros(mask.size, dtype=bool)
    flat[chosen] = True
    picked = flat.reshape(mask.shape)
    mask |= picked
    getattr(params, name)[picked] = 0.0
    if adam is not None:
        adam.reset_coords(name, picked)


def _reactivate_global(params: NetworkParams, adam: AdamState | None,
                       matrices: tuple[str, ...], n_events: int,
                       rng: np.random.Generator) -> None:
    if n_events == 0:
        return
    pools = []
    for name in matrices:
        mask = getattr(params, f"mask_{name[2:]}")
        dormant = _allowed(params, name) & ~mask
        for flat_idx in np.flatnonzero(dormant.ravel()):
            pools.append((name, flat_idx))
    if len(pools) < n_events:
        raise RewireInvariantError("no dormant coordinates left to reactivate")
    chosen = rng.choice(len(pools), size=n_events, replace=False)
    for ci in chosen:
        name, flat_idx = pools[ci]
        mask = getattr(params, f"mask_{name[2:]}")
        pos = np.unravel_index(flat_idx, mask.shape)
        mask[pos] = True
        getattr(params, name)[pos] = 0.0
        if adam is not None:
            sel = np.zeros(mask.shape, dtype=bool)
            sel[pos] = True
            adam.reset_coords(name, sel)


def active_count(params: NetworkParams, name: str) -> int:
    return int(getattr(params, f"mask_{name[2:]}").sum())
