"""Weight initialization: unconstrained Gaussian and sign-constrained (Dale)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class InitSpec:
    scheme: str = "gaussian"        # gaussian | dale
    w0: float = 1.0                 # weight scale; numerically dt in model units
    frac_excitatory: float = 0.8
    connectivity: float = 1.0       # fraction p of possible synapses active

    def __post_init__(self):
        if not 0.0 < self.connectivity <= 1.0:
            raise ValueError("connectivity must be in (0, 1]")
        if not 0.0 <= self.frac_excitatory <= 1.0:
            raise ValueError("frac_excitatory must be in [0, 1]")
        if self.w0 <= 0:
            raise ValueError("w0 must be positive")


def init_gaussian(n_out: int, n_in: int, w0: float, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. entries with std w0 / sqrt(n_in)."""
    if n_in < 1:
        raise ValueError("n_in must be >= 1")
    return rng.standard_normal((n_out, n_in)) * (w0 / np.sqrt(n_in))


def sample_signs(n: int, frac_excitatory: float, rng: np.random.Generator) -> np.ndarray:
    return np.where(rng.random(n) < frac_excitatory, 1, -1).astype(int)


def _zero_row_sums(w: np.ndarray) -> np.ndarray:
    """Rescale each row's sign classes to a common magnitude so the row sums to
    zero; skipped for rows missing one class. Signs are preserved exactly."""
    out = w.copy()
    for r in range(out.shape[0]):
        row = out[r]
        pos = row > 0
        neg = row < 0
        if not pos.any() or not neg.any():
            continue
        p = row[pos].sum()
        q = -row[neg].sum()
        m = 0.5 * (p + q)
        row[pos] *= m / p
        row[neg] *= m / q
    return out


def _spectral_normalize(w: np.ndarray, retries: int = 5, rng=None) -> np.ndarray:
    radius = np.abs(np.linalg.eigvals(w)).max()
    if radius < 1e-12:
        raise np.linalg.LinAlgError("spectral radius numerically zero")
    return w / radius


def init_dale(n_out: int, n_in: int, signs: np.ndarray, w0: float,
              rng: np.random.Generator, max_retries: int = 5) -> np.ndarray:
    """Sign-constrained initialization.

    Entries sampled as kappa_i * |N(0,1)|, rows shifted to zero sum within sign
    classes, the (square) matrix divided by its largest eigenvalue magnitude,
    then scaled by w0. Non-square targets are subsampled from a square matrix;
    subsampled columns are matched by sign class so the delivered column-sign
    pattern equals `signs`.
    """
    signs = np.asarray(signs, dtype=int)
    if signs.shape != (n_in,):
        raise ValueError("signs must have shape (n_in,)")
    m = max(n_out, n_in)
    for attempt in range(max_retries):
        if m == n_in:
            sq_signs = signs
        else:
            frac_pos = float(np.mean(signs == 1))
            extra = sample_signs(m - n_in, frac_pos, rng)
            sq_signs = np.concatenate([signs, extra])
        w = np.abs(rng.standard_normal((m, m))) * sq_signs[None, :]
        w = _zero_row_sums(w)
        try:
            w = _spectral_normalize(w)
        except np.linalg.LinAlgError:
            continue
        rows = rng.choice(m, size=n_out, replace=False) if n_out < m else np.arange(m)
        if n_in < m:
            cols = np.empty(n_in, dtype=int)
            for sign in (1, -1):
                want = np.flatnonzero(signs == sign)
                have = np.flatnonzero(sq_signs == sign)
                cols[want] = rng.choice(have, size=want.size, replace=False)
        else:
            cols = np.arange(m)
        return w0 * w[np.ix_(rows, cols)]
    raise np.linalg.LinAlgError("init_dale: could not produce a non-degenerate matrix")


def sparse_mask(shape: tuple[int, int], p: float, rng: np.random.Generator,
                exclude_diagonal: bool = False) -> np.ndarray:
    """Binary mask with exactly round(p * n_entries) active positions chosen
    uniformly without replacement (diagonal excluded for recurrent masks)."""
    if not 0.0 < p <= 1.0:
        raise ValueError("p must be in (0, 1]")
    n_total = shape[0] * shape[1]
    k = int(round(p * n_total))
    allowed = np.ones(shape, dtype=bool)
    if exclude_diagonal:
        np.fill_diagonal(allowed, False)
    idx = np.flatnonzero(allowed.ravel())
    k = min(k, idx.size)
    chosen = rng.choice(idx, size=k, replace=False)
    mask = np.zeros(n_total, dtype=bool)
    mask[chosen] = True
    return mask.reshape(shape)
