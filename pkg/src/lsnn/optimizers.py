"""Adam (optionally AMSGrad) and the step-decay learning-rate schedule."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class LrSchedule:
    initial: float = 0.01
    factor: float = 1.0
    interval: int = 1

    def __post_init__(self):
        if not 0.0 < self.factor <= 1.0:
            raise ValueError("decay factor must be in (0, 1]")
        if self.interval < 1:
            raise ValueError("decay interval must be >= 1")


def lr_at(schedule: LrSchedule, iteration: int) -> float:
    if iteration < 0:
        raise ValueError("iteration must be >= 0")
    return schedule.initial * schedule.factor ** (iteration // schedule.interval)


@dataclass
class AdamState:
    """Moment accumulators for a named set of trainable arrays."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    vmax: dict[str, np.ndarray] | None
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    amsgrad: bool = False

    @classmethod
    def init(cls, params: dict[str, np.ndarray], *, beta1=0.9, beta2=0.999,
             eps=1e-8, amsgrad=False) -> "AdamState":
        zeros = lambda: {k: np.zeros_like(p) for k, p in params.items()}
        return cls(m=zeros(), v=zeros(), vmax=zeros() if amsgrad else None,
                   beta1=beta1, beta2=beta2, eps=eps, amsgrad=amsgrad)

    def reset_coords(self, name: str, where: np.ndarray) -> None:
        """Zero the moments of reactivated coordinates (DEEP R contract)."""
        self.m[name][where] = 0.0
        self.v[name][where] = 0.0
        if self.vmax is not None:
            self.vmax[name][where] = 0.0


def adam_step(state: AdamState, grads: dict[str, np.ndarray],
              params: dict[str, np.ndarray], lr: float,
              active: dict[str, np.ndarray] | None = None) -> dict[str, np.ndarray]:
    """Bias-corrected Adam update; returns new parameter arrays.

    Coordinates masked dormant (active[name] == False) are skipped entirely:
    neither their value nor their moments move. Mutates state in place.
    """
    for g in grads.values():
        if not np.isfinite(g).all():
            raise ValueError("non-finite gradient passed to adam_step")
    state.step += 1
    t = state.step
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t
    out = {}
    for name, p in params.items():
        g = grads[name]
        mask = active.get(name) if active is not None else None
        m, v = state.m[name], state.v[name]
        m_new = state.beta1 * m + (1.0 - state.beta1) * g
        v_new = state.beta2 * v + (1.0 - state.beta2) * g * g
        if mask is not None:
            m_new = np.where(mask, m_new, m)
            v_new = np.where(mask, v_new, v)
        state.m[name], state.v[name] = m_new, v_new
        denom_v = v_new
        if state.amsgrad:
            vm = np.maximum(state.vmax[name], v_new)
            if mask is not None:
                vm = np.where(mask, vm, state.vmax[name])
            state.vmax[name] = vm
            denom_v = vm
        update = lr * (m_new / c1) / (np.sqrt(denom_v / c2) + state.eps)
        if mask is not None:
            update = np.where(mask, update, 0.0)
        out[name] = p - update
    return out
