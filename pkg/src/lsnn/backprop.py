"""Reverse-mode backpropagation through the unrolled network dynamics.

The spike nonlinearity's derivative is the dampened pseudo-derivative; the
reset term and the threshold-adaptation recurrence are differentiated exactly,
so gradients flow through the adaptation state across many steps without
dampening. Delayed synapses route cotangents to the matching earlier step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import NetworkParams, SimTape


class GradientError(RuntimeError):
    """Raised when a non-finite cotangent appears."""


@dataclass
class Gradients:
    """Loss cotangents for every trainable parameter.

    Entries at masked-out weight positions are reported as computed by the
    chain rule; consumers (DEEP R / Adam) restrict themselves to active ones.
    """

    dw_in: np.ndarray
    dw_rec: np.ndarray
    dw_out: np.ndarray
    d_noise_sigma: np.ndarray | None = None

    def as_dict(self) -> dict[str, np.ndarray]:
        out = {"w_in": self.dw_in, "w_rec": self.dw_rec, "w_out": self.dw_out}
        if self.d_noise_sigma is not None:
            out["noise_sigma"] = self.d_noise_sigma
        return out

    def __add__(self, other: "Gradients") -> "Gradients":
        ns = None
        if self.d_noise_sigma is not None:
            ns = self.d_noise_sigma + other.d_noise_sigma
        return Gradients(self.dw_in + other.dw_in, self.dw_rec + other.dw_rec,
                         self.dw_out + other.dw_out, ns)


def pseudo_derivative(v_norm: np.ndarray, gamma: float) -> np.ndarray:
    """Dampened triangular surrogate gradient of the spike w.r.t. v_norm."""
    return gamma * np.maximum(0.0, 1.0 - np.abs(v_norm))


def backward(tape: SimTape, params: NetworkParams, *, g_y: np.ndarray | None = None,
             g_z: np.ndarray | None = None, gamma: float = 0.3,
             reset_gradient: bool = True) -> Gradients:
    """Propagate readout/spike cotangents back to the trainable parameters.

    g_y, g_z: (batch, T, n_out) / (batch, T, n_rec) seeds, aligned with the
    raster/readout rows (dL/dy(t+1), dL/dz(t+1)). Loss functions own any batch
    normalization; this is the raw chain rule, summed over the batch.
    """
    nr = params.neuron
    batch, T = tape.batch, tape.T
    n, n_out = params.n_rec, params.n_out
    alpha, rho, beta, dt = nr.alpha, nr.rho, nr.beta, nr.dt
    kappa = params.kappa_out

    lam_y = np.zeros((batch, T + 1, n_out))
    lam_z = np.zeros((batch, T + 1, n))
    lam_b = np.zeros((batch, T + 1, n))
    lam_V = np.zeros((batch, T + 1, n))
    lam_I = np.zeros((batch, T, n))
    if g_y is not None:
        if g_y.ndim == 2:
            g_y = g_y[None]
        lam_y[:, 1:] += g_y
    if g_z is not None:
        if g_z.ndim == 2:
            g_z = g_z[None]
        lam_z[:, 1:] += g_z

    rec_groups = params.delay_groups("rec")
    in_masks = params.delay_masks("in")
    rec_masks = params.delay_masks("rec")

    # pseudo-derivative of z(t+1) w.r.t. v_norm(t+1); zero inside refractoriness
    with np.errstate(invalid="ignore"):
        v_norm = (tape.V[:, 1:] - tape.B_dec) / tape.B_dec
    pd = pseudo_derivative(v_norm, gamma)
    pd[tape.blocked] = 0.0

    for t in range(T - 1, -1, -1):
        s = t + 1
        ly = lam_y[:, s]
        # readout: y(s) = kappa*y(t) + W_out z(s)
        lam_y[:, t] += kappa * ly
        lam_z[:, s] += ly @ params.w_out
        # adaptation: b(s) = rho*b(t) + (1-rho)*z(s)
        lam_z[:, s] += (1.0 - rho) * lam_b[:, s]
        lam_b[:, t] += rho * lam_b[:, s]
        # spike: z(s) = H((V(s) - B(t)) / B(t)), B(t) = b0 + beta*b(t)
        lz = lam_z[:, s]
        B = tape.B_dec[:, t]
        lam_V[:, s] += pd[:, t] / B * lz
        lam_B = pd[:, t] * (-tape.V[:, s] / (B * B)) * lz
        # membrane: V(s) = alpha*V(t) + (1-alpha)*I(t) - B(t)*z(t)*dt
        lV = lam_V[:, s]
        lam_V[:, t] += alpha * lV
        lI = (1.0 - alpha) * lV
        if reset_gradient:
            lam_B += -(tape.z[:, t] * dt) * lV
            lam_z[:, t] += -(B * dt) * lV
        lam_b[:, t] += beta * lam_B
        lam_I[:, t] = lI
        # delayed recurrent synapses route cotangents to earlier spikes
        for d, w in rec_groups:
            if t - d >= 1:
                lam_z[:, t - d] += lI @ w

    # weight cotangents as single BLAS contractions over (batch, time)
    bt = ([0, 1], [0, 1])
    dw_out = np.tensordot(lam_y[:, 1:], tape.z[:, 1:], axes=bt)
    d_sigma = None
    if params.noise_sigma is not None:
        d_sigma = np.einsum("btj,btj->j", lam_I, tape.eps) \
            if tape.eps is not None else np.zeros(n)
    dw_in = np.zeros_like(params.w_in)
    for d, m in in_masks:
        acc = np.tensordot(lam_I[:, d:], tape.x[:, :T - d], axes=bt)
        dw_in += np.where(m, acc, 0.0)
    dw_rec = np.zeros_like(params.w_rec)
    for d, m in rec_masks:
        acc = np.tensordot(lam_I[:, d:], tape.z[:, :T - d], axes=bt)
        dw_rec += np.where(m, acc, 0.0)

    grads = Gradients(dw_in=dw_in, dw_rec=dw_rec, dw_out=dw_out, d_noise_sigma=d_sigma)
    for name, g in grads.as_dict().items():
        if not np.isfinite(g).all():
            raise GradientError(f"non-finite gradient in {name}")
    return grads
