"""Discrete-time simulation of recurrent spiking networks with adaptive thresholds.

State layout convention: index ``s`` runs over network states 0..T, where state 0
is the initial condition and state s+1 is produced from input step s. Within one
step the order is: synaptic current from past spikes -> membrane decay + reset ->
spike decision (threshold from the pre-update adaptation state) -> adaptation
update with the new spike -> readout update.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ConfigurationError(ValueError):
    """Raised for structurally invalid network parameters."""


class SimulationDivergedError(RuntimeError):
    """Raised when a state variable becomes non-finite during simulation."""


def _as_vector(x, n, name):
    arr = np.broadcast_to(np.asarray(x, dtype=float), (n,)).copy()
    return arr


@dataclass
class NeuronParams:
    """Per-neuron constants of the adaptive LIF model.

    Membrane resistance is folded into the weights (w0 convention), so currents
    and voltages share model units and no R_m field exists.
    """

    n: int
    tau_m: float | np.ndarray = 20.0   # ms
    tau_a: float | np.ndarray = 700.0  # ms
    beta: float | np.ndarray = 0.0     # 0 for regular neurons
    b0: float = 0.01
    refractory: float = 0.0            # ms
    dt: float = 1.0                    # ms

    def __post_init__(self):
        self.tau_m = _as_vector(self.tau_m, self.n, "tau_m")
        self.tau_a = _as_vector(self.tau_a, self.n, "tau_a")
        self.beta = _as_vector(self.beta, self.n, "beta")
        if np.any(self.tau_m <= 0) or np.any(self.tau_a <= 0):
            raise ConfigurationError("tau_m and tau_a must be positive")
        if self.dt <= 0:
            raise ConfigurationError("dt must be positive")
        if self.b0 <= 0:
            raise ConfigurationError("b0 must be positive")
        if np.any(self.beta < 0):
            raise ConfigurationError("beta must be non-negative")
        if self.refractory < 0:
            raise ConfigurationError("refractory must be non-negative")

    @property
    def alpha(self) -> np.ndarray:
        return np.exp(-self.dt / self.tau_m)

    @property
    def rho(self) -> np.ndarray:
        return np.exp(-self.dt / self.tau_a)

    @property
    def n_refractory_steps(self) -> int:
        return int(np.ceil(self.refractory / self.dt))


@dataclass
class NetworkParams:
    """All trainable and static parameters of one network."""

    w_in: np.ndarray        # (n_rec, n_in)
    w_rec: np.ndarray       # (n_rec, n_rec), zero diagonal
    w_out: np.ndarray       # (n_out, n_rec)
    neuron: NeuronParams
    d_in: np.ndarray | None = None   # integer delays (steps of dt)
    d_rec: np.ndarray | None = None
    mask_in: np.ndarray | None = None
    mask_rec: np.ndarray | None = None
    mask_out: np.ndarray | None = None
    signs_in: np.ndarray | None = None   # +-1 per input neuron (Dale)
    signs_rec: np.ndarray | None = None  # +-1 per recurrent neuron (Dale)
    tau_out: float = 20.0   # ms; np.inf = pure accumulator
    noise_sigma: np.ndarray | None = None  # per-neuron current noise std (trainable)

    def __post_init__(self):
        self.w_in = np.asarray(self.w_in, dtype=float)
        self.w_rec = np.asarray(self.w_rec, dtype=float)
        self.w_out = np.asarray(self.w_out, dtype=float)
        n_rec, n_in = self.w_in.shape
        if self.w_rec.shape != (n_rec, n_rec):
            raise ConfigurationError("w_rec must be square (n_rec x n_rec)")
        if self.w_out.shape[1] != n_rec:
            raise ConfigurationError("w_out must have n_rec columns")
        if self.d_in is None:
            self.d_in = np.zeros((n_rec, n_in), dtype=int)
        if self.d_rec is None:
            self.d_rec = np.zeros((n_rec, n_rec), dtype=int)
        self.d_in = np.asarray(self.d_in, dtype=int)
        self.d_rec = np.asarray(self.d_rec, dtype=int)
        if self.d_in.shape != self.w_in.shape or self.d_rec.shape != self.w_rec.shape:
            raise ConfigurationError("delay matrices must match weight shapes")
        if np.any(self.d_in < 0) or np.any(self.d_rec < 0):
            raise ConfigurationError("delays must be non-negative integers")
        if self.mask_in is None:
            self.mask_in = np.ones_like(self.w_in, dtype=bool)
        if self.mask_rec is None:
            self.mask_rec = ~np.eye(n_rec, dtype=bool)
        if self.mask_out is None:
            self.mask_out = np.ones_like(self.w_out, dtype=bool)
        self.mask_in = np.asarray(self.mask_in, dtype=bool)
        self.mask_rec = np.asarray(self.mask_rec, dtype=bool)
        self.mask_out = np.asarray(self.mask_out, dtype=bool)
        if np.any(np.diag(self.mask_rec)):
            raise ConfigurationError("recurrent mask must exclude the diagonal")
        if np.any(np.diag(self.w_rec) != 0.0):
            raise ConfigurationError("w_rec must have a zero diagonal")
        for w, m, name in ((self.w_in, self.mask_in, "w_in"),
                           (self.w_rec, self.mask_rec, "w_rec"),
                           (self.w_out, self.mask_out, "w_out")):
            if np.any(w[~m] != 0.0):
                raise ConfigurationError(f"masked-out entries of {name} must be zero")
        if self.neuron.n != n_rec:
            raise ConfigurationError("neuron parameter count must equal n_rec")
        if self.noise_sigma is not None:
            self.noise_sigma = np.asarray(self.noise_sigma, dtype=float)
            if self.noise_sigma.shape != (n_rec,):
                raise ConfigurationError("noise_sigma must have shape (n_rec,)")
        if self.signs_in is not None:
            self.signs_in = np.asarray(self.signs_in)
            self._check_dale(self.w_in, self.signs_in, "w_in")
        if self.signs_rec is not None:
            self.signs_rec = np.asarray(self.signs_rec)
            self._check_dale(self.w_rec, self.signs_rec, "w_rec")
            self._check_dale(self.w_out, self.signs_rec, "w_out")

    @staticmethod
    def _check_dale(w, signs, name):
        if np.any(w * signs[None, :] < 0):
            raise ConfigurationError(f"{name} violates the presynaptic sign constraint")

    @property
    def n_in(self) -> int:
        return self.w_in.shape[1]

    @property
    def n_rec(self) -> int:
        return self.w_in.shape[0]

    @property
    def n_out(self) -> int:
        return self.w_out.shape[0]

    @property
    def max_delay(self) -> int:
        return int(max(self.d_in.max(initial=0), self.d_rec.max(initial=0)))

    @property
    def kappa_out(self) -> float:
        if np.isinf(self.tau_out):
            return 1.0
        return float(np.exp(-self.neuron.dt / self.tau_out))

    def delay_groups(self, which: str):
        """Per-delay masked weight slices [(d, W * (delay==d) * mask), ...]."""
        w = getattr(self, f"w_{which}")
        d = getattr(self, f"d_{which}")
        m = getattr(self, f"mask_{which}")
        groups = []
        for dv in np.unique(d[m]) if m.any() else []:
            sel = (d == int(dv)) & m
            groups.append((int(dv), np.where(sel, w, 0.0)))
        return groups

    def delay_masks(self, which: str):
        """Per-delay boolean masks [(d, (delay==d) & mask), ...]."""
        d = getattr(self, f"d_{which}")
        m = getattr(self, f"mask_{which}")
        return [(int(dv), (d == int(dv)) & m) for dv in (np.unique(d[m]) if m.any() else [])]

    def trainable(self) -> dict[str, np.ndarray]:
        out = {"w_in": self.w_in, "w_rec": self.w_rec, "w_out": self.w_out}
        if self.noise_sigma is not None:
            out["noise_sigma"] = self.noise_sigma
        return out


@dataclass
class NetworkState:
    """Per-step dynamic state. Arrays carry a leading batch axis."""

    V: np.ndarray
    b: np.ndarray
    refrac_count: np.ndarray
    z: np.ndarray
    y: np.ndarray

    @classmethod
    def zeros(cls, batch: int, n_rec: int, n_out: int) -> "NetworkState":
        return cls(
            V=np.zeros((batch, n_rec)),
            b=np.zeros((batch, n_rec)),
            refrac_count=np.zeros((batch, n_rec), dtype=int),
            z=np.zeros((batch, n_rec)),
            y=np.zeros((batch, n_out)),
        )


@dataclass
class SimTape:
    """Recorded forward trajectory; everything the backward pass needs.

    State arrays have T+1 entries (index 0 = initial state); per-step arrays
    (I, B_dec, blocked, eps) have T entries, aligned with input step t.
    B_dec[t] is the threshold b0 + beta*b(t) used both for the reset at step t
    and for the spike decision producing z(t+1). blocked[t] marks neurons whose
    spike at t+1 was suppressed by refractoriness.
    """

    x: np.ndarray
    V: np.ndarray
    b: np.ndarray
    z: np.ndarray
    y: np.ndarray
    I: np.ndarray
    B_dec: np.ndarray
    blocked: np.ndarray
    eps: np.ndarray | None = None

    @property
    def T(self) -> int:
        return self.x.shape[1]

    @property
    def batch(self) -> int:
        return self.x.shape[0]


def synaptic_current(params: NetworkParams, x_hist: np.ndarray, z_hist: np.ndarray,
                     t: int, in_groups=None, rec_groups=None) -> np.ndarray:
    """Delayed weighted sum of input and recurrent spikes at step t.

    x_hist: (batch, T, n_in) input spikes/values; z_hist: (batch, >=t+1, n_rec)
    spike history including the initial state at index 0. Spikes before step 0
    contribute nothing.
    """
    if in_groups is None:
        in_groups = params.delay_groups("in")
    if rec_groups is None:
        rec_groups = params.delay_groups("rec")
    batch = x_hist.shape[0]
    I = np.zeros((batch, params.n_rec))
    for d, w in in_groups:
        if t - d >= 0:
            I += x_hist[:, t - d] @ w.T
    for d, w in rec_groups:
        if t - d >= 0:
            I += z_hist[:, t - d] @ w.T
    return I


def membrane_step(state: NetworkState, I: np.ndarray, params: NetworkParams) -> NetworkState:
    """One voltage/threshold/spike update; raises on non-finite state."""
    nr = params.neuron
    alpha, rho, dt = nr.alpha, nr.rho, nr.dt
    B = nr.b0 + nr.beta * state.b
    V_new = alpha * state.V + (1.0 - alpha) * I - B * state.z * dt
    if not np.isfinite(V_new).all():
        bad = np.argwhere(~np.isfinite(V_new))
        raise SimulationDivergedError(f"non-finite membrane voltage, neuron index {bad[0].tolist()}")
    able = state.refrac_count == 0
    z_new = (able & (V_new >= B)).astype(float)
    b_new = rho * state.b + (1.0 - rho) * z_new
    if not np.isfinite(b_new).all():
        bad = np.argwhere(~np.isfinite(b_new))
        raise SimulationDivergedError(f"non-finite threshold state, neuron index {bad[0].tolist()}")
    refrac_new = np.where(z_new > 0, nr.n_refractory_steps,
                          np.maximum(state.refrac_count - 1, 0))
    return NetworkState(V=V_new, b=b_new, refrac_count=refrac_new, z=z_new, y=state.y)


def readout_step(y: np.ndarray, z: np.ndarray, params: NetworkParams) -> np.ndarray:
    """Leaky readout integration: decay plus instantaneous spike contribution."""
    return params.kappa_out * y + z @ params.w_out.T


def simulate(params: NetworkParams, input_spikes: np.ndarray, *, record: bool = False,
             rng: np.random.Generator | None = None, noise_eps: np.ndarray | None = None,
             initial_state: NetworkState | None = None):
    """Run the network over T input steps.

    input_spikes: (T, n_in) or (batch, T, n_in); binary spikes or analog values.
    Returns (raster, readout_trace, tape). raster is (batch, T, n_rec) with
    raster[:, t] = spikes produced by input step t; readout_trace is aligned the
    same way. tape is None unless record=True. Gaussian current noise with std
    noise_sigma is added when the parameter is configured; pass noise_eps to
    replay stored draws, otherwise rng must be provided. Deterministic given
    the rng seed. The leading batch axis is dropped again for 2-D input.
    """
    x = np.asarray(input_spikes, dtype=float)
    squeeze = x.ndim == 2
    if squeeze:
        x = x[None]
    batch, T, n_in = x.shape
    if T < 1:
        raise ConfigurationError("input must have at least one step")
    if n_in != params.n_in:
        raise ConfigurationError(f"input has {n_in} channels, network expects {params.n_in}")
    n, n_out = params.n_rec, params.n_out
    nr = params.neuron

    eps = None
    if params.noise_sigma is not None:
        if noise_eps is not None:
            eps = np.asarray(noise_eps, dtype=float)
            if squeeze and eps.ndim == 2:
                eps = eps[None]
        else:
            if rng is None:
                raise ConfigurationError("noise_sigma configured: pass rng or noise_eps")
            eps = rng.standard_normal((batch, T, n))

    in_groups = params.delay_groups("in")
    rec_groups = params.delay_groups("rec")

    # input-driven currents have no feedback; precompute them in bulk
    I_in = np.zeros((batch, T, n))
    for d, w in in_groups:
        contrib = x @ w.T
        if d == 0:
            I_in += contrib
        else:
            I_in[:, d:] += contrib[:, :T - d]

    state = initial_state if initial_state is not None else NetworkState.zeros(batch, n, n_out)
    y_init = state.y.copy()
    z_hist = np.zeros((batch, T + 1, n))
    z_hist[:, 0] = state.z
    y_trace = np.zeros((batch, T, n_out))
    if record:
        V_hist = np.zeros((batch, T + 1, n))
        b_hist = np.zeros((batch, T + 1, n))
        I_hist = np.zeros((batch, T, n))
        B_hist = np.zeros((batch, T, n))
        blocked = np.zeros((batch, T, n), dtype=bool)
        V_hist[:, 0] = state.V
        b_hist[:, 0] = state.b

    for t in range(T):
        I = I_in[:, t].copy()
        for d, w in rec_groups:
            if t - d >= 0:
                I += z_hist[:, t - d] @ w.T
        if eps is not None:
            I += params.noise_sigma * eps[:, t]
        if record:
            I_hist[:, t] = I
            B_hist[:, t] = nr.b0 + nr.beta * state.b
            blocked[:, t] = state.refrac_count > 0
        try:
            state = membrane_step(state, I, params)
        except SimulationDivergedError as exc:
            raise SimulationDivergedError(f"step {t}: {exc}") from None
        state.y = readout_step(state.y, state.z, params)
        z_hist[:, t + 1] = state.z
        y_trace[:, t] = state.y
        if record:
            V_hist[:, t + 1] = state.V
            b_hist[:, t + 1] = state.b

    raster = z_hist[:, 1:]
    tape = None
    if record:
        tape = SimTape(x=x, V=V_hist, b=b_hist, z=z_hist,
                       y=np.concatenate([y_init[:, None, :], y_trace], axis=1),
                       I=I_hist, B_dec=B_hist, blocked=blocked, eps=eps)
    if squeeze:
        raster = raster[0]
        y_trace = y_trace[0]
    return raster, y_trace, tape
