"""Supervised task harnesses: sequential pixel classification, a delayed-cue
memory task, and learning-to-learn regression from a teacher (target-network
and sinus families) with the linear-ridge and feed-forward-backprop baselines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backprop import Gradients, backward
from .builders import build_network
from .encoders import (ThresholdCodeSpec, encode_threshold_sequence,
                       l2l_tuning_spec, presentation_cue)
from .losses import firing_rate_regularizer, loss_crossentropy_avg, loss_mse, softmax
from .network import NetworkParams, simulate
from .optimizers import AdamState, LrSchedule, adam_step, lr_at
from .rewiring import RewireConfig, deepr_step


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


# ---------------------------------------------------------------------------
# task families for learning-to-learn

@dataclass
class TargetNetwork:
    """2-10-1 sigmoidal network; 30 weights and 10 biases, all in [-1, 1]."""

    w_hidden: np.ndarray   # (10, 2)
    b_hidden: np.ndarray   # (10,)
    w_out: np.ndarray      # (10,)

    input_ranges = ((-1.0, 1.0), (-1.0, 1.0))
    teacher_range = (0.0, 1.0)

    def sample_input(self, rng):
        return rng.uniform(-1.0, 1.0, size=2)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        h = _sigmoid(self.w_hidden @ x + self.b_hidden)
        return float(_sigmoid(self.w_out @ h))


def gen_target_network(rng: np.random.Generator) -> TargetNetwork:
    return TargetNetwork(w_hidden=rng.uniform(-1, 1, size=(10, 2)),
                         b_hidden=rng.uniform(-1, 1, size=10),
                         w_out=rng.uniform(-1, 1, size=10))


def eval_tn(tn: TargetNetwork, x1: float, x2: float) -> float:
    return tn.eval([x1, x2])


@dataclass
class SinusTask:
    amplitude: float   # [0.1, 5]
    phase: float       # [0, pi]

    input_ranges = ((-5.0, 5.0),)
    teacher_range = (-5.0, 5.0)

    def sample_input(self, rng):
        return rng.uniform(-5.0, 5.0, size=1)

    def eval(self, x):
        return float(self.amplitude * np.sin(self.phase + np.asarray(x).ravel()[0]))


def gen_sinus_task(rng: np.random.Generator) -> SinusTask:
    return SinusTask(amplitude=rng.uniform(0.1, 5.0), phase=rng.uniform(0.0, np.pi))


def eval_sinus(task: SinusTask, x: float) -> float:
    return task.eval([x])


TASK_FAMILIES = {"sinus": gen_sinus_task, "tn": gen_target_network}


# ---------------------------------------------------------------------------
# learning-to-learn episodes

@dataclass
class L2LEpisode:
    """One inner-loop episode: encoded spike inputs plus the aligned targets.

    The teacher channel at step k carries the target of step k-1 (0 at the
    first step).
    """

    inputs: np.ndarray        # (n_steps * step_ms, n_in) spikes
    xs: np.ndarray            # (n_steps, d) raw input points
    targets: np.ndarray       # (n_steps,)
    prev_targets: np.ndarray  # (n_steps,) teacher channel values
    step_ms: int


def build_l2l_episode(task, n_steps: int, rng: np.random.Generator, *,
                      step_ms: int = 20, neurons_per_channel: int = 100,
                      r_max: float = 200.0, dt: float = 1.0) -> L2LEpisode:
    xs = np.stack([task.sample_input(rng) for _ in range(n_steps)])
    targets = np.array([task.eval(x) for x in xs])
    prev = np.concatenate([[0.0], targets[:-1]])
    blocks = []
    for dim, (lo, hi) in enumerate(task.input_ranges):
        spec = l2l_tuning_spec(lo, hi, n_neurons=neurons_per_channel, r_max=r_max, dt=dt)
        p = spec.probabilities(xs[:, dim])                        # (S, n)
        p = np.repeat(p, step_ms, axis=0)                         # (S*step_ms, n)
        blocks.append((rng.random(p.shape) < p).astype(float))
    lo, hi = task.teacher_range
    spec = l2l_tuning_spec(lo, hi, n_neurons=neurons_per_channel, r_max=r_max, dt=dt)
    p = np.repeat(spec.probabilities(prev), step_ms, axis=0)
    blocks.append((rng.random(p.shape) < p).astype(float))
    return L2LEpisode(inputs=np.concatenate(blocks, axis=1), xs=xs, targets=targets,
                      prev_targets=prev, step_ms=step_ms)


def window_spike_means(raster: np.ndarray, step_ms: int) -> np.ndarray:
    """Per-window mean firing (spike count / step_ms); raster (B, T, n) -> (B, S, n)."""
    b, t, n = raster.shape
    s = t // step_ms
    return raster[:, :s * step_ms].reshape(b, s, step_ms, n).mean(axis=2)


def l2l_predictions(params: NetworkParams, raster: np.ndarray, step_ms: int) -> np.ndarray:
    """Readout = weighted mean firing rate over each step's window."""
    squeeze = raster.ndim == 2
    if squeeze:
        raster = raster[None]
    pred = window_spike_means(raster, step_ms) @ params.w_out[0]
    return pred[0] if squeeze else pred


def _l2l_loss_seeds(params, raster, targets, step_ms, rate_coeff, rate_target, dt,
                    rate_mode="average"):
    means = window_spike_means(raster, step_ms)
    pred = means @ params.w_out[0]
    mse, dpred = loss_mse(pred, targets)
    # spike seeds through the readout weights, spread evenly over the window
    g_z_win = dpred[:, :, None] * params.w_out[0][None, None, :] / step_ms
    g_z = np.repeat(g_z_win, step_ms, axis=1)
    if g_z.shape[1] < raster.shape[1]:
        pad = np.zeros((g_z.shape[0], raster.shape[1] - g_z.shape[1], g_z.shape[2]))
        g_z = np.concatenate([g_z, pad], axis=1)
    dw_out = np.zeros_like(params.w_out)
    dw_out[0] = np.einsum("bs,bsn->n", dpred, means)
    rate_val = 0.0
    if rate_coeff > 0:
        if rate_mode == "average":
            # squared deviation of the population-average rate from the target
            avg_hz = raster.mean() * 1000.0 / dt
            rate_val = (avg_hz - rate_target) ** 2
            g_zr = np.full(raster.shape,
                           2.0 * (avg_hz - rate_target) * 1000.0 / (dt * raster.size))
        elif rate_mode == "per-neuron":
            rate_val, g_zr = firing_rate_regularizer(raster, rate_target, dt)
        else:
            raise ValueError("rate_mode must be 'average' or 'per-neuron'")
        g_z = g_z + rate_coeff * g_zr
    return mse, rate_val, g_z, dw_out


def apply_update(params: NetworkParams, grads: Gradients, adam: AdamState, lr: float,
                 rewire_cfg: RewireConfig | None, rng: np.random.Generator,
                 train_noise: bool = False) -> None:
    """One optimizer step, with DEEP R when a rewiring config is given."""
    extra = ("noise_sigma",) if (train_noise and params.noise_sigma is not None) else ()
    if rewire_cfg is not None:
        deepr_step(params, grads, rewire_cfg, lr, rng, adam=adam, also_update=extra)
    else:
        names = ("w_in", "w_rec", "w_out") + extra
        active = {"w_in": params.mask_in, "w_rec": params.mask_rec, "w_out": params.mask_out}
        pdict = params.trainable()
        new = adam_step(adam, {n: grads.as_dict()[n] for n in names},
                        {n: pdict[n] for n in names}, lr, active=active)
        for n in names:
            pdict[n][...] = new[n]


def train_l2l_outer(*, family: str = "sinus", n_regular: int = 60, n_adaptive: int = 40,
                    n_steps: int = 500, step_ms: int = 20, batch: int = 10,
                    iterations: int = 5000, lr: float = 0.001, gamma: float = 0.4,
                    rate_coeff: float = 30.0, rate_target_hz: float = 20.0,
                    rate_mode: str = "average",
                    neurons_per_channel: int = 100, tau_a: float = 2000.0,
                    input_gain: float = 10.0, seed: int = 0,
                    params: NetworkParams | None = None, adam: AdamState | None = None,
                    start_iteration: int = 0, rng: np.random.Generator | None = None,
                    log_every: int | None = None, metrics=None):
    """Outer-loop BPTT training over randomly drawn tasks (batch of episodes per
    iteration). Returns dict with trained params and per-iteration curves."""
    if rng is None:
        rng = np.random.default_rng(seed)
    gen_task = TASK_FAMILIES[family]
    probe = gen_task(rng)
    n_in = (len(probe.input_ranges) + 1) * neurons_per_channel
    if params is None:
        params = build_network(rng, n_in=n_in, n_regular=n_regular, n_adaptive=n_adaptive,
                               n_out=1, tau_m=20.0, tau_a=tau_a,
                               beta_adaptive=1.6, b0=0.03, refractory=5.0,
                               delay_range=(0, 5), tau_out=20.0)
        # the tuning-code inputs are sparse (one narrow channel per value), so
        # stronger input coupling is needed for the spikes to drive the network
        params.w_in *= input_gain
    if adam is None:
        adam = AdamState.init(params.trainable())
    mse_hist, rate_hist = [], []
    for it in range(start_iteration, iterations):
        tasks = [gen_task(rng) for _ in range(batch)]
        episodes = [build_l2l_episode(t, n_steps, rng, step_ms=step_ms,
                                      neurons_per_channel=neurons_per_channel)
                    for t in tasks]
        inputs = np.stack([e.inputs for e in episodes])
        targets = np.stack([e.targets for e in episodes])
        raster, _, tape = simulate(params, inputs, record=True)
        mse, rate_val, g_z, dw_out = _l2l_loss_seeds(
            params, raster, targets, step_ms, rate_coeff, rate_target_hz,
            params.neuron.dt, rate_mode)
        grads = backward(tape, params, g_z=g_z, gamma=gamma)
        grads.dw_out += dw_out
        apply_update(params, grads, adam, lr, None, rng)
        mse_hist.append(mse)
        rate_hist.append(rate_val)
        if metrics is not None:
            metrics.append(iteration=it, loss=mse + rate_coeff * rate_val,
                           mse=mse, rate_reg=rate_val, accuracy="")
        if log_every and (it + 1) % log_every == 0:
            print(f"[l2l] iter {it + 1}/{iterations} mse={mse:.4f} R={rate_val:.2f}")
    return {"params": params, "mse": np.array(mse_hist), "rate_reg": np.array(rate_hist),
            "adam": adam, "rng": rng, "iteration": iterations}


# ---------------------------------------------------------------------------
# baselines

def spike_traces(raster: np.ndarray, kernel_ms: int = 20, tau_ms: float = 20.0) -> np.ndarray:
    """Causal exponential-kernel traces (kernel width 20 ms, tau 20 ms)."""
    z = np.asarray(raster, dtype=float)
    trace = np.zeros_like(z)
    for u in range(kernel_ms):
        w = np.exp(-u / tau_ms)
        if u == 0:
            trace += w * z
        else:
            trace[u:] += w * z[:-u]
    return trace


def mean_spiking_trace(raster: np.ndarray, step_ms: int = 20) -> np.ndarray:
    """Per-step mean of the exponential trace; (T, n) -> (S, n)."""
    tr = spike_traces(raster)
    s = tr.shape[0] // step_ms
    return tr[:s * step_ms].reshape(s, step_ms, -1).mean(axis=1)


def ridge_fit(X: np.ndarray, y: np.ndarray, reg: float) -> np.ndarray:
    d = X.shape[1]
    return np.linalg.solve(X.T @ X + reg * np.eye(d), X.T @ y)


def linear_baseline(raster: np.ndarray, targets: np.ndarray, reg: float = 100.0, *,
                    protocol: str = "batch", step_ms: int = 20,
                    rng: np.random.Generator | None = None,
                    train_frac: float = 0.9):
    """Ridge regression on the mean spiking trace.

    protocol="batch": random train/test split within the episode, returns the
    test MSE. protocol="online": for each step k, fit on the first k steps and
    test on step k+1; returns the per-step squared-error curve.
    """
    feats = mean_spiking_trace(raster, step_ms)
    y = np.asarray(targets, dtype=float)[:feats.shape[0]]
    if protocol == "batch":
        if rng is None:
            rng = np.random.default_rng(0)
        s = feats.shape[0]
        perm = rng.permutation(s)
        n_train = int(round(train_frac * s))
        tr, te = perm[:n_train], perm[n_train:]
        w = ridge_fit(feats[tr], y[tr], reg)
        return float(np.mean((feats[te] @ w - y[te]) ** 2))
    if protocol == "online":
        errs = []
        for k in range(1, feats.shape[0]):
            w = ridge_fit(feats[:k], y[:k], reg)
            errs.append(float((feats[k] @ w - y[k]) ** 2))
        return np.array(errs)
    raise ValueError("protocol must be 'batch' or 'online'")


def ff_backprop_baseline(xs: np.ndarray, targets: np.ndarray, *, eta: float = 0.1,
                         beta1: float = 0.7, beta2: float = 0.9,
                         weight_decay: float = 1e-5, eps: float = 1e-8,
                         rng: np.random.Generator | None = None) -> np.ndarray:
    """Online Adam+AMSGrad training of a 2-10-1 sigmoid network on the same
    example stream; returns the per-step pre-update squared-error curve."""
    if rng is None:
        rng = np.random.default_rng(0)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    d = xs.shape[1]
    xavier = lambda fi, fo: rng.standard_normal((fo, fi)) * np.sqrt(2.0 / (fi + fo))
    w1, b1 = xavier(d, 10), np.zeros(10)
    w2, b2 = xavier(10, 1)[0], 0.0
    theta = [w1, b1, w2, np.array([b2])]
    m = [np.zeros_like(p) for p in theta]
    v = [np.zeros_like(p) for p in theta]
    vmax = [np.zeros_like(p) for p in theta]
    errs = np.zeros(len(xs))
    for step, (x, t) in enumerate(zip(xs, targets)):
        h = _sigmoid(theta[0] @ x + theta[1])
        out = _sigmoid(theta[2] @ h + theta[3][0])
        err = out - t
        errs[step] = err ** 2
        d_out = 2.0 * err * out * (1.0 - out)
        g2 = d_out * h
        gb2 = np.array([d_out])
        d_h = d_out * theta[2] * h * (1.0 - h)
        g1 = np.outer(d_h, x)
        gb1 = d_h
        grads = [g1, gb1, g2, gb2]
        k = step + 1
        for i, (p, g) in enumerate(zip(theta, grads)):
            g = g + weight_decay * p
            m[i] = beta1 * m[i] + (1 - beta1) * g
            v[i] = beta2 * v[i] + (1 - beta2) * g * g
            vmax[i] = np.maximum(vmax[i], v[i])
            p -= eta * (m[i] / (1 - beta1 ** k)) / (np.sqrt(vmax[i] / (1 - beta2 ** k)) + eps)
    return errs


# ---------------------------------------------------------------------------
# sequential pixel classification

def encode_pixel_sequence(images: np.ndarray, *, encoding: str = "threshold",
                          n_input: int = 80, window: int = 20,
                          rng: np.random.Generator | None = None) -> np.ndarray:
    """Sequential presentation of flattened grey images plus a cue channel that
    fires during the output window. Returns (N, n_pixels + window, n_input + 1)."""
    images = np.atleast_2d(np.asarray(images, dtype=float))
    n_img, n_pix = images.shape
    total = n_pix + window
    out = np.zeros((n_img, total, n_input + 1))
    if encoding == "threshold":
        spec = ThresholdCodeSpec(n_thresholds=n_input // 2)
        for i, img in enumerate(images):
            out[i, :n_pix, :n_input] = encode_threshold_sequence(img, spec)
    elif encoding == "population":
        if rng is None:
            raise ValueError("population encoding needs an rng")
        p = np.repeat(images[:, :, None], n_input, axis=2)
        out[:, :n_pix, :n_input] = (rng.random(p.shape) < p).astype(float)
    else:
        raise ValueError("encoding must be 'threshold' or 'population'")
    out[:, n_pix:, n_input] = 1.0  # presentation-finished cue
    return out


def classify(params: NetworkParams, inputs: np.ndarray, window: int,
             chunk: int = 256) -> np.ndarray:
    preds = []
    for i in range(0, len(inputs), chunk):
        _, ytrace, _ = simulate(params, inputs[i:i + chunk])
        preds.append(np.argmax(ytrace[:, -window:].mean(axis=1), axis=1))
    return np.concatenate(preds)


def train_spike_classifier(params: NetworkParams, inputs: np.ndarray, labels: np.ndarray, *,
                           iterations: int, batch_size: int, window: int,
                           schedule: LrSchedule, gamma: float = 0.3,
                           rate_coeff: float = 0.0, rate_target_hz: float = 20.0,
                           rewire_cfg: RewireConfig | None = None, seed: int = 0,
                           adam: AdamState | None = None, start_iteration: int = 0,
                           rng: np.random.Generator | None = None,
                           test_inputs=None, test_labels=None, eval_every: int | None = None,
                           log_every: int | None = None, metrics=None):
    """Generic BPTT (+ optional DEEP R) training loop for windowed softmax
    classification of spike-encoded sequences."""
    if rng is None:
        rng = np.random.default_rng(seed)
    if adam is None:
        adam = AdamState.init(params.trainable())
    history = []
    for it in range(start_iteration, iterations):
        idx = rng.choice(len(inputs), size=batch_size, replace=False)
        raster, ytrace, tape = simulate(params, inputs[idx], record=True)
        loss, g_y = loss_crossentropy_avg(ytrace, window, labels[idx])
        g_z = None
        rate_val = 0.0
        if rate_coeff > 0:
            rate_val, g_zr = firing_rate_regularizer(raster, rate_target_hz, params.neuron.dt)
            g_z = rate_coeff * g_zr
        grads = backward(tape, params, g_y=g_y, g_z=g_z, gamma=gamma)
        lr = lr_at(schedule, it)
        apply_update(params, grads, adam, lr, rewire_cfg, rng)
        acc = ""
        if eval_every and test_inputs is not None and (it + 1) % eval_every == 0:
            acc = float(np.mean(classify(params, test_inputs, window) == test_labels))
        history.append((it, loss, rate_val, acc))
        if metrics is not None:
            metrics.append(iteration=it, loss=loss + rate_coeff * rate_val, mse="",
                           rate_reg=rate_val, accuracy=acc)
        if log_every and (it + 1) % log_every == 0:
            print(f"[clf] iter {it + 1}/{iterations} loss={loss:.4f} R={rate_val:.1f} acc={acc}")
    return {"params": params, "history": history, "adam": adam, "rng": rng,
            "iteration": iterations}


def run_seq_pixel_task(*, images, labels, test_images, test_labels,
                       encoding: str = "threshold", window: int = 20,
                       n_regular: int = 120, n_adaptive: int = 100,
                       tau_a: float = 700.0, dt_per_pixel: float = 1.0,
                       connectivity: float | None = 0.12, dale: bool = True,
                       iterations: int = 2000, batch_size: int = 64,
                       lr_initial: float = 0.01, lr_factor: float = 0.8,
                       lr_interval: int = 2500, gamma: float = 0.3,
                       rate_coeff: float = 0.0, seed: int = 0,
                       params: NetworkParams | None = None, adam: AdamState | None = None,
                       start_iteration: int = 0, rng: np.random.Generator | None = None,
                       eval_every: int | None = None, log_every: int | None = None,
                       metrics=None):
    """Sequential grey-image classification with BPTT + DEEP R. Supports 1 ms
    and 2 ms per-pixel presentation (pass tau_a 700/1400 accordingly)."""
    build_rng = np.random.default_rng(seed)
    if rng is None:
        rng = np.random.default_rng(seed + 2)
    n_input = 80
    enc_rng = np.random.default_rng(seed + 1)
    train_inputs = encode_pixel_sequence(images, encoding=encoding, n_input=n_input,
                                         window=window, rng=enc_rng)
    test_inputs = encode_pixel_sequence(test_images, encoding=encoding, n_input=n_input,
                                        window=window, rng=enc_rng)
    if dt_per_pixel != 1.0:
        train_inputs = np.repeat(train_inputs, int(dt_per_pixel), axis=1)
        test_inputs = np.repeat(test_inputs, int(dt_per_pixel), axis=1)
    if params is None:
        params = build_network(build_rng, n_in=n_input + 1, n_regular=n_regular,
                               n_adaptive=n_adaptive, n_out=10, tau_a=tau_a,
                               beta_adaptive=1.8, b0=0.01, refractory=2.0,
                               delay_range=(1, 2), connectivity=connectivity,
                               dale=dale, tau_out=20.0)
    rewire_cfg = None
    if connectivity is not None:
        rewire_cfg = RewireConfig(l1_coeff=0.01, temperature=0.0,
                                  target_connectivity=connectivity)
    schedule = LrSchedule(initial=lr_initial, factor=lr_factor, interval=lr_interval)
    result = train_spike_classifier(params, train_inputs, np.asarray(labels), iterations=iterations,
                                    batch_size=batch_size, window=window, schedule=schedule,
                                    gamma=gamma, rate_coeff=rate_coeff,
                                    rewire_cfg=rewire_cfg, seed=seed, adam=adam,
                                    start_iteration=start_iteration, rng=rng,
                                    test_inputs=test_inputs, test_labels=np.asarray(test_labels),
                                    eval_every=eval_every, log_every=log_every, metrics=metrics)
    acc = float(np.mean(classify(params, test_inputs, window) == np.asarray(test_labels)))
    result["accuracy"] = acc
    return result


# ---------------------------------------------------------------------------
# delayed-cue memory task

def make_delayed_cue_batch(rng: np.random.Generator, batch: int, *, n_channels: int = 40,
                           cue_ms: int = 100, delay_ms: int = 600, recall_ms: int = 50,
                           p_spike: float = 0.1):
    """Classify which of two cue patterns occurred after a long silent delay.

    Cue A drives the first half of the input channels, cue B the second half;
    one extra channel fires during the recall window."""
    labels = rng.integers(0, 2, size=batch)
    total = cue_ms + delay_ms + recall_ms
    inputs = np.zeros((batch, total, n_channels + 1))
    half = n_channels // 2
    for i, lab in enumerate(labels):
        lo = 0 if lab == 0 else half
        inputs[i, :cue_ms, lo:lo + half] = (rng.random((cue_ms, half)) < p_spike)
    inputs[:, cue_ms + delay_ms:, n_channels] = 1.0
    return inputs, labels


def train_delayed_cue(*, beta_adaptive: float, n_regular: int = 64, n_adaptive: int = 32,
                      tau_a: float = 1200.0, cue_ms: int = 100, delay_ms: int = 600,
                      recall_ms: int = 50, iterations: int = 150, batch_size: int = 32,
                      lr: float = 0.005, gamma: float = 0.3, rate_coeff: float = 0.1,
                      seed: int = 0, n_test: int = 256, log_every: int | None = None):
    """Train on the delayed-cue task and report held-out accuracy. With
    beta_adaptive=0 the same architecture is a pure LIF network."""
    rng = np.random.default_rng(seed)
    n_channels = 40
    params = build_network(rng, n_in=n_channels + 1, n_regular=n_regular,
                           n_adaptive=n_adaptive, n_out=2, tau_a=tau_a,
                           beta_adaptive=beta_adaptive, b0=0.01, refractory=2.0,
                           delay_range=(1, 2), tau_out=20.0)
    adam = AdamState.init(params.trainable())
    schedule = LrSchedule(initial=lr)
    for it in range(iterations):
        inputs, labels = make_delayed_cue_batch(rng, batch_size, n_channels=n_channels,
                                                cue_ms=cue_ms, delay_ms=delay_ms,
                                                recall_ms=recall_ms)
        raster, ytrace, tape = simulate(params, inputs, record=True)
        loss, g_y = loss_crossentropy_avg(ytrace, recall_ms, labels)
        g_z = None
        if rate_coeff > 0:
            _, g_zr = firing_rate_regularizer(raster, 20.0, params.neuron.dt)
            g_z = rate_coeff * g_zr
        grads = backward(tape, params, g_y=g_y, g_z=g_z, gamma=gamma)
        apply_update(params, grads, adam, lr_at(schedule, it), None, rng)
        if log_every and (it + 1) % log_every == 0:
            print(f"[cue] iter {it + 1}/{iterations} loss={loss:.4f}")
    test_rng = np.random.default_rng(seed + 99)
    inputs, labels = make_delayed_cue_batch(test_rng, n_test, n_channels=n_channels,
                                            cue_ms=cue_ms, delay_ms=delay_ms,
                                            recall_ms=recall_ms)
    preds = classify(params, inputs, recall_ms)
    return {"params": params, "accuracy": float(np.mean(preds == labels))}
