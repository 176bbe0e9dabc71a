"""Naive reverse-mode oracle for the network gradients.

This is a deliberately independent second implementation: a scalar tape-based
autodiff (one node per scalar operation) drives a per-neuron, loop-based
re-simulation of the same dynamics, with the spike treated as a custom
primitive whose local derivative is the dampened pseudo-derivative. Gradients
produced here are compared against the vectorized production backward pass.

Kept intentionally simple and slow; only used on tiny networks in tests.
"""

import math

import numpy as np


class Tape:
    def __init__(self):
        self.nodes = []

    def backward(self, root):
        root.g = 1.0
        for node in reversed(self.nodes):
            g = node.g
            if g == 0.0:
                continue
            for parent, coeff in node.parents:
                parent.g += coeff * g


class Var:
    __slots__ = ("v", "g", "parents")

    def __init__(self, value, parents=(), tape=None):
        self.v = value
        self.g = 0.0
        self.parents = parents
        if tape is not None:
            tape.nodes.append(self)


def _lift(x, tape):
    return x if isinstance(x, Var) else Var(float(x))


def vadd(a, b, tape):
    a, b = _lift(a, tape), _lift(b, tape)
    return Var(a.v + b.v, ((a, 1.0), (b, 1.0)), tape)


def vsub(a, b, tape):
    a, b = _lift(a, tape), _lift(b, tape)
    return Var(a.v - b.v, ((a, 1.0), (b, -1.0)), tape)


def vmul(a, b, tape):
    a, b = _lift(a, tape), _lift(b, tape)
    return Var(a.v * b.v, ((a, b.v), (b, a.v)), tape)


def vscale(a, c, tape):
    return Var(a.v * c, ((a, c),), tape)


def vdiv(a, b, tape):
    a, b = _lift(a, tape), _lift(b, tape)
    return Var(a.v / b.v, ((a, 1.0 / b.v), (b, -a.v / (b.v * b.v))), tape)


def vsum(vs, tape):
    return Var(sum(v.v for v in vs), tuple((v, 1.0) for v in vs), tape)


def vsquare(a, tape):
    return Var(a.v * a.v, ((a, 2.0 * a.v),), tape)


def vexp(a, tape):
    e = math.exp(a.v)
    return Var(e, ((a, e),), tape)


def vlog(a, tape):
    return Var(math.log(a.v), ((a, 1.0 / a.v),), tape)


def spike(v_norm, gamma, blocked, tape):
    """Heaviside with the dampened pseudo-derivative as its local gradient."""
    fired = 0.0 if blocked else (1.0 if v_norm.v >= 0.0 else 0.0)
    pd = 0.0 if blocked else gamma * max(0.0, 1.0 - abs(v_norm.v))
    return Var(fired, ((v_norm, pd),), tape)


def simulate_vars(params, x, tape, gamma, eps=None, reset_gradient=True):
    """Re-simulate one episode with Var-valued weights.

    x: (T, n_in) concrete inputs. Returns (weight Var arrays, z Vars (T, n),
    y Vars (T, n_out), sigma Vars or None). z[t][j] is the spike produced by
    input step t (state index t+1).
    """
    nr = params.neuron
    n, n_in, n_out = params.n_rec, params.n_in, params.n_out
    T = x.shape[0]
    alpha = nr.alpha
    rho = nr.rho
    dt = nr.dt
    beta = nr.beta
    b0 = nr.b0
    n_ref = nr.n_refractory_steps
    kappa = params.kappa_out

    Win = [[Var(params.w_in[j, i]) for i in range(n_in)] for j in range(n)]
    Wrec = [[Var(params.w_rec[j, i]) for i in range(n)] for j in range(n)]
    Wout = [[Var(params.w_out[k, j]) for j in range(n)] for k in range(n_out)]
    sigma = None
    if params.noise_sigma is not None:
        sigma = [Var(params.noise_sigma[j]) for j in range(n)]

    V = [Var(0.0) for _ in range(n)]
    b = [Var(0.0) for _ in range(n)]
    z = [Var(0.0) for _ in range(n)]
    y = [Var(0.0) for _ in range(n_out)]
    refrac = [0] * n
    z_hist = [z]  # state index 0
    z_steps, y_steps = [], []

    for t in range(T):
        new_V, new_z, new_b = [], [], []
        for j in range(n):
            terms = []
            for i in range(n_in):
                d = params.d_in[j, i]
                if params.mask_in[j, i] and t - d >= 0 and x[t - d, i] != 0.0:
                    terms.append(vscale(Win[j][i], float(x[t - d, i]), tape))
            for i in range(n):
                d = params.d_rec[j, i]
                if params.mask_rec[j, i] and t - d >= 0:
                    terms.append(vmul(Wrec[j][i], z_hist[t - d][i], tape))
            I = vsum(terms, tape) if terms else Var(0.0)
            if sigma is not None and eps is not None:
                I = vadd(I, vscale(sigma[j], float(eps[t, j]), tape), tape)
            # threshold from the pre-update adaptation state
            B = vadd(Var(b0), vscale(b[j], beta[j], tape), tape)
            Vd = vadd(vscale(V[j], alpha[j], tape), vscale(I, 1.0 - alpha[j], tape), tape)
            if reset_gradient:
                Vn = vsub(Vd, vscale(vmul(B, z[j], tape), dt, tape), tape)
            else:
                Vn = vsub(Vd, Var(B.v * z[j].v * dt), tape)
            blocked = refrac[j] > 0
            v_norm = vdiv(vsub(Vn, B, tape), B, tape)
            zn = spike(v_norm, gamma, blocked, tape)
            bn = vadd(vscale(b[j], rho[j], tape), vscale(zn, 1.0 - rho[j], tape), tape)
            new_V.append(Vn)
            new_z.append(zn)
            new_b.append(bn)
        for j in range(n):
            refrac[j] = n_ref if new_z[j].v > 0 else max(refrac[j] - 1, 0)
        new_y = []
        for k in range(n_out):
            contrib = [vmul(Wout[k][j], new_z[j], tape) for j in range(n) if params.mask_out[k, j]]
            acc = vscale(y[k], kappa, tape)
            new_y.append(vadd(acc, vsum(contrib, tape), tape) if contrib else acc)
        V, b, z, y = new_V, new_b, new_z, new_y
        z_hist.append(z)
        z_steps.append(z)
        y_steps.append(y)

    return {"w_in": Win, "w_rec": Wrec, "w_out": Wout, "sigma": sigma,
            "z": z_steps, "y": y_steps}


def grads_from_vars(vars_dict, params):
    n, n_in, n_out = params.n_rec, params.n_in, params.n_out
    g_in = np.array([[vars_dict["w_in"][j][i].g for i in range(n_in)] for j in range(n)])
    g_rec = np.array([[vars_dict["w_rec"][j][i].g for i in range(n)] for j in range(n)])
    g_out = np.array([[vars_dict["w_out"][k][j].g for j in range(n)] for k in range(n_out)])
    g_sigma = None
    if vars_dict["sigma"] is not None:
        g_sigma = np.array([s.g for s in vars_dict["sigma"]])
    return g_in, g_rec, g_out, g_sigma


def loss_mse_readout(vars_dict, targets, tape):
    """Mean over steps and outputs of squared readout error."""
    y = vars_dict["y"]
    T, n_out = len(y), len(y[0])
    terms = [vsquare(vsub(y[t][k], float(targets[t, k]), tape), tape)
             for t in range(T) for k in range(n_out)]
    return vscale(vsum(terms, tape), 1.0 / (T * n_out), tape)


def loss_crossentropy_window(vars_dict, window, label, tape):
    """Cross entropy of softmaxed time-averaged readout over the last window steps."""
    y = vars_dict["y"]
    T, n_out = len(y), len(y[0])
    avg = [vscale(vsum([y[t][k] for t in range(T - window, T)], tape), 1.0 / window, tape)
           for k in range(n_out)]
    exps = [vexp(a, tape) for a in avg]
    logz = vlog(vsum(exps, tape), tape)
    return vsub(logz, avg[label], tape)


def loss_rate_reg(vars_dict, target_hz, dt_ms, tape):
    """Mean over neurons of squared (rate_Hz - target_Hz)."""
    z = vars_dict["z"]
    T, n = len(z), len(z[0])
    scale = 1000.0 / (T * dt_ms)  # spikes/step -> Hz
    terms = []
    for j in range(n):
        rate = vscale(vsum([z[t][j] for t in range(T)], tape), scale, tape)
        terms.append(vsquare(vsub(rate, float(target_hz), tape), tape))
    return vscale(vsum(terms, tape), 1.0 / n, tape)


def oracle_gradients(params, x, gamma, loss_builder, eps=None, reset_gradient=True):
    """Gradients of loss_builder(vars_dict, tape) for one episode.

    Returns (loss_value, g_w_in, g_w_rec, g_w_out, g_sigma).
    """
    tape = Tape()
    vars_dict = simulate_vars(params, x, tape, gamma, eps=eps, reset_gradient=reset_gradient)
    loss = loss_builder(vars_dict, tape)
    tape.backward(loss)
    g_in, g_rec, g_out, g_sigma = grads_from_vars(vars_dict, params)
    return loss.v, g_in, g_rec, g_out, g_sigma
