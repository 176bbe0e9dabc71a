"""Meta reinforcement learning in a circular arena.

The network reads a population-coded position plus reward pulses and drives
five readouts: tanh-squashed action means, logistic action variances, and a raw
value prediction. Training is PPO with a clipped surrogate, value and entropy
regularization and a firing-rate penalty, one Adam step per iteration; DEEP R
keeps the recurrent connectivity sparse and per-neuron current-noise amplitudes
are trained alongside the weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backprop import backward
from .builders import build_network
from .encoders import REWARD_PULSE_NEURONS, encode_reward_pulse, rl_tuning_spec
from .network import (NetworkParams, NetworkState, membrane_step, readout_step,
                      simulate, synaptic_current)
from .optimizers import AdamState, LrSchedule, lr_at
from .rewiring import RewireConfig, deepr_step
from .supervised import apply_update


class RolloutMismatchError(RuntimeError):
    """Raised when re-simulation at the behavior parameters diverges from the
    stored rollout (determinism violation)."""


@dataclass
class ArenaConfig:
    arena_radius: float = 1.0
    goal_radius: float = 0.3
    goal_center_radius: float = 0.85  # distance of goal centers from the origin
    a_scale: float = 0.02
    goal_reward: float = 1.0
    wall_penalty: float = -0.02
    episode_steps: int = 2000

    def __post_init__(self):
        if self.a_scale <= 0:
            raise ValueError("a_scale must be positive")
        if self.goal_center_radius - self.goal_radius >= self.arena_radius:
            raise ValueError("goal circle must intersect the arena")


@dataclass
class PPOConfig:
    clip_eps: float = 0.2
    discount: float = 0.99
    mu_v: float = 1.0
    mu_e: float = 0.001
    mu_firing: float = 100.0
    f0_hz: float = 10.0
    episodes_per_iter: int = 10
    adam_eps: float = 1e-5
    variance_mode: str = "variance"   # logistic readout is the variance or the std

    def __post_init__(self):
        if not 0.0 < self.clip_eps < 1.0:
            raise ValueError("clip_eps must be in (0, 1)")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("discount must be in (0, 1]")
        if min(self.mu_v, self.mu_e, self.mu_firing) < 0:
            raise ValueError("loss coefficients must be >= 0")
        if self.variance_mode not in ("variance", "std"):
            raise ValueError("variance_mode must be 'variance' or 'std'")


# ---------------------------------------------------------------------------
# environment

def sample_disc(rng: np.random.Generator, radius: float, size: int | None = None) -> np.ndarray:
    n = 1 if size is None else size
    r = radius * np.sqrt(rng.random(n))
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    pts = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=-1)
    return pts[0] if size is None else pts


def env_reset(rng: np.random.Generator, cfg: ArenaConfig) -> tuple[np.ndarray, np.ndarray]:
    """Uniform start position in the arena; goal center uniform on the circle of
    the configured radius (fixed for the whole episode)."""
    pos = sample_disc(rng, cfg.arena_radius)
    phi = rng.uniform(0.0, 2.0 * np.pi)
    goal = cfg.goal_center_radius * np.array([np.cos(phi), np.sin(phi)])
    return pos, goal


def _border_intersection(p0: np.ndarray, p1: np.ndarray, radius: float) -> np.ndarray:
    """Point where the segment p0 -> p1 (p0 inside) crosses the circle."""
    d = p1 - p0
    a = d @ d
    if a == 0.0:
        return p0.copy()
    b = 2.0 * (p0 @ d)
    c = p0 @ p0 - radius * radius
    disc = max(b * b - 4.0 * a * c, 0.0)
    t = (-b + np.sqrt(disc)) / (2.0 * a)
    return p0 + min(max(t, 0.0), 1.0) * d


def env_step(pos: np.ndarray, velocity: np.ndarray, goal: np.ndarray,
             cfg: ArenaConfig, rng: np.random.Generator):
    """Returns (new position, reward, goal_reached).

    Hitting the border stops the agent at the intersection point with the wall
    penalty; entering the goal circle yields the goal reward and a uniform
    respawn anywhere in the arena. The goal itself never moves.
    """
    pos = np.asarray(pos, dtype=float)
    new = pos + np.asarray(velocity, dtype=float)
    if new @ new > cfg.arena_radius ** 2:
        return _border_intersection(pos, new, cfg.arena_radius), cfg.wall_penalty, False
    if np.sum((new - goal) ** 2) <= cfg.goal_radius ** 2:
        return sample_disc(rng, cfg.arena_radius), cfg.goal_reward, True
    return new, 0.0, False


# ---------------------------------------------------------------------------
# policy heads

def _logistic(x):
    return 1.0 / (1.0 + np.exp(-x))


def policy_heads(y: np.ndarray, variance_mode: str = "variance"):
    """Split readouts into (means, variances, value); y has 5 trailing channels."""
    means = np.tanh(y[..., 0:2])
    phi = _logistic(y[..., 2:4])
    variances = phi * phi if variance_mode == "std" else phi
    return means, variances, y[..., 4]


def decode_action(y: np.ndarray, rng: np.random.Generator, cfg: ArenaConfig,
                  variance_mode: str = "variance"):
    """Sample the Gaussian action and convert it to a norm-clipped velocity.

    Returns (velocity, sample); the log-density is evaluated on the raw sample,
    the clipping belongs to the environment.
    """
    means, variances, _ = policy_heads(np.asarray(y, dtype=float), variance_mode)
    sample = means + np.sqrt(variances) * rng.standard_normal(means.shape)
    velocity = cfg.a_scale * sample
    norm = np.linalg.norm(velocity, axis=-1, keepdims=True)
    scale = np.where(norm > cfg.a_scale, cfg.a_scale / np.maximum(norm, 1e-300), 1.0)
    return velocity * scale, sample


def gaussian_logp_entropy(sample: np.ndarray, means: np.ndarray, variances: np.ndarray):
    """Diagonal-Gaussian log density of the unclipped sample and the entropy
    sum over dimensions; inputs broadcast, reduction over the last axis."""
    variances = np.asarray(variances, dtype=float)
    if np.any(variances <= 0):
        raise ValueError("variances must be positive")
    d2 = (np.asarray(sample) - np.asarray(means)) ** 2
    logp = -0.5 * np.sum(d2 / variances + np.log(2.0 * np.pi * variances), axis=-1)
    entropy = 0.5 * np.sum(np.log(2.0 * np.pi * np.e * variances), axis=-1)
    return logp, entropy


def discounted_returns(rewards: np.ndarray, discount: float) -> np.ndarray:
    """R(t) = sum_{t' > t} discount^(t'-t) * r(t'), by backward recursion; the
    reward of step t itself is excluded. Works on (..., T)."""
    r = np.asarray(rewards, dtype=float)
    out = np.zeros_like(r)
    acc = np.zeros(r.shape[:-1])
    for t in range(r.shape[-1] - 2, -1, -1):
        acc = discount * (r[..., t + 1] + acc)
        out[..., t] = acc
    return out


def clipped_surrogate(ratio: np.ndarray, advantage: np.ndarray, clip_eps: float) -> np.ndarray:
    """O = min(r*A, clip(r, 1-eps, 1+eps)*A)."""
    r = np.asarray(ratio, dtype=float)
    a = np.asarray(advantage, dtype=float)
    return np.minimum(r * a, np.clip(r, 1.0 - clip_eps, 1.0 + clip_eps) * a)


# ---------------------------------------------------------------------------
# observations and rollouts

def _observation_spec():
    return rl_tuning_spec()


def encode_position(pos: np.ndarray, spec, rng: np.random.Generator) -> np.ndarray:
    """2 x 40 tuning-curve Bernoulli spikes for the (x, y) coordinates. pos may
    be (2,) or (batch, 2); returns (..., 80)."""
    p = spec.probabilities(np.asarray(pos, dtype=float))   # (..., 2, 40)
    flat = p.reshape(p.shape[:-2] + (p.shape[-2] * p.shape[-1],))
    return (rng.random(flat.shape) < flat).astype(float)


def observation_size() -> int:
    return 2 * _observation_spec().n_neurons + REWARD_PULSE_NEURONS


@dataclass
class Rollout:
    """K episodes generated under the behavior parameters; everything needed to
    re-simulate deterministically and evaluate the PPO loss."""

    inputs: np.ndarray     # (K, T, n_in)
    eps: np.ndarray | None # (K, T, n_rec) stored current-noise draws
    samples: np.ndarray    # (K, T, 2) raw Gaussian action samples
    logp: np.ndarray       # (K, T) behavior-policy log densities
    values: np.ndarray     # (K, T) behavior-policy value predictions
    rewards: np.ndarray    # (K, T)
    raster: np.ndarray     # (K, T, n_rec)
    positions: np.ndarray  # (K, T, 2) position before each step
    goals: np.ndarray      # (K, 2)
    goals_reached: np.ndarray  # (K,) goal events per episode


def generate_rollouts(params: NetworkParams, arena: ArenaConfig, ppo: PPOConfig,
                      rng: np.random.Generator, n_episodes: int | None = None) -> Rollout:
    """Step the K environments and the network together for one iteration."""
    k = ppo.episodes_per_iter if n_episodes is None else n_episodes
    t_steps = arena.episode_steps
    n, n_out = params.n_rec, params.n_out
    spec = _observation_spec()
    n_in = observation_size()
    if params.n_in != n_in or n_out != 5:
        raise ValueError(f"network must have {n_in} inputs and 5 readouts")

    pos = np.empty((k, 2))
    goal = np.empty((k, 2))
    for i in range(k):
        pos[i], goal[i] = env_reset(rng, arena)
    reward_prev = np.zeros(k)

    x_hist = np.zeros((k, t_steps, n_in))
    z_hist = np.zeros((k, t_steps + 1, n))
    eps = rng.standard_normal((k, t_steps, n)) if params.noise_sigma is not None else None
    samples = np.zeros((k, t_steps, 2))
    logp = np.zeros((k, t_steps))
    values = np.zeros((k, t_steps))
    rewards = np.zeros((k, t_steps))
    positions = np.zeros((k, t_steps, 2))
    goals_reached = np.zeros(k, dtype=int)

    in_groups = params.delay_groups("in")
    rec_groups = params.delay_groups("rec")
    state = NetworkState.zeros(k, n, n_out)
    pulse = np.zeros((k, REWARD_PULSE_NEURONS))
    for t in range(t_steps):
        positions[:, t] = pos
        for i in range(k):
            pulse[i] = encode_reward_pulse(reward_prev[i])
        x_hist[:, t] = np.concatenate([encode_position(pos, spec, rng), pulse], axis=1)
        I = synaptic_current(params, x_hist, z_hist, t, in_groups, rec_groups)
        if eps is not None:
            I = I + params.noise_sigma * eps[:, t]
        state = membrane_step(state, I, params)
        state.y = readout_step(state.y, state.z, params)
        z_hist[:, t + 1] = state.z

        means, variances, value = policy_heads(state.y, ppo.variance_mode)
        sample = means + np.sqrt(variances) * rng.standard_normal((k, 2))
        lp, _ = gaussian_logp_entropy(sample, means, variances)
        velocity = arena.a_scale * sample
        norm = np.linalg.norm(velocity, axis=1, keepdims=True)
        velocity *= np.where(norm > arena.a_scale, arena.a_scale / np.maximum(norm, 1e-300), 1.0)
        samples[:, t] = sample
        logp[:, t] = lp
        values[:, t] = value
        for i in range(k):
            pos[i], rewards[i, t], hit = env_step(pos[i], velocity[i], goal[i], arena, rng)
            if hit:
                goals_reached[i] += 1
        reward_prev = rewards[:, t]

    return Rollout(inputs=x_hist, eps=eps, samples=samples, logp=logp, values=values,
                   rewards=rewards, raster=z_hist[:, 1:], positions=positions,
                   goals=goal, goals_reached=goals_reached)


# ---------------------------------------------------------------------------
# PPO loss

def ppo_loss_terms(rollout: Rollout, ytrace: np.ndarray, raster: np.ndarray,
                   ppo: PPOConfig, dt: float = 1.0):
    """PPO loss pieces and their analytic readout/spike cotangents, given the
    re-simulated readout trace and raster. Returns (terms dict, g_y, g_z)."""
    k, t_steps, _ = rollout.inputs.shape
    kt = k * t_steps
    means, variances, value = policy_heads(ytrace, ppo.variance_mode)
    logp_new, entropy = gaussian_logp_entropy(rollout.samples, means, variances)
    returns = discounted_returns(rollout.rewards, ppo.discount)
    adv = returns - rollout.values
    ratio = np.exp(logp_new - rollout.logp)
    surrogate = clipped_surrogate(ratio, adv, ppo.clip_eps)
    value_err = returns - value

    n = raster.shape[-1]
    rate = raster.mean(axis=(0, 1))                      # spikes per step
    f0 = ppo.f0_hz * dt * 1e-3                           # target in the same units
    rate_dev = rate - f0
    rate_term = ppo.mu_firing * float(np.mean(rate_dev ** 2))
    surrogate_term = float(np.sum(surrogate)) / kt
    value_term = ppo.mu_v * float(np.sum(value_err ** 2)) / kt
    entropy_term = ppo.mu_e * float(np.mean(entropy))
    loss = -(surrogate_term - value_term) - entropy_term + rate_term
    terms = {"loss": loss, "surrogate": surrogate_term, "value": value_term,
             "entropy": entropy_term, "rate_reg": rate_term,
             "mean_reward": float(rollout.rewards.mean()),
             "mean_advantage": float(adv.mean())}

    # analytic seeds on the five readouts
    unclipped = ratio * adv
    active = unclipped <= np.clip(ratio, 1 - ppo.clip_eps, 1 + ppo.clip_eps) * adv
    d_logp = np.where(active, unclipped, 0.0) * (-1.0 / kt)       # dL/dlogp_new
    diff = rollout.samples - means                                 # (K, T, 2)
    d_means = d_logp[..., None] * diff / variances
    d_var_logp = d_logp[..., None] * 0.5 * (diff ** 2 / variances ** 2 - 1.0 / variances)
    d_var_ent = -ppo.mu_e / kt * 0.5 / variances
    d_var = d_var_logp + d_var_ent
    g_y = np.zeros_like(ytrace)
    g_y[..., 0:2] = d_means * (1.0 - means ** 2)                   # tanh
    phi = _logistic(ytrace[..., 2:4])
    dphi = phi * (1.0 - phi)
    if ppo.variance_mode == "std":
        g_y[..., 2:4] = d_var * 2.0 * phi * dphi
    else:
        g_y[..., 2:4] = d_var * dphi
    g_y[..., 4] = (2.0 * ppo.mu_v / kt) * (value - returns)

    g_z = np.broadcast_to(2.0 * ppo.mu_firing * rate_dev / (n * kt), raster.shape).copy()
    return terms, g_y, g_z


def ppo_loss(rollout: Rollout, params_new: NetworkParams, ppo: PPOConfig,
             *, check_determinism: bool = False, with_grads: bool = False,
             gamma: float = 0.3):
    """Evaluate the PPO objective by re-simulating the stored episodes under
    params_new with the stored noise and action samples.

    Returns a dict with the scalar loss and its components; with_grads=True adds
    parameter gradients (backward pass seeded with the analytic readout/spike
    cotangents). check_determinism=True verifies the re-simulated spike raster
    is bitwise identical to the stored one (valid at the behavior parameters).
    """
    raster, ytrace, tape = simulate(params_new, rollout.inputs, record=with_grads,
                                    noise_eps=rollout.eps)
    if check_determinism and not np.array_equal(raster, rollout.raster):
        raise RolloutMismatchError("re-simulation diverged from the stored rollout")
    terms, g_y, g_z = ppo_loss_terms(rollout, ytrace, raster, ppo,
                                     dt=params_new.neuron.dt)
    if with_grads:
        terms["grads"] = backward(tape, params_new, g_y=g_y, g_z=g_z, gamma=gamma)
    return terms


# ---------------------------------------------------------------------------
# training loop and baseline

def random_policy_baseline(arena: ArenaConfig, rng: np.random.Generator,
                           n_episodes: int = 50) -> float:
    """Mean goals per episode when actions are unit-Gaussian samples (the
    untrained-policy analogue); measured in the same environment."""
    total = 0
    for _ in range(n_episodes):
        pos, goal = env_reset(rng, arena)
        for _ in range(arena.episode_steps):
            velocity = arena.a_scale * rng.standard_normal(2)
            norm = np.linalg.norm(velocity)
            if norm > arena.a_scale:
                velocity *= arena.a_scale / norm
            pos, _, hit = env_step(pos, velocity, goal, arena, rng)
            total += hit
    return total / n_episodes


def build_rl_network(rng: np.random.Generator, *, n_regular: int = 60,
                     n_adaptive: int = 40, tau_a: float = 1200.0,
                     beta_adaptive: float = 1.7, tau_m=(15.0, 30.0),
                     refractory: float = 3.0, delay_range=(1, 10),
                     connectivity: float | None = 0.2, dale: bool = True,
                     noise_init: float = 0.03) -> NetworkParams:
    return build_network(rng, n_in=observation_size(), n_regular=n_regular,
                         n_adaptive=n_adaptive, n_out=5, tau_m=tau_m, tau_a=tau_a,
                         beta_adaptive=beta_adaptive, b0=0.01, refractory=refractory,
                         delay_range=delay_range, connectivity=connectivity,
                         dale=dale, noise_sigma=noise_init, tau_out=20.0)


def train_meta_rl(*, arena: ArenaConfig | None = None, ppo: PPOConfig | None = None,
                  iterations: int = 200, n_regular: int = 60, n_adaptive: int = 40,
                  connectivity: float | None = 0.2, delay_range=(1, 3),
                  gamma: float = 0.3, lr_initial: float = 0.01, lr_factor: float = 0.5,
                  lr_interval: int = 5000, seed: int = 0,
                  params: NetworkParams | None = None, adam: AdamState | None = None,
                  start_iteration: int = 0, rng: np.random.Generator | None = None,
                  rewire_l1: float = 0.01,
                  log_every: int | None = None, metrics=None):
    """PPO outer loop: K fresh episodes per iteration under the current
    parameters, then exactly one Adam (+ DEEP R) step on the PPO loss.

    Returns dict with trained params, per-iteration mean reward and goals per
    episode, and the final adam state."""
    arena = arena or ArenaConfig()
    ppo = ppo or PPOConfig()
    if rng is None:
        rng = np.random.default_rng(seed)
    if params is None:
        params = build_rl_network(rng, n_regular=n_regular, n_adaptive=n_adaptive,
                                  connectivity=connectivity, delay_range=delay_range)
    if adam is None:
        adam = AdamState.init(params.trainable(), eps=ppo.adam_eps)
    schedule = LrSchedule(initial=lr_initial, factor=lr_factor, interval=lr_interval)
    rewire_cfg = None
    if connectivity is not None:
        rewire_cfg = RewireConfig(l1_coeff=rewire_l1, target_connectivity=connectivity)
    mean_rewards, goals_hist, losses = [], [], []
    trajectories = None
    for it in range(start_iteration, iterations):
        rollout = generate_rollouts(params, arena, ppo, rng)
        res = ppo_loss(rollout, params, ppo, check_determinism=True,
                       with_grads=True, gamma=gamma)
        apply_update(params, res["grads"], adam, lr_at(schedule, it), rewire_cfg,
                     rng, train_noise=True)
        params.noise_sigma[...] = np.abs(params.noise_sigma)  # std must stay >= 0
        mean_rewards.append(res["mean_reward"])
        goals_hist.append(float(rollout.goals_reached.mean()))
        losses.append(res["loss"])
        trajectories = rollout
        if metrics is not None:
            metrics.append(iteration=it, loss=res["loss"], mse="",
                           rate_reg=res["rate_reg"], accuracy=goals_hist[-1])
        if log_every and (it + 1) % log_every == 0:
            print(f"[rl] iter {it + 1}/{iterations} loss={res['loss']:.4f} "
                  f"goals/ep={goals_hist[-1]:.2f}")
    return {"params": params, "mean_reward": np.array(mean_rewards),
            "goals_per_episode": np.array(goals_hist), "loss": np.array(losses),
            "adam": adam, "rng": rng, "iteration": iterations,
            "last_rollout": trajectories}
