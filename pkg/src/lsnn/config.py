"""Experiment configuration: a YAML key-tree with per-task defaults, strict
(unknown-key rejecting) validation, physics range checks, and `--set a.b.c=v`
command-line overrides."""

from __future__ import annotations

import copy

import yaml


class ConfigError(ValueError):
    """Validation failure; .errors lists every offending key."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


TASKS = ("seq-pixel", "l2l-sinus", "l2l-tn", "meta-rl",
         "seq-pixel-smoke", "l2l-sinus-smoke", "l2l-tn-smoke", "meta-rl-smoke")

_COMMON = {
    "task": "seq-pixel",
    "seed": 0,
    "output_dir": "runs",
}

_DEFAULTS = {
    "seq-pixel": {
        **_COMMON,
        "dataset": {"path": None, "kind": "csv", "labels_path": None,
                    "downsample": None, "limit": None, "test_fraction": 0.2},
        "network": {"n_regular": 120, "n_adaptive": 100, "tau_a": 700.0,
                    "connectivity": 0.12, "dale": True},
        "training": {"iterations": 2000, "batch_size": 64, "window": 20,
                     "encoding": "threshold", "lr_initial": 0.01, "lr_factor": 0.8,
                     "lr_interval": 2500, "gamma": 0.3, "rate_coeff": 0.0,
                     "eval_every": 250, "log_every": 50},
    },
    "l2l-sinus": {
        **_COMMON,
        "network": {"n_regular": 60, "n_adaptive": 40},
        "training": {"iterations": 2000, "batch": 10, "n_steps": 100, "step_ms": 20,
                     "lr": 0.001, "gamma": 0.4, "rate_coeff": 30.0,
                     "rate_target_hz": 20.0, "log_every": 50},
    },
    "meta-rl": {
        **_COMMON,
        "arena": {"arena_radius": 1.0, "goal_radius": 0.3, "goal_center_radius": 0.85,
                  "a_scale": 0.02, "goal_reward": 1.0, "wall_penalty": -0.02,
                  "episode_steps": 2000},
        "ppo": {"clip_eps": 0.2, "discount": 0.99, "mu_v": 1.0, "mu_e": 0.001,
                "mu_firing": 100.0, "f0_hz": 10.0, "episodes_per_iter": 10,
                "adam_eps": 1e-5, "variance_mode": "variance"},
        "network": {"n_regular": 60, "n_adaptive": 40, "connectivity": 0.2,
                    "delay_min": 1, "delay_max": 3},
        "training": {"iterations": 200, "lr_initial": 0.01, "lr_factor": 0.5,
                     "lr_interval": 5000, "gamma": 0.3, "rewire_l1": 0.01,
                     "log_every": 10},
    },
}
_DEFAULTS["l2l-tn"] = copy.deepcopy(_DEFAULTS["l2l-sinus"])

# smoke variants: same tree, desk-second scale
_SMOKE_OVERRIDES = {
    "seq-pixel-smoke": {"network": {"n_regular": 30, "n_adaptive": 20},
                        "training": {"iterations": 3, "batch_size": 8,
                                     "eval_every": None, "log_every": None}},
    "l2l-sinus-smoke": {"network": {"n_regular": 30, "n_adaptive": 20},
                        "training": {"iterations": 3, "batch": 2, "n_steps": 10,
                                     "log_every": None}},
    "meta-rl-smoke": {"arena": {"episode_steps": 50},
                      "ppo": {"episodes_per_iter": 2},
                      "training": {"iterations": 3, "log_every": None}},
}
_SMOKE_OVERRIDES["l2l-tn-smoke"] = copy.deepcopy(_SMOKE_OVERRIDES["l2l-sinus-smoke"])


def _base_task(task: str) -> str:
    return task[:-6] if task.endswith("-smoke") else task


def _deep_merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def default_config(task: str) -> dict:
    if task not in TASKS:
        raise ConfigError([f"task: unknown task {task!r} (choose from {', '.join(TASKS)})"])
    cfg = copy.deepcopy(_DEFAULTS[_base_task(task)])
    if task.endswith("-smoke"):
        cfg = _deep_merge(cfg, _SMOKE_OVERRIDES[task])
    cfg["task"] = task
    return cfg


def _merge_strict(defaults: dict, given: dict, path: str, errors: list) -> dict:
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        full = f"{path}.{key}" if path else key
        if key not in defaults:
            errors.append(f"{full}: unknown key")
            continue
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                errors.append(f"{full}: expected a mapping")
                continue
            out[key] = _merge_strict(defaults[key], value, full, errors)
        else:
            out[key] = value
    return out


def _check(cond, msg, errors):
    if not cond:
        errors.append(msg)


def _physics_checks(cfg: dict, errors: list) -> None:
    tr = cfg.get("training", {})
    net = cfg.get("network", {})
    for key in ("tau_a",):
        if key in net:
            _check(net[key] > 0, f"network.{key}: must be positive", errors)
    if net.get("connectivity") is not None:
        _check(0.0 < net["connectivity"] <= 1.0,
               "network.connectivity: must be in (0, 1]", errors)
    for key in ("n_regular", "n_adaptive"):
        if key in net:
            _check(net[key] >= 0, f"network.{key}: must be >= 0", errors)
    _check(net.get("n_regular", 1) + net.get("n_adaptive", 0) > 0,
           "network: need at least one neuron", errors)
    for key in ("lr", "lr_initial"):
        if key in tr:
            _check(tr[key] > 0, f"training.{key}: must be positive", errors)
    if "lr_factor" in tr:
        _check(0.0 < tr["lr_factor"] <= 1.0, "training.lr_factor: must be in (0, 1]", errors)
    if "lr_interval" in tr:
        _check(tr["lr_interval"] >= 1, "training.lr_interval: must be >= 1", errors)
    if "gamma" in tr:
        _check(tr["gamma"] >= 0, "training.gamma: must be >= 0", errors)
    if "window" in tr:
        _check(tr["window"] >= 1, "training.window: must be >= 1", errors)
    for key in ("iterations", "batch_size", "batch", "n_steps", "step_ms"):
        if key in tr:
            _check(tr[key] >= 1, f"training.{key}: must be >= 1", errors)
    if "arena" in cfg:
        ar = cfg["arena"]
        _check(ar["a_scale"] > 0, "arena.a_scale: must be positive", errors)
        _check(ar["arena_radius"] > 0, "arena.arena_radius: must be positive", errors)
        _check(ar["goal_radius"] > 0, "arena.goal_radius: must be positive", errors)
        _check(ar["goal_center_radius"] - ar["goal_radius"] < ar["arena_radius"],
               "arena: goal circle must intersect the arena", errors)
        _check(ar["episode_steps"] >= 1, "arena.episode_steps: must be >= 1", errors)
    if "ppo" in cfg:
        pp = cfg["ppo"]
        _check(0.0 < pp["clip_eps"] < 1.0, "ppo.clip_eps: must be in (0, 1)", errors)
        _check(0.0 < pp["discount"] <= 1.0, "ppo.discount: must be in (0, 1]", errors)
        for key in ("mu_v", "mu_e", "mu_firing"):
            _check(pp[key] >= 0, f"ppo.{key}: must be >= 0", errors)
        _check(pp["episodes_per_iter"] >= 1, "ppo.episodes_per_iter: must be >= 1", errors)
        _check(pp["variance_mode"] in ("variance", "std"),
               "ppo.variance_mode: must be 'variance' or 'std'", errors)
    if "dataset" in cfg:
        ds = cfg["dataset"]
        _check(ds["kind"] in ("csv", "idx", "sklearn-digits"),
               "dataset.kind: must be csv, idx or sklearn-digits", errors)
        if ds.get("test_fraction") is not None:
            _check(0.0 < ds["test_fraction"] < 1.0,
                   "dataset.test_fraction: must be in (0, 1)", errors)


def validate_config(data: dict) -> dict:
    """Merge user data over the task defaults; raise ConfigError listing every
    unknown key and out-of-range value."""
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError(["top level: expected a mapping"])
    task = data.get("task")
    if task is None:
        raise ConfigError(["task: required"])
    if task not in TASKS:
        raise ConfigError([f"task: unknown task {task!r}"])
    cfg = _merge_strict(default_config(task), data, "", errors)
    cfg["task"] = task
    if not errors:
        _physics_checks(cfg, errors)
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path: str) -> dict:
    with open(path) as f:
        data = yaml.safe_load(f)
    return validate_config(data if data is not None else {})


def apply_overrides(cfg: dict, assignments: list[str]) -> dict:
    """Apply `path.to.key=value` overrides (values parsed as YAML scalars) and
    re-validate the result."""
    data = copy.deepcopy(cfg)
    errors = []
    for item in assignments:
        if "=" not in item:
            errors.append(f"{item}: overrides must look like key.path=value")
            continue
        keypath, raw = item.split("=", 1)
        node = data
        parts = keypath.split(".")
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                errors.append(f"{keypath}: unknown key")
                node = None
                break
            node = node[part]
        if node is None:
            continue
        if parts[-1] not in node:
            errors.append(f"{keypath}: unknown key")
            continue
        node[parts[-1]] = yaml.safe_load(raw)
    if errors:
        raise ConfigError(errors)
    return validate_config(data)
