"""Command-line entry point.

Subcommands: `run <config>`, `resume <checkpoint>`, `export-raster <checkpoint>
<task-input>`, `validate <config>`. The output root directory can be set with
the LSNN_OUTPUT_ROOT environment variable. Exit codes: 0 success, 1 validation
error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np
import yaml

from .checkpoint import Checkpoint, CheckpointError, load_checkpoint, save_checkpoint
from .config import ConfigError, apply_overrides, load_config, validate_config
from .datasets import DatasetError, load_dataset, normalize_gray
from .exports import MetricsWriter, export_raster, export_trajectories
from .network import simulate
from .rl import ArenaConfig, PPOConfig, train_meta_rl
from .supervised import run_seq_pixel_task, train_l2l_outer

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


def _output_dir(cfg: dict) -> str:
    root = os.environ.get("LSNN_OUTPUT_ROOT", ".")
    out = os.path.join(root, cfg["output_dir"])
    os.makedirs(out, exist_ok=True)
    return out


def _load_seq_dataset(ds_cfg: dict, rng: np.random.Generator):
    kind = ds_cfg["kind"]
    if kind == "sklearn-digits":
        from sklearn.datasets import load_digits
        bunch = load_digits()
        images = normalize_gray(bunch.data / 16.0)
        labels = bunch.target
    else:
        if ds_cfg["path"] is None:
            raise ConfigError(["dataset.path: required for csv/idx datasets"])
        images, labels = load_dataset(ds_cfg["path"], kind,
                                      labels_path=ds_cfg["labels_path"],
                                      downsample=ds_cfg["downsample"])
    if ds_cfg["limit"]:
        images, labels = images[:ds_cfg["limit"]], labels[:ds_cfg["limit"]]
    n = len(images)
    perm = rng.permutation(n)
    n_test = max(1, int(round(ds_cfg["test_fraction"] * n)))
    test, train = perm[:n_test], perm[n_test:]
    return images[train], labels[train], images[test], labels[test]


def _run_training(cfg: dict, outdir: str, *, params=None, adam=None,
                  start_iteration=0, rng=None):
    task = cfg["task"]
    base = task[:-6] if task.endswith("-smoke") else task
    tr, net = cfg["training"], cfg["network"]
    with MetricsWriter(os.path.join(outdir, "metrics.csv")) as metrics:
        if base == "seq-pixel":
            split_rng = np.random.default_rng(cfg["seed"] + 7)
            images, labels, test_images, test_labels = _load_seq_dataset(cfg["dataset"], split_rng)
            result = run_seq_pixel_task(
                images=images, labels=labels, test_images=test_images,
                test_labels=test_labels, encoding=tr["encoding"], window=tr["window"],
                n_regular=net["n_regular"], n_adaptive=net["n_adaptive"],
                tau_a=net["tau_a"], connectivity=net["connectivity"], dale=net["dale"],
                iterations=tr["iterations"], batch_size=tr["batch_size"],
                lr_initial=tr["lr_initial"], lr_factor=tr["lr_factor"],
                lr_interval=tr["lr_interval"], gamma=tr["gamma"],
                rate_coeff=tr["rate_coeff"], seed=cfg["seed"], params=params,
                adam=adam, start_iteration=start_iteration, rng=rng,
                eval_every=tr["eval_every"], log_every=tr["log_every"], metrics=metrics)
            print(f"test accuracy: {result['accuracy']:.4f}")
        elif base in ("l2l-sinus", "l2l-tn"):
            result = train_l2l_outer(
                family="sinus" if base == "l2l-sinus" else "tn",
                n_regular=net["n_regular"], n_adaptive=net["n_adaptive"],
                n_steps=tr["n_steps"], step_ms=tr["step_ms"], batch=tr["batch"],
                iterations=tr["iterations"], lr=tr["lr"], gamma=tr["gamma"],
                rate_coeff=tr["rate_coeff"], rate_target_hz=tr["rate_target_hz"],
                seed=cfg["seed"], params=params, adam=adam,
                start_iteration=start_iteration, rng=rng,
                log_every=tr["log_every"], metrics=metrics)
            if len(result["mse"]):
                print(f"final training mse: {result['mse'][-1]:.4f}")
        elif base == "meta-rl":
            result = train_meta_rl(
                arena=ArenaConfig(**cfg["arena"]), ppo=PPOConfig(**cfg["ppo"]),
                iterations=tr["iterations"], n_regular=net["n_regular"],
                n_adaptive=net["n_adaptive"], connectivity=net["connectivity"],
                delay_range=(net["delay_min"], net["delay_max"]), gamma=tr["gamma"],
                lr_initial=tr["lr_initial"], lr_factor=tr["lr_factor"],
                lr_interval=tr["lr_interval"], rewire_l1=tr["rewire_l1"],
                seed=cfg["seed"], params=params, adam=adam,
                start_iteration=start_iteration, rng=rng,
                log_every=tr["log_every"], metrics=metrics)
            roll = result["last_rollout"]
            if roll is not None:
                export_trajectories(os.path.join(outdir, "trajectories.csv"),
                                    roll.positions, roll.rewards)
            if len(result["goals_per_episode"]):
                print(f"final goals/episode: {result['goals_per_episode'][-1]:.2f}")
        else:
            raise ConfigError([f"task: no runner for {task!r}"])
    rng_obj = result.get("rng")
    ckpt = Checkpoint(params=result["params"], adam=result.get("adam"),
                      iteration=result.get("iteration", tr["iterations"]),
                      rng_state=rng_obj.bit_generator.state if rng_obj is not None else None)
    save_checkpoint(os.path.join(outdir, "checkpoint.bin"), ckpt)
    with open(os.path.join(outdir, "config.yaml"), "w") as f:
        yaml.safe_dump(cfg, f, sort_keys=True)
    return result


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.set:
        cfg = apply_overrides(cfg, args.set)
    outdir = _output_dir(cfg)
    _run_training(cfg, outdir)
    print(f"artifacts written to {outdir}")
    return EXIT_OK


def cmd_resume(args) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    cfg_path = args.config or os.path.join(os.path.dirname(args.checkpoint) or ".",
                                           "config.yaml")
    cfg = load_config(cfg_path)
    if args.set:
        cfg = apply_overrides(cfg, args.set)
    total = cfg["training"]["iterations"]
    if ckpt.iteration >= total:
        print(f"checkpoint already at iteration {ckpt.iteration} of {total}; nothing to do")
        return EXIT_OK
    rng = None
    if ckpt.rng_state is not None:
        rng = np.random.default_rng()
        rng.bit_generator.state = ckpt.rng_state
    outdir = _output_dir(cfg)
    _run_training(cfg, outdir, params=ckpt.params, adam=ckpt.adam,
                  start_iteration=ckpt.iteration, rng=rng)
    print(f"resumed from iteration {ckpt.iteration}; artifacts in {outdir}")
    return EXIT_OK


def cmd_export_raster(args) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    inputs = np.loadtxt(args.task_input, delimiter=",", ndmin=2)
    rng = np.random.default_rng(args.seed)
    raster, _, _ = simulate(ckpt.params, inputs,
                            rng=rng if ckpt.params.noise_sigma is not None else None)
    export_raster(args.out, raster, dt_ms=ckpt.params.neuron.dt)
    print(f"raster written to {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    if args.set:
        cfg = apply_overrides(cfg, args.set)
    print(f"configuration valid (task {cfg['task']})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsnn",
                                     description="Train and inspect recurrent spiking "
                                                 "networks with adaptive thresholds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a training experiment from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key, e.g. --set training.iterations=10")
    p_run.set_defaults(func=cmd_run)

    p_res = sub.add_parser("resume", help="continue a run from a checkpoint")
    p_res.add_argument("checkpoint")
    p_res.add_argument("--config", default=None,
                       help="config file (default: config.yaml next to the checkpoint)")
    p_res.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p_res.set_defaults(func=cmd_resume)

    p_exp = sub.add_parser("export-raster", help="simulate stored inputs and export spikes")
    p_exp.add_argument("checkpoint")
    p_exp.add_argument("task_input", help="CSV of input values, one row per time step")
    p_exp.add_argument("--out", default="raster.csv")
    p_exp.add_argument("--seed", type=int, default=0)
    p_exp.set_defaults(func=cmd_export_raster)

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("config")
    p_val.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    except (FileNotFoundError, DatasetError, CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # runtime failures: divergence, I/O mid-run, ...
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
