"""Versioned binary checkpoints.

Layout: 8-byte magic, uint32 format version, uint64 header length, a JSON
header describing scalars and the named array table (dtype/shape/order), the
raw little-endian array payloads in table order, and a SHA-256 checksum over
everything before it. Save -> load -> save is byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from .network import NetworkParams, NeuronParams
from .optimizers import AdamState

MAGIC = b"LSNNCKPT"
FORMAT_VERSION = 1


class CheckpointError(RuntimeError):
    """Raised on corrupted files, bad magic, or version mismatch."""


@dataclass
class Checkpoint:
    params: NetworkParams
    adam: AdamState | None
    iteration: int
    rng_state: dict | None


def _canonical(arr: np.ndarray) -> tuple[np.ndarray, str]:
    arr = np.ascontiguousarray(arr)
    if arr.dtype == bool:
        return arr, "|b1"
    if np.issubdtype(arr.dtype, np.integer):
        return arr.astype("<i8"), "<i8"
    return arr.astype("<f8"), "<f8"


def _collect_arrays(ckpt: Checkpoint) -> dict[str, np.ndarray]:
    p = ckpt.params
    arrays = {
        "w_in": p.w_in, "w_rec": p.w_rec, "w_out": p.w_out,
        "d_in": p.d_in, "d_rec": p.d_rec,
        "mask_in": p.mask_in, "mask_rec": p.mask_rec, "mask_out": p.mask_out,
        "neuron.tau_m": p.neuron.tau_m, "neuron.tau_a": p.neuron.tau_a,
        "neuron.beta": p.neuron.beta,
    }
    for name, val in (("signs_in", p.signs_in), ("signs_rec", p.signs_rec),
                      ("noise_sigma", p.noise_sigma)):
        if val is not None:
            arrays[name] = val
    if ckpt.adam is not None:
        for group in ("m", "v"):
            for k, v in getattr(ckpt.adam, group).items():
                arrays[f"adam.{group}.{k}"] = v
        if ckpt.adam.vmax is not None:
            for k, v in ckpt.adam.vmax.items():
                arrays[f"adam.vmax.{k}"] = v
    return arrays


def save_checkpoint(path: str, ckpt: Checkpoint) -> None:
    p = ckpt.params
    scalars = {
        "iteration": int(ckpt.iteration),
        "tau_out": float(p.tau_out),
        "neuron": {"n": int(p.neuron.n), "b0": float(p.neuron.b0),
                   "refractory": float(p.neuron.refractory), "dt": float(p.neuron.dt)},
        "rng_state": ckpt.rng_state,
        "adam": None,
    }
    if ckpt.adam is not None:
        a = ckpt.adam
        scalars["adam"] = {"step": a.step, "beta1": a.beta1, "beta2": a.beta2,
                           "eps": a.eps, "amsgrad": a.amsgrad,
                           "keys": sorted(a.m.keys())}
    arrays = _collect_arrays(ckpt)
    table = []
    payloads = []
    for name in sorted(arrays):
        arr, dtype = _canonical(arrays[name])
        table.append({"name": name, "dtype": dtype, "shape": list(arr.shape)})
        payloads.append(arr.tobytes())
    header = json.dumps({"scalars": scalars, "arrays": table},
                        sort_keys=True, separators=(",", ":")).encode()
    body = MAGIC + struct.pack("<IQ", FORMAT_VERSION, len(header)) + header + b"".join(payloads)
    with open(path, "wb") as f:
        f.write(body)
        f.write(hashlib.sha256(body).digest())


def load_checkpoint(path: str) -> Checkpoint:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < len(MAGIC) + 12 + 32:
        raise CheckpointError(f"{path}: file too short")
    body, digest = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise CheckpointError(f"{path}: checksum mismatch (corrupted file)")
    if body[:8] != MAGIC:
        raise CheckpointError(f"{path}: bad magic")
    version, header_len = struct.unpack("<IQ", body[8:20])
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: format version {version} unsupported "
                              f"(expected {FORMAT_VERSION})")
    header = json.loads(body[20:20 + header_len].decode())
    offset = 20 + header_len
    arrays = {}
    for entry in header["arrays"]:
        dtype = np.dtype(entry["dtype"])
        count = int(np.prod(entry["shape"])) if entry["shape"] else 1
        nbytes = dtype.itemsize * count
        arr = np.frombuffer(body[offset:offset + nbytes], dtype=dtype).reshape(entry["shape"])
        if arr.size != count:
            raise CheckpointError(f"{path}: truncated payload for {entry['name']}")
        arrays[entry["name"]] = arr.copy()
        offset += nbytes
    sc = header["scalars"]
    neuron = NeuronParams(n=sc["neuron"]["n"], tau_m=arrays["neuron.tau_m"],
                          tau_a=arrays["neuron.tau_a"], beta=arrays["neuron.beta"],
                          b0=sc["neuron"]["b0"], refractory=sc["neuron"]["refractory"],
                          dt=sc["neuron"]["dt"])
    params = NetworkParams(
        w_in=arrays["w_in"], w_rec=arrays["w_rec"], w_out=arrays["w_out"],
        neuron=neuron, d_in=arrays["d_in"], d_rec=arrays["d_rec"],
        mask_in=arrays["mask_in"], mask_rec=arrays["mask_rec"], mask_out=arrays["mask_out"],
        signs_in=arrays.get("signs_in"), signs_rec=arrays.get("signs_rec"),
        tau_out=sc["tau_out"], noise_sigma=arrays.get("noise_sigma"))
    adam = None
    if sc["adam"] is not None:
        a = sc["adam"]
        keys = a["keys"]
        vmax = None
        if a["amsgrad"]:
            vmax = {k: arrays[f"adam.vmax.{k}"] for k in keys}
        adam = AdamState(m={k: arrays[f"adam.m.{k}"] for k in keys},
                         v={k: arrays[f"adam.v.{k}"] for k in keys},
                         vmax=vmax, step=a["step"], beta1=a["beta1"], beta2=a["beta2"],
                         eps=a["eps"], amsgrad=a["amsgrad"])
    return Checkpoint(params=params, adam=adam, iteration=sc["iteration"],
                      rng_state=sc["rng_state"])
