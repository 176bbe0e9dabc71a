"""Dataset loading for the sequential-pixel task: IDX and CSV layouts,
grey-value normalization and downsampling helpers."""

from __future__ import annotations

import struct

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed dataset files; the message carries the byte offset
    or line number where parsing failed."""


_IDX_DTYPES = {0x08: np.uint8, 0x09: np.int8, 0x0B: ">i2", 0x0C: ">i4",
               0x0D: ">f4", 0x0E: ">f8"}


def load_idx(path: str) -> np.ndarray:
    """Parse one IDX-format array (big-endian, magic 0x0000TTNN)."""
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 4:
        raise DatasetError(f"{path}: truncated header at offset {len(data)}")
    zero, dtype_code, ndim = struct.unpack(">HBB", data[:4])
    if zero != 0 or dtype_code not in _IDX_DTYPES:
        raise DatasetError(f"{path}: bad magic at offset 0")
    header_len = 4 + 4 * ndim
    if len(data) < header_len:
        raise DatasetError(f"{path}: truncated dimension list at offset {len(data)}")
    shape = struct.unpack(f">{ndim}I", data[4:header_len])
    arr = np.frombuffer(data, dtype=_IDX_DTYPES[dtype_code], offset=header_len)
    expected = int(np.prod(shape))
    if arr.size != expected:
        raise DatasetError(f"{path}: payload has {arr.size} items, header promises "
                           f"{expected} (offset {header_len})")
    return arr.reshape(shape)


def load_csv_dataset(path: str) -> tuple[np.ndarray, np.ndarray]:
    """CSV rows `label,pixel0,pixel1,...`; returns (images, labels)."""
    rows = []
    labels = []
    width = None
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if width is None:
                width = len(parts)
                if width < 2:
                    raise DatasetError(f"{path}:{lineno}: need label plus pixels")
            elif len(parts) != width:
                raise DatasetError(f"{path}:{lineno}: expected {width} fields, got {len(parts)}")
            try:
                labels.append(int(float(parts[0])))
                rows.append([float(p) for p in parts[1:]])
            except ValueError as exc:
                raise DatasetError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise DatasetError(f"{path}: empty dataset")
    return np.array(rows), np.array(labels, dtype=int)


def normalize_gray(images: np.ndarray) -> np.ndarray:
    """Scale grey values into [0, 1] (no-op if already there)."""
    images = np.asarray(images, dtype=float)
    top = images.max()
    if top > 1.0:
        images = images / 255.0 if top <= 255.0 else images / top
    return np.clip(images, 0.0, 1.0)


def downsample_images(images: np.ndarray, factor: int) -> np.ndarray:
    """Block-mean downsampling of square flattened images by an integer factor."""
    images = np.atleast_2d(images)
    n, p = images.shape
    side = int(round(np.sqrt(p)))
    if side * side != p:
        raise DatasetError(f"images are not square ({p} pixels)")
    if side % factor != 0:
        raise DatasetError(f"side {side} not divisible by factor {factor}")
    s = side // factor
    return (images.reshape(n, s, factor, s, factor).mean(axis=(2, 4)).reshape(n, s * s))


def resize_images(images: np.ndarray, side_out: int) -> np.ndarray:
    """Bilinear resize of square flattened images to side_out x side_out."""
    images = np.atleast_2d(np.asarray(images, dtype=float))
    n, p = images.shape
    side = int(round(np.sqrt(p)))
    if side * side != p:
        raise DatasetError(f"images are not square ({p} pixels)")
    if side_out == side:
        return images.copy()
    grid = images.reshape(n, side, side)
    coords = np.linspace(0, side - 1, side_out)
    lo = np.floor(coords).astype(int)
    hi = np.minimum(lo + 1, side - 1)
    frac = coords - lo
    rows = grid[:, lo] * (1 - frac)[None, :, None] + grid[:, hi] * frac[None, :, None]
    out = rows[:, :, lo] * (1 - frac)[None, None, :] + rows[:, :, hi] * frac[None, None, :]
    return out.reshape(n, side_out * side_out)


def load_dataset(path: str, kind: str, *, labels_path: str | None = None,
                 downsample: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Load (images, labels) with grey values normalized to [0, 1].

    kind="idx" reads an IDX image file plus labels_path; kind="csv" reads
    label-first rows from one file. downsample applies block-mean reduction.
    """
    if kind == "idx":
        if labels_path is None:
            raise DatasetError("idx datasets need labels_path")
        images = load_idx(path)
        labels = load_idx(labels_path).astype(int)
        images = images.reshape(images.shape[0], -1).astype(float)
    elif kind == "csv":
        images, labels = load_csv_dataset(path)
    else:
        raise DatasetError(f"unknown dataset kind {kind!r}")
    if images.shape[0] != labels.shape[0]:
        raise DatasetError("image/label count mismatch")
    if np.any(labels < 0) or np.any(labels > 9):
        raise DatasetError("labels must be digits 0-9")
    images = normalize_gray(images)
    if downsample and downsample > 1:
        images = downsample_images(images, downsample)
    return images, labels
