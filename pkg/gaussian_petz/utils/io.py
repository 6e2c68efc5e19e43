# gaussian_petz/utils/io.py
import json
import sys

import numpy as np

from gaussian_petz.utils.errors import StructuralError


def read_json(path):
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            return json.load(fh)
    except FileNotFoundError as e:
        raise StructuralError(f"input file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise StructuralError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from e


def dump_json(payload):
    return json.dumps(payload, indent=2, allow_nan=False)


def write_json(path, payload):
    """Write payload to path, or to stdout when path is None."""
    text = dump_json(payload)
    if path is None:
        sys.stdout.write(text + "\n")
        sys.stdout.flush()
        return
    with open(path, 'w', encoding='utf-8') as fh:
        fh.write(text + "\n")


def require_keys(obj, keys, what):
    if not isinstance(obj, dict):
        raise StructuralError(f"{what}: expected a JSON object, got {type(obj).__name__}")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise StructuralError(f"{what}: missing keys {missing}")


def as_matrix(value, what, shape=None):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise StructuralError(f"{what}: not a real matrix") from e
    if arr.ndim != 2:
        raise StructuralError(f"{what}: expected a 2-d array, got {arr.ndim}-d")
    if shape is not None and arr.shape != tuple(shape):
        raise StructuralError(f"{what}: expected shape {tuple(shape)}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StructuralError(f"{what}: non-finite entries")
    return arr


def as_vector(value, what, length=None):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise StructuralError(f"{what}: not a real vector") from e
    if arr.ndim != 1:
        raise StructuralError(f"{what}: expected a 1-d array, got {arr.ndim}-d")
    if length is not None and arr.shape[0] != length:
        raise StructuralError(f"{what}: expected length {length}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise StructuralError(f"{what}: non-finite entries")
    return arr


def matrix_to_json(arr):
    return [[float(v) for v in row] for row in np.asarray(arr)]


def vector_to_json(arr):
    return [float(v) for v in np.asarray(arr)]
