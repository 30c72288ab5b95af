"""JSON formats for matrices, states and channels.

A matrix is ``{"shape": [r, c], "re": [...], "im": [...]}`` in row-major
order. A state is ``{"dims": [...], "re": [...], "im": [...]}``: the entry
count decides whether it is a state vector (``prod(dims)`` entries) or a
density matrix (``prod(dims)**2`` entries). A channel is
``{"d_in": n, "d_out": m, "kraus": [matrix, ...]}``. Python floats round-trip
through ``json`` exactly, so all formats are bit-exact.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import KrausChannel
from .errors import EntlockError
from .states import DensityOperator, PureState


class FormatError(EntlockError, ValueError):
    """Malformed serialized object; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"field {field!r}: {message}")
        self.field = field


def _floats(obj: dict, key: str, where: str) -> np.ndarray:
    if key not in obj:
        raise FormatError(f"{where}{key}", "missing")
    try:
        arr = np.asarray(obj[key], dtype=float)
    except (TypeError, ValueError):
        raise FormatError(f"{where}{key}", "must be a list of numbers") from None
    if arr.ndim != 1:
        raise FormatError(f"{where}{key}", "must be a flat list")
    if not np.all(np.isfinite(arr)):
        raise FormatError(f"{where}{key}", "entries must be finite")
    return arr


def _complex(obj: dict, where: str = "") -> np.ndarray:
    if not isinstance(obj, dict):
        raise FormatError(where.rstrip(".") or "<root>", "expected an object")
    re = _floats(obj, "re", where)
    im = _floats(obj, "im", where)
    if re.shape != im.shape:
        raise FormatError(f"{where}im", f"length {im.size} differs from re length {re.size}")
    return re + 1j * im


def matrix_to_dict(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"shape": list(m.shape), "re": m.real.reshape(-1).tolist(), "im": m.imag.reshape(-1).tolist()}


def matrix_from_dict(obj: dict, where: str = "") -> np.ndarray:
    flat = _complex(obj, where)
    shape = obj.get("shape")
    if not isinstance(shape, list) or not all(isinstance(s, int) and s >= 0 for s in shape):
        raise FormatError(f"{where}shape", "must be a list of non-negative integers")
    if int(np.prod(shape)) != flat.size:
        raise FormatError(f"{where}shape", f"{shape} does not match {flat.size} entries")
    return flat.reshape(shape)


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        data = state.vec
    else:
        data = state.mat
    out = {"dims": list(state.dims), "re": data.real.reshape(-1).tolist(), "im": data.imag.reshape(-1).tolist()}
    if isinstance(state, PureState) and state.purifying_factor is not None:
        out["purifying_factor"] = state.purifying_factor
    return out


def state_from_dict(obj: dict):
    flat = _complex(obj)
    dims = obj.get("dims")
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and d >= 1 for d in dims):
        raise FormatError("dims", "must be a nonempty list of positive integers")
    n = int(np.prod(dims))
    pure = flat.size == n and (n > 1 or "purifying_factor" in obj)
    try:
        if pure:
            return PureState(flat, tuple(dims), obj.get("purifying_factor"))
        if flat.size == n * n:
            return DensityOperator(flat.reshape(n, n), tuple(dims))
    except EntlockError as exc:
        raise FormatError("re", str(exc)) from None
    raise FormatError("re", f"{flat.size} entries fit neither a vector nor a matrix on dims {dims}")


def channel_to_dict(ch: KrausChannel) -> dict:
    return {"d_in": ch.d_in, "d_out": ch.d_out, "kraus": [matrix_to_dict(k) for k in ch.kraus]}


def channel_from_dict(obj: dict) -> KrausChannel:
    if not isinstance(obj, dict):
        raise FormatError("<root>", "expected an object")
    for key in ("d_in", "d_out"):
        if not isinstance(obj.get(key), int) or obj[key] < 1:
            raise FormatError(key, "must be a positive integer")
    kraus = obj.get("kraus")
    if not isinstance(kraus, list) or not kraus:
        raise FormatError("kraus", "must be a nonempty list of matrices")
    mats = [matrix_from_dict(k, f"kraus[{i}].") for i, k in enumerate(kraus)]
    try:
        return KrausChannel(tuple(mats), obj["d_in"], obj["d_out"])
    except EntlockError as exc:
        raise FormatError("kraus", str(exc)) from None


def dump(obj: dict, path) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True) + "\n")


def load_state(path):
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError("<root>", f"invalid JSON ({exc.msg})") from None
    return state_from_dict(obj)
