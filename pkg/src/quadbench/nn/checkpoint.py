"""Self-describing JSON checkpoints with bit-exact array round trips.

Arrays are stored as base64 little-endian float64 blobs so that
load(save(net)) reproduces every parameter to the bit.
"""
from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np

from .adam import AdamState
from .dense import DenseNet
from .gaussian import GaussianHead

FORMAT_VERSION = 1


def encode_array(a: np.ndarray) -> str:
    a = np.ascontiguousarray(a, dtype=np.float64)
    return base64.b64encode(a.astype("<f8", copy=False).tobytes()).decode("ascii")


def decode_array(blob: str, shape) -> np.ndarray:
    raw = base64.b64decode(blob.encode("ascii"))
    a = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    return a.reshape(shape).copy()


def net_to_doc(net: DenseNet) -> dict:
    return {
        "layer_sizes": list(net.layer_sizes),
        "activation": "elu",
        "layers": [
            {"weight": encode_array(w), "bias": encode_array(b)}
            for w, b in zip(net.weights, net.biases)
        ],
    }


def net_from_doc(doc: dict) -> DenseNet:
    if doc.get("activation", "elu") != "elu":
        raise ValueError(f"unsupported activation {doc.get('activation')!r}")
    sizes = doc["layer_sizes"]
    net = DenseNet(sizes)
    for i, layer in enumerate(doc["layers"]):
        n_in, n_out = sizes[i], sizes[i + 1]
        net.weights[i] = decode_array(layer["weight"], (n_out, n_in))
        net.biases[i] = decode_array(layer["bias"], (n_out,))
    return net


def adam_to_doc(state: AdamState, params) -> dict:
    return {
        "step_count": state.step_count,
        "beta1": state.beta1,
        "beta2": state.beta2,
        "epsilon": state.epsilon,
        "first_moment": [encode_array(m) for m in state.first_moment],
        "second_moment": [encode_array(v) for v in state.second_moment],
        "shapes": [list(np.shape(p)) for p in params],
    }


def adam_from_doc(doc: dict) -> AdamState:
    shapes = [tuple(s) for s in doc["shapes"]]
    return AdamState(
        first_moment=[decode_array(b, s) for b, s in zip(doc["first_moment"], shapes)],
        second_moment=[decode_array(b, s) for b, s in zip(doc["second_moment"], shapes)],
        step_count=int(doc["step_count"]),
        beta1=float(doc["beta1"]),
        beta2=float(doc["beta2"]),
        epsilon=float(doc["epsilon"]),
    )


def save_policy_checkpoint(path, net: DenseNet, head: GaussianHead | None = None,
                           adam: AdamState | None = None, extra: dict | None = None) -> None:
    """Write a network (+ optional Gaussian head / Adam state) as JSON."""
    doc = {"format_version": FORMAT_VERSION}
    doc.update(net_to_doc(net))
    if head is not None:
        doc["log_std"] = encode_array(head.log_std)
    if adam is not None:
        doc["adam"] = adam_to_doc(adam, net.parameters())
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, sort_keys=True))


def load_policy_checkpoint(path):
    """Read a checkpoint; returns (net, head_or_None, adam_or_None, doc)."""
    try:
        doc = json.loads(Path(path).read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ValueError(f"corrupt checkpoint {path}: {exc}") from exc
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format_version {doc.get('format_version')!r}")
    net = net_from_doc(doc)
    head = None
    if "log_std" in doc:
        blob = doc["log_std"]
        log_std = decode_array(blob, (net.n_outputs,))
        head = GaussianHead(net.n_outputs)
        head.log_std = log_std
    adam = adam_from_doc(doc["adam"]) if "adam" in doc else None
    return net, head, adam, doc
