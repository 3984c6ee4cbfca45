"""Versioned model checkpoints.

A checkpoint is a JSON document with the topology descriptor plus every
parameter tensor encoded as base64 little-endian float64 bytes, in the
same fixed order as SiameseModel.parameters(). Loading a saved model
reproduces bitwise-equal parameters.
"""

import base64
import json
from pathlib import Path

import numpy as np

from skelmetric.errors import CheckpointError
from skelmetric.nn import LinearParams, LstmParams
from skelmetric.siamese import SiameseModel, SiameseTopology

CHECKPOINT_FORMAT = "slstm-checkpoint/1"


def _encode_tensor(arr):
    arr = np.ascontiguousarray(arr, dtype="<f8")
    return {
        "shape": list(arr.shape),
        "dtype": "float64",
        "data": base64.b64encode(arr.tobytes()).decode("ascii"),
    }


def _decode_tensor(obj):
    try:
        shape = tuple(obj["shape"])
        raw = base64.b64decode(obj["data"])
        arr = np.frombuffer(raw, dtype="<f8").reshape(shape).copy()
    except (KeyError, TypeError, ValueError) as exc:
        raise CheckpointError(f"malformed tensor record: {exc}") from exc
    return arr


def save_model(model, path):
    doc = {
        "format": CHECKPOINT_FORMAT,
        "topology": {
            "input_dim": model.topology.input_dim,
            "hidden_dims": list(model.topology.hidden_dims),
            "head_dims": list(model.topology.head_dims),
        },
        "encoder": [
            {
                "w_x": _encode_tensor(layer.w_x),
                "w_h": _encode_tensor(layer.w_h),
                "b": _encode_tensor(layer.b),
            }
            for layer in model.encoder
        ],
        "head": [
            {
                "weight": _encode_tensor(layer.weight),
                "bias": _encode_tensor(layer.bias),
            }
            for layer in model.head
        ],
    }
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return path


def load_model(path):
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"{path}: not a valid checkpoint: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path}: unknown checkpoint format")
    try:
        topo = SiameseTopology(
            input_dim=doc["topology"]["input_dim"],
            hidden_dims=tuple(doc["topology"]["hidden_dims"]),
            head_dims=tuple(doc["topology"]["head_dims"]),
        )
        encoder = [
            LstmParams(
                _decode_tensor(layer["w_x"]),
                _decode_tensor(layer["w_h"]),
                _decode_tensor(layer["b"]),
            )
            for layer in doc["encoder"]
        ]
        head = [
            LinearParams(_decode_tensor(layer["weight"]), _decode_tensor(layer["bias"]))
            for layer in doc["head"]
        ]
        model = SiameseModel(topo, encoder, head)
    except CheckpointError:
        raise
    except Exception as exc:
        raise CheckpointError(f"{path}: inconsistent checkpoint contents: {exc}") from exc
    return model
