"""Dataset file formats.

Native format (JSON lines, UTF-8), one object per line:
    line 1 header:
        {"format": "skelseq/1", "joint_count": N, "class_names": [...], "unit": "m"}
    data lines:
        {"sequence_id": str, "subject": int, "label": int,
         "frames": [[[x, y, z], ... N joints], ... T frames]}

Florence world-coordinates text: whitespace-separated columns per line,
one line per frame:
    video_id actor_id category x1 y1 z1 x2 y2 z2 ...
Lines are grouped into sequences by video id (order of first appearance,
not adjacency); categories are re-indexed densely in ascending order.
"""

import json
from pathlib import Path

import numpy as np

from skelmetric.data import ActionSequence, Dataset
from skelmetric.errors import ParseError, SchemaError, ValidationError

NATIVE_FORMAT = "skelseq/1"


def _require(obj, key, kind, line):
    if key not in obj:
        raise ParseError(f"missing key {key!r}", line=line)
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ParseError(f"key {key!r} must be an exact integer", line=line)
    if kind is str and not isinstance(value, str):
        raise ParseError(f"key {key!r} must be a string", line=line)
    if kind is list and not isinstance(value, list):
        raise ParseError(f"key {key!r} must be a list", line=line)
    return value


def parse_native(path):
    """Read a native-format dataset file."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise ValidationError(f"{path}: empty dataset file")

    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in header: {exc.msg}", line=1) from exc
    if not isinstance(header, dict) or header.get("format") != NATIVE_FORMAT:
        raise SchemaError(
            f"{path}: expected header with format {NATIVE_FORMAT!r}"
        )
    joint_count = _require(header, "joint_count", int, 1)
    class_names = _require(header, "class_names", list, 1)
    unit = header.get("unit", "m")
    if joint_count < 1 or not class_names:
        raise SchemaError(f"{path}: header declares no joints or no classes")

    sequences = []
    for lineno, raw in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from exc
        seq_id = _require(rec, "sequence_id", str, lineno)
        subject = _require(rec, "subject", int, lineno)
        label = _require(rec, "label", int, lineno)
        frames_raw = _require(rec, "frames", list, lineno)
        if not frames_raw:
            raise ParseError(f"sequence {seq_id!r} has no frames", line=lineno)
        try:
            frames = np.asarray(frames_raw, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"non-numeric frame data: {exc}", line=lineno) from exc
        if frames.ndim != 3 or frames.shape[2] != 3:
            raise ParseError(
                f"frames must be T x {joint_count} x 3, got shape {frames.shape}",
                line=lineno,
            )
        if frames.shape[1] != joint_count:
            raise SchemaError(
                f"line {lineno}: sequence {seq_id!r} has {frames.shape[1]} joints, "
                f"header declares {joint_count}"
            )
        if not 0 <= label < len(class_names):
            raise SchemaError(
                f"line {lineno}: label {label} outside [0, {len(class_names)})"
            )
        sequences.append(ActionSequence(seq_id, subject, label, frames))
    if not sequences:
        raise ValidationError(f"{path}: header but no sequences")
    return Dataset(tuple(sequences), tuple(class_names), joint_count, unit)


def save_native(ds, path):
    """Write a dataset in the native format; parse_native inverts exactly."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "format": NATIVE_FORMAT,
            "joint_count": ds.joint_count,
            "class_names": list(ds.class_names),
            "unit": ds.unit,
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for seq in ds.sequences:
            rec = {
                "sequence_id": seq.sequence_id,
                "subject": seq.subject_id,
                "label": seq.label,
                "frames": seq.frames.tolist(),
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return path


def parse_florence(path):
    """Read a Florence-style world-coordinates text file."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw_lines = fh.read().splitlines()

    frames_by_video = {}
    meta_by_video = {}
    n_cols = None
    for lineno, raw in enumerate(raw_lines, start=1):
        if not raw.strip():
            continue
        cols = raw.split()
        if n_cols is None:
            n_cols = len(cols)
            if n_cols < 6 or (n_cols - 3) % 3 != 0:
                raise SchemaError(
                    f"{path}: line {lineno} has {n_cols} columns; expected "
                    "video_id actor_id category plus 3N coordinates"
                )
        elif len(cols) != n_cols:
            raise SchemaError(
                f"{path}: line {lineno} has {len(cols)} columns, "
                f"first line had {n_cols}"
            )
        try:
            video_id = int(cols[0])
            actor_id = int(cols[1])
            category = int(cols[2])
        except ValueError as exc:
            raise ParseError(f"non-integer id field: {exc}", line=lineno) from exc
        try:
            coords = np.array([float(c) for c in cols[3:]])
        except ValueError as exc:
            raise ParseError(f"non-numeric coordinate: {exc}", line=lineno) from exc
        frames_by_video.setdefault(video_id, []).append(coords.reshape(-1, 3))
        prev = meta_by_video.setdefault(video_id, (actor_id, category))
        if prev != (actor_id, category):
            raise SchemaError(
                f"{path}: line {lineno}: video {video_id} changes actor/category"
            )
    if not frames_by_video:
        raise ValidationError(f"{path}: no data lines")

    joint_count = (n_cols - 3) // 3
    categories = sorted({meta[1] for meta in meta_by_video.values()})
    label_of = {cat: idx for idx, cat in enumerate(categories)}
    sequences = []
    for video_id, frames in frames_by_video.items():
        actor_id, category = meta_by_video[video_id]
        sequences.append(
            ActionSequence(
                sequence_id=f"video_{video_id}",
                subject_id=actor_id,
                label=label_of[category],
                frames=np.stack(frames),
            )
        )
    class_names = tuple(f"category_{c}" for c in categories)
    return Dataset(tuple(sequences), class_names, joint_count, unit="m")
