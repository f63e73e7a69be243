"""
JSON Lines pose files.

One record per line:
    {"id": str, "subject": str, "dims": 2|3, "joints": [[x, y(, z)], ...],
     "camera": {"fx", "fy", "cx", "cy"} (optional), "root_depth": float (optional)}
Blank lines are skipped; every parse error names its file and line.
"""

import json
from pathlib import Path

import numpy as np

from posekit.exceptions import MalformedInput, PoseKitError
from posekit.geometry.camera import PinholeCamera
from posekit.io.jsonio import dumps
from posekit.representation.representation import Pose


def read_records(path: str | Path) -> list[tuple[int, dict]]:
    """Parse every non-blank line of a JSONL file into (line_number, object)."""
    records = []
    try:
        handle = open(path, "rb")
    except OSError as error:
        raise MalformedInput(path, 0, f"cannot open file ({error.strerror})") from None
    with handle:
        for line_number, raw in enumerate(handle, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise MalformedInput(path, line_number, "invalid UTF-8") from None
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as error:
                raise MalformedInput(path, line_number, f"invalid JSON ({error.msg})") from None
            if not isinstance(record, dict):
                raise MalformedInput(path, line_number, "record is not a JSON object")
            records.append((line_number, record))
    return records


def _coordinate_rows(record: dict, key: str, path, line_number: int, dims: int | None) -> np.ndarray:
    if key not in record:
        raise MalformedInput(path, line_number, f"missing '{key}'")
    try:
        rows = np.array(record[key], dtype=np.float64)
    except (TypeError, ValueError):
        raise MalformedInput(path, line_number, f"'{key}' is not a numeric array") from None
    if rows.ndim != 2 or rows.shape[1] not in (2, 3):
        raise MalformedInput(path, line_number, f"'{key}' must be a list of 2- or 3-element rows")
    if dims is not None and rows.shape[1] != dims:
        raise MalformedInput(path, line_number, f"'dims' is {dims} but rows have {rows.shape[1]} coordinates")
    if not np.all(np.isfinite(rows)):
        raise MalformedInput(path, line_number, f"'{key}' contains non-finite values")
    return rows


def pose_from_record(record: dict, path="<record>", line_number: int = 0, key: str = "joints") -> Pose:
    dims = record.get("dims")
    if dims is not None and dims not in (2, 3):
        raise MalformedInput(path, line_number, f"'dims' must be 2 or 3, got {dims!r}")
    coords = _coordinate_rows(record, key, path, line_number, dims)
    try:
        camera = PinholeCamera.from_dict(record["camera"]) if record.get("camera") else None
        root_depth = record.get("root_depth")
        return Pose(
            coords,
            sample_id=str(record.get("id", line_number)),
            subject=str(record.get("subject", "")),
            camera=camera,
            root_depth=None if root_depth is None else float(root_depth),
        )
    except (PoseKitError, TypeError, ValueError) as error:
        raise MalformedInput(path, line_number, str(error)) from None


def pose_to_record(pose: Pose, key: str = "joints", **extra) -> dict:
    record = {"id": pose.sample_id, "subject": pose.subject, "dims": pose.dims, key: pose.coords}
    if pose.camera is not None:
        record["camera"] = pose.camera.to_dict()
    if pose.root_depth is not None:
        record["root_depth"] = pose.root_depth
    record.update(extra)
    return record


def read_poses(path: str | Path, key: str = "joints") -> list[Pose]:
    """Load every pose in a JSONL file; `key` selects the coordinate field."""
    return [pose_from_record(record, path, line_number, key) for line_number, record in read_records(path)]


def write_records(path: str | Path, records):
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(dumps(record))
            handle.write("\n")


def write_poses(path: str | Path, poses, key: str = "joints", extras=None):
    """Write poses as JSONL; `extras` is an optional per-pose list of additional fields."""
    extras = extras if extras is not None else [{}] * len(poses)
    write_records(path, (pose_to_record(pose, key, **extra) for pose, extra in zip(poses, extras)))
