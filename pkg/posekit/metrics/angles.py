"""
Illegal joint angles with a static-limit checker.

The bend of limb joint k is the interior angle at parent(k) between the
segment going to k and the segment going to parent(parent(k)); a straight limb
measures 180 degrees. A bend is illegal when it leaves the configured
[lo, hi] range of k.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from posekit.exceptions import InvalidConfig, ShapeMismatch, ZeroLengthBone
from posekit.io.jsonio import read_json
from posekit.representation.representation import Pose, joints_to_bones_array
from posekit.skeleton.presets import H36M_ANGLE_LIMITS
from posekit.skeleton.skeleton import SkeletonTopology

logger = logging.getLogger(__name__)

CHECKER = "static-limit checker"
ZERO_LENGTH = 1e-9


@dataclass(frozen=True)
class AngleLimits:
    """Allowed bend range in degrees per limb joint name, each within [0, 180]."""

    limits: dict = field(default_factory=lambda: dict(H36M_ANGLE_LIMITS))

    def __post_init__(self):
        checked = {}
        for name, bounds in self.limits.items():
            try:
                lo, hi = (float(b) for b in bounds)
            except (TypeError, ValueError):
                raise InvalidConfig(f"[!] Angle limit for '{name}' must be [lo, hi], got {bounds!r}.") from None
            if not 0.0 <= lo <= hi <= 180.0:
                raise InvalidConfig(f"[!] Angle limit for '{name}' must satisfy 0 <= lo <= hi <= 180, got [{lo}, {hi}].")
            checked[str(name)] = (lo, hi)
        object.__setattr__(self, "limits", checked)

    def range_of(self, name: str) -> tuple[float, float]:
        try:
            return self.limits[name]
        except KeyError:
            raise InvalidConfig(f"[!] No angle limit configured for limb joint '{name}'.") from None

    def to_dict(self) -> dict:
        return {name: list(bounds) for name, bounds in self.limits.items()}

    @classmethod
    def from_dict(cls, data: dict) -> "AngleLimits":
        return cls(limits=dict(data))

    @classmethod
    def load(cls, path: str | Path) -> "AngleLimits":
        data = read_json(path)
        if not isinstance(data, dict):
            raise InvalidConfig("[!] Angle limits must be a JSON object keyed by joint name.")
        return cls.from_dict(data)


@dataclass(frozen=True)
class AngleReport:
    """Illegal-angle counts; `rate` excludes the undefined (zero-length) cases."""

    rate: float
    per_joint: dict
    illegal: int
    checked: int
    undefined: int
    checker: str = CHECKER

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "per_joint": self.per_joint,
            "illegal": self.illegal,
            "checked": self.checked,
            "undefined": self.undefined,
            "checker": self.checker,
        }


def bend_angles(joints, topology: SkeletonTopology, k: int) -> np.ndarray:
    """
    Bend angle (degrees) at parent(k) for every sample of an (..., K, 3) array.

    Returns NaN where either segment has zero length.
    """
    bones = joints_to_bones_array(joints, topology)
    parent = topology.parent_of(k)
    toward_child = -bones[..., k - 1, :]
    toward_grandparent = bones[..., parent - 1, :]
    norms = np.linalg.norm(toward_child, axis=-1) * np.linalg.norm(toward_grandparent, axis=-1)
    cosine = np.einsum("...c,...c->...", toward_child, toward_grandparent)
    with np.errstate(invalid="ignore", divide="ignore"):
        cosine = np.clip(cosine / norms, -1.0, 1.0)
    angles = np.degrees(np.arccos(cosine))
    lengths = np.minimum(
        np.linalg.norm(toward_child, axis=-1), np.linalg.norm(toward_grandparent, axis=-1)
    )
    return np.where(lengths < ZERO_LENGTH, np.nan, angles)


def bend_angle(pose: Pose, topology: SkeletonTopology, k: int) -> float:
    """Bend angle of one pose at limb joint k, in degrees."""
    if pose.dims != 3:
        raise ShapeMismatch(f"[!] Bend angles are measured on 3D poses, got {pose.dims}D.")
    angle = float(bend_angles(pose.coords, topology, k))
    if np.isnan(angle):
        raise ZeroLengthBone(f"[!] A segment at joint '{topology.name_of(k)}' has zero length.")
    return angle


def illegal_angle_rate(preds, topology: SkeletonTopology, limits: AngleLimits | None = None) -> AngleReport:
    """
    Fraction of limb-joint bends outside their allowed range.

    Parameters
    ----------
    preds : collection of Pose
        3D predictions.
    topology : SkeletonTopology
        Its `limb_joints` are checked; torso joints never are.
    limits : AngleLimits, optional
        Defaults to the built-in ranges.

    Returns
    -------
    AngleReport
        Overall rate, per-joint rates keyed by joint name and the counts.
    """
    limits = AngleLimits() if limits is None else limits
    poses = list(preds)
    if any(p.dims != 3 for p in poses):
        raise ShapeMismatch("[!] Illegal angles are measured on 3D poses only.")
    if not poses or not topology.limb_joints:
        return AngleReport(rate=0.0, per_joint={}, illegal=0, checked=0, undefined=0)

    joints = np.stack([p.coords for p in poses])
    per_joint, illegal, checked, undefined = {}, 0, 0, 0
    for k in topology.limb_joints:
        name = topology.name_of(k)
        lo, hi = limits.range_of(name)
        angles = bend_angles(joints, topology, k)
        defined = ~np.isnan(angles)
        outside = defined & ((angles < lo) | (angles > hi))
        joint_checked = int(defined.sum())
        per_joint[name] = float(outside.sum()) / joint_checked if joint_checked else 0.0
        illegal += int(outside.sum())
        checked += joint_checked
        undefined += int((~defined).sum())

    if undefined:
        logger.warning("%d bend angles were undefined (zero-length segments) and skipped.", undefined)
    return AngleReport(
        rate=illegal / checked if checked else 0.0,
        per_joint=per_joint,
        illegal=illegal,
        checked=checked,
        undefined=undefined,
    )
