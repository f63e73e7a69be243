from dataclasses import dataclass, replace

import numpy as np

from posekit.exceptions import ShapeMismatch
from posekit.geometry.camera import PinholeCamera
from posekit.skeleton.skeleton import SkeletonTopology


def _as_coordinate_array(values, what: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    if array.ndim != 2 or array.shape[1] not in (2, 3):
        raise ShapeMismatch(f"[!] {what} must be a (K, 2) or (K, 3) array, got shape {array.shape}.")
    if not np.all(np.isfinite(array)):
        raise ShapeMismatch(f"[!] {what} contains non-finite coordinates.")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Pose:
    """
    Joint coordinates of one sample, relative to the frame origin J_0.

    3D poses are in mm; 2D poses are in pixels from the top-left image corner.

    Parameters
    ----------
    coords : array_like, shape (K, 2) or (K, 3)
        Row k - 1 holds joint k.
    sample_id : str
        Identifier carried through files and reports.
    subject : str
        Subject identifier, used to group samples for Bone Std.
    camera : PinholeCamera, optional
        Intrinsics of the image the sample came from.
    root_depth : float, optional
        Camera-space depth of the root joint in mm, for image-depth frames.
    """

    coords: np.ndarray
    sample_id: str = ""
    subject: str = ""
    camera: PinholeCamera | None = None
    root_depth: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "coords", _as_coordinate_array(self.coords, "Pose coordinates"))

    @property
    def dims(self) -> int:
        return self.coords.shape[1]

    @property
    def num_joints(self) -> int:
        return self.coords.shape[0]

    @property
    def is_3d(self) -> bool:
        return self.dims == 3

    def with_coords(self, coords) -> "Pose":
        return replace(self, coords=coords)

    def check_topology(self, topology: SkeletonTopology):
        if self.num_joints != topology.num_joints:
            raise ShapeMismatch(
                f"[!] Pose '{self.sample_id}' has {self.num_joints} joints, skeleton has {topology.num_joints}."
            )


@dataclass(frozen=True, eq=False)
class BonePose:
    """Bone vectors B_k = J_parent(k) - J_k, in the units of the source pose."""

    bones: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bones", _as_coordinate_array(self.bones, "Bone vectors"))

    @property
    def dims(self) -> int:
        return self.bones.shape[1]

    @property
    def num_joints(self) -> int:
        return self.bones.shape[0]

    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.bones, axis=-1)


def _parent_rows(topology: SkeletonTopology) -> np.ndarray:
    return np.asarray(topology.parent, dtype=np.intp)


def with_origin(joints: np.ndarray) -> np.ndarray:
    """Prepend the zero origin row: (..., K, d) -> (..., K + 1, d), so row index == joint index."""
    joints = np.asarray(joints, dtype=np.float64)
    origin = np.zeros(joints.shape[:-2] + (1, joints.shape[-1]), dtype=np.float64)
    return np.concatenate([origin, joints], axis=-2)


def joints_to_bones_array(joints: np.ndarray, topology: SkeletonTopology) -> np.ndarray:
    """Vectorized B_k = J_parent(k) - J_k over any leading batch shape."""
    joints = np.asarray(joints, dtype=np.float64)
    if joints.shape[-2] != topology.num_joints:
        raise ShapeMismatch(
            f"[!] Expected {topology.num_joints} joints, got array of shape {joints.shape}."
        )
    padded = with_origin(joints)
    return padded[..., _parent_rows(topology), :] - joints


def bones_to_joints_array(bones: np.ndarray, topology: SkeletonTopology) -> np.ndarray:
    """Root-to-leaf accumulation J_k = J_parent(k) - B_k over any leading batch shape."""
    bones = np.asarray(bones, dtype=np.float64)
    if bones.shape[-2] != topology.num_joints:
        raise ShapeMismatch(
            f"[!] Expected {topology.num_joints} bones, got array of shape {bones.shape}."
        )
    padded = np.zeros(bones.shape[:-2] + (topology.num_joints + 1, bones.shape[-1]), dtype=np.float64)
    for k in topology.topological_order:
        padded[..., k, :] = padded[..., topology.parent[k - 1], :] - bones[..., k - 1, :]
    return padded[..., 1:, :]


def joints_to_bones(pose: Pose, topology: SkeletonTopology) -> BonePose:
    """
    Reparameterize a pose as bones.

    Parameters
    ----------
    pose : Pose
        Joint coordinates; J_0 is the zero vector of the frame.
    topology : SkeletonTopology
        Tree the bones follow.

    Returns
    -------
    BonePose
        bones[k - 1] = J_parent(k) - J_k.
    """
    pose.check_topology(topology)
    return BonePose(joints_to_bones_array(pose.coords, topology))


def bones_to_joints(bones: BonePose, topology: SkeletonTopology, **meta) -> Pose:
    """
    Exact inverse of `joints_to_bones`.

    Extra keyword arguments (sample_id, subject, camera, root_depth) are passed
    to the returned Pose.
    """
    if bones.num_joints != topology.num_joints:
        raise ShapeMismatch(
            f"[!] BonePose has {bones.num_joints} bones, skeleton has {topology.num_joints}."
        )
    return Pose(bones_to_joints_array(bones.bones, topology), **meta)


def stack_coords(poses, dims: int | None = None) -> np.ndarray:
    """Stack pose coordinates into an (N, K, d) array; all poses must share d."""
    poses = list(poses)
    if not poses:
        raise ShapeMismatch("[!] Cannot stack an empty pose collection.")
    dims = poses[0].dims if dims is None else dims
    if any(p.dims != dims for p in poses):
        raise ShapeMismatch(f"[!] Poses mix dimensionalities; expected all {dims}D.")
    return np.stack([p.coords for p in poses])
