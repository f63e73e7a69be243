"""
Synthetic kinematic pose datasets with known ground truth.

Poses come from forward kinematics over the skeleton: every segment keeps a
fixed length (per subject) and is turned by a random local rotation on top of
its parent's, under a random yaw of the whole body. The regression input is
the flattened pose plus Gaussian noise.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

from posekit.exceptions import InvalidConfig
from posekit.geometry.camera import PinholeCamera, project
from posekit.io.jsonio import read_json
from posekit.io.records import pose_to_record, write_records
from posekit.representation.representation import Pose
from posekit.skeleton.presets import (
    H36M_ANGLE_RANGES,
    H36M_BONE_LENGTHS,
    H36M_REST_DIRECTIONS,
    h36m_skeleton,
)
from posekit.skeleton.skeleton import ORIGIN, SkeletonTopology

logger = logging.getLogger(__name__)

ROOT_RELATIVE = "root-relative"
IMAGE_DEPTH = "image-depth"


@dataclass(frozen=True)
class SynthConfig:
    """
    Generator settings.

    Parameters
    ----------
    topology : SkeletonTopology
    bone_lengths : tuple of float
        Segment length (mm) per joint; the root sits at the frame origin so its
        entry is ignored, every other entry must be positive.
    rest_directions : tuple of (float, float, float)
        Rest-pose direction of each segment (parent -> joint).
    angle_ranges : tuple of float
        Largest local rotation per segment, degrees.
    noise : float
        Std of the Gaussian feature noise.
    num_samples, seed : int
    fraction_2d : float
        Share of samples whose label drops z (image-depth frame).
    camera : PinholeCamera
        Camera the image-depth frame projects through.
    root_depth : float
        Camera-space depth of the root, mm.
    yaw_range : float
        Whole-body yaw is uniform in [-yaw_range, yaw_range] degrees.
    num_subjects : int
        Subjects share the template, each with its own length scale.
    subject_scale_jitter : float
        Subject scales are uniform in [1 - jitter, 1 + jitter].
    """

    topology: SkeletonTopology = field(default_factory=h36m_skeleton)
    bone_lengths: tuple = H36M_BONE_LENGTHS
    rest_directions: tuple = H36M_REST_DIRECTIONS
    angle_ranges: tuple = H36M_ANGLE_RANGES
    noise: float = 2.0
    num_samples: int = 2500
    seed: int = 0
    fraction_2d: float = 0.0
    camera: PinholeCamera = field(default_factory=lambda: PinholeCamera(1000.0, 1000.0, 500.0, 500.0))
    root_depth: float = 5000.0
    yaw_range: float = 90.0
    num_subjects: int = 5
    subject_scale_jitter: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "bone_lengths", tuple(float(x) for x in self.bone_lengths))
        object.__setattr__(self, "angle_ranges", tuple(float(x) for x in self.angle_ranges))
        object.__setattr__(self, "rest_directions", tuple(tuple(float(c) for c in d) for d in self.rest_directions))
        self.validate()

    def validate(self):
        self.topology.validate()
        num_joints = self.topology.num_joints
        for name in ("bone_lengths", "rest_directions", "angle_ranges"):
            if len(getattr(self, name)) != num_joints:
                raise InvalidConfig(f"[!] {name} has {len(getattr(self, name))} entries for {num_joints} joints.")
        for k in self.topology.body_bones:
            if not self.bone_lengths[k - 1] > 0:
                raise InvalidConfig(f"[!] Bone length of '{self.topology.name_of(k)}' must be positive.")
            direction = self.rest_directions[k - 1]
            if len(direction) != 3 or np.linalg.norm(direction) == 0:
                raise InvalidConfig(f"[!] Rest direction of '{self.topology.name_of(k)}' must be a nonzero 3-vector.")
        if any(not 0.0 <= r <= 180.0 for r in self.angle_ranges):
            raise InvalidConfig("[!] Angle ranges must lie in [0, 180] degrees.")
        if not 0.0 <= self.fraction_2d <= 1.0:
            raise InvalidConfig(f"[!] fraction_2d must lie in [0, 1], got {self.fraction_2d}.")
        if self.noise < 0:
            raise InvalidConfig(f"[!] Feature noise must be non-negative, got {self.noise}.")
        if self.num_samples < 1 or self.num_subjects < 1:
            raise InvalidConfig("[!] num_samples and num_subjects must be positive.")
        if not 0.0 <= self.subject_scale_jitter < 1.0:
            raise InvalidConfig(f"[!] subject_scale_jitter must lie in [0, 1), got {self.subject_scale_jitter}.")
        if not self.root_depth > 0:
            raise InvalidConfig(f"[!] root_depth must be positive, got {self.root_depth}.")
        if not 0.0 <= self.yaw_range <= 180.0:
            raise InvalidConfig(f"[!] yaw_range must lie in [0, 180] degrees, got {self.yaw_range}.")

    @property
    def frame(self) -> str:
        return IMAGE_DEPTH if self.fraction_2d > 0 else ROOT_RELATIVE

    def with_overrides(self, **changes) -> "SynthConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "topology": self.topology.to_dict(),
            "bone_lengths": list(self.bone_lengths),
            "rest_directions": [list(d) for d in self.rest_directions],
            "angle_ranges": list(self.angle_ranges),
            "noise": self.noise,
            "num_samples": self.num_samples,
            "seed": self.seed,
            "fraction_2d": self.fraction_2d,
            "camera": self.camera.to_dict(),
            "root_depth": self.root_depth,
            "yaw_range": self.yaw_range,
            "num_subjects": self.num_subjects,
            "subject_scale_jitter": self.subject_scale_jitter,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SynthConfig":
        """
        Build a config from JSON data; missing keys keep their defaults.

        A custom skeleton is given inline as "topology" or as a "skeleton" file
        path and then needs its own lengths, directions and ranges.
        """
        data = dict(data)
        known = set(cls.__dataclass_fields__) | {"skeleton"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidConfig(f"[!] Unknown synth config keys: {unknown}.")
        if "skeleton" in data:
            data["topology"] = SkeletonTopology.load(data.pop("skeleton"))
        elif "topology" in data:
            data["topology"] = SkeletonTopology.from_dict(data["topology"])
        if "topology" in data and data["topology"].parent != h36m_skeleton().parent:
            missing = [k for k in ("bone_lengths", "rest_directions", "angle_ranges") if k not in data]
            if missing:
                raise InvalidConfig(f"[!] A custom skeleton needs explicit {missing}.")
        if "camera" in data:
            data["camera"] = PinholeCamera.from_dict(data["camera"])
        try:
            return cls(**data)
        except (TypeError, ValueError) as error:
            if isinstance(error, InvalidConfig):
                raise
            raise InvalidConfig(f"[!] Invalid synth config: {error}") from None

    @classmethod
    def load(cls, path: str | Path) -> "SynthConfig":
        return cls.from_dict(read_json(path))


@dataclass(frozen=True, eq=False)
class SynthDataset:
    """
    Generated samples.

    Attributes
    ----------
    poses : tuple of Pose
        Labels in the working frame; 2D-tagged samples carry only u, v.
    features : numpy.ndarray, shape (N, 3K)
        Flattened full working-frame pose plus noise.
    camera_poses : numpy.ndarray, shape (N, K, 3)
        Root-relative camera-space ground truth (mm) for every sample.
    frame : str
        "root-relative" (mm) or "image-depth" (u, v in px, z in mm relative
        to the root depth).
    topology : SkeletonTopology
    subject_scales : dict[str, float]
    """

    poses: tuple
    features: np.ndarray
    camera_poses: np.ndarray
    frame: str
    topology: SkeletonTopology
    subject_scales: dict

    def __len__(self) -> int:
        return len(self.poses)

    @property
    def is_3d(self) -> np.ndarray:
        return np.array([p.is_3d for p in self.poses], dtype=bool)

    @property
    def subjects(self) -> list[str]:
        return [p.subject for p in self.poses]

    def subset(self, indices) -> "SynthDataset":
        indices = np.asarray(indices, dtype=np.intp)
        return replace(
            self,
            poses=tuple(self.poses[i] for i in indices),
            features=self.features[indices],
            camera_poses=self.camera_poses[indices],
        )

    def split(self, num_first: int) -> tuple["SynthDataset", "SynthDataset"]:
        if not 0 < num_first < len(self):
            raise InvalidConfig(f"[!] Cannot split {len(self)} samples at {num_first}.")
        return self.subset(np.arange(num_first)), self.subset(np.arange(num_first, len(self)))

    def ground_truth_3d(self) -> list[Pose]:
        """Root-relative camera-space poses, every sample 3D."""
        return [
            Pose(coords, sample_id=pose.sample_id, subject=pose.subject)
            for pose, coords in zip(self.poses, self.camera_poses)
        ]

    def records(self):
        for pose, features in zip(self.poses, self.features):
            yield pose_to_record(pose, features=features)

    def save(self, path: str | Path):
        write_records(path, self.records())


class PoseGenerator:
    def __init__(self, config: SynthConfig, debug: bool = False):
        """
        Forward-kinematics pose sampler.

        Parameters
        ----------
        config : SynthConfig
            Validated settings; the seed fixes every random draw.
        debug : bool
            If True, log a summary of the generated dataset.
        """
        self.config = config
        self.topology = config.topology
        self.debug = debug
        self.rng = np.random.default_rng(config.seed)

    def _subject_scales(self) -> dict[str, float]:
        jitter = self.config.subject_scale_jitter
        scales = 1.0 + jitter * self.rng.uniform(-1.0, 1.0, size=self.config.num_subjects)
        return {f"S{i + 1}": float(s) for i, s in enumerate(scales)}

    def _local_rotations(self, num: int, max_degrees: float) -> Rotation:
        axes = self.rng.normal(size=(num, 3))
        axes /= np.linalg.norm(axes, axis=1, keepdims=True)
        angles = np.radians(self.rng.uniform(0.0, max_degrees, size=num))
        return Rotation.from_rotvec(axes * angles[:, None])

    def _forward_kinematics(self, scales: np.ndarray) -> np.ndarray:
        num, num_joints = len(scales), self.topology.num_joints
        joints = np.zeros((num, num_joints + 1, 3), dtype=np.float64)
        yaw = np.radians(self.rng.uniform(-self.config.yaw_range, self.config.yaw_range, size=num))
        rotations = {}
        for k in self.topology.topological_order:
            parent = self.topology.parent_of(k)
            if parent == ORIGIN:
                rotations[k] = Rotation.from_rotvec(np.outer(yaw, [0.0, 1.0, 0.0]))
                continue
            rotations[k] = rotations[parent] * self._local_rotations(num, self.config.angle_ranges[k - 1])
            direction = np.asarray(self.config.rest_directions[k - 1], dtype=np.float64)
            segment = direction / np.linalg.norm(direction) * self.config.bone_lengths[k - 1]
            joints[:, k] = joints[:, parent] + scales[:, None] * rotations[k].apply(segment)
        return joints[:, 1:]

    def _working_frame(self, camera_poses: np.ndarray) -> np.ndarray:
        if self.config.frame == ROOT_RELATIVE:
            return camera_poses
        depth_offset = np.array([0.0, 0.0, self.config.root_depth])
        pixels = project(camera_poses + depth_offset, self.config.camera)
        return np.concatenate([pixels, camera_poses[..., 2:]], axis=-1)

    def _planar_mask(self, num: int) -> np.ndarray:
        planar = np.zeros(num, dtype=bool)
        planar[self.rng.permutation(num)[: int(round(self.config.fraction_2d * num))]] = True
        return planar

    def _debug_display(self, dataset: SynthDataset):
        if self.debug:
            logger.info(
                "Generated %d samples (%d 2D) in the %s frame for %d subjects, feature noise %.3g.",
                len(dataset), int((~dataset.is_3d).sum()), dataset.frame,
                len(dataset.subject_scales), self.config.noise,
            )

    def build(self) -> SynthDataset:
        """
        Sample the dataset.

        1. Draw a length scale per subject and a subject per sample.
        2. Run forward kinematics with random yaw and local rotations.
        3. Express the poses in the working frame and tag the 2D samples.
        4. Add feature noise.

        Returns
        -------
        SynthDataset
        """
        num = self.config.num_samples
        subject_scales = self._subject_scales()
        names = list(subject_scales)
        assignment = self.rng.integers(0, len(names), size=num)
        scales = np.array([subject_scales[names[i]] for i in assignment])

        camera_poses = self._forward_kinematics(scales)
        working = self._working_frame(camera_poses)
        planar = self._planar_mask(num)
        features = working.reshape(num, -1) + self.config.noise * self.rng.normal(size=(num, working[0].size))

        image_frame = self.config.frame == IMAGE_DEPTH
        poses = tuple(
            Pose(
                working[i, :, :2] if planar[i] else working[i],
                sample_id=f"{i:06d}",
                subject=names[assignment[i]],
                camera=self.config.camera if image_frame else None,
                root_depth=self.config.root_depth if image_frame else None,
            )
            for i in range(num)
        )
        camera_poses.setflags(write=False)
        features.setflags(write=False)
        dataset = SynthDataset(
            poses=poses,
            features=features,
            camera_poses=camera_poses,
            frame=self.config.frame,
            topology=self.topology,
            subject_scales=subject_scales,
        )
        self._debug_display(dataset)
        return dataset


def generate(config: SynthConfig) -> SynthDataset:
    """Sample a synthetic dataset; the same config always gives the same data."""
    return PoseGenerator(config).build()
