import logging
from dataclasses import dataclass, field

import numpy as np

from posekit._parallel import ordered_map
from posekit.exceptions import MixedDims, ShapeMismatch
from posekit.geometry.camera import backproject
from posekit.metrics.angles import CHECKER, AngleLimits, illegal_angle_rate
from posekit.metrics.metrics import (
    bone_error,
    bone_labels,
    bone_std,
    joint_error,
    joint_labels,
    pa_joint_error,
)
from posekit.representation.representation import Pose
from posekit.skeleton.skeleton import SkeletonTopology

logger = logging.getLogger(__name__)

BONE_STD_ORDER = "std within subject, averaged over subjects, then over bones"


@dataclass(frozen=True, eq=False)
class MetricsReport:
    """
    Aggregated evaluation of a prediction set.

    Every error is averaged over the joints (or bones) of a sample first and
    then over the samples. 3D-only entries are None for 2D evaluations.
    """

    dims: int
    num_samples: int
    joint_error: float
    bone_error: float
    pa_joint_error: float | None = None
    pa_joint_error_similarity: float | None = None
    pa_joint_error_rigid: float | None = None
    pa_scale: bool = True
    bone_std: float | None = None
    illegal_angle_rate: float | None = None
    illegal_angle: dict | None = None
    per_joint: dict = field(default_factory=dict)
    per_bone: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    @property
    def units(self) -> str:
        return "mm" if self.dims == 3 else "px"

    def to_dict(self) -> dict:
        return {
            "dims": self.dims,
            "units": self.units,
            "num_samples": self.num_samples,
            "joint_error": self.joint_error,
            "pa_joint_error": self.pa_joint_error,
            "pa_joint_error_similarity": self.pa_joint_error_similarity,
            "pa_joint_error_rigid": self.pa_joint_error_rigid,
            "pa_scale": self.pa_scale,
            "bone_error": self.bone_error,
            "bone_std": self.bone_std,
            "illegal_angle_rate": self.illegal_angle_rate,
            "illegal_angle": self.illegal_angle,
            "per_joint": self.per_joint,
            "per_bone": self.per_bone,
            "notes": self.notes,
        }


class MetricsEvaluator:
    def __init__(
        self,
        preds,
        ground_truth,
        topology: SkeletonTopology,
        angle_limits: AngleLimits | None = None,
        pa_scale: bool = True,
        debug: bool = False,
    ):
        """
        Evaluate predictions against ground truth with every pose metric.

        Parameters
        ----------
        preds, ground_truth : collection of Pose
            Matched by position; ids must agree where both are set.
        topology : SkeletonTopology
            Skeleton of both sets.
        angle_limits : AngleLimits, optional
            Limits for the illegal-angle rate; built-in ranges by default.
        pa_scale : bool
            Which Procrustes mode fills `pa_joint_error` (both are reported).
        debug : bool
            If True, log the headline numbers after building.
        """
        self.preds = list(preds)
        self.ground_truth = list(ground_truth)
        self.topology = topology
        self.angle_limits = AngleLimits() if angle_limits is None else angle_limits
        self.pa_scale = pa_scale
        self.debug = debug

        if not self.preds:
            raise ShapeMismatch("[!] Nothing to evaluate: the prediction set is empty.")
        if len(self.preds) != len(self.ground_truth):
            raise ShapeMismatch(
                f"[!] {len(self.preds)} predictions but {len(self.ground_truth)} ground-truth samples."
            )
        for pred, gt in zip(self.preds, self.ground_truth):
            if pred.sample_id and gt.sample_id and pred.sample_id != gt.sample_id:
                raise ShapeMismatch(f"[!] Prediction '{pred.sample_id}' is matched with ground truth '{gt.sample_id}'.")
            if pred.dims != gt.dims:
                raise MixedDims(f"[!] Sample '{gt.sample_id}' compares {pred.dims}D with {gt.dims}D coordinates.")
            pred.check_topology(topology)
            gt.check_topology(topology)
        dims = {gt.dims for gt in self.ground_truth}
        if len(dims) > 1:
            raise MixedDims("[!] Evaluation sets must be all 2D or all 3D; units are never mixed.")
        self.dims = dims.pop()

    def _joint_errors(self):
        errors = np.stack([joint_error(p, g).values for p, g in zip(self.preds, self.ground_truth)])
        self.joint_error = float(errors.mean(axis=1).mean())
        names = joint_labels(self.topology, self.topology.num_joints)
        self.per_joint = {name: {"joint_error": float(v)} for name, v in zip(names, errors.mean(axis=0))}

    def _bone_errors(self):
        errors = np.stack([bone_error(p, g, self.topology).values for p, g in zip(self.preds, self.ground_truth)])
        if errors.shape[1] == 0:
            self.bone_error = 0.0
            self.per_bone = {}
            return
        self.bone_error = float(errors.mean(axis=1).mean())
        names = bone_labels(self.topology)
        self.per_bone = {name: {"bone_error": float(v)} for name, v in zip(names, errors.mean(axis=0))}

    def _pa_errors(self):
        self.pa = {}
        if self.dims != 3:
            return
        names = joint_labels(self.topology, self.topology.num_joints)
        for mode, scale in (("similarity", True), ("rigid", False)):
            errors = np.stack(
                ordered_map(lambda pair: pa_joint_error(pair[0], pair[1], scale=scale).values,
                            list(zip(self.preds, self.ground_truth)))
            )
            self.pa[mode] = float(errors.mean(axis=1).mean())
            for name, v in zip(names, errors.mean(axis=0)):
                self.per_joint[name][f"pa_joint_error_{mode}"] = float(v)

    def _bone_std(self):
        self.bone_std = None
        if self.dims != 3:
            return
        subjects = [p.subject or g.subject for p, g in zip(self.preds, self.ground_truth)]
        result = bone_std(self.preds, self.topology, subjects=subjects)
        self.bone_std = result.mean
        for name, v in zip(result.labels, result.per_bone):
            self.per_bone[name]["bone_std"] = float(v)

    def _illegal_angles(self):
        self.angles = None
        if self.dims != 3:
            return
        self.angles = illegal_angle_rate(self.preds, self.topology, self.angle_limits)

    def _debug_display(self, report: MetricsReport):
        if self.debug:
            logger.info(
                "Evaluated %d samples: joint %.3f %s, bone %.3f %s, PA %s, bone std %s, illegal %s.",
                report.num_samples, report.joint_error, report.units, report.bone_error, report.units,
                report.pa_joint_error, report.bone_std, report.illegal_angle_rate,
            )

    def build(self) -> MetricsReport:
        """
        Run every metric and assemble the report.

        1. Joint Error and its per-joint breakdown.
        2. Bone Error over the body bones.
        3. PA Joint Error in both similarity and rigid modes (3D).
        4. Bone Std grouped by subject (3D).
        5. Illegal-angle rate over the limb joints (3D).

        Returns
        -------
        MetricsReport
        """
        self._joint_errors()
        self._bone_errors()
        self._pa_errors()
        self._bone_std()
        self._illegal_angles()

        mode = "similarity" if self.pa_scale else "rigid"
        report = MetricsReport(
            dims=self.dims,
            num_samples=len(self.preds),
            joint_error=self.joint_error,
            bone_error=self.bone_error,
            pa_joint_error=self.pa.get(mode),
            pa_joint_error_similarity=self.pa.get("similarity"),
            pa_joint_error_rigid=self.pa.get("rigid"),
            pa_scale=self.pa_scale,
            bone_std=self.bone_std,
            illegal_angle_rate=None if self.angles is None else self.angles.rate,
            illegal_angle=None if self.angles is None else self.angles.to_dict(),
            per_joint=self.per_joint,
            per_bone=self.per_bone,
            notes={"bone_std_order": BONE_STD_ORDER, "illegal_angle_checker": CHECKER, "pa_mode": mode},
        )
        self._debug_display(report)
        return report


def evaluate_poses(
    preds,
    ground_truth,
    topology: SkeletonTopology,
    angle_limits: AngleLimits | None = None,
    pa_scale: bool = True,
) -> MetricsReport:
    """Evaluate matched prediction and ground-truth poses with every metric."""
    return MetricsEvaluator(preds, ground_truth, topology, angle_limits=angle_limits, pa_scale=pa_scale).build()


def backproject_pose(pose: Pose, depths, camera=None) -> Pose:
    """
    Camera-space 3D pose from a 2D pixel pose and per-joint depths (mm).

    Parameters
    ----------
    pose : Pose
        2D pose in pixels; its camera is used unless `camera` is given.
    depths : array_like, shape (K,)
        Camera-space depth of every joint.
    camera : PinholeCamera, optional
    """
    camera = pose.camera if camera is None else camera
    if camera is None:
        raise ShapeMismatch(f"[!] Pose '{pose.sample_id}' carries no camera to back-project with.")
    if pose.dims != 2:
        raise ShapeMismatch(f"[!] Back-projection takes a 2D pose, '{pose.sample_id}' is {pose.dims}D.")
    depths = np.asarray(depths, dtype=np.float64)
    if depths.shape not in ((), (pose.num_joints,)):
        raise ShapeMismatch(f"[!] Expected {pose.num_joints} depths, got shape {depths.shape}.")
    return Pose(
        backproject(pose.coords, depths, camera),
        sample_id=pose.sample_id,
        subject=pose.subject,
        camera=camera,
    )
