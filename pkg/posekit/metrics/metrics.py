import logging
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from posekit.exceptions import InsufficientSamplesForSubject, MixedDims, ShapeMismatch
from posekit.geometry.procrustes import procrustes_align
from posekit.representation.representation import Pose, joints_to_bones_array
from posekit.skeleton.skeleton import SkeletonTopology

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ErrorBreakdown:
    """Per-joint (or per-bone) errors of one sample and their mean."""

    values: np.ndarray
    labels: tuple[str, ...]

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    def to_dict(self) -> dict[str, float]:
        return {label: float(value) for label, value in zip(self.labels, self.values)}


@dataclass(frozen=True, eq=False)
class BoneStd:
    """
    Bone-length spread: std within each subject, then averaged over subjects.

    Attributes
    ----------
    per_bone : numpy.ndarray
        One value per body bone.
    per_subject : dict[str, numpy.ndarray]
        Within-subject population std per body bone.
    labels : tuple of str
    """

    per_bone: np.ndarray
    per_subject: dict
    labels: tuple[str, ...]

    @property
    def mean(self) -> float:
        return float(self.per_bone.mean())


def _coords(pose) -> np.ndarray:
    return pose.coords if isinstance(pose, Pose) else np.asarray(pose, dtype=np.float64)


def _check_pair(pred: np.ndarray, gt: np.ndarray):
    if pred.shape != gt.shape:
        if pred.ndim == gt.ndim == 2 and pred.shape[0] == gt.shape[0]:
            raise MixedDims(f"[!] Cannot compare {pred.shape[1]}D predictions with {gt.shape[1]}D ground truth.")
        raise ShapeMismatch(f"[!] Prediction {pred.shape} and ground truth {gt.shape} differ in shape.")


def joint_labels(topology: SkeletonTopology | None, num_joints: int) -> tuple[str, ...]:
    if topology is None:
        return tuple(f"joint_{k}" for k in range(1, num_joints + 1))
    return tuple(topology.name_of(k) for k in topology.joints)


def bone_labels(topology: SkeletonTopology) -> tuple[str, ...]:
    """A body bone is named after its child joint."""
    return tuple(topology.name_of(k) for k in topology.body_bones)


def joint_error(pred, gt, topology: SkeletonTopology | None = None) -> ErrorBreakdown:
    """
    Mean per joint position error of one sample.

    Parameters
    ----------
    pred, gt : Pose or array_like, shape (K, d)
        Prediction and ground truth in the same frame and units.
    topology : SkeletonTopology, optional
        Only used for joint names.

    Returns
    -------
    ErrorBreakdown
        Euclidean distance per joint; `.mean` is the Joint Error.
    """
    pred, gt = _coords(pred), _coords(gt)
    _check_pair(pred, gt)
    distances = np.linalg.norm(pred - gt, axis=-1)
    return ErrorBreakdown(distances, joint_labels(topology, len(distances)))


def pa_joint_error(pred, gt, scale: bool = True, topology: SkeletonTopology | None = None) -> ErrorBreakdown:
    """
    Joint error after aligning the prediction onto the ground truth.

    Parameters
    ----------
    pred, gt : Pose or array_like, shape (K, 3)
    scale : bool, default=True
        Similarity alignment (rotation, translation and uniform scale); rigid
        alignment when False. Reflections are never allowed.

    Raises
    ------
    DegenerateConfiguration
        K < 3 or collinear ground truth.
    """
    pred, gt = _coords(pred), _coords(gt)
    _check_pair(pred, gt)
    if pred.shape[-1] != 3:
        raise ShapeMismatch(f"[!] PA Joint Error is defined for 3D poses, got {pred.shape[-1]}D.")
    aligned, _ = procrustes_align(pred, gt, scale=scale)
    distances = np.linalg.norm(aligned - gt, axis=-1)
    return ErrorBreakdown(distances, joint_labels(topology, len(distances)))


def bone_error(pred, gt, topology: SkeletonTopology) -> ErrorBreakdown:
    """
    Mean per bone position error over the body bones.

    The root's bone only measures the offset from the frame origin, so it is
    left out; the result is invariant to a global translation of `pred`.
    """
    pred, gt = _coords(pred), _coords(gt)
    _check_pair(pred, gt)
    rows = np.asarray(topology.body_bones, dtype=np.intp) - 1
    pred_bones = joints_to_bones_array(pred, topology)[rows]
    gt_bones = joints_to_bones_array(gt, topology)[rows]
    return ErrorBreakdown(np.linalg.norm(pred_bones - gt_bones, axis=-1), bone_labels(topology))


def bone_lengths(joints, topology: SkeletonTopology) -> np.ndarray:
    """Lengths of the body bones, (..., K, d) -> (..., K - 1)."""
    rows = np.asarray(topology.body_bones, dtype=np.intp) - 1
    return np.linalg.norm(joints_to_bones_array(joints, topology)[..., rows, :], axis=-1)


def bone_std(preds, topology: SkeletonTopology, subjects=None) -> BoneStd:
    """
    Per-bone length standard deviation, within subject, averaged over subjects.

    Parameters
    ----------
    preds : collection of Pose
        3D predictions; grouped by `Pose.subject` unless `subjects` is given.
    topology : SkeletonTopology
    subjects : sequence of str, optional
        Subject of each prediction, overriding the pose tags.

    Raises
    ------
    InsufficientSamplesForSubject
        A subject has fewer than 2 samples.
    """
    preds = list(preds)
    subjects = [p.subject for p in preds] if subjects is None else list(subjects)
    if len(subjects) != len(preds):
        raise ShapeMismatch(f"[!] {len(subjects)} subject tags for {len(preds)} predictions.")

    groups = defaultdict(list)
    for pose, subject in zip(preds, subjects):
        if pose.dims != 3:
            raise ShapeMismatch(f"[!] Bone Std is defined for 3D poses, '{pose.sample_id}' is {pose.dims}D.")
        groups[subject].append(pose.coords)
    if not groups:
        raise InsufficientSamplesForSubject("[!] No predictions to compute Bone Std from.")

    per_subject = {}
    for subject in sorted(groups):
        if len(groups[subject]) < 2:
            raise InsufficientSamplesForSubject(
                f"[!] Subject '{subject}' has {len(groups[subject])} sample; Bone Std needs at least 2."
            )
        lengths = bone_lengths(np.stack(groups[subject]), topology)
        per_subject[subject] = lengths.std(axis=0)

    per_bone = np.mean(np.stack(list(per_subject.values())), axis=0)
    return BoneStd(per_bone=per_bone, per_subject=per_subject, labels=bone_labels(topology))
