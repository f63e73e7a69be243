"""
Joint, bone and compositional L1 losses with hand-derived gradients.

All losses are plain sums over terms and coordinates of the normalized
residuals. Gradients are taken with respect to the normalized network outputs
(bones for the compositional family, joints for the joint loss) and use the
subgradient sign(0) = 0. For 2D samples the z residuals are zeroed, so neither
the value nor the gradient depends on predicted z.
"""

import logging
from dataclasses import dataclass

import numpy as np

from posekit.exceptions import InvalidPairSet, ShapeMismatch, StatsMismatch
from posekit.representation.normalization import NormStats
from posekit.representation.representation import BonePose, Pose, joints_to_bones_array
from posekit.skeleton.skeleton import SkeletonTopology, TreePath

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LossResult:
    """
    Loss of one sample.

    Attributes
    ----------
    value : float
        Sum of `term_breakdown`.
    grad : numpy.ndarray, shape (K, C)
        dL / d(normalized output coordinates).
    term_breakdown : numpy.ndarray, shape (T,)
        One entry per pair (or per joint / bone).
    residuals : numpy.ndarray, shape (T, C_active)
        Normalized residuals of the coordinates that enter the loss.
    labels : tuple of str
        Term names, "u,v" for pairs.
    """

    value: float
    grad: np.ndarray
    term_breakdown: np.ndarray
    residuals: np.ndarray
    labels: tuple[str, ...]

    @property
    def grad_bones(self) -> np.ndarray:
        return self.grad

    @property
    def mean_per_pair(self) -> float:
        """Reporting-only average over terms; gradients always follow the sum."""
        return self.value / len(self.term_breakdown)

    def terms(self) -> dict[str, float]:
        return {label: float(term) for label, term in zip(self.labels, self.term_breakdown)}


@dataclass(frozen=True, eq=False)
class BatchLoss:
    """Per-sample losses of a batch; `value` is their sum."""

    value: float
    per_sample: np.ndarray
    grad: np.ndarray
    term_breakdown: np.ndarray
    residuals: np.ndarray
    active: np.ndarray
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.per_sample)

    def sample(self, i: int) -> LossResult:
        return LossResult(
            value=float(self.term_breakdown[i].sum()),
            grad=self.grad[i],
            term_breakdown=self.term_breakdown[i],
            residuals=self.residuals[i][:, self.active[i]],
            labels=self.labels,
        )


def _as_array(values, what: str) -> np.ndarray:
    if isinstance(values, BonePose):
        values = values.bones
    elif isinstance(values, Pose):
        values = values.coords
    array = np.asarray(values, dtype=np.float64)
    if array.ndim not in (2, 3) or array.shape[-1] not in (2, 3):
        raise ShapeMismatch(f"[!] {what} must be (K, C) or (N, K, C) with C in (2, 3), got {array.shape}.")
    return array


def _active_mask(num_samples: int, columns: int, is_3d) -> np.ndarray:
    active = np.ones((num_samples, columns), dtype=bool)
    if is_3d is not None and columns == 3:
        active[:, 2] = np.asarray(is_3d, dtype=bool)
    return active


def _reduce(residuals: np.ndarray, active: np.ndarray, squared: bool):
    masked = np.where(active[:, None, :], residuals, 0.0)
    if squared:
        return masked, (masked * masked).sum(axis=-1), 2.0 * masked
    return masked, np.abs(masked).sum(axis=-1), np.sign(masked)


def _batch_result(residuals, active, terms, grad, labels) -> BatchLoss:
    per_sample = terms.sum(axis=1)
    return BatchLoss(
        value=float(per_sample.sum()),
        per_sample=per_sample,
        grad=np.where(active[:, None, :], grad, 0.0),
        term_breakdown=terms,
        residuals=residuals,
        active=active,
        labels=labels,
    )


def stack_ground_truth(poses, dims: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Stack ground-truth poses for a batch whose outputs have `dims` coordinates.

    2D poses in a 3-coordinate batch get a zero z placeholder; the returned
    `is_3d` flags mark which samples carry a real z.
    """
    poses = list(poses)
    coords = np.zeros((len(poses), poses[0].num_joints, dims), dtype=np.float64)
    is_3d = np.zeros(len(poses), dtype=bool)
    for i, pose in enumerate(poses):
        if pose.dims > dims:
            raise ShapeMismatch(f"[!] Pose '{pose.sample_id}' has {pose.dims} coordinates, outputs have {dims}.")
        coords[i, :, : pose.dims] = pose.coords
        is_3d[i] = pose.is_3d
    return coords, is_3d


def compose_delta(
    bones_normalized,
    pair: tuple[int, int],
    path: TreePath,
    bone_stats: NormStats,
    return_jacobian: bool = False,
):
    """
    Relative position J_u - J_v composed from normalized bones along a tree path.

    Parameters
    ----------
    bones_normalized : BonePose or array_like, shape (K, C)
        Normalized bone predictions.
    pair : (int, int)
        (u, v), matching `path.endpoints`.
    path : TreePath
        Path from `path_between(topology, u, v)`.
    bone_stats : NormStats
        Bone statistics used to unnormalize.
    return_jacobian : bool
        Also return d delta / d bones_normalized, a (K, C) array holding
        sign * std on the bones of the path and 0 elsewhere (the Jacobian is
        diagonal per coordinate).

    Returns
    -------
    numpy.ndarray, shape (C,)
        The composed delta in native units (and the Jacobian if requested).
    """
    if tuple(path.endpoints) != tuple(pair):
        raise InvalidPairSet(f"[!] Path runs between {path.endpoints}, not {tuple(pair)}.")
    bones = bone_stats.unnormalize(_as_array(bones_normalized, "Normalized bones"))
    if bones.ndim != 2:
        raise ShapeMismatch(f"[!] compose_delta takes one sample, got shape {bones.shape}.")

    delta = np.zeros(bones.shape[1], dtype=np.float64)
    for step in path.steps:
        delta = delta + step.sign * bones[step.bone - 1]
    if not return_jacobian:
        return delta

    jacobian = np.zeros_like(bones)
    for step in path.steps:
        jacobian[step.bone - 1] = step.sign * bone_stats.std[step.bone - 1]
    return delta, jacobian


class CompositionalLoss:
    def __init__(
        self,
        pair_set,
        bone_stats: NormStats,
        delta_stats: NormStats,
        squared: bool = False,
    ):
        """
        Sum over pairs of |normalize(composed delta) - normalize(ground-truth delta)|.

        Parameters
        ----------
        pair_set : PairSet
            Pairs and precomputed paths.
        bone_stats : NormStats
            Stats of the bone outputs (target "bones").
        delta_stats : NormStats
            Per-pair stats fitted for exactly this pair set.
        squared : bool
            Diagnostic squared-error variant of the same terms.
        """
        if not bone_stats.target == "bones":
            raise StatsMismatch(f"[!] Expected bone stats, got '{bone_stats.target}'.")
        delta_stats.require_pairs(pair_set.pairs)
        if bone_stats.shape[0] != pair_set.num_joints:
            raise StatsMismatch(
                f"[!] Bone stats cover {bone_stats.shape[0]} bones, pair set indexes {pair_set.num_joints} joints."
            )
        if bone_stats.shape[1] != delta_stats.shape[1]:
            raise StatsMismatch(
                f"[!] Bone stats have {bone_stats.shape[1]} coordinates, delta stats {delta_stats.shape[1]}."
            )
        self.pair_set = pair_set
        self.bone_stats = bone_stats
        self.delta_stats = delta_stats
        self.squared = squared
        self.labels = tuple(pair_set.labels())
        self.evaluations = 0

    @property
    def dims(self) -> int:
        return self.bone_stats.shape[1]

    def batch(self, bones_normalized, gt_joints, is_3d=None) -> BatchLoss:
        """
        Loss of a batch of normalized bone predictions.

        Parameters
        ----------
        bones_normalized : array_like, shape (N, K, C)
        gt_joints : array_like, shape (N, K, C)
            Ground-truth joints in native units.
        is_3d : array_like of bool, shape (N,), optional
            With C = 3, False zeroes the z terms of that sample.
        """
        predicted = np.asarray(bones_normalized, dtype=np.float64)
        ground_truth = np.asarray(gt_joints, dtype=np.float64)
        if predicted.ndim != 3 or predicted.shape != ground_truth.shape:
            raise ShapeMismatch(
                f"[!] Predictions {predicted.shape} and ground truth {ground_truth.shape} must be equal (N, K, C)."
            )
        self.evaluations += 1

        deltas = self.pair_set.compose(self.bone_stats.unnormalize(predicted))
        targets = self.pair_set.deltas_from_joints(ground_truth)
        residuals = self.delta_stats.normalize(deltas) - self.delta_stats.normalize(targets)

        active = _active_mask(len(predicted), predicted.shape[-1], is_3d)
        _, terms, slope = _reduce(residuals, active, self.squared)
        upstream = slope / self.delta_stats.std
        grad = self.bone_stats.std * np.einsum("pk,npc->nkc", self.pair_set.composition, upstream)
        return _batch_result(residuals, active, terms, grad, self.labels)

    def __call__(self, bones_normalized, ground_truth: Pose) -> LossResult:
        predicted = _as_array(bones_normalized, "Normalized bones")
        if ground_truth.dims != predicted.shape[-1]:
            raise ShapeMismatch(
                f"[!] Ground truth is {ground_truth.dims}D, predictions have {predicted.shape[-1]} coordinates."
            )
        return self.batch(predicted[None], ground_truth.coords[None]).sample(0)

    def mixed(self, bones_normalized, ground_truth: Pose) -> LossResult:
        predicted = _as_array(bones_normalized, "Normalized bones")
        if predicted.shape[-1] != 3:
            raise ShapeMismatch(f"[!] Mixed loss needs 3 output coordinates, got {predicted.shape[-1]}.")
        coords, is_3d = stack_ground_truth([ground_truth], dims=3)
        return self.batch(predicted[None], coords, is_3d=is_3d).sample(0)


class JointLoss:
    def __init__(self, joint_stats: NormStats, squared: bool = False, labels=None):
        """
        Sum over joints of |J~ - normalize(J_gt)|, with gradients w.r.t. the
        normalized joint outputs.
        """
        if not joint_stats.target == "joints":
            raise StatsMismatch(f"[!] Expected joint stats, got '{joint_stats.target}'.")
        self.joint_stats = joint_stats
        self.squared = squared
        self.labels = tuple(labels) if labels is not None else tuple(str(k) for k in range(1, joint_stats.shape[0] + 1))
        self.evaluations = 0

    @property
    def dims(self) -> int:
        return self.joint_stats.shape[1]

    def batch(self, joints_normalized, gt_joints, is_3d=None) -> BatchLoss:
        predicted = np.asarray(joints_normalized, dtype=np.float64)
        ground_truth = np.asarray(gt_joints, dtype=np.float64)
        if predicted.ndim != 3 or predicted.shape != ground_truth.shape:
            raise ShapeMismatch(
                f"[!] Predictions {predicted.shape} and ground truth {ground_truth.shape} must be equal (N, K, C)."
            )
        self.evaluations += 1

        residuals = predicted - self.joint_stats.normalize(ground_truth)
        active = _active_mask(len(predicted), predicted.shape[-1], is_3d)
        _, terms, slope = _reduce(residuals, active, self.squared)
        return _batch_result(residuals, active, terms, slope, self.labels)

    def __call__(self, joints_normalized, ground_truth: Pose) -> LossResult:
        predicted = _as_array(joints_normalized, "Normalized joints")
        if ground_truth.dims != predicted.shape[-1]:
            raise ShapeMismatch(
                f"[!] Ground truth is {ground_truth.dims}D, predictions have {predicted.shape[-1]} coordinates."
            )
        return self.batch(predicted[None], ground_truth.coords[None]).sample(0)


def compositional_loss(
    bones_normalized,
    ground_truth: Pose,
    pair_set,
    bone_stats: NormStats,
    delta_stats: NormStats,
    squared: bool = False,
) -> LossResult:
    """
    Compositional loss of one sample over a pair set.

    Parameters
    ----------
    bones_normalized : BonePose or array_like, shape (K, C)
        Normalized bone predictions.
    ground_truth : Pose
        Ground-truth joints with the same number of coordinates.
    pair_set : PairSet
        Which relative positions are penalized.
    bone_stats, delta_stats : NormStats
        Bone stats and per-pair stats fitted for `pair_set`.
    squared : bool
        Diagnostic squared-error terms instead of absolute ones.

    Returns
    -------
    LossResult
        Value, gradient w.r.t. the normalized bones and per-pair terms.

    Raises
    ------
    StatsMismatch
        `delta_stats` were fitted for another pair set.
    """
    return CompositionalLoss(pair_set, bone_stats, delta_stats, squared=squared)(bones_normalized, ground_truth)


def joint_loss(joints_normalized, ground_truth: Pose, joint_stats: NormStats, squared: bool = False) -> LossResult:
    """Direct joint regression loss of one sample (gradient w.r.t. normalized joints)."""
    return JointLoss(joint_stats, squared=squared)(joints_normalized, ground_truth)


def bone_loss(
    bones_normalized,
    ground_truth: Pose,
    topology: SkeletonTopology,
    bone_stats: NormStats,
    squared: bool = False,
) -> LossResult:
    """Sum over bones of |B~ - normalize(B_gt)|, evaluated directly on the bones."""
    if not bone_stats.target == "bones":
        raise StatsMismatch(f"[!] Expected bone stats, got '{bone_stats.target}'.")
    predicted = _as_array(bones_normalized, "Normalized bones")
    ground_truth.check_topology(topology)
    if ground_truth.dims != predicted.shape[-1]:
        raise ShapeMismatch(
            f"[!] Ground truth is {ground_truth.dims}D, predictions have {predicted.shape[-1]} coordinates."
        )
    residuals = predicted - bone_stats.normalize(joints_to_bones_array(ground_truth.coords, topology))
    active = _active_mask(1, predicted.shape[-1], None)
    _, terms, slope = _reduce(residuals[None], active, squared)
    labels = tuple(f"{k},{topology.parent_of(k)}" for k in topology.joints)
    return _batch_result(residuals[None], active, terms, slope, labels).sample(0)


def mixed_loss(
    bones_normalized,
    ground_truth: Pose,
    pair_set,
    bone_stats: NormStats,
    delta_stats: NormStats,
    squared: bool = False,
) -> LossResult:
    """
    Compositional loss split into an xy part and a z part.

    Predictions always carry 3 coordinates. The xy terms always count; the z
    terms count only when `ground_truth` is 3D, and for 2D ground truth the z
    components of the gradient are exactly 0.
    """
    return CompositionalLoss(pair_set, bone_stats, delta_stats, squared=squared).mixed(bones_normalized, ground_truth)
