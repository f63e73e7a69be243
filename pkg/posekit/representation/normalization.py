import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from posekit.exceptions import InsufficientData, MixedDims, ShapeMismatch, StatsMismatch
from posekit.io.jsonio import read_json, write_json
from posekit.representation.representation import joints_to_bones_array, with_origin
from posekit.skeleton.skeleton import SkeletonTopology

logger = logging.getLogger(__name__)

STD_FLOOR = 1e-6
TARGETS = ("joints", "bones", "pair_deltas")


@dataclass(frozen=True, eq=False)
class NormStats:
    """
    Constant mean/std pair fitted on ground-truth training samples.

    normalize(x) = (x - mean) / std and unnormalize(x~) = x~ * std + mean,
    elementwise and per coordinate.

    Parameters
    ----------
    mean, std : numpy.ndarray, shape (S, C)
        One row per variable (joint, bone or pair), one column per coordinate.
    target : str
        "joints", "bones" or "pairs:<kind>".
    count : int
        Number of ground-truth samples the constants came from.
    pairs : tuple of (int, int), optional
        The pair list the rows follow, for pair-delta stats.
    std_floor : float
        Lower clamp applied to `std`.
    convention : str
        Standard deviation convention used while fitting.
    """

    mean: np.ndarray
    std: np.ndarray
    target: str
    count: int
    pairs: tuple[tuple[int, int], ...] | None = None
    std_floor: float = STD_FLOOR
    convention: str = "population"

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64)
        std = np.array(self.std, dtype=np.float64)
        if mean.ndim != 2 or mean.shape != std.shape:
            raise ShapeMismatch(f"[!] mean {mean.shape} and std {std.shape} must be equal 2D shapes.")
        if self.std_floor <= 0:
            raise ShapeMismatch(f"[!] std_floor must be positive, got {self.std_floor}.")
        std = np.maximum(std, self.std_floor)
        mean.setflags(write=False)
        std.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)
        if self.pairs is not None:
            object.__setattr__(self, "pairs", tuple((int(u), int(v)) for u, v in self.pairs))
            if len(self.pairs) != mean.shape[0]:
                raise ShapeMismatch(f"[!] {len(self.pairs)} pairs but stats have {mean.shape[0]} rows.")

    @property
    def shape(self) -> tuple[int, int]:
        return self.mean.shape

    def _check(self, x: np.ndarray):
        if x.shape[-2:] != self.mean.shape:
            raise ShapeMismatch(
                f"[!] Array of shape {x.shape} does not match stats shape {self.mean.shape} ({self.target})."
            )

    def normalize(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        self._check(x)
        return (x - self.mean) / self.std

    def unnormalize(self, x_normalized) -> np.ndarray:
        x_normalized = np.asarray(x_normalized, dtype=np.float64)
        self._check(x_normalized)
        return x_normalized * self.std + self.mean

    def columns(self, stop: int) -> "NormStats":
        """Stats restricted to the first `stop` coordinates (e.g. xy of xyz)."""
        return NormStats(
            mean=self.mean[:, :stop],
            std=self.std[:, :stop],
            target=self.target,
            count=self.count,
            pairs=self.pairs,
            std_floor=self.std_floor,
            convention=self.convention,
        )

    def require_pairs(self, pairs):
        pairs = tuple(tuple(p) for p in pairs)
        if self.pairs != pairs:
            raise StatsMismatch(
                f"[!] Stats '{self.target}' were fitted for a different pair set "
                f"({0 if self.pairs is None else len(self.pairs)} pairs vs {len(pairs)})."
            )

    def to_dict(self) -> dict:
        data = {
            "target": self.target,
            "count": self.count,
            "convention": self.convention,
            "std_floor": self.std_floor,
            "mean": self.mean,
            "std": self.std,
        }
        if self.pairs is not None:
            data["pairs"] = [list(p) for p in self.pairs]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "NormStats":
        pairs = data.get("pairs")
        return cls(
            mean=data["mean"],
            std=data["std"],
            target=data["target"],
            count=int(data["count"]),
            pairs=None if pairs is None else tuple(tuple(p) for p in pairs),
            std_floor=float(data.get("std_floor", STD_FLOOR)),
            convention=data.get("convention", "population"),
        )

    def save(self, path: str | Path):
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path: str | Path) -> "NormStats":
        return cls.from_dict(read_json(path))


def normalize(x, stats: NormStats) -> np.ndarray:
    return stats.normalize(x)


def unnormalize(x_normalized, stats: NormStats) -> np.ndarray:
    return stats.unnormalize(x_normalized)


def pair_deltas_array(joints: np.ndarray, pairs) -> np.ndarray:
    """Ground-truth relative positions J_u - J_v for every pair, origin included."""
    pairs = np.asarray(pairs, dtype=np.intp).reshape(-1, 2)
    padded = with_origin(joints)
    return padded[..., pairs[:, 0], :] - padded[..., pairs[:, 1], :]


def _target_values(coords: np.ndarray, target: str, topology: SkeletonTopology, pair_set) -> np.ndarray:
    if target == "joints":
        return coords
    if target == "bones":
        return joints_to_bones_array(coords, topology)
    return pair_deltas_array(coords, pair_set.pairs)


def _population_stats(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = values.mean(axis=0)
    std = np.sqrt(((values - mean) ** 2).mean(axis=0))
    return mean, std


def fit_stats(
    ground_truth,
    target: str,
    topology: SkeletonTopology,
    pair_set=None,
    std_floor: float = STD_FLOOR,
    allow_mixed: bool = False,
) -> NormStats:
    """
    Fit per-variable, per-coordinate normalization constants.

    Parameters
    ----------
    ground_truth : iterable of Pose
        Training ground truth, at least 2 samples.
    target : str
        "joints", "bones" or "pair_deltas" ("pairs" is accepted as an alias).
    topology : SkeletonTopology
        Skeleton the poses follow.
    pair_set : PairSet, optional
        Required for pair-delta stats; rows follow `pair_set.pairs`.
    std_floor : float, default=1e-6
        Standard deviations below this are clamped to it.
    allow_mixed : bool, default=False
        Accept 2D and 3D samples together: xy is fitted on every sample and z
        on the 3D samples only (needed for mixed 2D/3D training).

    Returns
    -------
    NormStats
        Population mean/std of the target representation.

    Raises
    ------
    InsufficientData
        Fewer than 2 samples (or fewer than 2 3D samples for z in mixed mode).
    MixedDims
        Samples disagree on dimensionality and `allow_mixed` is False.
    """
    if target == "pairs":
        target = "pair_deltas"
    if target not in TARGETS:
        raise ShapeMismatch(f"[!] Unknown stats target '{target}', expected one of {TARGETS}.")
    if target == "pair_deltas" and pair_set is None:
        raise StatsMismatch("[!] Pair-delta stats need a pair set.")

    poses = list(ground_truth)
    if len(poses) < 2:
        raise InsufficientData(f"[!] Need at least 2 ground-truth samples, got {len(poses)}.")
    for pose in poses:
        pose.check_topology(topology)

    dims = {pose.dims for pose in poses}
    if len(dims) > 1 and not allow_mixed:
        raise MixedDims("[!] Ground truth mixes 2D and 3D samples; fit them separately or allow_mixed=True.")

    tag = target if target != "pair_deltas" else f"pairs:{pair_set.kind}"
    pairs = tuple(pair_set.pairs) if target == "pair_deltas" else None

    if len(dims) == 1:
        values = _target_values(np.stack([p.coords for p in poses]), target, topology, pair_set)
        mean, std = _population_stats(values)
    else:
        planar = np.stack([p.coords[:, :2] for p in poses])
        spatial = [p.coords for p in poses if p.is_3d]
        if len(spatial) < 2:
            raise InsufficientData(f"[!] Need at least 2 3D samples to fit z, got {len(spatial)}.")
        mean_xy, std_xy = _population_stats(_target_values(planar, target, topology, pair_set))
        depth_values = _target_values(np.stack(spatial), target, topology, pair_set)[..., 2:]
        mean_z, std_z = _population_stats(depth_values)
        mean = np.concatenate([mean_xy, mean_z], axis=-1)
        std = np.concatenate([std_xy, std_z], axis=-1)

    logger.debug("Fitted %s stats on %d samples (%d floored entries).", tag, len(poses), int(np.sum(std < std_floor)))
    return NormStats(mean=mean, std=std, target=tag, count=len(poses), pairs=pairs, std_floor=std_floor)


def delta_stats_from_joints(joint_stats: NormStats, pair_set) -> NormStats:
    """
    Pair-delta stats derived from joint stats instead of fitted per pair.

    mean = mean_u - mean_v and std = hypot(std_u, std_v); the origin has zero
    mean and zero spread, so P_joint reproduces the joint stats exactly.
    """
    if not joint_stats.target == "joints":
        raise StatsMismatch(f"[!] Expected joint stats, got '{joint_stats.target}'.")
    columns = joint_stats.mean.shape[1]
    mean = np.vstack([np.zeros((1, columns)), joint_stats.mean])
    std = np.vstack([np.zeros((1, columns)), joint_stats.std])
    pairs = np.asarray(pair_set.pairs, dtype=np.intp).reshape(-1, 2)
    return NormStats(
        mean=mean[pairs[:, 0]] - mean[pairs[:, 1]],
        std=np.hypot(std[pairs[:, 0]], std[pairs[:, 1]]),
        target=f"pairs:{pair_set.kind}",
        count=joint_stats.count,
        pairs=tuple(pair_set.pairs),
        std_floor=joint_stats.std_floor,
        convention=joint_stats.convention,
    )
