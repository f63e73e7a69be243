"""
The baseline and the four compositional variants, by name.

    baseline   outputs joints, joint loss
    joint      outputs bones, compositional loss over P_joint
    bone       outputs bones, compositional loss over P_bone
    both       outputs bones, compositional loss over P_both
    all        outputs bones, compositional loss over P_all
"""

import logging
from dataclasses import dataclass

import numpy as np

from posekit.exceptions import InvalidConfig, StatsMismatch
from posekit.losses.compositional import BatchLoss, CompositionalLoss, JointLoss
from posekit.losses.pair_set import PairSet, build_pair_set
from posekit.representation.normalization import NormStats, delta_stats_from_joints, fit_stats
from posekit.representation.representation import bones_to_joints_array
from posekit.skeleton.skeleton import SkeletonTopology

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Variant:
    name: str
    label: str
    output: str
    pair_kind: str | None = None


VARIANTS = {
    "baseline": Variant("baseline", "Baseline", "joints"),
    "joint": Variant("joint", "Ours (joint)", "bones", "joint"),
    "bone": Variant("bone", "Ours (bone)", "bones", "bone"),
    "both": Variant("both", "Ours (both)", "bones", "both"),
    "all": Variant("all", "Ours (all)", "bones", "all"),
}


def get_variant(name: str) -> Variant:
    try:
        return VARIANTS[name]
    except KeyError:
        raise InvalidConfig(f"[!] Unknown variant '{name}', expected one of {list(VARIANTS)}.") from None


def resolve_variants(names) -> list[Variant]:
    """
    Variants selected by a comma list, returned in registry order.

    A lone "all" selects every row (as in `--variants all`); "ours-<kind>"
    names a compositional variant unambiguously, so "ours-all" is the P_all
    row on its own.
    """
    if isinstance(names, str):
        names = [n.strip() for n in names.split(",") if n.strip()]
    names = [str(name).strip() for name in names]
    if names == ["all"]:
        return list(VARIANTS.values())
    if not names:
        raise InvalidConfig("[!] No variants selected.")
    names = {name.removeprefix("ours-") for name in names}
    for name in names:
        get_variant(name)
    return [VARIANTS[name] for name in VARIANTS if name in names]


def selection_names(variants) -> tuple[str, ...]:
    """Names that `resolve_variants` maps back to exactly `variants`; a lone P_all row is spelled "ours-all"."""
    names = tuple(variant.name for variant in variants)
    return ("ours-all",) if names == ("all",) else names


class VariantLoss:
    def __init__(
        self,
        variant: Variant | str,
        topology: SkeletonTopology,
        output_stats: NormStats,
        delta_stats: NormStats | None = None,
        squared: bool = False,
    ):
        """
        Loss of one variant over normalized network outputs.

        Parameters
        ----------
        variant : Variant or str
            Registry entry or its name.
        topology : SkeletonTopology
            Skeleton of the outputs.
        output_stats : NormStats
            Joint stats for the baseline, bone stats otherwise.
        delta_stats : NormStats, optional
            Per-pair stats for the variant's pair set (compositional variants).
        squared : bool
            Diagnostic squared-error terms.
        """
        self.variant = get_variant(variant) if isinstance(variant, str) else variant
        self.topology = topology
        self.output_stats = output_stats

        if output_stats.target != self.variant.output:
            raise StatsMismatch(
                f"[!] Variant '{self.variant.name}' outputs {self.variant.output}, stats are '{output_stats.target}'."
            )
        if self.variant.output == "joints":
            self.pair_set = None
            self.loss = JointLoss(output_stats, squared=squared, labels=[str(k) for k in topology.joints])
        else:
            if delta_stats is None:
                raise StatsMismatch(f"[!] Variant '{self.variant.name}' needs pair-delta stats.")
            self.pair_set = build_pair_set(self.variant.pair_kind, topology)
            self.loss = CompositionalLoss(self.pair_set, output_stats, delta_stats, squared=squared)

    @classmethod
    def fit(
        cls,
        variant: Variant | str,
        topology: SkeletonTopology,
        ground_truth,
        allow_mixed: bool = False,
        shared_delta_stats: bool = False,
        squared: bool = False,
    ) -> "VariantLoss":
        """
        Fit the stats a variant needs on training ground truth and build its loss.

        With `shared_delta_stats`, pair-delta stats are derived from the joint
        stats instead of fitted per pair.
        """
        variant = get_variant(variant) if isinstance(variant, str) else variant
        poses = list(ground_truth)
        output_stats = fit_stats(poses, variant.output, topology, allow_mixed=allow_mixed)
        delta_stats = None
        if variant.pair_kind is not None:
            pair_set = build_pair_set(variant.pair_kind, topology)
            if shared_delta_stats:
                joint_stats = fit_stats(poses, "joints", topology, allow_mixed=allow_mixed)
                delta_stats = delta_stats_from_joints(joint_stats, pair_set)
            else:
                delta_stats = fit_stats(poses, "pair_deltas", topology, pair_set=pair_set, allow_mixed=allow_mixed)
        return cls(variant, topology, output_stats, delta_stats, squared=squared)

    @property
    def name(self) -> str:
        return self.variant.name

    @property
    def dims(self) -> int:
        return self.output_stats.shape[1]

    def batch(self, outputs_normalized, gt_joints, is_3d=None) -> BatchLoss:
        return self.loss.batch(outputs_normalized, gt_joints, is_3d=is_3d)

    def to_joints(self, outputs_normalized) -> np.ndarray:
        """Native-unit joints from normalized outputs, (..., K, C)."""
        outputs = self.output_stats.unnormalize(outputs_normalized)
        if self.variant.output == "joints":
            return outputs
        return bones_to_joints_array(outputs, self.topology)

    def instrumentation(self) -> dict[str, int]:
        """How many batches each loss family evaluated."""
        joint_calls = self.loss.evaluations if isinstance(self.loss, JointLoss) else 0
        compositional_calls = self.loss.evaluations if isinstance(self.loss, CompositionalLoss) else 0
        return {"joint_loss": joint_calls, "compositional_loss": compositional_calls}

    def stats(self) -> list[NormStats]:
        if self.pair_set is None:
            return [self.output_stats]
        return [self.output_stats, self.loss.delta_stats]
