"""
Train every variant on the same synthetic data and compare them on a held-out
split with the full metric suite, one row per metric and one column per
variant.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from posekit._parallel import ordered_map
from posekit.exceptions import InvalidConfig
from posekit.geometry.camera import backproject
from posekit.io.jsonio import read_json
from posekit.losses.variants import Variant, resolve_variants, selection_names
from posekit.metrics.angles import AngleLimits
from posekit.metrics.report import MetricsReport, evaluate_poses
from posekit.representation.representation import Pose
from posekit.training.synth import IMAGE_DEPTH, SynthConfig, SynthDataset, generate
from posekit.training.trainer import TrainConfig, Trainer, TrainResult

logger = logging.getLogger(__name__)

# Summing over 136 pairs, the P_all loss needs a smaller step than the
# 17-pair losses to settle at the default rate.
DEFAULT_VARIANT_LR = {"all": 3e-4}

TABLE_METRICS = (
    ("joint_error", "Joint Error"),
    ("pa_joint_error", "PA Joint Error"),
    ("bone_error", "Bone Error"),
    ("bone_std", "Bone Std"),
    ("illegal_angle_rate", "Illegal Angle"),
)


@dataclass(frozen=True)
class ComparisonConfig:
    """
    Desk-scale comparison settings.

    Parameters
    ----------
    synth : SynthConfig
        Generator settings; `num_samples` and `seed` are set per run.
    train : TrainConfig
        SGD settings; `seed` is set per run.
    num_train, num_test : int
        Sizes of the training and held-out splits.
    variants : str or sequence of str
        Selection as accepted by `resolve_variants` (a lone "all" is every
        row); stored as registry names in table order.
    seeds : tuple of int
        One data seed and training seed per run.
    angle_limits : AngleLimits
    pa_scale : bool
    """

    synth: SynthConfig = field(default_factory=SynthConfig)
    train: TrainConfig = field(default_factory=lambda: TrainConfig(variant_lr=dict(DEFAULT_VARIANT_LR)))
    num_train: int = 2000
    num_test: int = 500
    variants: tuple = ("baseline", "joint", "bone", "both", "all")
    seeds: tuple = (0, 1, 2)
    angle_limits: AngleLimits = field(default_factory=AngleLimits)
    pa_scale: bool = True

    def __post_init__(self):
        object.__setattr__(self, "variants", selection_names(resolve_variants(self.variants)))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.num_train < 2 or self.num_test < 2:
            raise InvalidConfig(f"[!] Need at least 2 training and 2 test samples, got {self.num_train}, {self.num_test}.")
        if not self.seeds:
            raise InvalidConfig("[!] At least one seed is required.")

    @property
    def selected(self) -> list[Variant]:
        return resolve_variants(self.variants)

    def dataset_config(self, seed: int) -> SynthConfig:
        return replace(self.synth, num_samples=self.num_train + self.num_test, seed=seed)

    def train_config(self, seed: int) -> TrainConfig:
        return replace(self.train, seed=seed)

    def to_dict(self) -> dict:
        return {
            "synth": self.synth.to_dict(),
            "train": self.train.to_dict(),
            "num_train": self.num_train,
            "num_test": self.num_test,
            "variants": list(self.variants),
            "seeds": list(self.seeds),
            "angle_limits": self.angle_limits.to_dict(),
            "pa_scale": self.pa_scale,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ComparisonConfig":
        data = dict(data)
        unknown = sorted(set(data) - set(cls.__dataclass_fields__))
        if unknown:
            raise InvalidConfig(f"[!] Unknown comparison config keys: {unknown}.")
        if "synth" in data:
            data["synth"] = SynthConfig.from_dict(data["synth"])
        if "train" in data:
            if not isinstance(data["train"], dict):
                raise InvalidConfig(f"[!] 'train' must be an object, got {data['train']!r}.")
            data["train"] = TrainConfig.from_dict({"variant_lr": dict(DEFAULT_VARIANT_LR), **data["train"]})
        if "angle_limits" in data:
            data["angle_limits"] = AngleLimits.from_dict(data["angle_limits"])
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> "ComparisonConfig":
        return cls.from_dict(read_json(path))


@dataclass(frozen=True, eq=False)
class RunRecord:
    variant: Variant
    seed: int
    report: MetricsReport
    loss_curve: list
    instrumentation: dict

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.name,
            "label": self.variant.label,
            "seed": self.seed,
            "report": self.report.to_dict(),
            "loss_curve": self.loss_curve,
            "instrumentation": self.instrumentation,
        }


@dataclass(frozen=True, eq=False)
class ComparisonResult:
    config: ComparisonConfig
    runs: tuple

    @property
    def variants(self) -> list[Variant]:
        return self.config.selected

    def metric(self, variant: str, name: str) -> list[float]:
        """Per-seed values of one metric for one variant, in seed order."""
        return [getattr(run.report, name) for run in self.runs if run.variant.name == variant]

    def table(self) -> dict:
        """Seed-averaged value per metric and variant label."""
        table = {}
        for key, title in TABLE_METRICS:
            row = {}
            for variant in self.variants:
                values = [v for v in self.metric(variant.name, key) if v is not None]
                row[variant.label] = float(np.mean(values)) if values else None
            table[title] = row
        return table

    def trends(self) -> dict:
        """For each variant and metric: in how many seeds it is below the baseline."""
        if "baseline" not in self.config.variants:
            return {}
        trends = {}
        for variant in self.variants:
            if variant.name == "baseline":
                continue
            counts = {}
            for key, title in TABLE_METRICS:
                ours, base = self.metric(variant.name, key), self.metric("baseline", key)
                counts[title] = sum(1 for a, b in zip(ours, base) if a is not None and b is not None and a < b)
            trends[variant.label] = {"seeds": len(self.config.seeds), "lower_than_baseline": counts}
        return trends

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "variants": [v.label for v in self.variants],
            "metrics": [title for _, title in TABLE_METRICS],
            "table": self.table(),
            "trends": self.trends(),
            "runs": [run.to_dict() for run in self.runs],
        }

    def to_text(self) -> str:
        """Aligned-column table: metrics as rows, variants as columns."""
        labels = [v.label for v in self.variants]
        table = self.table()
        width = max(len(label) for label in labels + ["Illegal Angle"]) + 2
        lines = ["Metric".ljust(16) + "".join(label.rjust(width) for label in labels)]
        for _, title in TABLE_METRICS:
            cells = []
            for label in labels:
                value = table[title][label]
                if value is None:
                    cells.append("-".rjust(width))
                elif title == "Illegal Angle":
                    cells.append(f"{100.0 * value:.2f}%".rjust(width))
                else:
                    cells.append(f"{value:.2f}".rjust(width))
            lines.append(title.ljust(16) + "".join(cells))
        return "\n".join(lines)


def predicted_camera_poses(result: TrainResult, test: SynthDataset) -> list[Pose]:
    """Root-relative 3D predictions for the test split, back-projected from image-depth outputs when needed."""
    joints = result.predict_joints(test.features)
    preds = []
    for pose, coords in zip(test.poses, joints):
        if test.frame == IMAGE_DEPTH:
            depth = coords[:, 2] + pose.root_depth
            coords = backproject(coords[:, :2], depth, pose.camera) - np.array([0.0, 0.0, pose.root_depth])
        preds.append(Pose(coords, sample_id=pose.sample_id, subject=pose.subject))
    return preds


class VariantComparison:
    def __init__(self, config: ComparisonConfig, debug: bool = False):
        """
        Run the comparison grid (variants x seeds).

        Parameters
        ----------
        config : ComparisonConfig
        debug : bool
            If True, trainers log their epochs and the table is logged at the end.
        """
        self.config = config
        self.debug = debug

    def _datasets(self) -> dict[int, tuple[SynthDataset, SynthDataset]]:
        datasets = ordered_map(lambda seed: generate(self.config.dataset_config(seed)), self.config.seeds)
        return {seed: data.split(self.config.num_train) for seed, data in zip(self.config.seeds, datasets)}

    def _run(self, job) -> RunRecord:
        variant, seed = job
        train_split, test_split = self.splits[seed]
        result = Trainer(train_split, variant, self.config.train_config(seed), debug=self.debug).train()
        report = evaluate_poses(
            predicted_camera_poses(result, test_split),
            test_split.ground_truth_3d(),
            train_split.topology,
            angle_limits=self.config.angle_limits,
            pa_scale=self.config.pa_scale,
        )
        return RunRecord(
            variant=variant,
            seed=seed,
            report=report,
            loss_curve=result.loss_curve,
            instrumentation=result.instrumentation,
        )

    def _debug_display(self, result: ComparisonResult):
        if self.debug:
            logger.info("Variant comparison over seeds %s:\n%s", list(self.config.seeds), result.to_text())

    def build(self) -> ComparisonResult:
        """
        1. Generate one dataset per seed and split it.
        2. Train and evaluate every (variant, seed) run; runs may execute in
           parallel and are collected in grid order.

        Returns
        -------
        ComparisonResult
        """
        self.splits = self._datasets()
        jobs = [(variant, seed) for variant in self.config.selected for seed in self.config.seeds]
        result = ComparisonResult(config=self.config, runs=tuple(ordered_map(self._run, jobs)))
        self._debug_display(result)
        return result


def evaluate_variants(config: ComparisonConfig, variants=None, seeds=None) -> ComparisonResult:
    """
    Compare variants on the synthetic task.

    Parameters
    ----------
    config : ComparisonConfig
    variants : str or sequence of str, optional
        Overrides `config.variants` ("all" selects every variant).
    seeds : int or sequence of int, optional
        Overrides `config.seeds`; an int n means seeds 0..n-1.
    """
    if variants is not None:
        config = replace(config, variants=variants)
    if seeds is not None:
        config = replace(config, seeds=tuple(range(seeds)) if isinstance(seeds, int) else tuple(seeds))
    return VariantComparison(config).build()
