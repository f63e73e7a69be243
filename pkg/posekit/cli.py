"""
posekit command line.

    posekit stats       --gt GT.jsonl --target joints|bones|pairs [--pairs KIND] --out STATS.json
    posekit loss        --pred PRED.jsonl --gt GT.jsonl --variant NAME --stats A.json [B.json ...]
    posekit eval        --pred PRED.jsonl --gt GT.jsonl [--angle-limits L.json] [--pa-scale on|off]
    posekit synth       --config SYNTH.json --out DATA.jsonl
    posekit train-demo  [--config CMP.json] --variants all --seeds 3 --out TABLE.json
    posekit compose     --bones BONES.jsonl --out JOINTS.jsonl
    posekit backproject --pred2d PRED2D.jsonl --depths DEPTHS.jsonl --out PRED3D.jsonl

Every command but train-demo takes --skeleton (built-in 17-joint layout by default).
Exit codes: 0 success, 1 usage error, 2 malformed input, 3 internal error.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from posekit import __version__
from posekit.exceptions import InvariantViolation, MalformedInput, MixedDims, PoseKitError, StatsMismatch
from posekit.geometry.camera import PinholeCamera
from posekit.io.jsonio import dumps, read_json, write_json
from posekit.io.records import pose_from_record, read_poses, read_records, write_poses
from posekit.losses.compositional import stack_ground_truth
from posekit.losses.pair_set import build_pair_set
from posekit.losses.variants import VARIANTS, VariantLoss, get_variant
from posekit.metrics.angles import AngleLimits
from posekit.metrics.report import backproject_pose, evaluate_poses
from posekit.representation.normalization import NormStats, delta_stats_from_joints, fit_stats
from posekit.representation.representation import (
    BonePose,
    bones_to_joints,
    bones_to_joints_array,
    joints_to_bones_array,
)
from posekit.skeleton.presets import h36m_skeleton
from posekit.skeleton.skeleton import SkeletonTopology
from posekit.training.comparison import ComparisonConfig, evaluate_variants
from posekit.training.synth import SynthConfig, generate

logger = logging.getLogger("posekit")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fail(error, code: int) -> int:
    sys.stderr.write(f"posekit: {error}\n")
    return code


def _emit(obj):
    sys.stdout.write(dumps(obj))
    sys.stdout.write("\n")


def _topology(args) -> SkeletonTopology:
    return SkeletonTopology.load(args.skeleton) if args.skeleton else h36m_skeleton()


def _match(preds, gts, pred_path):
    if len(preds) != len(gts):
        raise MalformedInput(pred_path, 0, f"{len(preds)} records, ground truth has {len(gts)}")
    for pred, gt in zip(preds, gts):
        if pred.sample_id and gt.sample_id and pred.sample_id != gt.sample_id:
            raise MalformedInput(pred_path, 0, f"record '{pred.sample_id}' is matched with ground truth '{gt.sample_id}'")


# --- stats ---------------------------------------------------------------

def run_stats(args) -> int:
    topology = _topology(args)
    poses = read_poses(args.gt)
    if args.target == "pairs":
        if not args.pairs:
            raise StatsMismatch("[!] --target pairs needs --pairs joint|bone|both|all.")
        pair_set = build_pair_set(args.pairs, topology)
        if args.shared:
            joint_stats = fit_stats(poses, "joints", topology, allow_mixed=args.allow_mixed)
            stats = delta_stats_from_joints(joint_stats, pair_set)
        else:
            stats = fit_stats(poses, "pair_deltas", topology, pair_set=pair_set, allow_mixed=args.allow_mixed)
    else:
        stats = fit_stats(poses, args.target, topology, allow_mixed=args.allow_mixed)
    stats.save(args.out)
    logger.info("Wrote %s stats over %d samples to %s.", stats.target, stats.count, args.out)
    _emit({"target": stats.target, "count": stats.count, "shape": list(stats.shape), "out": str(args.out)})
    return EXIT_OK


# --- loss ----------------------------------------------------------------

def _pick_stats(stats: list[NormStats], target: str) -> NormStats:
    for candidate in stats:
        if candidate.target == target:
            return candidate
    raise StatsMismatch(f"[!] No '{target}' stats among {[s.target for s in stats]}.")


def _read_outputs(path, topology: SkeletonTopology, output: str) -> list:
    """Predicted joints or bones from a JSONL file, converted to the variant's output representation."""
    outputs = []
    for line_number, record in read_records(path):
        key = "bones" if "bones" in record else "joints"
        pose = pose_from_record(record, path, line_number, key=key)
        if pose.num_joints != topology.num_joints:
            raise MalformedInput(path, line_number, f"{pose.num_joints} rows, skeleton has {topology.num_joints}")
        coords = pose.coords
        if key == "joints" and output == "bones":
            coords = joints_to_bones_array(coords, topology)
        elif key == "bones" and output == "joints":
            coords = bones_to_joints_array(coords, topology)
        outputs.append(pose.with_coords(coords))
    return outputs


def _load_stats(path) -> NormStats:
    try:
        return NormStats.load(path)
    except KeyError as missing:
        raise MalformedInput(path, 0, f"stats file is missing {missing}") from None


def run_loss(args) -> int:
    topology = _topology(args)
    variant = get_variant(args.variant)
    stats = [_load_stats(path) for path in args.stats]
    output_stats = _pick_stats(stats, variant.output)
    delta_stats = _pick_stats(stats, f"pairs:{variant.pair_kind}") if variant.pair_kind else None
    loss = VariantLoss(variant, topology, output_stats, delta_stats, squared=args.squared)

    preds = _read_outputs(args.pred, topology, variant.output)
    if not preds:
        raise MalformedInput(args.pred, 0, "no records")
    gts = read_poses(args.gt)
    _match(preds, gts, args.pred)
    if len({p.dims for p in preds}) > 1:
        raise MixedDims("[!] Predictions mix 2- and 3-coordinate records.")
    dims = preds[0].dims
    if dims != loss.dims:
        raise StatsMismatch(f"[!] Predictions have {dims} coordinates, stats have {loss.dims}.")

    outputs = np.stack([p.coords for p in preds])
    if not args.normalized:
        outputs = output_stats.normalize(outputs)
    targets, is_3d = stack_ground_truth(gts, dims=dims)
    batch = loss.batch(outputs, targets, is_3d)

    samples = []
    for i, gt in enumerate(gts):
        result = batch.sample(i)
        samples.append({
            "id": gt.sample_id,
            "dims": gt.dims,
            "value": result.value,
            "mean_per_pair": result.mean_per_pair,
            "terms": result.terms(),
        })
    total = float(sum(sample["value"] for sample in samples))
    if not np.isclose(total, batch.value, rtol=1e-9, atol=1e-12):
        raise InvariantViolation(f"[!] Per-sample losses sum to {total}, batch total is {batch.value}.")
    _emit({
        "variant": variant.name,
        "label": variant.label,
        "num_samples": len(samples),
        "total": total,
        "mean_per_pair": total / (len(samples) * len(batch.labels)),
        "samples": samples,
    })
    return EXIT_OK


# --- eval ----------------------------------------------------------------

def run_eval(args) -> int:
    topology = _topology(args)
    preds = read_poses(args.pred)
    gts = read_poses(args.gt)
    _match(preds, gts, args.pred)
    limits = AngleLimits.load(args.angle_limits) if args.angle_limits else None
    report = evaluate_poses(preds, gts, topology, angle_limits=limits, pa_scale=args.pa_scale == "on")
    if args.out:
        write_json(args.out, report.to_dict())
    _emit(report.to_dict())
    return EXIT_OK


# --- synth ---------------------------------------------------------------

def run_synth(args) -> int:
    config = SynthConfig.load(args.config)
    if args.skeleton:
        config = config.with_overrides(topology=_topology(args))
    if args.seed is not None:
        config = config.with_overrides(seed=args.seed)
    dataset = generate(config)
    dataset.save(args.out)
    logger.info("Wrote %d samples to %s.", len(dataset), args.out)
    _emit({"num_samples": len(dataset), "num_2d": int((~dataset.is_3d).sum()), "frame": dataset.frame,
           "out": str(args.out)})
    return EXIT_OK


# --- train-demo ----------------------------------------------------------

def run_train_demo(args) -> int:
    config = ComparisonConfig.load(args.config) if args.config else ComparisonConfig()
    result = evaluate_variants(config, variants=args.variants, seeds=args.seeds)
    write_json(args.out, result.to_dict())
    if args.pretty:
        sys.stderr.write(result.to_text() + "\n")
    _emit({"out": str(args.out), "table": result.table(), "trends": result.trends()})
    return EXIT_OK


# --- compose -------------------------------------------------------------

def run_compose(args) -> int:
    topology = _topology(args)
    poses = []
    for line_number, record in read_records(args.bones):
        bones = pose_from_record(record, args.bones, line_number, key="bones")
        if bones.num_joints != topology.num_joints:
            raise MalformedInput(args.bones, line_number, f"{bones.num_joints} bones, skeleton has {topology.num_joints}")
        joints = bones_to_joints(BonePose(bones.coords), topology, sample_id=bones.sample_id,
                                 subject=bones.subject, camera=bones.camera, root_depth=bones.root_depth)
        if not np.allclose(joints_to_bones_array(joints.coords, topology), bones.coords, rtol=0.0, atol=1e-6):
            raise InvariantViolation(f"[!] Composed joints of '{bones.sample_id}' do not reproduce their bones.")
        poses.append(joints)
    write_poses(args.out, poses)
    _emit({"num_samples": len(poses), "out": str(args.out)})
    return EXIT_OK


# --- backproject ---------------------------------------------------------

def run_backproject(args) -> int:
    poses = read_poses(args.pred2d)
    camera = PinholeCamera.from_dict(read_json(args.camera)) if args.camera else None
    depths = {}
    for line_number, record in read_records(args.depths):
        if "id" not in record or "depths" not in record:
            raise MalformedInput(args.depths, line_number, "record needs 'id' and 'depths'")
        depths[str(record["id"])] = (line_number, record["depths"])

    results = []
    for pose in poses:
        if pose.sample_id not in depths:
            raise MalformedInput(args.depths, 0, f"no depths for sample '{pose.sample_id}'")
        line_number, values = depths[pose.sample_id]
        try:
            results.append(backproject_pose(pose, values, camera))
        except (TypeError, ValueError) as error:
            raise MalformedInput(args.depths, line_number, str(error).removeprefix("[!] ")) from None
    write_poses(args.out, results)
    _emit({"num_samples": len(results), "out": str(args.out)})
    return EXIT_OK


# --- parser --------------------------------------------------------------

INPUTS = ("gt", "pred", "stats", "config", "angle_limits", "bones", "pred2d", "depths", "skeleton", "camera")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="posekit", description="Compositional pose regression tools.")
    parser.add_argument("--version", action="version", version=f"posekit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, handler, help_text, skeleton=True):
        sub = commands.add_parser(name, help=help_text)
        if skeleton:
            sub.add_argument("--skeleton", type=Path, help="skeleton JSON (default: built-in 17-joint layout)")
        sub.set_defaults(handler=handler)
        return sub

    sub = command("stats", run_stats, "fit normalization stats on ground truth")
    sub.add_argument("--gt", type=Path, required=True)
    sub.add_argument("--target", choices=("joints", "bones", "pairs"), required=True)
    sub.add_argument("--pairs", choices=("joint", "bone", "both", "all"))
    sub.add_argument("--allow-mixed", action="store_true", help="fit xy on every sample and z on 3D samples")
    sub.add_argument("--shared", action="store_true", help="derive pair stats from joint stats")
    sub.add_argument("--out", type=Path, required=True)

    sub = command("loss", run_loss, "evaluate a loss variant on predictions")
    sub.add_argument("--pred", type=Path, required=True)
    sub.add_argument("--gt", type=Path, required=True)
    sub.add_argument("--variant", choices=tuple(VARIANTS), required=True)
    sub.add_argument("--stats", type=Path, nargs="+", required=True)
    sub.add_argument("--normalized", action="store_true", help="predictions are already normalized outputs")
    sub.add_argument("--squared", action="store_true", help="diagnostic squared-error terms")

    sub = command("eval", run_eval, "evaluate predictions with every pose metric")
    sub.add_argument("--pred", type=Path, required=True)
    sub.add_argument("--gt", type=Path, required=True)
    sub.add_argument("--angle-limits", type=Path)
    sub.add_argument("--pa-scale", choices=("on", "off"), default="on")
    sub.add_argument("--out", type=Path)

    sub = command("synth", run_synth, "generate a synthetic dataset")
    sub.add_argument("--config", type=Path, required=True)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", type=Path, required=True)

    sub = command("train-demo", run_train_demo, "train and compare the loss variants", skeleton=False)
    sub.add_argument("--config", type=Path)
    sub.add_argument("--variants", help="'all' or a comma list of variant names (default: from config)")
    sub.add_argument("--seeds", type=int, default=None, help="run seeds 0..N-1 (default: from config)")
    sub.add_argument("--pretty", action="store_true", help="print the table on stderr")
    sub.add_argument("--out", type=Path, required=True)

    sub = command("compose", run_compose, "compose joints from bone vectors")
    sub.add_argument("--bones", type=Path, required=True)
    sub.add_argument("--out", type=Path, required=True)

    sub = command("backproject", run_backproject, "recover camera-space poses from pixels and depths")
    sub.add_argument("--pred2d", type=Path, required=True)
    sub.add_argument("--depths", type=Path, required=True)
    sub.add_argument("--camera", type=Path, help="intrinsics JSON overriding the per-record cameras")
    sub.add_argument("--out", type=Path, required=True)
    return parser


def _check_paths(parser: argparse.ArgumentParser, args):
    for name in INPUTS:
        value = getattr(args, name, None)
        for path in value if isinstance(value, list) else [value]:
            if path is not None and not Path(path).is_file():
                parser.error(f"--{name.replace('_', '-')}: no such file '{path}'")
    out = getattr(args, "out", None)
    if out is not None and not Path(out).resolve().parent.is_dir():
        parser.error(f"--out: directory of '{out}' does not exist")
    if getattr(args, "seeds", None) is not None and args.seeds < 1:
        parser.error("--seeds must be at least 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    _check_paths(parser, args)
    try:
        return args.handler(args)
    except InvariantViolation as error:
        return _fail(error, EXIT_INTERNAL)
    except PoseKitError as error:
        return _fail(error, EXIT_INPUT)
    except OSError as error:
        return _fail(f"[!] {error}", EXIT_INPUT)
    except Exception as error:
        logger.debug("Unexpected internal error.", exc_info=True)
        return _fail(f"[!] Internal error: {type(error).__name__}: {error}", EXIT_INTERNAL)


if __name__ == "__main__":
    sys.exit(main())
