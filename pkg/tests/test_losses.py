import numpy as np
import pytest

from posekit.exceptions import InvalidConfig, InvalidPairSet, KinkProximity, ShapeMismatch, StatsMismatch
from posekit.losses import (
    CompositionalLoss,
    VARIANTS,
    VariantLoss,
    bone_loss,
    build_pair_set,
    compose_delta,
    compositional_loss,
    finite_difference_check,
    joint_loss,
    mixed_loss,
    resolve_variants,
    stack_ground_truth,
)
from posekit.representation import (
    NormStats,
    Pose,
    bones_to_joints_array,
    delta_stats_from_joints,
    fit_stats,
    joints_to_bones_array,
    with_origin,
)
from posekit.skeleton import SkeletonTopology
from posekit.training import SynthConfig, generate

KINDS = ("joint", "bone", "both", "all")


def unit_stats(rows, columns, target, pairs=None):
    return NormStats(mean=np.zeros((rows, columns)), std=np.ones((rows, columns)), target=target, count=2, pairs=pairs)


def random_instance(rng, make_tree, make_stats, kind, num_joints, dims=3):
    topology = make_tree(rng, num_joints)
    pair_set = build_pair_set(kind, topology)
    bone_stats = make_stats(rng, num_joints, dims, "bones")
    delta_stats = make_stats(rng, len(pair_set), dims, f"pairs:{kind}", pairs=pair_set.pairs)
    gt = Pose(rng.normal(scale=3.0, size=(num_joints, dims)))
    bones = rng.normal(size=(num_joints, dims))
    return topology, pair_set, bone_stats, delta_stats, gt, bones


class TestComposeDelta:
    def test_single_step_is_minus_the_bone(self, rng, chain3, make_stats):
        stats = make_stats(rng, 3, 3, "bones")
        pair_set = build_pair_set("bone", chain3)
        bones = rng.normal(size=(3, 3))
        for pair, path in pair_set:
            k = pair[0]
            delta = compose_delta(bones, pair, path, stats)
            np.testing.assert_allclose(delta, -stats.unnormalize(bones)[k - 1], rtol=1e-12, atol=1e-12)

    def test_ground_truth_bones_reproduce_joint_differences(self, rng, make_tree, make_stats):
        for _ in range(200):
            num_joints = int(rng.integers(2, 9))
            topology = make_tree(rng, num_joints)
            stats = make_stats(rng, num_joints, 3, "bones")
            joints = rng.normal(size=(num_joints, 3))
            normalized = stats.normalize(joints_to_bones_array(joints, topology))
            padded = with_origin(joints)
            for path in build_pair_set("all", topology).paths + build_pair_set("joint", topology).paths:
                u, v = path.endpoints
                delta = compose_delta(normalized, (u, v), path, stats)
                np.testing.assert_allclose(delta, padded[u] - padded[v], rtol=1e-9, atol=1e-9)

    def test_zero_bones_with_zero_mean(self, h36m):
        stats = unit_stats(17, 3, "bones")
        path = h36m.path_between(14, 7)
        assert not compose_delta(np.zeros((17, 3)), (14, 7), path, stats).any()

    def test_jacobian_holds_signed_std(self, rng, h36m, make_stats):
        stats = make_stats(rng, 17, 3, "bones")
        path = h36m.path_between(14, 4)
        _, jacobian = compose_delta(rng.normal(size=(17, 3)), (14, 4), path, stats, return_jacobian=True)
        for step in path.steps:
            np.testing.assert_array_equal(jacobian[step.bone - 1], step.sign * stats.std[step.bone - 1])
        assert np.count_nonzero(jacobian.any(axis=1)) == len(path)

    def test_path_must_match_pair(self, h36m):
        with pytest.raises(InvalidPairSet):
            compose_delta(np.zeros((17, 3)), (2, 1), h36m.path_between(3, 1), unit_stats(17, 3, "bones"))


class TestCompositionalLoss:
    def test_zero_at_truth(self, rng, h36m):
        poses = generate(SynthConfig(num_samples=20, seed=5)).poses
        for kind in KINDS:
            pair_set = build_pair_set(kind, h36m)
            bone_stats = fit_stats(poses, "bones", h36m)
            delta_stats = fit_stats(poses, "pair_deltas", h36m, pair_set=pair_set)
            gt = poses[3]
            bones = bone_stats.normalize(joints_to_bones_array(gt.coords, h36m))
            result = compositional_loss(bones, gt, pair_set, bone_stats, delta_stats)
            assert result.value == pytest.approx(0.0, abs=1e-9)

    def test_exact_zero_gradient_at_truth_with_unit_stats(self, rng, h36m):
        pair_set = build_pair_set("bone", h36m)
        gt = Pose(rng.normal(size=(17, 3)))
        bones = joints_to_bones_array(gt.coords, h36m)
        result = compositional_loss(bones, gt, pair_set, unit_stats(17, 3, "bones"),
                                    unit_stats(17, 3, "pairs:bone", pair_set.pairs))
        assert result.value == 0.0
        assert not result.grad_bones.any()

    def test_single_perturbed_bone(self):
        topology = SkeletonTopology(parent=(0, 1))
        pair_set = build_pair_set("bone", topology)
        gt = Pose([[1.0, 2.0, 3.0], [2.0, 0.0, 1.0]])
        bones = joints_to_bones_array(gt.coords, topology)
        bones[1, 0] += 0.25
        result = compositional_loss(bones, gt, pair_set, unit_stats(2, 3, "bones"),
                                    unit_stats(2, 3, "pairs:bone", pair_set.pairs))
        assert result.value == pytest.approx(0.25, abs=1e-12)
        assert result.terms() == pytest.approx({"1,0": 0.0, "2,1": 0.25}, abs=1e-12)

    def test_matches_brute_force_oracle(self, rng, make_tree, make_stats):
        for _ in range(200):
            kind = KINDS[int(rng.integers(len(KINDS)))]
            num_joints = int(rng.integers(2, 9))
            topology, pair_set, bone_stats, delta_stats, gt, bones = random_instance(
                rng, make_tree, make_stats, kind, num_joints
            )
            result = compositional_loss(bones, gt, pair_set, bone_stats, delta_stats)
            joints = with_origin(bones_to_joints_array(bone_stats.unnormalize(bones), topology))
            truth = with_origin(gt.coords)
            expected = 0.0
            for row, (u, v) in enumerate(pair_set.pairs):
                predicted = (joints[u] - joints[v] - delta_stats.mean[row]) / delta_stats.std[row]
                target = (truth[u] - truth[v] - delta_stats.mean[row]) / delta_stats.std[row]
                expected += float(np.abs(predicted - target).sum())
            assert result.value == pytest.approx(expected, rel=1e-10)
            assert result.value == pytest.approx(float(result.term_breakdown.sum()), rel=1e-12)

    def test_pair_order_does_not_matter(self, rng, h36m, make_stats):
        pairs = list(build_pair_set("all", h36m).pairs)
        shuffled = [pairs[i] for i in rng.permutation(len(pairs))]
        first = build_pair_set("custom", h36m, pairs=pairs)
        second = build_pair_set("custom", h36m, pairs=shuffled)
        bone_stats = make_stats(rng, 17, 3, "bones")
        delta_stats = make_stats(rng, len(pairs), 3, "pairs:custom", pairs=first.pairs)
        gt, bones = Pose(rng.normal(size=(17, 3))), rng.normal(size=(17, 3))
        a = compositional_loss(bones, gt, first, bone_stats, delta_stats)
        b = compositional_loss(bones, gt, second, bone_stats, delta_stats)
        assert a.value == b.value
        np.testing.assert_array_equal(a.grad, b.grad)

    def test_gradient_is_zero_off_every_path(self, rng, h36m, make_stats):
        pair_set = build_pair_set("custom", h36m, pairs=[(4, 1)])
        result = compositional_loss(rng.normal(size=(17, 3)), Pose(rng.normal(size=(17, 3))), pair_set,
                                    make_stats(rng, 17, 3, "bones"),
                                    make_stats(rng, 1, 3, "pairs:custom", pairs=pair_set.pairs))
        on_path = {2, 3, 4}
        for k in h36m.joints:
            assert result.grad[k - 1].any() == (k in on_path)

    def test_stats_for_another_pair_set(self, rng, h36m, make_stats):
        pair_set = build_pair_set("both", h36m)
        wrong = make_stats(rng, 17, 3, "pairs:bone", pairs=build_pair_set("bone", h36m).pairs)
        with pytest.raises(StatsMismatch):
            CompositionalLoss(pair_set, make_stats(rng, 17, 3, "bones"), wrong)

    def test_ground_truth_dims_must_match(self, rng, h36m, make_stats):
        pair_set = build_pair_set("bone", h36m)
        loss = CompositionalLoss(pair_set, make_stats(rng, 17, 3, "bones"),
                                 make_stats(rng, 17, 3, "pairs:bone", pairs=pair_set.pairs))
        with pytest.raises(ShapeMismatch):
            loss(np.zeros((17, 3)), Pose(np.zeros((17, 2))))

    def test_squared_diagnostic(self):
        topology = SkeletonTopology(parent=(0, 1))
        pair_set = build_pair_set("bone", topology)
        gt = Pose(np.zeros((2, 3)))
        bones = np.zeros((2, 3))
        bones[1, 2] = 0.5
        result = compositional_loss(bones, gt, pair_set, unit_stats(2, 3, "bones"),
                                    unit_stats(2, 3, "pairs:bone", pair_set.pairs), squared=True)
        assert result.value == pytest.approx(0.25)
        assert result.mean_per_pair == pytest.approx(0.125)


class TestDegenerateCases:
    def test_bone_loss_equals_bone_pair_set(self, rng, make_tree):
        for _ in range(200):
            topology = make_tree(rng, int(rng.integers(2, 12)))
            poses = [Pose(rng.normal(scale=10.0, size=(topology.num_joints, 3))) for _ in range(6)]
            pair_set = build_pair_set("bone", topology)
            bone_stats = fit_stats(poses, "bones", topology)
            delta_stats = fit_stats(poses, "pair_deltas", topology, pair_set=pair_set)
            bones = rng.normal(size=(topology.num_joints, 3))
            direct = bone_loss(bones, poses[0], topology, bone_stats)
            composed = compositional_loss(bones, poses[0], pair_set, bone_stats, delta_stats)
            assert direct.labels == composed.labels
            np.testing.assert_allclose(direct.term_breakdown, composed.term_breakdown, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(direct.grad, composed.grad, rtol=1e-12, atol=1e-12)

    def test_joint_pair_set_with_joint_stats_equals_joint_loss(self, rng, make_tree):
        for _ in range(200):
            topology = make_tree(rng, int(rng.integers(1, 12)))
            poses = [Pose(rng.normal(scale=10.0, size=(topology.num_joints, 3))) for _ in range(6)]
            pair_set = build_pair_set("joint", topology)
            joint_stats = fit_stats(poses, "joints", topology)
            bone_stats = fit_stats(poses, "bones", topology)
            delta_stats = delta_stats_from_joints(joint_stats, pair_set)
            predicted = rng.normal(scale=10.0, size=(topology.num_joints, 3))
            bones = bone_stats.normalize(joints_to_bones_array(predicted, topology))
            composed = compositional_loss(bones, poses[0], pair_set, bone_stats, delta_stats)
            direct = joint_loss(joint_stats.normalize(predicted), poses[0], joint_stats)
            assert composed.value == pytest.approx(direct.value, rel=1e-12, abs=1e-12)

    def test_joint_loss_examples(self, rng):
        stats = unit_stats(4, 3, "joints")
        gt = Pose(rng.normal(size=(4, 3)))
        assert joint_loss(gt.coords, gt, stats).value == 0.0
        shifted = gt.coords.copy()
        shifted[2, 1] += 0.75
        assert joint_loss(shifted, gt, stats).value == pytest.approx(0.75)

    def test_one_bone_off(self, chain3):
        gt = Pose(np.zeros((3, 3)))
        bones = np.zeros((3, 3))
        bones[2, 0] = 0.5
        assert bone_loss(bones, gt, chain3, unit_stats(3, 3, "bones")).value == pytest.approx(0.5)


class TestMixedLoss:
    def setup_loss(self, rng, h36m, make_stats, kind="all"):
        pair_set = build_pair_set(kind, h36m)
        return pair_set, make_stats(rng, 17, 3, "bones"), make_stats(rng, len(pair_set), 3, f"pairs:{kind}",
                                                                      pairs=pair_set.pairs)

    def test_3d_sample_uses_every_coordinate(self, rng, h36m, make_stats):
        pair_set, bone_stats, delta_stats = self.setup_loss(rng, h36m, make_stats)
        gt, bones = Pose(rng.normal(size=(17, 3))), rng.normal(size=(17, 3))
        mixed = mixed_loss(bones, gt, pair_set, bone_stats, delta_stats)
        full = compositional_loss(bones, gt, pair_set, bone_stats, delta_stats)
        assert mixed.value == full.value
        np.testing.assert_array_equal(mixed.grad, full.grad)

    def test_2d_sample_ignores_predicted_depth(self, rng, h36m, make_stats):
        pair_set, bone_stats, delta_stats = self.setup_loss(rng, h36m, make_stats)
        gt, bones = Pose(rng.normal(size=(17, 2))), rng.normal(size=(17, 3))
        result = mixed_loss(bones, gt, pair_set, bone_stats, delta_stats)
        assert np.array_equal(result.grad[:, 2], np.zeros(17))
        assert not np.signbit(result.grad[:, 2]).any()
        assert result.residuals.shape == (len(pair_set), 2)
        for _ in range(10):
            moved = bones.copy()
            moved[:, 2] = rng.normal(scale=100.0, size=17)
            assert mixed_loss(moved, gt, pair_set, bone_stats, delta_stats).value == result.value

    def test_batch_is_the_sum_of_samples(self, rng, h36m, make_stats):
        pair_set, bone_stats, delta_stats = self.setup_loss(rng, h36m, make_stats, kind="both")
        loss = CompositionalLoss(pair_set, bone_stats, delta_stats)
        gts = [Pose(rng.normal(size=(17, 2))), Pose(rng.normal(size=(17, 3)))]
        bones = rng.normal(size=(2, 17, 3))
        coords, is_3d = stack_ground_truth(gts, dims=3)
        batch = loss.batch(bones, coords, is_3d)
        singles = [loss.mixed(b, gt).value for b, gt in zip(bones, gts)]
        assert batch.value == pytest.approx(sum(singles), rel=1e-12)
        assert batch.sample(0).value == pytest.approx(singles[0], rel=1e-12)
        assert not batch.grad[0, :, 2].any()

    def test_needs_three_output_coordinates(self, rng, h36m, make_stats):
        pair_set, bone_stats, delta_stats = self.setup_loss(rng, h36m, make_stats)
        with pytest.raises(ShapeMismatch):
            mixed_loss(np.zeros((17, 2)), Pose(np.zeros((17, 2))), pair_set, bone_stats, delta_stats)


def checked(loss_fn, draw, attempts=50):
    """Run the gradient check at the first draw that is not next to a kink."""
    for _ in range(attempts):
        try:
            return finite_difference_check(loss_fn, draw(), epsilon=1e-5)
        except KinkProximity:
            continue
    raise AssertionError("no kink-free point found")


class TestGradientCheck:
    def test_quadratic(self, rng):
        scale = rng.uniform(0.5, 2.0, size=(4, 3))
        check = finite_difference_check(lambda x: (float((scale * x ** 2).sum()), 2.0 * scale * x),
                                        rng.normal(size=(4, 3)))
        assert check.max_relative_error <= 1e-8

    @pytest.mark.parametrize("kind", KINDS)
    def test_compositional_loss(self, rng, make_tree, make_stats, kind):
        for _ in range(25):
            num_joints = int(rng.integers(2, 7))
            _, pair_set, bone_stats, delta_stats, gt, _ = random_instance(rng, make_tree, make_stats, kind, num_joints)
            loss = CompositionalLoss(pair_set, bone_stats, delta_stats)
            check = checked(lambda b: loss(b, gt), lambda: rng.normal(size=(num_joints, 3)))
            assert check.max_relative_error <= 1e-5

    def test_mixed_loss(self, rng, make_tree, make_stats):
        for i in range(25):
            num_joints = int(rng.integers(2, 7))
            kind = KINDS[i % len(KINDS)]
            _, pair_set, bone_stats, delta_stats, gt, _ = random_instance(rng, make_tree, make_stats, kind, num_joints)
            gt = Pose(gt.coords[:, :2]) if i % 2 else gt
            loss = CompositionalLoss(pair_set, bone_stats, delta_stats)
            check = checked(lambda b: loss.mixed(b, gt), lambda: rng.normal(size=(num_joints, 3)))
            assert check.max_relative_error <= 1e-5
            if gt.dims == 2:
                assert not check.analytic[:, 2].any()

    def test_kink_is_rejected(self, chain3):
        pair_set = build_pair_set("bone", chain3)
        gt = Pose(np.zeros((3, 3)))
        loss = CompositionalLoss(pair_set, unit_stats(3, 3, "bones"), unit_stats(3, 3, "pairs:bone", pair_set.pairs))
        with pytest.raises(KinkProximity):
            finite_difference_check(lambda b: loss(b, gt), np.zeros((3, 3)))


class TestVariants:
    def test_registry(self):
        assert list(VARIANTS) == ["baseline", "joint", "bone", "both", "all"]
        assert VARIANTS["all"].label == "Ours (all)"
        assert VARIANTS["baseline"].output == "joints"

    def test_resolve(self):
        assert [v.name for v in resolve_variants("all")] == list(VARIANTS)
        assert [v.name for v in resolve_variants("all,baseline")] == ["baseline", "all"]
        assert [v.name for v in resolve_variants("ours-all")] == ["all"]
        with pytest.raises(InvalidConfig):
            resolve_variants("best")

    def test_every_variant_is_zero_at_truth_and_nonnegative(self, rng, h36m):
        poses = generate(SynthConfig(num_samples=40, seed=4)).poses
        coords, is_3d = stack_ground_truth(poses, dims=3)
        for name in VARIANTS:
            loss = VariantLoss.fit(name, h36m, poses)
            outputs = coords if loss.variant.output == "joints" else joints_to_bones_array(coords, h36m)
            truth = loss.batch(loss.output_stats.normalize(outputs), coords, is_3d)
            assert truth.value == pytest.approx(0.0, abs=1e-6)
            noisy = loss.batch(rng.normal(size=coords.shape), coords, is_3d)
            assert noisy.value > 0.0
            assert (noisy.per_sample >= 0.0).all()

    def test_to_joints_inverts_the_outputs(self, h36m):
        poses = generate(SynthConfig(num_samples=20, seed=6)).poses
        coords = np.stack([p.coords for p in poses])
        for name in ("baseline", "all"):
            loss = VariantLoss.fit(name, h36m, poses)
            outputs = coords if name == "baseline" else joints_to_bones_array(coords, h36m)
            np.testing.assert_allclose(loss.to_joints(loss.output_stats.normalize(outputs)), coords, atol=1e-9)

    def test_stats_must_fit_the_variant(self, h36m):
        poses = generate(SynthConfig(num_samples=20, seed=7)).poses
        with pytest.raises(StatsMismatch):
            VariantLoss("bone", h36m, fit_stats(poses, "joints", h36m))
