import numpy as np
import pytest

from posekit.exceptions import (
    CycleDetected,
    IndexOutOfRange,
    MalformedInput,
    MultipleRoots,
    OrphanJoint,
    ShapeMismatch,
)
from posekit.representation.representation import with_origin
from posekit.skeleton import ORIGIN, SkeletonTopology, path_between, validate


def steps_of(path):
    return [(step.bone, step.sign) for step in path.steps]


def compose(path, bones):
    return sum(step.sign * bones[step.bone - 1] for step in path.steps)


def bones_of(joints, topology):
    padded = with_origin(joints)
    return np.array([padded[topology.parent_of(k)] - padded[k] for k in topology.joints])


class TestValidate:
    def test_chain_is_valid(self):
        assert validate(SkeletonTopology(parent=[0, 1, 2])) is True

    def test_two_joint_cycle(self):
        with pytest.raises(CycleDetected):
            validate(SkeletonTopology(parent=[2, 1]))

    def test_self_parent(self):
        with pytest.raises(CycleDetected):
            validate(SkeletonTopology(parent=[0, 2]))

    def test_two_roots(self):
        with pytest.raises(MultipleRoots):
            validate(SkeletonTopology(parent=[0, 0]))

    def test_parent_out_of_range(self):
        with pytest.raises(OrphanJoint):
            validate(SkeletonTopology(parent=[0, 5]))

    def test_errors_are_value_errors(self):
        with pytest.raises(ValueError, match=r"\[!\]"):
            validate(SkeletonTopology(parent=[0, 0]))

    def test_name_count_must_match(self):
        with pytest.raises(ShapeMismatch):
            validate(SkeletonTopology(parent=[0, 1], joint_names=["a"]))

    def test_root_cannot_be_limb_joint(self):
        with pytest.raises(IndexOutOfRange):
            validate(SkeletonTopology(parent=[0, 1], limb_joints=[1]))

    def test_limb_joint_needs_a_bone_above_its_parent(self):
        with pytest.raises(IndexOutOfRange, match="hangs from the root"):
            validate(SkeletonTopology(parent=[0, 1, 2], limb_joints=[2]))
        assert validate(SkeletonTopology(parent=[0, 1, 2], limb_joints=[3]))

    def test_random_trees_are_valid(self, rng, make_tree):
        for _ in range(50):
            assert validate(make_tree(rng, int(rng.integers(1, 33))))


class TestTopology:
    def test_h36m_layout(self, h36m):
        assert h36m.num_joints == 17
        assert h36m.root == 1
        assert h36m.name_of(h36m.root) == "Pelvis"
        assert h36m.depth(h36m.index_of("RAnkle")) == 4
        assert h36m.children(h36m.index_of("Thorax")) == (10, 12, 15)
        assert len(h36m.body_bones) == 16

    def test_topological_order_puts_parents_first(self, rng, make_tree):
        topology = make_tree(rng, 20)
        position = {k: i for i, k in enumerate(topology.topological_order)}
        for k in topology.joints:
            parent = topology.parent_of(k)
            if parent != ORIGIN:
                assert position[parent] < position[k]

    def test_dict_round_trip(self, h36m, tmp_path):
        path = tmp_path / "skeleton.json"
        h36m.save(path)
        loaded = SkeletonTopology.load(path)
        assert loaded.parent == h36m.parent
        assert loaded.joint_names == h36m.joint_names
        assert loaded.limb_joints == h36m.limb_joints

    def test_num_joints_must_match_parent(self):
        with pytest.raises(ShapeMismatch):
            SkeletonTopology.from_dict({"num_joints": 3, "parent": [0, 1]})

    @pytest.mark.parametrize(
        "data",
        [
            {"parent": [0, "1"]},
            {"parent": [0, 1.0]},
            {"parent": [0, True]},
            {"parent": "01"},
            {"parent": [0, 1], "limb_joints": ["2"]},
            {"parent": [0, 1], "num_joints": "2"},
            {"parent": [0, 1], "joint_names": "ab"},
        ],
    )
    def test_definition_needs_integer_indices(self, data):
        with pytest.raises(ShapeMismatch):
            SkeletonTopology.from_dict(data)

    def test_load_rejects_invalid_utf8(self, tmp_path):
        path = tmp_path / "skeleton.json"
        path.write_bytes(b'{"parent": [0, 1],\n "joint_names": ["\xff", "b"]}')
        with pytest.raises(MalformedInput) as info:
            SkeletonTopology.load(path)
        assert info.value.line_number == 2


class TestPathBetween:
    def test_ascent_from_leaf_to_origin(self, chain3):
        assert steps_of(path_between(chain3, 0, 3)) == [(3, 1), (2, 1), (1, 1)]

    def test_descent_from_origin_to_leaf(self, chain3):
        assert steps_of(path_between(chain3, 3, 0)) == [(1, -1), (2, -1), (3, -1)]

    def test_inner_pair(self, chain3, rng):
        path = path_between(chain3, 1, 3)
        assert steps_of(path) == [(3, 1), (2, 1)]
        joints = rng.normal(size=(3, 3))
        bones = bones_of(joints, chain3)
        np.testing.assert_allclose(compose(path, bones), joints[0] - joints[2], rtol=1e-12, atol=1e-12)

    def test_leaves_of_a_fork(self):
        fork = SkeletonTopology(parent=(0, 1, 1))
        path = path_between(fork, 2, 3)
        assert steps_of(path) == [(3, 1), (2, -1)]

    def test_same_endpoints_rejected(self, chain3):
        with pytest.raises(IndexOutOfRange):
            path_between(chain3, 2, 2)

    def test_index_out_of_range(self, chain3):
        with pytest.raises(IndexOutOfRange):
            path_between(chain3, 1, 4)

    def test_telescoping_on_random_trees(self, rng, make_tree):
        for _ in range(1000):
            topology = make_tree(rng, int(rng.integers(1, 33)))
            joints = rng.normal(size=(topology.num_joints, 3))
            bones = bones_of(joints, topology)
            padded = with_origin(joints)
            for _ in range(5):
                u, v = rng.choice(topology.num_joints + 1, size=2, replace=False)
                path = path_between(topology, int(u), int(v))
                assert len(path) <= topology.num_joints
                assert len(set(path.bones)) == len(path)
                np.testing.assert_allclose(compose(path, bones), padded[u] - padded[v], rtol=1e-9, atol=1e-9)

    def test_swapping_endpoints_reverses_and_flips(self, rng, make_tree):
        for _ in range(100):
            topology = make_tree(rng, int(rng.integers(2, 17)))
            u, v = rng.choice(topology.num_joints + 1, size=2, replace=False)
            forward = path_between(topology, int(u), int(v))
            backward = path_between(topology, int(v), int(u))
            assert backward.steps == forward.reversed().steps
