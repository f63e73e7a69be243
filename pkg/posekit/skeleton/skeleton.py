import json
import logging
import numbers
from dataclasses import dataclass, field
from pathlib import Path

from posekit.exceptions import (
    CycleDetected,
    IndexOutOfRange,
    MalformedInput,
    MultipleRoots,
    OrphanJoint,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)

ORIGIN = 0


@dataclass(frozen=True)
class PathStep:
    """One bone traversed on a tree path, with its composition sign."""

    bone: int
    sign: int


@dataclass(frozen=True)
class TreePath:
    """
    Unique tree path between two joints, oriented so that
    sum(step.sign * B[step.bone]) == J[u] - J[v].

    Steps walk from `v` to `u`: ascending steps (toward a parent) come first and
    carry +1, descending steps carry -1.
    """

    endpoints: tuple[int, int]
    steps: tuple[PathStep, ...]

    @property
    def bones(self) -> tuple[int, ...]:
        return tuple(step.bone for step in self.steps)

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(step.sign for step in self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def reversed(self) -> "TreePath":
        """Path for the swapped pair (v, u)."""
        u, v = self.endpoints
        flipped = tuple(PathStep(s.bone, -s.sign) for s in reversed(self.steps))
        return TreePath(endpoints=(v, u), steps=flipped)


@dataclass(frozen=True)
class SkeletonTopology:
    """
    Parent-indexed kinematic tree.

    Joints are numbered 1..K; index 0 is the virtual origin J_0, which is the
    parent of the root joint. Construction only normalizes types; call
    `validate()` (or the module-level `validate`) to check the tree invariants.

    Parameters
    ----------
    parent : sequence of int
        `parent[k - 1]` is the parent of joint k, in 0..K.
    joint_names : sequence of str, optional
        One label per joint, used in reports.
    limb_joints : sequence of int, optional
        Joints whose bend angle is checked by the illegal-angle metric.
    """

    parent: tuple[int, ...]
    joint_names: tuple[str, ...] | None = None
    limb_joints: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "parent", tuple(int(p) for p in self.parent))
        if self.joint_names is not None:
            object.__setattr__(self, "joint_names", tuple(str(n) for n in self.joint_names))
        object.__setattr__(self, "limb_joints", tuple(int(j) for j in self.limb_joints))

    @property
    def num_joints(self) -> int:
        return len(self.parent)

    @property
    def joints(self) -> range:
        return range(1, self.num_joints + 1)

    @property
    def root(self) -> int:
        roots = [k for k in self.joints if self.parent_of(k) == ORIGIN]
        if len(roots) != 1:
            raise MultipleRoots(f"[!] Expected exactly one root joint, found {len(roots)}.")
        return roots[0]

    def _check_index(self, k: int, allow_origin: bool = True):
        low = 0 if allow_origin else 1
        if not low <= k <= self.num_joints:
            raise IndexOutOfRange(f"[!] Joint index {k} outside {low}..{self.num_joints}.")

    def parent_of(self, k: int) -> int:
        self._check_index(k, allow_origin=False)
        return self.parent[k - 1]

    def children(self, k: int) -> tuple[int, ...]:
        self._check_index(k)
        return tuple(j for j in self.joints if self.parent[j - 1] == k)

    def depth(self, k: int) -> int:
        """Number of parent hops from joint k to the origin (root has depth 1)."""
        self._check_index(k)
        hops = 0
        while k != ORIGIN:
            k = self.parent[k - 1]
            hops += 1
            if hops > self.num_joints:
                raise CycleDetected(f"[!] Joint chain does not reach the origin within {self.num_joints} hops.")
        return hops

    @property
    def topological_order(self) -> tuple[int, ...]:
        """Joints sorted so every parent precedes its children."""
        return tuple(sorted(self.joints, key=lambda k: (self.depth(k), k)))

    @property
    def body_bones(self) -> tuple[int, ...]:
        """Bones that join two real joints; the root's bone only ties it to the origin."""
        return tuple(k for k in self.joints if self.parent_of(k) != ORIGIN)

    def name_of(self, k: int) -> str:
        if k == ORIGIN:
            return "origin"
        self._check_index(k, allow_origin=False)
        if self.joint_names is None:
            return f"joint_{k}"
        return self.joint_names[k - 1]

    def index_of(self, name: str) -> int:
        for k in self.joints:
            if self.name_of(k) == name:
                return k
        raise IndexOutOfRange(f"[!] Unknown joint name '{name}'.")

    def validate(self) -> "SkeletonTopology":
        validate(self)
        return self

    def path_between(self, u: int, v: int) -> TreePath:
        return path_between(self, u, v)

    def to_dict(self) -> dict:
        data = {"num_joints": self.num_joints, "parent": list(self.parent)}
        if self.joint_names is not None:
            data["joint_names"] = list(self.joint_names)
        data["limb_joints"] = list(self.limb_joints)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "SkeletonTopology":
        if not isinstance(data, dict) or "parent" not in data:
            raise ShapeMismatch("[!] A skeleton definition needs a 'parent' list.")
        parent = _indices(data, "parent")
        if "num_joints" in data and not _is_index(data["num_joints"]):
            raise ShapeMismatch(f"[!] num_joints must be an integer, got {data['num_joints']!r}.")
        joint_names = data.get("joint_names")
        if joint_names is not None and not isinstance(joint_names, (list, tuple)):
            raise ShapeMismatch(f"[!] joint_names must be a list, got {joint_names!r}.")
        if "num_joints" in data and data["num_joints"] != len(parent):
            raise ShapeMismatch(
                f"[!] num_joints={data['num_joints']} but parent lists {len(parent)} joints."
            )
        return cls(
            parent=parent,
            joint_names=joint_names,
            limb_joints=_indices(data, "limb_joints"),
        ).validate()

    @classmethod
    def load(cls, path: str | Path) -> "SkeletonTopology":
        raw = Path(path).read_bytes()
        try:
            data = json.loads(raw.decode("utf-8"))
        except UnicodeDecodeError as error:
            raise MalformedInput(path, raw.count(b"\n", 0, error.start) + 1, "invalid UTF-8") from None
        except json.JSONDecodeError as error:
            raise MalformedInput(path, error.lineno, f"invalid JSON ({error.msg})") from None
        return cls.from_dict(data)

    def save(self, path: str | Path):
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_dict(), handle, indent=2)


def _is_index(value) -> bool:
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)


def _indices(data: dict, key: str) -> list[int]:
    values = data.get(key)
    if values is None:
        values = []
    if not isinstance(values, (list, tuple)) or not all(_is_index(v) for v in values):
        raise ShapeMismatch(f"[!] Skeleton '{key}' must be a list of integer joint indices, got {values!r}.")
    return [int(v) for v in values]


def validate(topology: SkeletonTopology) -> bool:
    """
    Check the tree invariants of a skeleton.

    Returns
    -------
    bool
        True when the topology is a single tree hanging from the origin.

    Raises
    ------
    OrphanJoint
        A parent index points outside 0..K.
    CycleDetected
        A joint is its own parent or its parent chain never reaches the origin.
    MultipleRoots
        More than one joint hangs directly from the origin.
    IndexOutOfRange
        A limb joint is the root or hangs directly from it.
    """
    num_joints = topology.num_joints
    if num_joints < 1:
        raise OrphanJoint("[!] A skeleton needs at least one joint.")

    for k, p in enumerate(topology.parent, start=1):
        if not 0 <= p <= num_joints:
            raise OrphanJoint(f"[!] Joint {k} has parent {p}, outside 0..{num_joints}.")
        if p == k:
            raise CycleDetected(f"[!] Joint {k} is its own parent.")

    for k in topology.joints:
        current, hops = k, 0
        while current != ORIGIN:
            current = topology.parent[current - 1]
            hops += 1
            if hops > num_joints:
                raise CycleDetected(f"[!] Joint {k} sits on a parent cycle.")

    roots = [k for k in topology.joints if topology.parent[k - 1] == ORIGIN]
    if len(roots) > 1:
        raise MultipleRoots(f"[!] Joints {roots} all hang from the origin; expected one root.")

    if topology.joint_names is not None and len(topology.joint_names) != num_joints:
        raise ShapeMismatch(
            f"[!] {len(topology.joint_names)} joint names for {num_joints} joints."
        )
    for k in topology.limb_joints:
        if not 1 <= k <= num_joints:
            raise IndexOutOfRange(f"[!] Limb joint {k} outside 1..{num_joints}.")
        if topology.parent[k - 1] == ORIGIN:
            raise IndexOutOfRange(f"[!] Limb joint {k} is the root and has no parent bone.")
        if topology.parent[topology.parent[k - 1] - 1] == ORIGIN:
            raise IndexOutOfRange(
                f"[!] Limb joint {k} hangs from the root; its bend needs a parent bone between two real joints."
            )
    return True


def path_between(topology: SkeletonTopology, u: int, v: int) -> TreePath:
    """
    Unique tree path whose signed bones compose to J_u - J_v.

    Both endpoints climb to their lowest common ancestor (the origin counts as
    an ancestor of every joint) after equalizing depths.

    Parameters
    ----------
    topology : SkeletonTopology
        A valid skeleton.
    u, v : int
        Joint indices in 0..K, u != v.

    Returns
    -------
    TreePath
        Ascent from v (sign +1) followed by descent to u (sign -1).
    """
    topology._check_index(u)
    topology._check_index(v)
    if u == v:
        raise IndexOutOfRange(f"[!] Path endpoints must differ, got ({u}, {v}).")

    a, b = u, v
    depth_a, depth_b = topology.depth(a), topology.depth(b)
    descent_to_u, ascent_from_v = [], []

    while depth_a > depth_b:
        descent_to_u.append(a)
        a = topology.parent[a - 1]
        depth_a -= 1
    while depth_b > depth_a:
        ascent_from_v.append(b)
        b = topology.parent[b - 1]
        depth_b -= 1
    while a != b:
        descent_to_u.append(a)
        ascent_from_v.append(b)
        a = topology.parent[a - 1]
        b = topology.parent[b - 1]

    steps = [PathStep(bone, +1) for bone in ascent_from_v]
    steps += [PathStep(bone, -1) for bone in reversed(descent_to_u)]
    return TreePath(endpoints=(u, v), steps=tuple(steps))
