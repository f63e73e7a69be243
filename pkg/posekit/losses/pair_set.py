import logging
from dataclasses import dataclass

import numpy as np

from posekit.exceptions import InvalidPairSet
from posekit.representation.normalization import pair_deltas_array
from posekit.skeleton.skeleton import ORIGIN, SkeletonTopology, TreePath, path_between

logger = logging.getLogger(__name__)

KINDS = ("joint", "bone", "both", "all", "custom")


@dataclass(frozen=True, eq=False)
class PairSet:
    """
    Joint pairs whose relative positions enter the compositional loss.

    Pairs are kept in sorted order and every pair carries its precomputed tree
    path, so evaluation never depends on the order the pairs were supplied in.

    Attributes
    ----------
    pairs : tuple of (int, int)
        (u, v) with u != v in 0..K; the term is J_u - J_v.
    paths : tuple of TreePath
        `paths[i]` composes `pairs[i]`.
    kind : str
        "joint", "bone", "both", "all" or "custom".
    composition : numpy.ndarray, shape (|P|, K)
        Step signs: composition[i, k - 1] is +1/-1 when bone k is on path i.
    """

    pairs: tuple[tuple[int, int], ...]
    paths: tuple[TreePath, ...]
    kind: str
    num_joints: int
    composition: np.ndarray

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(zip(self.pairs, self.paths))

    def index_of(self, pair: tuple[int, int]) -> int:
        try:
            return self.pairs.index(tuple(pair))
        except ValueError:
            raise InvalidPairSet(f"[!] Pair {tuple(pair)} is not in the '{self.kind}' pair set.") from None

    def compose(self, bones: np.ndarray) -> np.ndarray:
        """Signed path sums of native-unit bones: (..., K, d) -> (..., |P|, d)."""
        return np.einsum("pk,...kc->...pc", self.composition, bones)

    def deltas_from_joints(self, joints: np.ndarray) -> np.ndarray:
        """Ground-truth J_u - J_v for every pair: (..., K, d) -> (..., |P|, d)."""
        return pair_deltas_array(joints, self.pairs)

    def labels(self) -> list[str]:
        return [f"{u},{v}" for u, v in self.pairs]


class PairSetBuilder:
    def __init__(
        self,
        topology: SkeletonTopology,
        kind: str,
        pairs=None,
        debug: bool = False,
    ):
        """
        Configure a pair set over a skeleton.

        Parameters
        ----------
        topology : SkeletonTopology
            A valid skeleton; it is validated here.
        kind : str
            "joint" (every joint against the origin), "bone" (every joint
            against its parent), "both" (their union), "all" (every pair of
            real joints, u < v) or "custom".
        pairs : sequence of (int, int), optional
            Explicit pairs, required for and only accepted with kind="custom".
        debug : bool
            If True, log a summary of the built pair set.
        """
        self.topology = topology.validate()
        self.kind = kind
        self.custom_pairs = None if pairs is None else [tuple(int(x) for x in p) for p in pairs]
        self.debug = debug

        if self.kind not in KINDS:
            raise InvalidPairSet(f"[!] Unknown pair set kind '{self.kind}', expected one of {KINDS}.")
        if (self.kind == "custom") != (self.custom_pairs is not None):
            raise InvalidPairSet("[!] Explicit pairs are given exactly when kind='custom'.")

    def _joint_pairs(self) -> list[tuple[int, int]]:
        return [(k, ORIGIN) for k in self.topology.joints]

    def _bone_pairs(self) -> list[tuple[int, int]]:
        return [(k, self.topology.parent_of(k)) for k in self.topology.joints]

    def _all_pairs(self) -> list[tuple[int, int]]:
        joints = self.topology.joints
        return [(u, v) for u in joints for v in joints if u < v]

    def _select_pairs(self) -> list[tuple[int, int]]:
        if self.kind == "joint":
            return self._joint_pairs()
        if self.kind == "bone":
            return self._bone_pairs()
        if self.kind == "both":
            # The root's bone pair (root, 0) is also its joint pair.
            return list(dict.fromkeys(self._joint_pairs() + self._bone_pairs()))
        if self.kind == "all":
            return self._all_pairs()
        return self.custom_pairs

    def _check_pairs(self, pairs: list[tuple[int, int]]):
        if not pairs:
            raise InvalidPairSet("[!] A pair set needs at least one pair.")
        seen = set()
        for pair in pairs:
            if len(pair) != 2:
                raise InvalidPairSet(f"[!] Pair {pair} must have exactly two joint indices.")
            u, v = pair
            for k in pair:
                if not 0 <= k <= self.topology.num_joints:
                    raise InvalidPairSet(f"[!] Pair {pair} has index {k} outside 0..{self.topology.num_joints}.")
            if u == v:
                raise InvalidPairSet(f"[!] Pair {pair} joins a joint to itself.")
            if (u, v) in seen or (v, u) in seen:
                raise InvalidPairSet(f"[!] Pair {pair} appears more than once (in either orientation).")
            seen.add((u, v))

    def _composition_matrix(self, paths: list[TreePath]) -> np.ndarray:
        matrix = np.zeros((len(paths), self.topology.num_joints), dtype=np.float64)
        for row, path in enumerate(paths):
            for step in path.steps:
                matrix[row, step.bone - 1] = step.sign
        matrix.setflags(write=False)
        return matrix

    def _debug_display(self, pair_set: PairSet):
        if self.debug:
            lengths = [len(path) for path in pair_set.paths]
            logger.info(
                "PairSet '%s': %d pairs over %d joints, path length %d..%d.",
                pair_set.kind, len(pair_set), pair_set.num_joints, min(lengths), max(lengths),
            )

    def build(self) -> PairSet:
        """
        Assemble the pair set.

        1. Select the pairs for the configured kind.
        2. Check them (range, self-pairs, duplicates in either orientation).
        3. Sort them and precompute every tree path.
        4. Fold the paths into the composition matrix.

        Returns
        -------
        PairSet
        """
        pairs = self._select_pairs()
        self._check_pairs(pairs)
        pairs = sorted(pairs)
        paths = [path_between(self.topology, u, v) for u, v in pairs]
        pair_set = PairSet(
            pairs=tuple(pairs),
            paths=tuple(paths),
            kind=self.kind,
            num_joints=self.topology.num_joints,
            composition=self._composition_matrix(paths),
        )
        self._debug_display(pair_set)
        return pair_set


def build_pair_set(kind: str, topology: SkeletonTopology, pairs=None) -> PairSet:
    """
    Build one of the standard pair sets (or a custom one) for a skeleton.

    Parameters
    ----------
    kind : str
        "joint", "bone", "both", "all" or "custom".
    topology : SkeletonTopology
        Skeleton the pairs index into.
    pairs : sequence of (int, int), optional
        Explicit pairs for kind="custom".

    Returns
    -------
    PairSet
        |P| is K for "joint" and "bone", 2K - 1 for "both" and K(K - 1)/2 for "all".
    """
    return PairSetBuilder(topology=topology, kind=kind, pairs=pairs).build()
