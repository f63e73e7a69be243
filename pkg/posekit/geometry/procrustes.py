from dataclasses import dataclass

import numpy as np
from scipy.linalg import svd

from posekit.exceptions import DegenerateConfiguration, ShapeMismatch

# Relative size of the second singular value below which a point set counts as collinear.
COLLINEAR_TOL = 1e-9


@dataclass(frozen=True)
class SimilarityTransform:
    """x -> scale * rotation @ x + translation"""

    rotation: np.ndarray
    translation: np.ndarray
    scale: float = 1.0

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        return self.scale * points @ self.rotation.T + self.translation


def procrustes_align(source: np.ndarray, target: np.ndarray, scale: bool = True) -> tuple[np.ndarray, SimilarityTransform]:
    """
    Align `source` onto `target` by orthogonal Procrustes analysis.

    The rotation is forced proper (det = +1): body poses are chiral, so a
    reflection is never an admissible alignment.

    Parameters
    ----------
    source : numpy.ndarray, shape (K, 3)
        Points to move (the prediction).
    target : numpy.ndarray, shape (K, 3)
        Reference points (the ground truth).
    scale : bool, default=True
        Fit a uniform scale as well (similarity transform). When False the
        transform is rigid.

    Returns
    -------
    aligned : numpy.ndarray, shape (K, 3)
    transform : SimilarityTransform

    Raises
    ------
    DegenerateConfiguration
        Fewer than 3 points, or the target points are collinear.
    """
    source = np.asarray(source, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if source.shape != target.shape or source.ndim != 2 or source.shape[1] != 3:
        raise ShapeMismatch(
            f"[!] Procrustes needs two (K, 3) point sets, got {source.shape} and {target.shape}."
        )
    if source.shape[0] < 3:
        raise DegenerateConfiguration(f"[!] Procrustes needs at least 3 points, got {source.shape[0]}.")

    mu_source = source.mean(axis=0)
    mu_target = target.mean(axis=0)
    centered_source = source - mu_source
    centered_target = target - mu_target

    target_spread = svd(centered_target, compute_uv=False)
    if target_spread[0] == 0.0 or target_spread[1] <= COLLINEAR_TOL * target_spread[0]:
        raise DegenerateConfiguration("[!] Ground-truth points are collinear; the alignment is not unique.")

    # Cross-covariance, then the nearest proper rotation.
    cross = centered_source.T @ centered_target
    u, singular, vt = svd(cross)
    reflection = np.sign(np.linalg.det(vt.T @ u.T))
    correction = np.diag([1.0, 1.0, reflection if reflection != 0 else 1.0])
    rotation = vt.T @ correction @ u.T

    factor = 1.0
    if scale:
        source_energy = float(np.sum(centered_source ** 2))
        if source_energy == 0.0:
            raise DegenerateConfiguration("[!] Predicted points coincide; no scale can be fitted.")
        factor = float(np.sum(singular * np.diag(correction))) / source_energy

    translation = mu_target - factor * rotation @ mu_source
    transform = SimilarityTransform(rotation=rotation, translation=translation, scale=factor)
    return transform.apply(source), transform
