import logging
from dataclasses import dataclass

import numpy as np

from posekit.exceptions import KinkProximity, ShapeMismatch

logger = logging.getLogger(__name__)

KINK_MARGIN = 1e-3


@dataclass(frozen=True, eq=False)
class GradientCheck:
    """Analytic vs central-difference gradient, per coordinate of the point."""

    analytic: np.ndarray
    numeric: np.ndarray
    relative_error: np.ndarray
    epsilon: float

    @property
    def max_relative_error(self) -> float:
        return float(self.relative_error.max())


def _evaluate(loss_fn, point: np.ndarray):
    result = loss_fn(point)
    if isinstance(result, tuple):
        value, grad = result
        return float(value), np.asarray(grad, dtype=np.float64), None
    return float(result.value), np.asarray(result.grad, dtype=np.float64), getattr(result, "residuals", None)


def finite_difference_check(
    loss_fn,
    point,
    epsilon: float = 1e-5,
    kink_margin: float = KINK_MARGIN,
) -> GradientCheck:
    """
    Compare an analytic gradient with central finite differences.

    Parameters
    ----------
    loss_fn : callable
        Maps a point to a LossResult, or to a (value, grad) tuple.
    point : array_like
        Where to evaluate; perturbed one coordinate at a time by +/- epsilon.
    epsilon : float
        Step of the central difference.
    kink_margin : float
        Residuals reported by the loss must be at least this far from 0.

    Returns
    -------
    GradientCheck
        Relative error |a - n| / max(1, |a|, |n|) per coordinate.

    Raises
    ------
    KinkProximity
        A residual at `point` lies within `kink_margin` of an L1 kink.
    """
    point = np.array(point, dtype=np.float64)
    _, analytic, residuals = _evaluate(loss_fn, point)
    if analytic.shape != point.shape:
        raise ShapeMismatch(f"[!] Gradient shape {analytic.shape} differs from point shape {point.shape}.")
    if residuals is not None and residuals.size and np.min(np.abs(residuals)) < kink_margin:
        raise KinkProximity(
            f"[!] Smallest residual {np.min(np.abs(residuals)):.3g} is within {kink_margin} of a kink; resample the point."
        )

    numeric = np.zeros_like(point)
    shifted = point.copy()
    for i in range(point.size):
        shifted.flat[i] = point.flat[i] + epsilon
        upper, _, _ = _evaluate(loss_fn, shifted)
        shifted.flat[i] = point.flat[i] - epsilon
        lower, _, _ = _evaluate(loss_fn, shifted)
        shifted.flat[i] = point.flat[i]
        numeric.flat[i] = (upper - lower) / (2.0 * epsilon)

    scale = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
    relative_error = np.abs(analytic - numeric) / scale
    logger.debug("Gradient check over %d coordinates: max relative error %.3g.", point.size, relative_error.max())
    return GradientCheck(analytic=analytic, numeric=numeric, relative_error=relative_error, epsilon=epsilon)
