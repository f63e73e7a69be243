import logging

import numpy as np

from posekit.exceptions import InvalidConfig, ShapeMismatch

logger = logging.getLogger(__name__)

EIGEN_FLOOR = 1e-6


class ToyRegressor:
    """
    Linear map from whitened features to K x C normalized outputs.

    The whitening layer is fitted once on the training features and then kept
    fixed, like the normalization layers around the loss; only `weight` and
    `bias` are trained.

    Parameters
    ----------
    num_features : int
        Feature dimension F.
    num_joints : int
        K; the output has K * dims entries.
    dims : int
        Coordinates per output row (3, or 2 for 2D-only training).
    seed : int
        Seeds the weight initialization.
    init_scale : float
        Std of the initial weights; the bias starts at zero.
    """

    def __init__(self, num_features: int, num_joints: int, dims: int = 3, seed: int = 0, init_scale: float = 0.01):
        if num_features < 1 or num_joints < 1 or dims not in (2, 3):
            raise InvalidConfig(
                f"[!] Invalid regressor shape: F={num_features}, K={num_joints}, dims={dims}."
            )
        self.num_features = num_features
        self.num_joints = num_joints
        self.dims = dims
        rng = np.random.default_rng(seed)
        self.weight = init_scale * rng.normal(size=(num_features, num_joints * dims))
        self.bias = np.zeros(num_joints * dims, dtype=np.float64)
        self.feature_mean = np.zeros(num_features, dtype=np.float64)
        self.whitening = np.eye(num_features, dtype=np.float64)

    def fit_whitening(self, features: np.ndarray) -> "ToyRegressor":
        """PCA whitening of the training features; tiny eigenvalues are floored."""
        features = self._check_features(features)
        self.feature_mean = features.mean(axis=0)
        centered = features - self.feature_mean
        covariance = centered.T @ centered / len(features)
        eigenvalues, eigenvectors = np.linalg.eigh(covariance)
        floor = EIGEN_FLOOR * max(float(eigenvalues.max()), EIGEN_FLOOR)
        self.whitening = eigenvectors / np.sqrt(np.maximum(eigenvalues, floor))
        return self

    def _check_features(self, features) -> np.ndarray:
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] != self.num_features:
            raise ShapeMismatch(f"[!] Expected (N, {self.num_features}) features, got {features.shape}.")
        return features

    def whiten(self, features) -> np.ndarray:
        return (self._check_features(features) - self.feature_mean) @ self.whitening

    def forward_whitened(self, whitened: np.ndarray) -> np.ndarray:
        return (whitened @ self.weight + self.bias).reshape(len(whitened), self.num_joints, self.dims)

    def predict(self, features) -> np.ndarray:
        """Normalized outputs, shape (N, K, dims)."""
        return self.forward_whitened(self.whiten(features))

    def gradients(self, whitened: np.ndarray, grad_outputs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Parameter gradients for upstream dL/d(outputs) of shape (N, K, dims)."""
        flat = grad_outputs.reshape(len(whitened), -1)
        return whitened.T @ flat, flat.sum(axis=0)

    def parameters(self) -> tuple[np.ndarray, np.ndarray]:
        return self.weight, self.bias

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.weight)) and np.all(np.isfinite(self.bias)))

    def to_dict(self) -> dict:
        return {
            "num_features": self.num_features,
            "num_joints": self.num_joints,
            "dims": self.dims,
            "feature_mean": self.feature_mean,
            "whitening": self.whitening,
            "weight": self.weight,
            "bias": self.bias,
        }
