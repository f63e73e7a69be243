from dataclasses import dataclass

import numpy as np

from posekit.exceptions import InvalidIntrinsics, NonPositiveDepth, ShapeMismatch


@dataclass(frozen=True)
class PinholeCamera:
    """
    Pinhole intrinsics without distortion.

    Parameters
    ----------
    fx, fy : float
        Focal lengths in pixels, strictly positive.
    cx, cy : float
        Principal point in pixels, measured from the top-left image corner.
    """

    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        values = (self.fx, self.fy, self.cx, self.cy)
        if not all(np.isfinite(v) for v in values):
            raise InvalidIntrinsics(f"[!] Camera intrinsics must be finite, got {values}.")
        if self.fx <= 0 or self.fy <= 0:
            raise InvalidIntrinsics(f"[!] Focal lengths must be positive, got fx={self.fx}, fy={self.fy}.")

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]],
            dtype=np.float64,
        )

    def project(self, points: np.ndarray) -> np.ndarray:
        return project(points, self)

    def backproject(self, pixels: np.ndarray, depth) -> np.ndarray:
        return backproject(pixels, depth, self)

    def to_dict(self) -> dict:
        return {"fx": self.fx, "fy": self.fy, "cx": self.cx, "cy": self.cy}

    @classmethod
    def from_dict(cls, data: dict) -> "PinholeCamera":
        try:
            return cls(float(data["fx"]), float(data["fy"]), float(data["cx"]), float(data["cy"]))
        except KeyError as missing:
            raise InvalidIntrinsics(f"[!] Camera is missing intrinsic {missing}.") from None


def project(points: np.ndarray, camera: PinholeCamera) -> np.ndarray:
    """
    Perspective projection of camera-space points (mm) to pixels.

    Returns an array shaped like `points[..., :2]`.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.shape[-1] != 3:
        raise ShapeMismatch(f"[!] Expected camera-space points with 3 coordinates, got shape {points.shape}.")
    depth = points[..., 2]
    if np.any(depth <= 0):
        raise NonPositiveDepth("[!] Cannot project points at or behind the camera plane.")
    u = points[..., 0] * camera.fx / depth + camera.cx
    v = points[..., 1] * camera.fy / depth + camera.cy
    return np.stack([u, v], axis=-1)


def backproject(pixels: np.ndarray, depth, camera: PinholeCamera) -> np.ndarray:
    """
    Recover camera-space coordinates from pixel coordinates and metric depth.

    x = (u - cx) * z / fx,  y = (v - cy) * z / fy,  z = z

    Parameters
    ----------
    pixels : array_like, shape (..., 2)
        Pixel coordinates.
    depth : float or array_like, shape (...)
        Camera-space depth in mm, strictly positive.
    camera : PinholeCamera
        Intrinsics of the image the pixels come from.

    Returns
    -------
    numpy.ndarray, shape (..., 3)
    """
    pixels = np.asarray(pixels, dtype=np.float64)
    if pixels.shape[-1] != 2:
        raise ShapeMismatch(f"[!] Expected pixel coordinates with 2 entries, got shape {pixels.shape}.")
    depth = np.broadcast_to(np.asarray(depth, dtype=np.float64), pixels.shape[:-1])
    if np.any(~np.isfinite(depth)) or np.any(depth <= 0):
        raise NonPositiveDepth("[!] Back-projection needs finite, strictly positive depth.")
    x = (pixels[..., 0] - camera.cx) * depth / camera.fx
    y = (pixels[..., 1] - camera.cy) * depth / camera.fy
    return np.stack([x, y, depth], axis=-1)
