"""Raster types, smoothing, gradients and semi-dense region extraction.

Images are stored as row-major float64 arrays of shape (height, width).
All filters use clamp-to-edge borders so the image rim never produces
spurious gradient responses.  Derivative kernels are normalized so a unit
intensity ramp yields a unit gradient, keeping the extraction threshold
meaningful across kernel variants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

DEFAULT_GAUSSIAN_SIGMA = 1.0
DEFAULT_GRADIENT_THRESHOLD = 0.06

EXTRACTOR_VARIANTS = ("sobel", "smoothed_sobel", "gradient5", "smoothed_gradient5")

# Separable kernel factors.  Derivative factors are scaled so that
# correlating a ramp I(u) = a*u yields exactly a.
_SMOOTH3 = np.array([1.0, 2.0, 1.0]) / 4.0
_DERIV3 = np.array([-1.0, 0.0, 1.0]) / 2.0
_SMOOTH5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
_DERIV5 = np.array([-1.0, -2.0, 0.0, 2.0, 1.0]) / 8.0


def gaussian_kernel5(sigma: float = DEFAULT_GAUSSIAN_SIGMA) -> np.ndarray:
    """Normalized 5-tap Gaussian sampled at integer offsets."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    x = np.arange(-2.0, 3.0)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def sobel3_kernels() -> tuple[np.ndarray, np.ndarray]:
    """Explicit 2D (kx, ky) correlation kernels of the 3x3 variant."""
    kx = np.outer(_SMOOTH3, _DERIV3)
    return kx, kx.T


def kernel5_kernels() -> tuple[np.ndarray, np.ndarray]:
    """Explicit 2D (kx, ky) correlation kernels of the 5x5 variant."""
    kx = np.outer(_SMOOTH5, _DERIV5)
    return kx, kx.T


@dataclass(eq=False)
class GrayImage:
    """Intensity raster in [0, 1]."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float64)
        if self.data.shape != (self.height, self.width):
            raise ValueError("data shape must be (height, width)")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("intensities must be finite")
        if self.data.min() < 0.0 or self.data.max() > 1.0:
            raise ValueError("intensities must lie in [0, 1]")

    @staticmethod
    def from_array(arr: np.ndarray) -> "GrayImage":
        arr = np.asarray(arr)
        return GrayImage(width=arr.shape[1], height=arr.shape[0], data=arr)


@dataclass(eq=False)
class DepthImage:
    """Depth raster in meters; 0 encodes "no measurement"."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float64)
        if self.data.shape != (self.height, self.width):
            raise ValueError("data shape must be (height, width)")
        if not np.all(np.isfinite(self.data)) or self.data.min() < 0.0:
            raise ValueError("depths must be finite and non-negative")

    @staticmethod
    def from_array(arr: np.ndarray) -> "DepthImage":
        arr = np.asarray(arr)
        return DepthImage(width=arr.shape[1], height=arr.shape[0], data=arr)


@dataclass(eq=False)
class GradientImage:
    """Per-pixel image gradient with its Euclidean norm."""

    width: int
    height: int
    gx: np.ndarray
    gy: np.ndarray
    norm: np.ndarray

    def __post_init__(self):
        shape = (self.height, self.width)
        for arr in (self.gx, self.gy, self.norm):
            if arr.shape != shape:
                raise ValueError("gradient channels must match (height, width)")


@dataclass(eq=False)
class SemiDenseRegion:
    """Pixels whose gradient norm exceeds the threshold, in row-major order.

    ``pixels`` is (N, 2) int ``(u, v)``; ``grad_dirs`` is (N, 2) float unit
    vectors pointing along the local image gradient.
    """

    pixels: np.ndarray
    grad_dirs: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.int32)
        self.grad_dirs = np.ascontiguousarray(self.grad_dirs, dtype=np.float64)
        if self.pixels.ndim != 2 or self.pixels.shape[1] != 2:
            raise ValueError("pixels must be (N, 2)")
        if self.grad_dirs.shape != self.pixels.shape:
            raise ValueError("grad_dirs must match pixels")

    def __len__(self) -> int:
        return self.pixels.shape[0]


def rgb_to_gray(rgb: np.ndarray) -> np.ndarray:
    """BT.601 luma of an (H, W, 3) array already scaled to [0, 1]."""
    return rgb[..., 0] * 0.299 + rgb[..., 1] * 0.587 + rgb[..., 2] * 0.114


def gaussian_smooth(img: GrayImage, sigma: float = DEFAULT_GAUSSIAN_SIGMA) -> GrayImage:
    """Separable 5x5 Gaussian smoothing with clamp-to-edge borders."""
    if img.width < 5 or img.height < 5:
        raise ValueError("image must be at least 5x5 for the smoothing kernel")
    k = gaussian_kernel5(sigma)
    out = ndimage.correlate1d(img.data, k, axis=0, mode="nearest")
    out = ndimage.correlate1d(out, k, axis=1, mode="nearest")
    # Clamp-to-edge keeps a [0,1] input inside [0,1] up to rounding.
    np.clip(out, 0.0, 1.0, out=out)
    return GrayImage(img.width, img.height, out)


def _gradient(img: GrayImage, smooth: np.ndarray, deriv: np.ndarray, min_size: int) -> GradientImage:
    if img.width < min_size or img.height < min_size:
        raise ValueError(f"image must be at least {min_size}x{min_size}")
    tmp = ndimage.correlate1d(img.data, smooth, axis=0, mode="nearest")
    gx = ndimage.correlate1d(tmp, deriv, axis=1, mode="nearest")
    tmp = ndimage.correlate1d(img.data, smooth, axis=1, mode="nearest")
    gy = ndimage.correlate1d(tmp, deriv, axis=0, mode="nearest")
    return GradientImage(img.width, img.height, gx, gy, np.hypot(gx, gy))


def gradient_sobel3(img: GrayImage) -> GradientImage:
    """3x3 Sobel gradient (ramp-normalized, clamp-to-edge)."""
    return _gradient(img, _SMOOTH3, _DERIV3, 3)


def gradient_kernel5(img: GrayImage) -> GradientImage:
    """5x5 Sobel-Feldman style gradient (ramp-normalized, clamp-to-edge)."""
    return _gradient(img, _SMOOTH5, _DERIV5, 5)


def extract_semidense(
    grad: GradientImage, threshold: float = DEFAULT_GRADIENT_THRESHOLD
) -> SemiDenseRegion:
    """All pixels with gradient norm above ``threshold``, scanned row-major."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    v, u = np.nonzero(grad.norm > threshold)
    pixels = np.stack([u, v], axis=1).astype(np.int32)
    n = grad.norm[v, u]
    dirs = np.stack([grad.gx[v, u] / n, grad.gy[v, u] / n], axis=1)
    return SemiDenseRegion(pixels, dirs, grad.width, grad.height)


def extractor_pipeline(
    img: GrayImage,
    variant: str,
    threshold: float = DEFAULT_GRADIENT_THRESHOLD,
    sigma: float = DEFAULT_GAUSSIAN_SIGMA,
) -> SemiDenseRegion:
    """Run one of the four extraction variants on an intensity image."""
    if variant not in EXTRACTOR_VARIANTS:
        raise ValueError(f"unknown extractor variant {variant!r}")
    if variant.startswith("smoothed_"):
        img = gaussian_smooth(img, sigma)
    if variant.endswith("sobel"):
        grad = gradient_sobel3(img)
    else:
        grad = gradient_kernel5(img)
    return extract_semidense(grad, threshold)
