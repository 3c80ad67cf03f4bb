"""Raster containers, the 2D DFT pair, interpolation, and seeded noise.

Conventions used throughout the package:

* images are stored row-major as (height, width) float64 arrays, pixel
  (row, col) = (y, x), with the row axis pointing down;
* the forward DFT is unnormalized, ``F[k, l] = sum_{n,m} x[n, m]
  exp(-i 2 pi (k n / H + l m / W))``, and the inverse carries the full
  ``1 / (H W)`` factor, so ``idft2(dft2(x)) == x``;
* random streams come from splitmix64 (64-bit state) mapped through a
  Box-Muller transform, so a seed pins the stream bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "GridImage",
    "ComplexGrid",
    "Seed",
    "dft2",
    "idft2",
    "bilinear_sample",
    "zero_pad",
    "crop",
    "gaussian_noise",
    "normal_stream",
    "uniform_stream",
]


def _require_finite(arr: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite samples")


@dataclass(frozen=True)
class GridImage:
    """A real-valued raster with square pixels of size ``pitch``."""

    data: np.ndarray
    pitch: float = 1.0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.size == 0:
            raise ValidationError("GridImage.data must be a non-empty 2D array")
        _require_finite(data, "GridImage.data")
        if not (self.pitch > 0 and np.isfinite(self.pitch)):
            raise ValidationError("GridImage.pitch must be positive and finite")
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class ComplexGrid:
    """A complex-valued raster, same layout as GridImage."""

    data: np.ndarray
    pitch: float = 1.0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.complex128)
        if data.ndim != 2 or data.size == 0:
            raise ValidationError("ComplexGrid.data must be a non-empty 2D array")
        _require_finite(data, "ComplexGrid.data")
        if not (self.pitch > 0 and np.isfinite(self.pitch)):
            raise ValidationError("ComplexGrid.pitch must be positive and finite")
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class Seed:
    """A 64-bit seed; equal seeds give bit-identical random streams."""

    value: int

    def __post_init__(self):
        if not isinstance(self.value, int) or not 0 <= self.value < 2**64:
            raise ValidationError("Seed.value must be an integer in [0, 2**64)")


def _seed_value(seed) -> int:
    if isinstance(seed, Seed):
        return seed.value
    if isinstance(seed, (int, np.integer)):
        value = int(seed)
        if 0 <= value < 2**64:
            return value
    raise ValidationError("seed must be a Seed or an integer in [0, 2**64)")


def as_array(img) -> np.ndarray:
    """Accept a GridImage, ComplexGrid, or bare ndarray and return the array."""
    if isinstance(img, (GridImage, ComplexGrid)):
        return img.data
    return np.asarray(img)


# ---------------------------------------------------------------------------
# DFT pair
# ---------------------------------------------------------------------------


def dft2(img) -> ComplexGrid:
    """Unnormalized forward 2D DFT.

    ``F[k, l] = sum_{n, m} x[n, m] exp(-i 2 pi (k n / H + l m / W))``.
    """
    data = as_array(img)
    if data.ndim != 2:
        raise ValidationError("dft2 expects a 2D grid")
    _require_finite(data, "dft2 input")
    return ComplexGrid(np.fft.fft2(data))


def idft2(spec) -> ComplexGrid:
    """Inverse 2D DFT carrying the full 1/(H*W) normalization."""
    data = as_array(spec)
    if data.ndim != 2:
        raise ValidationError("idft2 expects a 2D grid")
    _require_finite(data, "idft2 input")
    return ComplexGrid(np.fft.ifft2(data))


# ---------------------------------------------------------------------------
# Interpolation
# ---------------------------------------------------------------------------


def bilinear_values(data: np.ndarray, xs, ys) -> np.ndarray:
    """Vectorized bilinear lookup with a zero boundary.

    ``xs`` indexes columns and ``ys`` rows; queries outside
    [0, W-1] x [0, H-1] return 0.
    """
    h, w = data.shape
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    inside = (xs >= 0.0) & (xs <= w - 1.0) & (ys >= 0.0) & (ys <= h - 1.0)
    xc = np.clip(xs, 0.0, w - 1.0)
    yc = np.clip(ys, 0.0, h - 1.0)
    x0 = np.clip(np.floor(xc).astype(np.int64), 0, max(w - 2, 0))
    y0 = np.clip(np.floor(yc).astype(np.int64), 0, max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xc - x0
    fy = yc - y0
    top = (1.0 - fx) * data[y0, x0] + fx * data[y0, x1]
    bot = (1.0 - fx) * data[y1, x0] + fx * data[y1, x1]
    vals = (1.0 - fy) * top + fy * bot
    return np.where(inside, vals, 0.0)


def bilinear_sample(img, x, y):
    """Sample ``img`` at fractional coordinates (x=column, y=row).

    Exact pixel centers return the stored value; coordinates outside the
    pixel-center bounding box return 0.
    """
    data = as_array(img)
    if data.ndim != 2:
        raise ValidationError("bilinear_sample expects a 2D grid")
    vals = bilinear_values(data, x, y)
    if np.isscalar(x) and np.isscalar(y):
        return float(vals)
    return vals


# ---------------------------------------------------------------------------
# Padding and cropping
# ---------------------------------------------------------------------------


def zero_pad(img: GridImage, new_width: int, new_height: int) -> GridImage:
    """Embed the image at the top-left corner of a larger zero grid."""
    if new_width < img.width or new_height < img.height:
        raise ValidationError("zero_pad target must not be smaller than the image")
    out = np.zeros((new_height, new_width), dtype=np.float64)
    out[: img.height, : img.width] = img.data
    return GridImage(out, img.pitch)


def crop(img: GridImage, width: int, height: int, off_x: int = 0, off_y: int = 0) -> GridImage:
    """Take the (height, width) window whose top-left corner is (off_y, off_x)."""
    if width < 1 or height < 1:
        raise ValidationError("crop window must be at least 1x1")
    if off_x < 0 or off_y < 0 or off_x + width > img.width or off_y + height > img.height:
        raise ValidationError("crop window exceeds the image bounds")
    return GridImage(img.data[off_y : off_y + height, off_x : off_x + width].copy(), img.pitch)


# ---------------------------------------------------------------------------
# Seeded noise
# ---------------------------------------------------------------------------

# splitmix64 constants (Steele, Lea, Flood 2014); the generator state is the
# 64-bit counter seed + i * GAMMA and each output is the mixed state.
_SM64_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM64_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_SM64_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(seed: int, count: int) -> np.ndarray:
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed) + idx * _SM64_GAMMA
    z ^= z >> np.uint64(30)
    z *= _SM64_MIX1
    z ^= z >> np.uint64(27)
    z *= _SM64_MIX2
    z ^= z >> np.uint64(31)
    return z


def uniform_stream(count: int, seed) -> np.ndarray:
    """Deterministic uniforms on the open interval (0, 1)."""
    if count < 0:
        raise ValidationError("uniform_stream count must be nonnegative")
    bits = _splitmix64(_seed_value(seed), count)
    # top 53 bits, offset by half an ulp so 0 and 1 are never produced
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normal_stream(count: int, sigma: float, seed) -> np.ndarray:
    """Deterministic N(0, sigma^2) samples via the Box-Muller transform.

    The stream layout is fixed: for k = ceil(count/2) pairs, uniforms
    u1 = stream[:k] and u2 = stream[k:2k] give the cosine branch followed by
    the sine branch, truncated to ``count`` samples.
    """
    if count < 0:
        raise ValidationError("normal_stream count must be nonnegative")
    if not (sigma >= 0 and np.isfinite(sigma)):
        raise ValidationError("normal_stream sigma must be finite and >= 0")
    if count == 0:
        return np.zeros(0)
    if sigma == 0.0:
        return np.zeros(count)
    k = (count + 1) // 2
    u = uniform_stream(2 * k, seed)
    radius = np.sqrt(-2.0 * np.log(u[:k]))
    angle = 2.0 * np.pi * u[k:]
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return sigma * z[:count]


def gaussian_noise(shape: tuple[int, int], sigma: float, seed) -> GridImage:
    """A (height, width) raster of i.i.d. N(0, sigma^2) samples."""
    if len(shape) != 2 or shape[0] < 1 or shape[1] < 1:
        raise ValidationError("gaussian_noise shape must be (height, width)")
    h, w = int(shape[0]), int(shape[1])
    return GridImage(normal_stream(h * w, sigma, seed).reshape(h, w))
