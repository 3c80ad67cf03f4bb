"""Analytic phantoms, degradation pipelines, and benchmark metrics.

Phantoms are defined on the unit square [-1, 1]^2 with the +y axis along the
row axis (pointing down), matching the ray-transform convention, and are
rendered by point evaluation at pixel centers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .grids import GridImage, as_array, gaussian_noise, normal_stream, uniform_stream
from .operators import (
    LinearMap,
    Mask,
    RadonGeometry,
    Sinogram,
    embed_kernel,
    op_compose,
    op_convolve,
    op_mask,
    op_matrix,
    transform_dct8,
    transform_haar,
)

__all__ = [
    "Ellipse",
    "EllipsePhantom",
    "SHEPP_LOGAN",
    "shepp_logan",
    "point_eval",
    "analytic_sinogram",
    "airy_psf",
    "bessel_j1",
    "Degraded",
    "degrade",
    "gaussian_kernel",
    "snr_db",
    "mse",
    "Metric",
    "compressibility_study",
    "SparseInstance",
    "sparse_recovery_instance",
]


@dataclass(frozen=True)
class Ellipse:
    """One additive ellipse: center, semi-axes, rotation (radians), intensity."""

    cx: float
    cy: float
    a: float
    b: float
    phi: float
    rho: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValidationError("Ellipse semi-axes must be positive")
        for name in ("cx", "cy", "phi", "rho"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"Ellipse.{name} must be finite")


@dataclass(frozen=True)
class EllipsePhantom:
    """A sum of ellipses; overlapping intensities add."""

    ellipses: tuple

    def __post_init__(self):
        if len(self.ellipses) == 0:
            raise ValidationError("EllipsePhantom needs at least one ellipse")
        object.__setattr__(self, "ellipses", tuple(self.ellipses))


# The standard Shepp and Logan (1974) ten-ellipse head set, parameters as
# tabulated by Kak and Slaney: (cx, cy, a, b, rotation in degrees, intensity).
_SHEPP_LOGAN_TABLE = (
    (0.0, 0.0, 0.69, 0.92, 0.0, 2.0),
    (0.0, -0.0184, 0.6624, 0.874, 0.0, -0.98),
    (0.22, 0.0, 0.11, 0.31, -18.0, -0.02),
    (-0.22, 0.0, 0.16, 0.41, 18.0, -0.02),
    (0.0, 0.35, 0.21, 0.25, 0.0, 0.01),
    (0.0, 0.1, 0.046, 0.046, 0.0, 0.01),
    (0.0, -0.1, 0.046, 0.046, 0.0, 0.01),
    (-0.08, -0.605, 0.046, 0.023, 0.0, 0.01),
    (0.0, -0.605, 0.023, 0.023, 0.0, 0.01),
    (0.06, -0.605, 0.023, 0.046, 0.0, 0.01),
)

SHEPP_LOGAN = EllipsePhantom(
    tuple(
        Ellipse(cx, cy, a, b, np.deg2rad(deg), rho)
        for cx, cy, a, b, deg, rho in _SHEPP_LOGAN_TABLE
    )
)


def point_eval(phantom: EllipsePhantom, x, y):
    """Sum of ellipse intensities covering the point(s) (x, y) in unit coords."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    total = np.zeros(np.broadcast(x, y).shape, dtype=np.float64)
    for e in phantom.ellipses:
        dx = x - e.cx
        dy = y - e.cy
        cos_p, sin_p = np.cos(e.phi), np.sin(e.phi)
        u = (dx * cos_p + dy * sin_p) / e.a
        v = (-dx * sin_p + dy * cos_p) / e.b
        total += np.where(u * u + v * v <= 1.0, e.rho, 0.0)
    if total.ndim == 0:
        return float(total)
    return total


def render(phantom: EllipsePhantom, size: int) -> GridImage:
    """Evaluate the phantom at pixel centers of a size x size grid."""
    if size < 2:
        raise ValidationError("render needs size >= 2")
    coords = (np.arange(size) - (size - 1) / 2.0) * (2.0 / size)
    xs = coords[None, :]
    ys = coords[:, None]
    return GridImage(point_eval(phantom, xs, ys))


def shepp_logan(size: int) -> GridImage:
    """The standard head phantom rendered at the requested size."""
    if size < 32:
        raise ValidationError("shepp_logan needs size >= 32")
    return render(SHEPP_LOGAN, size)


def analytic_sinogram(
    phantom: EllipsePhantom, geometry: RadonGeometry, image_size: int
) -> Sinogram:
    """Exact line integrals of the phantom, in pixel units of an image_size grid.

    The chord of an ellipse along the line at angle t and offset s is
    2 a b sqrt(q - s'^2) / q with q = a^2 cos^2(t - phi) + b^2 sin^2(t - phi)
    and s' the offset measured from the ellipse center; intensities add.
    """
    if image_size < 2:
        raise ValidationError("analytic_sinogram needs image_size >= 2")
    scale = image_size / 2.0  # pixels per phantom unit
    angles = geometry.angles
    offs = (
        (np.arange(geometry.n_detectors) - (geometry.n_detectors - 1) / 2.0)
        * geometry.detector_pitch
        / scale
    )
    data = np.zeros((geometry.n_angles, geometry.n_detectors), dtype=np.float64)
    for i, theta in enumerate(angles):
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        row = np.zeros_like(offs)
        for e in phantom.ellipses:
            t_rel = theta - e.phi
            q = (e.a * np.cos(t_rel)) ** 2 + (e.b * np.sin(t_rel)) ** 2
            s_rel = offs - (e.cx * cos_t + e.cy * sin_t)
            under = q - s_rel**2
            chord = np.where(under > 0.0, 2.0 * e.a * e.b * np.sqrt(np.maximum(under, 0.0)) / q, 0.0)
            row += e.rho * chord
        data[i] = row * scale
    return Sinogram(data, angles, geometry.detector_pitch)


# ---------------------------------------------------------------------------
# Diffraction-limited point spread
# ---------------------------------------------------------------------------


def bessel_j1(x) -> np.ndarray:
    """Bessel function of the first kind, order one.

    Rational approximation below |x| = 8 and the asymptotic cosine form
    above it (Abramowitz and Stegun 9.4.4 / 9.4.6 coefficients); absolute
    error stays below 1e-7.
    """
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    small = ax < 8.0

    y = x * x
    num = x * (
        72362614232.0
        + y
        * (
            -7895059235.0
            + y * (242396853.1 + y * (-2972611.439 + y * (15704.48260 + y * (-30.16036606))))
        )
    )
    den = 144725228442.0 + y * (
        2300535178.0 + y * (18583304.74 + y * (99447.43394 + y * (376.9991397 + y)))
    )
    small_val = num / den

    axs = np.where(small, 8.0, ax)  # avoid dividing by tiny ax in the unused branch
    z = 8.0 / axs
    y2 = z * z
    xx = axs - 2.356194491
    p1 = 1.0 + y2 * (
        0.183105e-2 + y2 * (-0.3516396496e-4 + y2 * (0.2457520174e-5 + y2 * (-0.240337019e-6)))
    )
    p2 = 0.04687499995 + y2 * (
        -0.2002690873e-3 + y2 * (0.8449199096e-5 + y2 * (-0.88228987e-6 + y2 * 0.105787412e-6))
    )
    large_val = np.sqrt(0.636619772 / axs) * (np.cos(xx) * p1 - z * np.sin(xx) * p2) * np.sign(x)

    out = np.where(small, small_val, large_val)
    if out.ndim == 0:
        return float(out)
    return out


def airy_psf(size: int, cutoff: float) -> GridImage:
    """Diffraction point-spread (2 J1(r) / r)^2 with a chosen spectral cutoff.

    ``cutoff`` is the radial frequency (cycles per pixel) where the kernel's
    spectrum reaches its first zero; the radial argument is scaled as
    r = pi * cutoff * distance.  The kernel is normalized to unit sum and its
    center sample carries the r -> 0 limit, 1, before normalization.
    """
    if size < 1:
        raise ValidationError("airy_psf needs size >= 1")
    if not (0.0 < cutoff <= 0.5):
        raise ValidationError("cutoff must lie in (0, 0.5] cycles per pixel")
    center = (size - 1) / 2.0
    coords = np.arange(size) - center
    rr = np.hypot(coords[None, :], coords[:, None])
    r = np.pi * cutoff * rr
    safe = np.where(r < 1e-12, 1.0, r)
    amp = np.where(r < 1e-12, 1.0, 2.0 * bessel_j1(safe) / safe)
    kernel = amp**2
    return GridImage(kernel / kernel.sum())


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    """Separable Gaussian blur kernel, normalized to unit sum."""
    if size < 1 or size % 2 == 0:
        raise ValidationError("gaussian_kernel size must be odd and >= 1")
    if not (sigma > 0 and np.isfinite(sigma)):
        raise ValidationError("gaussian_kernel sigma must be positive")
    coords = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-0.5 * (coords / sigma) ** 2)
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


# ---------------------------------------------------------------------------
# Degradation pipeline
# ---------------------------------------------------------------------------


@dataclass
class Degraded:
    """Measurements from blur + mask + noise, with the operator that made them."""

    measurements: np.ndarray
    op: LinearMap
    mask: Mask
    kernel: np.ndarray
    sigma: float
    seed: int
    clean: np.ndarray
    noise: np.ndarray
    measurement_snr_db: float


def degrade(img: GridImage, blur_kernel, mask: Mask, sigma: float, seed) -> Degraded:
    """Blur circularly, subsample through the mask, add seeded white noise.

    ``blur_kernel`` is a small centered kernel; it is embedded on the image
    grid with its center at the origin so the blur does not shift content.
    The returned operator is mask `o` convolve, ready for reconstruction.
    """
    if not (sigma >= 0 and np.isfinite(sigma)):
        raise ValidationError("degrade sigma must be finite and >= 0")
    if mask.shape != img.data.shape:
        raise ValidationError("mask shape must match the image")
    kernel = embed_kernel(as_array(blur_kernel), img.data.shape)
    op = op_compose(op_mask(mask), op_convolve(kernel, "circular"))
    clean = op.apply(img.data)
    noise_img = gaussian_noise(img.data.shape, sigma, seed)
    noise = noise_img.data.ravel()[mask.indices]
    measurements = clean + noise
    return Degraded(
        measurements=measurements,
        op=op,
        mask=mask,
        kernel=kernel,
        sigma=float(sigma),
        seed=int(seed if isinstance(seed, (int, np.integer)) else seed.value),
        clean=clean,
        noise=noise,
        measurement_snr_db=snr_db(clean, measurements),
    )


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Metric:
    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("snr_db", "mse"):
            raise ValidationError(f"unknown metric kind {self.kind!r}")


def snr_db(truth, estimate) -> float:
    """10 log10(||truth||^2 / ||truth - estimate||^2); +inf when exact."""
    t = as_array(truth)
    e = as_array(estimate)
    if t.shape != e.shape:
        raise ValidationError(f"snr_db shape mismatch: {t.shape} vs {e.shape}")
    err = float(np.vdot(t - e, t - e).real)
    sig = float(np.vdot(t, t).real)
    if err == 0.0:
        return np.inf
    return 10.0 * np.log10(sig / err)


def mse(truth, estimate) -> float:
    t = as_array(truth)
    e = as_array(estimate)
    if t.shape != e.shape:
        raise ValidationError(f"mse shape mismatch: {t.shape} vs {e.shape}")
    return float(np.mean(np.abs(t - e) ** 2))


# ---------------------------------------------------------------------------
# Transform-domain compressibility
# ---------------------------------------------------------------------------


def compressibility_study(
    img: GridImage, transform: str = "haar", keep_fractions=(0.01, 0.05, 0.1, 0.25), levels: int = 4
):
    """Keep the largest-magnitude fraction of coefficients, invert, and score.

    Returns [(fraction, snr_db)] rows.  Transforms: multilevel Haar, 8x8
    block DCT, or the plain DFT; coefficient ranking is deterministic (stable
    sort on magnitude).
    """
    fractions = [float(fr) for fr in keep_fractions]
    if not fractions:
        raise ValidationError("compressibility_study needs at least one fraction")
    for fr in fractions:
        if not 0.0 < fr <= 1.0:
            raise ValidationError("keep fractions must lie in (0, 1]")

    if transform == "haar":
        coeffs = transform_haar(img, levels).data
        invert = lambda c: transform_haar(GridImage(c), levels, inverse=True).data
    elif transform == "dct8":
        coeffs = transform_dct8(img).data
        invert = lambda c: transform_dct8(GridImage(c), inverse=True).data
    elif transform == "dft":
        coeffs = np.fft.fft2(img.data)
        invert = lambda c: np.fft.ifft2(c).real
    else:
        raise ValidationError(f"unknown transform {transform!r}")

    flat = coeffs.ravel()
    order = np.argsort(-np.abs(flat), kind="stable")
    rows = []
    for fr in fractions:
        k = max(1, int(round(fr * flat.size)))
        kept = np.zeros_like(flat)
        kept[order[:k]] = flat[order[:k]]
        recon = invert(kept.reshape(coeffs.shape))
        rows.append((fr, snr_db(img.data, recon)))
    return rows


# ---------------------------------------------------------------------------
# A small sparse-recovery benchmark instance
# ---------------------------------------------------------------------------


@dataclass
class SparseInstance:
    forward: LinearMap
    data: np.ndarray
    truth: np.ndarray
    lam: float


def sparse_recovery_instance(
    m: int = 8, n: int = 32, sparsity: int = 2, seed=8, lam_scale: float = 0.005
) -> SparseInstance:
    """A Gaussian sensing matrix with a sparse target and noiseless data.

    Deterministic given the seed; ``lam = lam_scale * ||H* g||_inf`` is small
    enough that the l1 solution recovers the support.
    """
    if not (0 < sparsity <= m < n):
        raise ValidationError("need sparsity <= m < n")
    h = normal_stream(m * n, 1.0, seed).reshape(m, n) / np.sqrt(m)
    order = np.argsort(uniform_stream(n, seed + 1), kind="stable")
    support = np.sort(order[:sparsity])
    truth = np.zeros(n)
    signs = np.where(uniform_stream(sparsity, seed + 2) < 0.5, -1.0, 1.0)
    truth[support] = signs * (1.0 + uniform_stream(sparsity, seed + 3))
    g = h @ truth
    lam = lam_scale * float(np.max(np.abs(h.T @ g)))
    return SparseInstance(forward=op_matrix(h), data=g, truth=truth, lam=lam)
