"""Matrix-free linear operators implemented as apply/adjoint pairs.

Every operator here satisfies the adjoint identity <Ax, y> = <x, A*y> (the
inner product conjugates the second argument on complex grids), and the
adjoints are exact transposes of the discrete forward maps, not separate
discretizations.  ``dot_test`` is the ground-truth check and runs over every
constructed operator in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .grids import GridImage, _seed_value, as_array, bilinear_values, normal_stream, uniform_stream

__all__ = [
    "LinearMap",
    "Mask",
    "RadonGeometry",
    "Sinogram",
    "dot_test",
    "linearity_test",
    "op_mask",
    "op_multiply",
    "op_convolve",
    "embed_kernel",
    "op_compose",
    "op_identity",
    "op_matrix",
    "op_dft2",
    "op_grad",
    "op_radon",
    "radon",
    "transform_haar",
    "transform_dct8",
    "fourier_slice_check",
]


class LinearMap:
    """A linear operator defined by an apply function and its exact adjoint.

    Args:
        domain_shape: shape of valid inputs to ``apply``.
        range_shape: shape of valid inputs to ``adjoint``.
        apply_fn: forward action.
        adjoint_fn: adjoint action, the exact transpose of ``apply_fn``.
        domain_complex / range_complex: field of each side; real operators
            reject complex input rather than silently discarding phase.
    """

    def __init__(
        self,
        domain_shape: tuple[int, ...],
        range_shape: tuple[int, ...],
        apply_fn: Callable[[np.ndarray], np.ndarray],
        adjoint_fn: Callable[[np.ndarray], np.ndarray],
        *,
        domain_complex: bool = False,
        range_complex: bool = False,
        name: str = "linear_map",
    ):
        self.domain_shape = tuple(int(s) for s in domain_shape)
        self.range_shape = tuple(int(s) for s in range_shape)
        self._apply = apply_fn
        self._adjoint = adjoint_fn
        self.domain_complex = bool(domain_complex)
        self.range_complex = bool(range_complex)
        self.name = name

    def _coerce(self, x, shape, is_complex, side):
        arr = as_array(x)
        if arr.shape != shape:
            raise ValidationError(
                f"{self.name}: {side} shape {arr.shape} does not match {shape}"
            )
        if is_complex:
            arr = np.ascontiguousarray(arr, dtype=np.complex128)
        elif np.iscomplexobj(arr):
            raise ValidationError(f"{self.name}: {side} input must be real")
        else:
            arr = np.ascontiguousarray(arr, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"{self.name}: {side} input contains non-finite samples")
        return arr

    def apply(self, x) -> np.ndarray:
        return self._apply(self._coerce(x, self.domain_shape, self.domain_complex, "domain"))

    def adjoint(self, y) -> np.ndarray:
        return self._adjoint(self._coerce(y, self.range_shape, self.range_complex, "range"))

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        return op_compose(self, other)

    def __repr__(self):
        return f"LinearMap({self.name}: {self.domain_shape} -> {self.range_shape})"


def _random_field(shape, is_complex, seed):
    n = int(np.prod(shape))
    if is_complex:
        re = normal_stream(n, 1.0, seed)
        im = normal_stream(n, 1.0, seed + 0x9E37)
        return (re + 1j * im).reshape(shape)
    return normal_stream(n, 1.0, seed).reshape(shape)


def dot_test(op: LinearMap, trials: int = 100, seed=0) -> float:
    """Max relative error of <Ax, y> vs <x, A*y> over seeded random trials."""
    base = _seed_value(seed)
    worst = 0.0
    for t in range(trials):
        x = _random_field(op.domain_shape, op.domain_complex, base + 2 * t + 1)
        y = _random_field(op.range_shape, op.range_complex, base + 2 * t + 2)
        lhs = np.vdot(y.ravel(), op.apply(x).ravel())
        rhs = np.vdot(op.adjoint(y).ravel(), x.ravel())
        scale = max(abs(lhs), abs(rhs), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def linearity_test(op: LinearMap, trials: int = 20, seed=0) -> float:
    """Max relative error of A(a x1 + b x2) vs a A(x1) + b A(x2)."""
    base = _seed_value(seed)
    worst = 0.0
    for t in range(trials):
        x1 = _random_field(op.domain_shape, op.domain_complex, base + 3 * t + 1)
        x2 = _random_field(op.domain_shape, op.domain_complex, base + 3 * t + 2)
        a, b = 1.7, -0.3
        lhs = op.apply(a * x1 + b * x2)
        rhs = a * op.apply(x1) + b * op.apply(x2)
        scale = max(float(np.linalg.norm(rhs.ravel())), 1e-300)
        worst = max(worst, float(np.linalg.norm((lhs - rhs).ravel())) / scale)
    return worst


# ---------------------------------------------------------------------------
# Sampling masks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mask:
    """Kept-entry selection over a (height, width) grid, in flat index order."""

    indices: np.ndarray
    shape: tuple[int, int]

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        h, w = int(self.shape[0]), int(self.shape[1])
        if h < 1 or w < 1:
            raise ValidationError("Mask.shape must be a positive (height, width)")
        if idx.size < 1:
            raise ValidationError("Mask must keep at least one entry")
        if idx.min() < 0 or idx.max() >= h * w:
            raise ValidationError("Mask indices out of range")
        if np.unique(idx).size != idx.size:
            raise ValidationError("Mask indices must be unique")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "shape", (h, w))

    @property
    def count(self) -> int:
        return int(self.indices.size)

    def to_bool(self) -> np.ndarray:
        keep = np.zeros(self.shape[0] * self.shape[1], dtype=bool)
        keep[self.indices] = True
        return keep.reshape(self.shape)

    @classmethod
    def full(cls, shape) -> "Mask":
        h, w = int(shape[0]), int(shape[1])
        return cls(np.arange(h * w, dtype=np.int64), (h, w))

    @classmethod
    def from_bool(cls, keep) -> "Mask":
        keep = np.asarray(keep, dtype=bool)
        if keep.ndim != 2:
            raise ValidationError("Mask.from_bool expects a 2D boolean raster")
        return cls(np.flatnonzero(keep.ravel()), keep.shape)

    @classmethod
    def random(cls, shape, fraction: float, seed) -> "Mask":
        """Keep a deterministic pseudo-random fraction of the grid."""
        if not 0.0 < fraction <= 1.0:
            raise ValidationError("Mask.random fraction must be in (0, 1]")
        h, w = int(shape[0]), int(shape[1])
        n = h * w
        m = max(1, int(round(fraction * n)))
        order = np.argsort(uniform_stream(n, seed), kind="stable")
        return cls(np.sort(order[:m]), (h, w))


def op_mask(mask: Mask, *, complex_field: bool = False) -> LinearMap:
    """Extract kept entries as a vector; adjoint scatters back with zeros."""
    h, w = mask.shape
    idx = mask.indices

    def forward(x):
        return x.ravel()[idx].copy()

    def backward(y):
        out = np.zeros(h * w, dtype=np.complex128 if complex_field else np.float64)
        out[idx] = y
        return out.reshape(h, w)

    return LinearMap(
        (h, w),
        (mask.count,),
        forward,
        backward,
        domain_complex=complex_field,
        range_complex=complex_field,
        name="mask",
    )


# ---------------------------------------------------------------------------
# Pointwise multiply and convolution
# ---------------------------------------------------------------------------


def op_multiply(weights) -> LinearMap:
    """Pointwise multiplication; the adjoint multiplies by the conjugate."""
    wgt = as_array(weights)
    if wgt.ndim != 2:
        raise ValidationError("op_multiply expects a 2D weight grid")
    if not np.all(np.isfinite(wgt.real)) or not np.all(np.isfinite(np.imag(wgt))):
        raise ValidationError("op_multiply weights must be finite")
    is_complex = np.iscomplexobj(wgt)
    wgt = wgt.astype(np.complex128 if is_complex else np.float64)
    conj = np.conj(wgt)
    return LinearMap(
        wgt.shape,
        wgt.shape,
        lambda x: wgt * x,
        lambda y: conj * y,
        domain_complex=is_complex,
        range_complex=is_complex,
        name="multiply",
    )


def embed_kernel(kernel, shape) -> np.ndarray:
    """Embed a small centered kernel into a full grid with its center at (0, 0).

    The result is the right operand for circular ``op_convolve`` when the
    kernel is given in centered (point-spread) form: convolving with it does
    not shift the image.
    """
    ker = as_array(kernel).astype(np.float64)
    kh, kw = ker.shape
    h, w = int(shape[0]), int(shape[1])
    if kh > h or kw > w:
        raise ValidationError("embed_kernel target grid is smaller than the kernel")
    out = np.zeros((h, w), dtype=np.float64)
    out[:kh, :kw] = ker
    return np.roll(out, (-((kh - 1) // 2), -((kw - 1) // 2)), axis=(0, 1))


def op_convolve(kernel, mode: str = "circular", domain_shape=None) -> LinearMap:
    """Convolution by a fixed kernel.

    circular: the kernel lives on the same grid as the domain with its origin
    at index (0, 0), and the operator diagonalizes in the DFT basis (use
    ``embed_kernel`` for centered point-spread kernels).  zeropad-linear: the
    kernel may have any size and the output grows to (H+kh-1, W+kw-1); the
    adjoint is the valid-region correlation.
    """
    ker = as_array(kernel)
    if ker.ndim != 2:
        raise ValidationError("op_convolve kernel must be 2D")
    if not np.all(np.isfinite(ker.real)) or not np.all(np.isfinite(np.imag(ker))):
        raise ValidationError("op_convolve kernel must be finite")
    is_complex = np.iscomplexobj(ker)

    if mode == "circular":
        if domain_shape is not None and tuple(domain_shape) != ker.shape:
            raise ValidationError("circular convolution requires kernel on the domain grid")
        khat = np.fft.fft2(ker)
        khat_conj = np.conj(khat)

        def forward(x):
            out = np.fft.ifft2(np.fft.fft2(x) * khat)
            return out if is_complex else out.real

        def backward(y):
            out = np.fft.ifft2(np.fft.fft2(y) * khat_conj)
            return out if is_complex else out.real

        return LinearMap(
            ker.shape,
            ker.shape,
            forward,
            backward,
            domain_complex=is_complex,
            range_complex=is_complex,
            name="convolve_circular",
        )

    if mode == "zeropad-linear":
        if domain_shape is None:
            raise ValidationError("zeropad-linear convolution needs an explicit domain_shape")
        h, w = int(domain_shape[0]), int(domain_shape[1])
        kh, kw = ker.shape
        ph, pw = h + kh - 1, w + kw - 1
        khat = np.fft.fft2(ker, s=(ph, pw))
        khat_conj = np.conj(khat)

        def forward(x):
            out = np.fft.ifft2(np.fft.fft2(x, s=(ph, pw)) * khat)
            return out if is_complex else out.real

        def backward(y):
            out = np.fft.ifft2(np.fft.fft2(y) * khat_conj)[:h, :w]
            return out if is_complex else out.real

        return LinearMap(
            (h, w),
            (ph, pw),
            forward,
            backward,
            domain_complex=is_complex,
            range_complex=is_complex,
            name="convolve_linear",
        )

    raise ValidationError(f"unknown convolution mode {mode!r}")


# ---------------------------------------------------------------------------
# Composition, identity, dense adapters, DFT as an operator
# ---------------------------------------------------------------------------


def op_compose(outer: LinearMap, inner: LinearMap) -> LinearMap:
    """outer after inner; shapes and fields must chain."""
    if inner.range_shape != outer.domain_shape:
        raise ValidationError(
            f"cannot compose: inner range {inner.range_shape} vs outer domain {outer.domain_shape}"
        )
    if inner.range_complex != outer.domain_complex:
        raise ValidationError("cannot compose: field mismatch between inner range and outer domain")
    return LinearMap(
        inner.domain_shape,
        outer.range_shape,
        lambda x: outer.apply(inner.apply(x)),
        lambda y: inner.adjoint(outer.adjoint(y)),
        domain_complex=inner.domain_complex,
        range_complex=outer.range_complex,
        name=f"{outer.name}*{inner.name}",
    )


def op_identity(shape, *, complex_field: bool = False) -> LinearMap:
    return LinearMap(
        tuple(shape),
        tuple(shape),
        lambda x: x.copy(),
        lambda y: y.copy(),
        domain_complex=complex_field,
        range_complex=complex_field,
        name="identity",
    )


def op_matrix(a) -> LinearMap:
    """Dense matrix as a LinearMap on flat vectors, mostly for small systems."""
    mat = np.asarray(a)
    if mat.ndim != 2:
        raise ValidationError("op_matrix expects a 2D matrix")
    is_complex = np.iscomplexobj(mat)
    mat = mat.astype(np.complex128 if is_complex else np.float64)
    mat_h = mat.conj().T.copy()
    return LinearMap(
        (mat.shape[1],),
        (mat.shape[0],),
        lambda x: mat @ x,
        lambda y: mat_h @ y,
        domain_complex=is_complex,
        range_complex=is_complex,
        name="matrix",
    )


def op_dft2(shape) -> LinearMap:
    """The unnormalized 2D DFT on complex grids; adjoint is N * inverse."""
    h, w = int(shape[0]), int(shape[1])
    n = h * w

    return LinearMap(
        (h, w),
        (h, w),
        lambda x: np.fft.fft2(x),
        lambda y: n * np.fft.ifft2(y),
        domain_complex=True,
        range_complex=True,
        name="dft2",
    )


# ---------------------------------------------------------------------------
# Finite-difference gradient
# ---------------------------------------------------------------------------


def op_grad(shape) -> LinearMap:
    """Forward differences with a clamped last row/column.

    Channel 0 holds horizontal differences, channel 1 vertical ones; the
    adjoint is the matching negative divergence (exact transpose).
    """
    h, w = int(shape[0]), int(shape[1])
    if h < 1 or w < 1:
        raise ValidationError("op_grad needs a positive (height, width)")

    def forward(x):
        g = np.zeros((2, h, w), dtype=np.float64)
        g[0, :, : w - 1] = x[:, 1:] - x[:, : w - 1]
        g[1, : h - 1, :] = x[1:, :] - x[: h - 1, :]
        return g

    def backward(g):
        out = np.zeros((h, w), dtype=np.float64)
        gx = g[0]
        gy = g[1]
        if w > 1:
            out[:, 1:] += gx[:, : w - 1]
            out[:, : w - 1] -= gx[:, : w - 1]
        if h > 1:
            out[1:, :] += gy[: h - 1, :]
            out[: h - 1, :] -= gy[: h - 1, :]
        return out

    return LinearMap((h, w), (2, h, w), forward, backward, name="grad")


# ---------------------------------------------------------------------------
# Ray transform
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadonGeometry:
    """Parallel-beam geometry: uniform angles on [0, pi), centered detectors."""

    n_angles: int
    n_detectors: int
    detector_pitch: float = 1.0

    def __post_init__(self):
        if self.n_angles < 1 or self.n_detectors < 1:
            raise ValidationError("RadonGeometry needs at least one angle and one detector")
        if not (self.detector_pitch > 0 and np.isfinite(self.detector_pitch)):
            raise ValidationError("RadonGeometry detector_pitch must be positive")

    @property
    def angles(self) -> np.ndarray:
        return np.arange(self.n_angles) * (np.pi / self.n_angles)


@dataclass(frozen=True)
class Sinogram:
    """Projections indexed (angle, detector)."""

    data: np.ndarray
    angles: np.ndarray
    detector_pitch: float = 1.0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        angles = np.asarray(self.angles, dtype=np.float64)
        if data.ndim != 2 or data.size == 0:
            raise ValidationError("Sinogram.data must be a non-empty (angles, detectors) array")
        if not np.all(np.isfinite(data)):
            raise ValidationError("Sinogram.data contains non-finite samples")
        if angles.shape != (data.shape[0],):
            raise ValidationError("Sinogram.angles length must match the angle axis")
        if np.any(np.diff(angles) <= 0):
            raise ValidationError("Sinogram.angles must be strictly increasing")
        if angles[0] < 0 or angles[-1] >= np.pi:
            raise ValidationError("Sinogram.angles must lie in [0, pi)")
        if not (self.detector_pitch > 0 and np.isfinite(self.detector_pitch)):
            raise ValidationError("Sinogram.detector_pitch must be positive")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "angles", angles)

    @property
    def n_angles(self) -> int:
        return self.data.shape[0]

    @property
    def n_detectors(self) -> int:
        return self.data.shape[1]


def _ray_points(theta: float, shape, n_detectors: int, pitch: float):
    """Sample coordinates for all rays of one view, at unit step along rays.

    Ray direction is (-sin t, cos t); the detector axis is (cos t, sin t);
    both are expressed around the image center.
    """
    h, w = shape
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    offs = (np.arange(n_detectors) - (n_detectors - 1) / 2.0) * pitch
    span = int(np.ceil(np.hypot(h, w))) + 1
    ts = np.arange(span) - (span - 1) / 2.0
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    xs = cx + offs[:, None] * cos_t - ts[None, :] * sin_t
    ys = cy + offs[:, None] * sin_t + ts[None, :] * cos_t
    return xs, ys


def _bilinear_stencil(shape, xs, ys):
    """Corner indices and weights of the bilinear stencil at each sample.

    Shared by the forward gather and the adjoint scatter so the adjoint is
    the exact transpose by construction.  Out-of-grid samples get zero weight.
    """
    h, w = shape
    inside = (xs >= 0.0) & (xs <= w - 1.0) & (ys >= 0.0) & (ys <= h - 1.0)
    xc = np.clip(xs, 0.0, w - 1.0)
    yc = np.clip(ys, 0.0, h - 1.0)
    x0 = np.clip(np.floor(xc).astype(np.int64), 0, max(w - 2, 0))
    y0 = np.clip(np.floor(yc).astype(np.int64), 0, max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xc - x0
    fy = yc - y0
    zero = np.where(inside, 1.0, 0.0)
    weights = (
        zero * (1.0 - fx) * (1.0 - fy),
        zero * fx * (1.0 - fy),
        zero * (1.0 - fx) * fy,
        zero * fx * fy,
    )
    indices = (y0 * w + x0, y0 * w + x1, y1 * w + x0, y1 * w + x1)
    return indices, weights


def _project_view(data: np.ndarray, theta: float, n_detectors: int, pitch: float) -> np.ndarray:
    """One view of the ray transform: line integrals at unit step."""
    xs, ys = _ray_points(theta, data.shape, n_detectors, pitch)
    return bilinear_values(data, xs, ys).sum(axis=1)


def _backproject_view(shape, values: np.ndarray, theta: float, pitch: float) -> np.ndarray:
    """Exact transpose of ``_project_view`` for one view."""
    h, w = shape
    xs, ys = _ray_points(theta, shape, values.size, pitch)
    indices, weights = _bilinear_stencil(shape, xs, ys)
    out = np.zeros(h * w, dtype=np.float64)
    spread = np.broadcast_to(values[:, None], xs.shape).ravel()
    for idx, wgt in zip(indices, weights):
        out += np.bincount(idx.ravel(), weights=spread * wgt.ravel(), minlength=h * w)
    return out.reshape(h, w)


# Cache per-view stencils only while the whole geometry stays under ~100 MB;
# larger geometries recompute per apply instead of exhausting memory.
_RADON_CACHE_BUDGET = 1 << 21


def op_radon(geometry: RadonGeometry, image_shape) -> LinearMap:
    """Discrete ray transform: bilinear sampling at unit step along rays.

    Angles are processed in a fixed order and each view accumulates
    deterministically, so repeated applies are bit-identical.  Iterative
    solvers apply the same operator thousands of times, so each view's
    sampling stencil is built once and reused when the geometry is small
    enough to keep resident.
    """
    h, w = int(image_shape[0]), int(image_shape[1])
    if h < 2 or w < 2:
        raise ValidationError("op_radon needs an image of at least 2x2 pixels")
    angles = geometry.angles
    pitch = geometry.detector_pitch
    n_angles, n_det = geometry.n_angles, geometry.n_detectors
    span = int(np.ceil(np.hypot(h, w))) + 1
    cache: list = []

    def view_stencil(a: int):
        xs, ys = _ray_points(angles[a], (h, w), n_det, pitch)
        indices, weights = _bilinear_stencil((h, w), xs, ys)
        return np.stack(indices).astype(np.int32), np.stack(weights)

    def full_stencil():
        # one gather/scatter table for all views: (4, n_angles * n_det, span)
        if not cache:
            parts = [view_stencil(a) for a in range(n_angles)]
            cache.append(np.concatenate([p[0] for p in parts], axis=1))
            cache.append(np.concatenate([p[1] for p in parts], axis=1))
        return cache[0], cache[1]

    merged = n_angles * n_det * span <= _RADON_CACHE_BUDGET

    def forward(x):
        flat = x.ravel()
        if merged:
            idx, wgt = full_stencil()
            vals = np.einsum("cks,cks->k", wgt, flat[idx])
            return vals.reshape(n_angles, n_det)
        out = np.empty((n_angles, n_det), dtype=np.float64)
        for a in range(n_angles):
            idx, wgt = view_stencil(a)
            out[a] = np.einsum("cds,cds->d", wgt, flat[idx])
        return out

    def backward(y):
        if merged:
            idx, wgt = full_stencil()
            contrib = wgt * y.reshape(-1)[None, :, None]
            out = np.bincount(idx.ravel(), weights=contrib.ravel(), minlength=h * w)
            return out.reshape(h, w)
        out = np.zeros(h * w, dtype=np.float64)
        for a in range(n_angles):
            idx, wgt = view_stencil(a)
            contrib = wgt * y[a][None, :, None]
            out += np.bincount(idx.ravel(), weights=contrib.ravel(), minlength=h * w)
        return out.reshape(h, w)

    return LinearMap(
        (h, w),
        (geometry.n_angles, geometry.n_detectors),
        forward,
        backward,
        name="radon",
    )


def radon(img: GridImage, geometry: RadonGeometry) -> Sinogram:
    """Apply the ray transform to an image and wrap the result."""
    data = op_radon(geometry, img.data.shape).apply(img.data)
    return Sinogram(data, geometry.angles, geometry.detector_pitch)


# ---------------------------------------------------------------------------
# Orthonormal transforms
# ---------------------------------------------------------------------------

_SQRT2 = np.sqrt(2.0)


def _haar_rows(block: np.ndarray) -> np.ndarray:
    avg = (block[:, 0::2] + block[:, 1::2]) / _SQRT2
    dif = (block[:, 0::2] - block[:, 1::2]) / _SQRT2
    return np.concatenate([avg, dif], axis=1)


def _haar_rows_inv(block: np.ndarray) -> np.ndarray:
    half = block.shape[1] // 2
    avg, dif = block[:, :half], block[:, half:]
    out = np.empty_like(block)
    out[:, 0::2] = (avg + dif) / _SQRT2
    out[:, 1::2] = (avg - dif) / _SQRT2
    return out


def transform_haar(img: GridImage, levels: int, inverse: bool = False) -> GridImage:
    """Orthonormal separable Haar analysis (or synthesis) over ``levels``.

    Each level splits the current low-pass block into average and detail
    halves along rows then columns; deeper levels recurse on the top-left
    block.  Energy is preserved exactly up to roundoff.
    """
    if levels < 1:
        raise ValidationError("transform_haar needs levels >= 1")
    h, w = img.data.shape
    if h % (1 << levels) or w % (1 << levels):
        raise ValidationError(
            f"image {h}x{w} is not divisible by 2^{levels} along both axes"
        )
    data = img.data.copy()
    if not inverse:
        ch, cw = h, w
        for _ in range(levels):
            block = data[:ch, :cw]
            block = _haar_rows(block)
            block = _haar_rows(block.T).T
            data[:ch, :cw] = block
            ch //= 2
            cw //= 2
    else:
        for lev in reversed(range(levels)):
            ch, cw = h >> lev, w >> lev
            block = data[:ch, :cw]
            block = _haar_rows_inv(block.T).T
            block = _haar_rows_inv(block)
            data[:ch, :cw] = block
    return GridImage(data, img.pitch)


def _dct8_matrix() -> np.ndarray:
    # orthonormal DCT-II: D[k, n] = c_k cos(pi (2n + 1) k / 16)
    n = np.arange(8)
    k = n[:, None]
    mat = np.cos(np.pi * (2 * n[None, :] + 1) * k / 16.0)
    mat[0] *= np.sqrt(1.0 / 8.0)
    mat[1:] *= np.sqrt(2.0 / 8.0)
    return mat


_DCT8 = _dct8_matrix()


def transform_dct8(img: GridImage, inverse: bool = False) -> GridImage:
    """Orthonormal 8x8 block DCT-II (or its inverse)."""
    h, w = img.data.shape
    if h % 8 or w % 8:
        raise ValidationError(f"image {h}x{w} is not divisible into 8x8 blocks")
    blocks = img.data.reshape(h // 8, 8, w // 8, 8).transpose(0, 2, 1, 3)
    if inverse:
        out = np.einsum("ki,abij,lj->abkl", _DCT8.T, blocks, _DCT8.T, optimize=True)
    else:
        out = np.einsum("ki,abij,lj->abkl", _DCT8, blocks, _DCT8, optimize=True)
    data = out.transpose(0, 2, 1, 3).reshape(h, w)
    return GridImage(data, img.pitch)


# ---------------------------------------------------------------------------
# Projection-slice cross-check
# ---------------------------------------------------------------------------


def fourier_slice_check(img: GridImage, theta: float) -> float:
    """Relative l2 mismatch between the two routes to a central slice.

    Route one takes a single ray-transform view at angle ``theta`` and runs a
    1D DFT over detectors; route two samples the 2D DFT of the image along
    the same direction by bilinear interpolation.  Both sides are rephased to
    the image center and compared over the low 60 percent of the band.  The
    2D spectrum is computed on a 4x zero-padded grid and rephased to the
    image center before the lookup: the padding densifies the sample grid
    and the centering removes the near-Nyquist phase ramp, so bilinear
    interpolation of the spectrum is accurate where the slice is read.
    """
    data = as_array(img)
    h, w = data.shape
    if h != w:
        raise ValidationError("fourier_slice_check expects a square image")
    n = w
    proj = _project_view(data, float(theta), n, 1.0)

    freqs = np.fft.fftfreq(n)
    center = (n - 1) / 2.0
    slice_1d = np.exp(2j * np.pi * freqs * center) * np.fft.fft(proj)

    pad = 4 * n
    off = (pad - n) // 2
    big = np.zeros((pad, pad))
    big[off : off + n, off : off + n] = data
    big_center = off + center
    pad_freqs = np.fft.fftfreq(pad)
    phase = np.exp(2j * np.pi * (pad_freqs[:, None] + pad_freqs[None, :]) * big_center)
    spectrum = np.fft.fftshift(np.fft.fft2(big) * phase)
    fx = freqs * np.cos(theta)
    fy = freqs * np.sin(theta)
    px = fx * pad + pad // 2
    py = fy * pad + pad // 2
    slice_2d = bilinear_values(spectrum.real, px, py) + 1j * bilinear_values(
        spectrum.imag, px, py
    )

    band = np.abs(freqs) <= 0.3
    num = np.linalg.norm(slice_1d[band] - slice_2d[band])
    den = np.linalg.norm(slice_2d[band])
    if den == 0.0:
        raise ValidationError("fourier_slice_check: empty spectrum in the compared band")
    return float(num / den)
