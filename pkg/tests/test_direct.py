"""Direct reconstruction: ramp filtering, FBP, Wiener/MMSE, zero-filled IFFT.

FBP quality thresholds are regression bounds measured once with this
pipeline and frozen; the Wiener tests use dense linear-algebra oracles.
"""

import numpy as np
import pytest

from reconkit import (
    SHEPP_LOGAN,
    Ellipse,
    EllipsePhantom,
    GridImage,
    Mask,
    RadonGeometry,
    RampFilter,
    SingularityError,
    Sinogram,
    ValidationError,
    analytic_sinogram,
    dft2,
    embed_kernel,
    fbp,
    gaussian_noise,
    normal_stream,
    op_convolve,
    ramp_filter,
    render,
    shepp_logan,
    snr_db,
    wiener_deconvolve,
    zerofill_ifft,
)

DISK = EllipsePhantom((Ellipse(0.0, 0.0, 0.6, 0.6, 0.0, 1.0),))


class TestRampFilter:
    def test_invariants(self):
        filt = ramp_filter(100)
        assert filt.n_taps >= 200
        assert filt.response[0] == 0.0
        assert np.all(filt.response >= 0.0)
        assert np.allclose(filt.response[1:], filt.response[1:][::-1], atol=1e-15)

    def test_pads_to_power_of_two(self):
        assert ramp_filter(100).n_taps == 256
        assert ramp_filter(64).n_taps == 128

    def test_cosine_apodization_tapers_band_edge(self):
        plain = ramp_filter(64)
        soft = ramp_filter(64, apodization="cosine")
        assert soft.response[0] == 0.0
        assert np.all(soft.response <= plain.response + 1e-15)
        nyquist = soft.n_taps // 2
        assert soft.response[nyquist] < 1e-12 < plain.response[nyquist]

    def test_unknown_apodization(self):
        with pytest.raises(ValidationError):
            ramp_filter(64, apodization="hann")

    def test_type_validates(self):
        with pytest.raises(ValidationError):
            RampFilter(8, np.array([0.1, 0.2, 0.2, 0.2, 0.3, 0.2, 0.2, 0.2]), "none")


class TestFbp:
    def test_zero_sinogram_gives_zero_image(self):
        geom = RadonGeometry(4, 16)
        sino = Sinogram(np.zeros((4, 16)), geom.angles, 1.0)
        assert np.array_equal(fbp(sino).data, np.zeros((16, 16)))

    def test_empty_sinogram_rejected(self):
        with pytest.raises(ValidationError):
            Sinogram(np.zeros((0, 16)), np.zeros(0), 1.0)

    def test_nonuniform_angles_rejected(self):
        angles = np.array([0.0, 0.3, 1.4])
        with pytest.raises(ValidationError):
            fbp(Sinogram(np.ones((3, 8)), angles, 1.0))

    def test_linearity(self):
        geom = RadonGeometry(12, 32)
        s1 = analytic_sinogram(DISK, geom, 32)
        s2 = analytic_sinogram(
            EllipsePhantom((Ellipse(0.2, -0.1, 0.3, 0.5, 0.4, 2.0),)), geom, 32
        )
        combo = Sinogram(2.0 * s1.data - 0.5 * s2.data, geom.angles, 1.0)
        lhs = fbp(combo).data
        rhs = 2.0 * fbp(s1).data - 0.5 * fbp(s2).data
        assert np.max(np.abs(lhs - rhs)) <= 1e-8 * max(1.0, np.max(np.abs(rhs)))

    def test_disk_quality_floor(self):
        # regression bound: 20.41 dB measured at 256^2, frozen at >= 20
        size = 256
        truth = render(DISK, size)
        sino = analytic_sinogram(DISK, RadonGeometry(360, size), size)
        assert snr_db(truth.data, fbp(sino).data) >= 20.0

    def test_view_doubling_strictly_improves(self):
        size = 128
        truth = shepp_logan(size)
        snrs = []
        for n_angles in (90, 180, 360):
            sino = analytic_sinogram(SHEPP_LOGAN, RadonGeometry(n_angles, size), size)
            snrs.append(snr_db(truth.data, fbp(sino).data))
        assert snrs[0] < snrs[1] < snrs[2]

    def test_default_output_square_on_detector_grid(self):
        geom = RadonGeometry(8, 40)
        img = fbp(analytic_sinogram(DISK, geom, 40))
        assert img.data.shape == (40, 40)

    def test_out_shape_respected(self):
        geom = RadonGeometry(8, 32)
        img = fbp(analytic_sinogram(DISK, geom, 32), out_shape=(20, 24))
        assert img.data.shape == (20, 24)

    def test_detector_pitch_consistency(self):
        # the same object sampled with a finer detector pitch reconstructs
        # to comparable absolute values (the 1/pitch in filtering compensates)
        size = 64
        truth = render(DISK, size)
        s1 = analytic_sinogram(DISK, RadonGeometry(90, size, 1.0), size)
        s2 = analytic_sinogram(DISK, RadonGeometry(90, 2 * size, 0.5), size)
        r1 = fbp(s1, out_shape=(size, size)).data
        r2 = fbp(s2, out_shape=(size, size)).data
        assert snr_db(truth.data, r1) > 15.0
        assert snr_db(truth.data, r2) > 15.0
        assert abs(r1.mean() - r2.mean()) / abs(r1.mean()) < 0.05


def circulant_covariance(prior_spectrum):
    """Dense symmetric PSD matrix diagonalized by the 2D DFT."""
    h, w = prior_spectrum.shape
    n = h * w
    c = np.zeros((n, n))
    e = np.zeros((h, w))
    for j in range(n):
        e.flat[j] = 1.0
        col = np.fft.ifft2(prior_spectrum * np.fft.fft2(e))
        c[:, j] = col.real.ravel()
        e.flat[j] = 0.0
    return c


class TestWiener:
    def test_noiseless_exact_inverse(self):
        img = shepp_logan(32)
        kernel = embed_kernel(np.array([[0.6, 0.25], [0.1, 0.05]]), (32, 32))
        blurred = op_convolve(kernel).apply(img.data)
        prior = np.ones((32, 32))
        est = wiener_deconvolve(GridImage(blurred), kernel, 0.0, prior)
        rel = np.linalg.norm(est.data - img.data) / np.linalg.norm(img.data)
        assert rel < 1e-8

    def test_sigma_zero_singular_kernel_raises(self):
        # a two-tap average has an exact spectral zero at the Nyquist column
        kernel = np.zeros((16, 16))
        kernel[0, 0] = 0.5
        kernel[0, 1] = 0.5
        g = GridImage(np.ones((16, 16)))
        with pytest.raises(SingularityError):
            wiener_deconvolve(g, kernel, 0.0, np.ones((16, 16)))

    def test_large_sigma_shrinks_to_zero(self):
        img = shepp_logan(32)
        kernel = embed_kernel(np.ones((3, 3)) / 9.0, (32, 32))
        blurred = op_convolve(kernel).apply(img.data)
        est = wiener_deconvolve(GridImage(blurred), kernel, 1e8, np.ones((32, 32)))
        assert np.max(np.abs(est.data)) < 1e-10

    def test_matches_dense_map_oracle(self):
        # MAP form (H*H + s^2 C^-1)^-1 H* g against the per-bin gain formula
        h, w = 16, 16
        kernel = embed_kernel(normal_stream(9, 1.0, 430).reshape(3, 3), (h, w))
        base = normal_stream(h * w, 1.0, 431).reshape(h, w)
        prior = np.abs(np.fft.fft2(base)) ** 2 / (h * w) + 0.5  # symmetric positive
        g = normal_stream(h * w, 1.0, 432).reshape(h, w)
        sigma = 0.35

        est = wiener_deconvolve(GridImage(g), kernel, sigma, prior)

        hmat = np.zeros((h * w, h * w))
        e = np.zeros((h, w))
        conv = op_convolve(kernel)
        for j in range(h * w):
            e.flat[j] = 1.0
            hmat[:, j] = conv.apply(e).ravel()
            e.flat[j] = 0.0
        cmat = circulant_covariance(prior)
        lhs = hmat.T @ hmat + sigma**2 * np.linalg.inv(cmat)
        dense = np.linalg.solve(lhs, hmat.T @ g.ravel())
        rel = np.linalg.norm(est.data.ravel() - dense) / np.linalg.norm(dense)
        assert rel < 1e-8

    def test_satisfies_normal_equation(self):
        # the estimate solves H* g = (H* H + s^2 C^-1) f on dense instances
        for trial, n in ((0, 4), (1, 5)):
            hk = normal_stream(4, 1.0, 440 + trial).reshape(2, 2)
            kernel = embed_kernel(hk, (n, n))
            base = normal_stream(n * n, 1.0, 450 + trial).reshape(n, n)
            prior = np.abs(np.fft.fft2(base)) ** 2 / (n * n) + 1.0
            g = normal_stream(n * n, 1.0, 460 + trial).reshape(n, n)
            sigma = 0.5
            est = wiener_deconvolve(GridImage(g), kernel, sigma, prior).data.ravel()

            conv = op_convolve(kernel)
            hmat = np.zeros((n * n, n * n))
            e = np.zeros((n, n))
            for j in range(n * n):
                e.flat[j] = 1.0
                hmat[:, j] = conv.apply(e).ravel()
                e.flat[j] = 0.0
            cmat = circulant_covariance(prior)
            lhs = (hmat.T @ hmat + sigma**2 * np.linalg.inv(cmat)) @ est
            rhs = hmat.T @ g.ravel()
            assert np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs) < 1e-7

    def test_noise_amplification_near_singular(self):
        # deconvolving a 9x9 box blur multiplies noise enormously
        size = 64
        img = shepp_logan(size)
        kernel = embed_kernel(np.ones((9, 9)) / 81.0, (size, size))
        clean = op_convolve(kernel).apply(img.data)
        noise = gaussian_noise((size, size), 1e-3, 99).data
        est = wiener_deconvolve(GridImage(clean + noise), kernel, 0.0, np.ones((size, size)))
        amplification = np.linalg.norm(est.data - img.data) / np.linalg.norm(noise)
        assert amplification > 10.0

    def test_validation(self):
        g = GridImage(np.ones((8, 8)))
        with pytest.raises(ValidationError):
            wiener_deconvolve(g, np.ones((4, 4)), -1.0, np.ones((8, 8)))
        with pytest.raises(ValidationError):
            wiener_deconvolve(g, np.ones((8, 8)), 0.1, np.zeros((8, 8)))  # prior not > 0
        with pytest.raises(ValidationError):
            wiener_deconvolve(g, np.ones((8, 8)), 0.1, np.ones((4, 4)))  # wrong grid


class TestZerofill:
    def test_full_mask_round_trip(self):
        img = shepp_logan(32)
        spec = dft2(img).data
        mask = Mask.full((32, 32))
        recon = zerofill_ifft(spec.ravel()[mask.indices], mask)
        assert np.max(np.abs(recon.data - img.data)) < 1e-10

    def test_band_limited_exact_recovery(self):
        # an image synthesized from in-band bins only is recovered exactly
        # from those bins
        h, w = 16, 16
        keep = np.zeros((h, w), dtype=bool)
        keep[:3, :4] = True
        keep[-2:, -3:] = True
        spec = np.zeros((h, w), dtype=complex)
        vals = normal_stream(2 * keep.sum(), 1.0, 470)
        spec[keep] = vals[: keep.sum()] + 1j * vals[keep.sum() :]
        # realifying the image spreads each bin onto its Hermitian mirror,
        # so keep the union of the band and its mirror
        full = np.fft.fft2(np.fft.ifft2(spec).real)
        img = np.fft.ifft2(full).real
        mirror = np.zeros((h, w), dtype=bool)
        ys, xs = np.nonzero(keep)
        mirror[(-ys) % h, (-xs) % w] = True
        mask = Mask.from_bool(keep | mirror)
        vals = full.ravel()[mask.indices]
        recon = zerofill_ifft(vals, mask)
        assert np.max(np.abs(recon.data - img)) < 1e-10

    def test_quarter_mask_below_full(self):
        img = shepp_logan(64)
        spec = dft2(img).data
        full_mask = Mask.full((64, 64))
        full_snr = snr_db(img.data, zerofill_ifft(spec.ravel()[full_mask.indices], full_mask).data)
        part = Mask.random((64, 64), 0.25, seed=12)
        part_snr = snr_db(img.data, zerofill_ifft(spec.ravel()[part.indices], part).data)
        assert full_snr > 300.0  # recovery to round-off
        assert part_snr < 30.0
        assert part_snr < full_snr

    def test_count_mismatch_rejected(self):
        mask = Mask.random((8, 8), 0.5, seed=1)
        with pytest.raises(ValidationError):
            zerofill_ifft(np.ones(mask.count + 1, dtype=complex), mask)
