import numpy as np
import pytest

from platedeblur import (
    Image,
    KernelParams,
    NoiseSpec,
    Otf,
    add_noise,
    blur,
    guard_zeros,
    inverse_filter,
    make_psf,
    psf_to_otf,
    psnr,
)
from platedeblur.synth import identity_psf


class TestPsfToOtf:
    def test_identity_psf_gives_flat_otf(self):
        otf = psf_to_otf(identity_psf(), 16, 12)
        np.testing.assert_allclose(otf.spectrum, 1.0, atol=1e-12)

    def test_box_matches_dirichlet_closed_form(self):
        otf = psf_to_otf(make_psf(KernelParams(0.0, 5)), 32, 32)
        u = np.arange(32)
        with np.errstate(divide="ignore", invalid="ignore"):
            expected = np.sin(np.pi * u * 5 / 32) / (5 * np.sin(np.pi * u / 32))
        expected[0] = 1.0
        assert np.abs(otf.spectrum[0].real - expected).max() < 1e-9
        assert np.abs(otf.spectrum[0].imag).max() < 1e-9

    @pytest.mark.parametrize("angle,length", [(0, 5), (70, 24), (135, 9)])
    def test_dc_is_one_for_normalized_psf(self, angle, length):
        otf = psf_to_otf(make_psf(KernelParams(angle, length)), 64, 64)
        assert otf.spectrum[0, 0] == pytest.approx(1.0, abs=1e-12)

    def test_oversized_psf_rejected(self):
        with pytest.raises(ValueError, match="larger"):
            psf_to_otf(make_psf(KernelParams(0.0, 40)), 16, 16)


class TestGuardZeros:
    def test_exact_zero_becomes_epsilon(self):
        otf = Otf(np.array([[0.0 + 0.0j, 1.0]]))
        guarded = guard_zeros(otf, 1e-3)
        assert guarded.spectrum[0, 0] == 1e-3 + 0j

    def test_large_coefficient_unchanged(self):
        otf = Otf(np.array([[0.5 + 0.0j]]))
        assert guard_zeros(otf, 1e-3).spectrum[0, 0] == 0.5 + 0j

    def test_small_negative_preserves_phase(self):
        otf = Otf(np.array([[-1e-6 + 0.0j]]))
        assert guard_zeros(otf, 1e-3).spectrum[0, 0] == pytest.approx(-1e-3 + 0j)

    def test_small_complex_preserves_phase(self):
        c = 1e-6 * np.exp(1j * 0.7)
        guarded = guard_zeros(Otf(np.array([[c]])), 1e-3)
        out = guarded.spectrum[0, 0]
        assert abs(out) == pytest.approx(1e-3)
        assert np.angle(out) == pytest.approx(0.7)

    def test_idempotent(self, rng):
        spec = rng.normal(size=(8, 8)) * 1e-4 + 1j * rng.normal(size=(8, 8)) * 1e-4
        once = guard_zeros(Otf(spec), 1e-3)
        twice = guard_zeros(once, 1e-3)
        np.testing.assert_array_equal(once.spectrum, twice.spectrum)
        assert (np.abs(once.spectrum) >= 1e-3 - 1e-15).all()

    def test_rejects_bad_epsilon(self):
        with pytest.raises(ValueError):
            guard_zeros(Otf(np.ones((2, 2), complex)), 0.0)


class TestInverseFilter:
    def test_identity_psf_is_identity(self, rng):
        img = Image(rng.random((1, 16, 16)))
        out = inverse_filter(img, identity_psf())
        assert np.abs(out.planes - img.planes).max() < 1e-9

    def test_exact_inverse_of_wrap_blur(self, plate):
        psf = make_psf(KernelParams(70.0, 24))
        blurred = blur(plate, psf, "wrap")
        restored = inverse_filter(blurred, psf, 1e-3)
        clamped = Image(np.clip(restored.planes, 0.0, 1.0))
        assert psnr(plate, clamped) >= 40.0

    def test_linearity(self, rng):
        img = Image(rng.random((1, 16, 16)))
        psf = make_psf(KernelParams(30.0, 5))
        double = Image(2.0 * img.planes)
        a = inverse_filter(double, psf)
        b = inverse_filter(img, psf)
        np.testing.assert_allclose(a.planes, 2.0 * b.planes, atol=1e-12)

    def test_noise_amplification_recorded(self, plate):
        # Known weakness of plain inverse filtering: noise costs fidelity.
        # The harness records the degradation instead of bounding it.
        psf = make_psf(KernelParams(70.0, 24))
        blurred = blur(plate, psf, "wrap")
        noisy = add_noise(blurred, NoiseSpec(sigma=0.01, seed=5))
        clean_psnr = psnr(plate, Image(np.clip(inverse_filter(blurred, psf).planes, 0, 1)))
        noisy_psnr = psnr(plate, Image(np.clip(inverse_filter(noisy, psf).planes, 0, 1)))
        print(f"inverse filter PSNR: noiseless {clean_psnr:.1f} dB, "
              f"sigma=0.01 {noisy_psnr:.1f} dB")
        assert noisy_psnr < clean_psnr

    def test_multichannel(self, rng):
        img = Image(rng.random((3, 16, 16)))
        psf = make_psf(KernelParams(120.0, 7))
        blurred = blur(img, psf, "wrap")
        restored = inverse_filter(blurred, psf, 1e-6)
        assert np.abs(restored.planes - img.planes).max() < 1e-6
