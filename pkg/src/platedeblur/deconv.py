"""Non-blind restoration: OTF construction, zero guarding, inverse filter."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import Image
from .spectral import fft2, ifft2
from .synth import Psf

DEFAULT_EPSILON = 1e-3


@dataclass(frozen=True, eq=False)
class Otf:
    """Optical transfer function at full image size.

    `epsilon` records the zero-guard magnitude applied to the spectrum;
    it is 0.0 for a freshly built, unguarded OTF.
    """

    spectrum: np.ndarray
    epsilon: float = 0.0


def psf_to_otf(psf: Psf, width: int, height: int) -> Otf:
    """Embed the psf at image size and transform it.

    The psf center is placed at index (0, 0) with wrap-around, so dividing
    a wrap-blurred image's spectrum by this OTF undoes the blur exactly.
    For a normalized psf the DC coefficient is 1.
    """
    kh, kw = psf.plane.shape
    if kh > height or kw > width:
        raise ValueError("psf is larger than the target dimensions")
    big = np.zeros((height, width))
    big[:kh, :kw] = psf.plane
    big = np.roll(big, (-(kh // 2), -(kw // 2)), axis=(0, 1))
    return Otf(fft2(big), epsilon=0.0)


def guard_zeros(otf: Otf, epsilon: float) -> Otf:
    """Raise near-zero OTF magnitudes to epsilon, preserving phase.

    Coefficients with |c| < epsilon become epsilon * c/|c|; exact zeros
    become epsilon + 0i. Idempotent for a fixed epsilon.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    spec = otf.spectrum.copy()
    mag = np.abs(spec)
    small = mag < epsilon
    nonzero = small & (mag > 0.0)
    # The few-ulp overshoot keeps |guarded| >= epsilon under rounding, so
    # a second application sees nothing left to replace.
    bump = 1.0 + 8.0 * np.finfo(float).eps
    spec[nonzero] *= bump * epsilon / mag[nonzero]
    spec[small & (mag == 0.0)] = epsilon
    return Otf(spec, epsilon=epsilon)


def inverse_filter(img: Image, psf: Psf, epsilon: float = DEFAULT_EPSILON) -> Image:
    """Divide each channel's spectrum by the guarded OTF and invert.

    `epsilon` is relative to the OTF's maximum magnitude (1 at DC for a
    normalized psf) and bounds noise amplification by its reciprocal.
    Output samples are not clamped; clamping happens at save time.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    otf = psf_to_otf(psf, img.width, img.height)
    guard = epsilon * float(np.abs(otf.spectrum).max())
    guarded = guard_zeros(otf, guard)
    out = np.stack(
        [ifft2(fft2(plane) / guarded.spectrum) for plane in img.planes]
    )
    return Image(out)
