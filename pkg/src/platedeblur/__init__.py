"""Blind motion deblurring for license plate images.

Estimates a linear uniform motion kernel parametrically (angle via a
Hough transform over the cepstrum's edge map, length via a rotated
cepstrum minimum search), then restores the image by inverse filtering.
Includes a synthesis and evaluation harness for scoring the estimators
against known ground truth.
"""

from .deconv import DEFAULT_EPSILON, Otf, guard_zeros, inverse_filter, psf_to_otf
from .estimate import (
    EstimationConfig,
    EstimationError,
    HoughAccumulator,
    NoBlurStructureError,
    NoLengthStructureError,
    collapse_columns,
    estimate_angle,
    estimate_angle_channel,
    estimate_kernel,
    estimate_length,
    estimate_length_channel,
    hough_accumulate,
)
from .image import (
    Image,
    edge_map,
    load_image,
    rotate,
    rotate_plane,
    save_image,
    to_channels,
)
from .pipeline import (
    RunResult,
    SweepSpec,
    angle_error_deg,
    psnr,
    run_deblur,
    run_eval,
    run_synth,
)
from .spectral import cepstrum, fft2, fftshift, ifft2, ifftshift, imaginary_residual
from .synth import (
    KernelParams,
    NoiseSpec,
    Psf,
    add_noise,
    blur,
    make_psf,
    render_plate,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_EPSILON",
    "EstimationConfig",
    "EstimationError",
    "HoughAccumulator",
    "Image",
    "KernelParams",
    "NoBlurStructureError",
    "NoLengthStructureError",
    "NoiseSpec",
    "Otf",
    "Psf",
    "RunResult",
    "SweepSpec",
    "add_noise",
    "angle_error_deg",
    "blur",
    "cepstrum",
    "collapse_columns",
    "edge_map",
    "estimate_angle",
    "estimate_angle_channel",
    "estimate_kernel",
    "estimate_length",
    "estimate_length_channel",
    "fft2",
    "fftshift",
    "guard_zeros",
    "hough_accumulate",
    "ifft2",
    "ifftshift",
    "imaginary_residual",
    "inverse_filter",
    "load_image",
    "make_psf",
    "psf_to_otf",
    "psnr",
    "render_plate",
    "rotate",
    "rotate_plane",
    "run_deblur",
    "run_eval",
    "run_synth",
    "save_image",
    "to_channels",
]
