"""2-D Fourier transforms and the cepstral transform.

Transforms run at the native plane size (any dimensions, not just powers
of two). The forward transform is unnormalized; the inverse carries the
1/(width*height) factor, so ifft2(fft2(p)) == p.
"""

from __future__ import annotations

import numpy as np

DEFAULT_CEPSTRUM_FLOOR = 1e-10


def fft2(plane: np.ndarray) -> np.ndarray:
    """Unnormalized forward DFT of a 2-D plane; DC lands at index (0, 0)."""
    plane = np.asarray(plane)
    if plane.ndim != 2:
        raise ValueError("fft2 expects a 2-D plane")
    if plane.shape[0] < 1 or plane.shape[1] < 1:
        raise ValueError("both dimensions must be >= 1")
    if not np.all(np.isfinite(plane)):
        raise ValueError("plane samples must be finite")
    return np.fft.fft2(plane)


def ifft2(spec: np.ndarray) -> np.ndarray:
    """Normalized inverse DFT, real part only.

    Use imaginary_residual to inspect the discarded imaginary magnitude.
    """
    spec = np.asarray(spec)
    if spec.ndim != 2:
        raise ValueError("ifft2 expects a 2-D spectrum")
    return np.fft.ifft2(spec).real


def imaginary_residual(spec: np.ndarray) -> float:
    """Largest imaginary magnitude discarded by ifft2; a diagnostic."""
    return float(np.abs(np.fft.ifft2(spec).imag).max())


def cepstrum(plane: np.ndarray, floor: float = DEFAULT_CEPSTRUM_FLOOR) -> np.ndarray:
    """Real cepstrum: inverse transform of the log-magnitude spectrum.

    Spectral magnitudes below `floor` are clamped before the log so exact
    zeros (common in synthetic images) do not produce -inf. The output is a
    real plane of the input's shape and may contain negative values.
    """
    if floor <= 0.0:
        raise ValueError("floor must be positive")
    magnitude = np.abs(fft2(plane))
    return ifft2(np.log(np.maximum(magnitude, floor)))


def fftshift(plane: np.ndarray) -> np.ndarray:
    """Swap quadrants so DC moves from (0, 0) to (w // 2, h // 2)."""
    return np.fft.fftshift(plane)


def ifftshift(plane: np.ndarray) -> np.ndarray:
    """Inverse of fftshift; restores the input exactly for any shape."""
    return np.fft.ifftshift(plane)
