"""Brute-force oracles kept independent of the library's transform paths."""

from __future__ import annotations

import numpy as np


def brute_dft2(plane: np.ndarray) -> np.ndarray:
    """Direct O(N^2) unnormalized 2-D DFT summation."""
    h, w = plane.shape
    out = np.zeros((h, w), dtype=complex)
    for u in range(h):
        for v in range(w):
            acc = 0.0 + 0.0j
            for y in range(h):
                for x in range(w):
                    acc += plane[y, x] * np.exp(-2j * np.pi * (u * y / h + v * x / w))
            out[u, v] = acc
    return out


def brute_conv2(plane: np.ndarray, kernel: np.ndarray, boundary: str) -> np.ndarray:
    """Direct spatial convolution with a centered kernel, per output pixel."""
    h, w = plane.shape
    kh, kw = kernel.shape
    cr, cc = kh // 2, kw // 2
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for i in range(kh):
                for j in range(kw):
                    sy = y - (i - cr)
                    sx = x - (j - cc)
                    if boundary == "wrap":
                        sy %= h
                        sx %= w
                    else:
                        sy = min(max(sy, 0), h - 1)
                        sx = min(max(sx, 0), w - 1)
                    acc += kernel[i, j] * plane[sy, sx]
            out[y, x] = acc
    return out


def brute_sobel_magnitude(plane: np.ndarray) -> np.ndarray:
    """Per-pixel 3x3 Sobel magnitude; border pixels carry zero gradient."""
    kx = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=float)
    ky = kx.T
    h, w = plane.shape
    out = np.zeros((h, w))
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            gx = gy = 0.0
            for i in range(3):
                for j in range(3):
                    gx += kx[i, j] * plane[y + i - 1, x + j - 1]
                    gy += ky[i, j] * plane[y + i - 1, x + j - 1]
            out[y, x] = np.hypot(gx, gy)
    return out


def rotate_coordinate(
    col: float, row: float, angle_deg: float, center_col: float, center_row: float
) -> tuple[float, float]:
    """Forward map of one source coordinate under the library's rotation
    convention (positive angle anti-clockwise on screen, y down)."""
    a = np.deg2rad(angle_deg)
    x = col - center_col
    y = row - center_row
    return (
        center_col + x * np.cos(a) + y * np.sin(a),
        center_row - x * np.sin(a) + y * np.cos(a),
    )


def principal_axis_deg(plane: np.ndarray) -> float:
    """Orientation of a weight plane's principal axis via second moments."""
    rows, cols = np.nonzero(plane > 0)
    w = plane[rows, cols]
    cr = (plane.shape[0] - 1) / 2.0
    cc = (plane.shape[1] - 1) / 2.0
    y = rows - cr
    x = cols - cc
    cov = np.array(
        [
            [np.sum(w * x * x), np.sum(w * x * y)],
            [np.sum(w * x * y), np.sum(w * y * y)],
        ]
    )
    vals, vecs = np.linalg.eigh(cov)
    v = vecs[:, int(np.argmax(vals))]
    return float(np.degrees(np.arctan2(v[1], v[0])) % 180.0)
