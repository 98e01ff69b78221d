"""Ground-truth blur synthesis: linear motion PSFs, blurring, noise, plates.

Kernel angle convention: at angle theta the motion steps cos(theta)
columns rightward and sin(theta) rows downward per unit length, so
theta = 0 is horizontal motion and theta = 90 vertical. A streak drawn
this way sits at theta anti-clockwise from horizontal when the plane is
displayed with row 0 at the bottom. Angles are 180-degree periodic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import font
from .image import Image


@dataclass(frozen=True)
class KernelParams:
    """Motion-kernel parameters: angle in degrees, length in pixels."""

    angle: float
    length: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.angle):
            raise ValueError("angle must be finite")
        length = int(self.length)
        if length < 1:
            raise ValueError("length must be >= 1")
        # A line direction is 180-degree periodic; normalize to [0, 180).
        object.__setattr__(self, "angle", float(self.angle) % 180.0)
        object.__setattr__(self, "length", length)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white Gaussian noise: standard deviation and RNG seed."""

    sigma: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise ValueError("sigma must be a finite value >= 0")


@dataclass(frozen=True, eq=False)
class Psf:
    """Rasterized blur kernel plus the parameters that generated it."""

    plane: np.ndarray
    angle: float
    length: int

    def __post_init__(self) -> None:
        plane = np.array(self.plane, dtype=np.float64)
        if plane.ndim != 2 or plane.shape[0] % 2 == 0 or plane.shape[1] % 2 == 0:
            raise ValueError("psf plane must be 2-D with odd dimensions")
        if np.any(plane < 0.0):
            raise ValueError("psf weights must be non-negative")
        if abs(plane.sum() - 1.0) > 1e-12:
            raise ValueError("psf weights must sum to 1")
        plane.setflags(write=False)
        object.__setattr__(self, "plane", plane)


def identity_psf() -> Psf:
    return Psf(np.ones((1, 1)), angle=0.0, length=1)


def make_psf(params: KernelParams) -> Psf:
    """Rasterize a centered line segment of `length` pixels at `angle`.

    Each pixel the zero-width segment passes through receives weight
    proportional to the traversed sub-pixel length, then weights are
    normalized to sum to 1. Axis-aligned kernels come out exactly uniform
    (e.g. angle 0, length 5 gives a 1x5 row of 0.2 weights).
    """
    angle, length = params.angle, params.length
    rad = math.radians(angle)
    dx, dy = math.cos(rad), math.sin(rad)
    half = length / 2.0

    # Parameter t runs along the segment; cut it at every pixel-border
    # crossing (borders at half-integers, pixel centers at integers).
    cuts = [-half, half]
    for direction, speed in ((0, dx), (1, dy)):
        if abs(speed) < 1e-12:
            continue
        lo, hi = sorted((-half * speed, half * speed))
        k = math.floor(lo + 0.5)
        while k + 0.5 < hi:
            t = (k + 0.5) / speed
            if -half < t < half:
                cuts.append(t)
            k += 1
    cuts.sort()

    weights: dict[tuple[int, int], float] = {}
    for t0, t1 in zip(cuts, cuts[1:]):
        span = t1 - t0
        if span <= 0.0:
            continue
        tm = 0.5 * (t0 + t1)
        cell = (round(tm * dy), round(tm * dx))  # (row, col)
        weights[cell] = weights.get(cell, 0.0) + span

    max_row = max(abs(r) for r, _ in weights)
    max_col = max(abs(c) for _, c in weights)
    plane = np.zeros((2 * max_row + 1, 2 * max_col + 1))
    for (r, c), w in weights.items():
        plane[r + max_row, c + max_col] = w
    plane /= plane.sum()
    return Psf(plane, angle=angle, length=length)


def blur(img: Image, psf: Psf, boundary: str = "wrap") -> Image:
    """Convolve every channel with the psf under the chosen boundary rule.

    `wrap` gives exactly circular convolution, so dividing by the true
    OTF in the frequency domain inverts a noiseless blur exactly.
    `replicate` extends border samples instead.
    """
    if boundary not in ("wrap", "replicate"):
        raise ValueError(f"unknown boundary rule {boundary!r}")
    kh, kw = psf.plane.shape
    if kh >= img.height or kw >= img.width:
        raise ValueError("psf must be smaller than the image in both dimensions")
    cr, cc = kh // 2, kw // 2
    cells = [
        (i - cr, j - cc, psf.plane[i, j])
        for i in range(kh)
        for j in range(kw)
        if psf.plane[i, j] != 0.0
    ]

    out = np.zeros_like(img.planes)
    for k, channel in enumerate(img.planes):
        if boundary == "wrap":
            acc = np.zeros_like(channel)
            for di, dj, w in cells:
                acc += w * np.roll(channel, (di, dj), axis=(0, 1))
            out[k] = acc
        else:
            padded = np.pad(channel, ((cr, cr), (cc, cc)), mode="edge")
            h, w_ = channel.shape
            acc = np.zeros_like(channel)
            for di, dj, w in cells:
                acc += w * padded[cr - di : cr - di + h, cc - dj : cc - dj + w_]
            out[k] = acc
    return Image(out)


def add_noise(img: Image, spec: NoiseSpec) -> Image:
    """Add i.i.d. zero-mean Gaussian noise, reproducibly from the seed.

    Uses numpy's default_rng (PCG64) seeded with spec.seed, so the same
    seed always produces bit-identical output. Samples are not clamped;
    clamping is a save-time concern.
    """
    if spec.sigma == 0.0:
        return img
    rng = np.random.default_rng(spec.seed)
    noise = rng.normal(0.0, spec.sigma, size=img.planes.shape)
    return Image(img.planes + noise)


def render_plate(
    text: str, width: int, height: int, channels: int = 1
) -> Image:
    """Render dark glyphs on a light panel with the embedded 5x7 font.

    Deterministic: the same arguments always produce the same image. The
    text is centered and integer-upscaled to fill most of the panel while
    leaving a uniform margin. Only A-Z, 0-9, space, and hyphen render.
    """
    if not text:
        raise ValueError("text must be non-empty")
    if width < 32 or height < 16:
        raise ValueError("plate must be at least 32x16 pixels")
    if channels not in (1, 3):
        raise ValueError("channels must be 1 or 3")
    bitmap = font.render_text_bitmap(text)
    bh, bw = bitmap.shape

    max_w = int(width * 0.82)
    max_h = int(height * 0.82)
    scale = min(max_w // bw, max_h // bh)
    if scale < 1:
        raise ValueError(f"text {text!r} does not fit a {width}x{height} plate")
    scaled = np.kron(bitmap, np.ones((scale, scale), dtype=bool))

    background, ink = 0.92, 0.08
    plane = np.full((height, width), background)
    sh, sw = scaled.shape
    top = (height - sh) // 2
    left = (width - sw) // 2
    region = plane[top : top + sh, left : left + sw]
    region[scaled] = ink

    planes = np.repeat(plane[np.newaxis], channels, axis=0)
    return Image(planes)
