"""Image container, PNG/PGM file I/O, rotation, and Sobel edge maps.

Raster convention used throughout the package: x is the column index and
y is the row index, with y increasing downward. Samples are real-valued
floats; loaded images live in [0, 1] and quantization to 8 bits happens
only when saving.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage

SUPPORTED_EXTENSIONS = (".png", ".pgm")


@dataclass(frozen=True, eq=False)
class Image:
    """Planar multi-channel raster, shape (channels, height, width), float64.

    Immutable after construction: the backing array is copied and marked
    read-only, so instances are safe to share across threads.
    """

    planes: np.ndarray

    def __post_init__(self) -> None:
        planes = np.array(self.planes, dtype=np.float64)
        if planes.ndim != 3:
            raise ValueError("planes must have shape (channels, height, width)")
        channels, height, width = planes.shape
        if channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {channels}")
        if height < 1 or width < 1:
            raise ValueError("zero-dimension raster")
        if not np.all(np.isfinite(planes)):
            raise ValueError("image samples must be finite")
        planes.setflags(write=False)
        object.__setattr__(self, "planes", planes)

    @classmethod
    def from_plane(cls, plane: np.ndarray) -> "Image":
        """Wrap a single 2-D plane as a 1-channel Image."""
        plane = np.asarray(plane, dtype=np.float64)
        if plane.ndim != 2:
            raise ValueError("expected a 2-D plane")
        return cls(plane[np.newaxis, :, :])

    @property
    def channels(self) -> int:
        return self.planes.shape[0]

    @property
    def height(self) -> int:
        return self.planes.shape[1]

    @property
    def width(self) -> int:
        return self.planes.shape[2]

    @property
    def plane(self) -> np.ndarray:
        """The sole plane of a single-channel image."""
        if self.channels != 1:
            raise ValueError("image has more than one channel")
        return self.planes[0]


def _check_extension(path: str) -> str:
    ext = os.path.splitext(path)[1].lower()
    if ext not in SUPPORTED_EXTENSIONS:
        raise ValueError(f"unsupported format {ext!r} (supported: .png, .pgm)")
    return ext


def load_image(path: str) -> Image:
    """Load a PNG or binary PGM file, scaling 8-bit values v to v/255."""
    ext = _check_extension(path)
    if not os.path.isfile(path):
        raise FileNotFoundError(f"file not found: {path}")
    if ext == ".pgm":
        arr = _read_pgm(path)
        return Image(arr[np.newaxis].astype(np.float64) / 255.0)

    with PILImage.open(path) as pil:
        if pil.mode == "L":
            pass
        elif pil.mode in ("1", "LA"):
            pil = pil.convert("L")
        elif pil.mode == "RGB":
            pass
        elif pil.mode in ("RGBA", "P"):
            pil = pil.convert("RGB")
        else:
            raise ValueError(f"unsupported PNG mode {pil.mode!r}")
        arr = np.asarray(pil, dtype=np.float64) / 255.0
    if arr.size == 0:
        raise ValueError("zero-dimension raster")
    if arr.ndim == 2:
        return Image(arr[np.newaxis])
    return Image(np.moveaxis(arr, 2, 0))


def save_image(img: Image, path: str) -> None:
    """Write an image, clamping to [0, 1] and quantizing to 8 bits.

    The format is chosen by the path extension; PGM accepts only
    single-channel images.
    """
    ext = _check_extension(path)
    data = quantize(img.planes)
    if ext == ".pgm":
        if img.channels != 1:
            raise ValueError("PGM supports single-channel images only")
        _write_pgm(path, data[0])
        return
    if img.channels == 1:
        pil = PILImage.fromarray(data[0], mode="L")
    else:
        pil = PILImage.fromarray(np.moveaxis(data, 0, 2), mode="RGB")
    pil.save(path, format="PNG")


def quantize(planes: np.ndarray) -> np.ndarray:
    """Clamp samples to [0, 1] and round to uint8 levels."""
    clipped = np.clip(planes, 0.0, 1.0)
    return np.rint(clipped * 255.0).astype(np.uint8)


def _read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    # Header is ASCII tokens (magic, width, height, maxval); '#' starts a comment.
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4 and pos < len(data):
        match = re.compile(rb"\s*(#[^\n]*\n|\S+)").match(data, pos)
        if match is None:
            break
        pos = match.end()
        tok = match.group(1)
        if not tok.startswith(b"#"):
            tokens.append(tok)
    if len(tokens) < 4 or tokens[0] != b"P5":
        raise ValueError(f"not a binary PGM (P5) file: {path}")
    width, height, maxval = (int(t) for t in tokens[1:4])
    if width < 1 or height < 1:
        raise ValueError("zero-dimension raster")
    if maxval != 255:
        raise ValueError(f"unsupported PGM maxval {maxval} (only 8-bit supported)")
    pos += 1  # single whitespace byte separates the header from raster data
    raw = data[pos : pos + width * height]
    if len(raw) < width * height:
        raise ValueError(f"truncated PGM data in {path}")
    return np.frombuffer(raw, dtype=np.uint8).reshape(height, width)


def _write_pgm(path: str, plane: np.ndarray) -> None:
    height, width = plane.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (width, height))
        fh.write(plane.astype(np.uint8).tobytes())


def to_channels(img: Image) -> list[Image]:
    """Split into single-channel images; a 1-channel image returns itself."""
    if img.channels == 1:
        return [img]
    return [Image(img.planes[k : k + 1]) for k in range(img.channels)]


def rotate_plane(
    plane: np.ndarray, angle: float, interpolation: str = "bilinear"
) -> np.ndarray:
    """Rotate a 2-D plane about its center pixel, same-size output, zero fill.

    A positive angle turns the content anti-clockwise on screen (y grows
    downward): a bright pixel right of center moves above center under a
    90 degree rotation. The center pixel is (h // 2, w // 2); this is where
    fftshift parks the zero-frequency bin, so rotating a shifted cepstrum
    keeps its quefrency origin fixed.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError("expected a 2-D plane")
    if not np.isfinite(angle):
        raise ValueError("angle must be finite")
    if interpolation not in ("nearest", "bilinear"):
        raise ValueError(f"unknown interpolation {interpolation!r}")
    h, w = plane.shape
    cy, cx = h // 2, w // 2
    a = np.deg2rad(angle)
    cos_a, sin_a = np.cos(a), np.sin(a)

    rows, cols = np.indices((h, w), dtype=np.float64)
    x_off = cols - cx
    y_off = rows - cy
    # Inverse map: where each output pixel samples from in the source.
    src_x = cx + x_off * cos_a - y_off * sin_a
    src_y = cy + x_off * sin_a + y_off * cos_a

    if interpolation == "nearest":
        xi = np.rint(src_x).astype(np.int64)
        yi = np.rint(src_y).astype(np.int64)
        valid = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        out = np.zeros_like(plane)
        out[valid] = plane[yi[valid], xi[valid]]
        return out

    x0 = np.floor(src_x)
    y0 = np.floor(src_y)
    fx = src_x - x0
    fy = src_y - y0
    x0 = x0.astype(np.int64)
    y0 = y0.astype(np.int64)

    def gather(yi: np.ndarray, xi: np.ndarray) -> np.ndarray:
        valid = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        vals = plane[np.clip(yi, 0, h - 1), np.clip(xi, 0, w - 1)]
        return np.where(valid, vals, 0.0)

    return (
        (1.0 - fy) * (1.0 - fx) * gather(y0, x0)
        + (1.0 - fy) * fx * gather(y0, x0 + 1)
        + fy * (1.0 - fx) * gather(y0 + 1, x0)
        + fy * fx * gather(y0 + 1, x0 + 1)
    )


def rotate(img: Image, angle: float, interpolation: str = "bilinear") -> Image:
    """Rotate every channel of an image (see rotate_plane for geometry)."""
    return Image(
        np.stack([rotate_plane(p, angle, interpolation) for p in img.planes])
    )


def edge_map(plane: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """Boolean edge map: Sobel gradient magnitude >= threshold * max magnitude.

    A constant plane yields an all-false map; the comparison is >=, so
    threshold 1.0 keeps the maximal pixels.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError("edge_map expects a single-channel plane")
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    mag = gradient_magnitude(plane)
    peak = mag.max()
    if peak == 0.0:
        return np.zeros(plane.shape, dtype=bool)
    return mag >= threshold * peak


def gradient_magnitude(plane: np.ndarray) -> np.ndarray:
    """3x3 Sobel gradient magnitude.

    Only full 3x3 neighborhoods are evaluated; the one-pixel border ring
    carries zero gradient. Padding the input instead would manufacture
    edges along the borders of any non-zero constant region.
    """
    h, w = plane.shape
    out = np.zeros((h, w))
    if h < 3 or w < 3:
        return out
    ih, iw = h - 2, w - 2

    def win(i: int, j: int) -> np.ndarray:
        return plane[i : i + ih, j : j + iw]

    # Paired differences cancel exactly on constant regions, which keeps
    # the edge map of a flat plane empty instead of thresholding rounding
    # residue.
    gx = (win(0, 2) - win(0, 0)) + 2.0 * (win(1, 2) - win(1, 0)) + (win(2, 2) - win(2, 0))
    gy = (win(2, 0) - win(0, 0)) + 2.0 * (win(2, 1) - win(0, 1)) + (win(2, 2) - win(0, 2))
    out[1:-1, 1:-1] = np.hypot(gx, gy)
    return out
