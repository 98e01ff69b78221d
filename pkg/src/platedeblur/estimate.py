"""Blind estimation of the motion kernel's angle and length.

Angle: the blurred channel's cepstrum carries a linear feature through the
quefrency origin along the motion direction. After fftshift centers that
origin, a Hough transform over the cepstrum's edge map finds the feature;
votes are binned over (rho, theta) and the strongest cell's theta is the
kernel angle.

Length: the shifted cepstrum is rotated anti-clockwise by the estimated
angle so the feature lies horizontal, columns are collapsed to their
means, and the most negative entry within the admissible offset range
from the center column marks the kernel length.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .image import Image, edge_map, rotate_plane
from .spectral import DEFAULT_CEPSTRUM_FLOOR, cepstrum, fftshift
from .synth import KernelParams

LENGTH_AGGREGATES = ("max", "min", "median")


class EstimationError(Exception):
    """Kernel estimation failed; `stage` names the failing pipeline stage."""

    stage = "estimation"


class NoBlurStructureError(EstimationError):
    stage = "angle"

    def __init__(self, detail: str = "") -> None:
        message = "no blur structure detected"
        super().__init__(message + (f" ({detail})" if detail else ""))


class NoLengthStructureError(EstimationError):
    stage = "length"

    def __init__(self, detail: str = "") -> None:
        message = "no length structure detected"
        super().__init__(message + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class EstimationConfig:
    """Tunable knobs of both estimation stages.

    Angle sweep defaults cover 40-140 degrees, the range where license
    plate motion blur normally falls; max_length 50 matches the largest
    kernels such images exhibit. The length search starts at min_length
    because the first few cepstral columns sit inside the origin peak.

    edge_threshold defaults to 0.05: the cepstral origin peak carries
    gradients an order of magnitude above the blur harmonics, so a high
    threshold leaves nothing but that peak in the edge map and starves
    the Hough vote. 0.05 keeps the harmonic spikes across plate imagery
    while staying above the diffuse background.
    """

    theta_min: float = 40.0
    theta_max: float = 140.0
    theta_step: float = 1.0
    max_length: int = 50
    min_length: int = 3
    edge_threshold: float = 0.05
    cepstrum_floor: float = DEFAULT_CEPSTRUM_FLOOR
    rho_resolution: float = 1.0
    angle_aggregate: str = "mean"
    length_aggregate: str = "max"

    def __post_init__(self) -> None:
        if not self.theta_min < self.theta_max:
            raise ValueError("theta_min must be below theta_max")
        if self.theta_step <= 0.0:
            raise ValueError("theta_step must be positive")
        if not 0 < self.min_length < self.max_length:
            raise ValueError("need 0 < min_length < max_length")
        if not 0.0 < self.edge_threshold <= 1.0:
            raise ValueError("edge_threshold must be in (0, 1]")
        if self.cepstrum_floor <= 0.0:
            raise ValueError("cepstrum_floor must be positive")
        if self.rho_resolution <= 0.0:
            raise ValueError("rho_resolution must be positive")
        if self.angle_aggregate != "mean":
            raise ValueError("angle_aggregate must be 'mean'")
        if self.length_aggregate not in LENGTH_AGGREGATES:
            raise ValueError(f"length_aggregate must be one of {LENGTH_AGGREGATES}")

    @property
    def thetas(self) -> np.ndarray:
        """Swept theta values in degrees, inclusive of both endpoints."""
        count = int(math.floor((self.theta_max - self.theta_min) / self.theta_step + 1e-9)) + 1
        return self.theta_min + self.theta_step * np.arange(count)


@dataclass(frozen=True, eq=False)
class HoughAccumulator:
    """Vote counts over (rho bin, theta bin) parameter space."""

    counts: np.ndarray
    rho_resolution: float
    theta_min: float
    theta_max: float
    theta_step: float

    @property
    def thetas(self) -> np.ndarray:
        return self.theta_min + self.theta_step * np.arange(self.counts.shape[1])

    @property
    def rho_offsets(self) -> np.ndarray:
        """Signed rho value of each bin center, in pixels."""
        n_rho = self.counts.shape[0]
        half = n_rho // 2
        return (np.arange(n_rho) - half) * self.rho_resolution

    def peak(self) -> tuple[float, float]:
        """(theta, rho) of the maximal cell.

        Ties break to the smallest theta, then the smallest |rho|, then
        negative rho before positive, so the result is deterministic.
        """
        best = self.counts.max()
        if best == 0:
            raise ValueError("empty accumulator has no peak")
        rho_idx, theta_idx = np.nonzero(self.counts == best)
        rho_vals = self.rho_offsets[rho_idx]
        order = np.lexsort((rho_vals, np.abs(rho_vals), theta_idx))
        pick = order[0]
        return float(self.thetas[theta_idx[pick]]), float(rho_vals[pick])


def hough_accumulate(edges: np.ndarray, cfg: EstimationConfig) -> HoughAccumulator:
    """Vote every edge pixel into (rho, theta) cells.

    Coordinates are taken relative to the plane center as (upward offset,
    rightward offset), i.e. x_p = cy - row and y_p = col - cx. Under this
    frame a centered streak rendered at kernel angle theta (see synth)
    satisfies rho = x_p cos(theta) + y_p sin(theta) = 0 exactly at that
    theta, so the accumulator's angle axis reads out the kernel angle with
    no conversion. rho is quantized by rounding v / rho_resolution; every
    edge point lands in exactly one rho bin per theta, which pins the
    total count at n_points * n_thetas.
    """
    edges = np.asarray(edges, dtype=bool)
    if edges.ndim != 2:
        raise ValueError("edge map must be 2-D")
    h, w = edges.shape
    cy, cx = h // 2, w // 2

    thetas = cfg.thetas
    rads = np.deg2rad(thetas)
    half_diag = math.hypot(max(cy, h - 1 - cy), max(cx, w - 1 - cx))
    n_half = int(math.ceil(half_diag / cfg.rho_resolution))
    n_rho = 2 * n_half + 1
    counts = np.zeros((n_rho, thetas.size), dtype=np.int64)

    rows, cols = np.nonzero(edges)
    if rows.size:
        x_p = (cy - rows).astype(np.float64)
        y_p = (cols - cx).astype(np.float64)
        v = np.outer(x_p, np.cos(rads)) + np.outer(y_p, np.sin(rads))
        rho_idx = np.rint(v / cfg.rho_resolution).astype(np.int64) + n_half
        theta_idx = np.broadcast_to(np.arange(thetas.size), rho_idx.shape)
        np.add.at(counts, (rho_idx.ravel(), theta_idx.ravel()), 1)
    return HoughAccumulator(
        counts=counts,
        rho_resolution=cfg.rho_resolution,
        theta_min=cfg.theta_min,
        theta_max=cfg.theta_max,
        theta_step=cfg.theta_step,
    )


def estimate_angle_channel(
    plane: np.ndarray, cfg: EstimationConfig = EstimationConfig()
) -> float:
    """Kernel angle of one channel: cepstrum, fftshift, edge map, Hough."""
    plane = np.asarray(plane, dtype=np.float64)
    if np.ptp(plane) == 0.0:
        raise NoBlurStructureError("constant channel")
    shifted = fftshift(cepstrum(plane, cfg.cepstrum_floor))
    edges = edge_map(shifted, cfg.edge_threshold)
    if not edges.any():
        raise NoBlurStructureError("empty cepstral edge map")
    theta, _rho = hough_accumulate(edges, cfg).peak()
    return theta


def _per_channel(img: Image, estimator, what: str) -> list:
    """Run a channel estimator over every plane.

    Successes are returned; partial failures emit a warning; if every
    channel fails, the first failure propagates.
    """
    estimates, failures = [], []
    for plane in img.planes:
        try:
            estimates.append(estimator(plane))
        except EstimationError as exc:
            failures.append(exc)
    if not estimates:
        raise failures[0]
    if failures:
        warnings.warn(
            f"{what} estimation failed on {len(failures)} of {img.channels} channels",
            stacklevel=3,
        )
    return estimates


def estimate_angle_per_channel(
    img: Image, cfg: EstimationConfig = EstimationConfig()
) -> list[float]:
    return _per_channel(img, lambda p: estimate_angle_channel(p, cfg), "angle")


def estimate_angle(img: Image, cfg: EstimationConfig = EstimationConfig()) -> float:
    """Mean of the per-channel angle estimates.

    Single-channel images return the channel estimate unchanged.
    """
    return float(np.mean(estimate_angle_per_channel(img, cfg)))


def collapse_columns(plane: np.ndarray) -> np.ndarray:
    """Mean of each column; output length equals the plane width."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError("expected a 2-D plane")
    return plane.mean(axis=0)


def estimate_length_channel(
    plane: np.ndarray, angle: float, cfg: EstimationConfig = EstimationConfig()
) -> int:
    """Kernel length of one channel from the rotated cepstrum.

    The shifted cepstrum is rotated anti-clockwise by `angle` so the blur
    feature lies along the center row, then collapsed to column means.
    The search runs over horizontal offsets d in [min_length, max_length]
    from the center column and returns the d with the smallest (most
    negative) collapsed value.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if not math.isfinite(angle):
        raise ValueError("angle must be finite")
    if np.ptp(plane) == 0.0:
        raise NoLengthStructureError("constant channel")
    w = plane.shape[1]
    center = w // 2
    if cfg.max_length > w - 1 - center:
        raise ValueError(
            f"max_length {cfg.max_length} exceeds half the plane width ({w})"
        )
    shifted = fftshift(cepstrum(plane, cfg.cepstrum_floor))
    rotated = rotate_plane(shifted, angle, "bilinear")
    profile = collapse_columns(rotated)
    window = profile[center + cfg.min_length : center + cfg.max_length + 1]
    if np.ptp(window) <= 1e-12 * max(1.0, float(np.abs(window).max())):
        raise NoLengthStructureError("flat collapsed profile")
    return cfg.min_length + int(np.argmin(window))


def aggregate_lengths(lengths: list[int], rule: str) -> int:
    if rule == "max":
        return max(lengths)
    if rule == "min":
        return min(lengths)
    if rule == "median":
        return int(round(float(np.median(lengths))))
    raise ValueError(f"unknown length aggregate {rule!r}")


def estimate_length_per_channel(
    img: Image, angle: float, cfg: EstimationConfig = EstimationConfig()
) -> list[int]:
    return _per_channel(img, lambda p: estimate_length_channel(p, angle, cfg), "length")


def estimate_length(
    img: Image, angle: float, cfg: EstimationConfig = EstimationConfig()
) -> int:
    """Aggregate of the per-channel length estimates (cfg.length_aggregate)."""
    return aggregate_lengths(
        estimate_length_per_channel(img, angle, cfg), cfg.length_aggregate
    )


def estimate_kernel(
    img: Image, cfg: EstimationConfig = EstimationConfig()
) -> KernelParams:
    """Full blind estimate: angle first, then length given that angle."""
    angle = estimate_angle(img, cfg)
    length = estimate_length(img, angle, cfg)
    return KernelParams(angle=angle, length=length)
