"""High-quality regime: symmetric luminance PSNR, AR texture complexity, D_H.

The visible-difference score compensates the symmetric luminance PSNR with
the texture complexity of the reference: complex textures mask distortion,
so the same PSNR reads as higher quality on a busier reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud, SpatialIndex
from .errors import CloudTooSmall

PEAK = 255.0
# Normalizer assumes per-point MSE >= 1 and mean |residual| < 2^8.
RESIDUAL_SPAN_BITS = 8.0
DEFAULT_ALPHA = 4.5
DEFAULT_AR_ORDER = 20


@dataclass(frozen=True)
class ARSolution:
    """Global least-squares auto-regression of luminance on K1 neighbors."""

    theta: np.ndarray  # (K1,)
    residuals: np.ndarray  # (N,)


@dataclass(frozen=True)
class VisibleDifference:
    psnr_y: float | None  # dB; None when the perfect marker is set
    perfect: bool  # symmetric MSE fell below the unity floor
    raw_mse: float  # max of the two directed MSEs, for diagnostics
    complexity: float  # C(X) >= 0
    d_h: float  # in (0, 1]


def _directed_mse(src: PointCloud, dst: PointCloud, dst_index: SpatialIndex) -> float:
    nn = dst_index.query_bulk(src.positions, 1)[:, 0]
    diff = src.luminance - dst.luminance[nn]
    return float(np.mean(diff * diff))


def symmetric_mse(ref: PointCloud, dist: PointCloud) -> float:
    """max of the two directed mean squared luminance errors under exact NN matching."""
    ref_idx = SpatialIndex(ref.positions)
    dist_idx = SpatialIndex(dist.positions)
    return max(_directed_mse(ref, dist, dist_idx), _directed_mse(dist, ref, ref_idx))


def symmetric_luminance_psnr(ref: PointCloud, dist: PointCloud) -> tuple[float | None, bool]:
    """(PSNR_Y in dB, perfect flag); PSNR is None when MSE < 1 (perfect)."""
    d = symmetric_mse(ref, dist)
    if d < 1.0:
        return None, True
    return 10.0 * math.log10(PEAK * PEAK / d), False


def ar_texture_complexity(ref: PointCloud, k1: int = DEFAULT_AR_ORDER) -> tuple[ARSolution, float]:
    """Fit one global AR model of luminance on the K1-NN neighborhood.

    Design matrix row i holds the luminances of the K1 nearest neighbors of
    point i (self excluded). Solved as a single minimum-norm least-squares
    problem; complexity is log2(1 + mean |residual|).
    """
    n = len(ref)
    if n <= k1:
        raise CloudTooSmall(f"AR of order {k1} needs more than {k1} points, got {n}")
    index = SpatialIndex(ref.positions)
    nbrs = index.query_bulk(ref.positions, k1, exclude_self=True)
    design = ref.luminance[nbrs]
    theta, *_ = np.linalg.lstsq(design, ref.luminance, rcond=None)
    residuals = ref.luminance - design @ theta
    complexity = math.log2(1.0 + float(np.mean(np.abs(residuals))))
    return ARSolution(theta, residuals), complexity


def upsilon(alpha: float) -> float:
    """Normalizer mapping compensated PSNR into (0, 1]."""
    return 10.0 * math.log10(PEAK * PEAK) + alpha * RESIDUAL_SPAN_BITS


def visible_difference(
    ref: PointCloud,
    dist: PointCloud,
    alpha: float = DEFAULT_ALPHA,
    k1: int = DEFAULT_AR_ORDER,
) -> VisibleDifference:
    """Masking-compensated visible difference D_H in (0, 1].

    d_h = (PSNR_Y + alpha * C(ref)) / upsilon, clamped to 1 when the raw
    value exceeds 1 or the symmetric MSE is below the unity floor.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    d = symmetric_mse(ref, dist)
    _, complexity = ar_texture_complexity(ref, k1)
    perfect = d < 1.0
    if perfect:
        return VisibleDifference(None, True, d, complexity, 1.0)
    psnr = 10.0 * math.log10(PEAK * PEAK / d)
    d_h = min((psnr + alpha * complexity) / upsilon(alpha), 1.0)
    return VisibleDifference(psnr, False, d, complexity, d_h)
