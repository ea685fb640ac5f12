"""Seeded synthetic clouds and distortions for experiments and tests."""

from __future__ import annotations

import numpy as np

from .cloud import PointCloud, SpatialIndex


def synthetic_cloud(n: int, seed: int, extent: float = 100.0, texture: float = 1.0) -> PointCloud:
    """Random cloud in a cube with structured luminance.

    Colors follow a handful of low-frequency cosine fields of position plus
    per-point texture noise scaled by ``texture``, so the cloud has both
    smooth shading and fine detail.
    """
    rng = np.random.default_rng(seed)
    pos = rng.uniform(0.0, extent, size=(n, 3))
    base = np.full(n, 128.0)
    for _ in range(4):
        freq = rng.uniform(0.02, 0.12, size=3)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(15.0, 40.0)
        base += amp * np.cos(pos @ freq + phase)
    base += texture * rng.normal(0.0, 12.0, size=n)
    chan_shift = rng.normal(0.0, 10.0, size=(n, 3))
    colors = np.clip(np.round(base[:, None] + chan_shift), 0, 255).astype(np.uint8)
    return PointCloud.from_arrays(pos, colors)


def mean_nn_spacing(cloud: PointCloud) -> float:
    """Mean distance from each point to its nearest other point."""
    index = SpatialIndex(cloud.positions)
    nn = index.query_bulk(cloud.positions, 1, exclude_self=True)[:, 0]
    d = cloud.positions - cloud.positions[nn]
    return float(np.mean(np.sqrt((d * d).sum(axis=1))))


def with_luminance_noise(cloud: PointCloud, sigma: float, seed: int) -> PointCloud:
    """Add one Gaussian offset per point to all three channels (+clip/round).

    A shared per-point offset moves luminance by exactly that offset (the
    luma weights sum to 1) up to 8-bit clipping.
    """
    rng = np.random.default_rng(seed)
    delta = rng.normal(0.0, sigma, size=len(cloud))
    colors = np.clip(np.round(cloud.colors.astype(np.float64) + delta[:, None]), 0, 255)
    return PointCloud.from_arrays(cloud.positions.copy(), colors.astype(np.uint8))


def with_geometry_jitter(cloud: PointCloud, sigma_units: float, seed: int,
                         spacing: float | None = None) -> PointCloud:
    """Jitter positions with per-axis Gaussian noise of sigma_units * mean NN spacing."""
    rng = np.random.default_rng(seed)
    s = spacing if spacing is not None else mean_nn_spacing(cloud)
    jitter = rng.normal(0.0, sigma_units * s, size=cloud.positions.shape)
    return PointCloud.from_arrays(cloud.positions + jitter, cloud.colors.copy())
