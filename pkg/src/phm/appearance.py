"""Low-quality regime: appearance degradation from graph smoothness and SGWT.

Geometry degradation compares per-axis coordinate smoothness between the
two sides of each patch pair; texture degradation compares weighted
co-occurrence matrices of spectral graph wavelet sub-bands of luminance.
Each side keeps its own graph, spectrum and filter bank.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePatch, EmptyWCM, NoValidPatches, ShapeError
from .patches import (
    PatchGraph,
    PatchPair,
    Spectrum,
    SubCloud,
    PATCH_POINT_CAP,
    build_patch_graph,
    cap_subcloud,
    eigendecompose,
)

DEFAULT_STABILIZER = 1e-6
DEFAULT_NUM_BANDPASS = 3
DEFAULT_NUM_BINS = 50
# Scaling-function support relative to the spectrum: lambda_min = lambda_max / 20.
SCALE_SPAN = 20.0


def graph_smoothness(graph: PatchGraph, signal: np.ndarray) -> float:
    """Quadratic-form smoothness f^T L f via the stabler edge-sum form."""
    f = np.asarray(signal, dtype=np.float64)
    if f.shape != (graph.n,):
        raise ShapeError(f"signal length {f.shape} does not match n={graph.n}")
    d = f[graph.edges_i] - f[graph.edges_j]
    return float(graph.weights @ (d * d))


@dataclass(frozen=True)
class PreparedSide:
    """One side of a patch pair, capped and with its graph built."""

    graph: PatchGraph
    positions: np.ndarray
    luminance: np.ndarray
    capped: bool


def _prepare_side(sub: SubCloud, k2: int, cap: int) -> PreparedSide | None:
    capped_sub, capped = cap_subcloud(sub, cap)
    try:
        graph = build_patch_graph(capped_sub.positions, k2)
    except DegeneratePatch:
        return None
    return PreparedSide(graph, capped_sub.positions, capped_sub.luminance, capped)


def prepare_pairs(
    pairs: list[PatchPair],
    k2: int,
    cap: int = PATCH_POINT_CAP,
) -> list[tuple[PreparedSide | None, PreparedSide | None]]:
    """Build both graphs per pair; a side that cannot support one is None."""
    return [
        (_prepare_side(p.ref_points, k2, cap), _prepare_side(p.dist_points, k2, cap))
        for p in pairs
    ]


def _smoothness_similarity(sx: float, sy: float, t: float) -> float:
    return (2.0 * sx * sy + t) / (sx * sx + sy * sy + t)


def geometry_degradation(
    pairs: list[PatchPair],
    k2: int = 10,
    stabilizer: float = DEFAULT_STABILIZER,
    prepared: list[tuple[PreparedSide | None, PreparedSide | None]] | None = None,
) -> tuple[list[tuple[float, float, float] | None], float]:
    """Per-patch smoothness similarity over x/y/z and its global mean.

    Smoothness of each coordinate channel is computed on each side's own
    graph and normalized by that side's point count. Pairs with a
    degenerate side are excluded from the mean (None in the per-patch
    list). Raises NoValidPatches when nothing survives.
    """
    if prepared is None:
        prepared = prepare_pairs(pairs, k2)
    per_patch: list[tuple[float, float, float] | None] = []
    values: list[float] = []
    for px, py in prepared:
        if px is None or py is None:
            per_patch.append(None)
            continue
        fs = []
        for axis in range(3):
            sx = graph_smoothness(px.graph, px.positions[:, axis]) / px.graph.n
            sy = graph_smoothness(py.graph, py.positions[:, axis]) / py.graph.n
            fs.append(_smoothness_similarity(sx, sy, stabilizer))
        per_patch.append(tuple(fs))
        values.extend(fs)
    if not values:
        raise NoValidPatches("every patch pair was degenerate")
    return per_patch, float(np.mean(values))


@dataclass(frozen=True)
class FilterBank:
    """SGWT kernel: one low-pass scaling function and C band-pass scales."""

    scales: np.ndarray  # (C,) ascending, 2/lambda_max .. 2/lambda_min
    gamma: float  # scaling-function amplitude, max of g
    lambda_min: float
    lambda_max: float
    num_bandpass: int
    continuous_tail: bool = True

    def g(self, lam: np.ndarray | float) -> np.ndarray | float:
        """Band-pass kernel: lam^2 below 1, cubic on [1, 2], decaying tail."""
        arr = np.atleast_1d(np.asarray(lam, dtype=np.float64))
        tail_scale = 4.0 if self.continuous_tail else 1.0
        out = np.empty_like(arr)
        low = arr < 1.0
        high = arr > 2.0
        mid = ~(low | high)
        out[low] = arr[low] ** 2
        lm = arr[mid]
        out[mid] = ((lm - 6.0) * lm + 11.0) * lm - 5.0
        out[high] = tail_scale / (arr[high] ** 2)
        return float(out[0]) if np.isscalar(lam) or np.ndim(lam) == 0 else out

    def h(self, lam: np.ndarray | float) -> np.ndarray | float:
        """Low-pass kernel gamma * exp(-(lam / (0.6 lambda_min))^4)."""
        arr = np.asarray(lam, dtype=np.float64)
        out = self.gamma * np.exp(-((arr / (0.6 * self.lambda_min)) ** 4))
        return float(out) if out.ndim == 0 else out


# The cubic's maximum sits at the root of 3 lam^2 - 12 lam + 11 inside [1, 2].
_GAMMA_ARG = 2.0 - 1.0 / math.sqrt(3.0)


def make_filter_bank(
    lambda_max: float,
    num_bandpass: int = DEFAULT_NUM_BANDPASS,
    continuous_tail: bool = True,
) -> FilterBank:
    """Bank with log-equispaced scales between 2/lambda_max and 2/lambda_min."""
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    if num_bandpass < 1:
        raise ValueError("need at least one band-pass filter")
    lambda_min = lambda_max / SCALE_SPAN
    scales = np.geomspace(2.0 / lambda_max, 2.0 / lambda_min, num_bandpass)
    gamma = ((_GAMMA_ARG - 6.0) * _GAMMA_ARG + 11.0) * _GAMMA_ARG - 5.0
    return FilterBank(scales, float(gamma), lambda_min, lambda_max, num_bandpass, continuous_tail)


@dataclass(frozen=True)
class WaveletSubbands:
    """Row 0: scaling (low-pass) band; rows 1..C: band-pass bands."""

    coeffs: np.ndarray  # (C + 1, n)

    @property
    def num_bands(self) -> int:
        return len(self.coeffs)


def sgwt_decompose(spectrum: Spectrum, signal: np.ndarray, bank: FilterBank) -> WaveletSubbands:
    """Filter the signal through the bank in the spectral domain."""
    u = np.asarray(signal, dtype=np.float64)
    if u.shape != (spectrum.n,):
        raise ShapeError(f"signal length {u.shape} does not match n={spectrum.n}")
    vec = spectrum.eigenvectors
    lam = spectrum.eigenvalues
    uhat = vec.T @ u
    out = np.empty((bank.num_bandpass + 1, spectrum.n))
    out[0] = vec @ (bank.h(lam) * uhat)
    for c, t in enumerate(bank.scales, start=1):
        out[c] = vec @ (bank.g(t * lam) * uhat)
    return WaveletSubbands(out)


@dataclass(frozen=True)
class WCM:
    """Normalized weighted co-occurrence matrix (symmetric, unit mass)."""

    matrix: np.ndarray  # (Nb, Nb)


def build_wcm(
    graph: PatchGraph,
    band: np.ndarray,
    partner_band: np.ndarray,
    num_bins: int = DEFAULT_NUM_BINS,
) -> tuple[WCM, np.ndarray]:
    """WCM of ``band`` on ``graph``, quantized over the shared range.

    The bin range covers the concatenation of band and partner_band so the
    two sides of a pair are histogrammed identically. Each undirected edge
    adds its weight at (m, n) and, when m != n, at (n, m); the matrix is
    then normalized to unit mass.
    """
    if num_bins < 2:
        raise ValueError("num_bins must be >= 2")
    if graph.num_edges == 0:
        raise EmptyWCM("graph has no edges to accumulate")
    band = np.asarray(band, dtype=np.float64)
    if band.shape != (graph.n,):
        raise ShapeError(f"band length {band.shape} does not match n={graph.n}")
    lo = min(band.min(), partner_band.min())
    hi = max(band.max(), partner_band.max())
    if hi > lo:
        bins = np.clip(((band - lo) / (hi - lo) * num_bins).astype(np.intp), 0, num_bins - 1)
    else:
        bins = np.zeros(graph.n, dtype=np.intp)
    m, n = bins[graph.edges_i], bins[graph.edges_j]
    size = num_bins * num_bins
    acc = np.bincount(m * num_bins + n, weights=graph.weights, minlength=size)
    off = m != n
    acc += np.bincount(n[off] * num_bins + m[off], weights=graph.weights[off], minlength=size)
    mat = acc.reshape(num_bins, num_bins)
    mat = mat / mat.sum()
    return WCM(mat), np.linspace(lo, hi, num_bins + 1)


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation of two flattened matrices with zero-variance guards.

    Both constant: 1 if equal, else 0. Exactly one constant: 0. Identical
    inputs yield exactly 1.0 (sqrt of a squared norm is exact).
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    ac = a - a.mean()
    bc = b - b.mean()
    na = ac @ ac
    nb = bc @ bc
    if na == 0.0 and nb == 0.0:
        return 1.0 if np.array_equal(a, b) else 0.0
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float((ac @ bc) / np.sqrt(na * nb))


def texture_degradation(
    pairs: list[PatchPair],
    prepared: list[tuple[PreparedSide | None, PreparedSide | None]],
    num_bandpass: int = DEFAULT_NUM_BANDPASS,
    num_bins: int = DEFAULT_NUM_BINS,
    continuous_tail: bool = True,
) -> tuple[list[list[float | None] | None], float]:
    """Per-(patch, band) WCM correlation of luminance sub-bands and its mean.

    Luminance is decomposed on each side's own spectrum with its own filter
    bank; each band pair shares one quantization range. Degenerate pairs
    contribute None rows; cells whose WCM cannot be built are None and are
    left out of the mean.
    """
    per_patch: list[list[float | None] | None] = []
    values: list[float] = []
    for (px, py) in prepared:
        if px is None or py is None:
            per_patch.append(None)
            continue
        spec_x = eigendecompose(px.graph)
        spec_y = eigendecompose(py.graph)
        bank_x = make_filter_bank(spec_x.lambda_max, num_bandpass, continuous_tail)
        bank_y = make_filter_bank(spec_y.lambda_max, num_bandpass, continuous_tail)
        sub_x = sgwt_decompose(spec_x, px.luminance, bank_x)
        sub_y = sgwt_decompose(spec_y, py.luminance, bank_y)
        row: list[float | None] = []
        for c in range(num_bandpass + 1):
            try:
                wcm_x, _ = build_wcm(px.graph, sub_x.coeffs[c], sub_y.coeffs[c], num_bins)
                wcm_y, _ = build_wcm(py.graph, sub_y.coeffs[c], sub_x.coeffs[c], num_bins)
            except EmptyWCM:
                row.append(None)
                continue
            fw = _pearson(wcm_x.matrix, wcm_y.matrix)
            row.append(fw)
            values.append(fw)
        per_patch.append(row)
    if not values:
        raise NoValidPatches("no (patch, band) cell produced a co-occurrence pair")
    return per_patch, float(np.mean(values))


def fuse_appearance(d_l_o: float, d_l_i: float, mode: str = "multiply") -> float:
    """Combine geometry and texture degradation into D_L.

    multiply: sqrt(d_l_o * max(d_l_i, 0)) keeps the power at one; average
    is the arithmetic-mean variant. Negative texture correlation is
    clamped so the square root stays real.
    """
    if mode == "multiply":
        return math.sqrt(d_l_o * max(d_l_i, 0.0))
    if mode == "average":
        return (d_l_o + d_l_i) / 2.0
    raise ValueError(f"unknown fusion mode {mode!r}")
