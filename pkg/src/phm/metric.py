"""End-to-end scoring: configuration, adaptive combination, QualityReport."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field, fields

from .appearance import (
    fuse_appearance,
    geometry_degradation,
    prepare_pairs,
    texture_degradation,
)
from .cloud import PointCloud
from .errors import CloudTooSmall, DomainError, NoValidPatches, ParseError
from .patches import partition_into_patch_pairs
from .visible import visible_difference

_FUSION_MODES = ("multiply", "average")


@dataclass
class MetricConfig:
    """All tunable knobs of the metric with their default operating points."""

    alpha: float = 4.5  # masking compensation strength
    mu: float = 5.0  # adaptive-combination steepness
    k1: int = 20  # AR neighborhood size
    k2: int = 10  # patch-graph neighborhood size
    patch_divisor: int = 1000  # cells = max(1, N // patch_divisor)
    num_bandpass: int = 3  # band-pass filter count (sub-bands = C + 1)
    nb_bins: int = 50  # co-occurrence quantization bins
    stabilizer: float = 1e-6  # smoothness-similarity stabilizer T
    inner_fusion: str = "multiply"  # D_L^O with D_L^I
    outer_fusion: str = "multiply"  # D_H with D_L
    continuous_tail: bool = True  # 4/lam^2 band-pass tail (continuous at 2)

    def __post_init__(self):
        for name in ("alpha", "mu", "stabilizer"):
            if getattr(self, name) <= 0 and name != "alpha":
                raise ValueError(f"{name} must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        for name in ("k1", "k2", "patch_divisor"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.num_bandpass < 1:
            raise ValueError("num_bandpass must be >= 1")
        if self.nb_bins < 2:
            raise ValueError("nb_bins must be >= 2")
        for name in ("inner_fusion", "outer_fusion"):
            if getattr(self, name) not in _FUSION_MODES:
                raise ValueError(f"{name} must be one of {_FUSION_MODES}")

    @classmethod
    def from_dict(cls, data: dict) -> "MetricConfig":
        known = {f.name: f.type for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ParseError(f"unknown config keys: {unknown}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as e:
            raise ParseError(f"bad config value: {e}") from None

    @classmethod
    def from_file(cls, path) -> "MetricConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"config is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise ParseError("config document must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)


def combine_adaptive(
    d_h: float,
    d_l: float,
    mu: float = 5.0,
    outer: str = "multiply",
) -> tuple[float, float]:
    """(omega, score): blend D_H and D_L with weight omega = 1/(1 + mu D_H).

    Low D_H (visible damage) pushes weight onto the appearance term.
    Negative d_l is clamped to 0 so fractional powers stay real.
    """
    if d_h <= 0:
        raise DomainError("d_h must lie in (0, 1]")
    if mu <= 0:
        raise ValueError("mu must be positive")
    omega = 1.0 / (1.0 + mu * d_h)
    dl = max(d_l, 0.0)
    if outer == "multiply":
        score = d_h ** (1.0 - omega) * dl ** omega
    elif outer == "average":
        score = (d_h ** (1.0 - omega) + dl ** omega) / 2.0
    else:
        raise ValueError(f"unknown fusion mode {outer!r}")
    return omega, score


@dataclass
class QualityReport:
    """Final score plus every intermediate quantity and per-patch diagnostics."""

    d_h: float
    d_l_o: float | None
    d_l_i: float | None
    d_l: float | None
    omega: float | None
    score: float | None
    status: str = "ok"
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "d_h": self.d_h,
            "d_l_o": self.d_l_o,
            "d_l_i": self.d_l_i,
            "d_l": self.d_l,
            "omega": self.omega,
            "score": self.score,
            "status": self.status,
            "diagnostics": self.diagnostics,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def phm_score(ref: PointCloud, dist: PointCloud, config: MetricConfig | None = None) -> QualityReport:
    """Full pipeline: visible difference, appearance degradation, combination.

    Deterministic for fixed inputs and config. If every patch pair is
    degenerate the report carries status "no_valid_patches" and a None
    score instead of a fabricated value.
    """
    cfg = config if config is not None else MetricConfig()
    if len(ref) <= cfg.k1:
        raise CloudTooSmall(
            f"reference has {len(ref)} points; AR order {cfg.k1} needs more")
    timing: dict[str, float] = {}

    t0 = time.perf_counter()
    vd = visible_difference(ref, dist, cfg.alpha, cfg.k1)
    timing["visible_difference"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cells = max(1, len(ref) // cfg.patch_divisor)
    pairs = partition_into_patch_pairs(ref, dist, cells)
    prepared = prepare_pairs(pairs, cfg.k2)
    timing["partition_and_graphs"] = time.perf_counter() - t0

    per_patch = [
        {
            "cell_id": pair.cell_id,
            "n_ref": len(pair.ref_points),
            "n_dist": len(pair.dist_points),
            "degenerate": px is None or py is None,
            "capped": bool((px is not None and px.capped) or (py is not None and py.capped)),
            "f_s": None,
            "f_w": None,
        }
        for pair, (px, py) in zip(pairs, prepared)
    ]
    diagnostics = {
        "n_ref": len(ref),
        "n_dist": len(dist),
        "patch_count": len(pairs),
        "degenerate_patch_count": sum(1 for e in per_patch if e["degenerate"]),
        "capped_patch_count": sum(1 for e in per_patch if e["capped"]),
        "psnr_y": vd.psnr_y,
        "perfect": vd.perfect,
        "raw_mse": vd.raw_mse,
        "complexity": vd.complexity,
        "per_patch": per_patch,
        "timing": timing,
    }
    diagnostics["valid_patch_count"] = diagnostics["patch_count"] - diagnostics["degenerate_patch_count"]

    t0 = time.perf_counter()
    try:
        fs_rows, d_l_o = geometry_degradation(pairs, cfg.k2, cfg.stabilizer, prepared)
        timing["geometry_degradation"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        fw_rows, d_l_i = texture_degradation(
            pairs, prepared, cfg.num_bandpass, cfg.nb_bins, cfg.continuous_tail)
        timing["texture_degradation"] = time.perf_counter() - t0
    except NoValidPatches:
        return QualityReport(
            d_h=vd.d_h, d_l_o=None, d_l_i=None, d_l=None, omega=None, score=None,
            status="no_valid_patches", diagnostics=diagnostics)
    for entry, fs, fw in zip(per_patch, fs_rows, fw_rows):
        entry["f_s"] = list(fs) if fs is not None else None
        entry["f_w"] = fw

    d_l = fuse_appearance(d_l_o, d_l_i, cfg.inner_fusion)
    omega, score = combine_adaptive(vd.d_h, d_l, cfg.mu, cfg.outer_fusion)
    return QualityReport(
        d_h=vd.d_h, d_l_o=d_l_o, d_l_i=d_l_i, d_l=d_l, omega=omega, score=score,
        status="ok", diagnostics=diagnostics)
