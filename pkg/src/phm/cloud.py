"""Point cloud data model, PLY ingestion and exact spatial queries.

Clouds carry positions, 8-bit RGB colors and a luminance channel derived
once from the colors (BT.709 weights). Nearest-neighbor queries are exact
and deterministic: results are ordered by nondecreasing Euclidean distance
with ties broken by lower point index.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ColorMissing, EmptyCloud, ParseError, TooManySeeds

# ITU-R BT.709 luma weights for 8-bit RGB.
LUMA_R, LUMA_G, LUMA_B = 0.2126, 0.7152, 0.0722


def rgb_to_luminance(rgb) -> np.ndarray | float:
    """Luminance in [0, 255] for an (R, G, B) triple or an (..., 3) array.

    Y = 0.2126 R + 0.7152 G + 0.0722 B, never rounded.
    """
    arr = np.asarray(rgb, dtype=np.float64)
    return arr[..., 0] * LUMA_R + arr[..., 1] * LUMA_G + arr[..., 2] * LUMA_B


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointCloud:
    """Immutable cloud of N >= 1 points with positions, colors and luminance."""

    positions: np.ndarray  # (N, 3) float64, native file units
    colors: np.ndarray  # (N, 3) uint8
    luminance: np.ndarray  # (N,) float64, derived from colors

    def __post_init__(self):
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ValueError("positions must be (N, 3)")
        n = len(self.positions)
        if n == 0:
            raise EmptyCloud("point cloud has no points")
        if self.colors.shape != (n, 3) or self.luminance.shape != (n,):
            raise ValueError("positions, colors and luminance lengths differ")
        for a in (self.positions, self.colors, self.luminance):
            _readonly(a)

    @classmethod
    def from_arrays(cls, positions, colors) -> "PointCloud":
        pos = np.ascontiguousarray(positions, dtype=np.float64)
        col = np.ascontiguousarray(colors, dtype=np.uint8)
        lum = np.asarray(rgb_to_luminance(col), dtype=np.float64)
        return cls(pos, col, lum)

    def __len__(self) -> int:
        return len(self.positions)


def _sq_dists(points: np.ndarray, q: np.ndarray) -> np.ndarray:
    d = points - q
    return (d * d).sum(axis=-1)


class SpatialIndex:
    """Exact KNN queries over a fixed set of 3D points.

    Built on a kd-tree; candidate sets are re-ranked with numpy-computed
    squared distances so ordering and tie-breaking (lower index first) are
    reproducible and independent of tree internals. Immutable once built.
    """

    def __init__(self, positions: np.ndarray):
        pos = np.ascontiguousarray(positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError("positions must be (N, 3)")
        if len(pos) == 0:
            raise EmptyCloud("cannot index an empty cloud")
        self._positions = _readonly(pos)
        self._tree = cKDTree(pos)

    @property
    def n(self) -> int:
        return len(self._positions)

    @property
    def positions(self) -> np.ndarray:
        return self._positions

    def query(self, point, k: int, exclude_self: bool = False) -> np.ndarray:
        """Indices of the min(k, N_effective) nearest points to ``point``.

        With ``exclude_self``, one zero-distance point (the lowest-index
        one, if any coincides with the query) is skipped.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        q = np.asarray(point, dtype=np.float64).reshape(3)
        n = self.n
        kq = min(k + (2 if exclude_self else 1), n)
        while True:
            _, cand = self._tree.query(q, k=kq)
            cand = np.atleast_1d(cand)
            d2 = _sq_dists(self._positions[cand], q)
            order = np.lexsort((cand, d2))
            cand, d2 = cand[order], d2[order]
            if exclude_self and d2.size and d2[0] == 0.0:
                cand, d2 = cand[1:], d2[1:]
            kr = min(k, len(cand))
            # Complete iff the selection boundary lies strictly inside the
            # candidate set (otherwise unseen points could tie at it).
            if kq == n or (kr > 0 and d2[kr - 1] < d2[-1]) or kr == 0:
                return cand[:kr].copy()
            kq = min(kq * 2, n)

    def query_bulk(self, points, k: int, exclude_self: bool = False) -> np.ndarray:
        """Row-per-query KNN; exclude_self drops one zero-distance hit per row.

        Returns an (m, kr) index array with kr = min(k, N-1) when
        exclude_self else min(k, N); intended for query sets where every
        row coincides with an indexed point (or none does).
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[None, :]
        m, n = len(pts), self.n
        kr = min(k, n - 1) if exclude_self else min(k, n)
        if kr == 0:
            return np.empty((m, 0), dtype=np.intp)
        kq = min(kr + (2 if exclude_self else 1), n)
        _, idx = self._tree.query(pts, k=kq)
        idx = idx.reshape(m, kq)
        diff = self._positions[idx] - pts[:, None, :]
        d2 = (diff * diff).sum(axis=-1)
        order = np.lexsort((idx, d2), axis=1)
        idx = np.take_along_axis(idx, order, axis=1)
        d2 = np.take_along_axis(d2, order, axis=1)
        if exclude_self:
            iszero = d2 == 0.0
            has0 = iszero.any(axis=1)
            first0 = np.where(has0, iszero.argmax(axis=1), kq)
            take = np.arange(kr)[None, :]
            sel = take + (take >= first0[:, None])
            out = np.take_along_axis(idx, sel, axis=1)
            out_d2 = np.take_along_axis(d2, sel, axis=1)
        else:
            out = idx[:, :kr].copy()
            out_d2 = d2[:, :kr]
        if kq < n:
            # Rows whose k-th distance ties the candidate boundary need the
            # exact per-query path (rare: exact distance ties at the rim).
            bad = np.nonzero(out_d2[:, -1] >= d2[:, -1])[0]
            for r in bad:
                out[r] = self.query(pts[r], kr, exclude_self=exclude_self)
        return out


def knn_indices(index: SpatialIndex, query, k: int, exclude_self: bool = False) -> np.ndarray:
    """Exact k-nearest-neighbor indices, nondecreasing distance, ties by lower index."""
    return index.query(query, k, exclude_self=exclude_self)


def farthest_point_sample(cloud: PointCloud, num_seeds: int, start: int = 0) -> np.ndarray:
    """Greedy farthest point sampling over the cloud's positions.

    seeds[0] = start; each next seed maximizes the minimum distance to the
    seeds chosen so far, ties broken by lower index. Returned in selection
    order.
    """
    pos = cloud.positions
    n = len(pos)
    if num_seeds < 1:
        raise ValueError("num_seeds must be >= 1")
    if num_seeds > n:
        raise TooManySeeds(f"requested {num_seeds} seeds from {n} points")
    if not 0 <= start < n:
        raise ValueError("start index out of range")
    seeds = np.empty(num_seeds, dtype=np.intp)
    seeds[0] = start
    min_d2 = _sq_dists(pos, pos[start])
    for s in range(1, num_seeds):
        nxt = int(np.argmax(min_d2))  # argmax returns the first (lowest) index on ties
        seeds[s] = nxt
        np.minimum(min_d2, _sq_dists(pos, pos[nxt]), out=min_d2)
    return seeds


# --- PLY I/O ---------------------------------------------------------------

_PLY_SCALAR = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "<i2", "int16": "<i2",
    "ushort": "<u2", "uint16": "<u2",
    "int": "<i4", "int32": "<i4",
    "uint": "<u4", "uint32": "<u4",
    "float": "<f4", "float32": "<f4",
    "double": "<f8", "float64": "<f8",
}
_FLOAT_TYPES = {"float", "float32", "double", "float64"}
_UCHAR_TYPES = {"uchar", "uint8"}


def _parse_ply_header(data: bytes):
    end = data.find(b"end_header")
    if end < 0:
        raise ParseError("no end_header in PLY file")
    nl = data.find(b"\n", end)
    if nl < 0:
        raise ParseError("end_header line not terminated")
    body_start = nl + 1
    try:
        lines = data[:end].decode("ascii").splitlines()
    except UnicodeDecodeError as e:
        raise ParseError(f"non-ascii PLY header: {e}") from None
    if not lines or lines[0].strip() != "ply":
        raise ParseError("missing 'ply' magic line")
    fmt = None
    elements = []  # (name, count, [(type_str, prop_name) | ("list", ...)])
    for raw in lines[1:]:
        tokens = raw.strip().split()
        if not tokens or tokens[0] in ("comment", "obj_info"):
            continue
        if tokens[0] == "format":
            if len(tokens) != 3 or tokens[2] != "1.0":
                raise ParseError(f"unsupported format line: {raw!r}")
            if tokens[1] not in ("ascii", "binary_little_endian"):
                raise ParseError(f"unsupported PLY format {tokens[1]!r}")
            fmt = tokens[1]
        elif tokens[0] == "element":
            if len(tokens) != 3:
                raise ParseError(f"malformed element line: {raw!r}")
            try:
                count = int(tokens[2])
            except ValueError:
                raise ParseError(f"bad element count: {raw!r}") from None
            elements.append((tokens[1], count, []))
        elif tokens[0] == "property":
            if not elements:
                raise ParseError("property before any element")
            if tokens[1] == "list":
                elements[-1][2].append(("list",) + tuple(tokens[2:]))
            elif len(tokens) == 3 and tokens[1] in _PLY_SCALAR:
                elements[-1][2].append((tokens[1], tokens[2]))
            else:
                raise ParseError(f"unsupported property line: {raw!r}")
        elif tokens[0] == "end_header":
            break
        else:
            raise ParseError(f"unrecognized header line: {raw!r}")
    if fmt is None:
        raise ParseError("PLY header has no format line")
    return fmt, elements, body_start


def _vertex_layout(props):
    """Map property list to (x,y,z,r,g,b) positions; validate declared types."""
    byname = {}
    for i, p in enumerate(props):
        if p[0] == "list":
            raise ParseError("list property inside vertex element is unsupported")
        byname[p[1]] = (i, p[0])
    for axis in ("x", "y", "z"):
        if axis not in byname:
            raise ParseError(f"vertex element lacks property {axis!r}")
        if byname[axis][1] not in _FLOAT_TYPES:
            raise ParseError(f"vertex property {axis!r} must be float or double")
    for chan in ("red", "green", "blue"):
        if chan not in byname:
            raise ColorMissing(f"vertex element lacks color property {chan!r}")
        if byname[chan][1] not in _UCHAR_TYPES:
            raise ParseError(f"vertex property {chan!r} must be 8-bit unsigned")
    used = {"x", "y", "z", "red", "green", "blue"}
    extra = [p[1] for p in props if p[1] not in used]
    if extra:
        warnings.warn(f"ignoring vertex properties {extra}", stacklevel=3)
    return byname


def load_ply(path) -> PointCloud:
    """Load an ascii or binary_little_endian PLY with xyz + RGB vertices.

    Elements other than ``vertex`` and extra vertex properties are ignored
    with a warning.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    fmt, elements, body_start = _parse_ply_header(data)
    names = [e[0] for e in elements]
    if "vertex" not in names:
        raise ParseError("PLY file has no vertex element")
    vidx = names.index("vertex")
    _, nverts, vprops = elements[vidx]
    if nverts == 0:
        raise EmptyCloud("PLY declares zero vertices")
    layout = _vertex_layout(vprops)
    ignored_elements = [e[0] for i, e in enumerate(elements) if i != vidx]
    if ignored_elements:
        warnings.warn(f"ignoring elements {ignored_elements}", stacklevel=2)

    if fmt == "ascii":
        rows = data[body_start:].decode("ascii", errors="replace").split("\n")
        cursor = 0
        for name, count, props in elements[:vidx]:
            if any(p[0] == "list" for p in props):
                raise ParseError(f"cannot skip list-typed element {name!r} before vertices")
            cursor += count
        need = len(vprops)
        pos = np.empty((nverts, 3), dtype=np.float64)
        col = np.empty((nverts, 3), dtype=np.uint8)
        for i in range(nverts):
            if cursor + i >= len(rows):
                raise ParseError("ascii payload truncated")
            tokens = rows[cursor + i].split()
            if len(tokens) != need:
                raise ParseError(f"vertex line {i} has {len(tokens)} values, expected {need}")
            try:
                for ax, axis in enumerate(("x", "y", "z")):
                    pos[i, ax] = float(tokens[layout[axis][0]])
                for ch, chan in enumerate(("red", "green", "blue")):
                    v = int(tokens[layout[chan][0]])
                    if not 0 <= v <= 255:
                        raise ValueError
                    col[i, ch] = v
            except ValueError:
                raise ParseError(f"unparseable vertex line {i}") from None
    else:
        offset = body_start
        for name, count, props in elements[:vidx]:
            if any(p[0] == "list" for p in props):
                raise ParseError(f"cannot skip list-typed element {name!r} before vertices")
            stride = sum(np.dtype(_PLY_SCALAR[p[0]]).itemsize for p in props)
            offset += count * stride
        dt = np.dtype([(p[1], _PLY_SCALAR[p[0]]) for p in vprops])
        if offset + nverts * dt.itemsize > len(data):
            raise ParseError("binary payload truncated")
        rec = np.frombuffer(data, dtype=dt, count=nverts, offset=offset)
        pos = np.stack(
            [rec["x"].astype(np.float64), rec["y"].astype(np.float64), rec["z"].astype(np.float64)],
            axis=1,
        )
        col = np.stack([rec["red"], rec["green"], rec["blue"]], axis=1).astype(np.uint8)
    return PointCloud.from_arrays(pos, col)


def save_ply(cloud: PointCloud, path, binary: bool = False) -> None:
    """Write a cloud as PLY (float32 xyz + uchar RGB).

    Positions are quantized to float32 on save so that the ascii and binary
    encodings of the same cloud load back bitwise-equal.
    """
    pos32 = cloud.positions.astype(np.float32)
    fmt = "binary_little_endian" if binary else "ascii"
    header = (
        "ply\n"
        f"format {fmt} 1.0\n"
        f"element vertex {len(cloud)}\n"
        "property float x\nproperty float y\nproperty float z\n"
        "property uchar red\nproperty uchar green\nproperty uchar blue\n"
        "end_header\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if binary:
            dt = np.dtype([("x", "<f4"), ("y", "<f4"), ("z", "<f4"),
                           ("red", "u1"), ("green", "u1"), ("blue", "u1")])
            rec = np.empty(len(cloud), dtype=dt)
            rec["x"], rec["y"], rec["z"] = pos32[:, 0], pos32[:, 1], pos32[:, 2]
            rec["red"], rec["green"], rec["blue"] = (
                cloud.colors[:, 0], cloud.colors[:, 1], cloud.colors[:, 2])
            fh.write(rec.tobytes())
        else:
            lines = []
            for p, c in zip(pos32, cloud.colors):
                lines.append(
                    f"{float(p[0])!r} {float(p[1])!r} {float(p[2])!r} "
                    f"{int(c[0])} {int(c[1])} {int(c[2])}\n"
                )
            fh.write("".join(lines).encode("ascii"))
