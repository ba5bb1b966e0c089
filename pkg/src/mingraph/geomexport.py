"""Height meshes, level-set polylines and their OBJ/CSV serialisation."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import families as fm
from .errors import EmptyDomainError, ValidationError
from .report import ResidualReport

__all__ = [
    "HeightMesh",
    "CurvePolyline",
    "sample_mesh",
    "extract_curve",
    "write_obj",
    "write_csv",
    "read_mesh_csv",
]

MIN_RESOLUTION = 8
CHAIN_TOL = 1e-9


def _window(window) -> tuple[float, float, float, float]:
    w = tuple(float(v) for v in window)
    if len(w) != 4 or not all(map(math.isfinite, w)) or not (w[0] < w[2] and w[1] < w[3]):
        raise ValidationError(f"window must be finite x0,y0,x1,y1 with x0 < x1 and y0 < y1, got {window}")
    return w


@dataclass(frozen=True)
class HeightMesh:
    """Heights on an nx by ny lattice; NaN marks a hole.

    ``heights[j, i]`` sits at (x0 + i dx, y0 + j dy) and has node index
    j nx + i.  ``faces`` lists node-index triangles over hole-free cells.
    """

    origin: tuple[float, float]
    spacing: tuple[float, float]
    heights: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        if not (self.spacing[0] > 0 and self.spacing[1] > 0):
            raise ValidationError("mesh spacing must be positive")
        if self.heights.ndim != 2 or min(self.heights.shape) < 2:
            raise ValidationError("mesh needs at least 2 x 2 nodes")
        f = self.faces
        if f.size:
            if f.ndim != 2 or f.shape[1] != 3 or f.min() < 0 or f.max() >= self.heights.size:
                raise ValidationError("face index out of bounds")
            if np.any(self.holes.ravel()[f]):
                raise ValidationError("face references a hole")

    @property
    def nx(self) -> int:
        return self.heights.shape[1]

    @property
    def ny(self) -> int:
        return self.heights.shape[0]

    @property
    def holes(self) -> np.ndarray:
        return np.isnan(self.heights)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Node coordinate grids, shaped like ``heights``."""
        xs = self.origin[0] + self.spacing[0] * np.arange(self.nx)
        ys = self.origin[1] + self.spacing[1] * np.arange(self.ny)
        return np.meshgrid(xs, ys)


@dataclass(frozen=True)
class CurvePolyline:
    """Ordered points of one connected piece of a level set."""

    points: np.ndarray  # complex
    level: float
    label: str
    closed: bool = False

    def __len__(self) -> int:
        return self.points.size


def _lattice(window, nx: int, ny: int):
    x0, y0, x1, y1 = window
    dx, dy = (x1 - x0) / (nx - 1), (y1 - y0) / (ny - 1)
    xs = x0 + dx * np.arange(nx)
    ys = y0 + dy * np.arange(ny)
    return xs, ys, dx, dy


def _cell_faces(ok: np.ndarray) -> np.ndarray:
    """Two triangles per cell whose four corners are all present."""
    ny, nx = ok.shape
    cell = ok[:-1, :-1] & ok[:-1, 1:] & ok[1:, :-1] & ok[1:, 1:]
    j, i = np.nonzero(cell)
    a = j * nx + i
    b, c, d = a + 1, a + nx + 1, a + nx
    tri = np.stack([np.stack([a, b, c], 1), np.stack([a, c, d], 1)], 1)
    return tri.reshape(-1, 3).astype(np.int64)


def sample_mesh(params: fm.Family, window, nx: int, ny: int, margin: float = 1e-2) -> HeightMesh:
    """Heights of one layer on a lattice; out-of-domain or non-finite nodes are holes."""
    if int(nx) < 2 or int(ny) < 2:
        raise ValidationError("mesh needs nx, ny >= 2")
    if not margin >= 0:
        raise ValidationError("margin must be nonnegative")
    w = _window(window)
    xs, ys, dx, dy = _lattice(w, int(nx), int(ny))
    X, Y = np.meshgrid(xs, ys)
    ok = np.asarray(params.in_domain(X, Y, margin), dtype=bool)
    with np.errstate(all="ignore"):
        H = np.asarray(params.height(X, Y), dtype=float)
    ok &= np.isfinite(H)
    if not np.any(ok):
        raise EmptyDomainError(f"{params.name} has no admissible node in window {w}")
    H = np.where(ok, H, np.nan)
    return HeightMesh((w[0], w[1]), (dx, dy), H, _cell_faces(ok))


# ---------------------------------------------------------------------------
# marching squares

# edges of a cell: 0 bottom, 1 right, 2 top, 3 left
# corner bits: 1 (i, j), 2 (i+1, j), 4 (i+1, j+1), 8 (i, j+1)
_SEGMENTS = {
    0: (), 15: (),
    1: ((3, 0),), 14: ((3, 0),),
    2: ((0, 1),), 13: ((0, 1),),
    4: ((1, 2),), 11: ((1, 2),),
    8: ((2, 3),), 7: ((2, 3),),
    3: ((3, 1),), 12: ((3, 1),),
    6: ((0, 2),), 9: ((0, 2),),
}


def _saddle(case: int, centre_high: bool) -> tuple:
    # case 5: corners 1 and 4 high; case 10: corners 2 and 8 high
    diag_high = case == 5
    if centre_high == diag_high:
        # centre joins corners 1 and 4: cut off corners 2 and 8
        return ((0, 1), (2, 3))
    return ((3, 0), (1, 2))


def extract_curve(spec: fm.SingularCurveSpec, window, resolution: int) -> list[CurvePolyline]:
    """Polylines of ``spec``'s zero set on a (resolution+1)^2 lattice.

    The contoured function is ``spec.crossing``: ``implicit_fn - level``
    unless the curve supplies its own signed function.  Cells touching a
    non-finite value are skipped; saddle cells take the sign at the cell
    centre.
    """
    if int(resolution) < MIN_RESOLUTION:
        raise ValidationError(f"resolution must be at least {MIN_RESOLUTION}")
    n = int(resolution)
    w = _window(window)
    xs, ys, dx, dy = _lattice(w, n + 1, n + 1)
    X, Y = np.meshgrid(xs, ys)
    with np.errstate(all="ignore"):
        F = np.asarray(spec.crossing(X, Y), dtype=float)
    high = F >= 0
    finite = np.isfinite(F)

    def edge_point(j0, i0, j1, i1):
        a, b = F[j0, i0], F[j1, i1]
        t = a / (a - b)
        return complex(xs[i0] + t * (xs[i1] - xs[i0]), ys[j0] + t * (ys[j1] - ys[j0]))

    def edge(i, j, e):
        if e == 0:
            return edge_point(j, i, j, i + 1)
        if e == 1:
            return edge_point(j, i + 1, j + 1, i + 1)
        if e == 2:
            return edge_point(j + 1, i, j + 1, i + 1)
        return edge_point(j, i, j + 1, i)

    case = (high[:-1, :-1] * 1 + high[:-1, 1:] * 2 + high[1:, 1:] * 4 + high[1:, :-1] * 8)
    cells_ok = finite[:-1, :-1] & finite[:-1, 1:] & finite[1:, 1:] & finite[1:, :-1]
    active = cells_ok & (case != 0) & (case != 15)
    segments = []
    for j, i in zip(*np.nonzero(active)):
        c = int(case[j, i])
        if c in (5, 10):
            with np.errstate(all="ignore"):
                centre = float(spec.crossing(np.asarray(xs[i] + 0.5 * dx), np.asarray(ys[j] + 0.5 * dy)))
            if not math.isfinite(centre):
                centre = 0.25 * float(F[j, i] + F[j, i + 1] + F[j + 1, i] + F[j + 1, i + 1])
            pairs = _saddle(c, centre >= 0)
        else:
            pairs = _SEGMENTS[c]
        for e0, e1 in pairs:
            p, q = edge(i, j, e0), edge(i, j, e1)
            if abs(p - q) > CHAIN_TOL:
                segments.append((p, q))
    segments = _drop_jumps(spec, segments, max(dx, dy))
    return [CurvePolyline(np.asarray(pts, dtype=complex), spec.level, spec.label, closed)
            for pts, closed in _chain(segments)]


def _drop_jumps(spec: fm.SingularCurveSpec, segments: list, cell: float) -> list:
    """Keep segments whose ends satisfy |F| <= 1.5 cell |grad F|.

    A sign change across a pole or a branch jump of F passes the corner
    test but leaves |F| of order one at the interpolated point.
    """
    if not segments:
        return segments
    z = np.array(segments, dtype=complex).ravel()
    x, y, h = z.real, z.imag, 1e-3 * cell
    with np.errstate(all="ignore"):
        F = np.asarray(spec.crossing(x, y), dtype=float)
        gx = (spec.crossing(x + h, y) - spec.crossing(x - h, y)) / (2 * h)
        gy = (spec.crossing(x, y + h) - spec.crossing(x, y - h)) / (2 * h)
        ok = np.abs(F) <= 1.5 * cell * np.hypot(gx, gy)
    ok = ok.reshape(-1, 2).all(axis=1)
    return [seg for seg, keep in zip(segments, ok) if keep]


def _key(p: complex) -> tuple[int, int]:
    return (round(p.real / CHAIN_TOL), round(p.imag / CHAIN_TOL))


def _chain(segments: list[tuple[complex, complex]]) -> list[tuple[list[complex], bool]]:
    """Join segments sharing endpoints (within CHAIN_TOL) into polylines."""
    adj: dict[tuple, list[int]] = {}
    ends = []
    for s, (p, q) in enumerate(segments):
        kp, kq = _key(p), _key(q)
        ends.append((kp, kq))
        adj.setdefault(kp, []).append(s)
        adj.setdefault(kq, []).append(s)
    used = [False] * len(segments)
    point_at: dict[tuple, complex] = {}
    for (p, q), (kp, kq) in zip(segments, ends):
        point_at.setdefault(kp, p)
        point_at.setdefault(kq, q)

    def walk(start_key):
        keys = [start_key]
        while True:
            nxt = next((s for s in adj[keys[-1]] if not used[s]), None)
            if nxt is None:
                return keys
            used[nxt] = True
            a, b = ends[nxt]
            keys.append(b if a == keys[-1] else a)

    out = []
    # open chains start at an endpoint of odd degree
    for k in adj:
        if len(adj[k]) % 2 == 1 and any(not used[s] for s in adj[k]):
            keys = walk(k)
            out.append(([point_at[q] for q in keys], False))
    for s in range(len(segments)):
        if not used[s]:
            keys = walk(ends[s][0])
            closed = len(keys) > 2 and keys[0] == keys[-1]
            out.append(([point_at[q] for q in keys], closed))
    return out


# ---------------------------------------------------------------------------
# files


def _g(v: float) -> str:
    return "%.17g" % v


def write_obj(mesh: HeightMesh, path) -> None:
    """``v x y z`` for each present node, then 1-indexed ``f i j k``; LF endings."""
    X, Y = mesh.coords()
    present = ~mesh.holes.ravel()
    remap = np.full(present.size, -1, dtype=np.int64)
    remap[present] = np.arange(int(np.count_nonzero(present))) + 1
    lines = [f"v {_g(x)} {_g(y)} {_g(z)}" for x, y, z in
             zip(X.ravel()[present], Y.ravel()[present], mesh.heights.ravel()[present])]
    lines += [f"f {a} {b} {c}" for a, b, c in remap[mesh.faces]]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _mesh_rows(mesh: HeightMesh):
    X, Y = mesh.coords()
    yield ["i", "j", "x", "y", "z"]
    for j in range(mesh.ny):
        for i in range(mesh.nx):
            z = mesh.heights[j, i]
            yield [i, j, _g(X[j, i]), _g(Y[j, i]), "" if math.isnan(z) else _g(z)]


def _curve_rows(curves: Iterable[CurvePolyline]):
    yield ["curve", "label", "level", "closed", "index", "x", "y"]
    for c, pl in enumerate(curves):
        for k, p in enumerate(pl.points):
            yield [c, pl.label, _g(pl.level), int(pl.closed), k, _g(p.real), _g(p.imag)]


def _report_rows(reports: Iterable):
    cols = ["label", "sampleCount", "maxResidual", "p99Residual", "passed",
            "wallTimeMs", "tolerance", "failures", "details"]
    yield cols
    for r in reports:
        d = r.to_dict() if isinstance(r, ResidualReport) else dict(r)
        row = []
        for c in cols:
            v = d.get(c)
            if isinstance(v, (dict, list)):
                v = json.dumps(v, sort_keys=True, allow_nan=False)
            elif isinstance(v, float):
                v = _g(v)
            elif v is None:
                v = ""
            row.append(v)
        yield row


def write_csv(obj, path) -> None:
    """CSV with a header row: a mesh, a list of polylines, or reports.

    Quoting follows RFC 4180 (CRLF records, fields with commas or quotes
    quoted, quotes doubled).  Holes are empty fields.
    """
    if isinstance(obj, HeightMesh):
        rows = _mesh_rows(obj)
    elif isinstance(obj, (ResidualReport, dict)):
        rows = _report_rows([obj])
    else:
        items = list(obj)
        if items and all(isinstance(o, CurvePolyline) for o in items):
            rows = _curve_rows(items)
        elif all(isinstance(o, (ResidualReport, dict)) for o in items):
            rows = _report_rows(items)
        else:
            raise ValidationError("write_csv takes a HeightMesh, polylines or reports")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        w.writerows(rows)


def read_mesh_csv(path) -> np.ndarray:
    """Heights grid (NaN holes) from a mesh CSV written by :func:`write_csv`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValidationError("mesh CSV has no rows")
    nx = max(int(r["i"]) for r in rows) + 1
    ny = max(int(r["j"]) for r in rows) + 1
    H = np.full((ny, nx), np.nan)
    for r in rows:
        if r["z"] != "":
            H[int(r["j"]), int(r["i"])] = float(r["z"])
    return H
