"""Sampling the spectra of 4-by-4 stochastic matrices.

A spectrum ``(1, lam, a + wi, a - wi)`` is recorded as the point
``(lam, a, w)``. Points come from two families of similarities:

* Vandermonde similarities of the Type I arc between ``1/4`` and ``1/3``,
  i.e. the roots of ``t^4 - beta t - alpha``; every convex combination of
  their rows is realizable (and so is its conjugate).
* the block matrix ``[[1, e_1^T], [0, F_3]]`` whose spectratope is the
  product of ``[0, 1]`` with the row polytope of ``F_3``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .circulants import dft
from .exceptions import MultipleRoots
from .karpelevic import classify_arc, type1_similarity
from .numerics import DEFAULT_TOL, Tolerance
from .perron import PerronSimilarity

DEFAULT_ALPHA_SAMPLES = 64
DEFAULT_SIMPLEX_RES = 12
DEFAULT_X1_SAMPLES = 32


class SimplexGrid:
    """Lattice points of the standard simplex with ``m`` vertices.

    >>> SimplexGrid(4, 12).weights.shape
    (455, 4)
    """

    def __init__(self, m: int, resolution: int):
        if m < 1 or resolution < 1:
            raise ValueError("m and resolution must be >= 1")
        self.m = m
        self.resolution = resolution
        # stars and bars: bar positions among resolution + m - 1 slots
        rows = []
        for bars in combinations(range(resolution + m - 1), m - 1):
            edges = (-1,) + bars + (resolution + m - 1,)
            rows.append([edges[i + 1] - edges[i] - 1 for i in range(m)])
        self.weights = np.array(rows, dtype=float).reshape(-1, m) / resolution

    def __len__(self):
        return len(self.weights)


@dataclass(frozen=True)
class RegionGroup:
    """Similarity that produced a block of points, and where to read them."""

    similarity: PerronSimilarity
    lambda_slot: int
    z_slot: int
    label: str


class RegionPoint(NamedTuple):
    lam: float
    alpha_coord: float
    omega_coord: float
    source: str


@dataclass
class RegionSample:
    """Column-oriented point cloud.

    ``coords[i]`` is the full spectrum vector of point ``i`` in the slot order
    of ``groups[group[i]].similarity``.
    """

    coords: np.ndarray = field(default_factory=lambda: np.zeros((0, 4), complex))
    group: np.ndarray = field(default_factory=lambda: np.zeros(0, int))
    groups: list = field(default_factory=list)

    def __len__(self):
        return len(self.group)

    def _slot(self, attr):
        slots = np.array([getattr(g, attr) for g in self.groups], dtype=int)
        if not len(self):
            return np.zeros(0, complex)
        return self.coords[np.arange(len(self)), slots[self.group]]

    @property
    def lam(self):
        return self._slot("lambda_slot").real

    @property
    def alpha_coord(self):
        return self._slot("z_slot").real

    @property
    def omega_coord(self):
        return self._slot("z_slot").imag

    @property
    def source(self):
        labels = np.array([g.label for g in self.groups] or [""], dtype=object)
        return labels[self.group] if len(self) else np.zeros(0, dtype=object)

    def __iter__(self):
        for row in zip(self.lam, self.alpha_coord, self.omega_coord, self.source):
            yield RegionPoint(*row)

    def extend(self, other: "RegionSample") -> "RegionSample":
        offset = len(self.groups)
        return RegionSample(
            np.concatenate([self.coords, other.coords]),
            np.concatenate([self.group, other.group + offset]),
            self.groups + other.groups,
        )

    def _add(self, similarity, lambda_slot, z_slot, label, X):
        self.groups.append(RegionGroup(similarity, lambda_slot, z_slot, label))
        self.coords = np.concatenate([self.coords, X])
        self.group = np.concatenate([self.group, np.full(len(X), len(self.groups) - 1)])

    def witness_matrices(self, index=None):
        """Realizing matrices ``S D_x S^{-1}`` for the chosen points."""
        idx = np.arange(len(self)) if index is None else np.atleast_1d(index)
        out = np.empty((len(idx), 4, 4), complex)
        for g in np.unique(self.group[idx]):
            sel = self.group[idx] == g
            S = self.groups[g].similarity
            out[sel] = np.einsum("ij,pj,jk->pik", S.S, self.coords[idx[sel]], S.S_inv)
        return out

    def witness_errors(self):
        """Worst row-sum defect, most negative real entry and largest
        imaginary part over all witness matrices."""
        worst = [0.0, math.inf, 0.0]
        for lo in range(0, len(self), 8192):
            M = self.witness_matrices(np.arange(lo, min(lo + 8192, len(self))))
            worst[0] = max(worst[0], float(np.abs(M.sum(axis=2) - 1).max()))
            worst[1] = min(worst[1], float(M.real.min()))
            worst[2] = max(worst[2], float(np.abs(M.imag).max()))
        return tuple(worst)


def typeI_arc4():
    return classify_arc(4, "1/4", "1/3")


def sample_typeI_region(alpha_grid=None, gamma_resolution: int = DEFAULT_SIMPLEX_RES,
                        tol: Tolerance = DEFAULT_TOL) -> RegionSample:
    """Convex combinations of the rows of the Vandermonde similarity of
    ``t^4 - beta t - alpha``, plus their conjugates, for each ``alpha``.

    Parameters with a repeated root are skipped with a warning.
    """
    if alpha_grid is None:
        alpha_grid = np.linspace(0.0, 1.0, DEFAULT_ALPHA_SAMPLES)
    weights = SimplexGrid(4, gamma_resolution).weights
    arc = typeI_arc4()
    sample = RegionSample()
    for alpha in np.asarray(alpha_grid, dtype=float):
        try:
            _, S = type1_similarity(arc, alpha, tol)
        except MultipleRoots:
            warnings.warn(f"skipping alpha={alpha}: repeated root", RuntimeWarning, stacklevel=2)
            continue
        X = weights @ S.S
        label = f"typeI:alpha={alpha:.17g}"
        sample._add(S, 1, 2, label + ":+", X)
        mirror = PerronSimilarity(np.conj(S.S), np.conj(S.S_inv), tol)
        sample._add(mirror, 1, 2, label + ":-", np.conj(X))
    return sample


def box_similarity(tol: Tolerance = DEFAULT_TOL) -> PerronSimilarity:
    """``[[1, e_1^T], [0, F_3]]`` with its closed-form inverse."""
    F = dft(3)
    S = np.zeros((4, 4), complex)
    S[0, :2] = 1.0
    S[1:, 1:] = F
    S_inv = np.zeros((4, 4), complex)
    S_inv[0, 0] = 1.0
    S_inv[0, 1:] = -1.0 / 3
    S_inv[1:, 1:] = np.conj(F) / 3
    return PerronSimilarity(S, S_inv, tol)


def sample_box_region(x1_grid=None, gamma_resolution: int = DEFAULT_SIMPLEX_RES,
                      tol: Tolerance = DEFAULT_TOL) -> RegionSample:
    """Points ``(x1, 1, z, conj z)`` with ``x1`` on a grid in ``[0, 1]`` and
    ``z`` a grid combination of the rows of ``F_3``."""
    if x1_grid is None:
        x1_grid = np.linspace(0.0, 1.0, DEFAULT_X1_SAMPLES)
    S = box_similarity(tol)
    tail = SimplexGrid(3, gamma_resolution).weights @ dft(3)
    sample = RegionSample()
    for x1 in np.asarray(x1_grid, dtype=float):
        X = np.column_stack([np.full(len(tail), x1, complex), tail])
        sample._add(S, 0, 2, f"box:x1={x1:.17g}", X)
    return sample


def sample_region(alpha_samples: int = DEFAULT_ALPHA_SAMPLES, simplex_res: int = DEFAULT_SIMPLEX_RES,
                  x1_samples: int = DEFAULT_X1_SAMPLES, tol: Tolerance = DEFAULT_TOL) -> RegionSample:
    """Both families with uniform grids."""
    a = sample_typeI_region(np.linspace(0, 1, alpha_samples), simplex_res, tol)
    return a.extend(sample_box_region(np.linspace(0, 1, x1_samples), simplex_res, tol))


# ---------------------------------------------------------------------------
# export

_VIEWS = {
    "svg-aw": ("alpha_coord", "omega_coord"),
    "svg-la": ("lam", "alpha_coord"),
    "svg-lw": ("lam", "omega_coord"),
}
_VIEW_ALIASES = {"svg-αω": "svg-aw", "svg-λα": "svg-la", "svg-λω": "svg-lw"}
FORMATS = ("csv", "json", *_VIEWS, *_VIEW_ALIASES)


def projection(sample: RegionSample, view: str = "svg-aw"):
    view = _VIEW_ALIASES.get(view, view)
    u, v = _VIEWS[view]
    return getattr(sample, u), getattr(sample, v)


def silhouette_polygons(sample: RegionSample, view: str = "svg-aw") -> list[np.ndarray]:
    """Convex hull of each group's projected points (degenerate groups skipped)."""
    u, v = projection(sample, view)
    polys = []
    for g in range(len(sample.groups)):
        pts = np.column_stack([u[sample.group == g], v[sample.group == g]])
        if len(pts) < 3:
            continue
        try:
            hull = ConvexHull(pts)
        except QhullError:
            continue
        polys.append(pts[hull.vertices])
    return polys


def points_in_polygon(px, py, poly) -> np.ndarray:
    """Even-odd test of points against one simple polygon (vertex array)."""
    px, py = np.asarray(px, float)[:, None], np.asarray(py, float)[:, None]
    x0, y0 = poly[:, 0][None, :], poly[:, 1][None, :]
    x1, y1 = np.roll(poly[:, 0], -1)[None, :], np.roll(poly[:, 1], -1)[None, :]
    crosses = (y0 > py) != (y1 > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
    return np.sum(crosses & (px < xint), axis=1) % 2 == 1


def raster_grid(size: int = 200, extent: float = 1.0):
    """Pixel centres of a ``size``-by-``size`` raster of ``[-extent, extent]^2``."""
    c = (np.arange(size) + 0.5) / size * 2 * extent - extent
    X, Y = np.meshgrid(c, c)
    return X.ravel(), Y.ravel()


def polygon_coverage(polys, px, py) -> np.ndarray:
    covered = np.zeros(len(px), bool)
    for poly in polys:
        lo, hi = poly.min(axis=0), poly.max(axis=0)
        box = ~covered & (px >= lo[0]) & (px <= hi[0]) & (py >= lo[1]) & (py <= hi[1])
        if box.any():
            idx = np.flatnonzero(box)
            covered[idx[points_in_polygon(px[idx], py[idx], poly)]] = True
    return covered


_SVG_SCALE = 200.0
_SVG_EXTENT = 1.1


def _to_px(u, v):
    return (np.asarray(u) + _SVG_EXTENT) * _SVG_SCALE, (_SVG_EXTENT - np.asarray(v)) * _SVG_SCALE


def from_px(x, y):
    """Inverse of the SVG coordinate map."""
    return np.asarray(x) / _SVG_SCALE - _SVG_EXTENT, _SVG_EXTENT - np.asarray(y) / _SVG_SCALE


def _svg(sample, view, scatter):
    size = 2 * _SVG_EXTENT * _SVG_SCALE
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:g}" height="{size:g}" '
           f'viewBox="0 0 {size:g} {size:g}">',
           f'<rect width="{size:g}" height="{size:g}" fill="white"/>',
           '<g class="silhouette" fill="#4477aa" fill-opacity="0.5" stroke="none">']
    for poly in silhouette_polygons(sample, view):
        x, y = _to_px(poly[:, 0], poly[:, 1])
        pts = " ".join(f"{a:.4f},{b:.4f}" for a, b in zip(x, y))
        out.append(f'<polygon points="{pts}"/>')
    out.append("</g>")
    if scatter and len(sample):
        x, y = _to_px(*projection(sample, view))
        out.append('<path class="points" fill="black" d="')
        out.extend(f"M{a:.2f} {b:.2f}h0.6v0.6h-0.6z" for a, b in zip(x, y))
        out.append('"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_points(sample: RegionSample, format: str = "csv", path=None, scatter: bool = True) -> str:
    """Serialize ``sample`` as CSV, JSON or an SVG projection.

    The text is returned and, when ``path`` is given, also written there.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; choose from {', '.join(FORMATS)}")
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["lambda", "alpha", "omega", "source"])
        for p in sample:
            writer.writerow([f"{p.lam:.17g}", f"{p.alpha_coord:.17g}", f"{p.omega_coord:.17g}", p.source])
        text = buf.getvalue()
    elif format == "json":
        text = json.dumps({
            "schema": 1,
            "points": [{"lambda": float(p.lam), "alpha": float(p.alpha_coord),
                        "omega": float(p.omega_coord), "source": p.source} for p in sample],
        })
    else:
        text = _svg(sample, _VIEW_ALIASES.get(format, format), scatter)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
