"""Isophotes as level sets of the illumination field ``f(u, v) = <N(u, v), d>``.

For a timelike axis ``d`` (same timecone as the future-pointing normal) the
isophote of angle ``theta`` is the level ``-cosh(theta)``; for a spacelike
axis it is the level ``sinh(theta)``.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from . import minkowski as mk
from .errors import BadParams, SilhouetteUndefined
from .surface import ParamSurface, SurfaceCurve, conormal_direction, surface_curve

log = logging.getLogger(__name__)

TIMELIKE = "timelike"
SPACELIKE = "spacelike"


@dataclass(frozen=True)
class AxisSpec:
    d: mk.Vec3M
    kind: str
    theta: float

    @property
    def level(self) -> float:
        if self.kind == TIMELIKE:
            return -math.cosh(self.theta)
        return math.sinh(self.theta)

    def to_dict(self) -> dict:
        return {"d": self.d.to_list(), "kind": self.kind, "theta": self.theta}


def make_axis(d, kind: str, theta: float) -> AxisSpec:
    """Validated, normalised axis.

    A past-pointing timelike ``d`` is flipped (with a warning) so that it
    shares the timecone of the future-pointing surface normal.
    """
    kind = str(kind).lower()
    if kind not in (TIMELIKE, SPACELIKE):
        raise BadParams(f"axis kind must be 'timelike' or 'spacelike', got {kind!r}")
    v = np.asarray(d, dtype=float).reshape(3)
    char = mk.causal_character(v)
    if not np.any(v):
        raise BadParams("axis vector is zero")
    if kind == TIMELIKE and char is not mk.CausalCharacter.TIMELIKE:
        raise BadParams(f"axis {tuple(v)} is {char.value}, not timelike")
    if kind == SPACELIKE and char is not mk.CausalCharacter.SPACELIKE:
        raise BadParams(f"axis {tuple(v)} is {char.value}, not spacelike")
    v = mk.normalize(v)
    if kind == TIMELIKE and v[0] < 0:
        log.warning("past-pointing timelike axis flipped to the future timecone")
        v = -v
    theta = float(theta)
    if not math.isfinite(theta) or theta < 0:
        raise BadParams("theta must be a finite non-negative number")
    axis = AxisSpec(mk.Vec3M.of(v), kind, theta)
    return silhouette_guard(axis)


def silhouette_guard(axis: AxisSpec) -> AxisSpec:
    """Reject the silhouette request ``theta = 0``.

    For a timelike axis ``<N,d> = -cosh(theta)`` never vanishes because two
    timelike vectors are never orthogonal; ``theta = 0`` would mean ``N = d``.
    For a spacelike axis ``theta = 0`` is the level ``<N,d> = 0``, which is
    excluded as an isophote on spacelike surfaces.
    """
    if axis.theta == 0.0:
        if axis.kind == TIMELIKE:
            raise SilhouetteUndefined(
                "theta = 0 with a timelike axis means N = d; the level <N,d> = 0 is "
                "unreachable since two timelike vectors are never orthogonal")
        raise SilhouetteUndefined(
            "theta = 0 with a spacelike axis is the silhouette <N,d> = 0, which is not "
            "an isophote on a spacelike surface")
    return axis


class IlluminationField:
    """``f(u, v) = <N(u, v), d>`` with its parameter gradient."""

    def __init__(self, surface: ParamSurface, d, level: float = 0.0):
        self.surface = surface
        self.d = np.asarray(d, dtype=float).reshape(3)
        self.level = float(level)

    def value(self, u, v):
        return mk.inner(self.surface.normals(u, v), self.d)

    def gradient(self, u, v):
        _, Nu, Nv = self.surface.normal_jet(u, v)
        return np.stack([mk.inner(Nu, self.d), mk.inner(Nv, self.d)], axis=-1)


def _threads():
    try:
        return max(1, int(os.environ.get("ISOPHOTE_THREADS", "1")))
    except ValueError:
        return 1


def illumination_field(S: ParamSurface, d, grid_n: int = 256):
    """Grid nodes and ``f = <N, d>`` on them: returns ``(us, vs, F)``.

    Rows are evaluated in chunks, in parallel when ``ISOPHOTE_THREADS > 1``;
    results do not depend on the chunking.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    us, vs = S.grid(grid_n)
    dd = np.asarray(d, dtype=float).reshape(3)
    nthreads = _threads()

    def rows(sl):
        U, V = np.meshgrid(us[sl], vs, indexing="ij")
        return mk.inner(S.normals(U, V), dd)

    if nthreads == 1:
        F = rows(slice(None))
    else:
        bounds = np.linspace(0, len(us), nthreads + 1).astype(int)
        with ThreadPoolExecutor(nthreads) as ex:
            parts = list(ex.map(rows, [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]))
        F = np.concatenate(parts, axis=0)
    return us, vs, F


@dataclass
class IsophotePolyline:
    axis: AxisSpec
    level: float
    path: np.ndarray
    closed: bool
    curve: SurfaceCurve

    @property
    def trace(self):
        return self.curve.trace


def _edge_geometry(us, vs, periodic):
    """Endpoint coordinates of every grid edge, in edge-id order."""
    nu, nv = len(us), len(vs)
    cu, cv, n_edges = kernels.grid_counts(nu, nv, *periodic)
    du = us[1] - us[0]
    dv = vs[1] - vs[0]
    iu, ju = np.meshgrid(np.arange(cu), np.arange(nv), indexing="ij")
    p0u = np.stack([us[iu], vs[ju]], -1).reshape(-1, 2)
    p1u = np.stack([us[iu] + du, vs[ju]], -1).reshape(-1, 2)
    iv, jv = np.meshgrid(np.arange(nu), np.arange(cv), indexing="ij")
    p0v = np.stack([us[iv], vs[jv]], -1).reshape(-1, 2)
    p1v = np.stack([us[iv], vs[jv] + dv], -1).reshape(-1, 2)
    node0 = np.concatenate([np.stack([iu, ju], -1).reshape(-1, 2), np.stack([iv, jv], -1).reshape(-1, 2)])
    node1u = np.stack([(iu + 1) % nu, ju], -1).reshape(-1, 2)
    node1v = np.stack([iv, (jv + 1) % nv], -1).reshape(-1, 2)
    node1 = np.concatenate([node1u, node1v])
    return np.concatenate([p0u, p0v]), np.concatenate([p1u, p1v]), node0, node1


def refine_roots(field: IlluminationField, p0, p1, g0, g1, refine_tol: float, max_iter: int = 60):
    """Roots of ``field - level`` on segments ``p0 -> p1`` with bracketing values.

    Safeguarded secant (Illinois variant) inside the bracket, bisecting when
    the secant step leaves it; iterates well past ``refine_tol`` so vertices
    sit on the level set to near machine precision.
    """
    a = np.zeros(len(p0))
    b = np.ones(len(p0))
    ga = np.asarray(g0, float).copy()
    gb = np.asarray(g1, float).copy()
    x = np.where(ga == 0, 0.0, np.where(gb == 0, 1.0, ga / (ga - gb)))
    gx = np.zeros_like(x)
    side = np.zeros(len(x), dtype=int)
    tight = min(refine_tol, 1e-14 * (1.0 + abs(field.level)))
    active = np.ones(len(x), dtype=bool)
    for it in range(max_iter):
        idx = np.flatnonzero(active)
        if len(idx) == 0:
            break
        pts = p0[idx] + x[idx, None] * (p1[idx] - p0[idx])
        g = field.value(pts[:, 0], pts[:, 1]) - field.level
        gx[idx] = g
        left = np.sign(g) == np.sign(ga[idx])
        # Illinois: damp the retained endpoint when the same side repeats
        ra = idx[left]
        rb = idx[~left]
        a[ra], ga[ra] = x[ra], g[left]
        gb[ra] = np.where(side[ra] == 1, gb[ra] * 0.5, gb[ra])
        side[ra] = 1
        b[rb], gb[rb] = x[rb], g[~left]
        ga[rb] = np.where(side[rb] == -1, ga[rb] * 0.5, ga[rb])
        side[rb] = -1
        done = (np.abs(g) <= tight) | (b[idx] - a[idx] <= 1e-16)
        active[idx[done]] = False
        nxt = idx[~done]
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = a[nxt] - ga[nxt] * (b[nxt] - a[nxt]) / (gb[nxt] - ga[nxt])
        bad = ~np.isfinite(xs) | (xs <= a[nxt]) | (xs >= b[nxt])
        if it % 8 == 7:
            bad[:] = True
        x[nxt] = np.where(bad, 0.5 * (a[nxt] + b[nxt]), xs)
    pts = p0 + x[:, None] * (p1 - p0)
    return pts, gx


def _orient(field, surface, path, closed):
    """Reverse ``path`` unless the Darboux vector ``B = N × T`` points toward
    increasing illumination."""
    m = len(path)
    if closed:
        tang = np.roll(path, -1, axis=0) - np.roll(path, 1, axis=0)
    else:
        tang = np.gradient(path, axis=0)
    w = conormal_direction(surface, path, tang)
    grad = field.gradient(path[:, 0], path[:, 1])
    slope = np.sum(grad * w, axis=-1)
    k = int(np.argmax(np.abs(slope) / (np.linalg.norm(w, axis=1) + 1e-300)))
    _, Su, Sv, *_ = surface.jets(path[k, 0], path[k, 1])
    N = surface.normals(path[k, 0], path[k, 1])
    T3 = Su * tang[k, 0] + Sv * tang[k, 1]
    W = Su * w[k, 0] + Sv * w[k, 1]
    B = mk.cross(N, T3)
    if np.sign(mk.inner(B, W)) * slope[k] < 0:
        return path[::-1].copy()
    return path


def extract_isophotes(S: ParamSurface, axis: AxisSpec, grid_n: int = 256,
                      refine_tol: float = 1e-8, n_out: int = 1024,
                      backend: str | None = None, min_vertices: int = 6) -> list[IsophotePolyline]:
    """Marching squares on the level ``axis.level`` of ``<N, d>``.

    Crossing edges are refined by a safeguarded secant search, segments are
    chained through shared edges (wrapping across periodic seams) and every
    chain is oriented so that ``B`` points toward the brighter side. Each
    polyline carries a uniform-arclength trace projected onto the level set.
    An unattainable level yields an empty list.
    """
    silhouette_guard(axis)
    if refine_tol <= 0:
        raise ValueError("refine_tol must be positive")
    level = axis.level
    field = IlluminationField(S, axis.d, level)
    us, vs, F = illumination_field(S, axis.d, grid_n)
    G = F - level
    wrap = S.periodic
    codes = kernels.case_codes(G, *wrap)
    center = np.zeros(codes.shape, dtype=np.int8)
    saddles = np.argwhere((codes == 5) | (codes == 10))
    if len(saddles):
        du, dv = us[1] - us[0], vs[1] - vs[0]
        cu_ = us[saddles[:, 0]] + 0.5 * du
        cv_ = vs[saddles[:, 1]] + 0.5 * dv
        gc = field.value(cu_, cv_) - level
        center[saddles[:, 0], saddles[:, 1]] = np.where(gc >= 0, 1, -1)
    segs = kernels.march_cells(G, wrap[0], wrap[1], center, backend=backend)
    if len(segs) == 0:
        return []
    _, _, n_edges = kernels.grid_counts(len(us), len(vs), *wrap)
    chains, closed = kernels.chain_segments(segs, n_edges, backend=backend)
    p0, p1, n0, n1 = _edge_geometry(us, vs, wrap)
    used = np.unique(segs)
    pts, resid = refine_roots(field, p0[used], p1[used],
                              G[n0[used, 0], n0[used, 1]], G[n1[used, 0], n1[used, 1]], refine_tol)
    where = np.full(n_edges, -1, dtype=np.int64)
    where[used] = np.arange(len(used))
    worst = float(np.max(np.abs(resid))) if len(resid) else 0.0
    if worst > refine_tol:
        log.warning("edge refinement stalled: worst |f - level| = %.3g", worst)
    out = []
    for chain, is_closed in zip(chains, closed):
        path = pts[where[np.asarray(chain)]]
        if len(path) < min_vertices:
            log.info("dropping %d-vertex contour fragment (below grid resolution)", len(path))
            continue
        path = _unwrap_path(path, S)
        path = _orient(field, S, path, is_closed)
        curve = surface_curve(S, path, closed=is_closed, n_out=n_out, field=field)
        out.append(IsophotePolyline(axis=axis, level=level, path=path, closed=is_closed, curve=curve))
    return out


def _unwrap_path(path, S):
    path = np.array(path, dtype=float)
    for k in (0, 1):
        if S.periodic[k]:
            P = S.span[k]
            d = np.diff(path[:, k])
            path[1:, k] = path[0, k] + np.cumsum(d - P * np.round(d / P))
    return path


def field_range(S: ParamSurface, d, grid_n: int = 256) -> tuple[float, float]:
    _, _, F = illumination_field(S, d, grid_n)
    return float(F.min()), float(F.max())


def level_residuals(S: ParamSurface, poly: IsophotePolyline) -> np.ndarray:
    field = IlluminationField(S, poly.axis.d, poly.level)
    return field.value(poly.path[:, 0], poly.path[:, 1]) - poly.level


# -- output formats ---------------------------------------------------------------

def polylines_document(axis: AxisSpec, polys: list[IsophotePolyline], surface: ParamSurface | None = None) -> dict:
    doc = {
        "axis": axis.to_dict(),
        "level": axis.level,
        "closed": [p.closed for p in polys],
        "paths": [p.path.tolist() for p in polys],
        "traces": [p.trace.points.tolist() for p in polys],
    }
    if surface is not None:
        doc["surface"] = surface.to_spec()
    return doc


def contours_svg(S: ParamSurface, polys: list[IsophotePolyline], width: int = 480) -> str:
    """Parameter-rectangle SVG with one polyline per contour (periodic seams split)."""
    u0, u1, v0, v1 = S.domain
    su, sv = S.span
    height = int(round(width * sv / su)) if su > 0 else width
    height = max(120, min(height, 4 * width))
    pad = 10

    def xy(u, v):
        x = pad + (u - u0) / su * (width - 2 * pad)
        y = height - pad - (v - v0) / sv * (height - 2 * pad)
        return x, y

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="#888" stroke-width="1"/>',
    ]
    for k, p in enumerate(polys):
        path = p.path.copy()
        if S.periodic[0]:
            path[:, 0] = u0 + np.mod(path[:, 0] - u0, su)
        if S.periodic[1]:
            path[:, 1] = v0 + np.mod(path[:, 1] - v0, sv)
        if p.closed:
            path = np.vstack([path, path[:1]])
        jumps = np.flatnonzero(np.any(np.abs(np.diff(path, axis=0)) > 0.5 * np.array([su, sv]), axis=1))
        for piece in np.split(path, jumps + 1):
            if len(piece) < 2:
                continue
            coords = " ".join("%.3f,%.3f" % xy(u, v) for u, v in piece)
            parts.append(f'<polyline data-contour="{k}" points="{coords}" fill="none" '
                         'stroke="#c03" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
