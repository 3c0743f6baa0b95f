"""Spacelike parametric surfaces and the Darboux apparatus of curves on them.

Darboux frame along a unit-speed curve ``alpha`` on a spacelike surface::

    T' =            k_g B + k_n N
    B' = -k_g T           + tau_g N
    N' =  k_n T + tau_g B

with ``B = N × T``, ``<T,T> = <B,B> = 1`` and ``<N,N> = -1``. With the
Lorentzian cross product used here the remaining products are
``B × N = T`` and ``T × B = -N``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import minkowski as mk
from .errors import (
    BadParams,
    DegenerateJacobian,
    FrameDegenerate,
    NonSpacelikeChord,
    NotTimelikeNormal,
    OffSurface,
    TooFewPoints,
    UnknownSurface,
)
from .exprparse import compile_components
from .frames import (
    FrenetData,
    SampledCurve,
    _cumulative_length,
    arclength_targets,
    invert_arclength,
)
from .numdiff import derivative, partials

JetFn = Callable[[np.ndarray, np.ndarray], tuple]

# relative step for finite-difference jets of parsed surfaces
FD_STEP = 1e-3


def _stack(a, b, c):
    a, b, c = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(c, float))
    return np.stack([a, b, c], axis=-1)


@dataclass
class ParamSurface:
    """``S(u, v)`` over a rectangle, with jets up to second order."""

    name: str
    jet_fn: JetFn
    domain: tuple
    periodic: tuple = (False, False)
    analytic: bool = True
    params: dict = field(default_factory=dict)
    source: dict | None = None

    def __post_init__(self):
        self.domain = tuple(float(x) for x in self.domain)
        u0, u1, v0, v1 = self.domain
        if not (u1 > u0 and v1 > v0):
            raise BadParams(f"empty domain {self.domain}")
        self.periodic = tuple(bool(p) for p in self.periodic)

    @property
    def span(self):
        u0, u1, v0, v1 = self.domain
        return u1 - u0, v1 - v0

    def jets(self, u, v):
        """``(S, S_u, S_v, S_uu, S_uv, S_vv)`` each of shape ``(..., 3)``."""
        return self.jet_fn(np.asarray(u, float), np.asarray(v, float))

    def eval(self, u, v):
        return self.jets(u, v)[0]

    def __call__(self, u, v):
        return self.eval(u, v)

    def normal_jet(self, u, v, check: bool = True):
        """Future-pointing unit normal ``N`` and its partials ``N_u``, ``N_v``."""
        S, Su, Sv, Suu, Suv, Svv = self.jets(u, v)
        X = mk.cross(Su, Sv)
        Xu = mk.cross(Suu, Sv) + mk.cross(Su, Suv)
        Xv = mk.cross(Suv, Sv) + mk.cross(Su, Svv)
        q = mk.inner(X, X)
        e2 = np.sum(X * X, axis=-1)
        if check:
            scale = np.sum(Su * Su, axis=-1) * np.sum(Sv * Sv, axis=-1)
            bad = e2 <= 1e-24 * np.maximum(scale, 1e-300)
            if np.any(bad):
                raise DegenerateJacobian("S_u × S_v vanishes", where=_locate(bad, u, v))
            bad = q >= -mk.CAUSAL_TOL * e2
            if np.any(bad):
                raise NotTimelikeNormal("surface normal is not timelike", where=_locate(bad, u, v))
        m = np.sqrt(np.abs(q))
        sgn = np.where(X[..., 0] < 0, -1.0, 1.0)
        m_u = -mk.inner(X, Xu) / m
        m_v = -mk.inner(X, Xv) / m
        N = sgn[..., None] * X / m[..., None]
        Nu = sgn[..., None] * (Xu / m[..., None] - X * (m_u / m**2)[..., None])
        Nv = sgn[..., None] * (Xv / m[..., None] - X * (m_v / m**2)[..., None])
        return N, Nu, Nv

    def normals(self, u, v, check: bool = True):
        return self.normal_jet(u, v, check)[0]

    def grid(self, n: int):
        """Node coordinates for an ``n × n`` sampling grid of the domain.

        Periodic directions omit the duplicated end node.
        """
        u0, u1, v0, v1 = self.domain
        us = np.linspace(u0, u1, n, endpoint=not self.periodic[0])
        vs = np.linspace(v0, v1, n, endpoint=not self.periodic[1])
        return us, vs

    def diameter(self, n: int = 17) -> float:
        us, vs = self.grid(n)
        P = self.eval(*np.meshgrid(us, vs, indexing="ij")).reshape(-1, 3)
        return float(np.linalg.norm(P.max(axis=0) - P.min(axis=0)))

    def to_spec(self) -> dict:
        if self.source is not None:
            return dict(self.source)
        return {"kind": "builtin", "name": self.name, "domain": list(self.domain),
                "periodic": list(self.periodic), "params": dict(self.params)}


def _locate(mask, u, v):
    idx = np.argwhere(np.atleast_1d(mask))
    if len(idx) == 0:
        return None
    i = tuple(idx[0])
    uu = np.broadcast_to(np.asarray(u, float), np.shape(mask))
    vv = np.broadcast_to(np.asarray(v, float), np.shape(mask))
    if np.ndim(mask) == 0:
        return {"u": float(uu), "v": float(vv)}
    return {"index": [int(k) for k in i], "u": float(uu[i]), "v": float(vv[i])}


# -- builtin catalog --------------------------------------------------------

def _hyperboloid(params):
    r = float(params.get("radius", 1.0))
    if r <= 0:
        raise BadParams("radius must be positive")

    def jets(u, v):
        ch, sh, cv, sv = np.cosh(u), np.sinh(u), np.cos(v), np.sin(v)
        z = np.zeros(np.broadcast(u, v).shape)
        S = r * _stack(ch + z, sh * cv, sh * sv)
        Su = r * _stack(sh + z, ch * cv, ch * sv)
        Sv = r * _stack(z, -sh * sv, sh * cv)
        Suu = S
        Suv = r * _stack(z, -ch * sv, ch * cv)
        Svv = r * _stack(z, -sh * cv, -sh * sv)
        return S, Su, Sv, Suu, Suv, Svv

    return jets, (0.1, 2.0, -math.pi, math.pi), (False, True)


def _poly_terms(params, default):
    terms = params.get("coeffs", default)
    try:
        out = [(int(i), int(j), float(c)) for i, j, c in terms]
    except (TypeError, ValueError) as exc:
        raise BadParams("coeffs must be a list of [i, j, c] monomials") from exc
    if any(i < 0 or j < 0 for i, j, _ in out):
        raise BadParams("monomial exponents must be non-negative")
    return out


def _mono(x, k, d):
    """d-th derivative of x**k."""
    if d > k:
        return np.zeros_like(x)
    c = 1.0
    for m in range(d):
        c *= k - m
    return c * x ** (k - d)


def _graph(params):
    terms = _poly_terms(params, [[2, 0, 0.15], [0, 2, 0.15]])

    def height(u, v, du, dv):
        out = np.zeros(np.broadcast(u, v).shape)
        for i, j, c in terms:
            out = out + c * _mono(u, i, du) * _mono(v, j, dv)
        return out

    def jets(u, v):
        z = np.zeros(np.broadcast(u, v).shape)
        one = z + 1.0
        S = _stack(height(u, v, 0, 0), u + z, v + z)
        Su = _stack(height(u, v, 1, 0), one, z)
        Sv = _stack(height(u, v, 0, 1), z, one)
        Suu = _stack(height(u, v, 2, 0), z, z)
        Suv = _stack(height(u, v, 1, 1), z, z)
        Svv = _stack(height(u, v, 0, 2), z, z)
        return S, Su, Sv, Suu, Suv, Svv

    return jets, (-1.0, 1.0, -1.0, 1.0), (False, False)


def _revolution(params):
    coeffs = params.get("coeffs", [0.0, 0.0, 0.25])
    try:
        c = [float(x) for x in coeffs]
    except (TypeError, ValueError) as exc:
        raise BadParams("coeffs must be a list of profile polynomial coefficients") from exc

    def prof(u, d):
        out = np.zeros(np.shape(u))
        for k, ck in enumerate(c):
            out = out + ck * _mono(u, k, d)
        return out

    def jets(u, v):
        z = np.zeros(np.broadcast(u, v).shape)
        u = u + z
        cv, sv = np.cos(v) + z, np.sin(v) + z
        S = _stack(prof(u, 0), u * cv, u * sv)
        Su = _stack(prof(u, 1), cv, sv)
        Sv = _stack(z, -u * sv, u * cv)
        Suu = _stack(prof(u, 2), z, z)
        Suv = _stack(z, -sv, cv)
        Svv = _stack(z, -u * cv, -u * sv)
        return S, Su, Sv, Suu, Suv, Svv

    return jets, (0.2, 1.5, -math.pi, math.pi), (False, True)


CATALOG = {
    "hyperboloid": _hyperboloid,
    "spacelike_graph": _graph,
    "spacelike_revolution": _revolution,
}


def builtin_surface(name: str, params: dict | None = None, domain=None, periodic=None) -> ParamSurface:
    """Catalog surface with analytic jets.

    ``hyperboloid``: ``r (cosh u, sinh u cos v, sinh u sin v)``;
    ``spacelike_graph``: ``(f(u,v), u, v)`` with polynomial ``f`` given as
    ``coeffs = [[i, j, c], ...]``; ``spacelike_revolution``:
    ``(h(u), u cos v, u sin v)`` with ``h`` given by its coefficient list.
    """
    if name not in CATALOG:
        raise UnknownSurface(f"unknown builtin surface {name!r}; choose from {sorted(CATALOG)}")
    params = dict(params or {})
    jets, dom, per = CATALOG[name](params)
    return ParamSurface(name=name, jet_fn=jets, domain=tuple(domain or dom),
                        periodic=tuple(per if periodic is None else periodic),
                        analytic=True, params=params)


def parse_surface_expr(src: str, domain=(-1.0, 1.0, -1.0, 1.0), periodic=(False, False),
                       step: float = FD_STEP) -> ParamSurface:
    """Surface from three component expressions; jets by Richardson-extrapolated
    central differences with step ``step * span`` per direction."""
    comps = compile_components(src)

    def value(u, v):
        return _stack(*(c(u, v) for c in comps))

    surf = ParamSurface(name="expr", jet_fn=None, domain=domain, periodic=periodic,
                        analytic=False, params={},
                        source={"kind": "expr", "components": src, "domain": list(domain),
                                "periodic": list(periodic)})
    hu, hv = step * surf.span[0], step * surf.span[1]
    surf.jet_fn = lambda u, v: partials(value, u, v, hu, hv)
    return surf


# -- JSON surface spec --------------------------------------------------------

_SPEC_KEYS = {"kind", "name", "components", "domain", "periodic", "params"}


def surface_from_spec(spec) -> ParamSurface:
    """Build a surface from a JSON document (dict, JSON text or path)."""
    if isinstance(spec, (str, Path)):
        text = str(spec)
        if isinstance(spec, Path) or not text.lstrip().startswith("{"):
            text = Path(text).read_text()
        spec = json.loads(text)
    if not isinstance(spec, dict):
        raise BadParams("surface spec must be a JSON object")
    unknown = set(spec) - _SPEC_KEYS
    if unknown:
        raise BadParams(f"unknown keys in surface spec: {sorted(unknown)}")
    kind = spec.get("kind")
    domain = spec.get("domain")
    periodic = spec.get("periodic")
    if domain is not None and len(domain) != 4:
        raise BadParams("domain must be [u0, u1, v0, v1]")
    if periodic is not None and len(periodic) != 2:
        raise BadParams("periodic must be [bool, bool]")
    if kind == "builtin":
        if "components" in spec:
            raise BadParams("builtin spec takes 'name', not 'components'")
        surf = builtin_surface(spec.get("name", ""), spec.get("params", {}), domain, periodic)
        surf.source = {k: spec[k] for k in spec}
        return surf
    if kind == "expr":
        if "name" in spec or "params" in spec:
            raise BadParams("expr spec takes 'components' only")
        comps = spec.get("components")
        if isinstance(comps, list):
            if len(comps) != 3:
                raise BadParams("components must have three entries")
            comps = ", ".join(comps)
        if not isinstance(comps, str):
            raise BadParams("components must be a string or a list of three strings")
        if domain is None:
            raise BadParams("expr spec requires a domain")
        surf = parse_surface_expr(comps, tuple(domain), tuple(periodic or (False, False)))
        surf.source = {k: spec[k] for k in spec}
        return surf
    raise BadParams(f"surface kind must be 'builtin' or 'expr', got {kind!r}")


# -- normals and spacelike verification ---------------------------------------

def surface_normal(S: ParamSurface, u: float, v: float) -> mk.Vec3M:
    """Future-pointing unit timelike normal at a single point."""
    u0, u1, v0, v1 = S.domain
    if not S.periodic[0] and not (u0 - 1e-12 <= u <= u1 + 1e-12):
        raise BadParams(f"u={u} outside domain")
    if not S.periodic[1] and not (v0 - 1e-12 <= v <= v1 + 1e-12):
        raise BadParams(f"v={v} outside domain")
    return mk.Vec3M.of(S.normals(np.float64(u), np.float64(v)))


@dataclass
class SpacelikeReport:
    passed: bool
    min_E: float
    min_det: float
    min_normal_margin: float
    grid_n: int
    failure: dict | None = None

    def to_dict(self):
        return {"passed": self.passed, "min_E": self.min_E, "min_EG_minus_F2": self.min_det,
                "min_normal_margin": self.min_normal_margin, "grid_n": self.grid_n,
                "failure": self.failure}


def first_fundamental_form(S: ParamSurface, u, v):
    _, Su, Sv, *_ = S.jets(u, v)
    return mk.inner(Su, Su), mk.inner(Su, Sv), mk.inner(Sv, Sv)


def verify_spacelike(S: ParamSurface, grid_n: int = 64) -> SpacelikeReport:
    """Check ``E > 0``, ``EG - F^2 > 0`` and a timelike normal on a grid.

    The normal margin is ``-<X,X> / |X|^2`` for ``X = S_u × S_v``; the
    report locates the worst grid node when any quantity fails.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    us, vs = S.grid(grid_n)
    U, V = np.meshgrid(us, vs, indexing="ij")
    _, Su, Sv, *_ = S.jets(U, V)
    E, F, G = mk.inner(Su, Su), mk.inner(Su, Sv), mk.inner(Sv, Sv)
    det = E * G - F * F
    X = mk.cross(Su, Sv)
    e2 = np.sum(X * X, axis=-1)
    margin = np.where(e2 > 0, -mk.inner(X, X) / np.where(e2 > 0, e2, 1.0), 0.0)
    scale = np.maximum(np.abs(E).max(), 1e-300)
    ok = (E > 1e-14 * scale) & (det > 1e-14 * scale**2) & (margin > mk.CAUSAL_TOL)
    failure = None
    if not np.all(ok):
        badness = np.minimum.reduce([E / scale, det / scale**2, margin])
        i, j = np.unravel_index(np.argmin(np.where(ok, np.inf, badness)), ok.shape)
        failure = {"cell": [int(i), int(j)], "u": float(U[i, j]), "v": float(V[i, j]),
                   "E": float(E[i, j]), "EG_minus_F2": float(det[i, j]),
                   "normal_margin": float(margin[i, j])}
    return SpacelikeReport(passed=bool(np.all(ok)), min_E=float(E.min()), min_det=float(det.min()),
                           min_normal_margin=float(margin.min()), grid_n=grid_n, failure=failure)


# -- curves on the surface ------------------------------------------------------

@dataclass
class SurfaceCurve:
    """A curve on ``surface`` given by parameter samples ``uv`` whose images
    form the uniform-arclength ``trace``."""

    surface: ParamSurface
    path: np.ndarray
    uv: np.ndarray
    trace: SampledCurve

    @property
    def closed(self):
        return self.trace.closed


def _param_spline(path, closed, tparam, period_shift):
    """Cubic spline of parameter points; closed curves may wind by ``period_shift``."""
    if closed:
        L = tparam[-1]
        data = np.vstack([path, path[:1] + period_shift])
        drift = period_shift[None, :] * (tparam[:, None] / L)
        base = CubicSpline(tparam, data - drift, bc_type="periodic", axis=0)
        return lambda t, nu=0: _with_drift(base, t, nu, period_shift, L)
    base = CubicSpline(tparam, path, bc_type="not-a-knot", axis=0)
    return lambda t, nu=0: base(t, nu)


def _with_drift(base, t, nu, shift, L):
    out = base(t, nu)
    if nu == 0:
        return out + shift[None, :] * (np.asarray(t)[..., None] / L)
    if nu == 1:
        return out + shift[None, :] / L
    return out


def _unwrap(path, surface):
    path = np.array(path, dtype=float)
    for k in (0, 1):
        if surface.periodic[k]:
            P = surface.span[k]
            d = np.diff(path[:, k])
            path[1:, k] = path[0, k] + np.cumsum(d - P * np.round(d / P))
    return path


def conormal_direction(surface, uv, tangent_uv):
    """Parameter-space direction whose image is Minkowski-orthogonal to the tangent."""
    _, Su, Sv, *_ = surface.jets(uv[:, 0], uv[:, 1])
    E, F, G = mk.inner(Su, Su), mk.inner(Su, Sv), mk.inner(Sv, Sv)
    a, b = tangent_uv[:, 0], tangent_uv[:, 1]
    return np.stack([-(F * a + G * b), E * a + F * b], axis=-1)


def project_to_level(surface, field, uv, tangent_uv, iters: int = 8):
    """Move parameter points onto ``field.value == field.level`` along the conormal.

    ``field`` provides ``value(u, v)``, ``gradient(u, v)`` and ``level``.
    Sliding along the conormal leaves arclength positions unchanged to
    second order.
    """
    uv = np.array(uv, dtype=float)
    w = conormal_direction(surface, uv, tangent_uv)
    for _ in range(iters):
        f = field.value(uv[:, 0], uv[:, 1]) - field.level
        g = field.gradient(uv[:, 0], uv[:, 1])
        slope = np.sum(g * w, axis=-1)
        step = np.where(np.abs(slope) > 0, f / np.where(slope != 0, slope, 1.0), 0.0)
        uv = uv - step[:, None] * w
        if np.max(np.abs(f)) <= 1e-15 * (1.0 + abs(field.level)):
            break
    return uv


def surface_curve(surface: ParamSurface, path, closed: bool = False, n_out: int = 1024,
                  field=None, passes: int = 2) -> SurfaceCurve:
    """Resample a parameter-space path at uniform arclength of its image.

    The path is splined against cumulative 3D chord length, the image's
    arclength is integrated by Gauss-Legendre quadrature and inverted. With
    ``field`` given (an isophote level constraint) the samples are projected
    back onto the level set and the resample/project cycle is repeated
    ``passes`` times, the dense samples replacing the original path.
    """
    path0 = np.asarray(path, dtype=float)
    if path0.ndim != 2 or path0.shape[1] != 2:
        raise ValueError("path must have shape (m, 2)")
    cur = _unwrap(path0, surface)
    shift = np.zeros(2)
    if closed:
        shift = _winding(cur, surface)
        if np.allclose(cur[0] + shift, cur[-1], rtol=0, atol=1e-12 * max(surface.span)):
            cur = cur[:-1]
            shift = _winding(cur, surface)
    if len(cur) < 4:
        raise TooFewPoints("surface curve needs at least 4 path points")
    for _ in range(max(1, passes if field is not None else 1)):
        uv, length, tang = _resample_once(surface, cur, closed, shift, n_out)
        if field is not None:
            uv = project_to_level(surface, field, uv, tang)
        cur = uv
    P = surface.eval(uv[:, 0], uv[:, 1])
    trace = SampledCurve(s=arclength_targets(length, n_out, closed), points=P, closed=closed,
                         length=length)
    return SurfaceCurve(surface=surface, path=path0, uv=uv, trace=trace)


def _winding(cur, surface):
    """Period shift accumulated around a closed unwrapped path."""
    shift = np.zeros(2)
    for k in (0, 1):
        if surface.periodic[k]:
            P = surface.span[k]
            d = cur[0, k] - cur[-1, k]
            # last segment back to the start, taken the short way round
            d_short = d - P * np.round(d / P)
            shift[k] = (cur[-1, k] + d_short) - cur[0, k]
    return shift


def _resample_once(surface, cur, closed, shift, n_out):
    pts3 = surface.eval(cur[:, 0], cur[:, 1])
    if closed:
        pts3 = np.vstack([pts3, pts3[:1]])
    d = np.diff(pts3, axis=0)
    q = mk.inner(d, d)
    if np.any(q <= 0):
        raise NonSpacelikeChord("surface path has a non-spacelike or repeated chord")
    tpar = np.concatenate([[0.0], np.cumsum(np.sqrt(q))])
    spl = _param_spline(cur, closed, tpar, shift)

    def speed(t):
        c1 = spl(t, 1)
        c0 = spl(t, 0)
        _, Su, Sv, *_ = surface.jets(c0[..., 0], c0[..., 1])
        vel = Su * c1[..., 0:1] + Sv * c1[..., 1:2]
        return np.sqrt(np.maximum(mk.inner(vel, vel), 0.0))

    _, cum = _cumulative_length(speed, tpar)
    length = float(cum[-1])
    tk, length = invert_arclength(speed, tpar, arclength_targets(length, n_out, closed))
    return spl(tk, 0), length, spl(tk, 1)


def locate_on_surface(surface: ParamSurface, points, tol: float | None = None, grid_n: int = 64):
    """Parameter values of 3D points lying on ``surface`` (Gauss-Newton).

    Raises :class:`OffSurface` when a point is farther than ``tol`` (default
    ``1e-8`` times the surface diameter) from its best parameter image.
    """
    pts = np.asarray(points, dtype=float)
    if tol is None:
        tol = 1e-8 * surface.diameter()
    us, vs = surface.grid(grid_n)
    U, V = np.meshgrid(us, vs, indexing="ij")
    G = surface.eval(U, V).reshape(-1, 3)
    uvg = np.stack([U.ravel(), V.ravel()], axis=-1)
    out = np.empty((len(pts), 2))
    prev = None
    for k, p in enumerate(pts):
        if prev is None:
            i = int(np.argmin(np.sum((G - p) ** 2, axis=1)))
            x = uvg[i].copy()
        else:
            x = prev.copy()
            i = int(np.argmin(np.sum((G - p) ** 2, axis=1)))
            if np.sum((surface.eval(*x) - p) ** 2) > np.sum((G[i] - p) ** 2):
                x = uvg[i].copy()
        for _ in range(50):
            S, Su, Sv, *_ = surface.jets(x[0], x[1])
            J = np.stack([Su, Sv], axis=-1)
            r = S - p
            dx, *_ = np.linalg.lstsq(J, -r, rcond=None)
            x = x + dx
            if np.linalg.norm(dx) <= 1e-15 * (1 + np.linalg.norm(x)):
                break
        dist = float(np.linalg.norm(surface.eval(x[0], x[1]) - p))
        if dist > tol:
            raise OffSurface(f"point {k} is {dist:.3g} from the surface (tol {tol:.3g})")
        out[k] = x
        prev = x
    return out


# -- Darboux apparatus ---------------------------------------------------------------

@dataclass
class DarbouxData:
    s: np.ndarray
    uv: np.ndarray
    T: np.ndarray
    B: np.ndarray
    N: np.ndarray
    k_n: np.ndarray
    k_g: np.ndarray
    tau_g: np.ndarray
    dk_n: np.ndarray
    dtau_g: np.ndarray
    phi: np.ndarray
    h: float
    closed: bool
    # second extraction route, kept for cross-checks
    k_n_alt: np.ndarray = None
    tau_g_alt: np.ndarray = None
    dN: np.ndarray = None

    def __len__(self):
        return len(self.s)

    @classmethod
    def from_arrays(cls, k_n, k_g, tau_g, dk_n=None, dtau_g=None, h=1.0, closed=False):
        """Scalar-only Darboux data (frames left as NaN) for formula-level work."""
        k_n = np.atleast_1d(np.asarray(k_n, float))
        n = len(k_n)
        full = lambda x: np.broadcast_to(np.asarray(x if x is not None else 0.0, float), (n,)).copy()
        nan3 = np.full((n, 3), np.nan)
        return cls(s=np.arange(n) * h, uv=np.full((n, 2), np.nan), T=nan3, B=nan3.copy(),
                   N=nan3.copy(), k_n=k_n, k_g=full(k_g), tau_g=full(tau_g), dk_n=full(dk_n),
                   dtau_g=full(dtau_g), phi=np.full(n, np.nan), h=h, closed=closed)


def darboux_apparatus(curve: SurfaceCurve) -> DarbouxData:
    """Darboux frame and curvatures along a surface curve.

    ``k_n = <N',T>``, ``tau_g = <N',B>``, ``k_g = <T',B>``; arclength
    derivatives use fourth-order differences on the uniform trace.
    """
    tr = curve.trace
    h, closed = tr.h, tr.closed
    uv = curve.uv
    try:
        N = curve.surface.normals(uv[:, 0], uv[:, 1])
    except (DegenerateJacobian, NotTimelikeNormal) as exc:
        raise FrameDegenerate(str(exc)) from exc
    d1 = derivative(tr.points, h, 1, closed)
    d2 = derivative(tr.points, h, 2, closed)
    T = d1 + mk.inner(d1, N)[:, None] * N
    tt = mk.inner(T, T)
    if np.any(tt <= 0):
        raise FrameDegenerate("tangent is not spacelike")
    T = T / np.sqrt(tt)[:, None]
    B = mk.cross(N, T)
    dN = derivative(N, h, 1, closed)
    dT = d2
    k_n = mk.inner(dN, T)
    tau_g = mk.inner(dN, B)
    k_g = mk.inner(dT, B)
    dB = derivative(B, h, 1, closed)
    k_n_alt = -mk.inner(dT, N)
    tau_g_alt = -mk.inner(dB, N)
    dk_n = derivative(k_n, h, 1, closed)
    dtau_g = derivative(tau_g, h, 1, closed)
    phi = _phi(d2, T, N, tr.length)
    return DarbouxData(s=tr.s, uv=uv, T=T, B=B, N=N, k_n=k_n, k_g=k_g, tau_g=tau_g,
                       dk_n=dk_n, dtau_g=dtau_g, phi=phi, h=h, closed=closed,
                       k_n_alt=k_n_alt, tau_g_alt=tau_g_alt, dN=dN)


def _phi(acc, T, N, length):
    """Hyperbolic angle between ``N`` and the Frenet binormal where the principal
    normal is timelike; NaN elsewhere.

    With ``n = alpha''/kappa``, ``b = n × t`` and ``sgn = -sign<n,N>`` the
    angle satisfies ``k_n = sgn kappa cosh(phi)``, ``k_g = sgn kappa sinh(phi)``.
    """
    acc = acc - mk.inner(acc, T)[:, None] * T
    q = mk.inner(acc, acc)
    kappa = np.sqrt(np.abs(q))
    ok = (q < 0) & (kappa > 1e-8 / length)
    phi = np.full(len(q), np.nan)
    if np.any(ok):
        n = acc[ok] / kappa[ok, None]
        b = mk.cross(n, T[ok])
        sgn = -np.sign(mk.inner(n, N[ok]))
        phi[ok] = np.arcsinh(-sgn * mk.inner(b, N[ok]))
    return phi


def frame_identities(dx: DarbouxData) -> dict:
    """Largest deviations of the Darboux frame from its algebraic identities."""
    T, B, N = dx.T, dx.B, dx.N
    mx = lambda a: float(np.max(np.abs(a)))
    return {
        "TT": mx(mk.inner(T, T) - 1),
        "BB": mx(mk.inner(B, B) - 1),
        "NN": mx(mk.inner(N, N) + 1),
        "TB": mx(mk.inner(T, B)),
        "TN": mx(mk.inner(T, N)),
        "BN": mx(mk.inner(B, N)),
        "NxT=B": mx(mk.cross(N, T) - B),
        "BxN=T": mx(mk.cross(B, N) - T),
        "TxB=-N": mx(mk.cross(T, B) + N),
    }


def relation_check(darboux: DarbouxData, frenet: FrenetData) -> dict:
    """Residuals of the curvature relations between the two frames.

    Always reports ``k_g^2 - k_n^2 - eps kappa^2`` (the sign-generalised form,
    which for ``eps = -1`` is ``kappa^2 = k_n^2 - k_g^2``). For ``eps = -1``
    also the hyperbolic-angle relations
    ``k_n = sgn kappa cosh(phi)``, ``k_g = sgn kappa sinh(phi)`` and
    ``tau_g = tau - phi'``.
    """
    eps = frenet.epsilon
    r = darboux.k_g**2 - darboux.k_n**2 - eps * frenet.kappa**2
    out = {"epsilon": eps, "kappa_relation": float(np.max(np.abs(r))), "phi_relations": None}
    if eps == -1 and np.all(np.isfinite(darboux.phi)):
        sgn = -np.sign(mk.inner(frenet.n, darboux.N))
        phi = darboux.phi
        dphi = derivative(phi, darboux.h, 1, darboux.closed)
        out["phi_relations"] = {
            "k_n": float(np.max(np.abs(darboux.k_n - sgn * frenet.kappa * np.cosh(phi)))),
            "k_g": float(np.max(np.abs(darboux.k_g - sgn * frenet.kappa * np.sinh(phi)))),
            "tau_g": float(np.max(np.abs(darboux.tau_g - (frenet.tau - dphi)))),
        }
    return out


def no_asymptotic_check(darboux: DarbouxData, frenet: FrenetData, tol: float = 1e-6) -> dict:
    """For curves with timelike principal normal, ``|k_n| >= kappa`` everywhere
    (since ``k_n^2 = kappa^2 + k_g^2``), so ``k_n`` never vanishes."""
    if frenet.epsilon != -1:
        return {"applicable": False, "reason": "not applicable: principal normal is spacelike (eps=+1)",
                "passed": None, "worst_margin": None}
    margin = np.abs(darboux.k_n) - frenet.kappa
    worst = float(np.min(margin))
    return {"applicable": True, "reason": None, "passed": bool(worst >= -tol),
            "worst_margin": worst, "min_abs_k_n": float(np.min(np.abs(darboux.k_n)))}


def darboux_to_rows(dx: DarbouxData) -> list[dict]:
    rows = []
    for i in range(len(dx.s)):
        rows.append({
            "s": dx.s[i], "u": dx.uv[i, 0], "v": dx.uv[i, 1],
            "T1": dx.T[i, 0], "T2": dx.T[i, 1], "T3": dx.T[i, 2],
            "B1": dx.B[i, 0], "B2": dx.B[i, 1], "B3": dx.B[i, 2],
            "N1": dx.N[i, 0], "N2": dx.N[i, 1], "N3": dx.N[i, 2],
            "k_n": dx.k_n[i], "k_g": dx.k_g[i], "tau_g": dx.tau_g[i],
            "dk_n": dx.dk_n[i], "dtau_g": dx.dtau_g[i], "phi": dx.phi[i],
        })
    return rows
