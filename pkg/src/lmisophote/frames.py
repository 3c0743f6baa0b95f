"""Frenet apparatus of unit-speed spacelike curves in E^3_1.

Frame convention (spacelike curve, arclength ``s``)::

    t' =        kappa n
    n' = -eps kappa t        + tau b
    b' =               tau n

with ``<t,t> = 1``, ``<n,n> = eps``, ``<b,b> = -eps``. Here
``n = alpha''/kappa`` and ``b = n × t``; with this orientation a geodesic of a
spacelike surface (``n = N``) has ``b = B`` and ``tau = tau_g``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from . import minkowski as mk
from .errors import (
    DegenerateCurvature,
    MixedCurveKind,
    NonSpacelikeChord,
    NullPrincipalNormal,
    TooFewPoints,
)
from .numdiff import derivative

# Gauss-Legendre nodes on [0, 1] for per-interval arclength integration
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True)
class SampledCurve:
    """Uniform-arclength samples of a spacelike curve.

    For closed curves the last sample is *not* repeated; ``length`` is the
    full period so that ``s[k] = k * length / n``.
    """

    s: np.ndarray
    points: np.ndarray
    closed: bool
    length: float

    def __len__(self):
        return len(self.s)

    @property
    def h(self) -> float:
        if self.closed:
            return self.length / len(self.s)
        return self.length / (len(self.s) - 1)


@dataclass(frozen=True)
class FrenetData:
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    epsilon: int
    sigma: np.ndarray
    h: float
    closed: bool


def constancy_cv(values) -> float:
    """Scale-free spread statistic ``std / (1 + |mean|)``."""
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return math.inf
    return float(np.std(a) / (1.0 + abs(np.mean(a))))


# -- arclength machinery ---------------------------------------------------

def _cumulative_length(speed, breaks, sub=4):
    """Arclength at refined nodes of ``breaks`` by 8-point Gauss-Legendre."""
    t = np.asarray(breaks, dtype=float)
    frac = np.linspace(0.0, 1.0, sub + 1)[:-1]
    nodes = (t[:-1, None] + np.diff(t)[:, None] * frac[None, :]).ravel()
    nodes = np.append(nodes, t[-1])
    a, b = nodes[:-1], nodes[1:]
    x = a[:, None] + (b - a)[:, None] * _GL_X[None, :]
    seg = (speed(x.ravel()).reshape(x.shape) * _GL_W[None, :]).sum(axis=1) * (b - a)
    return nodes, np.concatenate([[0.0], np.cumsum(seg)])


def invert_arclength(speed, breaks, targets, sub=4):
    """Parameter values at which the arclength reaches ``targets``.

    ``speed`` is a vectorised callable ``t -> |c'(t)|``. Newton's method is
    run inside the bracketing sub-interval, falling back to bisection.
    Returns ``(t_values, total_length)``.
    """
    nodes, cum = _cumulative_length(speed, breaks, sub)
    targets = np.asarray(targets, dtype=float)
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(nodes) - 2)
    lo, hi = nodes[idx].copy(), nodes[idx + 1].copy()
    base = cum[idx]
    t = lo + (hi - lo) * np.clip((targets - base) / np.maximum(cum[idx + 1] - base, 1e-300), 0, 1)

    def partial(a, b):
        x = a[:, None] + (b - a)[:, None] * _GL_X[None, :]
        return (speed(x.ravel()).reshape(x.shape) * _GL_W[None, :]).sum(axis=1) * (b - a)

    a0 = nodes[idx]
    for _ in range(30):
        g = base + partial(a0, t) - targets
        lo = np.where(g < 0, t, lo)
        hi = np.where(g > 0, t, hi)
        sp = speed(t)
        step = g / np.where(sp > 0, sp, 1.0)
        tn = t - step
        bad = (tn <= lo) | (tn >= hi) | ~np.isfinite(tn)
        tn = np.where(bad, 0.5 * (lo + hi), tn)
        done = np.abs(tn - t) <= 1e-15 * (1.0 + np.abs(t))
        t = tn
        if np.all(done):
            break
    return t, float(cum[-1])


def arclength_targets(length: float, n_out: int, closed: bool) -> np.ndarray:
    if closed:
        return np.arange(n_out) * (length / n_out)
    return np.linspace(0.0, length, n_out)


def _check_chords(pts):
    d = np.diff(pts, axis=0)
    e2 = np.sum(d * d, axis=1)
    if np.any(e2 == 0.0):
        raise NonSpacelikeChord("consecutive points coincide")
    q = mk.inner(d, d)
    if np.any(q <= mk.CAUSAL_TOL * e2):
        i = int(np.argmax(q <= mk.CAUSAL_TOL * e2))
        raise NonSpacelikeChord(f"chord {i} is not spacelike")
    return np.sqrt(q)


def chord_spline(pts, closed: bool):
    """Cubic spline of ``pts`` against cumulative Minkowski chord length."""
    pts = np.asarray(pts, dtype=float)
    if closed:
        if np.array_equal(pts[0], pts[-1]):
            pts = pts[:-1]
        pts = np.vstack([pts, pts[:1]])
    chords = _check_chords(pts)
    t = np.concatenate([[0.0], np.cumsum(chords)])
    spl = CubicSpline(t, pts, bc_type="periodic" if closed else "not-a-knot", axis=0)
    return spl, t


def arclength_resample(points, n_out: int, closed: bool = False) -> SampledCurve:
    """Resample a spacelike polyline at uniform arclength.

    Cumulative-chord cubic spline; the spline's own arclength is integrated
    by Gauss-Legendre quadrature and inverted with Newton steps.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must have shape (m, 3)")
    uniq = len(pts) - (1 if closed and len(pts) > 1 and np.array_equal(pts[0], pts[-1]) else 0)
    if uniq < 4:
        raise TooFewPoints(f"need at least 4 points, got {uniq}")
    if n_out < 6:
        raise TooFewPoints("n_out must be at least 6")
    spl, t = chord_spline(pts, closed)
    dspl = spl.derivative()

    def speed(x):
        d = dspl(x)
        return np.sqrt(np.maximum(mk.inner(d, d), 0.0))

    _, cum = _cumulative_length(speed, t)
    total = float(cum[-1])
    targets = arclength_targets(total, n_out, closed)
    tk, total = invert_arclength(speed, t, targets)
    return SampledCurve(s=targets, points=spl(tk), closed=closed, length=total)


def curve_from_function(func, s0: float, s1: float, n: int, closed: bool = False) -> SampledCurve:
    """Sample an already unit-speed parameterisation ``func(s) -> (n, 3)``."""
    length = s1 - s0
    s = arclength_targets(length, n, closed)
    return SampledCurve(s=s, points=np.asarray(func(s0 + s), dtype=float), closed=closed, length=length)


# -- Frenet ---------------------------------------------------------------

def _project_out(x, t):
    """Remove the component of ``x`` along the unit spacelike ``t``."""
    return x - mk.inner(x, t)[..., None] * t


def frenet_apparatus(curve: SampledCurve, kappa_min: float | None = None,
                     null_tol: float = 1e-8) -> FrenetData:
    h = curve.h
    p = curve.points
    d1 = derivative(p, h, 1, curve.closed)
    d2 = derivative(p, h, 2, curve.closed)
    t = mk.normalize(d1)
    acc = _project_out(d2, t)
    q = mk.inner(acc, acc)
    e2 = np.sum(acc * acc, axis=1)
    kappa = np.sqrt(np.abs(q))
    if kappa_min is None:
        kappa_min = 1e-8 / curve.length
    if np.any(np.sqrt(e2) <= kappa_min):
        raise DegenerateCurvature(f"acceleration below {kappa_min:g} at {int(np.argmin(e2))}")
    if np.any(np.abs(q) <= null_tol * e2):
        raise NullPrincipalNormal("principal normal is (nearly) lightlike")
    if np.any(kappa <= kappa_min):
        raise DegenerateCurvature(f"curvature below {kappa_min:g} at {int(np.argmin(kappa))}")
    signs = np.sign(q)
    if not (np.all(signs > 0) or np.all(signs < 0)):
        raise MixedCurveKind("principal normal changes causal character along the curve")
    eps = int(signs[0])
    n = acc / kappa[:, None]
    b = mk.cross(n, t)
    dn = derivative(n, h, 1, curve.closed)
    tau = mk.inner(dn, b) / mk.inner(b, b)
    sigma = sigma_from_curvatures(kappa, tau, h, curve.closed)
    return FrenetData(t=t, n=n, b=b, kappa=kappa, tau=tau, epsilon=eps, sigma=sigma,
                      h=h, closed=curve.closed)


def sigma_from_curvatures(kappa, tau, h: float, periodic: bool = False) -> np.ndarray:
    """``kappa^2 / (kappa^2 + tau^2)^(3/2) * (tau/kappa)'`` on a uniform grid."""
    kappa = np.asarray(kappa, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(kappa == 0.0):
        raise DegenerateCurvature("kappa vanishes")
    w = kappa**2 + tau**2
    ratio_d = derivative(tau / kappa, h, 1, periodic)
    return kappa**2 / w**1.5 * ratio_d


def slant_helix_sigma(frenet: FrenetData) -> np.ndarray:
    return frenet.sigma


def is_slant_helix(frenet_or_sigma, tol: float = 1e-3) -> bool:
    """Constancy test on sigma: ``std / (1 + |mean|) <= tol``.

    The underlying characterisation is stated for curves with timelike
    principal normal; callers should read ``frenet.epsilon`` alongside.
    """
    sigma = frenet_or_sigma.sigma if isinstance(frenet_or_sigma, FrenetData) else frenet_or_sigma
    return constancy_cv(sigma) <= tol


def frame_residuals(fr: FrenetData) -> dict:
    """Largest deviations from the orthonormality relations."""
    t, n, b, e = fr.t, fr.n, fr.b, fr.epsilon
    return {
        "tt": float(np.max(np.abs(mk.inner(t, t) - 1))),
        "nn": float(np.max(np.abs(mk.inner(n, n) - e))),
        "bb": float(np.max(np.abs(mk.inner(b, b) + e))),
        "tn": float(np.max(np.abs(mk.inner(t, n)))),
        "tb": float(np.max(np.abs(mk.inner(t, b)))),
        "nb": float(np.max(np.abs(mk.inner(n, b)))),
    }


# -- CSV exchange -----------------------------------------------------------

CSV_HEADER = ["s", "x1", "x2", "x3"]


def write_curve_csv(curve: SampledCurve, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for s, p in zip(curve.s, curve.points):
        w.writerow([repr(float(s))] + [repr(float(x)) for x in p])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_curve_csv(source) -> tuple[np.ndarray, np.ndarray]:
    """Parse ``s,x1,x2,x3`` CSV text or file; returns ``(s, points)``."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and Path(source).exists()):
        text = Path(source).read_text()
    else:
        text = str(source)
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != CSV_HEADER:
        raise ValueError(f"curve CSV must start with header {','.join(CSV_HEADER)}")
    data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    if data.ndim != 2 or data.shape[1] != 4:
        raise ValueError("curve CSV rows must have 4 columns")
    return data[:, 0], data[:, 1:]
