"""Vector algebra in Lorentz-Minkowski 3-space with signature (-, +, +).

All functions accept either :class:`Vec3M` instances or array-likes whose
last axis has length 3, so the same code serves single vectors and whole
sample arrays along a curve.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotSameTimecone, NotTimelike, WrongCausalTypes

#: default relative tolerance for causal classification
CAUSAL_TOL = 1e-10


@dataclass(frozen=True)
class Vec3M:
    """A vector ``(x1, x2, x3)`` of E^3_1; ``x1`` is the timelike coordinate."""

    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        for name in ("x1", "x2", "x3"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ValueError(f"Vec3M component {name} is not finite: {val!r}")
            object.__setattr__(self, name, val)

    @classmethod
    def of(cls, v) -> "Vec3M":
        if isinstance(v, Vec3M):
            return v
        a = np.asarray(v, dtype=float).reshape(3)
        return cls(a[0], a[1], a[2])

    def __iter__(self):
        yield self.x1
        yield self.x2
        yield self.x3

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x1, self.x2, self.x3], dtype=dtype or float)

    def __add__(self, other):
        o = Vec3M.of(other)
        return Vec3M(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)

    def __sub__(self, other):
        o = Vec3M.of(other)
        return Vec3M(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)

    def __neg__(self):
        return Vec3M(-self.x1, -self.x2, -self.x3)

    def __mul__(self, k):
        return Vec3M(self.x1 * k, self.x2 * k, self.x3 * k)

    __rmul__ = __mul__

    def to_list(self) -> list[float]:
        return [self.x1, self.x2, self.x3]


E1 = Vec3M(1.0, 0.0, 0.0)
E2 = Vec3M(0.0, 1.0, 0.0)
E3 = Vec3M(0.0, 0.0, 1.0)


class CausalCharacter(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def _arr(x):
    return np.asarray(x, dtype=float)


def inner(x, y):
    """Minkowski inner product ``-x1*y1 + x2*y2 + x3*y3`` (broadcasts)."""
    if isinstance(x, Vec3M) and isinstance(y, Vec3M):
        return -x.x1 * y.x1 + x.x2 * y.x2 + x.x3 * y.x3
    a, b = _arr(x), _arr(y)
    return -a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def cross(x, y):
    """Lorentzian cross product.

    ``x × y = (x2*y3 - x3*y2, x1*y3 - x3*y1, x2*y1 - x1*y2)``, which gives
    ``e1×e2 = -e3``, ``e2×e3 = e1`` and ``e3×e1 = -e2``. The result is
    Minkowski-orthogonal to both factors and ``<x×y, z> = -det(x, y, z)``.
    """
    if isinstance(x, Vec3M) and isinstance(y, Vec3M):
        return Vec3M(
            x.x2 * y.x3 - x.x3 * y.x2,
            x.x1 * y.x3 - x.x3 * y.x1,
            x.x2 * y.x1 - x.x1 * y.x2,
        )
    a, b = np.broadcast_arrays(_arr(x), _arr(y))
    out = np.empty(a.shape, dtype=float)
    out[..., 0] = a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]
    out[..., 1] = a[..., 0] * b[..., 2] - a[..., 2] * b[..., 0]
    out[..., 2] = a[..., 1] * b[..., 0] - a[..., 0] * b[..., 1]
    return out


def norm(x):
    """``sqrt(|<x, x>|)``."""
    q = inner(x, x)
    if np.ndim(q) == 0:
        return math.sqrt(abs(float(q)))
    return np.sqrt(np.abs(q))


def euclid_norm(x):
    a = _arr(x)
    return np.sqrt(np.sum(a * a, axis=-1))


def causal_character(x, tol: float = CAUSAL_TOL) -> CausalCharacter:
    """Classify a single vector; the zero vector counts as spacelike.

    The sign test is relative: ``<x,x>`` is compared against
    ``tol * |x|_euclid^2`` so that rounding noise on a near-null vector
    does not flip its class.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    a = _arr(x).reshape(3)
    q = float(inner(a, a))
    scale = float(a @ a)
    if scale == 0.0 or q > tol * scale:
        return CausalCharacter.SPACELIKE
    if q < -tol * scale:
        return CausalCharacter.TIMELIKE
    return CausalCharacter.LIGHTLIKE


def is_timelike(x, tol: float = CAUSAL_TOL) -> bool:
    return causal_character(x, tol) is CausalCharacter.TIMELIKE


def is_spacelike(x, tol: float = CAUSAL_TOL) -> bool:
    return causal_character(x, tol) is CausalCharacter.SPACELIKE


def same_timecone(v, w) -> bool:
    """True iff two timelike vectors lie in the same timecone (``<v,w> < 0``)."""
    for name, x in (("v", v), ("w", w)):
        if not is_timelike(x):
            raise NotTimelike(f"{name} is not timelike: {tuple(_arr(x))}")
    return float(inner(v, w)) < 0.0


def hyperbolic_angle_timelike(v, w) -> float:
    """Hyperbolic angle ``theta >= 0`` with ``<v,w> = -|v||w| cosh(theta)``."""
    if not same_timecone(v, w):
        raise NotSameTimecone("timelike vectors lie in opposite timecones")
    nn = norm(v) * norm(w)
    c = -float(inner(v, w)) / nn
    # acosh is ill-conditioned near 1; small angles come from
    # <v×w, v×w> = |v|^2 |w|^2 sinh^2(theta) instead
    x = cross(_arr(v).reshape(3), _arr(w).reshape(3))
    s = math.sqrt(max(float(inner(x, x)), 0.0)) / nn
    if s < 1.0:
        return math.asinh(s)
    # reverse Cauchy-Schwarz gives c >= 1; clamp rounding below it
    return math.acosh(max(c, 1.0))


def angle_spacelike_timelike(v, w) -> float:
    """Signed angle ``arsinh(<v,w> / (|v||w|))`` for spacelike ``v``, timelike ``w``.

    The non-negative angle of the classical definition is ``abs()`` of the
    returned value; see :func:`angle_spacelike_timelike_abs`.
    """
    va, wa = _arr(v).reshape(3), _arr(w).reshape(3)
    if not (is_spacelike(va) and np.any(va != 0.0) and is_timelike(wa)):
        raise WrongCausalTypes("expected a nonzero spacelike vector and a timelike vector")
    return math.asinh(float(inner(va, wa)) / (norm(va) * norm(wa)))


def angle_spacelike_timelike_abs(v, w) -> float:
    return abs(angle_spacelike_timelike(v, w))


def boost(w, theta: float, axis: int = 2):
    """Boost ``w`` by rapidity ``theta`` in the (x1, x_axis) plane."""
    a = _arr(w).copy()
    ch, sh = math.cosh(theta), math.sinh(theta)
    t, x = a[..., 0].copy(), a[..., axis - 1].copy()
    a[..., 0] = ch * t + sh * x
    a[..., axis - 1] = sh * t + ch * x
    return a


def normalize(x):
    """Scale to ``|<x,x>| = 1`` (broadcasts); null vectors are returned unchanged."""
    a = _arr(x)
    n = norm(a)
    if np.ndim(n) == 0:
        return a / n if n > 0 else a
    n = np.where(n > 0, n, 1.0)
    return a / n[..., None]
