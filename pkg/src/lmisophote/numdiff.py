"""Finite-difference stencils on uniform grids and Richardson-extrapolated partials."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def fd_weights(offsets: tuple, order: int) -> np.ndarray:
    """Weights ``w`` with ``f^(order)(0) ~ sum(w_k f(offsets_k)) / h**order``.

    Solves the moment (Vandermonde) system; exact for polynomials of degree
    ``len(offsets) - 1``.
    """
    x = np.asarray(offsets, dtype=float)
    m = len(x)
    A = np.vander(x, m, increasing=True).T
    rhs = np.zeros(m)
    fact = 1.0
    for k in range(2, order + 1):
        fact *= k
    rhs[order] = fact
    return np.linalg.solve(A, rhs)


_CENTRAL = {1: (-2, -1, 0, 1, 2), 2: (-2, -1, 0, 1, 2)}


def derivative(f, h: float, order: int = 1, periodic: bool = False) -> np.ndarray:
    """Fourth-order accurate derivative of samples ``f`` (along axis 0).

    Interior points use the 5-point central stencil. Periodic data wraps;
    otherwise the two points at each end use one-sided 6-point stencils.
    """
    f = np.asarray(f, dtype=float)
    n = f.shape[0]
    if n < 6:
        raise ValueError("need at least 6 samples for fourth-order stencils")
    offs = _CENTRAL[order]
    w = fd_weights(offs, order)
    out = np.zeros_like(f)
    if periodic:
        for wk, k in zip(w, offs):
            out += wk * np.roll(f, -k, axis=0)
        return out / h**order
    for wk, k in zip(w, offs):
        out[2:n - 2] += wk * f[2 + k:n - 2 + k]
    for i in (0, 1):
        loff = tuple(range(-i, 6 - i))
        wl = fd_weights(loff, order)
        out[i] = np.tensordot(wl, f[0:6], axes=(0, 0))
        j = n - 1 - i
        roff = tuple(range(-(5 - i), i + 1))
        wr = fd_weights(roff, order)
        out[j] = np.tensordot(wr, f[n - 6:n], axes=(0, 0))
    return out / h**order


def _richardson(d_h, d_h2, p=2):
    return (2**p * d_h2 - d_h) / (2**p - 1)


def partials(func, u, v, hu: float, hv: float):
    """First and second partials of ``func(u, v) -> (..., 3)`` by central
    differences with one Richardson extrapolation step (h and h/2).

    Returns ``(f, fu, fv, fuu, fuv, fvv)``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    f0 = func(u, v)

    def first(h, k):
        fu = (func(u + h, v) - func(u - h, v)) / (2 * h)
        fv = (func(u, v + k) - func(u, v - k)) / (2 * k)
        return fu, fv

    def second(h, k):
        fuu = (func(u + h, v) - 2 * f0 + func(u - h, v)) / h**2
        fvv = (func(u, v + k) - 2 * f0 + func(u, v - k)) / k**2
        fuv = (func(u + h, v + k) - func(u + h, v - k)
               - func(u - h, v + k) + func(u - h, v - k)) / (4 * h * k)
        return fuu, fuv, fvv

    a1 = first(hu, hv)
    a2 = first(hu / 2, hv / 2)
    fu, fv = (_richardson(x, y) for x, y in zip(a1, a2))
    b1 = second(hu, hv)
    b2 = second(hu / 2, hv / 2)
    fuu, fuv, fvv = (_richardson(x, y) for x, y in zip(b1, b2))
    return f0, fu, fv, fuu, fuv, fvv
