"""Axis recovery and characterisation of isophotes from Darboux data.

With ``W = k_n^2 + tau_g^2`` the constancy function is::

    psi = k_n^2 / W^(3/2) * (tau_g/k_n)' + k_g / W^(1/2)
        = (k_n tau_g' - tau_g k_n' + k_g W) / W^(3/2)

For an isophote with timelike axis ``|psi| = coth(theta)`` and the axis is::

    d = ±(tau_g/√W) sinh θ T ∓ (k_n/√W) sinh θ B + cosh θ N

For a spacelike axis ``|omega| = tanh(theta)`` (same expression) and::

    d = ±(tau_g/√W) cosh θ T ∓ (k_n/√W) cosh θ B − sinh θ N

Upper signs are the ``PLUS`` branch. Both branches are built and the one
whose samples agree best with a single constant vector is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import minkowski as mk
from .errors import DegenerateNormalCurvature, DenominatorVanishes, InfeasibleAngle, NotAnIsophote
from .frames import FrenetData, constancy_cv, frenet_apparatus
from .isophote import SPACELIKE, TIMELIKE
from .numdiff import derivative
from .surface import DarbouxData

PLUS = "plus"
MINUS = "minus"

CV_TOL_ANALYTIC = 1e-3
CV_TOL_FD = 1e-2
#: samples with W below this fraction of max W are excluded from statistics
W_FLOOR = 1e-10
MAX_EXCLUDED = 0.10


def default_cv_tol(surface) -> float:
    return CV_TOL_ANALYTIC if getattr(surface, "analytic", True) else CV_TOL_FD


def _check_kn(dx: DarbouxData, tol: float):
    small = np.abs(dx.k_n) <= tol
    if np.any(small):
        raise DegenerateNormalCurvature(
            f"|k_n| <= {tol:g} at {int(small.sum())} samples (first at s={dx.s[np.argmax(small)]:.6g})")


def psi_function(darboux: DarbouxData, kn_tol: float = 1e-10) -> np.ndarray:
    """Per-sample constancy function; equals ``∓coth(theta)`` on timelike-axis isophotes.

    Samples with degenerate ``W = k_n^2 + tau_g^2`` come back as NaN.
    """
    _check_kn(darboux, kn_tol)
    kn, tg, kg = darboux.k_n, darboux.tau_g, darboux.k_g
    W = kn**2 + tg**2
    ok = W > W_FLOOR * np.max(W)
    out = np.full(len(W), np.nan)
    num = kn * darboux.dtau_g - tg * darboux.dk_n + kg * W
    out[ok] = num[ok] / W[ok] ** 1.5
    return out


def omega_function(darboux: DarbouxData, kn_tol: float = 1e-10) -> np.ndarray:
    """Same expression as :func:`psi_function`, read against ``tanh(theta)``."""
    return psi_function(darboux, kn_tol)


@dataclass
class AxisReport:
    kind: str
    d_samples: np.ndarray
    d_mean: mk.Vec3M
    residual_max: float
    theta_hat: float
    psi: np.ndarray
    omega: np.ndarray
    constancy_cv: float
    sign_branch: str
    flags: dict
    s: np.ndarray
    h: float
    closed: bool
    alt_residual: float = math.nan
    n_excluded: int = 0
    forced_theta: bool = False
    extras: dict = field(default_factory=dict)

    def to_dict(self, verbose: bool = False) -> dict:
        out = {
            "kind": self.kind,
            "d_mean": self.d_mean.to_list(),
            "residual_max": self.residual_max,
            "alt_branch_residual": self.alt_residual,
            "theta_hat": self.theta_hat,
            "constancy_cv": self.constancy_cv,
            "sign_branch": self.sign_branch,
            "flags": dict(self.flags),
            "n_samples": int(len(self.s)),
            "n_excluded": self.n_excluded,
            "forced_theta": self.forced_theta,
        }
        out.update(self.extras)
        if verbose:
            out["s"] = self.s.tolist()
            out["d_samples"] = self.d_samples.tolist()
            out["psi"] = _nan_to_none(self.psi)
            out["omega"] = _nan_to_none(self.omega)
        return out


def _nan_to_none(a):
    return [None if not math.isfinite(x) else float(x) for x in np.asarray(a, float)]


def axis_samples(darboux: DarbouxData, kind: str, theta: float, branch: str) -> np.ndarray:
    """Per-sample axis from the Darboux frame for one sign branch."""
    sg = 1.0 if branch == PLUS else -1.0
    kn, tg = darboux.k_n, darboux.tau_g
    rw = np.sqrt(kn**2 + tg**2)
    if kind == TIMELIKE:
        a, c = math.sinh(theta), math.cosh(theta)
        return ((sg * tg / rw * a)[:, None] * darboux.T
                - (sg * kn / rw * a)[:, None] * darboux.B + c * darboux.N)
    a, c = math.cosh(theta), math.sinh(theta)
    return ((sg * tg / rw * a)[:, None] * darboux.T
            - (sg * kn / rw * a)[:, None] * darboux.B - c * darboux.N)


def _mean_axis(ds, kind):
    m = ds.mean(axis=0)
    m = mk.normalize(m)
    if kind == TIMELIKE and m[0] < 0:
        m = -m
    return m


def theta_from_mean(mean: float, kind: str) -> float:
    if kind == TIMELIKE:
        if not abs(mean) > 1.0:
            raise InfeasibleAngle(f"|mean psi| = {abs(mean):.6g} <= 1: no timelike axis (coth theta > 1)")
        return math.atanh(1.0 / abs(mean))
    if not abs(mean) < 1.0:
        raise InfeasibleAngle(f"|mean omega| = {abs(mean):.6g} >= 1: no spacelike axis (tanh theta < 1)")
    if abs(mean) <= 1e-12:
        raise InfeasibleAngle("mean omega = 0 would be the excluded silhouette theta = 0")
    return math.atanh(abs(mean))


def reconstruct_axis(darboux: DarbouxData, kind: str, cv_tol: float = CV_TOL_ANALYTIC,
                     theta: float | None = None, flag_tol: float = 1e-6) -> AxisReport:
    """Recover the isophote axis.

    ``theta`` comes from the mean of psi (timelike: ``coth``) or omega
    (spacelike: ``tanh``) unless given explicitly, in which case the
    feasibility and constancy tests are skipped (used for negative
    controls).
    """
    kind = kind.lower()
    if kind not in (TIMELIKE, SPACELIKE):
        raise ValueError(f"unknown axis kind {kind!r}")
    vals = psi_function(darboux)
    valid = np.isfinite(vals)
    n_excl = int((~valid).sum())
    if theta is None and n_excl > MAX_EXCLUDED * len(vals):
        raise NotAnIsophote(f"{n_excl} of {len(vals)} samples have degenerate k_n^2 + tau_g^2")
    mean = float(np.mean(vals[valid])) if valid.any() else math.nan
    cv = constancy_cv(vals[valid])
    forced = theta is not None
    if not forced:
        if not cv <= cv_tol:
            raise NotAnIsophote(f"constancy test failed: cv = {cv:.3g} > {cv_tol:g}")
        theta = theta_from_mean(mean, kind)
    branches = {}
    for br in (PLUS, MINUS):
        ds = axis_samples(darboux, kind, theta, br)
        dm = _mean_axis(ds[valid], kind)
        res = float(np.max(np.linalg.norm(ds[valid] - dm, axis=1)))
        branches[br] = (res, ds, dm)
    best = min(branches, key=lambda b: branches[b][0])
    other = MINUS if best == PLUS else PLUS
    res, ds, dm = branches[best]
    scale = max(1.0, float(np.max(np.abs(darboux.k_n))))
    flags = {
        "is_geodesic": bool(np.max(np.abs(darboux.k_g)) <= flag_tol * scale),
        "is_line_of_curvature": bool(np.max(np.abs(darboux.tau_g)) <= flag_tol * scale),
        "is_slant_helix": None,
        "psi_constant": bool(cv <= cv_tol) if kind == TIMELIKE else None,
        "omega_constant": bool(cv <= cv_tol) if kind == SPACELIKE else None,
    }
    return AxisReport(kind=kind, d_samples=ds, d_mean=mk.Vec3M.of(dm), residual_max=res,
                      theta_hat=float(theta), psi=vals if kind == TIMELIKE else np.full(len(vals), np.nan),
                      omega=vals if kind == SPACELIKE else np.full(len(vals), np.nan),
                      constancy_cv=cv, sign_branch=best, flags=flags, s=darboux.s, h=darboux.h,
                      closed=darboux.closed, alt_residual=branches[other][0], n_excluded=n_excl,
                      forced_theta=forced, extras={"mean_constancy_function": mean})


def angle_consistency(darboux: DarbouxData, kind: str, theta_ref: float | None = None,
                      den_tol: float = 1e-9) -> dict:
    """Per-sample angle from the closed-form ratio ``W^(3/2) / D`` with
    ``D = k_g W + tau_g' k_n - k_n' tau_g``.

    Timelike axis: ``tanh(theta) = |W^(3/2)/D|``; spacelike: ``coth(theta) = |W^(3/2)/D|``.
    Samples with ``|D|`` below ``den_tol * W^(3/2)`` are excluded and counted.
    """
    kind = kind.lower()
    kn, tg, kg = darboux.k_n, darboux.tau_g, darboux.k_g
    W = kn**2 + tg**2
    W32 = W**1.5
    den = kg * W + darboux.dtau_g * kn - darboux.dk_n * tg
    ok = np.abs(den) > den_tol * np.maximum(W32, 1e-300)
    n_excl = int((~ok).sum())
    if not ok.any():
        raise DenominatorVanishes("k_g W + (tau_g' k_n - k_n' tau_g) vanishes at every sample")
    r = np.abs(W32[ok] / den[ok])
    theta = np.full(len(W), np.nan)
    if kind == TIMELIKE:
        inrange = r < 1.0
        vals = np.where(inrange, np.arctanh(np.minimum(r, 1 - 1e-16)), np.nan)
    else:
        inrange = r > 1.0
        vals = np.where(inrange, np.arctanh(np.minimum(1.0 / r, 1 - 1e-16)), np.nan)
    theta[ok] = vals
    good = np.isfinite(theta)
    out = {
        "kind": kind,
        "theta_samples": theta,
        "theta_mean": float(np.mean(theta[good])) if good.any() else math.nan,
        "n_excluded": n_excl,
        "n_out_of_range": int((~inrange).sum()),
        "max_discrepancy": None,
    }
    if theta_ref is not None and good.any():
        out["max_discrepancy"] = float(np.max(np.abs(theta[good] - theta_ref)))
    return out


def verify_axis_constant(report: AxisReport, tol: float = 1e-4) -> bool:
    """``d' = 0`` check: small spread about the mean and small difference quotients."""
    ds = report.d_samples
    if len(ds) < 8:
        raise ValueError("need at least 8 samples")
    if not report.residual_max <= tol:
        return False
    if report.closed:
        dd = (np.roll(ds, -1, axis=0) - np.roll(ds, 1, axis=0)) / (2 * report.h)
    else:
        dd = (ds[2:] - ds[:-2]) / (2 * report.h)
    return bool(np.all(np.linalg.norm(dd, axis=1) <= tol / report.h))


def per_sample_checks(darboux: DarbouxData, report: AxisReport) -> dict:
    """Pointwise identities of the reconstructed axis: unit norm, the
    prescribed ``<N,d>`` and ``<N',d> = 0``."""
    ds = report.d_samples
    target_norm = -1.0 if report.kind == TIMELIKE else 1.0
    level = -math.cosh(report.theta_hat) if report.kind == TIMELIKE else math.sinh(report.theta_hat)
    dN = darboux.dN if darboux.dN is not None else derivative(darboux.N, darboux.h, 1, darboux.closed)
    return {
        "norm_dev": float(np.max(np.abs(mk.inner(ds, ds) - target_norm))),
        "level_dev": float(np.max(np.abs(mk.inner(darboux.N, ds) - level))),
        "dN_d": float(np.max(np.abs(mk.inner(dN, ds)))),
        "level": level,
    }


def classify(darboux: DarbouxData, frenet: FrenetData | None, report: AxisReport,
             tol: float = 1e-6, helix_tol: float = 1e-3) -> dict:
    """Flags and classification battery for one curve.

    Items whose hypotheses need a timelike principal normal are reported as
    not applicable when ``eps = +1``. Battery failures are findings, not
    errors.
    """
    kind = report.kind
    scale = max(1.0, float(np.max(np.abs(darboux.k_n))))
    is_geo = bool(np.max(np.abs(darboux.k_g)) <= tol * scale)
    is_loc = bool(np.max(np.abs(darboux.tau_g)) <= tol * scale)
    eps = frenet.epsilon if frenet is not None else None
    d = np.asarray(report.d_mean)
    Td = mk.inner(darboux.T, d)
    Bd = mk.inner(darboux.B, d)
    battery = {}

    helix = None
    n_d_cv = None
    if frenet is not None:
        helix = bool(constancy_cv(frenet.sigma) <= helix_tol)
        n_d = mk.inner(frenet.n, d)
        n_d_cv = constancy_cv(n_d)
    flags = {
        "is_geodesic": is_geo,
        "is_line_of_curvature": is_loc,
        "is_slant_helix": helix,
        "psi_constant": report.flags.get("psi_constant"),
        "omega_constant": report.flags.get("omega_constant"),
        "epsilon": eps,
    }

    # (a) geodesic <=> slant helix (principal normal at constant angle to d)
    if eps is None:
        battery["geodesic_slant_helix"] = {"status": "not applicable (no Frenet frame)"}
    elif eps != -1:
        battery["geodesic_slant_helix"] = {"status": "not applicable (eps=+1)"}
    else:
        helix_d = bool(n_d_cv <= helix_tol)
        forward = (not is_geo) or (helix and helix_d)
        converse = (not (helix and helix_d)) or is_geo
        battery["geodesic_slant_helix"] = {
            "status": "holds" if forward and converse else "violated",
            "geodesic_implies_helix": bool(forward),
            "helix_implies_geodesic": bool(converse),
            "sigma_constant": helix, "n_dot_d_cv": n_d_cv,
        }

    if kind == TIMELIKE:
        # (b) no timelike-axis isophote is a line of curvature
        if eps == -1:
            battery["not_line_of_curvature"] = {"status": "holds" if not is_loc else "violated"}
        else:
            battery["not_line_of_curvature"] = {
                "status": f"not applicable (eps={'+1' if eps == 1 else eps})",
                "is_line_of_curvature": is_loc}
        # (c) d is not perpendicular to T (needs tau_g != 0) nor to B
        tmin, bmin = float(np.min(np.abs(Td))), float(np.min(np.abs(Bd)))
        battery["axis_not_perpendicular_B"] = {"status": "holds" if bmin > tol else "violated",
                                               "min_abs_B_d": bmin}
        battery["axis_not_perpendicular_T"] = {
            "status": ("holds" if tmin > tol else "violated") if eps == -1 else "not applicable (eps=+1)",
            "min_abs_T_d": tmin}
    else:
        tmax, bmin = float(np.max(np.abs(Td))), float(np.min(np.abs(Bd)))
        t_zero = tmax <= 10 * tol
        battery["T_perp_iff_line_of_curvature"] = {
            "status": "holds" if t_zero == is_loc else "violated",
            "max_abs_T_d": tmax, "is_line_of_curvature": is_loc}
        battery["axis_not_perpendicular_B"] = {"status": "holds" if bmin > tol else "violated",
                                               "min_abs_B_d": bmin}
        # (d) line of curvature => plane curve
        if is_loc:
            if frenet is None:
                battery["line_of_curvature_plane"] = {"status": "not applicable (no Frenet frame)"}
            else:
                tau_max = float(np.max(np.abs(frenet.tau)))
                battery["line_of_curvature_plane"] = {
                    "status": "holds" if tau_max <= 1e-4 else "violated", "max_abs_tau": tau_max}
        else:
            battery["line_of_curvature_plane"] = {"status": "not applicable (tau_g != 0)"}
    return {"flags": flags, "battery": battery}


def gauss_image_check(darboux: DarbouxData, axis, tol: float = 1e-6) -> dict:
    """Latitude-circle test for the Gauss map ``s -> N(s)``.

    ``axis`` is an :class:`AxisReport` or an axis vector. Checks
    ``<N,N> = -1`` and constancy of ``<N,d>``; then compares the signed
    squared curvature of the Gauss image, obtained from differences of the
    ``N`` samples as ``<N'×N'', N'×N''> / <N',N'>^3``, with ``1 - psi^2``.
    The geodesic curvature of the image follows as ``sqrt(1 - kappa_bar^2) = |psi|``.
    """
    d = np.asarray(axis.d_mean if isinstance(axis, AxisReport) else axis, dtype=float)
    N = darboux.N
    nn_dev = float(np.max(np.abs(mk.inner(N, N) + 1)))
    g = mk.inner(N, d)
    spread = float(np.max(g) - np.min(g))
    latitude = bool(spread <= tol * (1 + abs(float(np.mean(g)))))
    dN = derivative(N, darboux.h, 1, darboux.closed)
    speed2 = mk.inner(dN, dN)
    out = {"normal_norm_dev": nn_dev, "level_spread": spread, "level_mean": float(np.mean(g)),
           "latitude": latitude, "degenerate": False}
    if float(np.max(np.abs(speed2))) <= 1e-20:
        out.update(degenerate=True, reason="Gauss image is a single point (zero speed)")
        out["passed"] = latitude and nn_dev <= tol
        return out
    d2N = derivative(N, darboux.h, 2, darboux.closed)
    X = mk.cross(dN, d2N)
    ok = speed2 > W_FLOOR * np.max(speed2)
    kbar2 = np.full(len(N), np.nan)
    kbar2[ok] = mk.inner(X[ok], X[ok]) / speed2[ok] ** 3
    psi = psi_function(darboux, kn_tol=0.0)
    formula = 1.0 - psi**2
    good = ok & np.isfinite(psi)
    disc = float(np.max(np.abs(kbar2[good] - formula[good]))) if good.any() else math.nan
    kbar_g = np.sqrt(np.maximum(1.0 - kbar2[good], 0.0))
    out.update(
        kappa_bar_sq_mean=float(np.nanmean(kbar2)),
        kappa_bar_sq_formula_mean=float(np.nanmean(formula)),
        curvature_discrepancy=disc,
        geodesic_curvature_mean=float(np.mean(kbar_g)) if good.any() else math.nan,
        abs_psi_mean=float(np.nanmean(np.abs(psi))),
    )
    out["passed"] = bool(latitude and nn_dev <= tol and disc <= 1e-4 * (1 + float(np.nanmax(np.abs(formula)))))
    return out


def analyze_curve(curve, kind: str, cv_tol: float | None = None):
    """Darboux data, Frenet data (if defined), axis report and classification
    for a surface curve. Raises :class:`NotAnIsophote` when the constancy
    test fails."""
    from .surface import darboux_apparatus

    dx = darboux_apparatus(curve)
    try:
        fr = frenet_apparatus(curve.trace)
    except Exception:  # noqa: BLE001 - Frenet frame undefined on this curve
        fr = None
    if cv_tol is None:
        cv_tol = default_cv_tol(curve.surface)
    rep = reconstruct_axis(dx, kind, cv_tol=cv_tol)
    rep.flags.update(classify(dx, fr, rep)["flags"])
    return dx, fr, rep
