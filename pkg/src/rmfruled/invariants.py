"""Base-curve-on-surface invariants: geodesic curvature, normal curvature,
geodesic torsion, and line-of-curvature residuals.

Two geodesic-torsion quantities are computed side by side, because they
disagree in general:

* ``geodesic_torsion`` -- the closed form < N x N', T' >, which factors
  exactly as -k_g * k_n; its zero set gives the tan(2 theta) condition.
* ``curvature_line_residual_*`` -- the Rodrigues criterion < N', N x T >,
  whose zero set is the standard line-of-curvature condition.

Every closed form here has a finite-difference oracle in this module that
depends only on surface points and normals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import EPS_REG, tangent_data
from .errors import CylindricalPoint, GeometryError, TangentRuling
from .frame import frame_angular_velocity
from .ruled import RuledSurface

# Closed-form residuals are exact identities; finite-difference-backed
# checks live in a separate error regime.
TOL_CLOSED = 1e-9
TOL_FD = 1e-5


def _ruling_normal_weight(x2: float, x3: float) -> float:
    w2 = x2 * x2 + x3 * x3
    if w2 <= EPS_REG ** 2:
        raise TangentRuling("x2 = x3 = 0: ruling is tangent to the base curve")
    return math.sqrt(w2)


def geodesic_curvature(x2: float, x3: float, theta: float, kappa: float) -> float:
    """kappa (x2 cos - x3 sin) / sqrt(x2^2 + x3^2); pointwise in the frame."""
    w = _ruling_normal_weight(x2, x3)
    return kappa * (x2 * math.cos(theta) - x3 * math.sin(theta)) / w


def normal_curvature(x2: float, x3: float, theta: float, kappa: float) -> float:
    """-kappa (x3 cos + x2 sin) / sqrt(x2^2 + x3^2)."""
    w = _ruling_normal_weight(x2, x3)
    return -kappa * (x3 * math.cos(theta) + x2 * math.sin(theta)) / w


def geodesic_torsion(x2: float, x3: float, theta: float, kappa: float) -> float:
    """-kappa^2/(x2^2+x3^2) * (sin(2 theta)(x3^2 - x2^2)/2 - cos(2 theta) x2 x3).

    Algebraically identical to -k_g * k_n.
    """
    w = _ruling_normal_weight(x2, x3)
    w2 = w * w
    return -kappa ** 2 / w2 * (0.5 * math.sin(2 * theta) * (x3 * x3 - x2 * x2)
                               - math.cos(2 * theta) * x2 * x3)


def curvature_line_residual_closed(surface: RuledSurface, s: float) -> float:
    """Rodrigues residual (x2' x3 - x2 x3')/(x2^2+x3^2) - phi, per arc length.

    Zero along the whole curve iff the base curve is a line of curvature in
    the standard sense.  phi is the frame's normal-plane rotation rate.
    """
    fd, af = surface.frame(s)
    _, j2, j3 = surface.coefficients(s)
    x2, x3 = j2.value, j3.value
    w2 = x2 * x2 + x3 * x3
    if w2 <= EPS_REG ** 2:
        raise TangentRuling("x2 = x3 = 0 at this sample")
    p2, p3 = j2.d1 / fd.speed, j3.d1 / fd.speed
    phi = frame_angular_velocity(fd, af)
    return (p2 * x3 - x2 * p3) / w2 - phi


# ---------------------------------------------------------------------------
# finite-difference oracles (surface points and normals only)


def _tangent_arc_derivative(surface: RuledSurface, s: float, h: float):
    c = surface.sdef.curve
    _, Tm, _ = tangent_data(c, s - h)
    _, Tp, _ = tangent_data(c, s + h)
    _, T, speed = tangent_data(c, s)
    return T, (Tp - Tm) / (2 * h) / speed


def geodesic_curvature_numeric(surface: RuledSurface, s: float,
                               h: float = 1e-4) -> float:
    """< N x T, T' > with a finite-difference tangent derivative."""
    n = surface.normal(s, 0.0)
    T, Tp = _tangent_arc_derivative(surface, s, h)
    return float(np.dot(np.cross(n, T), Tp))


def normal_curvature_numeric(surface: RuledSurface, s: float,
                             h: float = 1e-4) -> float:
    """< r'', N > with the second arc-length derivative by finite differences."""
    n = surface.normal(s, 0.0)
    _, Tp = _tangent_arc_derivative(surface, s, h)
    return float(np.dot(Tp, n))


def _normal_arc_derivative(surface: RuledSurface, s: float, h: float):
    nm = surface.normal(s - h, 0.0)
    np_ = surface.normal(s + h, 0.0)
    n = surface.normal(s, 0.0)
    _, _, speed = tangent_data(surface.sdef.curve, s)
    return n, (np_ - nm) / (2 * h) / speed


def geodesic_torsion_numeric(surface: RuledSurface, s: float,
                             h: float = 1e-4) -> float:
    """< N x N', T' > by finite differences of the v=0 surface normal."""
    n, dn = _normal_arc_derivative(surface, s, h)
    _, Tp = _tangent_arc_derivative(surface, s, h)
    return float(np.dot(np.cross(n, dn), Tp))


def curvature_line_residual_numeric(surface: RuledSurface, s: float,
                                    h: float = 1e-4) -> float:
    """< N', N x T > by finite differences of the v=0 surface normal."""
    n, dn = _normal_arc_derivative(surface, s, h)
    _, T, _ = tangent_data(surface.sdef.curve, s)
    return float(np.dot(dn, np.cross(n, T)))


# ---------------------------------------------------------------------------
# per-curve report


@dataclass(frozen=True)
class BaseCurveSample:
    s: float
    kappa: float
    tau: float
    theta: float
    x1: float
    x2: float
    x3: float
    P: float
    k_g: float
    k_n: float
    tau_g: float
    rho: float  # Rodrigues residual, closed form
    res_geodesic: float  # x2 cos - x3 sin
    res_asymptotic: float  # x3 cos + x2 sin
    res_curvature_line: float  # sin(2t)(x3^2-x2^2)/2 - cos(2t) x2 x3


@dataclass(frozen=True)
class BaseCurveReport:
    samples: list
    is_geodesic: bool
    is_asymptotic: bool
    is_curvature_line_frame: bool  # tan(2 theta) condition
    is_curvature_line_rodrigues: bool
    director_parallel_tangent: bool  # x2 = x3 = 0 identically
    tol: float
    excluded: list = field(default_factory=list)  # s where x2=x3~0 pointwise


def base_curve_report(surface: RuledSurface, s_values,
                      tol: float = TOL_CLOSED) -> BaseCurveReport:
    """Evaluate all closed-form invariants and condition residuals on a grid.

    Samples where the ruling is momentarily tangent (x2 = x3 = 0) carry NaN
    invariants and are excluded from the maxima; if that happens at every
    sample the director is parallel to the tangent and no condition applies.
    """
    samples = []
    excluded = []
    max_w = 0.0
    for s in s_values:
        s = float(s)
        fd, af = surface.frame(s)
        j1, j2, j3 = surface.coefficients(s)
        x1, x2, x3 = j1.value, j2.value, j3.value
        th = af.theta
        w2 = x2 * x2 + x3 * x3
        max_w = max(max_w, w2)
        try:
            P = surface.distribution_parameter(s)
        except (CylindricalPoint, GeometryError):
            P = math.nan
        if w2 <= EPS_REG ** 2:
            excluded.append(s)
            samples.append(BaseCurveSample(
                s, fd.kappa, fd.tau, th, x1, x2, x3, P,
                math.nan, math.nan, math.nan, math.nan,
                math.nan, math.nan, math.nan))
            continue
        k_g = geodesic_curvature(x2, x3, th, fd.kappa)
        k_n = normal_curvature(x2, x3, th, fd.kappa)
        t_g = geodesic_torsion(x2, x3, th, fd.kappa)
        rho = curvature_line_residual_closed(surface, s)
        c, sn = math.cos(th), math.sin(th)
        samples.append(BaseCurveSample(
            s, fd.kappa, fd.tau, th, x1, x2, x3, P, k_g, k_n, t_g, rho,
            x2 * c - x3 * sn,
            x3 * c + x2 * sn,
            0.5 * math.sin(2 * th) * (x3 * x3 - x2 * x2)
            - math.cos(2 * th) * x2 * x3))

    def finite_max(getter):
        vals = [abs(getter(r)) for r in samples if not math.isnan(getter(r))]
        return max(vals) if vals else math.nan

    parallel_tangent = max_w <= EPS_REG ** 2
    if parallel_tangent:
        flags = (False, False, False, False)
    else:
        flags = (
            finite_max(lambda r: r.res_geodesic) < tol,
            finite_max(lambda r: r.res_asymptotic) < tol,
            finite_max(lambda r: r.res_curvature_line) < tol,
            finite_max(lambda r: r.rho) < tol,
        )
    return BaseCurveReport(samples, flags[0], flags[1], flags[2], flags[3],
                           parallel_tangent, tol, excluded)
