"""Adapted frames {T, U, V} along a curve.

Two policies fix the angle theta between the principal normal N and U:

* :class:`RotationMinimizing` -- theta solves d(theta)/dt = -|r'| * tau from
  an initial angle, so the normal-plane rotation rate vanishes (true RMF).
* :class:`ExplicitTheta` -- theta(s) is a user-supplied expression.

The frame itself is U = cos(theta) N + sin(theta) B, V = -sin(theta) N +
cos(theta) B.  Discrete RMF propagation via double reflection is provided
both as a standalone operation and as the fallback for integrating theta
across curvature-free points, where tau is undefined but the RMF is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import expr as ex
from .curve import CurveDef, FrenetData, frenet, tangent_data
from .errors import VanishingCurvature


@dataclass(frozen=True)
class RotationMinimizing:
    """True RMF with initial angle theta0 (radians) at the range start."""

    theta0: float = 0.0


@dataclass(frozen=True)
class ExplicitTheta:
    """User-supplied theta(s); must be differentiable on the full range."""

    theta: ex.Expr

    @staticmethod
    def from_string(text: str) -> "ExplicitTheta":
        return ExplicitTheta(ex.parse(text))


ThetaPolicy = Union[RotationMinimizing, ExplicitTheta]


@dataclass(frozen=True)
class AdaptedFrame:
    """Orthonormal right-handed {T, U, V} with the angle and its t-derivative."""

    T: np.ndarray
    U: np.ndarray
    V: np.ndarray
    theta: float
    theta_prime: float  # d(theta)/dt in the curve parameter


def adapted_frame(fd: FrenetData, theta: float, theta_prime: float) -> AdaptedFrame:
    """Rotate (N, B) by theta in the normal plane."""
    c, s = math.cos(theta), math.sin(theta)
    U = c * fd.N + s * fd.B
    V = -s * fd.N + c * fd.B
    return AdaptedFrame(fd.T, U, V, theta, theta_prime)


def frame_derivatives(fd: FrenetData, af: AdaptedFrame):
    """Arc-length derivatives (T', U', V') of a general adapted frame.

    With phi = theta'/|r'| + tau:  U' = -kappa cos(theta) T + phi V and
    V' = kappa sin(theta) T - phi U.  phi = 0 recovers the RMF rules, where
    U' and V' are parallel to the tangent.
    """
    phi = af.theta_prime / fd.speed + fd.tau
    c, s = math.cos(af.theta), math.sin(af.theta)
    dT = fd.kappa * fd.N
    dU = -fd.kappa * c * fd.T + phi * af.V
    dV = fd.kappa * s * fd.T - phi * af.U
    return dT, dU, dV


def frame_angular_velocity(fd: FrenetData, af: AdaptedFrame) -> float:
    """Normal-plane rotation rate phi = theta'/|r'| + tau (zero for the RMF)."""
    return af.theta_prime / fd.speed + fd.tau


# ---------------------------------------------------------------------------
# theta integration


def _theta_rate(c: CurveDef, t: float) -> float:
    fd = frenet(c, t)
    return -fd.speed * fd.tau


def _rk4_segment(c: CurveDef, t0: float, t1: float, theta: float,
                 substeps: int) -> float:
    h = (t1 - t0) / substeps
    for i in range(substeps):
        a = t0 + i * h
        k1 = _theta_rate(c, a)
        k2 = _theta_rate(c, a + 0.5 * h)
        k3 = k2  # rate is independent of theta
        k4 = _theta_rate(c, a + h)
        theta += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return theta


def _theta_across_flat(c: CurveDef, t0: float, t1: float, theta0: float,
                       n_sub: int = 33) -> float:
    """Carry theta over an interval containing curvature-free points.

    Propagates U by double reflection (defined for any regular curve) and
    re-extracts theta where the principal normal exists again.  The 2*pi
    branch is chosen closest to the incoming angle.
    """
    ts = np.linspace(t0, t1, n_sub)
    pts, tans = [], []
    for t in ts:
        pos, T, _ = tangent_data(c, float(t))
        pts.append(pos)
        tans.append(T)
    fd0 = frenet(c, t0)  # endpoints must admit a Frenet frame
    af0 = adapted_frame(fd0, theta0, 0.0)
    U, _ = double_reflection(pts, tans, af0.U)
    fd1 = frenet(c, t1)
    u_end = U[-1]
    theta1 = math.atan2(float(np.dot(u_end, fd1.B)), float(np.dot(u_end, fd1.N)))
    theta1 += 2.0 * math.pi * round((theta0 - theta1) / (2.0 * math.pi))
    return theta1


def theta_rmf(c: CurveDef, theta0: float, grid, substeps: int = 4,
              flat_fallback: bool = True) -> np.ndarray:
    """Integrate d(theta)/dt = -|r'| tau over an increasing parameter grid.

    Classical 4th-order one-step method with ``substeps`` substeps per grid
    interval.  Intervals where the curvature vanishes are bridged by double
    reflection when ``flat_fallback`` is set, and raise otherwise.
    Returns theta values aligned with the grid; theta is kept unwrapped.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2:
        raise ValueError("grid must hold at least two parameter values")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    thetas = np.empty(len(grid))
    thetas[0] = theta0
    k = 0
    while k < len(grid) - 1:
        try:
            thetas[k + 1] = _rk4_segment(c, float(grid[k]), float(grid[k + 1]),
                                         float(thetas[k]), substeps)
            k += 1
            continue
        except VanishingCurvature:
            if not flat_fallback:
                raise
        # Bridge to the next node where the Frenet frame exists again; the
        # gap nodes themselves have no defined angle and get interpolated
        # placeholders (no adapted frame exists there anyway).
        j = k + 1
        while True:
            try:
                thetas[j] = _theta_across_flat(c, float(grid[k]), float(grid[j]),
                                               float(thetas[k]))
                break
            except VanishingCurvature:
                j += 1
                if j >= len(grid):
                    raise
        for m in range(k + 1, j):
            frac = (grid[m] - grid[k]) / (grid[j] - grid[k])
            thetas[m] = thetas[k] + frac * (thetas[j] - thetas[k])
        k = j
    return thetas


# ---------------------------------------------------------------------------
# discrete propagation


def double_reflection(points, tangents, u0):
    """Discrete RMF sweep: two reflections per step.

    Each step reflects (U_i, T_i) across the bisecting plane of the two
    sample points, then across the bisecting plane of the reflected tangent
    and T_{i+1}.  Returns arrays (U, V) aligned with the samples.
    """
    pts = np.asarray(points, dtype=float)
    tans = np.asarray(tangents, dtype=float)
    if pts.shape != tans.shape or pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("points and tangents must be equal-length lists of >= 2")
    u = np.asarray(u0, dtype=float)
    if abs(float(np.dot(u, tans[0]))) >= 1e-10:
        raise ValueError("u0 must be perpendicular to the initial tangent")
    n = pts.shape[0]
    U = np.empty((n, 3))
    V = np.empty((n, 3))
    U[0] = u / np.linalg.norm(u)
    V[0] = np.cross(tans[0], U[0])
    for i in range(n - 1):
        v1 = pts[i + 1] - pts[i]
        c1 = float(np.dot(v1, v1))
        if c1 == 0.0:
            raise ValueError(f"coincident consecutive points at index {i}")
        uL = U[i] - (2.0 / c1) * float(np.dot(v1, U[i])) * v1
        tL = tans[i] - (2.0 / c1) * float(np.dot(v1, tans[i])) * v1
        v2 = tans[i + 1] - tL
        c2 = float(np.dot(v2, v2))
        if c2 > 0.0:
            un = uL - (2.0 / c2) * float(np.dot(v2, uL)) * v2
        else:
            un = uL
        un = un - float(np.dot(un, tans[i + 1])) * tans[i + 1]
        un /= np.linalg.norm(un)
        U[i + 1] = un
        V[i + 1] = np.cross(tans[i + 1], un)
    return U, V


# ---------------------------------------------------------------------------
# dense frame field


class FrameField:
    """Adapted frame evaluable at arbitrary parameters.

    For the RMF policy, theta is tabulated on a uniform node grid once and
    queried by re-integrating from the nearest node below, which keeps
    theta(t) smooth within machine accuracy (the starting node value is
    shared by both sides of every node).
    """

    def __init__(self, c: CurveDef, policy: ThetaPolicy, n_cells: int = 512,
                 substeps: int = 4):
        self.curve = c
        self.policy = policy
        self.substeps = substeps
        if isinstance(policy, RotationMinimizing):
            self._nodes = np.linspace(c.t_min, c.t_max, n_cells + 1)
            self._thetas = theta_rmf(c, policy.theta0, self._nodes, substeps)
            self._h = (c.t_max - c.t_min) / n_cells

    @property
    def is_rmf(self) -> bool:
        return isinstance(self.policy, RotationMinimizing)

    def theta_at(self, t: float):
        """(theta, d(theta)/dt) at parameter t."""
        if isinstance(self.policy, ExplicitTheta):
            j = ex.eval_jet(self.policy.theta, t)
            return j.value, j.d1
        k = int(np.clip((t - self.curve.t_min) // self._h, 0, len(self._nodes) - 2))
        t0, th0 = float(self._nodes[k]), float(self._thetas[k])
        if t == t0:
            theta = th0
        else:
            try:
                theta = _rk4_segment(self.curve, t0, t, th0, self.substeps)
            except VanishingCurvature:
                theta = _theta_across_flat(self.curve, t0, t, th0)
        return theta, _theta_rate(self.curve, t)

    def frenet_at(self, t: float) -> FrenetData:
        return frenet(self.curve, t)

    def frame_at(self, t: float):
        """(FrenetData, AdaptedFrame) at parameter t."""
        fd = self.frenet_at(t)
        theta, theta_prime = self.theta_at(t)
        return fd, adapted_frame(fd, theta, theta_prime)
