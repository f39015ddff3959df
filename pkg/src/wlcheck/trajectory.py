"""World-line integration, kinematic transforms, and covariance checks.

A trajectory is a uniformly sampled solution of dx/dt = v, dv/dt = A(x, v).
Transforms act on the sampled data; the relativistic boost mixes time with
space, so after the event map the curve is re-sampled onto a fresh uniform
grid (same step) with a cubic spline, per particle, over the common time
window of all particles.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (DomainError, DomainExitError, InterpolationRangeError,
                     NonMonotoneTimeError, StepTooLargeError)
from .phasespace import PhasePoint

_GRID_SLACK = 1e-12


@dataclass(frozen=True)
class Trajectory:
    """Uniform-grid world lines: x and v have shape (nodes, particles, 3)."""

    t0: float
    dt: float
    x: np.ndarray
    v: np.ndarray
    trimmed_fraction: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if x.ndim != 3 or x.shape[2] != 3 or x.shape != v.shape:
            raise ValueError("trajectory arrays must both be (nodes, N, 3)")
        if x.shape[0] < 2:
            raise InterpolationRangeError(
                "a trajectory needs at least two nodes")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    @property
    def n_nodes(self):
        return self.x.shape[0]

    @property
    def n_particles(self):
        return self.x.shape[1]

    def times(self):
        return self.t0 + self.dt * np.arange(self.n_nodes)

    def node(self, j):
        return PhasePoint(self.x[j], self.v[j])

    def to_csv(self):
        names = ["t"]
        for a in range(self.n_particles):
            names.extend(f"x{i}@{a + 1}" for i in (1, 2, 3))
        for a in range(self.n_particles):
            names.extend(f"v{i}@{a + 1}" for i in (1, 2, 3))
        lines = [",".join(names)]
        ts = self.times()
        for j in range(self.n_nodes):
            row = [ts[j]]
            row.extend(self.x[j].reshape(-1))
            row.extend(self.v[j].reshape(-1))
            lines.append(",".join(repr(float(c)) for c in row))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GroupElement:
    """One kinematic transform: translations, rotation, or a boost.

    Boost conventions, acting on sampled data:
      galilean     x -> x - u t,  v -> v - u
      lorentz (axis k, speed u, c = 1)
                   t' = gamma (t + u x_k),  x_k' = gamma (x_k + u t),
                   v_k' = (v_k + u) / (1 + u v_k),
                   v_perp' = v_perp / (gamma (1 + u v_k))
    """

    kind: str
    vec: tuple | None = None
    scalar: float | None = None
    axis: int | None = None

    @classmethod
    def space_translation(cls, a):
        return cls("space-translation", vec=_vec3(a))

    @classmethod
    def time_translation(cls, s):
        return cls("time-translation", scalar=float(s))

    @classmethod
    def rotation(cls, axis, angle):
        return cls("rotation", vec=_vec3(axis, unit=True),
                   scalar=float(angle))

    @classmethod
    def galilean_boost(cls, u):
        return cls("galilean-boost", vec=_vec3(u))

    @classmethod
    def lorentz_boost(cls, axis, u):
        axis = int(axis)
        if axis not in (1, 2, 3):
            raise ValueError("boost axis must be 1, 2 or 3")
        u = float(u)
        if not abs(u) < 1.0:
            raise DomainError(f"boost speed {u!r} is not below 1")
        return cls("lorentz-boost", scalar=u, axis=axis)

    @classmethod
    def from_spec(cls, spec):
        kind = spec.get("kind", "").replace("_", "-")
        if kind == "space-translation":
            return cls.space_translation(spec["a"])
        if kind == "time-translation":
            return cls.time_translation(spec["s"])
        if kind == "rotation":
            return cls.rotation(spec["axis"], spec["angle"])
        if kind == "galilean-boost":
            return cls.galilean_boost(spec["u"])
        if kind == "lorentz-boost":
            return cls.lorentz_boost(spec["axis"], spec["u"])
        raise ValueError(f"unknown transform kind {spec.get('kind')!r}")

    def to_spec(self):
        if self.kind == "space-translation":
            return {"kind": self.kind, "a": list(self.vec)}
        if self.kind == "time-translation":
            return {"kind": self.kind, "s": self.scalar}
        if self.kind == "rotation":
            return {"kind": self.kind, "axis": list(self.vec),
                    "angle": self.scalar}
        if self.kind == "galilean-boost":
            return {"kind": self.kind, "u": list(self.vec)}
        return {"kind": self.kind, "axis": self.axis, "u": self.scalar}

    def inverse(self):
        if self.kind == "space-translation":
            return GroupElement.space_translation([-c for c in self.vec])
        if self.kind == "time-translation":
            return GroupElement.time_translation(-self.scalar)
        if self.kind == "rotation":
            return GroupElement.rotation(self.vec, -self.scalar)
        if self.kind == "galilean-boost":
            return GroupElement.galilean_boost([-c for c in self.vec])
        return GroupElement.lorentz_boost(self.axis, -self.scalar)


def _vec3(a, unit=False):
    arr = np.asarray(a, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError("expected a 3-vector")
    if unit:
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise ValueError("rotation axis must be nonzero")
        arr = arr / norm
    return tuple(float(c) for c in arr)


def _rotation_matrix(axis, angle):
    k = np.asarray(axis, dtype=float)
    kx = np.array([[0.0, -k[2], k[1]],
                   [k[2], 0.0, -k[0]],
                   [-k[1], k[0], 0.0]])
    return (np.cos(angle) * np.eye(3) + np.sin(angle) * kx
            + (1.0 - np.cos(angle)) * np.outer(k, k))


def _accel_rows(law, x, v, step):
    try:
        rows = law.accel([list(map(float, r)) for r in x],
                         [list(map(float, r)) for r in v])
    except DomainError as e:
        raise DomainExitError(str(e), step) from e
    a = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(a)):
        raise DomainExitError("acceleration became non-finite", step)
    return a


def integrate(law, x0, v0, *, t0=0.0, t1, dt):
    """Classic fourth-order Runge-Kutta on the first-order system.

    The step must fit the span a whole number of times; points where the law
    stops being defined (poles, luminal speeds) abort with the step index.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    span = float(t1) - float(t0)
    steps = int(round(span / dt))
    if steps < 1 or abs(steps * dt - span) > 1e-8 * max(1.0, abs(span)):
        raise StepTooLargeError(
            f"dt={dt!r} does not tile the span {span!r} with at least "
            f"one step")
    x = np.asarray(x0, dtype=float).reshape(-1, 3).copy()
    v = np.asarray(v0, dtype=float).reshape(-1, 3).copy()
    xs = np.empty((steps + 1,) + x.shape)
    vs = np.empty_like(xs)
    xs[0], vs[0] = x, v
    for j in range(steps):
        _check_state(law, x, v, j)
        k1x, k1v = v, _accel_rows(law, x, v, j)
        k2x = v + 0.5 * dt * k1v
        k2v = _accel_rows(law, x + 0.5 * dt * k1x, k2x, j)
        k3x = v + 0.5 * dt * k2v
        k3v = _accel_rows(law, x + 0.5 * dt * k2x, k3x, j)
        k4x = v + dt * k3v
        k4v = _accel_rows(law, x + dt * k3x, k4x, j)
        x = x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise DomainExitError("state became non-finite", j)
        xs[j + 1], vs[j + 1] = x, v
    _check_state(law, x, v, steps)
    return Trajectory(float(t0), float(dt), xs, vs)


def _check_state(law, x, v, step):
    try:
        p = PhasePoint(x, v)
    except ValueError as e:
        raise DomainExitError(str(e), step) from e
    if not law.valid_at(p):
        raise DomainExitError(
            "state left the law's validity region "
            f"(descriptor {law.descriptor})", step)


def transform(traj, element):
    """Apply a kinematic transform to a sampled trajectory."""
    kind = element.kind
    if kind == "space-translation":
        a = np.asarray(element.vec)
        return replace(traj, x=traj.x + a)
    if kind == "time-translation":
        return replace(traj, t0=traj.t0 + element.scalar)
    if kind == "rotation":
        rot = _rotation_matrix(element.vec, element.scalar)
        return replace(traj,
                       x=np.einsum("ij,taj->tai", rot, traj.x),
                       v=np.einsum("ij,taj->tai", rot, traj.v))
    if kind == "galilean-boost":
        u = np.asarray(element.vec)
        ts = traj.times()
        return replace(traj, x=traj.x - ts[:, None, None] * u,
                       v=traj.v - u)
    if kind == "lorentz-boost":
        return _lorentz_transform(traj, element.axis - 1, element.scalar)
    raise ValueError(f"unknown transform kind {kind!r}")


def _lorentz_transform(traj, k, u):
    if traj.n_nodes < 4:
        raise InterpolationRangeError(
            "relativistic re-sampling needs at least four nodes")
    gamma = 1.0 / np.sqrt(1.0 - u * u)
    ts = traj.times()
    xk = traj.x[:, :, k]
    vk = traj.v[:, :, k]

    rate = gamma * (1.0 + u * vk)
    if np.any(rate <= 0.0):
        raise NonMonotoneTimeError(
            "transformed time would run backwards; some nodes move at or "
            "beyond the boost-frame light speed")

    t_new = gamma * (ts[:, None] + u * xk)
    if np.any(np.diff(t_new, axis=0) <= 0.0):
        raise NonMonotoneTimeError(
            "transformed node times are not strictly increasing")

    x_new = traj.x.copy()
    x_new[:, :, k] = gamma * (xk + u * ts[:, None])
    denom = 1.0 + u * vk
    v_new = traj.v / (gamma * denom)[:, :, None]
    v_new[:, :, k] = (vk + u) / denom

    lo = float(t_new[0].max())
    hi = float(t_new[-1].min())
    steps = int(np.floor((hi - lo) / traj.dt + _GRID_SLACK))
    if steps < 1:
        raise InterpolationRangeError(
            "no common transformed time window covers two grid nodes")
    grid = lo + traj.dt * np.arange(steps + 1)

    n = traj.n_particles
    xs = np.empty((steps + 1, n, 3))
    vs = np.empty_like(xs)
    for a in range(n):
        knots = t_new[:, a]
        for c in range(3):
            xs[:, a, c] = CubicSpline(knots, x_new[:, a, c])(grid)
            vs[:, a, c] = CubicSpline(knots, v_new[:, a, c])(grid)

    union = float(t_new[-1].max() - t_new[0].min())
    used = float(grid[-1] - grid[0])
    trimmed = max(0.0, 1.0 - used / union) if union > 0.0 else 0.0
    return Trajectory(lo, traj.dt, xs, vs, trimmed_fraction=trimmed)


@dataclass(frozen=True)
class CovarianceResult:
    residual: float
    transformed: Trajectory
    reintegrated: Trajectory


def covariance_residual(law, element, *, x0, v0, t0=0.0, t1, dt):
    """Form invariance of the law under one transform.

    Integrates, transforms the solution, then re-integrates the same law
    from the transformed initial node over the transformed grid; the
    residual is the max-abs gap between the two, over positions and
    velocities.  Zero (up to integrator error) means the transform maps
    solutions to solutions.
    """
    base = integrate(law, x0, v0, t0=t0, t1=t1, dt=dt)
    moved = transform(base, element)
    t_end = moved.t0 + (moved.n_nodes - 1) * moved.dt
    redone = integrate(law, moved.x[0], moved.v[0],
                       t0=moved.t0, t1=t_end, dt=moved.dt)
    gap = max(float(np.abs(moved.x - redone.x).max()),
              float(np.abs(moved.v - redone.v).max()))
    return CovarianceResult(gap, moved, redone)
