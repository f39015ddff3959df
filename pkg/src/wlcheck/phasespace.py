"""Phase points, sampling domains and acceleration laws on N-particle
position-velocity space.

The flattening convention everywhere in the package: all positions first
(particle-major), then all velocities, 6N slots total.
"""

from dataclasses import dataclass

import numpy as np

from . import dual, expr
from .errors import DomainError, ExhaustedSamplerError


@dataclass(frozen=True)
class PhasePoint:
    """Immutable positions and velocities, each of shape (N, 3)."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        v = np.array(self.v, dtype=float)
        if x.ndim != 2 or x.shape[1] != 3 or x.shape != v.shape:
            raise ValueError(f"expected matching (N, 3) arrays, "
                             f"got {x.shape} and {v.shape}")
        if not (np.isfinite(x).all() and np.isfinite(v).all()):
            raise ValueError("phase point has non-finite entries")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    @property
    def n_particles(self):
        return self.x.shape[0]

    def flat(self):
        return np.concatenate([self.x.ravel(), self.v.ravel()])

    def to_jsonable(self):
        return {"x": self.x.tolist(), "v": self.v.tolist()}

    def x_lists(self):
        return self.x.tolist()

    def v_lists(self):
        return self.v.tolist()


@dataclass(frozen=True)
class SamplingDomain:
    """Box-and-ball rejection-sampling region.

    Positions are uniform in [box[0], box[1]] per coordinate.  Velocities are
    uniform in the ball of radius s_max per particle, subject to
    1 - |v|^2 >= speed_margin and |v3 - c| >= m for every (c, m) in
    v3_exclusions (pole guards for specific law families).
    """

    box: tuple[float, float] = (-1.0, 1.0)
    s_max: float = 0.9
    speed_margin: float = 0.05
    v3_exclusions: tuple[tuple[float, float], ...] = ()
    seed: int = 42

    def contains(self, p: PhasePoint) -> bool:
        lo, hi = self.box
        if (p.x < lo).any() or (p.x > hi).any():
            return False
        speeds2 = (p.v ** 2).sum(axis=1)
        if (np.sqrt(speeds2) > self.s_max + 1e-12).any():
            return False
        if (1.0 - speeds2 < self.speed_margin - 1e-12).any():
            return False
        for c, m in self.v3_exclusions:
            if (np.abs(p.v[:, 2] - c) < m - 1e-12).any():
                return False
        return True


class PointSampler:
    """Deterministic rejection sampler over a SamplingDomain.

    A single PCG stream drives the draws, so taking k points then k more is
    identical to taking 2k at once.
    """

    def __init__(self, domain: SamplingDomain, n_particles: int):
        self.domain = domain
        self.n_particles = n_particles
        self._rng = np.random.default_rng(domain.seed)
        self._attempts = 0
        self._accepted = 0

    def take(self, count):
        pts = []
        budget = 200 * count + 2000
        start_attempts = self._attempts
        while len(pts) < count:
            if self._attempts - start_attempts > budget:
                rate = self._accepted / max(self._attempts, 1)
                raise ExhaustedSamplerError(
                    f"sampler acceptance rate {rate:.3%} too low for domain "
                    f"{self.domain}")
            self._attempts += 1
            p = self._candidate()
            if p is not None:
                self._accepted += 1
                pts.append(p)
        return pts

    def _candidate(self):
        dom = self.domain
        lo, hi = dom.box
        n = self.n_particles
        x = self._rng.uniform(lo, hi, size=(n, 3))
        v = self._rng.uniform(-dom.s_max, dom.s_max, size=(n, 3)) \
            if dom.s_max > 0 else np.zeros((n, 3))
        speeds2 = (v ** 2).sum(axis=1)
        if (speeds2 > dom.s_max ** 2).any():
            return None
        if (1.0 - speeds2 < dom.speed_margin).any():
            return None
        for c, m in dom.v3_exclusions:
            if (np.abs(v[:, 2] - c) < m).any():
                return None
        return PhasePoint(x, v)


def sample_points(domain: SamplingDomain, count: int, n_particles: int = 1):
    """count phase points drawn deterministically from the domain."""
    return PointSampler(domain, n_particles).take(count)


class AccelerationLaw:
    """A second-order dynamics v' = A(x, v) on N particles.

    The body is a callable over nested lists of scalars (floats or duals)
    returning an N x 3 nested list.  kinematics is "galilean" or "poincare";
    poles_v3 lists velocity-3 values where the closed form is singular, used
    to build pole guards for sampling and integration.
    """

    def __init__(self, n_particles, fn, *, kinematics="galilean",
                 domain=None, descriptor="", poles_v3=()):
        if kinematics not in ("galilean", "poincare"):
            raise ValueError(f"unknown kinematics {kinematics!r}")
        self.n_particles = n_particles
        self._fn = fn
        self.kinematics = kinematics
        self.poles_v3 = tuple(poles_v3)
        if domain is None:
            domain = SamplingDomain(
                v3_exclusions=tuple((c, 0.1) for c in self.poles_v3))
        self.domain = domain
        self.descriptor = descriptor

    def accel(self, x_rows, v_rows):
        return self._fn(x_rows, v_rows)

    def accel_at(self, p: PhasePoint) -> np.ndarray:
        out = self._fn(p.x_lists(), p.v_lists())
        return np.array([[float(c) for c in row] for row in out])

    def valid_at(self, p: PhasePoint) -> bool:
        """Hard validity for integration: finite state, subluminal speeds for
        relativistic laws, and clearance of declared poles."""
        if self.kinematics == "poincare":
            if ((p.v ** 2).sum(axis=1) >= 1.0).any():
                return False
        for c in self.poles_v3:
            if (np.abs(p.v[:, 2] - c) < 1e-9).any():
                return False
        return True

    @classmethod
    def from_expressions(cls, components, n_particles=1, *,
                         kinematics="galilean", domain=None, descriptor=""):
        """Law from a nested list of ASTs or source strings, one expression
        per particle per component."""
        parsed = []
        for row in components:
            parsed.append([
                expr.parse(c, n_particles=n_particles) if isinstance(c, str)
                else c
                for c in row])
        if len(parsed) != n_particles or any(len(r) != 3 for r in parsed):
            raise ValueError("expected one expression per particle and axis")

        def fn(x_rows, v_rows):
            coords = (x_rows, v_rows)
            return [[expr.eval_ast(c, coords) for c in row] for row in parsed]

        if not descriptor:
            descriptor = "dsl:" + ";".join(
                "(" + ",".join(expr.format_ast(c) for c in row) + ")"
                for row in parsed)
        law = cls(n_particles, fn, kinematics=kinematics, domain=domain,
                  descriptor=descriptor)
        law.components = parsed
        return law


def accel_jacobians(law: AccelerationLaw, p: PhasePoint):
    """Values and first derivatives of the acceleration at p.

    Returns (A, dA_dx, dA_dv) with shapes (N,3), (N,3,N,3), (N,3,N,3);
    dA_dx[a, l, b, i] is the derivative of A^(a)_l by x^(b)_i.
    """
    n = law.n_particles
    dim = 6 * n
    xs, vs = dual.dual_coords(p.x_lists(), p.v_lists())
    rows = law.accel(xs, vs)
    a_val = np.zeros((n, 3))
    dx = np.zeros((n, 3, n, 3))
    dv = np.zeros((n, 3, n, 3))
    for a in range(n):
        for l in range(3):
            c = rows[a][l]
            if isinstance(c, dual.Dual1):
                a_val[a, l] = dual.scalar_value(c)
                g = np.asarray(c.grad, dtype=float)
            else:
                a_val[a, l] = float(c)
                g = np.zeros(dim)
            dx[a, l] = g[:3 * n].reshape(n, 3)
            dv[a, l] = g[3 * n:].reshape(n, 3)
    return a_val, dx, dv
