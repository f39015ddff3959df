"""Symmetry generators realized as vector fields on phase space.

Each generator acts diagonally across particles.  With A the acceleration
law, the realizations are

    P_i : d/dx_i
    J_i : eps_ijk (x_j d/dx_k + v_j d/dv_k)
    H   : v_i d/dx_i + A_i d/dv_i
    G_i : -d/dv_i
    K_i : x_i v_j d/dx_j + (v_i v_j - delta_ij + x_i A_j) d/dv_j

P, J and G do not reference the law; H and K require it.  Sign conventions
for the structure-constant tables are pinned by the requirement that the
numeric commutators of these fields for the free law reproduce the tables
exactly, with eps_123 = +1.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import dual
from .errors import (BetaZeroError, ClosureError, KinematicsMismatch,
                     UnknownCatalogKeyError)
from .phasespace import AccelerationLaw, PhasePoint

GENERATOR_IDS = ("P1", "P2", "P3", "J1", "J2", "J3", "H",
                 "G1", "G2", "G3", "K1", "K2", "K3")

# Levi-Civita symbol, eps[i][j][k] with 0-based indices
EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPS[_i, _j, _k] = 1.0
    EPS[_i, _k, _j] = -1.0


class VectorField:
    """A vector field with coefficient functions over nested scalar lists.

    coefficients(x, v, accel) returns (xi_rows, eta_rows), each N x 3, where
    xi multiplies d/dx and eta multiplies d/dv.  accel may be passed in so a
    single acceleration evaluation can be shared across fields; when omitted
    it is computed from the bound law on demand.
    """

    __slots__ = ("name", "n_particles", "needs_accel", "law", "_fn")

    def __init__(self, name, n_particles, fn, *, needs_accel=False, law=None):
        self.name = name
        self.n_particles = n_particles
        self._fn = fn
        self.needs_accel = needs_accel
        self.law = law

    def coefficients(self, x_rows, v_rows, accel=None):
        if self.needs_accel and accel is None:
            accel = self.law.accel(x_rows, v_rows)
        return self._fn(x_rows, v_rows, accel)

    def __repr__(self):
        return f"VectorField({self.name!r}, N={self.n_particles})"


def _zeros(n):
    return [[0.0, 0.0, 0.0] for _ in range(n)]


def build_generator(gid, law=None, n_particles=None):
    """Vector-field realization of one generator.

    law is required for H and K (their coefficients contain the acceleration)
    and is used only for its particle count otherwise.  Requesting a K for a
    law tagged galilean emits the advisory KinematicsMismatch warning; the
    construction formula itself is universal.
    """
    if gid not in GENERATOR_IDS:
        raise UnknownCatalogKeyError(f"unknown generator {gid!r}")
    kind, idx = gid[0], (int(gid[1]) - 1 if len(gid) > 1 else None)
    if n_particles is None:
        n_particles = law.n_particles if law is not None else 1
    n = n_particles

    if kind in ("H", "K") and law is None:
        raise ValueError(f"{gid} requires an acceleration law")
    if kind == "K" and law is not None and law.kinematics == "galilean":
        warnings.warn(
            f"{gid} requested for a law tagged galilean; formula is universal",
            KinematicsMismatch, stacklevel=2)

    if kind == "P":
        def fn(x, v, a, i=idx):
            xi = _zeros(len(x))
            for row in xi:
                row[i] = 1.0
            return xi, _zeros(len(x))
        return VectorField(gid, n, fn)

    if kind == "G":
        def fn(x, v, a, i=idx):
            eta = _zeros(len(x))
            for row in eta:
                row[i] = -1.0
            return _zeros(len(x)), eta
        return VectorField(gid, n, fn)

    if kind == "J":
        def fn(x, v, a, i=idx):
            xi, eta = [], []
            for b in range(len(x)):
                xb, vb = x[b], v[b]
                xi.append([sum(EPS[i, j, k] * xb[j] for j in range(3))
                           for k in range(3)])
                eta.append([sum(EPS[i, j, k] * vb[j] for j in range(3))
                            for k in range(3)])
            return xi, eta
        return VectorField(gid, n, fn)

    if kind == "H":
        def fn(x, v, a):
            if a is None:
                a = law.accel(x, v)
            return [list(v[b]) for b in range(len(x))], \
                   [list(a[b]) for b in range(len(x))]
        return VectorField(gid, n, fn, needs_accel=True, law=law)

    # K_i
    def fn(x, v, a, i=idx):
        if a is None:
            a = law.accel(x, v)
        xi, eta = [], []
        for b in range(len(x)):
            xb, vb, ab = x[b], v[b], a[b]
            xi.append([xb[i] * vb[j] for j in range(3)])
            eta.append([vb[i] * vb[j] - (1.0 if i == j else 0.0)
                        + xb[i] * ab[j] for j in range(3)])
        return xi, eta
    return VectorField(gid, n, fn, needs_accel=True, law=law)


def evaluate_field(fld: VectorField, p: PhasePoint) -> np.ndarray:
    """Flattened coefficients (xi then eta, particle-major) at p."""
    xi, eta = fld.coefficients(p.x_lists(), p.v_lists())
    flat = [float(c) for row in xi for c in row]
    flat += [float(c) for row in eta for c in row]
    return np.array(flat)


def combine_fields(terms, name=None):
    """Linear combination sum(c * field) as a new VectorField."""
    terms = [(float(c), f) for c, f in terms]
    n = terms[0][1].n_particles
    needs = any(f.needs_accel for _, f in terms)
    law = next((f.law for _, f in terms if f.law is not None), None)

    def fn(x, v, a):
        xi_out = _zeros(len(x))
        eta_out = _zeros(len(x))
        for c, f in terms:
            xi, eta = f.coefficients(x, v, a)
            for b in range(len(x)):
                for i in range(3):
                    xi_out[b][i] = xi_out[b][i] + c * xi[b][i]
                    eta_out[b][i] = eta_out[b][i] + c * eta[b][i]
        return xi_out, eta_out

    if name is None:
        name = format_combo([(c, f.name) for c, f in terms])
    return VectorField(name, n, fn, needs_accel=needs, law=law)


# ----- formal linear combinations over generator ids -----

def format_combo(combo):
    """Human-readable name for [(coeff, gid), ...]."""
    parts = []
    for c, gid in combo:
        if c == 0:
            continue
        mag = abs(c)
        coeff = "" if mag == 1.0 else (f"{int(mag)}*" if float(mag).is_integer()
                                       else f"{mag:g}*")
        term = f"{coeff}{gid}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+{term}" if c > 0 else f"-{term}")
    return "".join(parts) if parts else "0"


def _canonical_table(kinematics):
    """Commutator table over the 10 canonical generators of one kinematics.

    Returned as {(gidA, gidB): {gid: coeff}} for all ordered pairs, built
    from the defining brackets and antisymmetry.
    """
    boost = "G" if kinematics == "galilean" else "K"
    table = {}

    def put(a, b, combo):
        table[(a, b)] = dict(combo)
        table[(b, a)] = {g: -c for g, c in combo.items()}

    for i in range(3):
        for j in range(3):
            put(f"J{i+1}", f"P{j+1}",
                {f"P{k+1}": -EPS[i, j, k] for k in range(3) if EPS[i, j, k]})
            put(f"J{i+1}", f"{boost}{j+1}",
                {f"{boost}{k+1}": -EPS[i, j, k] for k in range(3)
                 if EPS[i, j, k]})
            if i < j:
                put(f"J{i+1}", f"J{j+1}",
                    {f"J{k+1}": -EPS[i, j, k] for k in range(3)
                     if EPS[i, j, k]})
    for i in range(3):
        # the free-law bracket fixes [H, G_i] = +P_i and [H, K_i] = +P_i
        put("H", f"{boost}{i+1}", {f"P{i+1}": 1.0})
    if kinematics == "poincare":
        for i in range(3):
            for j in range(3):
                if i == j:
                    put(f"P{i+1}", f"K{j+1}", {"H": 1.0})
                if i < j:
                    put(f"K{i+1}", f"K{j+1}",
                        {f"J{k+1}": EPS[i, j, k] for k in range(3)
                         if EPS[i, j, k]})
    return table


def _bracket_combo(table, combo_a, combo_b):
    out = {}
    for ca, ga in combo_a:
        for cb, gb in combo_b:
            for g, c in table.get((ga, gb), {}).items():
                out[g] = out.get(g, 0.0) + ca * cb * c
    return out


_CANONICAL_ORDER = {}
for _kin, _boost in (("galilean", "G"), ("poincare", "K")):
    _CANONICAL_ORDER[_kin] = tuple(
        [f"P{i}" for i in (1, 2, 3)] + [f"J{i}" for i in (1, 2, 3)] + ["H"]
        + [f"{_boost}{i}" for i in (1, 2, 3)])


@dataclass(frozen=True)
class SubalgebraSpec:
    """A named basis of formal generator combinations plus its structure
    constants c[a, b, :] in that basis."""

    name: str
    kinematics: str
    beta: float | None
    basis: tuple
    basis_names: tuple
    struct: np.ndarray

    @property
    def dimension(self):
        return len(self.basis)

    def fields(self, law=None):
        """Composite VectorFields for every basis element."""
        gens = {}
        for combo in self.basis:
            for _, gid in combo:
                if gid not in gens:
                    gens[gid] = build_generator(gid, law=law)
        return [combine_fields([(c, gens[g]) for c, g in combo], name=nm)
                for combo, nm in zip(self.basis, self.basis_names)]

    def needs_law(self):
        return any(g[0] in "HK" for combo in self.basis for _, g in combo)


def _make_spec(name, kinematics, beta, basis):
    order = _CANONICAL_ORDER[kinematics]
    index = {g: i for i, g in enumerate(order)}
    table = _canonical_table(kinematics)
    n = len(basis)
    mat = np.zeros((n, 10))
    for a, combo in enumerate(basis):
        for c, g in combo:
            mat[a, index[g]] += c
    struct = np.zeros((n, n, n))
    for a in range(n):
        for b in range(a + 1, n):
            target = np.zeros(10)
            for g, c in _bracket_combo(table, basis[a], basis[b]).items():
                target[index[g]] += c
            y, *_ = np.linalg.lstsq(mat.T, target, rcond=None)
            if np.max(np.abs(mat.T @ y - target)) > 1e-9:
                raise ClosureError(
                    f"basis of {name} does not close: "
                    f"[{format_combo(basis[a])}, {format_combo(basis[b])}] "
                    f"leaves the span")
            y[np.abs(y) < 1e-12] = 0.0
            struct[a, b] = y
            struct[b, a] = -y
    _check_jacobi(name, struct)
    names = tuple(format_combo(c) for c in basis)
    return SubalgebraSpec(name, kinematics, beta, tuple(basis), names, struct)


def _check_jacobi(name, c):
    # sum_m c[a,b,m] c[m,d,e] + cyclic in (a,b,d) must vanish
    term = np.einsum("abm,mde->abde", c, c)
    total = term + np.einsum("bdm,mae->abde", c, c) \
        + np.einsum("dam,mbe->abde", c, c)
    worst = np.max(np.abs(total))
    if worst > 1e-9:
        raise ClosureError(f"structure constants of {name} violate the "
                           f"Jacobi identity by {worst:.3e}")


def _single(g):
    return ((1.0, g),)


def catalog(name, beta=None):
    """Named generator bases addressable by CLI key.

    Keys: full-galilei, full-poincare, galilei-static,
    galilei-very-special (needs beta), galilei-anisotropic, poincare-vsr
    (needs beta != 0), poincare-most-special (beta fixed at 1),
    homogeneous-galilei, homogeneous-poincare.
    """
    key = name.replace("_", "-")
    if key == "full-galilei":
        basis = [_single(g) for g in _CANONICAL_ORDER["galilean"]]
        return _make_spec(key, "galilean", None, basis)
    if key == "full-poincare":
        basis = [_single(g) for g in _CANONICAL_ORDER["poincare"]]
        return _make_spec(key, "poincare", None, basis)
    if key == "galilei-static":
        basis = [_single(g) for g in ("P1", "P2", "P3", "H", "J1", "J2", "J3")]
        return _make_spec(key, "galilean", None, basis)
    if key == "galilei-very-special":
        b = _require_beta(key, beta)
        basis = [_single("P1"), _single("P2"), _single("P3"), _single("H"),
                 ((b, "G1"), (1.0, "J2")), ((b, "G2"), (-1.0, "J1")),
                 _single("J3")]
        return _make_spec(key, "galilean", b, basis)
    if key == "galilei-anisotropic":
        basis = [_single(g) for g in ("P1", "P2", "P3", "H",
                                      "G1", "G2", "G3", "J3")]
        return _make_spec(key, "galilean", None, basis)
    if key == "poincare-vsr":
        b = _require_beta(key, beta)
        if b == 0.0:
            raise BetaZeroError("poincare-vsr requires beta != 0")
        basis = [_single("P1"), _single("P2"), _single("P3"), _single("H"),
                 ((1.0, "K1"), (b, "J2")), ((1.0, "K2"), (-b, "J1")),
                 _single("J3")]
        return _make_spec(key, "poincare", b, basis)
    if key == "poincare-most-special":
        basis = [_single("P1"), _single("P2"), _single("P3"), _single("H"),
                 ((1.0, "K1"), (1.0, "J2")), ((1.0, "K2"), (-1.0, "J1")),
                 _single("J3"), _single("K3")]
        return _make_spec(key, "poincare", 1.0, basis)
    if key == "homogeneous-galilei":
        basis = [_single(g) for g in ("J1", "J2", "J3", "G1", "G2", "G3")]
        return _make_spec(key, "galilean", None, basis)
    if key == "homogeneous-poincare":
        basis = [_single(g) for g in ("J1", "J2", "J3", "K1", "K2", "K3")]
        return _make_spec(key, "poincare", None, basis)
    raise UnknownCatalogKeyError(f"unknown catalog key {name!r}")


CATALOG_KEYS = ("full-galilei", "full-poincare", "galilei-static",
                "galilei-very-special", "galilei-anisotropic",
                "poincare-vsr", "poincare-most-special",
                "homogeneous-galilei", "homogeneous-poincare")

BETA_KEYS = ("galilei-very-special", "poincare-vsr")


def _require_beta(key, beta):
    if beta is None:
        from .errors import BetaRequiredError
        raise BetaRequiredError(f"{key} requires a beta value")
    return float(beta)


def field_jet(fld: VectorField, p: PhasePoint, accel_duals=None):
    """Coefficient values and Jacobian of a field at p via coordinate duals.

    Returns (V, J) with V of shape (6N,) and J[k, m] the derivative of the
    k-th coefficient by the m-th coordinate.
    """
    n = fld.n_particles
    dim = 6 * n
    xs, vs = dual.dual_coords(p.x_lists(), p.v_lists())
    if fld.needs_accel and accel_duals is None and fld.law is not None:
        accel_duals = fld.law.accel(xs, vs)
    xi, eta = fld.coefficients(xs, vs, accel_duals)
    vals = np.zeros(dim)
    jac = np.zeros((dim, dim))
    k = 0
    for rows in (xi, eta):
        for row in rows:
            for c in row:
                if isinstance(c, dual.Dual1):
                    vals[k] = dual.scalar_value(c)
                    jac[k] = np.asarray(c.grad, dtype=float)
                else:
                    vals[k] = float(c)
                k += 1
    return vals, jac
