"""Closed-form acceleration families and their consistency helpers.

Profiles are expression-language ASTs, never opaque closures; where a family
formula needs the derivative of a profile, it is obtained by a nested dual
pass (one extra gradient slot for the profile argument), not symbolically.
"""

from dataclasses import dataclass

import numpy as np

from . import expr
from .dual import Dual1, sqrt
from .errors import (ArityMismatchError, BetaRequiredError, BetaZeroError,
                     MissingProfileError, UnknownCatalogKeyError)
from .phasespace import AccelerationLaw, SamplingDomain, sample_points


@dataclass(frozen=True)
class ScalarProfile:
    """A scalar profile of one or three arguments, given as an AST.

    When derivative_scale is set the profile denotes scale * d(body)/du
    instead of body itself (used by the beta -> 0 reduction, whose static
    profile is twice the derivative of the original one)."""

    body: object
    arity: int = 1
    label: str = ""
    derivative_scale: float | None = None

    @classmethod
    def from_text(cls, text, arity=1, label=""):
        ast = expr.parse(text, profile_arity=arity)
        return cls(ast, arity, label or text)

    def __call__(self, *args):
        if len(args) != self.arity:
            raise ArityMismatchError(
                f"profile {self.label or '?'} takes {self.arity} "
                f"argument(s), got {len(args)}")
        if self.derivative_scale is None:
            return expr.eval_ast(self.body, args=args)
        return self.derivative_scale * _derivative_at(self.body, args[0])

    def describe(self):
        text = expr.format_ast(self.body)
        if self.derivative_scale is not None:
            return f"{self.derivative_scale:g}*d/du[{text}]"
        return text


def _derivative_at(body, arg):
    """d(body)/du at arg via one nested dual slot; arg may itself be a dual."""
    t = Dual1(arg, (1.0,))
    r = expr.eval_ast(body, args=(t,))
    if isinstance(r, Dual1):
        return r.grad[0]
    return arg * 0.0


def profile_derivative(profile: ScalarProfile, arg):
    """Derivative of a unary profile at arg (floats or duals)."""
    if profile.arity != 1:
        raise ArityMismatchError("profile derivative needs a unary profile")
    if profile.derivative_scale is not None:
        raise ArityMismatchError(
            "cannot take a nested derivative of a derivative profile")
    return _derivative_at(profile.body, arg)


FAMILY_KEYS = ("free", "galilei-static", "galilei-very-special",
               "galilei-anisotropic", "galilei-two-particle",
               "poincare-vsr", "poincare-most-special",
               "homogeneous-rotation-ansatz")

FAMILY_INFO = {
    "free": {"kinematics": "galilean", "particles": 1,
             "profiles": {}, "params": ()},
    "galilei-static": {"kinematics": "galilean", "particles": 1,
                       "profiles": {"f": 1}, "params": ()},
    "galilei-very-special": {"kinematics": "galilean", "particles": 1,
                             "profiles": {"W": 1}, "params": ("beta",)},
    "galilei-anisotropic": {"kinematics": "galilean", "particles": 1,
                            "profiles": {}, "params": ("g",)},
    "galilei-two-particle": {"kinematics": "galilean", "particles": 2,
                             "profiles": {"f1": 3, "f2": 3, "g1": 3, "g2": 3},
                             "params": ()},
    "poincare-vsr": {"kinematics": "poincare", "particles": 1,
                     "profiles": {"F": 1}, "params": ("beta",)},
    "poincare-most-special": {"kinematics": "poincare", "particles": 1,
                              "profiles": {}, "params": ("g",)},
    "homogeneous-rotation-ansatz": {"kinematics": "poincare", "particles": 1,
                                    "profiles": {"f": 3, "g": 3},
                                    "params": ()},
}


def _as_profile(value, arity, label):
    if isinstance(value, ScalarProfile):
        if value.arity != arity:
            raise ArityMismatchError(
                f"profile {label} must take {arity} argument(s), "
                f"got {value.arity}")
        return value
    return ScalarProfile.from_text(str(value), arity, label)


def _resolve_profiles(key, profiles, *, default_zero):
    want = FAMILY_INFO[key]["profiles"]
    profiles = dict(profiles or {})
    out = {}
    for name, arity in want.items():
        if name in profiles:
            out[name] = _as_profile(profiles.pop(name), arity, name)
        elif default_zero:
            out[name] = ScalarProfile(expr.Num(0.0), arity, name)
        else:
            raise MissingProfileError(f"{key} requires profile {name!r}")
    if profiles:
        raise MissingProfileError(
            f"{key} does not take profile(s) {sorted(profiles)}")
    return out


def make_family(key, *, beta=None, params=None, profiles=None):
    """Construct a closed-form family instance as an AccelerationLaw."""
    key = key.replace("_", "-")
    if key not in FAMILY_INFO:
        raise UnknownCatalogKeyError(f"unknown family {key!r}")
    params = dict(params or {})

    if key == "free":
        def fn(x, v):
            return [[0.0, 0.0, 0.0] for _ in x]
        return AccelerationLaw(1, fn, kinematics="poincare",
                               descriptor="family:free")

    if key == "galilei-static":
        prof = _resolve_profiles(key, profiles, default_zero=False)
        f = prof["f"]

        def fn(x, v):
            v1 = v[0]
            u = v1[0] * v1[0] + v1[1] * v1[1] + v1[2] * v1[2]
            fu = f(u)
            return [[v1[0] * fu, v1[1] * fu, v1[2] * fu]]
        return AccelerationLaw(
            1, fn, kinematics="galilean",
            descriptor=f"family:galilei-static[f={f.describe()}]")

    if key == "galilei-very-special":
        b = _family_beta(key, beta, allow_zero=True)
        prof = _resolve_profiles(key, profiles, default_zero=False)
        w = prof["W"]

        def fn(x, v):
            v1 = v[0]
            u = v1[0] * v1[0] + v1[1] * v1[1] + (v1[2] - b) * (v1[2] - b)
            wp = profile_derivative(w, u)
            return [[2.0 * v1[0] * wp, 2.0 * v1[1] * wp,
                     2.0 * (v1[2] - b) * wp]]
        return AccelerationLaw(
            1, fn, kinematics="galilean",
            descriptor=f"family:galilei-very-special[beta={b:g},"
                       f"W={w.describe()}]")

    if key == "galilei-anisotropic":
        g = float(params.get("g", 1.0))

        def fn(x, v):
            return [[0.0, 0.0, g] for _ in x]
        return AccelerationLaw(
            1, fn, kinematics="galilean",
            descriptor=f"family:galilei-anisotropic[g={g:g}]")

    if key == "galilei-two-particle":
        prof = _resolve_profiles(key, profiles, default_zero=True)
        f1, f2, g1, g2 = prof["f1"], prof["f2"], prof["g1"], prof["g2"]

        def fn(x, v):
            dv = [v[0][i] - v[1][i] for i in range(3)]
            rx = [x[0][i] - x[1][i] for i in range(3)]
            s1 = dv[0] * dv[0] + dv[1] * dv[1] + dv[2] * dv[2]
            s2 = dv[0] * rx[0] + dv[1] * rx[1] + dv[2] * rx[2]
            s3 = rx[0] * rx[0] + rx[1] * rx[1] + rx[2] * rx[2]
            out = []
            for fa, ga in ((f1, g1), (f2, g2)):
                fv = fa(s1, s2, s3)
                gv = ga(s1, s2, s3)
                out.append([dv[i] * fv + rx[i] * gv for i in range(3)])
            return out
        return AccelerationLaw(
            2, fn, kinematics="galilean",
            descriptor="family:galilei-two-particle["
                       f"f1={f1.describe()},f2={f2.describe()},"
                       f"g1={g1.describe()},g2={g2.describe()}]")

    if key == "poincare-vsr":
        b = _family_beta(key, beta, allow_zero=False)
        binv = 1.0 / b
        prof = _resolve_profiles(key, profiles, default_zero=False)
        fprof = prof["F"]

        def fn(x, v):
            v1 = v[0]
            s2 = v1[0] * v1[0] + v1[1] * v1[1] + v1[2] * v1[2]
            root = sqrt(1.0 - s2)
            w = (v1[2] - b) / root
            fw = fprof(w)
            q = (v1[2] - b) * (v1[2] - b) * fw
            return [[v1[0] * q, v1[1] * q, (v1[2] - binv) * q]]
        return AccelerationLaw(
            1, fn, kinematics="poincare",
            descriptor=f"family:poincare-vsr[beta={b:g},F={fprof.describe()}]")

    if key == "poincare-most-special":
        g = float(params.get("g", 1.0))

        def fn(x, v):
            v1 = v[0]
            s2 = v1[0] * v1[0] + v1[1] * v1[1] + v1[2] * v1[2]
            one = 1.0 - s2
            cube = one * sqrt(one)
            q = g * cube / (v1[2] - 1.0)
            return [[v1[0] * q, v1[1] * q, g * cube]]
        return AccelerationLaw(
            1, fn, kinematics="poincare", poles_v3=(1.0,),
            descriptor=f"family:poincare-most-special[g={g:g}]")

    # homogeneous-rotation-ansatz
    prof = _resolve_profiles(key, profiles, default_zero=True)
    fp, gp = prof["f"], prof["g"]

    def fn(x, v):
        x1, v1 = x[0], v[0]
        s1 = v1[0] * v1[0] + v1[1] * v1[1] + v1[2] * v1[2]
        s2 = v1[0] * x1[0] + v1[1] * x1[1] + v1[2] * x1[2]
        s3 = x1[0] * x1[0] + x1[1] * x1[1] + x1[2] * x1[2]
        fv = fp(s1, s2, s3)
        gv = gp(s1, s2, s3)
        return [[x1[i] * fv + v1[i] * gv for i in range(3)]]
    return AccelerationLaw(
        1, fn, kinematics="poincare",
        descriptor=f"family:homogeneous-rotation-ansatz[f={fp.describe()},"
                   f"g={gp.describe()}]")


def _family_beta(key, beta, *, allow_zero):
    if beta is None:
        raise BetaRequiredError(f"{key} requires a beta value")
    b = float(beta)
    if not allow_zero and b == 0.0:
        raise BetaZeroError(f"{key} requires beta != 0 (its closed form "
                            f"contains 1/beta)")
    return b


def reduce_very_special_beta0(w_profile):
    """The beta -> 0 limit of the very-special galilean family: a static
    law whose profile is twice the derivative of W."""
    w = _as_profile(w_profile, 1, "W")
    derived = ScalarProfile(w.body, 1, label=f"2*d/du[{w.label}]",
                            derivative_scale=2.0)
    return make_family("galilei-static", profiles={"f": derived})


def vsr_most_special_consistency(g, *, n_samples=100, seed=42,
                                 v3_margin=0.1, speed_margin=0.05):
    """Sup gap between the most-special law with strength g and the general
    VSR law at beta = 1 with profile F(w) = g / w^3, over sampled points
    clear of the shared v3 = 1 pole."""
    most = make_family("poincare-most-special", params={"g": g})
    fprof = ScalarProfile(
        expr.parse(f"{float(g)!r}/u^3", profile_arity=1), 1, "g/u^3")
    vsr = make_family("poincare-vsr", beta=1.0, profiles={"F": fprof})
    domain = SamplingDomain(seed=seed, speed_margin=speed_margin,
                            v3_exclusions=((1.0, v3_margin),))
    sup = 0.0
    for p in sample_points(domain, n_samples, 1):
        gap = np.abs(most.accel_at(p) - vsr.accel_at(p)).max()
        sup = max(sup, float(gap))
    return sup


def very_special_ansatz_relations(w_profile, beta, *, n_samples=100, seed=42):
    """Residuals of the planar-isotropy ansatz relations for the
    very-special galilean family.

    Writing the law as A_alpha = v_alpha f(s, t), A_3 = g(s, t) with
    s = v1^2 + v2^2 and t = v3, the family implies g = (t - beta) f and
    2 (t - beta) df/ds - df/dt = 0.  Returns the two sup residuals, the
    first measured against the constructed law itself, the second via dual
    derivatives in (s, t).
    """
    w = _as_profile(w_profile, 1, "W")
    law = make_family("galilei-very-special", beta=beta, profiles={"W": w})
    rng = np.random.default_rng(seed)
    sup1 = sup2 = 0.0
    for _ in range(n_samples):
        s = rng.uniform(0.01, 0.81)
        t = rng.uniform(-0.9, 0.9)
        sd = Dual1(s, (1.0, 0.0))
        td = Dual1(t, (0.0, 1.0))
        u = sd + (td - beta) * (td - beta)
        f = 2.0 * profile_derivative(w, u)
        if not isinstance(f, Dual1):
            f = Dual1(float(f), (0.0, 0.0))
        p_x = [[0.0, 0.0, 0.0]]
        p_v = [[float(np.sqrt(s)), 0.0, t]]
        a = law.accel(p_x, p_v)
        f_law = float(a[0][0]) / p_v[0][0]
        g_law = float(a[0][2])
        sup1 = max(sup1, abs(g_law - (t - beta) * f_law),
                   abs(f_law - float(f.val)))
        sup2 = max(sup2, abs(2.0 * (t - beta) * f.grad[0] - f.grad[1]))
    return sup1, sup2
