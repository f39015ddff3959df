"""Commutator defects and compatibility conditions.

The Lie bracket of two fields is evaluated pointwise from coefficient
Jacobians: [X, Y]_k = X_m d_m Y_k - Y_m d_m X_k.  The defect of a basis pair
is the bracket minus the span of the stored structure constants; a law is
compatible with a subalgebra when every pair defect vanishes on the sampled
domain.

Condition residual tensors, indexed (particle a, direction i, component l):

    I     sum_b dA^(a)_l / dx^(b)_i
    II    J_i A^(a)_l - eps_ijl A^(a)_j
    IIIG  G_i A^(a)_l  (= -sum_b dA^(a)_l / dv^(b)_i)
    IIIP  X^(a)_i A^(a)_l + v^(a)_l A^(a)_i,
          X^(a)_i = 2 v^(a)_i + x^(a)_i H - K_i  (operators act on scalars)

I and II are the translation and rotation compatibility conditions, IIIG the
galilean-boost condition, IIIP the lorentz-boost condition.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dual
from .errors import DomainError, ExhaustedSamplerError
from .generators import EPS, build_generator, field_jet
from .phasespace import PointSampler, accel_jacobians

WORKERS_ENV = "WLCHECK_WORKERS"


def lie_bracket(fld_x, fld_y, p):
    """[X, Y] at p, flattened to 6N entries."""
    vx, jx = field_jet(fld_x, p)
    vy, jy = field_jet(fld_y, p)
    return jy @ vx - jx @ vy


class _SpecEngine:
    """Per-(spec, law) machinery: base generator fields built once, combined
    into basis jets point by point with a single shared acceleration
    evaluation."""

    def __init__(self, spec, law):
        self.spec = spec
        self.law = law
        n_part = law.n_particles if law is not None else 1
        self.gids = sorted({g for combo in spec.basis for _, g in combo})
        self.fields = {}
        for g in self.gids:
            if g[0] in "HK":
                self.fields[g] = build_generator(g, law=law)
            else:
                self.fields[g] = build_generator(g, n_particles=n_part)
        self.needs_accel = any(f.needs_accel for f in self.fields.values())
        self.combo = np.zeros((spec.dimension, len(self.gids)))
        index = {g: i for i, g in enumerate(self.gids)}
        for a, combo in enumerate(spec.basis):
            for c, g in combo:
                self.combo[a, index[g]] += c

    def basis_jets(self, p):
        accel_duals = None
        if self.needs_accel:
            xs, vs = dual.dual_coords(p.x_lists(), p.v_lists())
            accel_duals = self.law.accel(xs, vs)
        jv, jj = [], []
        for g in self.gids:
            v, j = field_jet(self.fields[g], p, accel_duals)
            jv.append(v)
            jj.append(j)
        vals = np.einsum("ag,gd->ad", self.combo, np.array(jv))
        jacs = np.einsum("ag,gde->ade", self.combo, np.array(jj))
        return vals, jacs


def bracket_defect(spec, law, p, pair):
    """Defect of one unordered basis pair at p: the bracket minus the
    structure-constant combination of the basis fields."""
    a, b = pair
    vals, jacs = _SpecEngine(spec, law).basis_jets(p)
    bracket = jacs[b] @ vals[a] - jacs[a] @ vals[b]
    return bracket - spec.struct[a, b] @ vals


def condition_residuals(law, p):
    """The four condition tensors at p, each of shape (N, 3, 3)."""
    a_val, dx, dv = accel_jacobians(law, p)
    x = p.x
    v = p.v

    cond_i = np.einsum("albi->ail", dx)
    # J_i f = sum_b eps_ijk (x_j d/dx_k + v_j d/dv_k) f
    j_of_a = np.einsum("ijk,bj,albk->ial", EPS, x, dx) \
        + np.einsum("ijk,bj,albk->ial", EPS, v, dv)
    cond_ii = (j_of_a - np.einsum("ijl,aj->ial", EPS, a_val)).transpose(1, 0, 2)
    cond_iiig = -np.einsum("albi->ail", dv)

    # H f and K_i f as first-order operators applied to each A^(a)_l
    h_of_a = np.einsum("bm,albm->al", v, dx) \
        + np.einsum("bm,albm->al", a_val, dv)
    k_of_a = np.einsum("bi,bm,albm->ial", x, v, dx) \
        + np.einsum("bi,bm,albm->ial", v, v, dv) \
        - np.einsum("albi->ail", dv).transpose(1, 0, 2) \
        + np.einsum("bi,bm,albm->ial", x, a_val, dv)
    x_op_a = 2.0 * np.einsum("ai,al->ial", v, a_val) \
        + np.einsum("ai,al->ial", x, h_of_a) - k_of_a
    cond_iiip = (x_op_a + np.einsum("al,ai->ial", v, a_val)).transpose(1, 0, 2)

    return {"I": cond_i, "II": cond_ii, "IIIG": cond_iiig, "IIIP": cond_iiip}


CONDITIONS_FOR = {
    "full-galilei": ("I", "II", "IIIG"),
    "full-poincare": ("I", "II", "IIIP"),
}


@dataclass
class PairRecord:
    lhs: str
    rhs: str
    sup_defect: float
    worst_point: dict


@dataclass
class AnomalyReport:
    spec_name: str
    law_descriptor: str
    n_samples: int
    seed: int
    tolerance: float
    pairs: list
    conditions: dict
    verdict: str
    witness: dict | None
    rejected: int = 0

    def sup_pair_defect(self):
        return max((r.sup_defect for r in self.pairs), default=0.0)

    def pair(self, lhs_part, rhs_part=None):
        """First pair record whose names contain the given substrings."""
        for r in self.pairs:
            if lhs_part in r.lhs and (rhs_part is None or rhs_part in r.rhs):
                return r
        return None

    def to_dict(self):
        cond = {key: None for key in ("I", "II", "IIIG", "IIIP")}
        for key, (sup, _point) in self.conditions.items():
            cond[key] = sup
        return {
            "pairs": [{"lhs": r.lhs, "rhs": r.rhs,
                       "sup_defect": r.sup_defect,
                       "worst_point": r.worst_point} for r in self.pairs],
            "conditions": cond,
            "verdict": self.verdict,
            "witness": self.witness,
        }


def _worker_count():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def anomaly_report(spec, law, domain=None, n_samples=100, tol=1e-9):
    """Certify or refute a law against a subalgebra over sampled points.

    The verdict is "pass" iff the sup-over-samples of every pair defect (and
    for the full algebras, every applicable condition residual) stays within
    tol.  Points where evaluation leaves the law's domain are resampled and
    counted.  The witness records the worst offender when the verdict is
    "fail".
    """
    if domain is None:
        domain = law.domain
    n = spec.dimension
    pair_list = [(a, b) for a in range(n) for b in range(a + 1, n)]
    cond_keys = CONDITIONS_FOR.get(spec.name, ())
    struct = spec.struct
    engine = _SpecEngine(spec, law)

    def eval_point(p):
        vals, jacs = engine.basis_jets(p)
        defmax = np.empty(len(pair_list))
        for idx, (a, b) in enumerate(pair_list):
            defect = jacs[b] @ vals[a] - jacs[a] @ vals[b] \
                - struct[a, b] @ vals
            defmax[idx] = np.max(np.abs(defect))
        condmax = None
        if cond_keys:
            tensors = condition_residuals(law, p)
            condmax = {key: float(np.max(np.abs(tensors[key])))
                       for key in cond_keys}
        return defmax, condmax

    sampler = PointSampler(domain, law.n_particles)
    points, results = [], []
    rejected = 0
    reject_cap = 50 * n_samples + 1000
    workers = _worker_count()
    while len(results) < n_samples:
        if rejected > reject_cap:
            raise ExhaustedSamplerError(
                f"law rejected {rejected} sampled points; its domain guards "
                f"do not match where it is defined")
        batch = sampler.take(n_samples - len(results))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(lambda p: _guarded(eval_point, p),
                                         batch))
        else:
            outcomes = [_guarded(eval_point, p) for p in batch]
        for p, outcome in zip(batch, outcomes):
            if outcome is None:
                rejected += 1
            else:
                points.append(p)
                results.append(outcome)

    pair_sup = np.zeros(len(pair_list))
    pair_worst = [0] * len(pair_list)
    cond_sup = {key: 0.0 for key in cond_keys}
    cond_worst = {key: 0 for key in cond_keys}
    for s, (defmax, condmax) in enumerate(results):
        for idx in np.nonzero(defmax > pair_sup)[0]:
            pair_worst[idx] = s
        pair_sup = np.maximum(pair_sup, defmax)
        if condmax:
            for key, val in condmax.items():
                if val > cond_sup[key]:
                    cond_sup[key] = val
                    cond_worst[key] = s

    names = spec.basis_names
    pairs = [PairRecord(names[a], names[b], float(pair_sup[idx]),
                        points[pair_worst[idx]].to_jsonable())
             for idx, (a, b) in enumerate(pair_list)]
    conditions = {key: (cond_sup[key], points[cond_worst[key]].to_jsonable())
                  for key in cond_keys}

    worst_val = 0.0
    witness = None
    for rec in pairs:
        if rec.sup_defect > worst_val:
            worst_val = rec.sup_defect
            witness = {"kind": "pair", "lhs": rec.lhs, "rhs": rec.rhs,
                       "value": rec.sup_defect, "point": rec.worst_point}
    for key, (sup, point) in conditions.items():
        if sup > worst_val:
            worst_val = sup
            witness = {"kind": "condition", "condition": key, "value": sup,
                       "point": point}

    verdict = "pass" if worst_val <= tol else "fail"
    return AnomalyReport(
        spec_name=spec.name, law_descriptor=law.descriptor,
        n_samples=n_samples, seed=domain.seed, tolerance=tol, pairs=pairs,
        conditions=conditions, verdict=verdict,
        witness=witness if verdict == "fail" else None, rejected=rejected)


def _guarded(fn, p):
    try:
        return fn(p)
    except DomainError:
        return None
