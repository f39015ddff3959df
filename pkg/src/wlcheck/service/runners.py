"""Request handling shared by the HTTP endpoints and the in-process CLI.

Each runner returns a plain JSON-ready dict.  Reports are rendered with
canonical_dumps (sorted keys, fixed indentation, trailing newline) so a
repeated run with the same request is byte-identical; anything nondeterministic
(wall time) is deliberately kept out of the document.
"""

import json

import numpy as np

from .. import __version__
from ..anomaly import anomaly_report, condition_residuals
from ..errors import DomainError, ExhaustedSamplerError, WlcheckError
from ..families import FAMILY_INFO, FAMILY_KEYS, make_family
from ..generators import BETA_KEYS, CATALOG_KEYS, catalog
from ..phasespace import AccelerationLaw, PointSampler, SamplingDomain
from ..trajectory import GroupElement, covariance_residual

CONDITION_KEYS = ("I", "II", "IIIG", "IIIP")


def canonical_dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def resolve_law(req, kinematics):
    """Build the AccelerationLaw a request describes.

    Exactly one of family or law must be set; families carry their own
    kinematics tag, expression laws take the caller's."""
    if req.family is not None and req.law is not None:
        raise WlcheckError("give either family or law, not both")
    if req.family is not None:
        return make_family(req.family, beta=req.beta, params=req.params,
                           profiles=req.profiles)
    if req.law is None:
        raise WlcheckError("one of family or law is required")
    rows = [req.law]
    if req.law2 is not None:
        rows.append(req.law2)
    return AccelerationLaw.from_expressions(rows, len(rows),
                                            kinematics=kinematics)


def build_domain(margins, seed, law):
    return SamplingDomain(
        box=(-margins.box, margins.box), s_max=margins.s_max,
        speed_margin=margins.speed_margin,
        v3_exclusions=tuple((c, margins.v3_margin) for c in law.poles_v3),
        seed=seed)


def _config_echo(command, req):
    return {"command": command, **req.model_dump(mode="json")}


def _meta(samples_used=None, samples_rejected=None):
    meta = {"tool_version": __version__}
    if samples_used is not None:
        meta["samples_used"] = samples_used
        meta["samples_rejected"] = samples_rejected
    return meta


def run_check(req):
    spec = catalog(req.group, beta=req.beta)
    law = resolve_law(req, spec.kinematics)
    domain = build_domain(req.margins, req.seed, law)
    report = anomaly_report(spec, law, domain=domain,
                            n_samples=req.samples, tol=req.tol)
    doc = {"schema": 1, "config": _config_echo("check", req),
           "group": spec.name, "law": law.descriptor}
    doc.update(report.to_dict())
    doc["meta"] = _meta(report.n_samples, report.rejected)
    return doc


def run_conditions(req):
    law = resolve_law(req, req.kinematics)
    domain = build_domain(req.margins, req.seed, law)
    sups, worsts, rejected = _condition_sups(law, domain, req.samples)
    required = ("I", "II", "IIIG" if req.kinematics == "galilean" else "IIIP")
    verdict = "pass" if all(sups[k] <= req.tol for k in required) else "fail"
    witness = None
    if verdict == "fail":
        key = max(required, key=lambda k: sups[k])
        witness = {"kind": "condition", "condition": key,
                   "value": sups[key], "point": worsts[key]}
    return {"schema": 1, "config": _config_echo("conditions", req),
            "law": law.descriptor,
            "conditions": {k: sups[k] for k in CONDITION_KEYS},
            "required": list(required), "verdict": verdict,
            "witness": witness,
            "meta": _meta(req.samples, rejected)}


def _condition_sups(law, domain, n_samples):
    sampler = PointSampler(domain, law.n_particles)
    sups = {k: 0.0 for k in CONDITION_KEYS}
    worsts = {k: None for k in CONDITION_KEYS}
    rejected = 0
    used = 0
    cap = 50 * n_samples + 1000
    while used < n_samples:
        if rejected > cap:
            raise ExhaustedSamplerError(
                f"law rejected {rejected} sampled points; its domain guards "
                f"do not match where it is defined")
        for p in sampler.take(n_samples - used):
            try:
                tensors = condition_residuals(law, p)
            except DomainError:
                rejected += 1
                continue
            used += 1
            for key in CONDITION_KEYS:
                m = float(np.max(np.abs(tensors[key])))
                if m > sups[key] or worsts[key] is None:
                    sups[key] = max(sups[key], m)
                    worsts[key] = p.to_jsonable()
    return sups, worsts, rejected


def run_covariance(req):
    kin = req.kinematics
    if kin is None:
        boost = req.transform.kind.replace("_", "-")
        kin = "poincare" if boost == "lorentz-boost" else "galilean"
    law = resolve_law(req, kin)
    try:
        element = GroupElement.from_spec(req.transform.to_dict())
    except (KeyError, ValueError) as e:
        raise WlcheckError(f"bad transform: {e}") from e
    result = covariance_residual(law, element, x0=req.x0, v0=req.v0,
                                 t0=req.t0, t1=req.t1, dt=req.dt)
    verdict = "pass" if result.residual <= req.tol else "fail"
    doc = {"schema": 1, "config": _config_echo("covariance", req),
           "law": law.descriptor, "transform": element.to_spec(),
           "residual": result.residual,
           "trimmed_fraction": result.transformed.trimmed_fraction,
           "nodes": result.transformed.n_nodes,
           "verdict": verdict, "meta": _meta()}
    if req.csv:
        doc["csv"] = result.transformed.to_csv()
    return doc


def catalog_listing():
    groups = []
    for key in CATALOG_KEYS:
        needs_beta = key in BETA_KEYS
        spec = catalog(key, beta=1.0 if needs_beta else None)
        entry = {"key": key, "kinematics": spec.kinematics,
                 "dimension": spec.dimension, "needs_beta": needs_beta,
                 "generators": list(spec.basis_names)}
        if needs_beta:
            entry["generators_shown_at_beta"] = 1.0
        groups.append(entry)
    families = []
    for key in FAMILY_KEYS:
        info = FAMILY_INFO[key]
        families.append({
            "key": key, "kinematics": info["kinematics"],
            "particles": info["particles"],
            "profiles": dict(info["profiles"]),
            "params": list(info["params"]),
        })
    return {"schema": 1, "groups": groups, "families": families,
            "meta": _meta()}
