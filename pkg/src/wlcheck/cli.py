"""Command-line front end.

The CLI talks to the same handlers as the HTTP service.  By default it
dispatches against an in-process app instance (no sockets, deterministic);
--server URL points it at a running instance instead.  The report JSON goes
to stdout or --out with sorted keys and a trailing newline, so identical
requests produce byte-identical files; timing and the one-line summary go
to stderr.

Exit codes: 0 pass (or no verdict applies), 1 fail, 2 usage or evaluation
errors (HTTP 400/422).
"""

import argparse
import json
import re
import sys
import time

import httpx
import yaml

from .errors import WlcheckError
from .service.runners import canonical_dumps

_PROFILE_RE = re.compile(r"^\s*([A-Za-z]\w*)\s*\(([^)]*)\)\s*=\s*(.+)$",
                         re.S)


def _parser():
    parser = argparse.ArgumentParser(
        prog="wlcheck",
        description="check acceleration laws against kinematic symmetry "
                    "algebras and world-line covariance")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser(
        "check", help="commutator defects of a law against a catalog group")
    p_check.add_argument("group", nargs="?", default=None,
                         help="catalog key, e.g. full-galilei")
    _law_flags(p_check)
    _sampling_flags(p_check)
    _io_flags(p_check)
    p_check.set_defaults(handler=_cmd_check)

    p_cond = sub.add_parser(
        "conditions", help="residuals of the four compatibility conditions")
    p_cond.add_argument("--kinematics", choices=("galilean", "poincare"),
                        default=None)
    _law_flags(p_cond)
    _sampling_flags(p_cond)
    _io_flags(p_cond)
    p_cond.set_defaults(handler=_cmd_conditions)

    p_cov = sub.add_parser(
        "covariance", help="residual of one finite transform on an "
                           "integrated world line")
    p_cov.add_argument("--transform", default=None,
                       help="kind:key=value;... e.g. lorentz-boost:axis=3;"
                            "u=0.3 or rotation:axis=0,0,1;angle=0.7")
    p_cov.add_argument("--x0", default=None,
                       help="initial positions, e.g. 0,0,0 or 0,0,0;1,0,0")
    p_cov.add_argument("--v0", default=None, help="initial velocities")
    p_cov.add_argument("--t0", type=float, default=None)
    p_cov.add_argument("--t1", type=float, default=None)
    p_cov.add_argument("--dt", type=float, default=None)
    p_cov.add_argument("--tol", type=float, default=None)
    p_cov.add_argument("--csv", default=None, metavar="PATH",
                       help="also write the transformed world line as CSV")
    p_cov.add_argument("--kinematics", choices=("galilean", "poincare"),
                       default=None)
    _law_flags(p_cov)
    _io_flags(p_cov)
    p_cov.set_defaults(handler=_cmd_covariance)

    p_cat = sub.add_parser("catalog",
                           help="list groups and closed-form families")
    _io_flags(p_cat)
    p_cat.set_defaults(handler=_cmd_catalog)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(handler=_cmd_serve)

    return parser


def _law_flags(sp):
    sp.add_argument("--family", default=None,
                    help="closed-form family key, e.g. galilei-static")
    sp.add_argument("--param", action="append", default=None,
                    metavar="NAME=VALUE", help="family parameter")
    sp.add_argument("--profile", action="append", default=None,
                    metavar="NAME(ARGS)=BODY",
                    help="family profile, e.g. 'f(u)=1/(1+u)'")
    sp.add_argument("--law", default=None, metavar="(E1,E2,E3)",
                    help="explicit components; prefix 'A=' optional, "
                         "';' separates particles")
    sp.add_argument("--law2", default=None, metavar="(E1,E2,E3)",
                    help="second particle's components")
    sp.add_argument("--beta", type=float, default=None)


def _sampling_flags(sp):
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--box", type=float, default=None)
    sp.add_argument("--s-max", dest="s_max", type=float, default=None)
    sp.add_argument("--speed-margin", dest="speed_margin", type=float,
                    default=None)
    sp.add_argument("--v3-margin", dest="v3_margin", type=float,
                    default=None)


def _io_flags(sp):
    sp.add_argument("--config", default=None, metavar="YAML",
                    help="request defaults; explicit flags win")
    sp.add_argument("--out", default=None, metavar="PATH",
                    help="write the report here instead of stdout")
    sp.add_argument("--server", default=None, metavar="URL",
                    help="send the request to a running service")


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        return args.handler(args)
    except WlcheckError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, yaml.YAMLError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except httpx.HTTPError as e:
        print(f"error: cannot reach server: {e}", file=sys.stderr)
        return 2


def _client(args):
    server = getattr(args, "server", None)
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service import app
    return TestClient(app)


def _base_payload(args):
    payload = {}
    if args.config:
        with open(args.config) as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise WlcheckError(f"config {args.config} must be a mapping")
        payload.update(loaded)
    if getattr(args, "family", None) is not None:
        payload["family"] = args.family
    if getattr(args, "beta", None) is not None:
        payload["beta"] = args.beta
    if getattr(args, "param", None):
        params = dict(payload.get("params") or {})
        for item in args.param:
            name, _, value = item.partition("=")
            if not _:
                raise WlcheckError(f"--param needs NAME=VALUE, got {item!r}")
            try:
                params[name.strip()] = float(value)
            except ValueError:
                raise WlcheckError(f"--param value {value!r} is not a number")
        payload["params"] = params
    if getattr(args, "profile", None):
        profiles = dict(payload.get("profiles") or {})
        for item in args.profile:
            m = _PROFILE_RE.match(item)
            if not m:
                raise WlcheckError(
                    f"--profile needs NAME(ARGS)=BODY, got {item!r}")
            profiles[m.group(1)] = m.group(3).strip()
        payload["profiles"] = profiles
    if getattr(args, "law", None) is not None:
        rows = _parse_law_text(args.law)
        if len(rows) > 2:
            raise WlcheckError("at most two particles are supported")
        payload["law"] = rows[0]
        if len(rows) > 1:
            payload["law2"] = rows[1]
    if getattr(args, "law2", None) is not None:
        payload["law2"] = _parse_law_text(args.law2)[0]
    for name in ("samples", "seed", "tol"):
        value = getattr(args, name, None)
        if value is not None:
            payload[name] = value
    margins = dict(payload.get("margins") or {})
    for name in ("box", "s_max", "speed_margin", "v3_margin"):
        value = getattr(args, name, None)
        if value is not None:
            margins[name] = value
    if margins:
        payload["margins"] = margins
    return payload


def _parse_law_text(text):
    rows = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        m = re.match(r"^[A-Za-z]\w*\s*=", chunk)
        if m:
            chunk = chunk[m.end():].strip()
        if chunk.startswith("(") and chunk.endswith(")"):
            chunk = chunk[1:-1]
        rows.append(_split_top_level(chunk))
    return rows


def _split_top_level(text):
    parts, cur, depth = [], [], 0
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    parts = [p.strip() for p in parts]
    if len(parts) != 3 or not all(parts):
        raise WlcheckError(
            f"a law needs three comma-separated components, got {text!r}")
    return parts


def _parse_transform(text):
    kind, _, rest = text.partition(":")
    spec = {"kind": kind.strip()}
    canonical = spec["kind"].replace("_", "-")
    if rest:
        for item in rest.split(";"):
            key, eq, value = item.partition("=")
            if not eq:
                raise WlcheckError(
                    f"transform parameter needs KEY=VALUE, got {item!r}")
            key = key.strip()
            value = value.strip()
            try:
                if "," in value:
                    spec[key] = [float(c) for c in value.split(",")]
                elif key == "axis" and canonical == "lorentz-boost":
                    spec[key] = int(value)
                else:
                    spec[key] = float(value)
            except ValueError:
                raise WlcheckError(
                    f"bad transform parameter value {value!r}")
    return spec


def _parse_points(text, what):
    rows = []
    for chunk in text.split(";"):
        try:
            row = [float(c) for c in chunk.split(",")]
        except ValueError:
            raise WlcheckError(f"bad {what} row {chunk!r}")
        if len(row) != 3:
            raise WlcheckError(f"{what} rows need three numbers")
        rows.append(row)
    return rows


def _post(args, path, payload):
    client = _client(args)
    started = time.monotonic()
    resp = client.post(path, json=payload)
    elapsed = time.monotonic() - started
    return _response_doc(resp), elapsed


def _get(args, path):
    client = _client(args)
    started = time.monotonic()
    resp = client.get(path)
    elapsed = time.monotonic() - started
    return _response_doc(resp), elapsed


def _response_doc(resp):
    if resp.status_code == 200:
        return resp.json()
    try:
        body = resp.json()
    except json.JSONDecodeError:
        body = {"detail": resp.text}
    print(f"error ({resp.status_code}): "
          f"{json.dumps(body, sort_keys=True)}", file=sys.stderr)
    return None


def _emit(args, doc, elapsed, command):
    if doc is None:
        return 2
    csv_path = getattr(args, "csv", None)
    csv_text = doc.pop("csv", None)
    if csv_path and csv_text is not None:
        with open(csv_path, "w") as fh:
            fh.write(csv_text)
    text = canonical_dumps(doc)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    verdict = doc.get("verdict")
    bits = [f"wlcheck {command}:", verdict or "ok"]
    if "residual" in doc:
        bits.append(f"residual={doc['residual']:.3e}")
    bits.append(f"[{elapsed:.2f}s]")
    print(" ".join(bits), file=sys.stderr)
    return 0 if verdict in (None, "pass") else 1


def _cmd_check(args):
    payload = _base_payload(args)
    if args.group is not None:
        payload["group"] = args.group
    if "group" not in payload:
        raise WlcheckError("check needs a catalog group "
                           "(argument or config key)")
    doc, elapsed = _post(args, "/check", payload)
    return _emit(args, doc, elapsed, "check")


def _cmd_conditions(args):
    payload = _base_payload(args)
    if args.kinematics is not None:
        payload["kinematics"] = args.kinematics
    doc, elapsed = _post(args, "/conditions", payload)
    return _emit(args, doc, elapsed, "conditions")


def _cmd_covariance(args):
    payload = _base_payload(args)
    for key in ("samples", "seed", "margins"):
        payload.pop(key, None)
    if args.kinematics is not None:
        payload["kinematics"] = args.kinematics
    if args.transform is not None:
        payload["transform"] = _parse_transform(args.transform)
    if "transform" not in payload:
        raise WlcheckError("covariance needs --transform or a config key")
    if args.x0 is not None:
        payload["x0"] = _parse_points(args.x0, "x0")
    if args.v0 is not None:
        payload["v0"] = _parse_points(args.v0, "v0")
    if "x0" not in payload or "v0" not in payload:
        raise WlcheckError("covariance needs --x0 and --v0")
    for name in ("t0", "t1", "dt", "tol"):
        value = getattr(args, name, None)
        if value is not None:
            payload[name] = value
    if args.csv:
        payload["csv"] = True
    doc, elapsed = _post(args, "/covariance", payload)
    return _emit(args, doc, elapsed, "covariance")


def _cmd_catalog(args):
    doc, elapsed = _get(args, "/catalog")
    return _emit(args, doc, elapsed, "catalog")


def _cmd_serve(args):
    import uvicorn

    from .service import app
    uvicorn.run(app, host=args.host, port=args.port)
    return 0
