"""Command line front end: verify, sweep, oracle and polygon utilities.

Exit codes: 0 success, 1 a mathematical cross-check failed, 2 bad input.
Reports go to stdout (or ``--out``) as canonical JSON; timing goes to stderr.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import itertools
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from importlib import resources
from typing import Any, Sequence

import jsonschema

from . import curve as cv
from .curve import CurveModel, Place, RegularFunction
from .dwork import oracle_compare
from .errors import ConfigError, InputError, RedAlert, ScopeError
from .ff import DEFAULT_BUDGET, build_tower
from .lfun import as_cover_zeta, compute_l, expand_boundary, verify_bound
from .polygon import NewtonPolygon, concat, lies_above, lower_hull, scale, truncate_below

EXIT_OK, EXIT_ALERT, EXIT_INPUT = 0, 1, 2


# -- schemas -----------------------------------------------------------------------


def load_schema(name: str) -> dict:
    text = resources.files("swanbound").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(data: Any, name: str) -> None:
    try:
        jsonschema.validate(data, load_schema(name))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ConfigError(f"{name} config invalid at {where}: {exc.message}") from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# -- configuration -------------------------------------------------------------------


def _rational_parts(desc: dict) -> tuple[list, list]:
    if "terms" in desc:
        terms: dict[int, Any] = {}
        for e, c in desc["terms"]:
            if e in terms:
                raise ConfigError(f"exponent {e} listed twice")
            terms[e] = c
        lo = min([0, *terms])
        hi = max([0, *terms])
        num: list = [0] * (hi - lo + 1)
        for e, c in terms.items():
            num[e - lo] = c
        return num, [0] * (-lo) + [1]
    return list(desc["num"]), list(desc.get("den", [1]))


def build_case(cfg: dict):
    """(model, boundary, f) from a validated case config."""
    F = build_tower(cfg["p"], cfg.get("a", 1))
    c = cfg["curve"]
    model = CurveModel.p1(F) if c["type"] == "p1" else CurveModel.hyperelliptic(F, c["h"])
    boundary = []
    for b in cfg["boundary"]:
        if b["type"] == "infinite":
            boundary.append(Place("infinite", branch=b.get("branch")))
        else:
            y = F.element(b["y"]) if "y" in b else None
            boundary.append(Place("finite", F.element(b["x"]), y))
    fd = cfg["f"]
    if "u" in fd:
        if model.kind == cv.P1 and "v" in fd:
            raise ConfigError("a function on P^1 has no y-part")
        un, ud = _rational_parts(fd["u"])
        vn, vd = _rational_parts(fd["v"]) if "v" in fd else ([], [1])
        f = RegularFunction.hyperelliptic(F, un, ud, vn, vd)
    else:
        num, den = _rational_parts(fd)
        f = RegularFunction.rational(F, num, den)
    return model, boundary, f


def _laurent_terms(cfg: dict) -> dict[int, int]:
    """Exponent map of f when it is a Laurent polynomial over F_p; else ScopeError."""
    fd = cfg["f"]
    if "u" in fd:
        if "v" in fd:
            raise ScopeError("the oracle handles functions of x alone")
        fd = fd["u"]
    num, den = _rational_parts(fd)
    for c in [*num, *den]:
        if not isinstance(c, int) and len(c) > 1:
            raise ScopeError("the oracle works over F_p only")
    ints = [c if isinstance(c, int) else c[0] for c in den]
    nz = [i for i, c in enumerate(ints) if c % cfg["p"]]
    if len(nz) != 1:
        raise ScopeError("the oracle needs f to be a Laurent polynomial (monomial denominator)")
    k = nz[0]
    inv = pow(ints[k], -1, cfg["p"])
    terms = {}
    for i, c in enumerate(num):
        v = (c if isinstance(c, int) else c[0]) * inv % cfg["p"]
        if v:
            terms[i - k] = v
    return terms


def oracle_scope(cfg: dict) -> tuple[dict[int, int], bool]:
    """(terms, affine_line) for a config inside the oracle's scope."""
    if cfg.get("a", 1) != 1:
        raise ScopeError("the oracle requires q = p (a = 1)")
    if cfg["curve"]["type"] != "p1":
        raise ScopeError("the oracle requires the base curve P^1")
    inf = [b for b in cfg["boundary"] if b["type"] == "infinite"]
    fin = [b for b in cfg["boundary"] if b["type"] == "finite"]

    def is_zero(x) -> bool:
        return not any(x) if isinstance(x, list) else x % cfg["p"] == 0

    if len(inf) != 1 or len(fin) > 1 or (fin and not is_zero(fin[0]["x"])):
        raise ScopeError("the oracle requires V = A^1 or G_m (boundary {inf} or {0, inf})")
    affine = not fin
    return _laurent_terms(cfg), affine


# -- case runner ---------------------------------------------------------------------


def run_case(cfg: dict, budget: int | None = None, slack: int | None = None,
             jobs: int = 1) -> tuple[int, dict]:
    """Run one verify case; returns (exit code, report dict). Never raises library errors."""
    try:
        validate(cfg, "case")
        opts = cfg.get("options", {})
        budget = budget or opts.get("budget", DEFAULT_BUDGET)
        slack = slack or opts.get("slack", 3)
        model, boundary, f = build_case(cfg)
        rep = verify_bound(model, boundary, f, slack=slack, jobs=jobs, budget=budget,
                           method=opts.get("method", "auto"), strict=False)
        out = rep.to_json()
        alerts = []
        if not (rep.lies_above and rep.lies_above_V):
            alerts.append({"type": "LiesAboveViolation", "message": "Newton polygon dips below the Hodge bound"})
        if opts.get("cover"):
            if rep.field_doubled:
                raise ScopeError("cover check needs F_q-rational places at infinity")
            bnd = expand_boundary(model, boundary)
            ld = compute_l(model, bnd, f, slack, jobs, budget)
            crep = as_cover_zeta(model, bnd, f, ld, budget=budget, strict=False)
            out["cover"] = crep.to_json()
            if not (crep.functional_equation_ok and crep.counts_match and crep.corollary_ok):
                alerts.append({"type": "ConsistencyFailure", "message": "cover zeta function check failed"})
        if opts.get("oracle"):
            terms, affine = oracle_scope(cfg)
            orep = oracle_compare(terms, cfg["p"], affine, N=opts.get("N", 30),
                                  n_basis=opts.get("n_basis"), strict=False)
            out["oracle"] = orep.to_json()
            if not (orep.match and orep.stable is not False):
                alerts.append({"type": "OracleMismatch", "message": "Fredholm and point-count slopes differ"})
        if alerts:
            out["alert"] = alerts[0] if len(alerts) == 1 else {"type": "Multiple", "alerts": alerts}
            return EXIT_ALERT, out
        return EXIT_OK, out
    except RedAlert as exc:
        return EXIT_ALERT, {"alert": {"type": type(exc).__name__, "message": str(exc)}}
    except InputError as exc:
        return EXIT_INPUT, {"error": {"type": type(exc).__name__, "message": str(exc)}}


def run_oracle(cfg: dict) -> tuple[int, dict]:
    try:
        validate(cfg, "case")
        opts = cfg.get("options", {})
        terms, affine = oracle_scope(cfg)
        build_tower(cfg["p"])
        rep = oracle_compare(terms, cfg["p"], affine, N=opts.get("N", 30),
                             n_basis=opts.get("n_basis"), strict=False)
        out = rep.to_json()
        if not (rep.match and rep.stable is not False):
            out["alert"] = {"type": "OracleMismatch", "message": "Fredholm and point-count slopes differ"}
            return EXIT_ALERT, out
        return EXIT_OK, out
    except RedAlert as exc:
        return EXIT_ALERT, {"alert": {"type": type(exc).__name__, "message": str(exc)}}
    except InputError as exc:
        return EXIT_INPUT, {"error": {"type": type(exc).__name__, "message": str(exc)}}


# -- sweeps --------------------------------------------------------------------------


def substitute(obj: Any, values: dict[str, Any]) -> Any:
    """Replace every string "$name" with values[name], recursively."""
    if isinstance(obj, str) and obj.startswith("$"):
        key = obj[1:]
        if key not in values:
            raise ConfigError(f"template placeholder {obj} has no grid entry")
        return values[key]
    if isinstance(obj, list):
        return [substitute(x, values) for x in obj]
    if isinstance(obj, dict):
        return {k: substitute(v, values) for k, v in obj.items()}
    return obj


def expand_sweep(cfg: dict) -> list[dict[str, Any]]:
    """Grid points of the Cartesian product, in declaration order."""
    validate(cfg, "sweep")
    names = list(cfg["grid"])
    if not names:
        return []
    return [dict(zip(names, combo)) for combo in itertools.product(*(cfg["grid"][n] for n in names))]


def _attainment_key(report: dict) -> str:
    p = report["p"]
    d = report["case"]["d"]
    return f"p={p};p mod d=" + ",".join(f"{p % di}/{di}" for di in d)


def sweep_summary(rows: Sequence[dict]) -> dict:
    groups: dict[str, dict[str, int]] = {}
    counts = {"cases": len(rows), "ok": 0, "alerts": 0, "input_errors": 0}
    for row in rows:
        status = row["status"]
        counts["ok" if status == "ok" else "alerts" if status == "alert" else "input_errors"] += 1
        rep = row.get("report", {})
        if "case" in rep:
            g = groups.setdefault(_attainment_key(rep), {"cases": 0, "attained": 0, "predicted": 0})
            g["cases"] += 1
            g["attained"] += int(rep["attained"])
            g["predicted"] += int(rep["robba_predicted"])
    return {"summary": {**counts, "attainment": dict(sorted(groups.items()))}}


def run_sweep(cfg: dict, budget: int | None = None, slack: int | None = None,
              jobs: int = 1) -> tuple[int, list[dict]]:
    """One row per grid point plus the summary row; exit 1 on any alert, else 2 on any bad case."""
    grid = expand_sweep(cfg)

    def one(values: dict) -> dict:
        try:
            case = substitute(copy.deepcopy(cfg["template"]), values)
        except InputError as exc:
            code, rep = EXIT_INPUT, {"error": {"type": type(exc).__name__, "message": str(exc)}}
        else:
            code, rep = run_case(case, budget, slack)
        status = {EXIT_OK: "ok", EXIT_ALERT: "alert", EXIT_INPUT: "input_error"}[code]
        return {"params": values, "status": status, "report": rep}

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        rows = list(pool.map(one, grid))
    statuses = {r["status"] for r in rows}
    code = EXIT_ALERT if "alert" in statuses else EXIT_INPUT if "input_error" in statuses else EXIT_OK
    return code, rows + [sweep_summary(rows)]


# -- polygon utilities -----------------------------------------------------------------


def _load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc.msg}") from None


def _polygon_file(path: str) -> NewtonPolygon:
    data = _load_json(path)
    if isinstance(data, dict):
        data = data.get("slopes", data.get("polygon"))
    try:
        return NewtonPolygon.from_json(data)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{path} is not a slope list [[num, den, mult], ...]: {exc}") from None


def _parse_rational(x: Any) -> Fraction:
    try:
        return Fraction(x) if not isinstance(x, float) else Fraction(str(x))
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(f"not a rational number: {x!r}") from None


def _points_file(path: str) -> list:
    data = _load_json(path)
    if isinstance(data, dict):
        data = data.get("points")
    if not isinstance(data, list):
        raise ConfigError(f"{path} must hold a list of [x, y] points")
    pts = []
    for item in data:
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], int)):
            raise ConfigError(f"bad point {item!r}: expected [integer, rational or null]")
        pts.append((item[0], None if item[1] is None else _parse_rational(item[1])))
    return pts


def run_polygon(args: argparse.Namespace) -> tuple[int, Any, NewtonPolygon | None]:
    try:
        sub = args.sub
        if sub == "hull":
            P = lower_hull(_points_file(args.files[0]))
        elif sub == "concat":
            P = concat(*(_polygon_file(f) for f in args.files))
        elif sub == "truncate":
            P = truncate_below(_polygon_file(args.files[0]), _parse_rational(args.below))
        elif sub == "scale":
            P = scale(_polygon_file(args.files[0]), _parse_rational(args.by))
        else:
            if len(args.files) != 2:
                raise ConfigError("lies_above needs exactly two polygon files")
            A, B = (_polygon_file(f) for f in args.files)
            return EXIT_OK, {"lies_above": lies_above(A, B)}, None
        out = {"slopes": P.to_json(), "vertices": [[x, str(y)] for x, y in P.vertices()]}
        return EXIT_OK, out, P
    except InputError as exc:
        return EXIT_INPUT, {"error": {"type": type(exc).__name__, "message": str(exc)}}, None


# -- entry point -----------------------------------------------------------------------


def _csv_rows(report: dict) -> str:
    """Vertices of the Newton and Hodge polygons as CSV."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["polygon", "x", "y"])
    for key in ("newton", "hodge", "newton_V", "hodge_V"):
        if key in report:
            P = NewtonPolygon.from_json(report[key])
            for x, y in P.vertices():
                w.writerow([key, x, str(y)])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=1, help="worker threads")
    common.add_argument("--budget", type=int, default=None, help="field enumeration budget")
    common.add_argument("--slack", type=int, default=None, help="extra vanishing coefficients to check")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--csv", default=None, help="write polygon vertices as CSV")

    parser = argparse.ArgumentParser(prog="swanbound", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("verify", "check Newton above Hodge for one case"),
                        ("sweep", "run a parameter grid of cases"),
                        ("oracle", "compare against the Dwork trace formula")]:
        sp = subs.add_parser(name, parents=[common], help=help_)
        sp.add_argument("config")
    pp = subs.add_parser("polygon", parents=[common], help="Newton polygon utilities")
    pp.add_argument("sub", choices=["hull", "concat", "truncate", "scale", "lies_above"])
    pp.add_argument("files", nargs="+")
    pp.add_argument("--below", default=None, help="threshold for truncate")
    pp.add_argument("--by", default=None, help="factor for scale")
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    csv_text = None
    if args.command == "polygon":
        if args.sub == "truncate" and args.below is None or args.sub == "scale" and args.by is None:
            code, out, P = EXIT_INPUT, {"error": {"type": "ConfigError", "message": "missing --below/--by"}}, None
        else:
            code, out, P = run_polygon(args)
        text = dumps(out) + "\n"
        if P is not None:
            csv_text = P.to_csv()
    else:
        try:
            cfg = _load_json(args.config)
        except InputError as exc:
            code, text = EXIT_INPUT, dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n"
        else:
            if args.command == "verify":
                code, out = run_case(cfg, args.budget, args.slack, args.jobs)
                text = dumps(out) + "\n"
                if code != EXIT_INPUT and "newton" in out:
                    csv_text = _csv_rows(out)
            elif args.command == "oracle":
                code, out = run_oracle(cfg)
                text = dumps(out) + "\n"
            else:
                try:
                    code, rows = run_sweep(cfg, args.budget, args.slack, args.jobs)
                    text = "".join(dumps(r) + "\n" for r in rows)
                except InputError as exc:
                    code = EXIT_INPUT
                    text = dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n"
    _emit(text, args.out)
    if args.csv and csv_text is not None:
        with open(args.csv, "w") as fh:
            fh.write(csv_text)
    print(f"swanbound {args.command}: exit {code} in {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
