"""Command line interface: ring/module config files, tools and scenarios."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dc_field

from . import __version__
from .fpmod import (
    FPModule,
    QuotientRing,
    ext1,
    find_isomorphism,
    hom_module,
    ideal_colon,
    ideal_gb,
    minimal_generators,
    present_ideal,
    rank,
    standard_monomial_count,
    tensor_R,
    torsion_submodule,
)
from .groebner import DegreeCapExceeded, SaturationDiverged, degree_cap, normal_form_vec, toric_ideal
from .poly import QQ, PolyRing, PolySyntaxError, UnknownVariable, field_from_tag
from .scenarios import (
    Runner,
    ScenarioReport,
    matrix_star_scenario,
    theorem_sweep,
    toric_scenario,
    verify_example,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
SCENARIOS = ("verify-example", "theorem-sweep", "matrix-star", "toric", "custom")
TOP_KEYS = ("field", "vars", "weights", "relations", "domain", "modules", "scenario")
MODULE_KEYS = ("ngens", "rels", "degrees")


class ConfigError(ValueError):
    """Malformed input; ``path`` is a JSON path such as ``$.relations[1]``."""

    def __init__(self, path, msg):
        super().__init__(f"{path}: {msg}")
        self.path = path


@dataclass
class Config:
    field: object
    ring: QuotientRing
    modules: dict = dc_field(default_factory=dict)
    scenario: dict = dc_field(default_factory=dict)


# ---------------------------------------------------------------- config parsing


def _expect(cond, path, msg):
    if not cond:
        raise ConfigError(path, msg)


def _parse_poly(S, text, path):
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ConfigError(path, "expected a polynomial string or integer")
    try:
        return S.parse(str(text))
    except UnknownVariable as exc:
        raise ConfigError(path, f"unknown variable `{exc.name}`") from exc
    except PolySyntaxError as exc:
        raise ConfigError(path, f"parse error at position {exc.pos}: {exc}") from exc


def parse_config(source):
    """Validate a JSON config (path, JSON text, or already-loaded dict)."""
    if isinstance(source, dict):
        data = source
    else:
        text = source
        if not str(source).lstrip().startswith("{"):
            try:
                with open(source) as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError("$", f"cannot read config: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    _expect(isinstance(data, dict), "$", "top level must be an object")
    for k in data:
        _expect(k in TOP_KEYS, f"$.{k}", "unknown field")

    try:
        F = field_from_tag(data.get("field", "Q"))
    except (ValueError, TypeError) as exc:
        raise ConfigError("$.field", str(exc)) from exc

    names = data.get("vars")
    _expect(isinstance(names, list) and names, "$.vars", "expected a non-empty list of variable names")
    for i, n in enumerate(names):
        _expect(isinstance(n, str) and n.isidentifier(), f"$.vars[{i}]", "expected an identifier")
    _expect(len(set(names)) == len(names), "$.vars", "duplicate variable names")
    weights = data.get("weights", [1] * len(names))
    _expect(isinstance(weights, list) and len(weights) == len(names), "$.weights", "expected one weight per variable")
    for i, w in enumerate(weights):
        _expect(isinstance(w, int) and not isinstance(w, bool) and w > 0, f"$.weights[{i}]", "expected a positive integer")
    S = PolyRing(names, weights, F)

    rels = data.get("relations", [])
    _expect(isinstance(rels, list), "$.relations", "expected a list")
    polys = [_parse_poly(S, r, f"$.relations[{i}]") for i, r in enumerate(rels)]
    domain = data.get("domain", not polys)
    _expect(isinstance(domain, bool), "$.domain", "expected true or false")
    ring = QuotientRing(S, polys, domain=domain, name="R")

    modules = {}
    mods = data.get("modules", {})
    _expect(isinstance(mods, dict), "$.modules", "expected an object")
    for name, body in mods.items():
        mp = f"$.modules.{name}"
        _expect(name != "R", mp, "the name R is reserved for the ring")
        _expect(isinstance(body, dict), mp, "expected an object")
        for k in body:
            _expect(k in MODULE_KEYS, f"{mp}.{k}", "unknown field")
        n = body.get("ngens")
        _expect(isinstance(n, int) and not isinstance(n, bool) and n >= 0, f"{mp}.ngens", "expected a non-negative integer")
        cols = body.get("rels", [])
        _expect(isinstance(cols, list), f"{mp}.rels", "expected a list of relation columns")
        vecs = []
        for j, col in enumerate(cols):
            cp = f"{mp}.rels[{j}]"
            _expect(isinstance(col, list) and len(col) == n, cp, f"expected a list of {n} entries")
            v = {}
            for i, entry in enumerate(col):
                for e, c in _parse_poly(S, entry, f"{cp}[{i}]").terms.items():
                    v[(i,) + e] = c
            vecs.append(v)
        degrees = body.get("degrees")
        if degrees is not None:
            _expect(
                isinstance(degrees, list) and len(degrees) == n and all(isinstance(d, int) for d in degrees),
                f"{mp}.degrees",
                f"expected {n} integers",
            )
        modules[name] = FPModule(ring, n, vecs, degrees, name=name)

    scenario = data.get("scenario", {})
    _expect(isinstance(scenario, dict), "$.scenario", "expected an object")
    if "name" in scenario:
        _expect(scenario["name"] in SCENARIOS, "$.scenario.name", f"expected one of {', '.join(SCENARIOS)}")
    return Config(F, ring, modules, scenario)


# ---------------------------------------------------------------- custom scenario

CUSTOM_OPS = ("mu", "rank", "torsion_free", "ext1_zero", "ext1_length", "hom_mu", "tensor_torsion_free", "isomorphic")


def _module(cfg, name, path):
    if name == "R":
        return FPModule.free(cfg.ring, 1, name="R")
    if name not in cfg.modules:
        raise ConfigError(path, f"unknown module {name!r}")
    return cfg.modules[name]


def _custom_value(cfg, op, mods):
    if op == "mu":
        return minimal_generators(mods[0])[0]
    if op == "rank":
        return rank(mods[0])
    if op == "torsion_free":
        return torsion_submodule(mods[0])[0].is_zero()
    if op == "ext1_zero":
        return ext1(mods[0], mods[1]).is_zero()
    if op == "ext1_length":
        return standard_monomial_count(ext1(mods[0], mods[1]))
    if op == "hom_mu":
        return minimal_generators(hom_module(mods[0], mods[1])[0])[0]
    if op == "tensor_torsion_free":
        return torsion_submodule(tensor_R(mods[0], mods[1]))[0].is_zero()
    if op == "isomorphic":
        return find_isomorphism(mods[0], mods[1]) is not None
    raise AssertionError(op)


def custom_scenario(cfg):
    """Checks listed under ``scenario.checks``; each may carry ``expect``."""
    checks = cfg.scenario.get("checks", [])
    _expect(isinstance(checks, list), "$.scenario.checks", "expected a list")
    plan = []
    for k, chk in enumerate(checks):
        cp = f"$.scenario.checks[{k}]"
        _expect(isinstance(chk, dict), cp, "expected an object")
        for key in chk:
            _expect(key in ("op", "module", "modules", "expect", "name"), f"{cp}.{key}", "unknown field")
        op = chk.get("op")
        _expect(op in CUSTOM_OPS, f"{cp}.op", f"expected one of {', '.join(CUSTOM_OPS)}")
        names = chk.get("modules", [chk["module"]] if "module" in chk else None)
        need = 1 if op in ("mu", "rank", "torsion_free") else 2
        _expect(isinstance(names, list) and len(names) == need, cp, f"op {op} needs {need} module name(s)")
        mods = [_module(cfg, n, f"{cp}.modules[{i}]") for i, n in enumerate(names)]
        plan.append((chk.get("name", f"{op}({','.join(names)})"), op, mods, chk.get("expect")))
        if op == "isomorphic" and chk.get("expect") is False:
            raise ConfigError(f"{cp}.expect", "non-isomorphism is not decidable by search")

    report = ScenarioReport("custom", {"config": cfg.scenario, "field": cfg.field.tag()})
    run = Runner(report)
    for label, op, mods, expect in plan:

        def go(op=op, mods=mods, expect=expect):
            val = _custom_value(cfg, op, mods)
            if op == "isomorphic" and not val:
                return "evidence", {"value": "no isomorphism found"}
            if expect is None:
                return True, {"value": val}
            return val == expect, {"value": val, "expect": expect}

        run.check(label, "user-specified", go)
    return report


# ---------------------------------------------------------------- ring from flags


def _ring_from_args(args):
    if args.config:
        return parse_config(args.config).ring
    F = _field(args)
    if args.semigroup:
        S, G = toric_ideal(_ints(args.semigroup), F)
        return QuotientRing(S, G.polys(), domain=True, name="R")
    if not args.vars:
        raise ConfigError("$.vars", "give --vars, --semigroup or --config")
    data = {"field": F.tag(), "vars": args.vars.split(",")}
    if args.weights:
        data["weights"] = _ints(args.weights)
    data["relations"] = list(args.relations or [])
    return parse_config(data).ring


def _field(args):
    return field_from_tag(args.field or "q")


def _ints(text):
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError("$", f"expected comma separated integers, got {text!r}") from exc


def _poly(R, text, label):
    return R.reduce(_parse_poly(R.S, text, label).terms)


# ---------------------------------------------------------------- subcommands


def cmd_toric(args, out):
    F = _field(args)
    S, G = toric_ideal(_ints(args.gens), F)
    lines = [str(p) for p in G.polys()]
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_gb(args, out):
    R = _ring_from_args(args)
    gens = [_poly(R, g, f"$.gens[{i}]") for i, g in enumerate(args.polys)]
    for g in ideal_gb(R, gens):
        out.write(R.fmt({m[1:]: c for m, c in g.items()}) + "\n")
    return EXIT_OK


def cmd_nf(args, out):
    R = _ring_from_args(args)
    f = _poly(R, args.poly, "$.poly")
    gens = [_poly(R, g, f"$.ideal[{i}]") for i, g in enumerate(args.ideal or [])]
    G = ideal_gb(R, gens) if gens else []
    vec = {(0,) + e: c for e, c in f.items()}
    basis = [{(0,) + e: c for e, c in g.items()} for g in G]
    r = normal_form_vec(vec, basis, R.order, R.F, R.jgb)
    out.write(R.fmt({m[1:]: c for m, c in r.items()}) + "\n")
    return EXIT_OK


def cmd_syz(args, out):
    R = _ring_from_args(args)
    I, _ = present_ideal(R, [_poly(R, g, f"$.gens[{i}]") for i, g in enumerate(args.polys)])
    for col in I.rels:
        out.write("[" + ", ".join(I.ring.fmt(c) for c in _components(col, I.ngens)) + "]\n")
    return EXIT_OK


def _components(vec, n):
    comps = [{} for _ in range(n)]
    for m, c in vec.items():
        comps[m[0]][m[1:]] = c
    return comps


def cmd_colon(args, out):
    R = _ring_from_args(args)
    a = [_poly(R, g, f"$.target[{i}]") for i, g in enumerate(args.target)]
    b = [_poly(R, g, f"$.by[{i}]") for i, g in enumerate(args.by)]
    for g in ideal_colon(R, a, b):
        out.write(R.fmt(g) + "\n")
    return EXIT_OK


def cmd_module(args, out):
    cfg = parse_config(args.config)
    M = _module(cfg, args.module, "$.module")
    N = _module(cfg, args.other, "$.other") if args.other else None
    if args.op in ("hom", "tensor", "ext1", "iso") and N is None:
        raise ConfigError("$.other", f"module {args.op} needs --other")
    if args.op == "mu":
        res = {"mu": minimal_generators(M)[0]}
    elif args.op == "rank":
        res = {"rank": rank(M)}
    elif args.op == "torsion":
        T, _, k = torsion_submodule(M)
        res = {"torsion_free": T.is_zero(), "torsion_mu": minimal_generators(T)[0], "x_exponent": k}
    elif args.op == "present":
        mu_, Mmin, _, _ = minimal_generators(M)
        res = {"mu": mu_, "degrees": list(Mmin.degrees), "relations": _cols(Mmin)}
    elif args.op == "hom":
        H, _ = hom_module(M, N)
        res = {"mu": minimal_generators(H)[0], "rank": rank(H)}
    elif args.op == "tensor":
        T = tensor_R(M, N)
        res = {"mu": minimal_generators(T)[0], "rank": rank(T), "torsion_free": torsion_submodule(T)[0].is_zero()}
    elif args.op == "ext1":
        X = ext1(M, N)
        res = {"zero": X.is_zero(), "length": standard_monomial_count(X)}
    else:
        f = find_isomorphism(M, N, seed=args.seed)
        res = {"isomorphism_found": f is not None, "matrix": f.matrix.to_strings(M.ring) if f else None}
    out.write(json.dumps(res, sort_keys=True, default=str) + "\n")
    return EXIT_OK


def _cols(M):
    return [[M.ring.fmt(c) for c in _components(col, M.ngens)] for col in M.rels]


def cmd_star(args, out):
    from .star import MatrixStarCertificate, theta_check

    if args.op == "example":
        report, ex = verify_example(_field(args), seed=args.seed)
        keep = {"hom_M_I", "self_duality", "gram_symmetry", "star_axioms", "dual_cyclic_by_t", "M_cyclic_by_s"}
        res = {c.name: c.status for c in report.checks if c.name in keep}
        res["end_generators"] = len(ex.E)
        res["end_commutative"] = ex.E.is_commutative()
        out.write(json.dumps(res, sort_keys=True) + "\n")
        return EXIT_OK if all(v != "fail" for v in res.values()) else EXIT_FAIL
    F = _field(args)
    ring = QuotientRing(PolyRing(["t"], [1], F), domain=True)
    rows = [r.split(",") for r in args.C.split(";")]
    cert = MatrixStarCertificate(ring, [[ring.elem(v.strip()) for v in r] for r in rows], ring.elem(args.a))
    rep = theta_check(len(rows), cert, ring)
    out.write(json.dumps(rep, sort_keys=True, default=str) + "\n")
    return EXIT_OK if rep["ok"] else EXIT_FAIL


def cmd_oracle(args, out):
    from .oracle import FiniteRing, compare_with_certificates, dense_tensor_check

    R = FiniteRing.from_name(args.ring)
    res = compare_with_certificates(args.n, R)
    if args.C:
        C = [[int(v) for v in r.split(",")] for r in args.C.split(";")]
        res = {"dense": dense_tensor_check(len(C), C, int(args.a), R)}
    out.write(json.dumps(res, sort_keys=True, default=str) + "\n")
    return EXIT_OK


def cmd_run(args, out):
    cfg = parse_config(args.config) if args.config else None
    params = dict(cfg.scenario) if cfg else {}
    name = args.scenario
    if params.get("name", name) != name:
        raise ConfigError("$.scenario.name", f"config is for {params['name']!r}, not {name!r}")
    if name == "verify-example":
        F = cfg.field if cfg and args.field is None else field_from_tag(args.field or "q")
        report, _ = verify_example(F, seed=args.seed)
    elif name == "theorem-sweep":
        fields = [QQ, field_from_tag("f2")] if args.field is None else [_field(args)]
        report = theorem_sweep(fields, jobs=args.jobs)
    elif name == "matrix-star":
        n = args.n if args.n is not None else params.get("n", 2)
        ring = args.ring or params.get("ring", "z4")
        report = matrix_star_scenario(int(n), ring)
    elif name == "toric":
        gens = _ints(args.gens) if args.gens else params.get("gens")
        if not gens:
            raise ConfigError("$.scenario.gens", "toric needs --gens")
        F = field_from_tag(args.field or (cfg.field.tag() if cfg else "q"))
        report = toric_scenario(gens, F)
    else:
        if cfg is None:
            raise ConfigError("$", "custom scenario needs --config")
        report = custom_scenario(cfg)
    text = report.to_json(times=not args.no_times) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        for c in report.checks:
            out.write(f"{c.status:8s} {c.name}\n")
        out.write(f"verdict: {report.verdict}\n")
    else:
        out.write(text)
    return EXIT_OK if report.verdict == "pass" else EXIT_FAIL


# ---------------------------------------------------------------- argument parser


def _ring_flags(p):
    p.add_argument("--config", help="JSON config with the ring")
    p.add_argument("--vars", help="comma separated variable names")
    p.add_argument("--weights", help="comma separated positive weights")
    p.add_argument("--relation", action="append", dest="relations", help="a defining relation (repeatable)")
    p.add_argument("--semigroup", help="use the semigroup ring k[t^a,t^b,...], e.g. 3,4,5")


def build_parser():
    ap = argparse.ArgumentParser(prog="startensor", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default=None, help="q, f2, fp:7 ... (default q)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--degree-cap", type=int, default=None)
    common.add_argument("--out", default=None, help="write the JSON report to this file")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("toric", parents=[common], help="toric ideal of a numerical semigroup")
    p.add_argument("gens", help="comma separated generators, e.g. 3,4,5")
    p.set_defaults(func=cmd_toric)

    p = sub.add_parser("gb", parents=[common], help="reduced Groebner basis of an ideal")
    _ring_flags(p)
    p.add_argument("polys", nargs="+")
    p.set_defaults(func=cmd_gb)

    p = sub.add_parser("nf", parents=[common], help="normal form modulo an ideal")
    _ring_flags(p)
    p.add_argument("poly")
    p.add_argument("--ideal", nargs="*")
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("syz", parents=[common], help="syzygies of ideal generators")
    _ring_flags(p)
    p.add_argument("polys", nargs="+")
    p.set_defaults(func=cmd_syz)

    p = sub.add_parser("colon", parents=[common], help="colon ideal (target : by)")
    _ring_flags(p)
    p.add_argument("--target", nargs="+", required=True)
    p.add_argument("--by", nargs="+", required=True)
    p.set_defaults(func=cmd_colon)

    p = sub.add_parser("module", parents=[common], help="module operations on config modules")
    p.add_argument("op", choices=["mu", "rank", "torsion", "present", "hom", "tensor", "ext1", "iso"])
    p.add_argument("--config", required=True)
    p.add_argument("--module", required=True)
    p.add_argument("--other")
    p.set_defaults(func=cmd_module)

    p = sub.add_parser("star", parents=[common], help="involution checks")
    p.add_argument("op", choices=["example", "theta"])
    p.add_argument("--C", default="1,0;0,1", help="certificate matrix, rows split by ';'")
    p.add_argument("--a", default="1", help="certificate scalar")
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("oracle", parents=[common], help="finite-ring involution oracle")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--ring", default="z4")
    p.add_argument("--C", default=None, help="run the dense tensor check for this certificate")
    p.add_argument("--a", default="1")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("run", parents=[common], help="run a verification scenario")
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--config")
    p.add_argument("--gens")
    p.add_argument("--n", type=int)
    p.add_argument("--ring")
    p.add_argument("--no-times", action="store_true", help="omit wall times for byte-identical output")
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        with degree_cap(args.degree_cap):
            return args.func(args, out)
    except (DegreeCapExceeded, SaturationDiverged) as exc:
        err.write(f"resource cap: {exc}\n")
        return EXIT_CAP
    except (ConfigError, PolySyntaxError, UnknownVariable) as exc:
        err.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except ValueError as exc:
        err.write(f"input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
