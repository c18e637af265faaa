"""Batch command-line interface.

Each subcommand maps 1:1 to a library operation, reads a declaration script
from a file or stdin, and emits either human text or the structured report.
Exit codes: 0 success, 1 property-falsified (or no solution / verification
mismatch), 2 parse or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import equations as eqmod
from . import finite_solver as solver
from . import freegroup as fg
from . import generalized as gen
from . import up as upmod
from .backends import FreeProductGroup
from .config import Caps, load_caps
from .dsl import Session, parse_script
from .errors import GroupEqError, ParseError
from .report import SCHEMA, canonical_json, fmt_elem, fmt_elems, make_report, render_text
from .words import Presentation

COMMANDS = (
    "classify",
    "rewrite-coset",
    "conjugate-family",
    "emit-ky",
    "emit-solution-group",
    "reduce",
    "verdict",
    "normal-form-6",
    "emit-system-7",
    "up-check",
    "strong-up",
    "up4",
    "strojnowski",
    "search-nonup",
    "proper-power",
    "corollary-precheck",
    "solve-finite",
    "verify",
)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="groupeq", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        p = sub.add_parser(cmd)
        if cmd == "verify":
            p.add_argument("report", help="structured report file to re-run and compare")
            continue
        p.add_argument("script", nargs="?", default="-", help="script file or - for stdin")
        p.add_argument("--format", choices=("text", "structured"), default="text")
        p.add_argument("--name", default=None, help="declared object to operate on")
        p.add_argument("--radius", type=int, default=None)
        p.add_argument("--max-size", type=int, default=None)
        p.add_argument("--max-len", type=int, default=None)
        p.add_argument("--window", type=int, default=None)
        p.add_argument("--max-degree", type=int, default=None)
        p.add_argument("--budget-ms", type=int, default=None)
        p.add_argument("--config", default=None, help="JSON file with cap overrides")
        if cmd in ("conjugate-family", "emit-ky", "emit-solution-group"):
            p.add_argument("--cosets", default=None, help="';'-separated T-element literals")
        if cmd in ("emit-ky", "emit-solution-group"):
            p.add_argument("--witness-var", default="t~")
        if cmd == "reduce":
            p.add_argument("--ambient", choices=("free-product", "direct-product"), default="free-product")
        if cmd in ("normal-form-6", "emit-system-7"):
            p.add_argument("--split", default=None, help="H and K factor indices, e.g. 0|1")
        if cmd in ("up-check", "strong-up", "strojnowski"):
            p.add_argument("--sets", required=True, help="two declared set names, e.g. X,Y")
        if cmd == "up4":
            p.add_argument("--sets", required=True, help="four declared set names")
        if cmd == "search-nonup":
            p.add_argument("--group", default=None, help="declared group name")
        if cmd == "proper-power":
            p.add_argument("--elem", required=True, help="declared element name")
    return top


# ---------------------------------------------------------------------------
# helpers


def _pick(sess: Session, kind: str, store: dict, name: Optional[str]):
    if name is not None:
        if name not in store:
            raise GroupEqError(f"no declared {kind} named {name!r}")
        return store[name]
    last = sess.last_of(kind)
    if last is None:
        raise GroupEqError(f"the script declares no {kind}")
    return store[last]


def _named_sets(sess: Session, spec: str, count: int):
    names = [n.strip() for n in spec.split(",")]
    if len(names) != count:
        raise GroupEqError(f"--sets needs {count} comma-separated names")
    out = []
    for n in names:
        if n not in sess.sets:
            raise GroupEqError(f"no declared set named {n!r}")
        out.append(sess.sets[n])
    return out


def _cosets(sess: Session, ge: gen.GeneralizedEquation, spec: Optional[str]):
    if spec is None:
        return None
    out = []
    for lit in spec.split(";"):
        lit = lit.strip()
        if lit:
            out.append(ge.vargroup.parse_element(lit))
    return out


def _split_of(e: eqmod.Equation, spec: Optional[str]) -> eqmod.Split:
    if not isinstance(e.group, FreeProductGroup):
        raise GroupEqError("normal-form commands need a free-product coefficient group")
    if spec is None:
        return eqmod.Split.of(e.group, [0])
    hs, _, ks = spec.partition("|")
    h = [int(v) for v in hs.replace(",", " ").split()] if hs.strip() else []
    k = [int(v) for v in ks.replace(",", " ").split()] if ks.strip() else None
    return eqmod.Split.of(e.group, h, k)


def _pres_struct(p: Presentation) -> dict:
    return p.to_struct()


def _leveled_struct(w: eqmod.LeveledWord) -> list:
    return [
        [lvl, fi, w.group.factors[fi].format_element(el)] for lvl, fi, el in w.syllables
    ]


# ---------------------------------------------------------------------------
# command implementations: (status, result, exit_code)


def _run_classify(sess: Session, args: dict, caps: Caps):
    e = _pick(sess, "equation", sess.equations, args.get("name"))
    c = eqmod.classify(e)
    return "ok", {
        "length": c.length,
        "exponent_sum": c.exponent_sum,
        "kind": c.kind,
        "trivial": c.trivial,
    }, 0


def _run_rewrite_coset(sess: Session, args: dict, caps: Caps):
    ge = _pick(sess, "geq", sess.geqs, args.get("name"))
    re = gen.coset_rewrite(ge)
    ok = re.expansion() == ge.word()
    return "ok", {
        "total_product": fmt_elem(re.t),
        "coset_reps": fmt_elems(re.coset_reps()),
        "terms": [[fmt_elem(g), fmt_elem(c), k] for g, c, k in re.terms],
        "sign": re.sign,
        "expansion_verified": ok,
    }, 0


def _run_conjugate_family(sess: Session, args: dict, caps: Caps):
    ge = _pick(sess, "geq", sess.geqs, args.get("name"))
    re = gen.coset_rewrite(ge)
    xs = _cosets(sess, ge, args.get("cosets")) or list(re.coset_reps())
    fam = gen.conjugate_family(re, xs)
    return "ok", {
        "labels": fmt_elems(xs),
        "members": [
            {
                "sign": w.sign,
                "terms": [[fmt_elem(g), fmt_elem(c), k] for g, c, k in w.terms],
            }
            for w in fam
        ],
    }, 0


def _run_emit_ky(sess: Session, args: dict, caps: Caps):
    ge = _pick(sess, "geq", sess.geqs, args.get("name"))
    re = gen.coset_rewrite(ge)
    ys = _cosets(sess, ge, args.get("cosets")) or [ge.vargroup.identity()]
    pres = gen.emit_ky(re, ys, args.get("witness_var", "t~"))
    return "ok", {"presentation": _pres_struct(pres), "text": pres.to_text()}, 0


def _run_emit_solution_group(sess: Session, args: dict, caps: Caps):
    ge = _pick(sess, "geq", sess.geqs, args.get("name"))
    re = gen.coset_rewrite(ge)
    ys = _cosets(sess, ge, args.get("cosets")) or [ge.vargroup.identity()]
    window = args.get("window")
    pres = gen.emit_solution_group(re, ys, 1 if window is None else window, args.get("witness_var", "t~"))
    return "ok", {"presentation": _pres_struct(pres), "text": pres.to_text()}, 0


def _run_reduce(sess: Session, args: dict, caps: Caps):
    ge = _pick(sess, "geq", sess.geqs, args.get("name"))
    eq = gen.reduce_to_ordinary(ge, args.get("ambient", "free-product"))
    c = eqmod.classify(eq)
    return "ok", {
        "ambient": args.get("ambient", "free-product"),
        "terms": [[fmt_elem(g), e] for g, e in eq.terms],
        "classification": {
            "length": c.length,
            "exponent_sum": c.exponent_sum,
            "kind": c.kind,
            "trivial": c.trivial,
        },
    }, 0


def _cond_struct(c: gen.Condition) -> dict:
    out = {"status": c.status, "detail": c.detail}
    if c.witness is not None:
        out["witness"] = _witness_struct(c.witness)
    return out


def _witness_struct(w) -> list:
    out = []
    for item in w:
        if isinstance(item, (tuple, list)):
            out.append([fmt_elem(v) if hasattr(v, "group") else v for v in item])
        elif hasattr(item, "group"):
            out.append(fmt_elem(item))
        else:
            out.append(item)
    return out


def _run_verdict(sess: Session, args: dict, caps: Caps):
    ge = _pick(sess, "geq", sess.geqs, args.get("name"))
    v = gen.unimodular_verdict(ge, caps)
    code = 1 if v.overall == "not-unimodular" else 0
    status = "falsified" if code else "ok"
    return status, {
        "overall": v.overall,
        "weak_overall": v.weak_overall,
        "order_infinite": _cond_struct(v.order_infinite),
        "subgroup_normal": _cond_struct(v.subgroup_normal),
        "quotient_strong_up": _cond_struct(v.quotient_strong_up),
        "quotient_torsion_free": _cond_struct(v.quotient_torsion_free),
    }, code


def _run_normal_form_6(sess: Session, args: dict, caps: Caps):
    e = _pick(sess, "equation", sess.equations, args.get("name"))
    split = _split_of(e, args.get("split"))
    res = eqmod.normal_form_6(e, split, caps)
    if res.kind == "length-one":
        lf = res.length_one
        return "ok", {
            "kind": "length-one",
            "m": lf.m,
            "u": str(lf.u_word()),
            "sigma_inverted": lf.sigma_inverted,
        }, 0
    f = res.form6
    return "ok", {
        "kind": "form6",
        "m": f.m,
        "n": f.n,
        "c": str(f.c_word()),
        "pairs": [[str(b), str(a)] for b, a in f.pair_words()],
        "side_conditions": {
            "length_at_least_two": f.side_conditions.length_at_least_two,
            "a_outside_smaller_window": list(f.side_conditions.a_outside_smaller_window),
            "b_outside_shifted_window": list(f.side_conditions.b_outside_shifted_window),
            "transcendence": f.side_conditions.transcendence_note,
        },
        "sigma_inverted": f.sigma_inverted,
    }, 0


def _run_emit_system_7(sess: Session, args: dict, caps: Caps):
    e = _pick(sess, "equation", sess.equations, args.get("name"))
    split = _split_of(e, args.get("split"))
    res = eqmod.normal_form_6(e, split, caps)
    if res.kind == "length-one":
        return "ok", {
            "kind": "length-one",
            "note": "system degenerates to the shift relations with u substituted",
            "u": str(res.length_one.u_word()),
        }, 0
    window = args.get("window")
    pres = eqmod.emit_system_7(res.form6, caps.window if window is None else window)
    return "ok", {"kind": "form6", "presentation": _pres_struct(pres), "text": pres.to_text()}, 0


def _run_up_check(sess: Session, args: dict, caps: Caps):
    X, Y = _named_sets(sess, args["sets"], 2)
    rep = upmod.up_check(X, Y)
    code = 0 if rep.has_unique_product else 1
    return ("ok" if not code else "falsified"), {
        "x_size": len(rep.x),
        "y_size": len(rep.y),
        "unique_elements": fmt_elems(rep.unique_elements),
        "unique_count": rep.unique_count,
        "distinct_y_count": rep.distinct_y_count(),
        "total_factorizations": rep.total_factorizations,
        "census": [
            [fmt_elem(v), [[fmt_elem(x), fmt_elem(y)] for x, y in pairs]]
            for v, pairs in rep.products
        ],
    }, code


def _run_strong_up(sess: Session, args: dict, caps: Caps):
    X, Y = _named_sets(sess, args["sets"], 2)
    res = upmod.strong_up_check(X, Y)
    code = 0 if res.holds else 1
    result = {
        "holds": res.holds,
        "unique_count": res.report.unique_count,
        "distinct_y_count": res.report.distinct_y_count(),
    }
    if res.witness:
        result["witness"] = [[fmt_elem(a), fmt_elem(b)] for a, b in res.witness]
    return ("ok" if not code else "falsified"), result, code


def _run_up4(sess: Session, args: dict, caps: Caps):
    A, B, C, D = _named_sets(sess, args["sets"], 4)
    res = upmod.up4_check(A, B, C, D)
    code = 0 if res.holds else 1
    result = {"holds": res.holds, "total_quadruples": res.total_quadruples}
    if res.witness:
        v, quad = res.witness
        result["witness"] = {"product": fmt_elem(v), "quadruple": fmt_elems(quad)}
    return ("ok" if not code else "falsified"), result, code


def _run_strojnowski(sess: Session, args: dict, caps: Caps):
    X, Y = _named_sets(sess, args["sets"], 2)
    res = upmod.strojnowski_check(X, Y)
    code = 0 if (not res.certified or res.bound_met) else 1
    return ("ok" if not code else "falsified"), {
        "certified": res.certified,
        "reason": res.reason,
        "unique_count": res.unique_count,
        "bound_met": res.bound_met,
    }, code


def _run_search_nonup(sess: Session, args: dict, caps: Caps):
    gname = args.get("group")
    if gname is not None:
        if gname not in sess.groups:
            raise GroupEqError(f"no declared group named {gname!r}")
        group = sess.groups[gname]
    else:
        last = sess.last_of("group")
        if last is None:
            raise GroupEqError("the script declares no group")
        group = sess.groups[last]
    radius = args.get("radius") or 3
    maxsize = args.get("max_size") or 14
    res = upmod.search_nonup_witness(group, radius, maxsize, caps=caps)
    code = 1 if res.found else 0
    return ("falsified" if res.found else "ok"), {
        "found": res.found,
        "witness": fmt_elems(res.witness) if res.witness else None,
        "reverified": res.verified,
        "sizes_exhausted": list(res.sizes_exhausted),
        "sizes_truncated": list(res.sizes_truncated),
        "subsets_tested": res.subsets_tested,
    }, code


def _run_proper_power(sess: Session, args: dict, caps: Caps):
    name = args["elem"]
    if name not in sess.elements:
        raise GroupEqError(f"no declared element named {name!r}")
    w = sess.elements[name]
    dec = fg.proper_power(w)
    return "ok", {
        "root": fmt_elem(dec.root),
        "exponent": dec.exponent,
        "core_root": fmt_elem(dec.core_root),
        "conjugator": fmt_elem(dec.conjugator),
        "is_proper_power": dec.is_proper_power,
    }, 0


def _run_corollary_precheck(sess: Session, args: dict, caps: Caps):
    mv = _pick(sess, "mveq", sess.mveqs, args.get("name"))
    rep = fg.corollary_precheck(mv)
    code = 0 if rep.status == "corollary-applies" else 1
    result = {"status": rep.status}
    if rep.variable_word is not None:
        result["variable_word"] = fmt_elem(rep.variable_word)
    if rep.decomposition is not None:
        result["root"] = fmt_elem(rep.decomposition.root)
        result["exponent"] = rep.decomposition.exponent
    return ("ok" if not code else "falsified"), result, code


def _run_solve_finite(sess: Session, args: dict, caps: Caps):
    e = _pick(sess, "equation", sess.equations, args.get("name"))
    rep = solver.solve_over_finite(e, args.get("max_degree"), caps)
    if rep.found:
        cert = rep.certificate
        ok = solver.verify_certificate(cert, e)
        result = {
            "found": True,
            "degree": cert.degree,
            "solution": list(cert.solution),
            "reverified": ok,
            "degrees_tested": list(rep.degrees_tested),
            "degrees_capped": list(rep.degrees_capped),
        }
        return "ok", result, 0
    return "falsified", {
        "found": False,
        "degrees_tested": list(rep.degrees_tested),
        "degrees_capped": list(rep.degrees_capped),
    }, 1


RUNNERS = {
    "classify": _run_classify,
    "rewrite-coset": _run_rewrite_coset,
    "conjugate-family": _run_conjugate_family,
    "emit-ky": _run_emit_ky,
    "emit-solution-group": _run_emit_solution_group,
    "reduce": _run_reduce,
    "verdict": _run_verdict,
    "normal-form-6": _run_normal_form_6,
    "emit-system-7": _run_emit_system_7,
    "up-check": _run_up_check,
    "strong-up": _run_strong_up,
    "up4": _run_up4,
    "strojnowski": _run_strojnowski,
    "search-nonup": _run_search_nonup,
    "proper-power": _run_proper_power,
    "corollary-precheck": _run_corollary_precheck,
    "solve-finite": _run_solve_finite,
}


def run_command(command: str, args: dict, script: str, caps: Caps) -> tuple[dict, int]:
    """Parse the script, dispatch, and build the structured report."""
    try:
        sess = parse_script(script, caps)
        status, result, code = RUNNERS[command](sess, args, caps)
        return make_report(command, args, script, status, result), code
    except ParseError as exc:
        err = {"type": "ParseError", "message": exc.message, "line": exc.line, "column": exc.column}
        return make_report(command, args, script, "error", {}, err), 2
    except GroupEqError as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        return make_report(command, args, script, "error", {}, err), 2


def _caps_from_args(ns: argparse.Namespace) -> Caps:
    caps = load_caps(getattr(ns, "config", None))
    return caps.with_overrides(
        radius=getattr(ns, "radius", None),
        max_len=getattr(ns, "max_len", None),
        window=getattr(ns, "window", None),
        max_degree=getattr(ns, "max_degree", None),
        budget_ms=getattr(ns, "budget_ms", None),
    )


def _command_args(ns: argparse.Namespace) -> dict:
    skip = {"command", "script", "format", "config"}
    return {k: v for k, v in vars(ns).items() if k not in skip and v is not None}


def _read_script(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if ns.command == "verify":
        return _verify(ns.report)
    try:
        script = _read_script(ns.script)
    except OSError as exc:
        print(f"cannot read script: {exc}", file=sys.stderr)
        return 2
    caps = _caps_from_args(ns)
    report, code = run_command(ns.command, _command_args(ns), script, caps)
    if ns.format == "structured":
        print(canonical_json(report))
    else:
        sys.stdout.write(render_text(report))
    return code


def _verify(path: str) -> int:
    """Re-run the embedded command and compare reports byte for byte."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            stored = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read report: {exc}", file=sys.stderr)
        return 2
    if stored.get("schema") != SCHEMA:
        print("unknown report schema", file=sys.stderr)
        return 2
    fresh, _ = run_command(stored["command"], stored["args"], stored["script"], load_caps())
    match = canonical_json(fresh) == canonical_json(stored)
    print("verified: reports match" if match else "MISMATCH: report does not reproduce")
    return 0 if match else 1


if __name__ == "__main__":
    sys.exit(main())
