"""Command-line driver: ``dcrit COMMAND FILE... [--order O] [--jet-order N] [--json] [--vars V]``.

Exit codes: 0 success or a true answer, 1 a well-formed false answer or a
violated law, 2 usage or parse errors, 3 violated preconditions.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import bundles, chartcmp, dcritical, groebner, jets, textio
from .errors import ParseError, PreconditionError, ViolationError
from .polycore import MonomialOrder, Poly, merge_gens
from .textio import chart_json, dump_json, print_chart, print_poly, print_poly_list, print_rational

EXIT_OK, EXIT_FALSE, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3


@dataclass
class Report:
    lines: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    status: int = EXIT_OK

    def add(self, key: str, text: str, value=None) -> None:
        self.lines.append(f"{key} = {text}")
        self.data[key] = text if value is None else value

    def flag(self, key: str, ok: bool) -> None:
        self.add(key, "true" if ok else "false", ok)
        if not ok:
            self.status = EXIT_FALSE


def _b(x: bool) -> str:
    return "true" if x else "false"


def _print_ratfunc(num: Poly, den: Poly) -> str:
    if den.is_constant():
        c = den.constant_term()
        return print_poly(num.scale(1 / c)) if c != 1 else print_poly(num)
    n, d = print_poly(num), print_poly(den)
    if len(num.terms) > 1:
        n = f"({n})"
    if len(den.terms) > 1:
        d = f"({d})"
    return f"{n} / {d}"


# ---------------------------------------------------------------------------
# input helpers


def _ideal(doc, args, name=None) -> groebner.Ideal:
    I = doc.ideal(name)
    variables = tuple(args.vars) if args.vars else I.gens
    kind = args.order or I.order.kind
    if args.vars or args.order:
        I = groebner.Ideal(I.generators, MonomialOrder(kind, merge_gens(variables, I.gens)))
    return I


def _ideal_or_jac(doc, args) -> groebner.Ideal:
    if doc.ideals:
        return _ideal(doc, args)
    return doc.chart().jac


def _query(doc):
    return doc.queries and doc.query() or None


def _point(sec, variables) -> dict | None:
    if sec is None:
        return None
    pts = sec.prefixed("point")
    if not pts:
        return None
    out = {v: Fraction(0) for v in variables}
    for k, e in pts.items():
        out[k] = textio.parse_poly(e.value, ()).constant_term()
    return out


def _jet_order(args, default=None) -> int:
    if args.jet_order is not None:
        return args.jet_order
    return default if default is not None else jets.DEFAULT_ORDER


def _cocycle(doc) -> bundles.Cocycle:
    if doc.overlaps:
        return bundles.assemble_canonical(doc.charts, doc.overlaps)
    names = tuple(doc.charts) or tuple(dict.fromkeys(n for t in doc.transitions for n in (t.first, t.second)))
    return bundles.Cocycle(names, tuple(doc.transitions))


def _transition_lines(rep: Report, c: bundles.Cocycle) -> None:
    out = {}
    for t in c.transitions:
        text = _print_ratfunc(t.num, t.den)
        rep.lines.append(f"t[{t.first},{t.second}] = {text}")
        out[f"{t.first},{t.second}"] = text
    rep.data["transitions"] = out


def _chart_block(rep: Report, chart, name: str) -> None:
    rep.lines.extend(print_chart(chart, name).rstrip("\n").split("\n"))
    rep.lines.append("jac_basis = " + (print_poly_list(chart.jac.basis()) or "0"))
    rep.data.update(chart_json(chart))


# ---------------------------------------------------------------------------
# commands


def cmd_gb(doc, args) -> Report:
    rep = Report()
    I = _ideal(doc, args)
    q = _query(doc)
    op = q.text("op", "basis") if q else "basis"
    if op == "basis":
        result = groebner.reduced_groebner(I)
    elif op == "radical":
        result = groebner.radical_zero_dim(I).basis()
    elif op == "quotient_basis":
        qb = groebner.quotient_basis(I)
        mons = [print_poly(Poly.monomial(m, 1, I.gens)) for m in qb.monomials]
        rep.add("dim", str(qb.dimension), qb.dimension)
        rep.add("monomials", ", ".join(mons), mons)
        return rep
    else:
        J = _ideal(doc, args, q.text("with")) if q.has("with") else None
        k = int(q.text("k")) if q.has("k") else None
        elim = q.names("elim") if q.has("elim") else ()
        if op == "saturate" and J is None and q.has("u"):
            J = q.poly("u", I.gens)
        result = groebner.ideal_ops(I, J, op, k=k, variables=elim).basis()
    rep.lines.extend(print_poly(g) for g in result)
    rep.data["basis"] = [print_poly(g) for g in result]
    return rep


def _apply_query_ops(f: Poly, q) -> Poly:
    subs = q.prefixed("sub")
    if subs:
        f = Poly.coerce(f).compose({k: textio.parse_poly(e.value, f.gens, line=e.line, column=e.column)
                                    for k, e in subs.items()})
    if q.has("diff"):
        for v in q.names("diff"):
            f = f.diff(v)
    return f


def cmd_nf(doc, args) -> Report:
    rep = Report()
    q = doc.query()
    I = _ideal(doc, args) if doc.ideals else None
    variables = I.gens if I is not None else None
    f = _apply_query_ops(q.poly("f", variables), q)
    if I is not None:
        f = groebner.normal_form(f, I)
    at = q.prefixed("at")
    if at:
        point = {k: textio.parse_poly(e.value, ()).constant_term() for k, e in at.items()}
        value = f.evaluate(point)
        rep.add("value", print_rational(value), print_rational(value))
        return rep
    rep.add("nf", print_poly(f))
    return rep


def cmd_member(doc, args) -> Report:
    rep = Report()
    I = _ideal(doc, args)
    q = doc.query()
    f = q.poly("f", I.gens)
    mode = q.text("mode", "ideal")
    if mode == "ideal":
        rep.flag("member", groebner.contains(f, I))
    elif mode == "radical":
        rep.flag("radical_member", groebner.radical_membership(f, I))
    elif mode == "unit":
        u = q.poly("u", I.gens, default="1")
        rep.flag("unit", groebner.unit_in_quotient(f, I, u))
    else:
        e = q.get("mode")
        raise ParseError(f"unknown mode {mode!r}", e.line, e.column)
    return rep


def cmd_crit(doc, args) -> Report:
    rep = Report()
    charts = {}
    for name, chart in doc.charts.items():
        block = Report()
        _chart_block(block, chart, name)
        rep.lines.extend(block.lines)
        charts[name] = block.data
    if len(charts) == 1:
        rep.data = next(iter(charts.values()))
    else:
        rep.data = {"charts": charts}
    return rep


def cmd_section_eq(doc, args) -> Report:
    rep = Report()
    I = _ideal_or_jac(doc, args)
    q = doc.query()
    g1, g2 = q.poly("g1", I.gens), q.poly("g2", I.gens)
    u = q.poly("u", I.gens, default="1")
    rep.flag("equal", dcritical.section_equal(g1, g2, I, u))
    return rep


def cmd_section_space(doc, args) -> Report:
    rep = Report()
    I = _ideal_or_jac(doc, args)
    q = _query(doc)
    pt = _point(q, I.gens)
    sp = dcritical.section_space(I, [pt] if pt else None)
    rep.lines.append(f"dim_S = {sp.dim_S}, dim_S0 = {sp.dim_S0}")
    rep.data["dims"] = [sp.dim_S, sp.dim_S0]
    rep.add("components", str(sp.components), sp.components)
    return rep


def cmd_validate(doc, args) -> Report:
    rep = Report()
    chart = doc.chart()
    X = _ideal(doc, args)
    q = doc.query()
    s = q.poly("s", merge_gens(chart.vars, X.gens))
    rep.flag("valid", dcritical.validate_dcritical(chart, X, s))
    return rep


def cmd_local_const(doc, args) -> Report:
    rep = Report()
    n = _jet_order(args)
    ok = dcritical.local_constancy(doc.chart(), order=n)
    rep.flag("locally_constant", ok)
    rep.add("jet_order", str(n), n)
    return rep


def cmd_scale(doc, args) -> Report:
    rep = Report()
    name, chart = next(iter(doc.charts.items()))
    c = doc.query().poly("c", ()).constant_term()
    _chart_block(rep, dcritical.scale_section(c, chart), name)
    return rep


def cmd_product(doc, args) -> Report:
    rep = Report()
    if len(doc.charts) < 2:
        raise ParseError("product needs two [chart] sections")
    (n1, c1), (n2, c2) = list(doc.charts.items())[:2]
    _chart_block(rep, dcritical.product_chart(c1, c2), f"{n1}x{n2}")
    return rep


def cmd_pullback(doc, args) -> Report:
    rep = Report()
    if not doc.pullbacks:
        raise ParseError("no [pullback] section")
    target, variables, phi = doc.pullbacks[0]
    s = dcritical.pullback_section(phi, target, variables)
    rep.add("g", print_poly(s.g))
    basis = [print_poly(g) for g in s.ideal.basis()]
    rep.add("jac_basis", ", ".join(basis), basis)
    return rep


def cmd_embed_check(doc, args) -> Report:
    rep = Report()
    r = chartcmp.verify_embedding(doc.embedding())
    rep.add("potential", _b(r.potential), r.potential)
    rep.add("immersion", _b(r.immersion), r.immersion)
    rep.add("critical", _b(r.critical), r.critical)
    rep.flag("embedding", r.ok)
    return rep


def cmd_stabilize(doc, args) -> Report:
    rep = Report()
    if not doc.stabilizations:
        raise ParseError("no [stabilize] section")
    src, tgt, theta = doc.stabilizations[0]
    st = chartcmp.stabilize(src, tgt, theta)
    _chart_block(rep, st.chart, "W")
    for label, e in (("phi", st.phi), ("psi", st.psi)):
        m = {v: print_poly(e.phi[v]) for v in st.chart.vars}
        for v in st.chart.vars:
            rep.lines.append(f"{label}.{v} = {m[v]}")
        rep.data[label] = m
    ok = chartcmp.verify_embedding(st.phi).ok and chartcmp.verify_embedding(st.psi).ok
    rep.flag("verified", ok)
    return rep


def _jet_section(doc):
    secs = [s for s in doc.sections if s.kind == "jet"]
    if not secs:
        raise ParseError("no [jet] section")
    return secs[0]


def _split_lines(rep: Report, sp: jets.SplitResult) -> None:
    rep.add("rank", str(sp.rank), sp.rank)
    change = {}
    for v in sorted(sp.change):
        change[v] = print_poly(sp.change[v].poly)
        rep.lines.append(f"change.{v} = {change[v]}")
    rep.data["change"] = change
    units = {}
    for v, q in zip(sp.split_vars, sp.units):
        units[v] = print_poly(q.poly)
        rep.lines.append(f"unit.{v} = {units[v]}")
    rep.data["units"] = units
    rep.add("residual", print_poly(sp.residual.poly))


def cmd_split(doc, args) -> Report:
    rep = Report()
    sec = _jet_section(doc)
    variables, f, order = doc.jets[0]
    n = _jet_order(args, order)
    op = sec.text("op", "split")
    if op == "split":
        _split_lines(rep, jets.split_quadratic(jets.Jet(f, n), variables))
        rep.add("jet_order", str(n), n)
        return rep
    if op in ("add", "mul"):
        out = jets.jet_ops(f, sec.poly("g", variables), op, n)
    elif op in ("unit_sqrt", "unit_inverse"):
        out = jets.jet_ops(f, None, op, n)
    elif op == "substitute":
        subs = {k: textio.parse_poly(e.value, variables, line=e.line, column=e.column)
                for k, e in sec.prefixed("sub").items()}
        out = jets.jet_ops(f, subs, op, n)
    elif op == "invert_change":
        change = {k: jets.Jet(textio.parse_poly(e.value, variables, line=e.line, column=e.column), n)
                  for k, e in sec.prefixed("change").items()}
        inv = jets.jet_ops(change, None, op, n)
        for v in sorted(inv):
            rep.add(f"inverse.{v}", print_poly(inv[v].poly))
        return rep
    else:
        e = sec.get("op")
        raise ParseError(f"unknown jet operation {op!r}", e.line, e.column)
    rep.add("jet", print_poly(out.poly))
    return rep


def cmd_minimize(doc, args) -> Report:
    rep = Report()
    chart = doc.chart()
    pt = _point(_query(doc), chart.vars)
    r = chartcmp.minimize_chart(chart, pt, order=_jet_order(args))
    rep.add("route", r.route)
    rep.add("tangent_dim", str(r.tangent_dim), r.tangent_dim)
    if r.route == "exact":
        change = {v: print_poly(p) for v, p in sorted(r.change.items())}
        for v, p in change.items():
            rep.lines.append(f"change.{v} = {p}")
        rep.data["change"] = change
        _chart_block(rep, r.chart, "min")
    else:
        _split_lines(rep, r.split)
    rep.flag("verified", r.verified)
    return rep


def cmd_qform(doc, args) -> Report:
    rep = Report()
    q = chartcmp.qform(doc.embedding())
    rep.add("frame", ", ".join(map(str, q.frame)), [str(x) for x in q.frame])
    rows = [[print_poly(x) for x in row] for row in q.matrix]
    rep.add("q", "[" + ", ".join("[" + ", ".join(r) + "]" for r in rows) + "]", rows)
    rep.add("det", print_poly(q.det))
    return rep


def cmd_jphi(doc, args) -> Report:
    rep = Report()
    rep.add("jphi", print_poly(chartcmp.jphi(doc.embedding()).value))
    return rep


def cmd_jlaws(doc, args) -> Report:
    rep = Report()
    comps, indep = [], []
    for sec in doc.laws:
        for key, bucket in (("compose", comps), ("independent", indep)):
            if sec.has(key):
                names = sec.names(key)
                if len(names) != 2:
                    e = sec.get(key)
                    raise ParseError(f"{key} needs two embedding names", e.line, e.column)
                bucket.append(tuple(doc.embedding(n) for n in names))
    if not comps and not indep:
        raise ParseError("no law cases given")
    report = chartcmp.check_jphi_laws(comps, indep, raise_on_failure=False)
    checks = []
    for kind, ok, lhs, rhs in report.checks:
        text = _b(ok) if lhs is None else f"{_b(ok)} ({print_poly(lhs)} vs {print_poly(rhs)})"
        rep.lines.append(f"{kind} = {text}")
        checks.append({"kind": kind, "ok": ok})
    rep.data["checks"] = checks
    rep.flag("laws", report.ok)
    return rep


def _degree_line(rep: Report, c: bundles.Cocycle, key: str = "degree") -> None:
    if len(c.transitions) == 1:
        try:
            d = bundles.p1_degree(c)
        except PreconditionError:
            return
        rep.add(key, str(d), d)


def cmd_canonical(doc, args) -> Report:
    rep = Report()
    c = _cocycle(doc)
    _transition_lines(rep, c)
    rep.flag("cocycle", bundles.cocycle_check(c))
    _degree_line(rep, c)
    return rep


def cmd_p1_degree(doc, args) -> Report:
    rep = Report()
    d = bundles.p1_degree(_cocycle(doc))
    rep.add("degree", str(d), d)
    return rep


def cmd_orient(doc, args) -> Report:
    rep = Report()
    res = bundles.orientable(_cocycle(doc))
    rep.flag("orientable", res.orientable)
    if res.root is not None:
        _transition_lines(rep, res.root)
        _degree_line(rep, res.root, "root_degree")
    return rep


def cmd_equivariant(doc, args) -> Report:
    rep = Report()
    rep.flag("equivariant", dcritical.check_equivariant(doc.chart().f, doc.action()))
    return rep


def cmd_fixed(doc, args) -> Report:
    rep = Report()
    name = next(iter(doc.charts))
    fc = dcritical.fixed_chart(doc.chart(), doc.action())
    _chart_block(rep, fc.chart, f"{name}_fixed")
    rep.add("removed", ", ".join(fc.removed), list(fc.removed))
    rep.flag("verified", fc.verified)
    return rep


COMMANDS: dict[str, Callable] = {
    "gb": cmd_gb,
    "nf": cmd_nf,
    "member": cmd_member,
    "crit": cmd_crit,
    "section-eq": cmd_section_eq,
    "section-space": cmd_section_space,
    "validate": cmd_validate,
    "local-const": cmd_local_const,
    "scale": cmd_scale,
    "product": cmd_product,
    "pullback": cmd_pullback,
    "embed-check": cmd_embed_check,
    "stabilize": cmd_stabilize,
    "split": cmd_split,
    "minimize": cmd_minimize,
    "qform": cmd_qform,
    "jphi": cmd_jphi,
    "jlaws": cmd_jlaws,
    "canonical": cmd_canonical,
    "p1-degree": cmd_p1_degree,
    "orient": cmd_orient,
    "equivariant": cmd_equivariant,
    "fixed": cmd_fixed,
}

# The subcommand through which each library operation is exercised.
OPERATIONS: dict[str, str] = {
    "polycore.arith": "nf",
    "polycore.differentiate": "nf",
    "polycore.compose": "nf",
    "polycore.evaluate": "nf",
    "groebner.reduced_groebner": "gb",
    "groebner.normal_form": "nf",
    "groebner.contains": "member",
    "groebner.ideal_ops": "gb",
    "groebner.radical_membership": "member",
    "groebner.quotient_basis": "gb",
    "groebner.radical_zero_dim": "gb",
    "groebner.unit_in_quotient": "member",
    "jets.jet_ops": "split",
    "jets.split_quadratic": "split",
    "jets.jet_membership": "local-const",
    "dcritical.critical_chart": "crit",
    "dcritical.section_closed": "section-eq",
    "dcritical.section_equal": "section-eq",
    "dcritical.section_space": "section-space",
    "dcritical.validate_dcritical": "validate",
    "dcritical.local_constancy": "local-const",
    "dcritical.scale_section": "scale",
    "dcritical.product_chart": "product",
    "dcritical.pullback_section": "pullback",
    "dcritical.check_equivariant": "equivariant",
    "dcritical.fixed_chart": "fixed",
    "chartcmp.verify_embedding": "embed-check",
    "chartcmp.stabilize": "stabilize",
    "chartcmp.qform": "qform",
    "chartcmp.jphi": "jphi",
    "chartcmp.check_jphi_laws": "jlaws",
    "chartcmp.minimize_chart": "minimize",
    "bundles.cocycle_check": "canonical",
    "bundles.assemble_canonical": "canonical",
    "bundles.p1_degree": "p1-degree",
    "bundles.orientable": "orient",
    "textio.parse_poly": "nf",
    "textio.parse_chart_file": "crit",
    "textio.print_canonical": "crit",
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dcrit", description="Exact computations with d-critical charts.")
    p.add_argument("command", choices=list(COMMANDS))
    p.add_argument("inputs", nargs="+", metavar="FILE")
    p.add_argument("--order", choices=("lex", "grevlex"), help="monomial order for ideal commands")
    p.add_argument("--jet-order", type=int, metavar="N", help="jet truncation order (default 8)")
    p.add_argument("--json", action="store_true", help="emit one JSON document")
    p.add_argument("--vars", type=lambda s: tuple(v.strip() for v in s.split(",") if v.strip()),
                   help="comma-separated variable precedence")
    return p


def _load(paths) -> textio.Document:
    texts = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            texts.append(fh.read())
    return textio.parse_document("\n".join(t if t.endswith("\n") else t + "\n" for t in texts))


def _locate(paths, line: int | None) -> str:
    """File name and local line for a line of the concatenated input."""
    if line is None:
        return paths[0]
    offset = 0
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            n = fh.read().rstrip("\n").count("\n") + 1
        if line <= offset + n:
            return f"{path}:{line - offset}"
        offset += n
    return paths[-1]


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    if args.jet_order is not None and args.jet_order < 1:
        print("dcrit: error: --jet-order must be positive", file=err)
        return EXIT_PARSE
    try:
        doc = _load(args.inputs)
        rep = COMMANDS[args.command](doc, args)
    except OSError as e:
        print(f"dcrit: error: {e}", file=err)
        return EXIT_PARSE
    except ParseError as e:
        where = _locate(args.inputs, e.line)
        msg = str(e).split(": ", 1)[1] if e.line is not None else str(e)
        col = f":{e.column}" if e.column is not None and e.line is not None else ""
        print(f"{where}{col}: error: {msg}", file=err)
        return EXIT_PARSE
    except PreconditionError as e:
        print(f"dcrit: precondition failed: {e}", file=err)
        return EXIT_PRECONDITION
    except ViolationError as e:
        print(f"dcrit: violation: {e}", file=err)
        return EXIT_FALSE
    except (ValueError, ArithmeticError) as e:
        print(f"dcrit: precondition failed: {e}", file=err)
        return EXIT_PRECONDITION
    if args.json:
        out.write(dump_json(rep.data) + "\n")
    else:
        out.write("\n".join(rep.lines) + "\n")
    return rep.status


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
