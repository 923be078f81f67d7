"""Text formats: polynomial expressions, section files, canonical printing.

Expressions use ``+ - * / ^`` and parentheses; multiplication is always
explicit and ``/`` may only divide by a constant, so ``1/2*z^2`` is the way
to write a rational coefficient.  Files are line oriented::

    # the fat point z^4 = 0
    [chart fat]
    vars = z
    f = z^5

Every parse error carries the line and column of the offending token.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DuplicateChart, ExprSyntaxError, MissingKey, ParseError, UnknownVariable
from .polycore import MonomialOrder, Poly, merge_gens

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class Token:
    kind: str       # "num", "name", "op" or "end"
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1, column: int = 1) -> list[Token]:
    tokens = []
    pos = 0
    ln, col0 = line, column
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        ws = len(text[pos:]) - len(text[pos:].lstrip())
        if "\n" in text[pos:pos + ws]:
            chunk = text[pos:pos + ws]
            ln += chunk.count("\n")
            line_start = pos + chunk.rfind("\n") + 1
            col0 = 1
        if m is None or m.end() == pos:
            start = pos + ws
            if start >= n:
                break
            col = col0 + start - line_start
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", ln, col)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), ln, col0 + start - line_start))
        pos = m.end()
    end_col = col0 + n - line_start
    tokens.append(Token("end", "", ln, end_col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], variables: Sequence[str] | None):
        self.toks = tokens
        self.i = 0
        self.declared = tuple(variables) if variables is not None else None
        self.ctx = self.declared or ()

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, tok: Token, message: str) -> ExprSyntaxError:
        return ExprSyntaxError(message, tok.line, tok.column)

    def parse(self) -> Poly:
        p = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            if tok.kind in ("name", "num") or tok.text == "(":
                raise self.error(tok, "implicit multiplication is not allowed; use '*'")
            raise self.error(tok, f"unexpected {tok.text!r}")
        return p

    def expr(self) -> Poly:
        sign = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.take()
            sign = -1 if tok.text == "-" else 1
        result = self.term()
        if sign < 0:
            result = -result
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.take()
                t = self.term()
                result = result + t if tok.text == "+" else result - t
            else:
                return result

    def term(self) -> Poly:
        result = self.factor()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.take()
                result = result * self.factor()
            elif tok.kind == "op" and tok.text == "/":
                self.take()
                at = self.peek()
                d = self.factor()
                if not d.is_constant():
                    raise self.error(at, "division is only allowed by a constant")
                c = d.constant_term()
                if not c:
                    raise self.error(at, "division by zero")
                result = result / c
            else:
                return result

    def factor(self) -> Poly:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.take()
            e = self.peek()
            if e.kind != "num":
                raise self.error(e, "exponent must be a non-negative integer")
            self.take()
            base = base ** int(e.text)
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "^":
                raise self.error(nxt, "chained exponents need parentheses")
        return base

    def atom(self) -> Poly:
        tok = self.take()
        if tok.kind == "num":
            return Poly.const(int(tok.text), self.ctx)
        if tok.kind == "name":
            if self.declared is not None and tok.text not in self.declared:
                raise UnknownVariable(f"unknown variable {tok.text!r}", tok.line, tok.column)
            return Poly.var(tok.text, self.ctx)
        if tok.kind == "op" and tok.text == "(":
            inner = self.expr()
            close = self.take()
            if close.text != ")":
                raise self.error(close, "expected ')'")
            return inner
        if tok.kind == "end":
            raise self.error(tok, "unexpected end of expression")
        raise self.error(tok, f"unexpected {tok.text!r}")


def parse_poly(text: str, variables: Sequence[str] | None = None, *, line: int = 1, column: int = 1) -> Poly:
    """Parse an expression into an exact polynomial.

    With ``variables`` given, other names raise :class:`UnknownVariable` and
    the result lives in that context; otherwise the context is the sorted set
    of names that occur.
    """
    p = _Parser(tokenize(text, line, column), variables).parse()
    if variables is not None:
        return p.with_gens(merge_gens(variables, p.gens))
    return p.with_gens(sorted(p.variables()))


# ---------------------------------------------------------------------------
# printing


def print_rational(c) -> str:
    c = Fraction(c)
    return str(c)


def print_poly(p: Poly) -> str:
    """Canonical text: terms in descending lex order of the context precedence."""
    if p.is_zero():
        return "0"
    gens = p.gens
    parts = []
    for e, c in sorted(p.terms.items(), key=lambda t: t[0], reverse=True):
        mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(gens, e) if k)
        if not mono:
            s = print_rational(c)
        elif c == 1:
            s = mono
        elif c == -1:
            s = "-" + mono
        else:
            s = f"{print_rational(c)}*{mono}"
        if not parts:
            parts.append(s)
        elif s.startswith("-"):
            parts.append("- " + s[1:])
        else:
            parts.append("+ " + s)
    return " ".join(parts)


def print_poly_list(polys: Iterable[Poly]) -> str:
    return ", ".join(print_poly(p) for p in polys)


def print_matrix(m: Sequence[Sequence[Poly]]) -> str:
    return "[" + ", ".join("[" + ", ".join(print_poly(Poly.coerce(x)) for x in row) + "]" for row in m) + "]"


def print_chart(chart, name: str = "chart") -> str:
    lines = [
        f"[chart {name}]",
        "vars = " + ", ".join(chart.vars),
    ]
    if not (chart.denom.is_constant() and chart.denom.constant_term() == 1):
        lines.append("denom = " + print_poly(chart.denom))
    lines.append("f = " + print_poly(chart.f))
    return "\n".join(lines) + "\n"


def print_canonical(value, name: str = "value") -> str:
    """Deterministic text for domain values."""
    from .dcritical import CriticalChart
    from .groebner import Ideal

    if isinstance(value, Poly):
        return print_poly(value)
    if isinstance(value, (int, Fraction)):
        return print_rational(value)
    if isinstance(value, Ideal):
        return "<" + print_poly_list(value.basis()) + ">"
    if isinstance(value, CriticalChart):
        return print_chart(value, name)
    if isinstance(value, Mapping):
        return "\n".join(f"{k} = {print_canonical(v)}" for k, v in sorted(value.items()))
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(print_canonical(v) for v in value) + "]"
    return str(value)


def chart_json(chart) -> dict:
    return {
        "vars": list(chart.vars),
        "denom": print_poly(chart.denom),
        "f": print_poly(chart.f),
        "jac_basis": [print_poly(g) for g in chart.jac.basis()],
    }


def dump_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# section files


@dataclass
class Entry:
    value: str
    line: int
    column: int


@dataclass
class Section:
    kind: str
    args: tuple
    line: int
    entries: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.args[0] if self.args else ""

    def has(self, key: str) -> bool:
        return key in self.entries

    def get(self, key: str) -> Entry:
        try:
            return self.entries[key]
        except KeyError:
            raise MissingKey(f"section [{self.kind}{' ' + ' '.join(self.args) if self.args else ''}] "
                             f"is missing key {key!r}", self.line, 1) from None

    def text(self, key: str, default: str | None = None) -> str:
        if default is not None and key not in self.entries:
            return default
        return self.get(key).value

    def poly(self, key: str, variables: Sequence[str] | None, default: str | None = None) -> Poly:
        if default is not None and key not in self.entries:
            return parse_poly(default, variables)
        e = self.get(key)
        return parse_poly(e.value, variables, line=e.line, column=e.column)

    def names(self, key: str, default: str | None = None) -> tuple:
        if default is not None and key not in self.entries:
            return parse_names(default)
        e = self.get(key)
        return parse_names(e.value, e.line, e.column)

    def prefixed(self, prefix: str) -> dict:
        p = prefix + "."
        return {k[len(p):]: e for k, e in self.entries.items() if k.startswith(p)}


KINDS = ("chart", "ideal", "embedding", "action", "query", "stabilize", "jet",
         "overlap", "transition", "pullback", "laws", "cocycle")


def parse_names(text: str, line: int = 1, column: int = 1) -> tuple:
    out = []
    if not text.strip():
        return ()
    offset = 0
    for part in text.split(","):
        name = part.strip()
        col = column + offset + (len(part) - len(part.lstrip()))
        if not NAME_RE.fullmatch(name):
            raise ExprSyntaxError(f"not a variable name: {name!r}", line, col)
        if name in out:
            raise ParseError(f"repeated name {name!r}", line, col)
        out.append(name)
        offset += len(part) + 1
    return tuple(out)


def parse_sections(text: str) -> list[Section]:
    sections: list[Section] = []
    current: Section | None = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ExprSyntaxError("section header must end with ']'", ln, indent + len(stripped))
            words = stripped[1:-1].split()
            if not words:
                raise ExprSyntaxError("empty section header", ln, indent + 1)
            if words[0] not in KINDS:
                raise ParseError(f"unknown section kind {words[0]!r}", ln, indent + 2)
            current = Section(words[0], tuple(words[1:]), ln)
            sections.append(current)
            continue
        if "=" not in stripped:
            raise ExprSyntaxError("expected 'key = value'", ln, indent + 1)
        if current is None:
            raise ParseError("key outside of any section", ln, indent + 1)
        key, _, value = line.partition("=")
        key = key.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*", key):
            raise ExprSyntaxError(f"bad key {key!r}", ln, indent + 1)
        if key in current.entries:
            raise ParseError(f"duplicate key {key!r}", ln, indent + 1)
        lead = len(value) - len(value.lstrip())
        current.entries[key] = Entry(value.strip(), ln, line.index("=") + 2 + lead)
    return sections


@dataclass
class Document:
    """Everything defined in one input file, keyed by section name."""

    sections: list
    charts: dict = field(default_factory=dict)
    ideals: dict = field(default_factory=dict)
    embeddings: dict = field(default_factory=dict)
    actions: dict = field(default_factory=dict)
    queries: dict = field(default_factory=dict)
    stabilizations: list = field(default_factory=list)
    jets: list = field(default_factory=list)
    overlaps: list = field(default_factory=list)
    transitions: list = field(default_factory=list)
    pullbacks: list = field(default_factory=list)
    laws: list = field(default_factory=list)
    cocycle: Section | None = None

    def chart(self, name: str | None = None):
        return _pick(self.charts, name, "chart")

    def ideal(self, name: str | None = None):
        return _pick(self.ideals, name, "ideal")

    def embedding(self, name: str | None = None):
        return _pick(self.embeddings, name, "embedding")

    def action(self, name: str | None = None):
        return _pick(self.actions, name, "action")

    def query(self, name: str | None = None) -> Section:
        return _pick(self.queries, name, "query")


def _pick(table: dict, name: str | None, kind: str):
    if name is not None:
        if name not in table:
            raise MissingKey(f"no [{kind} {name}] section")
        return table[name]
    if not table:
        raise MissingKey(f"no [{kind}] section")
    return next(iter(table.values()))


def _chart_ref(doc: Document, sec: Section, key: str):
    e = sec.get(key)
    if e.value not in doc.charts:
        raise MissingKey(f"unknown chart {e.value!r}", e.line, e.column)
    return doc.charts[e.value]


def _build_chart(sec: Section):
    from .dcritical import critical_chart

    variables = sec.names("vars")
    denom = sec.poly("denom", variables, default="1")
    f = sec.poly("f", variables)
    return critical_chart(variables, denom, f)


def _build_ideal(sec: Section):
    from .groebner import Ideal

    variables = sec.names("vars")
    order_kind = sec.text("order", "grevlex")
    if order_kind not in ("lex", "grevlex"):
        e = sec.get("order")
        raise ParseError(f"unknown order {order_kind!r}", e.line, e.column)
    gens = _poly_list(sec, "gens", variables) if sec.has("gens") else []
    return Ideal(gens, MonomialOrder(order_kind, variables))


def _poly_list(sec: Section, key: str, variables) -> list:
    e = sec.get(key)
    out = []
    offset = 0
    for part in e.value.split(","):
        if part.strip():
            out.append(parse_poly(part, variables, line=e.line, column=e.column + offset))
        offset += len(part) + 1
    return out


def _map_entries(sec: Section, prefix: str, targets: Sequence[str], sources: Sequence[str],
                 default_identity: bool = True) -> dict:
    got = sec.prefixed(prefix)
    for k, e in got.items():
        if k not in targets:
            raise UnknownVariable(f"{prefix}.{k}: {k!r} is not a target coordinate", e.line, 1)
    out = {}
    for v in targets:
        if v in got:
            e = got[v]
            out[v] = parse_poly(e.value, sources, line=e.line, column=e.column)
        elif default_identity and v in sources:
            out[v] = Poly.var(v, sources)
        else:
            raise MissingKey(f"missing key '{prefix}.{v}'", sec.line, 1)
    return out


def _build_embedding(doc: Document, sec: Section):
    from .chartcmp import ChartEmbedding

    source = _chart_ref(doc, sec, "source")
    target = _chart_ref(doc, sec, "target")
    phi = _map_entries(sec, "phi", target.vars, source.vars)
    frame = sec.names("frame") if sec.has("frame") else None
    if frame is not None:
        for v in frame:
            if v not in target.vars:
                e = sec.get("frame")
                raise UnknownVariable(f"frame direction {v!r} is not a target coordinate", e.line, e.column)
    return ChartEmbedding(source, target, phi, frame)


def parse_weights(e: Entry) -> dict:
    out = {}
    for part in e.value.split(","):
        if not part.strip():
            continue
        m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*:\s*([-+]?\d+)\s*", part)
        if not m:
            raise ExprSyntaxError(f"bad weight {part.strip()!r}; expected 'name:int'", e.line, e.column)
        out[m.group(1)] = int(m.group(2))
    return out


def _int(sec: Section, key: str, default: int) -> int:
    if not sec.has(key):
        return default
    e = sec.get(key)
    try:
        return int(e.value)
    except ValueError:
        raise ExprSyntaxError(f"{key} must be an integer", e.line, e.column) from None


def _build_action(sec: Section):
    from .dcritical import TorusAction

    return TorusAction(parse_weights(sec.get("weights")), _int(sec, "chi", 0))


def _ratfunc(sec: Section, prefix: str, variables) -> dict:
    from .bundles import RatFunc

    keys = sorted({k.rsplit(".", 1)[0] for k in sec.prefixed(prefix)})
    out = {}
    for k in keys:
        num = sec.poly(f"{prefix}.{k}.num", variables)
        den = sec.poly(f"{prefix}.{k}.den", variables, default="1")
        out[k] = RatFunc(num, den)
    return out


def _build_overlap(doc: Document, sec: Section):
    from .bundles import OverlapDatum
    from .chartcmp import ChartEmbedding
    from .dcritical import critical_chart

    if len(sec.args) != 2:
        raise ParseError("overlap header needs two chart names", sec.line, 1)
    for a in sec.args:
        if a not in doc.charts:
            raise MissingKey(f"unknown chart {a!r}", sec.line, 1)
    first, second = (doc.charts[a] for a in sec.args)
    denom = sec.poly("denom", first.vars, default="1")
    svars = sec.names("source_vars", ", ".join(second.vars))
    sf = sec.poly("source_f", svars, default=None) if sec.has("source_f") else None
    if sf is None:
        sf = second.f if set(second.vars) == set(svars) else Poly.zero(svars)
    sden = sec.poly("source_denom", svars, default="1")
    ident = _ratfunc(sec, "ident", svars)
    from .bundles import RatFunc

    for v in second.vars:
        if v not in ident:
            if v in svars:
                ident[v] = RatFunc(Poly.var(v, svars), Poly.const(1, svars))
            else:
                raise MissingKey(f"missing key 'ident.{v}.num'", sec.line, 1)
    full_denom = first.denom * denom
    target = critical_chart(first.vars, full_denom, first.f)
    source = critical_chart(svars, sden, sf)
    phi = _map_entries(sec, "phi", first.vars, svars)
    frame = sec.names("frame") if sec.has("frame") else None
    psi = _map_entries(sec, "psi", svars, first.vars)
    emb = ChartEmbedding(source, target, phi, frame)
    return OverlapDatum(sec.args[0], sec.args[1], denom, emb, psi, ident)


def _build_transition(sec: Section):
    from .bundles import Transition
    from .groebner import Ideal

    if len(sec.args) != 2:
        raise ParseError("transition header needs two chart names", sec.line, 1)
    variables = sec.names("vars")
    num = sec.poly("num", variables)
    den = sec.poly("den", variables, default="1")
    gens = _poly_list(sec, "ideal", variables) if sec.has("ideal") else []
    denom = sec.poly("denom", variables, default="1")
    ident = _ratfunc(sec, "ident", variables)
    return Transition(sec.args[0], sec.args[1], variables, num, den,
                      Ideal(gens, variables=variables), denom, ident)


def parse_document(text: str) -> Document:
    """Parse a section file into validated objects."""
    sections = parse_sections(text)
    doc = Document(sections)
    seen: set = set()
    for sec in sections:
        key = (sec.kind, sec.args)
        if key in seen and sec.kind not in ("overlap", "transition", "stabilize", "jet", "pullback", "laws"):
            if sec.kind == "chart":
                raise DuplicateChart(f"chart {sec.name!r} defined twice", sec.line, 1)
            raise ParseError(f"section [{sec.kind} {' '.join(sec.args)}] defined twice", sec.line, 1)
        seen.add(key)
        if sec.kind == "chart":
            if not sec.args:
                raise ParseError("chart section needs a name", sec.line, 1)
            doc.charts[sec.name] = _build_chart(sec)
        elif sec.kind == "ideal":
            doc.ideals[sec.name] = _build_ideal(sec)
        elif sec.kind == "action":
            doc.actions[sec.name] = _build_action(sec)
        elif sec.kind == "query":
            doc.queries[sec.name] = sec
        elif sec.kind == "cocycle":
            doc.cocycle = sec
    for sec in sections:
        if sec.kind == "embedding":
            doc.embeddings[sec.name] = _build_embedding(doc, sec)
        elif sec.kind == "stabilize":
            src = _chart_ref(doc, sec, "source")
            tgt = _chart_ref(doc, sec, "target")
            theta = _map_entries(sec, "theta", tgt.vars, src.vars)
            doc.stabilizations.append((src, tgt, theta))
        elif sec.kind == "jet":
            variables = sec.names("vars")
            doc.jets.append((variables, sec.poly("f", variables), _int(sec, "order", 0) or None))
        elif sec.kind == "pullback":
            tgt = _chart_ref(doc, sec, "target")
            variables = sec.names("vars")
            doc.pullbacks.append((tgt, variables, _map_entries(sec, "phi", tgt.vars, variables)))
        elif sec.kind == "overlap":
            doc.overlaps.append(_build_overlap(doc, sec))
        elif sec.kind == "transition":
            doc.transitions.append(_build_transition(sec))
        elif sec.kind == "laws":
            doc.laws.append(sec)
    return doc


def parse_chart_file(text: str) -> Document:
    """Alias of :func:`parse_document`; charts are in ``doc.charts``."""
    return parse_document(text)
