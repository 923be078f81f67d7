"""Line-bundle gluing data on reduced loci.

A :class:`Cocycle` is a set of charts with transition functions ``t_ab``
living on overlap rings ``Q[vars]/I`` localized at a principal denominator.
Identities between transitions are tested modulo the radical, because the
bundles glued here (the canonical bundle of a d-critical locus) live on the
reduced locus.

Transitions relate squared coordinate frames: ``t_ab`` expresses the frame of
chart ``b`` in terms of the frame of chart ``a`` on their overlap, so the
smooth projective line with ``b = 1/a`` gives ``t = a^-4``, degree ``-4``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .chartcmp import ChartEmbedding, jphi
from .errors import CocycleViolation, MismatchedOverlap, NonMonomialTransition
from .groebner import Ideal
from .polycore import Poly, merge_gens


@dataclass(frozen=True, eq=False)
class RatFunc:
    num: Poly
    den: Poly

    def __post_init__(self):
        if Poly.coerce(self.den).is_zero():
            raise ZeroDivisionError("rational function with zero denominator")

    @classmethod
    def of(cls, p) -> "RatFunc":
        return cls(Poly.coerce(p), Poly.const(1))

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.num, self.den * other.den)

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return self + (-other)

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverting zero")
        return RatFunc(self.den, self.num)

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num ** k, self.den ** k)

    def diff(self, v: str) -> "RatFunc":
        return RatFunc(self.num.diff(v) * self.den - self.num * self.den.diff(v), self.den * self.den)

    def compose(self, mapping: Mapping[str, "RatFunc"]) -> "RatFunc":
        return compose_rational(self.num, mapping) * compose_rational(self.den, mapping).inverse()

    def __repr__(self) -> str:
        return f"RatFunc({self.num} / {self.den})"


def compose_rational(p: Poly, mapping: Mapping[str, RatFunc]) -> RatFunc:
    """``p`` with each mapped variable replaced by a rational function, over a common denominator."""
    p = Poly.coerce(p)
    used = [v for v in p.variables() if v in mapping]
    if not used:
        return RatFunc.of(p)
    degs = {v: p.degree_in(v) for v in used}
    den = Poly.const(1)
    for v in used:
        den = den * mapping[v].den ** degs[v]
    num = Poly.zero()
    for mono, c in p:
        term = Poly.const(c)
        rest = {}
        for v, k in mono.powers:
            if v in mapping:
                rest[v] = k
            else:
                term = term * Poly.var(v) ** k
        for v in used:
            k = rest.get(v, 0)
            term = term * mapping[v].num ** k * mapping[v].den ** (degs[v] - k)
        num = num + term
    return RatFunc(num, den)


def rational_det(m: Sequence[Sequence[RatFunc]]) -> RatFunc:
    n = len(m)
    if n == 0:
        return RatFunc.of(1)
    if n == 1:
        return m[0][0]
    total = RatFunc.of(0)
    for j in range(n):
        if m[0][j].num.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * rational_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


@dataclass(frozen=True, eq=False)
class OverlapRing:
    variables: tuple
    ideal: Ideal
    denom: Poly

    def saturated(self) -> Ideal:
        I = Ideal(self.ideal.generators, variables=self.variables)
        return I.saturate(self.denom) if not self.denom.is_constant() else I

    def equal(self, a: RatFunc, b: RatFunc) -> bool:
        """``a = b`` on the reduced overlap."""
        diff = a.num * b.den - b.num * a.den
        if diff.is_zero():
            return True
        I = Ideal(self.ideal.generators, variables=merge_gens(self.variables, diff.variables()))
        I = I.saturate(self.denom * a.den * b.den)
        return I.radical_contains(diff)


@dataclass(frozen=True, eq=False)
class Transition:
    """``t_ab`` in the coordinates ``vars`` of chart ``first``.

    ``ident`` gives the coordinates of chart ``second`` as rational functions
    of ``vars`` on the overlap.
    """

    first: str
    second: str
    vars: tuple
    num: Poly
    den: Poly
    ideal: Ideal
    denom: Poly
    ident: Mapping[str, RatFunc] = field(default_factory=dict)

    @property
    def value(self) -> RatFunc:
        return RatFunc(self.num, self.den)

    @property
    def ring(self) -> OverlapRing:
        return OverlapRing(tuple(self.vars), self.ideal, self.denom)

    def with_value(self, value: RatFunc) -> "Transition":
        return Transition(self.first, self.second, self.vars, value.num, value.den,
                          self.ideal, self.denom, self.ident)


@dataclass(frozen=True, eq=False)
class Cocycle:
    charts: tuple
    transitions: tuple = ()

    def get(self, a: str, b: str) -> Transition | None:
        for t in self.transitions:
            if (t.first, t.second) == (a, b):
                return t
        return None


@dataclass(frozen=True, eq=False)
class OverlapDatum:
    """A chart ``B'`` re-expressing chart ``second`` on the overlap, embedded into ``first``.

    ``embedding`` maps ``B'`` into ``first`` restricted to ``D(denom)``;
    ``psi`` writes the coordinates of ``B'`` in terms of those of ``first``;
    ``ident`` writes the coordinates of ``second`` in terms of those of ``B'``.

    With ``via`` set, both charts are compared inside a common chart ``W``:
    ``via`` embeds ``first`` (restricted to ``D(denom)``) into ``W`` and
    ``embedding`` then maps ``B'`` into ``W`` as well.
    """

    first: str
    second: str
    denom: Poly
    embedding: ChartEmbedding
    psi: Mapping[str, Poly]
    ident: Mapping[str, RatFunc]
    via: ChartEmbedding | None = None


def _reduce_mod(I: Ideal, value: RatFunc) -> RatFunc:
    if I.is_zero():
        return value
    return RatFunc(I.reduce(value.num), I.reduce(value.den))


def overlap_transition(charts: Mapping, ov: OverlapDatum) -> Transition:
    """``t = J_first * det(d ident)^2 / J_second`` in the coordinates of ``first``.

    For a direct embedding ``J_first = 1``.
    """
    if ov.first not in charts or ov.second not in charts:
        raise MismatchedOverlap(f"overlap refers to unknown charts {ov.first!r}, {ov.second!r}")
    A, B = charts[ov.first], charts[ov.second]
    e = ov.embedding
    home = e.target if ov.via is None else ov.via.source
    if ov.via is not None and tuple(ov.via.target.vars) != tuple(e.target.vars):
        raise MismatchedOverlap("the two embeddings have different targets")
    if tuple(home.vars) != tuple(A.vars):
        raise MismatchedOverlap("overlap chart does not use the coordinates of the first chart")
    if set(ov.ident) != set(B.vars):
        raise MismatchedOverlap("identification must give every coordinate of the second chart")
    src_vars = tuple(e.source.vars)
    if len(src_vars) != len(B.vars):
        raise MismatchedOverlap("re-expressed chart and second chart differ in dimension")
    J = jphi(e)
    jac = [[ov.ident[b].diff(s) for s in src_vars] for b in B.vars]
    frame = rational_det(jac)
    t_src = (frame * frame) * RatFunc.of(J.value).inverse()
    psi = {v: RatFunc.of(ov.psi[v]) for v in src_vars}
    t = t_src.compose(psi)
    if ov.via is not None:
        t = t * RatFunc.of(jphi(ov.via).value)
    ident = {b: r.compose(psi) for b, r in ov.ident.items()}
    ring = home.jac
    t = _reduce_mod(ring, t)
    vars_a = tuple(A.vars)
    t = RatFunc(t.num.with_gens(merge_gens(vars_a, t.num.gens)), t.den.with_gens(merge_gens(vars_a, t.den.gens)))
    return Transition(ov.first, ov.second, vars_a, t.num, t.den, ring, home.denom, ident)


def assemble_canonical(charts: Mapping, overlaps: Sequence[OverlapDatum]) -> Cocycle:
    """Cocycle of the canonical bundle from a chart atlas and overlap embeddings."""
    trans = tuple(overlap_transition(charts, ov) for ov in overlaps)
    c = Cocycle(tuple(charts), trans)
    cocycle_check(c, raise_on_failure=True)
    return c


def cocycle_check(c: Cocycle, raise_on_failure: bool = False) -> bool:
    """``t_aa = 1``, ``t_ab t_ba = 1`` and ``t_ab t_bc = t_ac`` on the reduced overlaps."""
    one = RatFunc.of(1)

    def fail(msg, triple):
        if raise_on_failure:
            raise CocycleViolation(msg, triple)
        return False

    for t in c.transitions:
        if t.first == t.second and not t.ring.equal(t.value, one):
            return fail(f"t_{t.first}{t.first} is not 1", (t.first, t.first, t.first))
        back = c.get(t.second, t.first)
        if back is not None and t.first != t.second:
            prod = t.value * back.value.compose(t.ident)
            if not t.ring.equal(prod, one):
                return fail(f"t_{t.first}{t.second} t_{t.second}{t.first} is not 1",
                            (t.first, t.second, t.first))
    for ab in c.transitions:
        for bc in c.transitions:
            if bc.first != ab.second or bc.second in (ab.first, ab.second):
                continue
            ac = c.get(ab.first, bc.second)
            if ac is None:
                continue
            lhs = ab.value * bc.value.compose(ab.ident)
            ring = OverlapRing(ab.vars, ab.ideal + ac.ideal, ab.denom * ac.denom)
            if not ring.equal(lhs, ac.value):
                return fail(f"cocycle condition fails on {ab.first}, {ab.second}, {bc.second}",
                            (ab.first, ab.second, bc.second))
    return True


def monomial_form(t: Transition) -> tuple[Fraction, dict]:
    """``(c, k)`` with ``t = c * x^k`` (a Laurent monomial) on the reduced overlap."""
    I = t.ring.saturated()
    num, den = t.num, t.den
    if not I.is_zero():
        num, den = I.reduce(num), I.reduce(den)
    if len(num.terms) != 1 or len(den.terms) != 1:
        raise NonMonomialTransition(f"transition {t.first}->{t.second} is not a monomial unit")
    (mn, cn), = num
    (md, cd), = den
    k = dict(mn.as_dict())
    for v, e in md.as_dict().items():
        k[v] = k.get(v, 0) - e
    k = {v: e for v, e in k.items() if e}
    for v in k:
        if not I.is_zero() and not _is_unit_var(I, v, t.denom):
            raise NonMonomialTransition(f"{v} is not a unit on the overlap")
    return cn / cd, k


def _is_unit_var(I: Ideal, v: str, denom: Poly) -> bool:
    from .groebner import unit_in_quotient

    return unit_in_quotient(Poly.var(v), I, denom)


def p1_degree(c: Cocycle) -> int:
    """Degree of a line bundle on a two-chart projective-line cover."""
    if not c.transitions:
        return 0
    t = c.transitions[0]
    _, k = monomial_form(t)
    if len(k) > 1:
        raise NonMonomialTransition("transition involves more than one coordinate")
    return next(iter(k.values()), 0)


def tensor(c1: Cocycle, c2: Cocycle) -> Cocycle:
    out = []
    for t in c1.transitions:
        s = c2.get(t.first, t.second)
        if s is None:
            raise MismatchedOverlap(f"second cocycle has no transition {t.first}->{t.second}")
        out.append(t.with_value(t.value * s.value))
    return Cocycle(c1.charts, tuple(out))


def p1_cocycle(k: int, c=1, coordinate: str = "a", other: str = "b") -> Cocycle:
    """Two-chart cover of the projective line with transition ``c * a^k``."""
    a = Poly.var(coordinate)
    num = Poly.const(c, (coordinate,)) * (a ** k if k >= 0 else Poly.const(1))
    den = a ** (-k) if k < 0 else Poly.const(1, (coordinate,))
    ident = {other: RatFunc(Poly.const(1, (coordinate,)), a)}
    t = Transition("0", "inf", (coordinate,), num, den, Ideal([], variables=(coordinate,)), a, ident)
    return Cocycle(("0", "inf"), (t,))


# ---------------------------------------------------------------------------
# orientations


def _squarefree_split(n: int) -> tuple[int, int]:
    """``n = s^2 * d`` with ``d`` squarefree (sign kept in ``d``)."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, d, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            d *= p
        p += 1
    return s, sign * d * n


@dataclass(frozen=True)
class Surd:
    """``r * sqrt(d)`` with ``d`` a squarefree integer (possibly negative)."""

    r: Fraction
    d: int = 1

    @classmethod
    def sqrt(cls, c: Fraction) -> "Surd":
        c = Fraction(c)
        # sqrt(p/q) = sqrt(p*q)/q
        s, d = _squarefree_split(c.numerator * c.denominator)
        return cls(Fraction(s, c.denominator), d)

    def __mul__(self, other: "Surd") -> "Surd":
        s, d = _squarefree_split(self.d * other.d)
        return Surd(self.r * other.r * s, d)

    def inverse(self) -> "Surd":
        # 1/(r sqrt d) = sqrt(d) / (r d)
        return Surd(1 / (self.r * self.d), self.d)


@dataclass(frozen=True, eq=False)
class OrientResult:
    orientable: bool
    root: Cocycle | None          # square-root cocycle when its constants are rational
    root_constants: dict          # (a, b) -> Surd

    def __bool__(self) -> bool:
        return self.orientable


def orientable(c: Cocycle) -> OrientResult:
    """Whether the bundle has a square root, and one such root when it does.

    Each transition must be a constant times a Laurent monomial.  Square roots
    exist chartwise iff every exponent is even; the signs of the chosen roots
    are then adjusted by a linear solve over GF(2) so that the root satisfies
    the cocycle condition on triple overlaps.
    """
    roots = {}
    for t in c.transitions:
        const, k = monomial_form(t)
        if any(e % 2 for e in k.values()):
            return OrientResult(False, None, {})
        roots[t.first, t.second] = (Surd.sqrt(const), {v: e // 2 for v, e in k.items()}, t)
    # sign obstruction on triples
    keys = list(roots)
    rows, rhs = [], []
    for (a, b) in keys:
        for (b2, cc) in keys:
            if b2 != b or cc in (a, b) or (a, cc) not in roots:
                continue
            eps = _triple_sign(roots, a, b, cc)
            if eps is None:
                return OrientResult(False, None, {})
            rows.append({(a, b): 1, (b, cc): 1, (a, cc): 1})
            rhs.append(eps)
    flips = _gf2_solve(rows, rhs, keys)
    if flips is None:
        return OrientResult(False, None, {})
    consts, trans = {}, []
    rational = True
    for key, (s, k, t) in roots.items():
        if flips.get(key):
            s = Surd(-s.r, s.d)
        consts[key] = s
        if s.d != 1:
            rational = False
            continue
        trans.append(t.with_value(_laurent(s.r, k, t.vars)))
    root = Cocycle(c.charts, tuple(trans)) if rational else None
    return OrientResult(True, root, consts)


def _laurent(c: Fraction, k: Mapping[str, int], variables) -> RatFunc:
    num = Poly.const(c, variables)
    den = Poly.const(1, variables)
    for v, e in k.items():
        if e > 0:
            num = num * Poly.var(v, variables) ** e
        elif e < 0:
            den = den * Poly.var(v, variables) ** (-e)
    return RatFunc(num, den)


def _triple_sign(roots, a, b, c) -> int | None:
    """0 when ``s_ab s_bc = s_ac``, 1 when they differ by a sign, ``None`` otherwise."""
    s_ab, k_ab, t_ab = roots[a, b]
    s_bc, k_bc, _ = roots[b, c]
    s_ac, k_ac, t_ac = roots[a, c]
    const = s_ab * s_bc * s_ac.inverse()
    if const.d != 1:
        return None
    lhs = _laurent(Fraction(1), k_ab, t_ab.vars) * _laurent(Fraction(1), k_bc, roots[b, c][2].vars).compose(t_ab.ident)
    lhs = lhs * _laurent(const.r, {}, t_ab.vars) * _laurent(Fraction(1), k_ac, t_ab.vars).inverse()
    ring = OverlapRing(t_ab.vars, t_ab.ideal + t_ac.ideal, t_ab.denom * t_ac.denom)
    if ring.equal(lhs, RatFunc.of(1)):
        return 0
    if ring.equal(lhs, RatFunc.of(-1)):
        return 1
    return None


def _gf2_solve(rows, rhs, keys) -> dict | None:
    """Solve a linear system over GF(2); rows are dicts key -> 1."""
    pivots: list[tuple[int, set, int]] = []
    for row, b in zip(rows, rhs):
        vec = {keys.index(k) for k, v in row.items() if v % 2}
        for col, pvec, pb in pivots:
            if col in vec:
                vec ^= pvec
                b ^= pb
        if not vec:
            if b:
                return None
            continue
        col = min(vec)
        pivots = [(c2, (p ^ vec) if col in p else p, (pb ^ b) if col in p else pb) for c2, p, pb in pivots]
        pivots.append((col, vec, b))
    sol = {}
    for col, vec, b in pivots:
        sol[keys[col]] = b
    return sol
