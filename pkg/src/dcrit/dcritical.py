"""Critical charts, sections ``f + I^2`` and their finite-dimensional spaces.

A chart is a principal open ``D(u)`` of affine space with a potential ``f``;
it presents ``Crit(f)`` through the Jacobian ideal saturated by ``u``.
Sections are represented by polynomials modulo ``I^2``; closedness is the
condition that every partial derivative lies in ``I``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import NotClosed, NotEquivariant, OriginNotCritical, PreconditionError, ZeroScalar
from .groebner import Ideal, QuotientBasis, fresh_name
from .jets import DEFAULT_ORDER, jet_membership
from .linalg import nullspace
from .polycore import Monomial, Poly, Scalar, as_fraction, merge_gens


def jacobian_ideal(f: Poly, variables: Sequence[str], u=1) -> Ideal:
    """``<df/dx_a>`` saturated by ``u``, in the ring on ``variables``."""
    f = Poly.coerce(f)
    I = Ideal([f.diff(v) for v in variables], variables=variables)
    return I.saturate(u)


@dataclass(frozen=True, eq=False)
class CriticalChart:
    vars: tuple
    denom: Poly
    f: Poly
    jac: Ideal

    def __post_init__(self):
        extra = [v for v in self.f.variables() + self.denom.variables() if v not in self.vars]
        if extra:
            raise PreconditionError(f"chart data uses undeclared variables {extra}")

    @property
    def dim(self) -> int:
        return len(self.vars)

    def __repr__(self) -> str:
        return f"CriticalChart(vars={self.vars}, denom={self.denom}, f={self.f})"


def critical_chart(variables: Iterable[str], u, f) -> CriticalChart:
    variables = tuple(variables)
    u = Poly.coerce(u).with_gens(merge_gens(variables, Poly.coerce(u).gens))
    f = Poly.coerce(f)
    f = f.with_gens(merge_gens(variables, f.gens))
    return CriticalChart(variables, u, f, jacobian_ideal(f, variables, u))


@dataclass(frozen=True, eq=False)
class SectionRep:
    ideal: Ideal
    g: Poly
    closed: bool


def _ring_vars(g: Poly, I: Ideal) -> tuple:
    return merge_gens(I.gens, g.variables())


def section_closed(g, I: Ideal) -> bool:
    """Whether every partial derivative of ``g`` lies in ``I``."""
    g = Poly.coerce(g)
    return all(I.contains(g.diff(v)) for v in _ring_vars(g, I))


def section_rep(g, I: Ideal) -> SectionRep:
    g = Poly.coerce(g)
    return SectionRep(I, g, section_closed(g, I))


def section_equal(g1, g2, I: Ideal, u=1) -> bool:
    """Whether ``g1 - g2`` lies in ``I^2`` (localized at ``u``)."""
    g1, g2 = Poly.coerce(g1), Poly.coerce(g2)
    for g in (g1, g2):
        if not section_closed(g, I):
            raise NotClosed(f"representative {g} is not closed")
    sq = I ** 2
    if not Poly.coerce(u).is_constant():
        sq = sq.saturate(u)
    return sq.contains(g1 - g2)


@dataclass(frozen=True, eq=False)
class SectionSpace:
    quotient: QuotientBasis
    kernel: tuple
    dim_S: int
    dim_S0: int
    components: int

    @property
    def dims(self) -> tuple[int, int]:
        return self.dim_S, self.dim_S0


def _linear_map_rows(images: Sequence[Sequence[Poly]]) -> list[dict]:
    """Rows of a matrix whose column ``k`` lists the coefficients of ``images[k]``."""
    rows: dict = {}
    for k, parts in enumerate(images):
        for slot, p in enumerate(parts):
            for e, c in p.terms.items():
                rows.setdefault((slot, e), {})[k] = c
    return [rows[key] for key in sorted(rows)]


def section_space(I: Ideal, base_points: Sequence[Mapping[str, Scalar]] | None = None) -> SectionSpace:
    """Kernel of ``d`` on ``O/I^2`` and its subspace vanishing on the reduced locus.

    ``components`` is the number of geometric points of ``V(I)``, which equals
    ``dim S - dim S0``.  Supplied base points are checked to lie on ``V(I)``.
    """
    if base_points:
        for pt in base_points:
            for g in I.generators:
                if g.evaluate({v: pt.get(v, 0) for v in I.gens}):
                    raise PreconditionError(f"base point {dict(pt)} does not lie on V(I)")
    sq = I ** 2
    qb = sq.quotient_basis()
    gens = sq.gens
    monos = [Poly.monomial(m, 1, gens) for m in qb.monomials]
    diffs = [[I.reduce(m.diff(v)) for v in gens] for m in monos]
    cols = list(range(len(monos)))
    kernel_vecs = nullspace(_linear_map_rows(diffs), cols)
    kernel = []
    for vec in kernel_vecs:
        g = Poly.zero(gens)
        for k, c in vec.items():
            g = g + monos[k].scale(c)
        kernel.append(g)
    if I.is_unit():
        return SectionSpace(qb, (), 0, 0, 0)
    rad = I.radical()
    red = [[rad.reduce(g)] for g in kernel]
    k_cols = list(range(len(kernel)))
    dim_s0 = len(nullspace(_linear_map_rows(red), k_cols))
    comps = rad.quotient_basis().dimension
    return SectionSpace(qb, tuple(kernel), len(kernel), dim_s0, comps)


def validate_dcritical(chart: CriticalChart, X: Ideal, s) -> bool:
    """Whether ``chart`` is a critical chart for ``(X, s)``.

    ``X`` is compared with the chart's Jacobian ideal after saturating by the
    chart denominator; ``s`` (a :class:`SectionRep` or a polynomial) must agree
    with ``f`` modulo ``X^2``.
    """
    g = s.g if isinstance(s, SectionRep) else Poly.coerce(s)
    Xs = Ideal(X.generators, variables=merge_gens(chart.vars, X.gens))
    if not chart.denom.is_constant():
        Xs = Xs.saturate(chart.denom)
    if Xs != chart.jac:
        return False
    try:
        return section_equal(g, chart.f, Xs, chart.denom)
    except NotClosed:
        return False


def local_constancy(chart: CriticalChart, order: int = DEFAULT_ORDER) -> bool:
    """Jet-level test whether ``f`` is locally constant on ``Crit(f)`` at the origin.

    ``False`` is conclusive; ``True`` means "up to jet order ``order``".
    """
    origin = {v: 0 for v in chart.vars}
    if chart.denom.evaluate(origin) == 0:
        raise OriginNotCritical("origin lies outside the chart")
    partials = [chart.f.diff(v) for v in chart.vars]
    if any(p.evaluate(origin) for p in partials):
        raise OriginNotCritical("origin is not a critical point of f")
    return jet_membership(chart.f, partials, allow_constant=True, order=order)


def scale_section(c: Scalar, chart: CriticalChart) -> CriticalChart:
    c = as_fraction(c)
    if not c:
        raise ZeroScalar("scaling a section by zero")
    return CriticalChart(chart.vars, chart.denom, chart.f.scale(c), chart.jac)


def _rename(p: Poly, renaming: Mapping[str, str]) -> Poly:
    if not renaming:
        return p
    return p.compose({old: Poly.var(new) for old, new in renaming.items()})


def product_chart(c1: CriticalChart, c2: CriticalChart) -> CriticalChart:
    """The chart ``(U x V, f [+] g)``; clashing names of ``c2`` get fresh names."""
    taken = set(c1.vars) | set(c2.vars)
    renaming = {}
    for v in c2.vars:
        if v in c1.vars:
            new = fresh_name(taken, v)
            taken.add(new)
            renaming[v] = new
    vars2 = tuple(renaming.get(v, v) for v in c2.vars)
    variables = c1.vars + vars2
    f = c1.f + _rename(c2.f, renaming)
    u = c1.denom * _rename(c2.denom, renaming)
    return critical_chart(variables, u, f)


def pullback_section(phi: Mapping[str, Poly], target: CriticalChart,
                     source_vars: Sequence[str] | None = None) -> SectionRep:
    """Representative ``g o phi`` with the Jacobian ideal of ``g o phi`` on the source."""
    images = {v: Poly.coerce(phi.get(v, Poly.var(v))) for v in target.vars}
    rep = target.f.compose(images)
    if source_vars is None:
        source_vars = merge_gens(*(p.variables() for p in images.values()))
    source_vars = tuple(source_vars)
    rep = rep.with_gens(merge_gens(source_vars, rep.gens))
    I = jacobian_ideal(rep, source_vars)
    return SectionRep(I, rep, True)


@dataclass(frozen=True)
class TorusAction:
    weights: Mapping[str, int]
    chi: int = 0

    def weight(self, mono: Monomial) -> int:
        return sum(self.weights.get(v, 0) * k for v, k in mono.powers)


def check_equivariant(f, a: TorusAction) -> bool:
    """Whether every monomial of ``f`` has weight ``chi``."""
    f = Poly.coerce(f)
    return all(a.weight(m) == a.chi for m, _ in f)


@dataclass(frozen=True, eq=False)
class FixedChart:
    chart: CriticalChart
    removed: tuple
    verified: bool


def fixed_chart(chart: CriticalChart, a: TorusAction) -> FixedChart:
    """Chart on the fixed locus ``U^G``, with ``f^G = f`` restricted there.

    ``verified`` records whether ``Crit(f^G)`` equals ``Crit(f)`` intersected
    with ``U^G`` as ideals.
    """
    if not check_equivariant(chart.f, a):
        raise NotEquivariant("potential is not equivariant for the given weights")
    removed = tuple(v for v in chart.vars if a.weights.get(v, 0))
    kept = tuple(v for v in chart.vars if v not in removed)
    zero = {v: Poly.zero() for v in removed}
    fG = chart.f.compose(zero).with_gens(kept)
    uG = chart.denom.compose(zero)
    if uG.is_zero():
        raise PreconditionError("fixed locus misses the chart")
    uG = uG.with_gens(kept)
    new = critical_chart(kept, uG, fG)
    restricted = Ideal([g.compose(zero).with_gens(kept) for g in chart.jac.basis()], variables=kept)
    if not uG.is_constant():
        restricted = restricted.saturate(uG)
    return FixedChart(new, removed, restricted == new.jac)
