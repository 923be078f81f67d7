"""Truncated power series at the origin and the formal splitting lemma.

A :class:`Jet` is a polynomial with every term of total degree above ``order``
discarded; arithmetic re-truncates.  :func:`split_quadratic` brings a jet
with a critical point at the origin into the form

    f o change = q_1 z_1^2 + ... + q_r z_r^2 + residual(w)

with unit jets ``q_a`` and a residual in the remaining variables whose 2-jet
vanishes.  Keeping the unit factors avoids square roots, so everything stays
over the rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Mapping, Sequence

from .errors import NonUnit, NotASquare, OriginNotCritical
from .linalg import solve, symmetric_diagonalize
from .polycore import Poly, merge_gens

DEFAULT_ORDER = 8


class Jet:
    """Polynomial truncated at total degree ``order``."""

    __slots__ = ("poly", "order")

    def __init__(self, poly, order: int = DEFAULT_ORDER):
        if order < 0:
            raise ValueError("jet order must be non-negative")
        self.poly = Poly.coerce(poly).truncate(order)
        self.order = order

    @property
    def gens(self):
        return self.poly.gens

    def _other(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet(Poly.coerce(other), self.order)

    def __add__(self, other) -> "Jet":
        o = self._other(other)
        return Jet(self.poly + o.poly, min(self.order, o.order))

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        o = self._other(other)
        return Jet(self.poly - o.poly, min(self.order, o.order))

    def __rsub__(self, other) -> "Jet":
        return self._other(other) - self

    def __neg__(self) -> "Jet":
        return Jet(-self.poly, self.order)

    def __mul__(self, other) -> "Jet":
        o = self._other(other)
        n = min(self.order, o.order)
        return Jet(truncated_product(self.poly, o.poly, n), n)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Jet":
        result = Jet(Poly.const(1, self.gens), self.order)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Jet):
            other = self._other(other)
        n = min(self.order, other.order)
        return self.poly.truncate(n) == other.poly.truncate(n)

    __hash__ = None

    def constant(self) -> Fraction:
        return self.poly.constant_term()

    def substitute(self, mapping: Mapping[str, "Jet | Poly"]) -> "Jet":
        return substitute(self, mapping)

    def __repr__(self) -> str:
        return f"Jet({self.poly}, order={self.order})"


def truncated_product(a: Poly, b: Poly, n: int) -> Poly:
    a, b = a._unify(b)
    out: dict = {}
    bt = [(e, sum(e), c) for e, c in b.terms.items()]
    for e1, c1 in a.terms.items():
        d1 = sum(e1)
        if d1 > n:
            continue
        for e2, d2, c2 in bt:
            if d1 + d2 > n:
                continue
            e = tuple(x + y for x, y in zip(e1, e2))
            s = out.get(e, 0) + c1 * c2
            if s:
                out[e] = s
            else:
                del out[e]
    return Poly._raw(out, a.gens)


def _as_jet(x, order: int) -> Jet:
    if isinstance(x, Jet):
        return x
    return Jet(Poly.coerce(x), order)


def substitute(f: Jet, mapping: Mapping[str, "Jet | Poly"]) -> Jet:
    """Compose ``f`` with ``v -> mapping[v]``; images need zero constant term."""
    n = f.order
    images = {}
    for v in f.poly.variables():
        if v in mapping:
            img = _as_jet(mapping[v], n)
            if img.constant():
                raise ValueError(f"image of {v} has a nonzero constant term")
            images[v] = img.poly
        else:
            images[v] = Poly.var(v)
    gens = merge_gens(f.gens, *(p.gens for p in images.values()))
    imgs = {v: p.with_gens(gens) for v, p in images.items()}
    powers: dict[tuple[str, int], Poly] = {}

    def power(v: str, k: int) -> Poly:
        if k == 0:
            return Poly.const(1, gens)
        if k == 1:
            return imgs[v]
        key = (v, k)
        if key not in powers:
            powers[key] = truncated_product(power(v, k - 1), imgs[v], n)
        return powers[key]

    result = Poly.zero(gens)
    fg = f.poly.gens
    for e, c in f.poly.terms.items():
        term = Poly.const(c, gens)
        for v, k in zip(fg, e):
            if k:
                term = truncated_product(term, power(v, k), n)
        result = result + term
    return Jet(result, n)


def unit_inverse(u: Jet) -> Jet:
    """Multiplicative inverse of a jet with nonzero constant term."""
    c = u.constant()
    if not c:
        raise NonUnit("jet has zero constant term")
    h = Jet(u.poly - c, u.order) * Fraction(1, 1) * (1 / c)
    result = Jet(Poly.const(1, u.gens), u.order)
    term = Jet(Poly.const(1, u.gens), u.order)
    for _ in range(u.order):
        term = term * (-h)
        result = result + term
    return result * (1 / c)


def _rational_sqrt(c: Fraction) -> Fraction:
    if c <= 0:
        raise NotASquare(f"constant term {c} is not a positive rational square")
    p, q = c.numerator, c.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp != p or rq * rq != q:
        raise NotASquare(f"constant term {c} is not a rational square")
    return Fraction(rp, rq)


def unit_sqrt(u: Jet) -> Jet:
    """Square root of a unit jet whose constant term is a positive rational square."""
    c = u.constant()
    if not c:
        raise NonUnit("jet has zero constant term")
    r = _rational_sqrt(c)
    h = Jet(u.poly - c, u.order) * (1 / c)
    result = Jet(Poly.const(1, u.gens), u.order)
    term = Jet(Poly.const(1, u.gens), u.order)
    binom = Fraction(1)
    for k in range(1, u.order + 1):
        binom = binom * (Fraction(1, 2) - (k - 1)) / k
        term = term * h
        result = result + term * binom
    return result * r


def linear_part(change: Mapping[str, Jet], variables: Sequence[str]) -> list[list[Fraction]]:
    rows = []
    for v in variables:
        p = change[v].poly
        rows.append([p.diff(w).constant_term() if w in p.gens else Fraction(0) for w in variables])
    return rows


def _invert_matrix(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise NonUnit("coordinate change has a singular linear part")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def compose_changes(outer: Mapping[str, Jet], inner: Mapping[str, Jet]) -> dict[str, Jet]:
    """The change ``outer o inner``: substitute ``inner`` into each image of ``outer``."""
    return {v: substitute(img, inner) for v, img in outer.items()}


def invert_change(change: Mapping[str, Jet], order: int | None = None) -> dict[str, Jet]:
    """Formal inverse of a coordinate change with invertible linear part."""
    variables = tuple(change)
    if order is None:
        order = min(j.order for j in change.values())
    L = linear_part(change, variables)
    Linv = _invert_matrix(L)
    ctx = merge_gens(variables, *(j.gens for j in change.values()))
    y = {v: Poly.var(v, ctx) for v in variables}
    higher = {}
    for v in variables:
        lin = Poly.zero(ctx)
        for j, w in enumerate(variables):
            c = L[variables.index(v)][j]
            if c:
                lin = lin + y[w].scale(c)
        higher[v] = Jet(change[v].poly - lin, order)

    def apply_linv(vec: dict[str, Poly]) -> dict[str, Jet]:
        out = {}
        for i, v in enumerate(variables):
            acc = Poly.zero(ctx)
            for j, w in enumerate(variables):
                if Linv[i][j]:
                    acc = acc + vec[w].scale(Linv[i][j])
            out[v] = Jet(acc, order)
        return out

    psi = apply_linv(y)
    for _ in range(order):
        hs = {v: substitute(higher[v], psi).poly for v in variables}
        psi = apply_linv({v: y[v] - hs[v] for v in variables})
    return psi


def jet_ops(a, b=None, kind: str = "add", order: int = DEFAULT_ORDER):
    """Dispatch form of the jet operations."""
    if kind == "add":
        return _as_jet(a, order) + _as_jet(b, order)
    if kind == "mul":
        return _as_jet(a, order) * _as_jet(b, order)
    if kind == "substitute":
        return substitute(_as_jet(a, order), b)
    if kind == "invert_change":
        return invert_change(a, order)
    if kind == "unit_sqrt":
        return unit_sqrt(_as_jet(a, order))
    if kind == "unit_inverse":
        return unit_inverse(_as_jet(a, order))
    raise ValueError(f"unknown jet operation {kind!r}")


# ---------------------------------------------------------------------------


def half_hessian_at_origin(f: Poly, variables: Sequence[str]) -> list[list[Fraction]]:
    """The symmetric matrix of the quadratic part of ``f``."""
    q = f.homogeneous_part(2)
    n = len(variables)
    A = [[Fraction(0)] * n for _ in range(n)]
    for i, v in enumerate(variables):
        for j, w in enumerate(variables):
            if i == j:
                A[i][i] = q.diff(v).diff(v).constant_term() / 2 if v in q.gens else Fraction(0)
            elif v in q.gens and w in q.gens:
                A[i][j] = q.diff(v).diff(w).constant_term() / 2
    return A


@dataclass(frozen=True)
class SplitResult:
    change: dict          # original variable -> Jet in the new coordinates
    units: tuple          # Jet q_a attached to split_vars[a]
    residual: Jet         # in residual_vars only
    rank: int
    split_vars: tuple
    residual_vars: tuple
    order: int

    def split_form(self) -> Jet:
        total = self.residual
        for q, v in zip(self.units, self.split_vars):
            total = total + q * Jet(Poly.var(v) ** 2, self.order)
        return total


def _check_critical(f: Poly) -> None:
    if f.constant_term():
        raise OriginNotCritical("jet does not vanish at the origin")
    if f.homogeneous_part(1):
        raise OriginNotCritical("origin is not a critical point")


def split_quadratic(f: Jet, variables: Sequence[str] | None = None) -> SplitResult:
    """Formal splitting lemma with unit coefficients (no square roots)."""
    n_ord = f.order
    variables = tuple(variables) if variables is not None else f.poly.gens
    fp = f.poly.with_gens(merge_gens(variables, f.poly.gens))
    _check_critical(fp)
    A = half_hessian_at_origin(fp, variables)
    P, d = symmetric_diagonalize(A)
    r = sum(1 for x in d if x)
    ctx = fp.gens
    u = {v: Poly.var(v, ctx) for v in variables}
    change: dict[str, Jet] = {}
    for i, v in enumerate(variables):
        img = Poly.zero(ctx)
        for j, w in enumerate(variables):
            if P[i][j]:
                img = img + u[w].scale(P[i][j])
        change[v] = Jet(img, n_ord)
    F = substitute(Jet(fp, n_ord), change)
    units: list[Jet] = []
    split_vars = variables[:r]
    for a, s in enumerate(split_vars):
        da = d[a]
        G = Jet(F.poly.diff(s), n_ord)
        R = G - Jet(u[s].scale(2 * da), n_ord)
        phi = Jet(Poly.zero(ctx), n_ord)
        for _ in range(n_ord):
            phi = substitute(R, {s: phi}) * (-1 / (2 * da))
        shift = {s: Jet(u[s], n_ord) + phi}
        F = substitute(F, shift)
        change = {v: substitute(img, shift) for v, img in change.items()}
        units = [substitute(q, shift) for q in units]
        i = ctx.index(s)
        quad: dict = {}
        rest: dict = {}
        for e, c in F.poly.terms.items():
            if e[i] >= 2:
                quad[e[:i] + (e[i] - 2,) + e[i + 1:]] = c
            elif e[i] == 0:
                rest[e] = c
            # e[i] == 1 terms vanish up to the truncation order
        units.append(Jet(Poly._raw(quad, ctx), max(n_ord - 2, 0)))
        F = Jet(Poly._raw(rest, ctx), n_ord)
    return SplitResult(
        change=change,
        units=tuple(units),
        residual=F,
        rank=r,
        split_vars=tuple(split_vars),
        residual_vars=tuple(variables[r:]),
        order=n_ord,
    )


def jet_membership(f, gens: Sequence, allow_constant: bool = False, order: int = DEFAULT_ORDER) -> bool:
    """Solve ``f = A + sum h_i g_i`` modulo terms of degree above ``order``.

    ``A`` is a free constant when ``allow_constant``; the ``h_i`` are arbitrary
    polynomials.  Exact linear algebra over the rationals.
    """
    fj = f if isinstance(f, Jet) else Jet(f, order)
    n = min(order, fj.order)
    gens = [Poly.coerce(g.poly if isinstance(g, Jet) else g) for g in gens]
    ctx = merge_gens(fj.poly.gens, *(g.gens for g in gens))
    target = fj.poly.with_gens(ctx).truncate(n)
    if target.is_zero():
        return True
    gens = [g.with_gens(ctx).truncate(n) for g in gens]
    monos = list(_monomials_up_to(len(ctx), n))
    columns = []
    rows: dict[tuple, dict] = {m: {} for m in monos}
    for i, g in enumerate(gens):
        if g.is_zero():
            continue
        v = g.valuation()
        for m in monos:
            if sum(m) + v > n:
                continue
            col = (i, m)
            columns.append(col)
            for e, c in g.terms.items():
                k = tuple(a + b for a, b in zip(e, m))
                if sum(k) <= n:
                    rows[k][col] = rows[k].get(col, 0) + c
    if allow_constant:
        columns.append(("A",))
        rows[(0,) * len(ctx)][("A",)] = Fraction(1)
    rhs = [target.terms.get(m, Fraction(0)) for m in monos]
    return solve([rows[m] for m in monos], rhs, columns) is not None


def _monomials_up_to(nvars: int, n: int):
    def rec(k, left):
        if k == nvars:
            yield ()
            return
        for e in range(left + 1):
            for rest in rec(k + 1, left - e):
                yield (e,) + rest

    yield from sorted(rec(0, n), key=lambda e: (sum(e), tuple(-x for x in e)))
