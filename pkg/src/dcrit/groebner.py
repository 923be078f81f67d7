"""Ideals in polynomial rings over the rationals.

Buchberger's algorithm with the Gebauer-Moeller pair criteria (coprime
leading terms and the chain criterion) and sugar-degree pair selection.  On
top of reduced bases the :class:`Ideal` type offers normal forms, membership
with cofactor certificates, elimination, intersection, quotients,
saturation, radical membership (Rabinowitsch), zero-dimensional quotient
bases and radicals.

Geometric predicates here (units, radical membership) are statements over
the algebraic closure of the rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotZeroDimensional
from .linalg import Echelon
from .polycore import Exps, Monomial, MonomialOrder, Poly, merge_gens

Terms = dict  # Exps -> Fraction


def _divides(a: Exps, b: Exps) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exps, b: Exps) -> Exps:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Exps, b: Exps) -> Exps:
    return tuple(x - y for x, y in zip(a, b))


def _add(a: Exps, b: Exps) -> Exps:
    return tuple(x + y for x, y in zip(a, b))


def _coprime(a: Exps, b: Exps) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


def _sub_multiple(p: Terms, c: Fraction, shift: Exps, g: Terms) -> None:
    """p -= c * x^shift * g, in place."""
    for e, v in g.items():
        k = _add(e, shift)
        s = p.get(k, 0) - c * v
        if s:
            p[k] = s
        else:
            p.pop(k, None)


def _add_cof(cof: list[Terms], c: Fraction, shift: Exps, other: list[Terms]) -> None:
    for a, b in zip(cof, other):
        if b:
            _sub_multiple(a, -c, shift, b)


class _Reducer:
    """Multivariate division by a list of monic polynomials."""

    def __init__(self, key):
        self.key = key

    def lead(self, p: Terms) -> Exps:
        return max(p, key=self.key)

    def reduce(self, p: Terms, basis: Sequence[tuple[Exps, Terms]], *, full: bool = True,
               cof: list[Terms] | None = None, basis_cofs: Sequence[list[Terms]] | None = None,
               quotients: list[Terms] | None = None) -> Terms:
        p = dict(p)
        rem: Terms = {}
        key = self.key
        while p:
            lt = max(p, key=key)
            c = p[lt]
            for idx, (glt, g) in enumerate(basis):
                if _divides(glt, lt):
                    shift = _sub(lt, glt)
                    _sub_multiple(p, c, shift, g)
                    if cof is not None:
                        _add_cof(cof, -c, shift, basis_cofs[idx])
                    if quotients is not None:
                        q = quotients[idx]
                        q[shift] = q.get(shift, 0) + c
                        if not q[shift]:
                            del q[shift]
                    break
            else:
                if not full:
                    rem.update(p)
                    return rem
                rem[lt] = c
                del p[lt]
        return rem


def _monic(p: Terms, lead: Exps) -> tuple[Terms, Fraction]:
    c = p[lead]
    if c == 1:
        return p, c
    inv = 1 / c
    return {e: v * inv for e, v in p.items()}, c


def buchberger(polys: Sequence[Terms], order: MonomialOrder, track: bool = False):
    """Reduced Groebner basis of the ideal spanned by ``polys``.

    ``polys`` are term dicts laid out on ``order.variables``.  Returns a list of
    monic term dicts sorted by increasing leading monomial, and (when
    ``track``) for each basis element its cofactors with respect to the input.
    """
    key = order.key
    red = _Reducer(key)
    m = len(polys)
    store: list[Terms] = []
    lts: list[Exps] = []
    sugar: list[int] = []
    cofs: list[list[Terms]] = []
    G: list[int] = []
    B: list[tuple[int, int]] = []

    def active_basis():
        return [(lts[i], store[i]) for i in G]

    def active_cofs():
        return [cofs[i] for i in G]

    def update(h: int) -> None:
        nonlocal G, B
        lh = lts[h]
        C = [(h, g) for g in G]
        D = []
        while C:
            pair = C.pop(0)
            g1 = pair[1]
            l1 = _lcm(lh, lts[g1])
            if _coprime(lh, lts[g1]) or not any(
                _divides(_lcm(lh, lts[p[1]]), l1) for p in C + D
            ):
                D.append(pair)
        E = [p for p in D if not _coprime(lh, lts[p[1]])]
        newB = []
        for g1, g2 in B:
            l12 = _lcm(lts[g1], lts[g2])
            if not (
                _divides(lh, l12)
                and _lcm(lts[g1], lh) != l12
                and _lcm(lh, lts[g2]) != l12
            ):
                newB.append((g1, g2))
        B = newB + [(min(a, b), max(a, b)) for a, b in E]
        G = [g for g in G if not _divides(lh, lts[g])] + [h]

    def add(p: Terms, s: int, cof: list[Terms] | None) -> None:
        lt = red.lead(p)
        p, c = _monic(p, lt)
        if cof is not None and c != 1:
            inv = 1 / c
            cof = [{e: v * inv for e, v in q.items()} for q in cof]
        store.append(p)
        lts.append(lt)
        sugar.append(s)
        cofs.append(cof if cof is not None else [])
        update(len(store) - 1)

    zero = None
    for k, p in enumerate(polys):
        if not p:
            continue
        if zero is None:
            zero = (0,) * len(next(iter(p)))
        cof = [dict() for _ in range(m)] if track else None
        if track:
            cof[k] = {zero: Fraction(1)}
        r = red.reduce(p, active_basis(), cof=cof, basis_cofs=active_cofs() if track else None)
        if r:
            add(r, max(sum(e) for e in p), cof)

    while B:
        def pair_key(pq):
            i, j = pq
            l = _lcm(lts[i], lts[j])
            s = max(sugar[i] + sum(l) - sum(lts[i]), sugar[j] + sum(l) - sum(lts[j]))
            return (s, key(l), i, j)

        best = min(B, key=pair_key)
        B.remove(best)
        i, j = best
        l = _lcm(lts[i], lts[j])
        si, sj = _sub(l, lts[i]), _sub(l, lts[j])
        s = {}
        _sub_multiple(s, Fraction(-1), si, store[i])
        _sub_multiple(s, Fraction(1), sj, store[j])
        cof = None
        if track:
            cof = [dict() for _ in range(m)]
            _add_cof(cof, Fraction(1), si, cofs[i])
            _add_cof(cof, Fraction(-1), sj, cofs[j])
        if not s:
            continue
        r = red.reduce(s, active_basis(), cof=cof, basis_cofs=active_cofs() if track else None)
        if r:
            add(r, pair_key(best)[0], cof)

    # interreduce the minimal basis G
    final: list[tuple[Exps, Terms, list[Terms]]] = []
    members = sorted(G, key=lambda i: key(lts[i]))
    for i in members:
        others = [(lts[j], store[j]) for j in members if j != i]
        other_cofs = [cofs[j] for j in members if j != i]
        cof = [dict(q) for q in cofs[i]] if track else None
        r = red.reduce(store[i], others, cof=cof, basis_cofs=other_cofs if track else None)
        final.append((lts[i], r, cof))
    basis = [p for _, p, _ in final]
    if track:
        return basis, [c for _, _, c in final]
    return basis


# ---------------------------------------------------------------------------


def fresh_name(taken: Iterable[str], stem: str = "t") -> str:
    taken = set(taken)
    name = "_" + stem
    k = 0
    while name in taken:
        k += 1
        name = f"_{stem}{k}"
    return name


@dataclass(frozen=True)
class QuotientBasis:
    monomials: tuple[Monomial, ...]

    @property
    def dimension(self) -> int:
        return len(self.monomials)


class Ideal:
    """Finitely generated ideal together with a monomial order.

    The reduced Groebner basis is computed on first use and cached; the
    object is otherwise immutable.
    """

    def __init__(self, generators: Iterable = (), order: MonomialOrder | None = None,
                 variables: Iterable[str] = ()):
        gens = [Poly.coerce(g) for g in generators]
        ctx = merge_gens(order.variables if order else (), variables, *(g.variables() for g in gens))
        if order is None:
            order = MonomialOrder.grevlex(ctx)
        elif len(order.variables) < len(ctx):
            order = order.with_variables(ctx)
        self.order = order
        self.generators: tuple[Poly, ...] = tuple(g.with_gens(order.variables) for g in gens if g)
        self._basis: list[Terms] | None = None
        self._cofs = None

    # basics -------------------------------------------------------------

    @property
    def gens(self) -> tuple[str, ...]:
        return self.order.variables

    def _basis_terms(self) -> list[Terms]:
        if self._basis is None:
            self._basis = buchberger([g.terms for g in self.generators], self.order)
        return self._basis

    def basis(self) -> list[Poly]:
        """The reduced Groebner basis (monic, increasing leading monomials)."""
        return [Poly._raw(dict(p), self.gens) for p in self._basis_terms()]

    def leading_monomials(self) -> list[Exps]:
        key = self.order.key
        return [max(p, key=key) for p in self._basis_terms()]

    def _lift_poly(self, f) -> tuple[Poly, "Ideal"]:
        """Bring ``f`` into this ring, extending the ring by new variables if needed."""
        f = Poly.coerce(f)
        extra = [v for v in f.variables() if v not in self.gens]
        if not extra:
            return f.with_gens(self.gens), self
        ext = self.extended(extra)
        return f.with_gens(ext.gens), ext

    def extended(self, new_vars: Iterable[str]) -> "Ideal":
        """The extension of this ideal to a ring with more (trailing) variables."""
        order = self.order.with_variables(new_vars)
        I = Ideal(self.generators, order)
        if self._basis is not None:
            n = len(order.variables) - len(self.gens)
            I._basis = [{e + (0,) * n: c for e, c in p.items()} for p in self._basis]
        return I

    def reduce(self, f) -> Poly:
        """Normal form of ``f`` with respect to the reduced basis."""
        f, I = self._lift_poly(f)
        basis = I._basis_terms()
        key = I.order.key
        red = _Reducer(key)
        r = red.reduce(f.terms, [(max(g, key=key), g) for g in basis])
        return Poly._raw(r, I.gens)

    def contains(self, f) -> bool:
        return self.reduce(f).is_zero()

    def lift(self, f) -> list[Poly] | None:
        """Cofactors ``h`` with ``f = sum h_i * generators[i]``, or ``None``."""
        f, I = self._lift_poly(f)
        if self._cofs is None or I is not self:
            basis, cofs = buchberger([g.terms for g in I.generators], I.order, track=True)
            if I is self:
                self._basis = basis
                self._cofs = cofs
        else:
            basis, cofs = self._basis, self._cofs
        key = I.order.key
        m = len(I.generators)
        quotients = [dict() for _ in basis]
        red = _Reducer(key)
        r = red.reduce(f.terms, [(max(g, key=key), g) for g in basis], quotients=quotients)
        if r:
            return None
        total = [dict() for _ in range(m)]
        for q, cof in zip(quotients, cofs):
            for shift, c in q.items():
                _add_cof(total, c, shift, cof)
        return [Poly._raw(t, I.gens) for t in total]

    def is_unit(self) -> bool:
        basis = self._basis_terms()
        return len(basis) == 1 and all(not any(e) for e in basis[0])

    def is_zero(self) -> bool:
        return not self._basis_terms()

    def with_order(self, order: MonomialOrder) -> "Ideal":
        return Ideal(self.generators, order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        if self.order == other.order:
            return self._basis_terms() == other._basis_terms()
        ctx = merge_gens(self.gens, other.gens)
        a = Ideal(self.generators, MonomialOrder.grevlex(ctx))
        b = Ideal(other.generators, MonomialOrder.grevlex(ctx))
        return a._basis_terms() == b._basis_terms()

    __hash__ = None

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.generators)

    def __repr__(self) -> str:
        from .textio import print_poly

        return "Ideal<" + ", ".join(print_poly(g) for g in self.generators) + ">"

    # ideal arithmetic ---------------------------------------------------

    def _common(self, other: "Ideal") -> tuple["Ideal", "Ideal"]:
        if other.gens == self.gens:
            return self, other
        ctx = merge_gens(self.gens, other.gens)
        return self.extended(ctx), Ideal(other.generators, self.order.with_variables(ctx))

    def __add__(self, other) -> "Ideal":
        if not isinstance(other, Ideal):
            other = Ideal([p for p in other], self.order)
        a, b = self._common(other)
        return Ideal(a.generators + b.generators, a.order)

    def __mul__(self, other: "Ideal") -> "Ideal":
        a, b = self._common(other)
        return Ideal([g * h for g in a.generators for h in b.generators], a.order)

    def __pow__(self, k: int) -> "Ideal":
        if k < 0:
            raise ValueError("negative ideal power")
        result = Ideal([Poly.const(1, self.gens)], self.order)
        for _ in range(k):
            result = result * self
        return result

    def eliminate(self, variables: Iterable[str]) -> "Ideal":
        """``I`` intersected with the subring without ``variables``."""
        elim = tuple(v for v in variables if v in self.gens)
        rest = tuple(v for v in self.gens if v not in elim)
        if not elim:
            return self
        block = MonomialOrder.block(elim, rest)
        basis = Ideal(self.generators, block)._basis_terms()
        k = len(elim)
        kept = [Poly._raw({e[k:]: c for e, c in p.items()}, rest) for p in basis if all(not any(e[:k]) for e in p)]
        kind = self.order.kind if self.order.kind in ("lex", "grevlex") else self.order.inner
        return Ideal(kept, MonomialOrder(kind, rest))

    def intersect(self, other: "Ideal") -> "Ideal":
        a, b = self._common(other)
        t = fresh_name(a.gens)
        T = Poly.var(t)
        gens = [T * g for g in a.generators] + [(1 - T) * g for g in b.generators]
        big = Ideal(gens, a.order.with_variables((t,)))
        res = big.eliminate([t])
        return Ideal(res.generators, a.order)

    def quotient(self, other) -> "Ideal":
        """Ideal quotient ``I : J`` (``J`` an ideal or a single polynomial)."""
        if not isinstance(other, Ideal):
            g = Poly.coerce(other)
            if g.is_zero():
                return Ideal([Poly.const(1, self.gens)], self.order)
            a, gi = self._lift_poly(g)
            inter = gi.intersect(Ideal([a], gi.order))
            quots = [exact_divide(h, a) for h in inter.basis()]
            return Ideal(quots, gi.order)
        a, b = self._common(other)
        result = None
        for g in b.generators:
            q = a.quotient(g)
            result = q if result is None else result.intersect(q)
        if result is None:
            return Ideal([Poly.const(1, a.gens)], a.order)
        return result

    def saturate(self, u) -> "Ideal":
        """``I : u^infinity`` by iterated quotients until the ideal stabilizes."""
        if isinstance(u, Ideal):
            gens = u.generators
            result = self
            for g in gens:
                result = result.saturate(g)
            return result
        u = Poly.coerce(u)
        if u.is_constant() and not u.is_zero():
            return self
        current = self
        while True:
            nxt = current.quotient(u)
            if nxt == current:
                return Ideal(nxt.generators, nxt.order)
            current = nxt

    # zero-dimensional machinery -----------------------------------------

    def is_zero_dimensional(self) -> bool:
        if self.is_unit():
            return True
        lms = self.leading_monomials()
        n = len(self.gens)
        for i in range(n):
            if not any(e[i] and all(not e[j] for j in range(n) if j != i) for e in lms):
                return False
        return True

    def standard_exponents(self) -> list[Exps]:
        if not self.is_zero_dimensional():
            raise NotZeroDimensional("ideal has infinitely many standard monomials")
        if self.is_unit():
            return []
        lms = self.leading_monomials()
        n = len(self.gens)
        bounds = []
        for i in range(n):
            bounds.append(min(e[i] for e in lms if e[i] and all(not e[j] for j in range(n) if j != i)))
        out = []
        stack = [(0,) * n]
        seen = set(stack)
        while stack:
            e = stack.pop()
            if any(_divides(lm, e) for lm in lms):
                continue
            out.append(e)
            for i in range(n):
                if e[i] + 1 < bounds[i]:
                    ne = e[:i] + (e[i] + 1,) + e[i + 1:]
                    if ne not in seen:
                        seen.add(ne)
                        stack.append(ne)
        out.sort(key=self.order.key)
        return out

    def quotient_basis(self) -> QuotientBasis:
        return QuotientBasis(tuple(Monomial.from_exponents(self.gens, e) for e in self.standard_exponents()))

    def minimal_polynomial(self, v: str) -> list[Fraction]:
        """Minimal polynomial of ``v`` in the quotient ring, coefficients low to high."""
        if not self.is_zero_dimensional():
            raise NotZeroDimensional("minimal polynomials need a zero-dimensional ideal")
        x = Poly.var(v, self.gens)
        ech = Echelon()
        power = Poly.const(1, self.gens)
        k = 0
        while True:
            nf = self.reduce(power)
            tag = {k: Fraction(1)}
            row, tag = ech.reduce(nf.terms, tag)
            if not row:
                coeffs = [Fraction(0)] * (k + 1)
                for i, c in tag.items():
                    coeffs[i] = c
                lead = coeffs[-1]
                return [c / lead for c in coeffs]
            ech.add(nf.terms, {k: Fraction(1)})
            power = power * x
            k += 1

    def radical(self) -> "Ideal":
        """Radical of a zero-dimensional ideal (squarefree parts of minimal polynomials)."""
        if self.is_unit():
            return self
        extra = []
        for v in self.gens:
            mp = self.minimal_polynomial(v)
            sq = upoly_squarefree(mp)
            if len(sq) < len(mp):
                extra.append(upoly_to_poly(sq, v, self.gens))
        if not extra:
            return self
        return Ideal(self.generators + tuple(extra), self.order)

    def radical_contains(self, f) -> bool:
        """Whether ``f`` lies in the radical (Rabinowitsch trick)."""
        f, I = self._lift_poly(f)
        if f.is_zero():
            return True
        t = fresh_name(I.gens)
        big = Ideal(I.generators + (1 - Poly.var(t) * f,), I.order.with_variables((t,)))
        return big.is_unit()


def exact_divide(p: Poly, d: Poly) -> Poly:
    """``p / d`` for polynomials known to divide exactly."""
    ctx = merge_gens(p.gens, d.gens)
    p, d = p.with_gens(ctx), d.with_gens(ctx)
    order = MonomialOrder.grevlex(ctx)
    key = order.key
    lt = max(d.terms, key=key)
    lc = d.terms[lt]
    monic = {e: c / lc for e, c in d.terms.items()}
    q = {}
    red = _Reducer(key)
    r = red.reduce(p.terms, [(lt, monic)], quotients=[q])
    if r:
        raise ArithmeticError("polynomial division is not exact")
    return Poly._raw({e: c / lc for e, c in q.items()}, ctx)


# univariate helpers (coefficient lists, low degree first) -----------------

def _trim(a: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def upoly_divmod(a, b):
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    while len(r) >= len(b) and r:
        c = r[-1] / b[-1]
        s = len(r) - len(b)
        q[s] = c
        for i, bc in enumerate(b):
            r[s + i] -= c * bc
        r = _trim(r)
    return _trim(q), r


def upoly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = upoly_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    return [c / a[-1] for c in a]


def upoly_squarefree(a):
    a = _trim(a)
    da = [i * c for i, c in enumerate(a)][1:]
    g = upoly_gcd(a, da)
    q, _ = upoly_divmod(a, g)
    return [c / q[-1] for c in q]


def upoly_to_poly(coeffs, v: str, gens) -> Poly:
    x = Poly.var(v, gens)
    out = Poly.zero(gens)
    for i, c in enumerate(coeffs):
        if c:
            out = out + (x ** i).scale(c)
    return out


# functional forms ---------------------------------------------------------

def reduced_groebner(I: Ideal) -> list[Poly]:
    return I.basis()


def normal_form(f, I: Ideal) -> Poly:
    return I.reduce(f)


def contains(f, I: Ideal) -> bool:
    return I.contains(f)


def ideal_ops(I: Ideal, J=None, kind: str = "sum", k: int | None = None, variables: Iterable[str] = ()) -> Ideal:
    if kind == "sum":
        return I + J
    if kind == "product":
        return I * J
    if kind == "power":
        return I ** k
    if kind == "intersect":
        return I.intersect(J)
    if kind == "quotient":
        return I.quotient(J)
    if kind == "saturate":
        return I.saturate(J)
    if kind == "eliminate":
        return I.eliminate(variables)
    raise ValueError(f"unknown ideal operation {kind!r}")


def radical_membership(f, I: Ideal) -> bool:
    return I.radical_contains(f)


def quotient_basis(I: Ideal) -> QuotientBasis:
    return I.quotient_basis()


def radical_zero_dim(I: Ideal) -> Ideal:
    return I.radical()


def unit_in_quotient(f, I: Ideal, u=1) -> bool:
    """Whether ``f`` vanishes nowhere on ``V(I)`` inside ``D(u)`` (over the closure)."""
    f, J = I._lift_poly(f)
    S = J.saturate(u)
    return (S + Ideal([f], S.order)).saturate(u).is_unit()
