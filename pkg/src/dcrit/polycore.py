"""Exact multivariate polynomials over the rationals.

A :class:`Poly` is a sparse map from exponent tuples to nonzero
:class:`~fractions.Fraction` coefficients, together with an ordered tuple of
variable names (its context).  Contexts are merged by name whenever two
polynomials meet, so ``x + y`` just works.  Equality and hashing only look at
the named terms, never at the context.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Scalar = Union[int, Fraction]
Exps = tuple[int, ...]


def as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact scalar: {c!r}")


def merge_gens(*contexts: Iterable[str]) -> tuple[str, ...]:
    out: list[str] = []
    seen = set()
    for ctx in contexts:
        for v in ctx:
            if v not in seen:
                seen.add(v)
                out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class Monomial:
    """A power product, stored as sorted ``(variable, exponent)`` pairs."""

    powers: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, exps: Mapping[str, int] | None = None, **kw: int) -> "Monomial":
        d = dict(exps or {})
        d.update(kw)
        for v, e in d.items():
            if e < 0:
                raise ValueError(f"negative exponent for {v}")
        return cls(tuple(sorted((v, e) for v, e in d.items() if e)))

    @classmethod
    def from_exponents(cls, gens: tuple[str, ...], exps: Exps) -> "Monomial":
        return cls(tuple(sorted((v, e) for v, e in zip(gens, exps) if e)))

    def exponents(self, gens: tuple[str, ...]) -> Exps:
        d = dict(self.powers)
        return tuple(d.get(v, 0) for v in gens)

    def as_dict(self) -> dict[str, int]:
        return dict(self.powers)

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.powers)

    def __mul__(self, other: "Monomial") -> "Monomial":
        d = self.as_dict()
        for v, e in other.powers:
            d[v] = d.get(v, 0) + e
        return Monomial.of(d)

    def divides(self, other: "Monomial") -> bool:
        od = other.as_dict()
        return all(od.get(v, 0) >= e for v, e in self.powers)

    def __str__(self) -> str:
        if not self.powers:
            return "1"
        return "*".join(v if e == 1 else f"{v}^{e}" for v, e in self.powers)


def _grevlex_key(exps: Exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


def _inner_key(kind: str, exps: Exps):
    if kind == "lex":
        return exps
    if kind == "grevlex":
        return _grevlex_key(exps)
    raise ValueError(f"unknown monomial order {kind!r}")


@dataclass(frozen=True)
class MonomialOrder:
    """Monomial order on the variables ``variables`` (listed by precedence).

    ``kind`` is ``"lex"``, ``"grevlex"`` or ``"block"``.  A block order compares
    the ``elim`` variables first (with ``inner``), then the rest; it is an
    elimination order for ``elim``.
    """

    kind: str
    variables: tuple[str, ...]
    elim: tuple[str, ...] = ()
    inner: str = "grevlex"

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("repeated variable in order")
        if self.kind == "block":
            missing = [v for v in self.elim if v not in self.variables]
            if missing:
                raise ValueError(f"block variables not in order: {missing}")

    @classmethod
    def lex(cls, variables: Iterable[str]) -> "MonomialOrder":
        return cls("lex", tuple(variables))

    @classmethod
    def grevlex(cls, variables: Iterable[str]) -> "MonomialOrder":
        return cls("grevlex", tuple(variables))

    @classmethod
    def block(cls, elim: Iterable[str], rest: Iterable[str], inner: str = "grevlex") -> "MonomialOrder":
        elim = tuple(elim)
        return cls("block", elim + tuple(v for v in rest if v not in elim), elim, inner)

    @property
    def gens(self) -> tuple[str, ...]:
        """Internal exponent layout: eliminated block first for block orders."""
        return self.variables

    def with_variables(self, variables: Iterable[str]) -> "MonomialOrder":
        """The same kind of order, extended by new trailing variables."""
        return MonomialOrder(self.kind, merge_gens(self.variables, variables), self.elim, self.inner)

    def key(self, exps: Exps):
        if self.kind == "block":
            k = len(self.elim)
            return (_inner_key(self.inner, exps[:k]), _inner_key(self.inner, exps[k:]))
        return _inner_key(self.kind, exps)


class Poly:
    """Sparse polynomial with exact rational coefficients."""

    __slots__ = ("gens", "terms", "_hash")

    def __init__(self, terms: Mapping[Exps, Scalar] | None = None, gens: Iterable[str] = ()):
        gens = tuple(gens)
        clean: dict[Exps, Fraction] = {}
        n = len(gens)
        for e, c in (terms or {}).items():
            if len(e) != n:
                raise ValueError("exponent tuple does not match context")
            c = as_fraction(c)
            if c:
                clean[tuple(e)] = clean.get(tuple(e), Fraction(0)) + c
                if not clean[tuple(e)]:
                    del clean[tuple(e)]
        self.gens = gens
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Exps, Fraction], gens: tuple[str, ...]) -> "Poly":
        p = cls.__new__(cls)
        p.gens = gens
        p.terms = terms
        p._hash = None
        return p

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, gens: Iterable[str] = ()) -> "Poly":
        return cls._raw({}, tuple(gens))

    @classmethod
    def const(cls, c: Scalar, gens: Iterable[str] = ()) -> "Poly":
        gens = tuple(gens)
        c = as_fraction(c)
        return cls._raw({(0,) * len(gens): c} if c else {}, gens)

    @classmethod
    def var(cls, name: str, gens: Iterable[str] | None = None) -> "Poly":
        gens = merge_gens(gens or (), (name,))
        e = tuple(1 if v == name else 0 for v in gens)
        return cls._raw({e: Fraction(1)}, gens)

    @classmethod
    def monomial(cls, mono: Monomial, coeff: Scalar = 1, gens: Iterable[str] = ()) -> "Poly":
        gens = merge_gens(gens, (v for v, _ in mono.powers))
        return cls({mono.exponents(gens): coeff}, gens)

    @classmethod
    def coerce(cls, x, gens: Iterable[str] = ()) -> "Poly":
        if isinstance(x, Poly):
            return x
        return cls.const(as_fraction(x), gens)

    # context handling ---------------------------------------------------

    def variables(self) -> tuple[str, ...]:
        """Variables that actually occur, in context order."""
        used = [False] * len(self.gens)
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(v for v, u in zip(self.gens, used) if u)

    def with_gens(self, gens: Iterable[str]) -> "Poly":
        """Re-express in the context ``gens``, which must cover every used variable."""
        gens = tuple(gens)
        if gens == self.gens:
            return self
        pos = {v: i for i, v in enumerate(gens)}
        idx = []
        for i, v in enumerate(self.gens):
            idx.append(pos.get(v))
        n = len(gens)
        out: dict[Exps, Fraction] = {}
        for e, c in self.terms.items():
            new = [0] * n
            for i, k in enumerate(e):
                if k:
                    j = idx[i]
                    if j is None:
                        raise ValueError(f"variable {self.gens[i]!r} missing from context {gens}")
                    new[j] = k
            out[tuple(new)] = c
        return Poly._raw(out, gens)

    def _unify(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if self.gens == other.gens:
            return self, other
        g = merge_gens(self.gens, other.gens)
        return self.with_gens(g), other.with_gens(g)

    # inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.gens), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, v: str) -> int:
        if v not in self.gens:
            return 0 if self.terms else -1
        i = self.gens.index(v)
        return max((e[i] for e in self.terms), default=-1)

    def valuation(self) -> int:
        """Lowest total degree of a term (order of vanishing at the origin)."""
        return min((sum(e) for e in self.terms), default=-1)

    def named_terms(self) -> dict[Monomial, Fraction]:
        return {Monomial.from_exponents(self.gens, e): c for e, c in self.terms.items()}

    def coefficient(self, mono: Monomial) -> Fraction:
        try:
            e = mono.exponents(self.gens)
        except ValueError:
            return Fraction(0)
        if any(v not in self.gens for v, _ in mono.powers):
            return Fraction(0)
        return self.terms.get(e, Fraction(0))

    def sorted_terms(self, order: MonomialOrder | None = None) -> list[tuple[Exps, Fraction]]:
        """Terms in descending order (grevlex on the own context by default)."""
        if order is None:
            key = _grevlex_key
            return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)
        p = self.with_gens(merge_gens(order.variables, self.gens))
        if len(p.gens) != len(order.variables):
            order = order.with_variables(p.gens)
            p = p.with_gens(order.variables)
        return sorted(p.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading(self, order: MonomialOrder) -> tuple[Monomial, Fraction]:
        e, c = self.sorted_terms(order)[0]
        gens = merge_gens(order.variables, self.gens)
        return Monomial.from_exponents(gens, e), c

    # arithmetic ---------------------------------------------------------

    def __neg__(self) -> "Poly":
        return Poly._raw({e: -c for e, c in self.terms.items()}, self.gens)

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(as_fraction(other), self.gens)
        a, b = self._unify(other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(out, a.gens)

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(as_fraction(other), self.gens)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, c: Scalar) -> "Poly":
        c = as_fraction(c)
        if not c:
            return Poly.zero(self.gens)
        return Poly._raw({e: c * v for e, v in self.terms.items()}, self.gens)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(as_fraction(other))
        a, b = self._unify(other)
        out: dict[Exps, Fraction] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(out, a.gens)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Poly":
        c = as_fraction(c)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self.scale(1 / c)

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.const(1, self.gens)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_monomial(self, exps: Exps, c: Fraction = Fraction(1)) -> "Poly":
        return Poly._raw(
            {tuple(x + y for x, y in zip(e, exps)): c * v for e, v in self.terms.items()}, self.gens
        )

    # calculus -----------------------------------------------------------

    def diff(self, v: str) -> "Poly":
        """Formal partial derivative; zero when ``v`` is not in the context."""
        if v not in self.gens:
            return Poly.zero(self.gens)
        i = self.gens.index(v)
        out: dict[Exps, Fraction] = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly._raw(out, self.gens)

    def compose(self, mapping: Mapping[str, "Poly | Scalar"]) -> "Poly":
        """Substitute ``v -> mapping[v]``; unmapped variables stay put."""
        images: dict[str, Poly] = {}
        for v in self.gens:
            if v in mapping:
                images[v] = Poly.coerce(mapping[v])
            else:
                images[v] = Poly.var(v)
        gens = merge_gens(*(p.gens for p in images.values()))
        imgs = [images[v].with_gens(gens) for v in self.gens]
        result = Poly.zero(gens)
        cache: list[dict[int, Poly]] = [{0: Poly.const(1, gens), 1: img} for img in imgs]

        def power(i: int, k: int) -> Poly:
            got = cache[i].get(k)
            if got is None:
                got = power(i, k - 1) * imgs[i]
                cache[i][k] = got
            return got

        for e, c in self.sorted_terms():
            term = Poly.const(c, gens)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        """Exact value at ``point``; every used variable must be assigned."""
        missing = [v for v in self.variables() if v not in point]
        if missing:
            raise KeyError(f"no value assigned to {', '.join(missing)}")
        vals = [as_fraction(point[v]) if v in point else Fraction(0) for v in self.gens]
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(vals, e):
                if k:
                    t *= x ** k
            total += t
        return total

    def truncate(self, n: int) -> "Poly":
        """Drop every term of total degree above ``n``."""
        return Poly._raw({e: c for e, c in self.terms.items() if sum(e) <= n}, self.gens)

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly._raw({e: c for e, c in self.terms.items() if sum(e) == d}, self.gens)

    # equality -----------------------------------------------------------

    def _key(self) -> frozenset:
        return frozenset(self.named_terms().items())

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if self.gens == other.gens:
            return self.terms == other.terms
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        for e, c in self.sorted_terms():
            yield Monomial.from_exponents(self.gens, e), c

    def __repr__(self) -> str:
        from .textio import print_poly

        return f"Poly({print_poly(self)!r})"

    def __str__(self) -> str:
        from .textio import print_poly

        return print_poly(self)


def var(name: str) -> Poly:
    return Poly.var(name)


def variables(*names: str) -> tuple[Poly, ...]:
    gens = tuple(names)
    return tuple(Poly.var(n, gens) for n in names)


def arith(a: Poly, b: Poly | None, kind: str, k: int | None = None) -> Poly:
    """Dispatch form of the ring operations: ``add``, ``sub``, ``mul`` or ``pow``."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "pow":
        return a ** k
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def differentiate(p: Poly, v: str) -> Poly:
    return p.diff(v)


def compose(p: Poly, mapping: Mapping[str, Poly | Scalar]) -> Poly:
    return p.compose(mapping)


def evaluate(p: Poly, point: Mapping[str, Scalar]) -> Fraction:
    return p.evaluate(point)


def jacobian_matrix(polys: list[Poly], wrt: Iterable[str]) -> list[list[Poly]]:
    wrt = tuple(wrt)
    return [[p.diff(v) for v in wrt] for p in polys]


def hessian(p: Poly, wrt: Iterable[str]) -> list[list[Poly]]:
    wrt = tuple(wrt)
    first = [p.diff(v) for v in wrt]
    return [[first[i].diff(w) for w in wrt] for i in range(len(wrt))]


def det(matrix: list[list[Poly]]) -> Poly:
    """Determinant by fraction-free cofactor expansion (small matrices only)."""
    n = len(matrix)
    if n == 0:
        return Poly.const(1)
    if n == 1:
        return Poly.coerce(matrix[0][0])
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = Poly.zero()
    for j in range(n):
        entry = matrix[0][j]
        if isinstance(entry, Poly) and entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = Poly.coerce(entry) * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total
