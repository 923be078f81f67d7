"""Independent reference computations used only by the tests."""
from fractions import Fraction
from itertools import product

import sympy

from dcrit.polycore import Poly


def to_sympy(p: Poly, gens):
    syms = sympy.symbols(gens)
    expr = sympy.Integer(0)
    for mono, c in p:
        term = sympy.Rational(c.numerator, c.denominator)
        for v, k in mono.powers:
            term *= syms[gens.index(v)] ** k
        expr += term
    return expr


def from_sympy(expr, gens) -> Poly:
    sp = sympy.Poly(expr, *sympy.symbols(gens))
    return Poly({m: Fraction(int(c.p), int(c.q)) for m, c in sp.terms()}, gens)


def sympy_reduced_basis(polys, gens, order):
    order = {"lex": "lex", "grevlex": "grevlex"}[order]
    G = sympy.groebner([to_sympy(p, gens) for p in polys], *sympy.symbols(gens), order=order)
    return [from_sympy(g, gens) for g in G.exprs]


def _monomials(nvars, degree):
    return [e for e in product(range(degree + 1), repeat=nvars) if sum(e) <= degree]


def _solvable(rows, rhs) -> bool:
    """Exact consistency of a sparse linear system ``rows . u = rhs`` (dict rows)."""
    pivots = {}   # column -> (row dict, rhs)
    for row, b in zip(rows, rhs):
        row = dict(row)
        while row:
            col = min(row)
            if col not in pivots:
                break
            prow, pb = pivots[col]
            f = row[col] / prow[col]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            b -= f * pb
        if row:
            pivots[min(row)] = (row, b)
        elif b:
            return False
    return True


def bounded_membership(f: Poly, gens_polys, variables, degree: int) -> bool:
    """Whether ``f = sum h_i g_i`` has a solution with ``deg h_i <= degree``."""
    n = len(variables)
    f = f.with_gens(variables)
    cofactor_monos = _monomials(n, degree)
    unknown = {}
    eqs: dict = {}
    for i, g in enumerate(gens_polys):
        g = g.with_gens(variables)
        for m in cofactor_monos:
            col = unknown.setdefault((i, m), len(unknown))
            for e, c in g.terms.items():
                key = tuple(a + b for a, b in zip(e, m))
                eqs.setdefault(key, {})[col] = c
    keys = sorted(set(eqs) | set(f.terms))
    rows = [eqs.get(k, {}) for k in keys]
    rhs = [f.terms.get(k, Fraction(0)) for k in keys]
    return _solvable(rows, rhs)
