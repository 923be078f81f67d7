"""Exact linear algebra over the rationals on sparse rows.

Rows are ``dict[column, Fraction]``; columns may be any hashable, orderable
key.  Everything here is plain Gaussian elimination with exact arithmetic.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Sequence

Row = dict


def _axpy(target: dict, factor: Fraction, src: dict) -> None:
    for k, v in src.items():
        s = target.get(k, 0) - factor * v
        if s:
            target[k] = s
        else:
            target.pop(k, None)


class Echelon:
    """Incrementally maintained reduced row echelon form.

    ``add(row)`` reduces a row against the current pivots and, if something
    nonzero remains, inserts it as a new pivot row.  The optional ``tag`` of a
    row (a dict) is carried along through the same row operations, which is
    how callers recover linear combinations.
    """

    def __init__(self, column_key=None):
        self.pivots: dict[Hashable, tuple[dict, dict | None]] = {}
        self.column_key = column_key

    def _pivot_of(self, row: dict):
        if self.column_key is None:
            return min(row)
        return min(row, key=self.column_key)

    def reduce(self, row: dict, tag: dict | None = None) -> tuple[dict, dict | None]:
        row = dict(row)
        tag = dict(tag) if tag is not None else None
        changed = True
        while changed:
            changed = False
            for col in list(row):
                entry = self.pivots.get(col)
                if entry is None or col not in row:
                    continue
                prow, ptag = entry
                factor = row[col]
                _axpy(row, factor, prow)
                if tag is not None and ptag is not None:
                    _axpy(tag, factor, ptag)
                changed = True
        return row, tag

    def add(self, row: dict, tag: dict | None = None) -> bool:
        row, tag = self.reduce(row, tag)
        if not row:
            return False
        col = self._pivot_of(row)
        inv = 1 / row[col]
        row = {k: v * inv for k, v in row.items()}
        if tag is not None:
            tag = {k: v * inv for k, v in tag.items()}
        # keep the form reduced: clear the new pivot column elsewhere
        for other, (prow, ptag) in list(self.pivots.items()):
            f = prow.get(col)
            if f:
                prow = dict(prow)
                _axpy(prow, f, row)
                if ptag is not None and tag is not None:
                    ptag = dict(ptag)
                    _axpy(ptag, f, tag)
                self.pivots[other] = (prow, ptag)
        self.pivots[col] = (row, tag)
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rank(rows: Iterable[dict]) -> int:
    ech = Echelon()
    for r in rows:
        ech.add(r)
    return ech.rank


def nullspace(rows: Sequence[dict], columns: Sequence[Hashable]) -> list[dict]:
    """Basis of ``{v : row . v = 0 for every row}`` over the listed columns."""
    order = {c: i for i, c in enumerate(columns)}
    ech = Echelon(column_key=order.__getitem__)
    for r in rows:
        ech.add({c: v for c, v in r.items() if v})
    free = [c for c in columns if c not in ech.pivots]
    basis = []
    for fc in free:
        vec = {fc: Fraction(1)}
        for pc, (prow, _) in ech.pivots.items():
            coef = prow.get(fc)
            if coef:
                vec[pc] = -coef
        basis.append(vec)
    return basis


def solve(rows: Sequence[dict], rhs: Sequence[Fraction], columns: Sequence[Hashable]) -> dict | None:
    """One solution of ``rows . v = rhs`` or ``None`` when inconsistent."""
    order = {c: i for i, c in enumerate(columns)}
    rhs_col = object()
    order[rhs_col] = len(columns)
    ech = Echelon(column_key=order.__getitem__)
    for r, b in zip(rows, rhs):
        row = {c: v for c, v in r.items() if v}
        if b:
            row[rhs_col] = Fraction(b)
        ech.add(row)
    if rhs_col in ech.pivots:
        return None
    return {pc: prow.get(rhs_col, Fraction(0)) for pc, (prow, _) in ech.pivots.items()}


def matrix_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    return rank({j: Fraction(v) for j, v in enumerate(row) if v} for row in matrix)


def symmetric_diagonalize(matrix: Sequence[Sequence[Fraction]]):
    """Congruence diagonalization of a rational symmetric matrix.

    Returns ``(P, d)`` with ``P^T A P = diag(d)``; ``P`` is invertible with
    rational entries, nonzero entries of ``d`` come first.  No square roots are
    taken.  When every remaining diagonal entry vanishes but some off-diagonal
    entry ``a_ij`` does not, the pair is rotated by ``x_i = u + v``,
    ``x_j = u - v`` first.
    """
    n = len(matrix)
    A = [[Fraction(v) for v in row] for row in matrix]
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def congruence(M):
        # A <- M^T A M, P <- P M
        nonlocal A, P
        AM = [[sum(A[i][k] * M[k][j] for k in range(n) if A[i][k] and M[k][j]) for j in range(n)] for i in range(n)]
        A = [[sum(M[k][i] * AM[k][j] for k in range(n) if M[k][i] and AM[k][j]) for j in range(n)] for i in range(n)]
        P = [[sum(P[i][k] * M[k][j] for k in range(n) if P[i][k] and M[k][j]) for j in range(n)] for i in range(n)]

    def swap(i, j):
        M = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
        M[i][i] = M[j][j] = Fraction(0)
        M[i][j] = M[j][i] = Fraction(1)
        congruence(M)

    k = 0
    while k < n:
        piv = next((i for i in range(k, n) if A[i][i]), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if A[i][j]), None)
            if pair is None:
                break
            i, j = pair
            M = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
            M[i][i], M[i][j] = Fraction(1), Fraction(1)
            M[j][i], M[j][j] = Fraction(1), Fraction(-1)
            congruence(M)
            piv = i
        if piv != k:
            swap(piv, k)
        M = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
        for j in range(k + 1, n):
            if A[k][j]:
                M[k][j] = -A[k][j] / A[k][k]
        congruence(M)
        k += 1
    return P, [A[i][i] for i in range(n)]
