"""Embeddings of critical charts and the data attached to them.

An embedding ``Phi : U -> V`` between charts ``(U, f)`` and ``(V, g)`` is a
polynomial map with ``f = g o Phi`` that identifies the critical loci.  Along
``Crit(f)`` the Hessian of ``g`` restricted to a complement of ``im dPhi`` is
a nondegenerate quadratic form ``q``; its determinant, corrected by the frame
change, is the transition scalar ``J_Phi``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .dcritical import CriticalChart, critical_chart, section_equal
from .errors import BadFrame, DegenerateForm, LawViolation, NotInSquare, PointNotCritical
from .groebner import Ideal, fresh_name, unit_in_quotient
from .jets import DEFAULT_ORDER, Jet, SplitResult, split_quadratic
from .linalg import symmetric_diagonalize
from .polycore import Poly, det, merge_gens


@dataclass(frozen=True, eq=False)
class ChartEmbedding:
    """``phi`` gives each target coordinate as a polynomial in source coordinates."""

    source: CriticalChart
    target: CriticalChart
    phi: Mapping[str, Poly]
    frame: tuple | None = None

    def __post_init__(self):
        missing = [v for v in self.target.vars if v not in self.phi]
        if missing:
            raise ValueError(f"phi has no component for {missing}")
        for v, p in self.phi.items():
            extra = [w for w in Poly.coerce(p).variables() if w not in self.source.vars]
            if extra:
                raise ValueError(f"phi.{v} uses non-source variables {extra}")

    def image(self, p: Poly) -> Poly:
        """Pull back a target function: ``p o Phi``."""
        return _pull(self, p)

    def jacobian(self) -> list[list[Poly]]:
        """``dPhi`` with rows indexed by target and columns by source coordinates."""
        return [[Poly.coerce(self.phi[t]).diff(s) for s in self.source.vars] for t in self.target.vars]


def _pull(e: ChartEmbedding, p: Poly) -> Poly:
    q = Poly.coerce(p).compose({v: Poly.coerce(e.phi[v]) for v in e.target.vars})
    return q.with_gens(merge_gens(e.source.vars, q.gens))


def identity_embedding(chart: CriticalChart) -> ChartEmbedding:
    return ChartEmbedding(chart, chart, {v: Poly.var(v, chart.vars) for v in chart.vars})


def compose_embeddings(first: ChartEmbedding, second: ChartEmbedding) -> ChartEmbedding:
    """``second o first``."""
    phi = {v: _pull(first, second.phi[v]) for v in second.target.vars}
    return ChartEmbedding(first.source, second.target, phi)


@dataclass(frozen=True)
class EmbeddingReport:
    potential: bool     # (a) f = g o Phi
    immersion: bool     # (b) maximal minors of dPhi generate the unit ideal
    critical: bool      # (c) preimage of jac_f equals jac_g

    @property
    def ok(self) -> bool:
        return self.potential and self.immersion and self.critical

    def __bool__(self) -> bool:
        return self.ok

    @property
    def failed(self) -> tuple:
        names = ("a", "b", "c")
        return tuple(n for n, good in zip(names, (self.potential, self.immersion, self.critical)) if not good)


def _minors(m: list[list[Poly]], k: int):
    rows = len(m)
    from itertools import combinations

    for idx in combinations(range(rows), k):
        yield det([m[i] for i in idx])


def image_ideal(e: ChartEmbedding) -> Ideal:
    """``(Phi^*)^{-1}(jac_f)`` by elimination from the graph, saturated by the target denominator."""
    src, tgt = e.source, e.target
    taken = set(tgt.vars) | set(src.vars)
    renaming = {}
    for v in src.vars:
        new = fresh_name(taken, v + "_s") if v in tgt.vars else v
        taken.add(new)
        renaming[v] = new
    ren = {v: Poly.var(w) for v, w in renaming.items()}
    t = fresh_name(taken, "t")
    T = Poly.var(t)
    gens = [Poly.var(b) - Poly.coerce(e.phi[b]).compose(ren) for b in tgt.vars]
    gens += [g.compose(ren) for g in src.jac.generators]
    if not src.denom.is_constant():
        gens.append(1 - T * src.denom.compose(ren))
    ring = tgt.vars + tuple(renaming[v] for v in src.vars) + (t,)
    big = Ideal(gens, variables=ring)
    out = big.eliminate([renaming[v] for v in src.vars] + [t])
    out = Ideal(out.generators, variables=tgt.vars)
    if not tgt.denom.is_constant():
        out = out.saturate(tgt.denom)
    return out


def verify_embedding(e: ChartEmbedding) -> EmbeddingReport:
    """Check (a) ``f = g o Phi``, (b) immersion on ``D(u)``, (c) critical loci match."""
    src, tgt = e.source, e.target
    a = _pull(e, tgt.f) == src.f
    n = len(src.vars)
    if n == 0:
        b = True
    elif n > len(tgt.vars):
        b = False
    else:
        minors = [m for m in _minors(e.jacobian(), n) if not m.is_zero()]
        ideal = Ideal(minors, variables=src.vars)
        b = ideal.saturate(src.denom).is_unit() if minors else False
    c = image_ideal(e) == tgt.jac
    return EmbeddingReport(a, b, c)


# ---------------------------------------------------------------------------
# stabilization


@dataclass(frozen=True, eq=False)
class Stabilization:
    chart: CriticalChart          # W with h = g + sum y_a z_a
    phi: ChartEmbedding           # U -> W
    psi: ChartEmbedding           # V -> W
    pairs: tuple                  # ((r_a, s_a), ...)
    new_vars: tuple


def _pair_names(n: int, taken: set) -> list[tuple[str, str]]:
    if n == 1 and "y" not in taken and "z" not in taken:
        return [("y", "z")]
    out = []
    for a in range(1, n + 1):
        y = fresh_name(taken, f"y{a}") if f"y{a}" in taken else f"y{a}"
        taken.add(y)
        z = fresh_name(taken, f"z{a}") if f"z{a}" in taken else f"z{a}"
        taken.add(z)
        out.append((y, z))
    return out


def stabilize(cU: CriticalChart, cV: CriticalChart, theta: Mapping[str, Poly]) -> Stabilization:
    """Common enlargement of two charts whose potentials differ by an element of ``I^2``.

    With ``e = f - g o Theta = sum r_a s_a`` (``r_a, s_a`` in the saturated
    Jacobian ideal of ``f``) the chart ``W = V x A^{2n}`` with
    ``h = g + sum y_a z_a`` receives ``Phi = (Theta, r, s)`` from ``U`` and
    ``Psi = (id, 0)`` from ``V``.
    """
    theta = {v: Poly.coerce(theta.get(v, Poly.var(v))) for v in cV.vars}
    pulled = cV.f.compose(theta).with_gens(merge_gens(cU.vars, cV.f.compose(theta).gens))
    e = cU.f - pulled
    I = cU.jac
    sq = I ** 2
    if not cU.denom.is_constant():
        sq_sat = sq.saturate(cU.denom)
    else:
        sq_sat = sq
    if not sq_sat.contains(e):
        raise NotInSquare("f - g o Theta is not in the square of the Jacobian ideal")
    pairs: list[tuple[Poly, Poly]] = []
    if not e.is_zero():
        G = I.basis()
        prods, index = [], []
        for i in range(len(G)):
            for j in range(i, len(G)):
                prods.append(G[i] * G[j])
                index.append((i, j))
        cof = Ideal(prods, variables=cU.vars).lift(e)
        if cof is None:
            raise NotInSquare("f - g o Theta lies in I^2 only after localization")
        for i, gi in enumerate(G):
            s = Poly.zero(cU.vars)
            for (a, b), c in zip(index, cof):
                if a == i and not c.is_zero():
                    s = s + c * G[b]
            if not s.is_zero():
                pairs.append((gi.with_gens(cU.vars), s.with_gens(cU.vars)))
    taken = set(cV.vars) | set(cU.vars)
    names = _pair_names(len(pairs), taken)
    new_vars = tuple(v for pair in names for v in pair)
    wvars = cV.vars + new_vars
    h = cV.f.with_gens(merge_gens(wvars, cV.f.gens))
    for y, z in names:
        h = h + Poly.var(y, wvars) * Poly.var(z, wvars)
    W = critical_chart(wvars, cV.denom, h)
    phi = dict(theta)
    psi = {v: Poly.var(v, cV.vars) for v in cV.vars}
    for (y, z), (r, s) in zip(names, pairs):
        phi[y], phi[z] = r, s
        psi[y] = psi[z] = Poly.zero(cV.vars)
    emb_u = ChartEmbedding(cU, W, phi)
    emb_v = ChartEmbedding(cV, W, psi)
    if _pull(emb_u, h) != cU.f or _pull(emb_v, h) != cV.f:
        raise ArithmeticError("stabilization does not reproduce the potentials")
    return Stabilization(W, emb_u, emb_v, tuple(pairs), new_vars)


# ---------------------------------------------------------------------------
# normal quadratic forms and transition scalars


@dataclass(frozen=True, eq=False)
class NormalQuadForm:
    frame: tuple
    matrix: tuple        # symmetric, entries reduced mod jac_f
    det: Poly
    frame_det: Poly      # det [dPhi | frame]


def _frame_vectors(e: ChartEmbedding, frame) -> tuple[tuple, list[dict]]:
    if frame is None:
        frame = e.frame
    if frame is None:
        frame = tuple(v for v in e.target.vars if v not in e.source.vars)
    vectors = []
    labels = []
    for item in frame:
        if isinstance(item, str):
            if item not in e.target.vars:
                raise BadFrame(f"{item!r} is not a target coordinate")
            vectors.append({item: Poly.const(1)})
            labels.append(item)
        else:
            vectors.append({k: Poly.coerce(v) for k, v in item.items()})
            labels.append(dict(item))
    if len(vectors) != len(e.target.vars) - len(e.source.vars):
        raise BadFrame("frame size must equal the codimension of the embedding")
    return tuple(labels), vectors


def _nf(I: Ideal, p: Poly) -> Poly:
    return I.reduce(p) if not I.is_zero() else p


def qform(e: ChartEmbedding, frame=None) -> NormalQuadForm:
    """``q_ij = 1/2 * v_i^T (Hess g o Phi) v_j`` on the frame, reduced mod ``jac_f``."""
    labels, vectors = _frame_vectors(e, frame)
    src, tgt = e.source, e.target
    I = src.jac
    ctx = src.vars
    M = e.jacobian()
    for k, t in enumerate(tgt.vars):
        M[k] = M[k] + [vec.get(t, Poly.zero()) for vec in vectors]
    M = [[Poly.coerce(x).with_gens(merge_gens(ctx, Poly.coerce(x).gens)) for x in row] for row in M]
    fdet = _nf(I, det(M)) if M else Poly.const(1, ctx)
    if not unit_in_quotient(fdet, I, src.denom):
        raise BadFrame("frame does not complement the image of dPhi along Crit(f)")
    hess = {}
    for a in tgt.vars:
        ga = tgt.f.diff(a)
        for b in tgt.vars:
            hess[a, b] = _pull(e, ga.diff(b))
    n = len(vectors)
    Q = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            acc = Poly.zero(ctx)
            for a, va in vectors[i].items():
                for b, vb in vectors[j].items():
                    h = hess[a, b]
                    if not h.is_zero():
                        acc = acc + va * vb * h
            Q[i][j] = Q[j][i] = _nf(I, acc.scale(Fraction(1, 2))).with_gens(merge_gens(ctx, acc.gens))
    d = _nf(I, det(Q)) if n else Poly.const(1, ctx)
    if not unit_in_quotient(d, I, src.denom):
        raise DegenerateForm("det q vanishes somewhere on Crit(f)")
    return NormalQuadForm(labels, tuple(tuple(r) for r in Q), d, fdet)


@dataclass(frozen=True, eq=False)
class TransitionScalar:
    value: Poly
    ideal: Ideal
    denom: Poly

    def equals(self, other, modulo_radical: bool = True) -> bool:
        o = other.value if isinstance(other, TransitionScalar) else Poly.coerce(other)
        diff = self.value - o
        if diff.is_zero():
            return True
        I = self.ideal.saturate(self.denom) if not self.denom.is_constant() else self.ideal
        if modulo_radical:
            return I.radical_contains(diff)
        return I.contains(diff)


def jphi(e: ChartEmbedding, frame=None) -> TransitionScalar:
    """``det(q) * det([dPhi | frame])^2`` reduced modulo ``jac_f``."""
    q = qform(e, frame)
    I = e.source.jac
    value = _nf(I, q.det * q.frame_det * q.frame_det)
    return TransitionScalar(value, I, e.source.denom)


@dataclass
class LawReport:
    checks: list = field(default_factory=list)   # (kind, ok, lhs, rhs)

    @property
    def ok(self) -> bool:
        return all(c[1] for c in self.checks)


def check_jphi_laws(compositions: Sequence[tuple] = (), independent: Sequence[tuple] = (),
                    raise_on_failure: bool = True) -> LawReport:
    """Composition law ``J_{Psi Phi} = (J_Psi o Phi) J_Phi`` and independence of ``Phi``.

    ``compositions`` holds pairs ``(Phi, Psi)``; ``independent`` holds pairs of
    embeddings with the same source and target.  Comparisons are modulo the
    radical of the source Jacobian ideal.  For coordinate-frame chains the
    composite normal form is also checked to be block diagonal.
    """
    report = LawReport()
    for phi, psi in compositions:
        comp = compose_embeddings(phi, psi)
        j1, j2, j12 = jphi(phi), jphi(psi), jphi(comp)
        rhs = _nf(phi.source.jac, _pull(phi, j2.value) * j1.value)
        ok = j12.equals(rhs)
        report.checks.append(("composition", ok, j12.value, rhs))
        if ok:
            block = _block_check(phi, psi, comp)
            if block is not None:
                report.checks.append(("block", block, None, None))
                ok = block
        if not ok and raise_on_failure:
            raise LawViolation("composition law fails", witness=(phi, psi))
    for a, b in independent:
        ja, jb = jphi(a), jphi(b)
        ok = ja.equals(jb)
        report.checks.append(("independence", ok, ja.value, jb.value))
        if not ok and raise_on_failure:
            raise LawViolation("J depends on the embedding", witness=(a, b))
    return report


def _block_check(phi: ChartEmbedding, psi: ChartEmbedding, comp: ChartEmbedding):
    """``q_UW = q_UV (+) (q_VW o Phi)`` when all frames are coordinate directions
    and ``Psi`` is the identity on the coordinates of ``V``."""
    f1, f2 = _frame_vectors(phi, None)[0], _frame_vectors(psi, None)[0]
    f12 = _frame_vectors(comp, None)[0]
    if not all(isinstance(x, str) for x in f1 + f2 + f12):
        return None
    if any(Poly.coerce(psi.phi.get(v, 0)) != Poly.var(v) for v in psi.source.vars if v in psi.target.vars):
        return None
    if set(f12) != set(f1) | set(f2):
        return None
    q1, q2 = qform(phi), qform(psi)
    q12 = qform(comp, tuple(f1) + tuple(f2))
    I = phi.source.jac
    n1 = len(f1)
    for i in range(len(q12.matrix)):
        for j in range(len(q12.matrix)):
            if i < n1 and j < n1:
                want = q1.matrix[i][j]
            elif i >= n1 and j >= n1:
                want = _pull(phi, q2.matrix[i - n1][j - n1])
            else:
                want = Poly.zero()
            if not _nf(I, q12.matrix[i][j] - want).is_zero():
                return False
    return True


# ---------------------------------------------------------------------------
# minimal charts


@dataclass(frozen=True, eq=False)
class MinimizeResult:
    route: str                    # "exact" or "jet"
    tangent_dim: int
    change: dict                  # original coordinate -> expression in new coordinates
    chart: CriticalChart | None   # reduced chart on V' (exact route)
    f_prime: Poly | None          # the modified potential on U (exact route)
    split: SplitResult | None     # jet route
    verified: bool


def _reorder_for_split(A, variables):
    """Variables whose Hessian row vanishes go last, so they keep their names."""
    idx = sorted(range(len(variables)), key=lambda i: (not any(A[i]), i))
    return [variables[i] for i in idx], [[A[i][j] for j in idx] for i in idx]


def minimize_chart(chart: CriticalChart, point: Mapping[str, Fraction] | None = None,
                   order: int = DEFAULT_ORDER) -> MinimizeResult:
    """Reduce a chart near a critical point to dimension ``dim T_x X``.

    After translating the point to the origin and diagonalizing the Hessian
    by a rational congruence, the nondegenerate coordinates ``z_j`` are
    tested for vanishing on ``Crit(f)`` near the point.  If they do, the
    modified potential ``f - sum f_j z_j + 1/2 sum (delta_jk + f_jk) z_j z_k``
    and its restriction to ``V' = {z = 0}`` are returned and verified;
    otherwise the jet splitting is returned instead.
    """
    from .jets import half_hessian_at_origin

    variables = tuple(chart.vars)
    point = {v: Fraction(point.get(v, 0)) if point else Fraction(0) for v in variables}
    if chart.denom.evaluate(point) == 0:
        raise PointNotCritical("point lies outside the chart")
    if any(chart.f.diff(v).evaluate(point) for v in variables):
        raise PointNotCritical("point is not a critical point of f")
    shift = {v: Poly.var(v, variables) + point[v] for v in variables}
    ft = chart.f.compose(shift).with_gens(variables)
    A = half_hessian_at_origin(ft, variables)
    names, A2 = _reorder_for_split(A, list(variables))
    P, d = symmetric_diagonalize(A2)
    r = sum(1 for x in d if x)
    m = len(variables) - r
    lin = {}
    for i, v in enumerate(names):
        img = Poly.zero(variables)
        for j, w in enumerate(names):
            if P[i][j]:
                img = img + Poly.var(w, variables).scale(P[i][j])
        lin[v] = img
    change = {v: lin[v] + point[v] for v in variables}
    f1 = chart.f.compose(change).with_gens(variables)
    u1 = chart.denom.compose(change).with_gens(variables)
    zs = names[:r]
    ws = tuple(v for v in variables if v not in zs)
    if r == 0:
        reduced = critical_chart(variables, u1, f1)
        return MinimizeResult("exact", m, change, reduced, f1, None, True)
    jac1 = critical_chart(variables, u1, f1).jac
    origin = {v: 0 for v in variables}
    witnesses = []
    for z in zs:
        colon = jac1.quotient(Poly.var(z, variables))
        good = next((g for g in colon.basis() if g.evaluate(origin) != 0), None)
        if good is None:
            break
        witnesses.append(good)
    if len(witnesses) < r:
        split = split_quadratic(Jet(f1 - f1.constant_term(), order))
        return MinimizeResult("jet", m, change, None, None, split, True)
    v_loc = Poly.const(1, variables)
    for g in witnesses:
        v_loc = v_loc * g
    D = u1 * v_loc
    fp = f1
    for j in zs:
        fp = fp - f1.diff(j) * Poly.var(j, variables)
    for j in zs:
        for k in zs:
            coeff = f1.diff(j).diff(k) + (1 if j == k else 0)
            fp = fp + (coeff * Poly.var(j, variables) * Poly.var(k, variables)).scale(Fraction(1, 2))
    kill = {z: Poly.zero() for z in zs}
    f_min = f1.compose(kill).with_gens(ws)
    D_min = D.compose(kill)
    if D_min.is_zero():
        raise PointNotCritical("localizing factor vanishes on the normal slice")
    D_min = D_min.with_gens(ws)
    reduced = critical_chart(ws, D_min, f_min)
    big = jac1.saturate(D)
    restricted = Ideal([g.compose(kill).with_gens(ws) for g in big.basis()], variables=ws)
    if not D_min.is_constant():
        restricted = restricted.saturate(D_min)
    ok = restricted == reduced.jac
    if ok:
        ok = section_equal(fp, f1, big, D)
    return MinimizeResult("exact", m, change, reduced, fp, None, ok)
