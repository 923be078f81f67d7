from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcrit.chartcmp import (ChartEmbedding, check_jphi_laws, compose_embeddings, identity_embedding,
                            image_ideal, jphi, minimize_chart, qform, stabilize, verify_embedding)
from dcrit.dcritical import critical_chart, section_equal, validate_dcritical
from dcrit.errors import BadFrame, DegenerateForm, LawViolation, NotInSquare, PointNotCritical
from dcrit.groebner import Ideal, radical_membership, unit_in_quotient
from dcrit.polycore import Poly, variables
from strategies import nonzero_fractions

x, y, z, w = variables("x", "y", "z", "w")
ZERO = Poly.zero()
CUSP = critical_chart(["x"], 1, x**3)


def split_target(*coeffs, base=x**3):
    names = ["z", "w", "v"][: len(coeffs)]
    g = base + sum((Poly.var(n) ** 2 * c for n, c in zip(names, coeffs)), Poly.zero())
    return critical_chart(["x", *names], 1, g)


def inclusion(source, target):
    return ChartEmbedding(source, target, {v: (Poly.var(v) if v in source.vars else ZERO) for v in target.vars})


class TestEmbeddings:
    def test_split_embedding(self):
        e = inclusion(CUSP, critical_chart(["x", "z"], 1, x**3 + z**2))
        r = verify_embedding(e)
        assert r.potential and r.immersion and r.critical and r.ok

    def test_identity(self):
        c = critical_chart(["x", "y"], 1, x**5 + x**2 * y**2 + y**5)
        assert verify_embedding(identity_embedding(c)).ok

    def test_wrong_critical_locus(self):
        e = inclusion(CUSP, critical_chart(["x", "z"], 1, x**3 + z**3))
        r = verify_embedding(e)
        assert r.potential and r.immersion and not r.critical
        assert r.failed == ("c",)

    def test_wrong_potential(self):
        e = inclusion(critical_chart(["x"], 1, 2 * x**3), critical_chart(["x", "z"], 1, x**3 + z**2))
        assert not verify_embedding(e).potential

    def test_not_immersion(self):
        src = critical_chart(["x"], 1, x**6)
        e = ChartEmbedding(src, critical_chart(["t"], 1, Poly.var("t") ** 3), {"t": x**2})
        assert not verify_embedding(e).immersion

    def test_image_ideal(self):
        e = inclusion(CUSP, critical_chart(["x", "z"], 1, x**3 + z**2))
        assert image_ideal(e) == Ideal([x**2, z], variables=("x", "z"))


class TestStabilize:
    def test_exact_match(self):
        st_ = stabilize(CUSP, CUSP, {"x": x})
        assert st_.pairs == () and st_.chart.vars == ("x",)
        assert st_.phi.phi["x"] == x and st_.psi.phi["x"] == x

    def test_quartic_example(self):
        U = critical_chart(["x"], 3 + 4 * x, x**3 + x**4)
        st_ = stabilize(U, CUSP, {"x": x})
        W = st_.chart
        assert W.vars == ("x", "y", "z")
        assert W.f == x**3 + y * z
        assert st_.phi.phi == {"x": x, "y": x**2, "z": x**2}
        assert st_.psi.phi == {"x": x, "y": ZERO, "z": ZERO}
        assert st_.phi.image(W.f) == U.f and st_.psi.image(W.f) == CUSP.f
        assert W.jac == Ideal([x**2, y, z], variables=("x", "y", "z"))
        assert verify_embedding(st_.phi).ok and verify_embedding(st_.psi).ok

    def test_two_products(self):
        U = critical_chart(["x"], 3 + 4 * x + 5 * x**2, x**3 + x**4 + x**5)
        st_ = stabilize(U, CUSP, {"x": x})
        assert len(st_.pairs) == 1
        r, s = st_.pairs[0]
        assert r * s == x**4 + x**5
        assert {r, s} == {x**2, x**2 + x**3}
        assert st_.phi.image(st_.chart.f) == U.f

    def test_not_in_square(self):
        U = critical_chart(["x"], 3 + 4 * x, x**3 + x**4)
        with pytest.raises(NotInSquare):
            stabilize(U, CUSP, {"x": 2 * x})


class TestQuadraticForms:
    def test_identity_form(self):
        q = qform(inclusion(CUSP, split_target(1, 1)), ("z", "w"))
        assert [[e.constant_term() for e in row] for row in q.matrix] == [[1, 0], [0, 1]]
        assert q.det == Poly.const(1)

    def test_diagonal_form(self):
        e = inclusion(CUSP, split_target(3, 5))
        q = qform(e)
        assert [[c.constant_term() for c in row] for row in q.matrix] == [[3, 0], [0, 5]]
        assert q.det == Poly.const(15)
        assert jphi(e).value == Poly.const(15)

    def test_hyperbolic_form(self):
        H = critical_chart(["x", "y", "z"], 1, x**3 + y * z)
        q = qform(inclusion(CUSP, H), ("y", "z"))
        half = Fraction(1, 2)
        assert [[c.constant_term() for c in row] for row in q.matrix] == [[0, half], [half, 0]]
        assert q.det == Poly.const(Fraction(-1, 4))

    def test_bad_frame(self):
        H = critical_chart(["x", "y", "z"], 1, x**3 + y * z)
        with pytest.raises(BadFrame):
            qform(inclusion(CUSP, H), ("y",))
        with pytest.raises(BadFrame):
            qform(inclusion(CUSP, H), ("x", "y"))
        with pytest.raises(BadFrame):
            qform(inclusion(CUSP, H), ("q", "y"))

    def test_degenerate(self):
        e = inclusion(CUSP, critical_chart(["x", "z"], 1, x**3 + x * z**2))
        with pytest.raises((DegenerateForm, BadFrame)):
            qform(e)

    def test_non_constant_unit(self):
        # g = x^3 + (1 + x) z^2: q = 1 + x, a unit along Crit(x^3) = {x^2 = 0}
        e = inclusion(CUSP, critical_chart(["x", "z"], 1, x**3 + (1 + x) * z**2))
        q = qform(e)
        assert q.matrix[0][0] == 1 + x
        assert unit_in_quotient(q.det, CUSP.jac)

    def test_jphi_trivial(self):
        assert jphi(inclusion(CUSP, split_target(1))).value == Poly.const(1)
        assert jphi(inclusion(CUSP, split_target(2))).value == Poly.const(2)

    def test_frame_factor(self):
        # a frame direction 2*dz doubles the frame determinant and quadruples det q
        e = inclusion(CUSP, split_target(1))
        q = qform(e, [{"z": 2}])
        assert q.frame_det == Poly.const(2) and q.det == Poly.const(4)
        assert jphi(e, [{"z": 2}]).value == Poly.const(16)


class TestLaws:
    def test_composition_product(self):
        V = split_target(2)
        W = critical_chart(["x", "z", "w"], 1, x**3 + 2 * z**2 + 3 * w**2)
        p1, p2 = inclusion(CUSP, V), inclusion(V, W)
        assert jphi(compose_embeddings(p1, p2)).value == Poly.const(6)
        report = check_jphi_laws([(p1, p2)])
        assert report.ok and [c[0] for c in report.checks] == ["composition", "block"]

    def test_identity_compositions(self):
        i = identity_embedding(CUSP)
        assert jphi(i).value == Poly.const(1)
        assert check_jphi_laws([(i, i)]).ok

    def test_hyperbolic_then_split(self):
        H = critical_chart(["x", "y", "z"], 1, x**3 + y * z)
        HW = critical_chart(["x", "y", "z", "w"], 1, x**3 + y * z + 5 * w**2)
        p1, p2 = inclusion(CUSP, H), inclusion(H, HW)
        report = check_jphi_laws([(p1, p2)])
        assert report.ok
        assert jphi(compose_embeddings(p1, p2)).value == Poly.const(Fraction(-5, 4))

    def test_independence(self):
        H = critical_chart(["x", "y", "z"], 1, x**3 + y * z)
        a = inclusion(CUSP, H)
        b = ChartEmbedding(CUSP, H, {"x": x, "y": x**2, "z": ZERO})
        assert verify_embedding(b).ok
        assert jphi(a).equals(jphi(b))
        diff = jphi(a).value - jphi(b).value
        assert radical_membership(diff, CUSP.jac)
        assert check_jphi_laws([], [(a, b)]).ok

    def test_violation_reported(self):
        a = inclusion(CUSP, split_target(2))
        b = inclusion(CUSP, split_target(3))
        # different targets, so J differs: the independence law must flag it
        with pytest.raises(LawViolation):
            check_jphi_laws([], [(a, b)])
        assert not check_jphi_laws([], [(a, b)], raise_on_failure=False).ok


class TestMinimize:
    def test_split_off_square(self):
        r = minimize_chart(critical_chart(["x", "y"], 1, x**2 + y**3))
        assert r.route == "exact" and r.tangent_dim == 1 and r.verified
        assert r.chart.vars == ("y",) and r.chart.f == y**3

    def test_zero_hessian(self):
        f = x**5 + y**5
        r = minimize_chart(critical_chart(["x", "y"], 1, f))
        assert r.tangent_dim == 2 and r.chart.f == f and r.chart.vars == ("x", "y")

    def test_hyperbolic_block(self):
        r = minimize_chart(critical_chart(["x", "y", "z"], 1, x**3 + z**2 + y * z))
        assert r.route == "exact" and r.tangent_dim == 1 and r.verified
        assert r.chart.vars == ("x",) and r.chart.f == x**3

    def test_jet_fallback(self):
        r = minimize_chart(critical_chart(["x", "y"], 1, x**2 + x * y**2))
        assert r.route == "jet" and r.tangent_dim == 1
        assert r.split.residual.poly == -(y**4) / 4

    def test_translated_point(self):
        r = minimize_chart(critical_chart(["x", "y"], 1, (x - 1) ** 2 + y**3), {"x": 1})
        assert r.route == "exact" and r.chart.f == y**3 and r.verified

    def test_not_critical(self):
        with pytest.raises(PointNotCritical):
            minimize_chart(critical_chart(["x", "y"], 1, x + y**2))

    def test_reduced_chart_validates(self):
        r = minimize_chart(critical_chart(["x", "y", "z"], 1, x**3 + z**2 + y * z))
        assert validate_dcritical(r.chart, r.chart.jac, r.chart.f)
        f1 = (x**3 + z**2 + y * z).compose(r.change)
        assert section_equal(r.f_prime, f1, critical_chart(["x", "y", "z"], 1, f1).jac)


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=25)
@given(st.lists(nonzero_fractions, min_size=1, max_size=2), st.lists(nonzero_fractions, min_size=1, max_size=2))
def test_split_chain_composition_is_exact(a, b):
    V = split_target(*a)
    names_v = list(V.vars)
    extra = ["p", "q"][: len(b)]
    g = V.f + sum((Poly.var(n) ** 2 * c for n, c in zip(extra, b)), Poly.zero())
    W = critical_chart(names_v + extra, 1, g)
    p1, p2 = inclusion(CUSP, V), inclusion(V, W)
    total = jphi(compose_embeddings(p1, p2)).value
    prod = Fraction(1)
    for c in list(a) + list(b):
        prod *= c
    assert total == Poly.const(prod)
    assert check_jphi_laws([(p1, p2)]).ok


@settings(max_examples=20)
@given(st.lists(nonzero_fractions, min_size=1, max_size=3))
def test_det_is_a_unit_for_split_forms(coeffs):
    q = qform(inclusion(CUSP, split_target(*coeffs)))
    assert unit_in_quotient(q.det, CUSP.jac)


@settings(max_examples=15)
@given(st.integers(1, 3), st.sampled_from([x**3, x**4, x**3 + x**5]))
def test_stabilize_reproduces_potentials(k, g):
    # f = g + (g')^2 * x^k lies in g + I^2 with I = <g'>
    V = critical_chart(["x"], 1, g)
    gp = g.diff("x")
    f = g + gp * gp * x**k
    U = critical_chart(["x"], 1, f)
    try:
        st_ = stabilize(U, V, {"x": x})
    except NotInSquare:
        # the Jacobian ideal of f can be strictly smaller than that of g
        return
    assert st_.phi.image(st_.chart.f) == f
    assert st_.psi.image(st_.chart.f) == g
