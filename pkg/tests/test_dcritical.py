from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcrit.dcritical import (SectionRep, TorusAction, check_equivariant, critical_chart, fixed_chart,
                             local_constancy, product_chart, pullback_section, scale_section,
                             section_closed, section_equal, section_space, validate_dcritical)
from dcrit.errors import NotClosed, NotEquivariant, OriginNotCritical, PreconditionError, ZeroScalar
from dcrit.groebner import Ideal
from dcrit.polycore import Poly, variables
from strategies import nonzero_fractions

x, y, z, w = variables("x", "y", "z", "w")
EXAMPLE = x**5 + x**2 * y**2 + y**5


def unit_cofactor(p: Poly) -> Poly:
    """``p / z^val(p)``: the chart ``D(u)`` is where ``p`` generates ``<z^val>``."""
    v = p.valuation()
    return Poly({(e[0] - v,): c for e, c in p.with_gens(("z",)).terms.items()}, ("z",))


def zideal(*gens, names=("z",)):
    return Ideal(gens, variables=names)


class TestCharts:
    @pytest.mark.parametrize("n", range(1, 6))
    def test_fat_point_chart(self, n):
        c = critical_chart(["z"], 1, z ** (n + 1))
        assert c.jac == zideal(z**n)

    def test_cusp_surface(self):
        c = critical_chart(["y", "z"], 1, y * z**2)
        assert c.jac == zideal(z**2, y * z, names=("y", "z"))

    def test_smooth_line(self):
        c = critical_chart(["x"], 1, Poly.zero())
        assert c.jac.is_zero() and c.dim == 1

    def test_localized(self):
        c = critical_chart(["x"], 3 + 4 * x, x**3 + x**4)
        assert c.jac == zideal(x**2, names=("x",))

    def test_undeclared_variable(self):
        with pytest.raises(PreconditionError):
            critical_chart(["x"], 1, x * y)


class TestSections:
    def test_closedness(self):
        c = critical_chart(["x", "y"], 1, EXAMPLE)
        assert section_closed(c.f, c.jac)
        assert not section_closed(z, zideal(z**2))
        for n in range(2, 6):
            assert section_closed(z ** (n + 1) + z ** (2 * n), zideal(z**n))

    def test_equality(self):
        for n in range(2, 6):
            I = zideal(z**n)
            assert section_equal(z ** (n + 1) + z ** (2 * n), z ** (n + 1), I)
        assert section_equal(z**4, z**4, zideal(z**3))
        assert not section_equal(z**4, z**4 + z**5, zideal(z**3))

    def test_equality_requires_closed(self):
        with pytest.raises(NotClosed):
            section_equal(z, z, zideal(z**2))

    def test_rep(self):
        from dcrit.dcritical import section_rep

        assert section_rep(z**3, zideal(z**2)).closed
        assert not section_rep(z, zideal(z**2)).closed


class TestSectionSpace:
    @pytest.mark.parametrize("n", range(2, 7))
    def test_fat_points(self, n):
        sp = section_space(zideal(z**n))
        assert sp.dims == (n, n - 1)
        assert sp.quotient.dimension == 2 * n
        assert all(section_closed(g, zideal(z**n)) for g in sp.kernel)

    def test_reduced_point(self):
        sp = section_space(Ideal([x, y], variables=("x", "y")))
        assert sp.dims == (1, 0)
        assert sp.quotient.dimension == 3

    def test_empty_scheme(self):
        assert section_space(Ideal([Poly.const(1)], variables=("z",))).dims == (0, 0)

    def test_base_points(self):
        assert section_space(zideal(z**3), [{"z": 0}]).dims == (3, 2)
        with pytest.raises(PreconditionError):
            section_space(zideal(z**3), [{"z": 1}])

    def test_two_components(self):
        sp = section_space(zideal(z**2 * (z - 1) ** 2))
        assert sp.components == 2
        assert sp.dim_S - sp.dim_S0 == 2

    @pytest.mark.parametrize("a,b", [(2, 2), (2, 3), (3, 3)])
    def test_products_of_fat_points(self, a, b):
        sp = section_space(Ideal([x**a, y**b], variables=("x", "y")))
        assert sp.dim_S - sp.dim_S0 == 1


class TestValidate:
    @pytest.mark.parametrize("n", [3, 4])
    def test_fat_point_iff(self, n):
        X = zideal(z**n)
        for coeffs in product([0, 1], repeat=n - 1):
            s = sum((c * z ** (n + 1 + k) for k, c in enumerate(coeffs)), Poly.zero())
            u = unit_cofactor(s.diff("z")) if not s.is_zero() else Poly.const(1)
            chart = critical_chart(["z"], u, s)
            assert validate_dcritical(chart, X, s) == (coeffs[0] != 0)

    def test_smooth_line(self):
        chart = critical_chart(["x"], 1, Poly.zero())
        assert validate_dcritical(chart, Ideal([], variables=("x",)), Poly.zero())

    def test_hand_example(self):
        chart = critical_chart(["x", "y"], 1, x**2 + y**3)
        X = Ideal([x, y**2], variables=("x", "y"))
        assert validate_dcritical(chart, X, SectionRep(X, x**2 + y**3, True))

    def test_wrong_section(self):
        chart = critical_chart(["x", "y"], 1, x**2 + y**3)
        X = Ideal([x, y**2], variables=("x", "y"))
        assert validate_dcritical(chart, X, 2 * x**2 + y**3)  # x^2 lies in X^2
        assert not validate_dcritical(chart, X, x**2 + 2 * y**3)


class TestLocalConstancy:
    @pytest.mark.parametrize("n", [5, 6, 7, 8])
    def test_example_not_constant(self, n):
        assert not local_constancy(critical_chart(["x", "y"], 1, EXAMPLE), order=n)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_fat_point_constant(self, n):
        assert local_constancy(critical_chart(["z"], 1, z ** (n + 1)), order=n + 1)

    def test_zero(self):
        assert local_constancy(critical_chart(["z"], 1, Poly.zero()))

    def test_origin_not_critical(self):
        with pytest.raises(OriginNotCritical):
            local_constancy(critical_chart(["z"], 1, z + z**2))
        with pytest.raises(OriginNotCritical):
            local_constancy(critical_chart(["z"], z, z**3))


class TestScaleProductPullback:
    def test_scale(self):
        c = critical_chart(["z"], 1, z**3)
        assert scale_section(1, c).f == c.f
        c2 = scale_section(2, c)
        assert c2.f == 2 * z**3 and c2.jac == zideal(z**2)
        c3 = critical_chart(["x", "y"], 1, x**2 * y**2)
        assert scale_section(-1, c3).jac == c3.jac
        with pytest.raises(ZeroScalar):
            scale_section(0, c)

    def test_product(self):
        p = product_chart(critical_chart(["x"], 1, x**2), critical_chart(["y"], 1, y**2))
        assert p.f == x**2 + y**2 and p.jac == Ideal([x, y], variables=("x", "y"))
        p = product_chart(critical_chart(["z"], 1, z**3), critical_chart(["w"], 1, w**3))
        assert p.jac == Ideal([z**2, w**2], variables=("z", "w"))
        p = product_chart(critical_chart(["z"], 1, z**3), critical_chart(["x"], 1, Poly.zero()))
        assert p.jac == Ideal([z**2], variables=("z", "x"))

    def test_product_renames_clashes(self):
        p = product_chart(critical_chart(["z"], 1, z**3), critical_chart(["z"], 1, z**2))
        assert len(set(p.vars)) == 2 and p.vars[0] == "z"
        other = p.vars[1]
        assert p.f == z**3 + Poly.var(other) ** 2

    def test_pullback(self):
        c = critical_chart(["x", "z"], 1, x**3 + z**2)
        assert pullback_section({}, c).g == c.f
        s = pullback_section({"z": Poly.zero()}, c, ["x"])
        assert s.g == x**3
        line = critical_chart(["y"], 1, y**3)
        s = pullback_section({"y": y}, line, ["x", "y"])
        assert s.g == y**3 and s.ideal == Ideal([y**2], variables=("x", "y"))


class TestEquivariance:
    def test_examples(self):
        assert check_equivariant(x**2 * y**2, TorusAction({"x": 1, "y": -1}, 0))
        assert check_equivariant(x**2 * y**2, TorusAction({"x": 1, "y": 1}, 4))
        assert check_equivariant(x**2 + y**3, TorusAction({"x": 3, "y": 2}, 6))
        assert not check_equivariant(x**2 + y**2, TorusAction({"x": 1, "y": -1}, 0))

    def test_fixed_chart(self):
        c = critical_chart(["x", "y"], 1, x**2 * y**2)
        fc = fixed_chart(c, TorusAction({"x": 1, "y": -1}, 0))
        assert fc.chart.vars == () and fc.chart.f.is_zero() and fc.verified
        assert fc.removed == ("x", "y")

    def test_trivial_weights(self):
        c = critical_chart(["x", "y"], 1, x**2 * y**2)
        fc = fixed_chart(c, TorusAction({"x": 0, "y": 0}, 0))
        assert fc.chart.vars == c.vars and fc.chart.f == c.f and fc.chart.jac == c.jac

    def test_cubic(self):
        c = critical_chart(["x", "y"], 1, x**3 + x * y**2)
        fc = fixed_chart(c, TorusAction({"x": 2, "y": 2}, 6))
        assert fc.chart.vars == () and fc.chart.f.is_zero()

    def test_partial_fixed_locus_validates(self):
        c = critical_chart(["x", "y", "t"], 1, x * y + Poly.var("t") ** 3)
        fc = fixed_chart(c, TorusAction({"x": 1, "y": -1, "t": 0}, 0))
        assert fc.chart.vars == ("t",) and fc.verified
        assert validate_dcritical(fc.chart, fc.chart.jac, fc.chart.f)

    def test_not_equivariant(self):
        c = critical_chart(["x", "y"], 1, x**2 + y)
        with pytest.raises(NotEquivariant):
            fixed_chart(c, TorusAction({"x": 1, "y": -1}, 0))


# ---------------------------------------------------------------------------
# properties

charts = st.sampled_from([
    (("x", "y"), EXAMPLE),
    (("x", "y"), x**2 + y**3),
    (("x", "y"), x**3 + x * y**2),
    (("z",), z**4),
    (("y", "z"), y * z**2),
])


@settings(max_examples=30)
@given(charts)
def test_potential_is_closed(case):
    names, f = case
    c = critical_chart(names, 1, f)
    assert section_closed(f, c.jac)


@settings(max_examples=30)
@given(charts, st.integers(0, 3), st.integers(0, 3), nonzero_fractions)
def test_validate_ignores_square_terms(case, i, j, c):
    names, f = case
    chart = critical_chart(names, 1, f)
    X = chart.jac
    G = X.basis()
    if not G:
        return
    p, q = G[i % len(G)], G[j % len(G)]
    assert validate_dcritical(chart, X, f) == validate_dcritical(chart, X, f + p * q * c)


@settings(max_examples=30)
@given(charts, nonzero_fractions)
def test_scaling_keeps_jacobian_and_validity(case, c):
    names, f = case
    chart = critical_chart(names, 1, f)
    scaled = scale_section(c, chart)
    assert scaled.jac == chart.jac
    assert validate_dcritical(scaled, chart.jac, f * c)


@settings(max_examples=20)
@given(charts, charts)
def test_product_jacobian_is_sum(a, b):
    c1 = critical_chart(a[0], 1, a[1])
    c2 = critical_chart(b[0], 1, b[1])
    p = product_chart(c1, c2)
    renamed = p.vars[len(c1.vars):]
    g = b[1].compose({old: Poly.var(new) for old, new in zip(b[0], renamed)})
    expected = Ideal(list(c1.jac.generators) + [g.diff(v) for v in renamed], variables=p.vars)
    assert p.jac == expected


@pytest.mark.parametrize("n", range(2, 6))
def test_fat_point_base_point_correction(n):
    sp = section_space(zideal(z**n), [{"z": 0}])
    assert sp.dim_S0 == sp.dim_S - 1
