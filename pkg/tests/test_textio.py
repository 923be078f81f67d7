from fractions import Fraction

import pytest
from hypothesis import given

from dcrit.dcritical import critical_chart
from dcrit.errors import DuplicateChart, ExprSyntaxError, MissingKey, ParseError, UnknownVariable
from dcrit.groebner import Ideal
from dcrit.polycore import Poly, variables
from dcrit.textio import (chart_json, parse_chart_file, parse_document, parse_poly, print_canonical, print_chart,
                          print_poly)
from strategies import polys

x, y, z = variables("x", "y", "z")


class TestParse:
    def test_example_polynomial(self):
        assert parse_poly("x^5 + x^2*y^2 + y^5") == x**5 + x**2 * y**2 + y**5

    def test_zero(self):
        assert parse_poly("0").is_zero()

    def test_rational_coefficient(self):
        assert parse_poly("1/2*z^2 - z") == z**2 * Fraction(1, 2) - z

    def test_parentheses_and_unary(self):
        assert parse_poly("-(x + 1)^2") == -((x + 1) ** 2)
        assert parse_poly("(x)*(y)") == x * y

    def test_declared_context(self):
        p = parse_poly("y", ["x", "y"])
        assert p.gens == ("x", "y")
        with pytest.raises(UnknownVariable) as info:
            parse_poly("x + w", ["x"])
        assert (info.value.line, info.value.column) == (1, 5)

    @pytest.mark.parametrize("text,column", [
        ("2x", 2),          # implicit multiplication
        ("x + * y", 5),
        ("x^-1", 3),        # negative exponent
        ("x/y", 3),         # division by a variable
        ("x^2^3", 4),
        ("(x + 1", 7),
        ("x $ y", 3),
        ("1/0", 3),
    ])
    def test_error_positions(self, text, column):
        with pytest.raises(ExprSyntaxError) as info:
            parse_poly(text)
        assert info.value.line == 1
        assert info.value.column == column

    def test_position_offsets(self):
        with pytest.raises(ExprSyntaxError) as info:
            parse_poly("x + * y", line=7, column=5)
        assert (info.value.line, info.value.column) == (7, 9)


class TestPrint:
    def test_canonical_order(self):
        assert print_poly(parse_poly("y^5 + x^5 + x^2*y^2")) == "x^5 + x^2*y^2 + y^5"

    def test_zero_and_fraction(self):
        assert print_poly(Poly.zero()) == "0"
        assert print_poly(z**2 * Fraction(1, 2)) == "1/2*z^2"
        assert print_poly(-x + 3) == "-x + 3"

    def test_canonical_values(self):
        assert print_canonical(Ideal([z**2, y * z], variables=("y", "z"))) in ("<y*z, z^2>", "<z^2, y*z>")
        assert print_canonical(Fraction(-3, 4)) == "-3/4"
        chart = critical_chart(["x"], 3 + 4 * x, x**3)
        assert print_canonical(chart, "U") == "[chart U]\nvars = x\ndenom = 4*x + 3\nf = x^3\n"

    def test_chart_json(self):
        chart = critical_chart(["z"], 1, z**5)
        assert chart_json(chart) == {"vars": ["z"], "denom": "1", "f": "z^5", "jac_basis": ["z^4"]}


class TestChartFiles:
    def test_fat_point(self, data_dir):
        doc = parse_chart_file((data_dir / "fatpoint_n4.chart").read_text())
        assert doc.chart().jac == Ideal([z**4], variables=("z",))

    def test_minimal_chart(self):
        doc = parse_chart_file("[chart L]\nvars = x\nf = 0\n")
        c = doc.chart("L")
        assert c.f.is_zero() and c.jac.is_zero() and c.denom == Poly.const(1)

    def test_stabilization_job(self):
        text = "[chart U]\nvars = x\nf = x^3\n\n[stabilize]\nsource = U\ntarget = U\n"
        doc = parse_document(text)
        src, tgt, theta = doc.stabilizations[0]
        assert theta == {"x": x}

    def test_embedding_and_action(self, data_dir):
        doc = parse_document((data_dir / "embed_cubic.chart").read_text())
        e = doc.embedding()
        assert e.phi["z"].is_zero() and e.frame == ("z",)
        doc = parse_document((data_dir / "torus.chart").read_text())
        assert doc.action().weights == {"x": 1, "y": -1, "t": 0}

    def test_round_trip_chart(self):
        chart = critical_chart(["x", "y"], 3 + 4 * x, x**5 + x**2 * y**2 + y**5)
        again = parse_chart_file(print_chart(chart, "C")).chart("C")
        assert again.f == chart.f and again.denom == chart.denom and again.jac == chart.jac

    def test_duplicate_chart(self):
        with pytest.raises(DuplicateChart) as info:
            parse_chart_file("[chart A]\nvars = x\nf = 0\n[chart A]\nvars = x\nf = x\n")
        assert info.value.line == 4

    def test_missing_key(self):
        with pytest.raises(MissingKey) as info:
            parse_chart_file("# comment\n[chart A]\nvars = x\n")
        assert info.value.line == 2

    def test_bad_expression_position(self):
        with pytest.raises(ExprSyntaxError) as info:
            parse_chart_file("[chart A]\nvars = x\nf = x + + 1\n")
        assert (info.value.line, info.value.column) == (3, 9)

    def test_unknown_variable_in_chart(self):
        with pytest.raises(UnknownVariable):
            parse_chart_file("[chart A]\nvars = x\nf = y\n")

    def test_bad_section(self):
        with pytest.raises(ParseError):
            parse_chart_file("[nonsense A]\n")
        with pytest.raises(ParseError):
            parse_chart_file("vars = x\n")


# ---------------------------------------------------------------------------
# properties


@given(polys(max_degree=4, max_terms=6))
def test_round_trip(p):
    assert parse_poly(print_poly(p)) == p


@given(polys(max_degree=4, max_terms=6))
def test_print_is_deterministic(p):
    shuffled = Poly(dict(reversed(list(p.terms.items()))), p.gens)
    assert print_poly(shuffled) == print_poly(p)
