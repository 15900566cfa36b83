import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffsol.algebra import Poly2, Series1, compose1, eval_poly2_on_series, horner, mul1, substitute_linear
from diffsol.errors import BadDegree
from oracles import naive_mul

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def series(max_len=8):
    return st.lists(cplx, min_size=1, max_size=max_len).map(Series1)


orders = st.integers(1, 10)


def close(a: Series1, b: Series1, tol=1e-9):
    n = max(a.order, b.order)
    scale = 1 + max(np.max(np.abs(a.dense(n))), np.max(np.abs(b.dense(n))))
    return np.max(np.abs(a.dense(n) - b.dense(n))) <= tol * scale


class TestMul:
    def test_z_times_z(self):
        z = Series1([1])
        assert list(mul1(z, z, 3).coeffs) == [0, 1, 0]

    def test_hand_product(self):
        a = Series1([1, 4 / 11])
        p = mul1(a, a, 3)
        assert p.coef(1) == 0
        assert p.coef(2) == 1
        assert p.coef(3) == pytest.approx(8 / 11, rel=1e-15)

    def test_truncation_drops_z4(self):
        a = Series1([0, 1])
        assert not np.any(mul1(a, a, 3).coeffs)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            mul1(Series1([1]), Series1([1]), 0)

    @given(series(), series(), orders)
    def test_matches_double_loop(self, a, b, n):
        ref = Series1(naive_mul(a.coeffs, b.coeffs, n))
        assert close(mul1(a, b, n), ref)

    @given(series(), series(), orders)
    def test_commutative(self, a, b, n):
        assert close(mul1(a, b, n), mul1(b, a, n), 1e-14)

    @settings(max_examples=50)
    @given(series(5), series(5), series(5), orders)
    def test_associative(self, a, b, c, n):
        assert close(mul1(mul1(a, b, n), c, n), mul1(a, mul1(b, c, n), n))

    @given(series(), series(), orders)
    def test_deterministic(self, a, b, n):
        x, y = mul1(a, b, n), mul1(a, b, n)
        assert x.coeffs.tobytes() == y.coeffs.tobytes()


class TestPoly2:
    def test_linear_term_rejected(self):
        with pytest.raises(BadDegree):
            Poly2({(1, 0): 1})
        with pytest.raises(BadDegree):
            Poly2({(0, 0): 1, (0, 2): 1})

    def test_negative_exponent_rejected(self):
        with pytest.raises(BadDegree):
            Poly2({(-1, 3): 1})

    def test_zero_terms_dropped(self):
        g = Poly2({(0, 2): 1, (2, 0): 0})
        assert len(g) == 1 and g == Poly2({(0, 2): 1})

    def test_call_and_partials(self):
        g = Poly2({(2, 1): 3, (0, 2): 1j})
        x, y = 0.3 - 0.1j, 1.2 + 0.5j
        assert g(x, y) == pytest.approx(3 * x**2 * y + 1j * y**2)
        assert g.dx(x, y) == pytest.approx(6 * x * y)
        assert g.dy(x, y) == pytest.approx(3 * x**2 + 2j * y)
        assert g.max_total_degree == 3


class TestEvalPoly2:
    def test_square_of_v(self):
        g = Poly2({(0, 2): 1})
        lam = 0.5
        out = eval_poly2_on_series(g, Series1([1.7]), Series1([lam * 1.0]), 2)
        assert out.coef(1) == 0
        assert out.coef(2) == pytest.approx(0.25)

    def test_quadratic_block(self):
        g = Poly2({(2, 0): 1, (1, 1): 1, (0, 2): 1})
        out = eval_poly2_on_series(g, Series1([1]), Series1([0.5]), 2)
        assert out.coef(2) == pytest.approx(1.75)

    def test_empty_g(self):
        out = eval_poly2_on_series(Poly2(), Series1([1, 2]), Series1([3, 4]), 4)
        assert not np.any(out.coeffs)

    @given(series(5), series(5), st.integers(2, 8))
    def test_against_products(self, u, v, n):
        g = Poly2({(2, 0): 2, (1, 2): -1j})
        uu = mul1(u, u, n)
        uvv = mul1(u, mul1(v, v, n), n)
        ref = uu.scaled(2) + uvv.scaled(-1j)
        assert close(eval_poly2_on_series(g, u, v, n), ref)


class TestCompose:
    def test_square_of_scaled(self):
        out = compose1(Series1([0, 1]), Series1([0.5]), 2)
        assert out.coef(2) == pytest.approx(0.25)

    def test_gamma2(self):
        out = compose1(Series1([0, -2 / 55]), Series1([0.5]), 2)
        assert out.coef(2) == pytest.approx(-1 / 110, rel=1e-15)

    def test_binomial(self):
        out = compose1(Series1([0, 1]), Series1([1, 1]), 3)
        assert list(out.coeffs) == [0, 1, 2]

    @given(series(), orders)
    def test_identity_inner(self, a, n):
        assert close(compose1(a, Series1([1]), n), a.truncate(n))

    @given(series(6), series(6), series(4), st.integers(2, 8))
    def test_distributes_over_outer_sum(self, a, b, inner, n):
        lhs = compose1(a + b, inner, n)
        rhs = compose1(a, inner, n) + compose1(b, inner, n)
        assert close(lhs, rhs)

    @given(series(4), series(4), st.builds(complex, st.floats(-0.7, 0.7), st.floats(-0.7, 0.7)))
    def test_exact_for_polynomials(self, outer, inner, z):
        # no truncation once the order covers every product term
        n = outer.order * inner.order
        got = compose1(outer, inner, n)(z)
        ref = outer(inner(z))
        scale = 1 + sum(abs(c) for c in outer.coeffs) * (1 + sum(abs(c) for c in inner.coeffs)) ** 4
        assert abs(got - ref) <= 1e-12 * scale


def test_horner_stride():
    c = np.array([1, 2, 3], dtype=complex)
    z = 0.3 + 0.2j
    assert horner(c, z, stride=2) == pytest.approx(z**2 + 2 * z**4 + 3 * z**6)


def test_substitute_linear_square():
    # (0.5x + 3y)^2
    out = substitute_linear(Poly2({(0, 2): 1}), (1, 1), (0.5, 3), 2)
    assert out[(2, 0)] == pytest.approx(0.25)
    assert out[(1, 1)] == pytest.approx(3)
    assert out[(0, 2)] == pytest.approx(9)


@given(st.lists(cplx, min_size=1, max_size=6))
def test_series_roundtrip_dense(c):
    s = Series1(c)
    assert Series1.from_dense(s.dense(), s.order) == s
    with pytest.raises(ValueError):
        s.coeffs[0] = 1
