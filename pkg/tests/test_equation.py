import cmath
import logging

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import F1, F2
from diffsol import EquationSpec, Poly2, characteristic_roots, detect_resonance, validate_spec
from diffsol.equation import CharacteristicData
from diffsol.errors import BadDegree, BetaZero, GNontrivial, NoHyperbolicCase


def chars_of(l1, l2):
    return CharacteristicData(l1, l2, abs(l1) < 1, abs(l2) > 1)


class TestValidate:
    def test_fixture_valid(self):
        assert validate_spec(F1) is F1

    def test_beta_zero(self):
        with pytest.raises(BetaZero):
            validate_spec(EquationSpec(-3.5, 0, Poly2({(0, 2): 1})))

    def test_g_zero(self):
        with pytest.raises(GNontrivial):
            validate_spec(EquationSpec(-3.5, 1.5, Poly2()))

    def test_bad_degree_at_construction(self):
        with pytest.raises(BadDegree):
            EquationSpec(-3.5, 1.5, {(0, 1): 1.0})

    def test_f_and_D(self):
        x, y = 0.1 + 0.2j, -0.3j
        assert F1.f(x, y) == pytest.approx(-1.5 * x + 3.5 * y + y * y)
        assert F1.D(0.5) == 0 and F1.D(3) == 0


class TestRoots:
    def test_saddle(self):
        ch = characteristic_roots(F1)
        assert ch.lambda1 == pytest.approx(0.5, abs=1e-15)
        assert ch.lambda2 == pytest.approx(3, abs=1e-15)
        assert ch.case_i_available and ch.case_ii_available and ch.hyperbolic_saddle

    def test_equal_moduli_tie_break(self):
        ch = characteristic_roots(EquationSpec(0, -4, Poly2({(0, 2): 1})))
        assert ch.lambda1 == pytest.approx(-2) and ch.lambda2 == pytest.approx(2)
        assert not ch.case_i_available and ch.case_ii_available

    def test_both_inside(self):
        ch = characteristic_roots(F2)
        assert (ch.lambda1, ch.lambda2) == (pytest.approx(0.25), pytest.approx(0.5))
        assert ch.case_i_available and not ch.case_ii_available

    @pytest.mark.parametrize("alpha, beta", [(0, 1), (-2, 1), (0.6, 1), (0, -1j)])
    def test_no_hyperbolic_case(self, alpha, beta):
        # both roots on the unit circle
        with pytest.raises(NoHyperbolicCase):
            characteristic_roots(EquationSpec(alpha, beta, Poly2({(0, 2): 1})))

    def test_one_unit_root_is_fine(self):
        # lambda = 1 and 0.5: case i only
        ch = characteristic_roots(EquationSpec.from_roots(1, 0.5, Poly2({(0, 2): 1})))
        assert ch.case_i_available and not ch.case_ii_available

    def test_tiny_root_without_cancellation(self):
        ch = characteristic_roots(EquationSpec.from_roots(1e-9, 1e8, Poly2({(2, 0): 1})))
        assert ch.lambda1 == pytest.approx(1e-9, rel=1e-14)

    def test_repeated(self):
        ch = characteristic_roots(EquationSpec.from_roots(0.5, 0.5, Poly2({(2, 0): 1})))
        assert ch.repeated

    def test_mp_roots(self):
        with mpmath.workdps(40):
            ch = characteristic_roots(F1.to_mp())
            assert abs(ch.lambda1 - mpmath.mpf(1) / 2) < mpmath.mpf(10) ** -38


def root(max_mod=4.0):
    r = st.floats(0.05, max_mod)
    th = st.floats(-3.1, 3.1)
    return st.builds(lambda a, b: cmath.rect(a, b), r, th)


@given(root(), root())
def test_roots_invariants(l1, l2):
    assume(abs(abs(l1) - 1) > 1e-6 or abs(abs(l2) - 1) > 1e-6)
    spec = EquationSpec.from_roots(l1, l2, Poly2({(0, 2): 1}))
    try:
        ch = characteristic_roots(spec)
    except NoHyperbolicCase:
        assume(False)
    # moduli within 1e-12 count as a tie and are ordered by (re, im) instead
    assert abs(ch.lambda1) <= abs(ch.lambda2) * (1 + 1e-12)
    beta = spec.beta
    for lam in (ch.lambda1, ch.lambda2):
        assert abs(spec.D(lam)) <= 1e-10 * max(1, abs(beta))
    scale = max(abs(l1), abs(l2))
    assert abs(ch.lambda1 * ch.lambda2 - beta) <= 1e-12 * max(abs(beta), 1e-300) * 10
    assert abs(ch.lambda1 + ch.lambda2 + spec.alpha) <= 1e-12 * scale * 10
    # reconstruction recovers the roots
    got = sorted([ch.lambda1, ch.lambda2], key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    want = sorted([l1, l2], key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    if abs(l1 - l2) > 1e-3 * scale:
        for a, b in zip(got, want):
            assert abs(a - b) <= 1e-12 * scale * 10


class TestResonance:
    def test_both_roots_inside(self):
        rep = detect_resonance(chars_of(0.25, 0.5), k_max=10)
        assert [(e.m, e.k, e.relevant) for e in rep.entries] == [(2, 2, True)]
        assert rep.for_root(2).k == 2 and rep.for_root(1) is None

    def test_both_roots_outside(self):
        rep = detect_resonance(chars_of(2, 4), k_max=10)
        assert [(e.m, e.k, e.relevant) for e in rep.entries] == [(1, 2, True)]

    def test_saddle_empty(self):
        rep = detect_resonance(characteristic_roots(F1), k_max=64)
        assert rep.entries == () and rep.k_max_scanned == 64

    def test_informational_hit(self):
        # lambda1^2 = lambda2 with |lambda1| < 1 does not block u_1
        rep = detect_resonance(chars_of(0.5, 0.25 + 1e-15), k_max=10)
        assert rep.entries and not rep.entries[0].relevant
        assert rep.for_root(1) is None

    def test_near_resonance_warns(self, caplog):
        with caplog.at_level(logging.WARNING):
            rep = detect_resonance(chars_of(0.25 * (1 + 1e-5), 0.5), k_max=10)
        assert rep.entries == () and rep.warnings
        assert "near resonance" in caplog.text

    def test_high_order(self):
        lam = 0.9 * cmath.exp(0.3j)
        rep = detect_resonance(chars_of(lam**7, lam), k_max=64)
        assert [(e.m, e.k) for e in rep.entries] == [(2, 7)]

    def test_k_max_bound(self):
        with pytest.raises(ValueError):
            detect_resonance(chars_of(0.25, 0.5), k_max=1)

    @given(st.floats(0.05, 0.95), st.integers(2, 12), st.integers(2, 40), st.integers(0, 30))
    def test_monotone_in_k_max(self, r, k, k1, extra):
        lam2 = r
        rep_small = detect_resonance(chars_of(lam2**k, lam2), k_max=k1)
        rep_big = detect_resonance(chars_of(lam2**k, lam2), k_max=k1 + extra)
        assert set(rep_small.entries) <= set(rep_big.entries)
