import cmath
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F1, F2
from diffsol import EquationSpec, Poly2, Series1, characteristic_roots, particular_solution
from diffsol.errors import ConditioningWarning, DomainWarning, ManifoldResonance, RepeatedRoot
from diffsol.manifold import DiagonalSystem, ManifoldSeries, diagonalize, eval_psi, functional_residual, solve_psi
from diffsol.particular import DomainSector


@pytest.fixture(scope="module")
def sys_p():
    return diagonalize(F1, characteristic_roots(F1), "P")


class TestDiagonalize:
    def test_fixture_coefficients(self, sys_p):
        assert (sys_p.lam_x, sys_p.lam_y) == (pytest.approx(0.5), pytest.approx(3))
        want = {(2, 0): -0.1, (1, 1): -1.2, (0, 2): -3.6}
        for key, v in want.items():
            assert sys_p.c[key] == pytest.approx(v, rel=1e-14)
            assert sys_p.d[key] == pytest.approx(-v, rel=1e-14)
        assert len(sys_p.c) == 3

    def test_u_squared(self):
        spec = EquationSpec(-3.5, 1.5, Poly2({(2, 0): 1}))
        s = diagonalize(spec, characteristic_roots(spec), "P")
        for key, v in {(2, 0): -1, (1, 1): -2, (0, 2): -1}.items():
            assert s.c[key] == pytest.approx(v / 2.5, rel=1e-14)

    def test_q_swaps_roles(self):
        s = diagonalize(F1, characteristic_roots(F1), "Q")
        assert (s.lam_x, s.lam_y) == (pytest.approx(3), pytest.approx(0.5))
        # (3x + 0.5y)^2 / (0.5 - 3)
        assert s.c[(2, 0)] == pytest.approx(9 / 2.5)
        assert s.d[(0, 2)] == pytest.approx(-0.25 / 2.5)

    def test_zero_g(self):
        lin = EquationSpec(-3.5, 1.5, Poly2())
        s = diagonalize(lin, characteristic_roots(lin), "P")
        assert not s.c and not s.d

    def test_repeated(self):
        spec = EquationSpec.from_roots(0.5, 0.5, Poly2({(0, 2): 1}))
        with pytest.raises(RepeatedRoot):
            diagonalize(spec, characteristic_roots(spec))

    def test_bad_which(self, sys_p):
        with pytest.raises(ValueError):
            diagonalize(F1, characteristic_roots(F1), "R")

    def test_matrix_inverse(self, sys_p):
        assert np.allclose(sys_p.matrix @ sys_p.inverse_matrix, np.eye(2), atol=1e-14, rtol=0)

    @given(st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2),
           st.sampled_from(["P", "Q"]))
    def test_map_equivalence(self, x, y, which):
        spec = EquationSpec(-3.5, 1.5, Poly2({(0, 2): 1, (2, 1): 0.5j, (3, 0): -1}))
        s = diagonalize(spec, characteristic_roots(spec), which)
        u, w = s.to_uw(x, y)
        want = (w, spec.f(u, w))
        got = s.to_uw(s.X(x, y), s.Y(x, y))
        scale = 1 + abs(want[1])
        assert abs(got[0] - want[0]) <= 1e-10 * scale
        assert abs(got[1] - want[1]) <= 1e-10 * scale
        assert np.allclose(s.from_uw(u, w), (x, y), atol=1e-12 * (1 + abs(x) + abs(y)))


class TestSolvePsi:
    def test_gamma2(self, sys_p):
        psi = solve_psi(sys_p, 12)
        assert psi.gamma(2) == pytest.approx(-2 / 55, rel=1e-12)
        assert psi.gamma(1) == 0
        assert psi.gamma(2) == pytest.approx(sys_p.d[(2, 0)] / (0.25 - 3), rel=1e-12)

    def test_zero_nonlinearity(self):
        s = DiagonalSystem("P", 0.5, 3, Poly2(), Poly2(), 2)
        psi = solve_psi(s, 10)
        assert not np.any(psi.gammas.coeffs)

    def test_functional_residual(self, sys_p):
        psi = solve_psi(sys_p, 12)
        res = functional_residual(psi, 12)
        assert max(abs(c) for c in res.coeffs) <= 1e-10

    @pytest.mark.parametrize("which", ["P", "Q"])
    @pytest.mark.parametrize("roots, g", [
        ((0.5, 3), {(0, 2): 1}),
        ((0.3 + 0.4j, -2.5 + 1j), {(2, 0): 1, (1, 1): -0.5j, (0, 3): 2}),
        ((0.8, 1.7), {(1, 2): 1, (2, 2): 0.3}),
    ])
    def test_full_vs_incremental(self, roots, g, which):
        spec = EquationSpec.from_roots(*roots, Poly2(g))
        s = diagonalize(spec, characteristic_roots(spec), which, max_degree=14)
        a = solve_psi(s, 14, method="full").gammas.coeffs
        b = solve_psi(s, 14, method="incremental").gammas.coeffs
        scale = max(1.0, np.max(np.abs(a)))
        assert np.max(np.abs(a - b)) <= 1e-12 * scale

    def test_resonance(self):
        s = diagonalize(F2, characteristic_roots(F2), "Q")  # 0.5^2 = 0.25
        with pytest.raises(ManifoldResonance) as exc:
            solve_psi(s, 6)
        assert exc.value.n == 2

    def test_near_resonance_warning(self):
        spec = EquationSpec.from_roots(0.25 + 1e-4, 0.5, Poly2({(0, 2): 1}))
        s = diagonalize(spec, characteristic_roots(spec), "Q")
        with pytest.warns(ConditioningWarning):
            psi = solve_psi(s, 6)
        assert psi.warnings

    def test_bad_args(self, sys_p):
        with pytest.raises(ValueError):
            solve_psi(sys_p, 1)
        with pytest.raises(ValueError):
            solve_psi(sys_p, 5, method="magic")


class TestEvalPsi:
    def test_origin(self, sys_p):
        assert eval_psi(solve_psi(sys_p, 8), 0) == 0

    def test_single_term(self, sys_p):
        psi = ManifoldSeries(Series1([0, -2 / 55]), sys_p, 10.0)
        assert eval_psi(psi, 0.1) == pytest.approx(-2 / 55 * 0.01)

    def test_beyond_radius_warns(self, sys_p):
        psi = solve_psi(sys_p, 12)
        with pytest.warns(DomainWarning):
            eval_psi(psi, 2 * psi.radius)


def _orbit(spec, sol, system, t):
    return system.from_uw(sol(t), sol(t + 1))


class TestInvariance:
    def test_stable_curve_along_u1(self, sys_p):
        ch = characteristic_roots(F1)
        u1 = particular_solution(F1, ch, 1, N=16)
        psi = solve_psi(sys_p, 16)
        sec = DomainSector(ch.lambda1, u1.eta / 2)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            for r in (sec.eta, sec.eta / 3, sec.eta / 10):
                for t in sec.ring_points(r, 12):
                    x, y = _orbit(F1, u1, sys_p, t)
                    assert abs(y - psi(x)) <= 1e-8
                    x1, _ = _orbit(F1, u1, sys_p, t + 1)
                    assert abs(x1 - sys_p.X(x, psi(x))) <= 1e-8

    def test_unstable_curve_along_u2(self):
        ch = characteristic_roots(F1)
        sq = diagonalize(F1, ch, "Q")
        u2 = particular_solution(F1, ch, 2, N=16)
        psi = solve_psi(sq, 16)
        # t and t + 1 both inside S(eta)
        sec = DomainSector(ch.lambda2, u2.eta / 6)
        for t in sec.ring_points(sec.eta, 12):
            x, y = _orbit(F1, u2, sq, t)
            assert abs(y - psi(x)) <= 1e-8


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 0.8), st.floats(-3, 3), st.floats(1.5, 4), st.floats(-3, 3))
def test_functional_equation_random(r1, th1, r2, th2):
    spec = EquationSpec.from_roots(cmath.rect(r1, th1), cmath.rect(r2, th2), Poly2({(1, 1): 1, (0, 2): -0.5}))
    s = diagonalize(spec, characteristic_roots(spec), "P")
    psi = solve_psi(s, 10)
    scale = max(1.0, np.max(np.abs(psi.gammas.coeffs)))
    assert max(abs(c) for c in functional_residual(psi).coeffs) <= 1e-10 * scale
