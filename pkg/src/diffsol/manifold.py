"""Diagonal form of the equation as a planar map, and its invariant curve.

Writing ``w(t) = u(t+1)`` turns the equation into a map of ``(u, w)``.  The
change of variables ``(u, w) = T (x, y)`` with ``T = [[1, 1], [lam_x, lam_y]]``
diagonalises the linear part::

    x(t+1) = lam_x x + sum c_ij x^i y^j = X(x, y)
    y(t+1) = lam_y y + sum d_ij x^i y^j = Y(x, y)

``which="P"`` takes ``(lam_x, lam_y) = (lambda1, lambda2)``, ``which="Q"`` the
reverse.  The curve ``y = Psi(x) = sum_{n>=2} gamma_n x^n`` is invariant when
``Psi(X(x, Psi(x))) == Y(x, Psi(x))``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import Poly2, Series1, compose1, eval_poly2_on_series, horner, substitute_linear
from .equation import CharacteristicData, EquationSpec
from .errors import ConditioningWarning, DomainWarning, ManifoldResonance, RepeatedRoot
from .particular import empirical_radius

log = logging.getLogger(__name__)

MANIFOLD_TOL = 1e-9
NEAR_RESONANCE = 1e-3


@dataclass(frozen=True)
class DiagonalSystem:
    which: str
    lam_x: complex
    lam_y: complex
    c: Poly2
    d: Poly2
    max_degree: int

    def X(self, x, y):
        return self.lam_x * x + self.c(x, y)

    def Y(self, x, y):
        return self.lam_y * y + self.d(x, y)

    def to_uw(self, x, y):
        return x + y, self.lam_x * x + self.lam_y * y

    def from_uw(self, u, w):
        det = self.lam_y - self.lam_x
        return (self.lam_y * u - w) / det, (w - self.lam_x * u) / det

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[1, 1], [self.lam_x, self.lam_y]], dtype=complex)

    @property
    def inverse_matrix(self) -> np.ndarray:
        det = self.lam_y - self.lam_x
        return np.array([[self.lam_y, -1], [-self.lam_x, 1]], dtype=complex) / det


def diagonalize(spec: EquationSpec, chars: CharacteristicData, which: str = "P",
                max_degree: int | None = None) -> DiagonalSystem:
    if which not in ("P", "Q"):
        raise ValueError("which must be 'P' or 'Q'")
    if chars.repeated:
        raise RepeatedRoot("lambda1 == lambda2: the linear part cannot be diagonalised")
    l1, l2 = complex(chars.lambda1), complex(chars.lambda2)
    lam_x, lam_y = (l1, l2) if which == "P" else (l2, l1)
    deg = max(2, spec.g.max_total_degree) if max_degree is None else max_degree
    # T^{-1} (0, g) = (-g, g) / (lam_y - lam_x)
    G = substitute_linear(spec.g, (1, 1), (lam_x, lam_y), deg)
    det = lam_y - lam_x
    return DiagonalSystem(which, lam_x, lam_y, G.scaled(-1 / det), G.scaled(1 / det), deg)


@dataclass(frozen=True)
class ManifoldSeries:
    """``Psi(x) = sum_{n=2}^{M} gamma_n x^n``; ``gammas.coef(1)`` is always 0."""

    gammas: Series1
    system: DiagonalSystem
    radius: float
    warnings: tuple[str, ...] = ()

    @property
    def M(self) -> int:
        return self.gammas.order

    def gamma(self, n: int):
        return self.gammas.coef(n)

    def __call__(self, x):
        return eval_psi(self, x)


def _divisor(sys: DiagonalSystem, n: int, tol: float, notes: list[str]):
    div = sys.lam_x**n - sys.lam_y
    if abs(div) < tol:
        raise ManifoldResonance(n, div)
    if abs(div) < NEAR_RESONANCE:
        msg = f"small divisor |lam_x^{n} - lam_y| = {abs(div):.3e}; gamma_{n} ill-conditioned"
        warnings.warn(msg, ConditioningWarning, stacklevel=3)
        notes.append(msg)
    return div


def _psi_full(sys: DiagonalSystem, M: int, tol: float, notes: list[str]) -> np.ndarray:
    gam = np.zeros(M + 1, dtype=complex)
    x = Series1.monomial(1, M)
    for n in range(2, M + 1):
        psi = Series1.from_dense(gam, M)
        Xs = x.scaled(sys.lam_x) + eval_poly2_on_series(sys.c, x, psi, M)
        Ys = psi.scaled(sys.lam_y) + eval_poly2_on_series(sys.d, x, psi, M)
        r = (Ys - compose1(psi, Xs, M)).coef(n)
        gam[n] = r / _divisor(sys, n, tol, notes)
    return gam


def _psi_incremental(sys: DiagonalSystem, M: int, tol: float, notes: list[str]) -> np.ndarray:
    # Column n of every auxiliary series only needs gamma_2 .. gamma_{n-1}.
    J = max([j for (_, j), _ in sys.c.items()] + [j for (_, j), _ in sys.d.items()] + [1])
    gam = np.zeros(M + 1, dtype=complex)
    P = np.zeros((J + 1, M + 1), dtype=complex)  # P[j] = Psi^j
    P[0, 0] = 1
    Xd = np.zeros(M + 1, dtype=complex)
    Q = np.zeros((M + 1, M + 1), dtype=complex)  # Q[k] = X^k
    Q[0, 0] = 1
    Xd[1] = sys.lam_x
    Q[1, 1] = sys.lam_x
    for n in range(2, M + 1):
        for j in range(2, J + 1):
            P[j, n] = np.dot(P[1, 2 : n - 1], P[j - 1, n - 2 : 1 : -1]) if n >= 4 else 0
        Xd[n] = sum(c * P[j, n - i] for (i, j), c in sys.c.items() if n - i >= 0)
        Q[1, n] = Xd[n]
        for k in range(2, n + 1):
            Q[k, n] = np.dot(Xd[1 : n - k + 2], Q[k - 1, n - 1 : k - 2 : -1])
        psi_x = np.dot(gam[2:n], Q[2:n, n])
        y_part = sum(c * P[j, n - i] for (i, j), c in sys.d.items() if n - i >= 0)
        gam[n] = (y_part - psi_x) / _divisor(sys, n, tol, notes)
        P[1, n] = gam[n]
    return gam


def solve_psi(sys: DiagonalSystem, M: int, tol: float = MANIFOLD_TOL,
              method: str = "full") -> ManifoldSeries:
    """Determine ``gamma_2 .. gamma_M`` order by order.

    With ``gamma_n`` provisionally zero the ``x**n`` coefficient ``r_n`` of
    ``Y(x, Psi) - Psi(X(x, Psi))`` is known, and ``gamma_n = r_n /
    (lam_x**n - lam_y)``.  ``method="full"`` recomposes the truncated series
    at every order; ``method="incremental"`` extends the power tables one
    column at a time.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    notes: list[str] = []
    if method == "full":
        gam = _psi_full(sys, M, tol, notes)
    elif method == "incremental":
        gam = _psi_incremental(sys, M, tol, notes)
    else:
        raise ValueError(f"unknown method {method!r}")
    gammas = Series1.from_dense(gam, M)
    return ManifoldSeries(gammas, sys, empirical_radius(gammas), tuple(notes))


def functional_residual(psi: ManifoldSeries, order: int | None = None) -> Series1:
    """Coefficients of ``Psi(X(x, Psi(x))) - Y(x, Psi(x))`` through ``x**order``."""
    order = psi.M if order is None else order
    sys = psi.system
    x = Series1.monomial(1, order)
    ps = psi.gammas.truncate(order)
    Xs = x.scaled(sys.lam_x) + eval_poly2_on_series(sys.c, x, ps, order)
    Ys = ps.scaled(sys.lam_y) + eval_poly2_on_series(sys.d, x, ps, order)
    return compose1(ps, Xs, order) - Ys


def eval_psi(psi: ManifoldSeries, x):
    if abs(x) > psi.radius:
        warnings.warn(f"|x| = {abs(x):.3e} beyond the empirical radius {psi.radius:.3e} of Psi",
                      DomainWarning, stacklevel=2)
    return horner(psi.gammas.coeffs, x)
