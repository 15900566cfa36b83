"""Particular solutions ``u_m(t) = sum_n a_{m,n} lambda_m**(n*t)``.

Coefficients come from substituting the series into the equation and
matching powers of ``z = lambda**t``::

    a_k * D(lambda**k) = [z**k] g(U(z), U(lambda*z))

where ``U`` holds the already known ``a_1 .. a_{k-1}``.  When
``lambda_m**k`` hits the other root, ``D(lambda_m**k)`` vanishes and
:func:`solve_resonant` picks the branch.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np

from .algebra import Series1, cexp, clog, eval_poly2_on_series, horner, is_mp
from .equation import (
    RESONANCE_TOL,
    CharacteristicData,
    EquationSpec,
    ResonanceEntry,
    ResonanceReport,
    detect_resonance,
)
from .errors import (
    AmbiguousBranch,
    DegenerateSeries,
    DomainWarning,
    NoHyperbolicCase,
    NotARoot,
    NotResonant,
    OutsideDomain,
    SmallDivisor,
)

log = logging.getLogger(__name__)

SMALL_DIVISOR = 1e-9
DEFAULT_ORDER = 16
RADIUS_TOL = 1e-8
MAX_HALVINGS = 60


@dataclass(frozen=True)
class DomainSector:
    """``{t : |lambda**(stride*t)| <= eta}`` on the principal branch."""

    lam: complex
    eta: float
    stride: int = 1

    @property
    def log_z(self):
        return self.stride * clog(self.lam)

    def contains(self, t) -> bool:
        return float((self.log_z * t).real) <= math.log(self.eta) + 1e-12

    def ring_points(self, r: float, count: int, arg_center: float = 0.0,
                    arg_span: float = math.pi) -> list:
        """Points ``t`` with ``|lambda**(stride*t)| == r`` at evenly spread arguments."""
        lz = self.log_z
        if count == 1:
            thetas = [arg_center]
        elif arg_span >= math.pi:
            thetas = [arg_center - math.pi + 2 * math.pi * i / count for i in range(count)]
        else:
            thetas = [arg_center + arg_span * (2 * i / (count - 1) - 1) for i in range(count)]
        if is_mp(lz):
            return [(mpmath.log(r) + 1j * th) / lz for th in thetas]
        return [complex(math.log(r), th) / lz for th in thetas]


@dataclass(frozen=True)
class ParticularSolution:
    """A truncated particular solution.

    With ``stride == k > 1`` (second resonant branch) ``coeffs`` holds
    ``a_k, a_2k, ...`` as a series in ``w = lambda**(k*t)``; every other
    coefficient is zero.
    """

    m: int
    lam: complex
    coeffs: Series1
    eta: float
    stride: int = 1
    branch: str | None = None
    c_star: complex | None = None

    @property
    def N(self) -> int:
        return self.coeffs.order

    @property
    def sector(self) -> DomainSector:
        return DomainSector(self.lam, self.eta, self.stride)

    @property
    def log_z(self):
        return self.stride * clog(self.lam)

    def z(self, t):
        return cexp(self.log_z * t)

    def full_coeffs(self) -> list:
        """``a_1 .. a_{stride*N}`` with the zeros of a strided series filled in."""
        zero = mpmath.mpc(0) if is_mp(self.coeffs.coeffs) else 0j
        out = [zero] * (self.stride * self.N)
        for n, c in enumerate(self.coeffs.coeffs, start=1):
            out[self.stride * n - 1] = c
        return out

    def __call__(self, t):
        return eval_particular(self, t)


def _recurrence(spec: EquationSpec, lam, order: int, fixed: dict[int, object],
                small: float | None = None):
    """Run the order-by-order recurrence.

    Orders in ``fixed`` take the given value instead of ``numerator / D``.
    Returns the dense coefficient array (index k holds a_k) and the list of
    numerators ``[z**k] g(U, U_lambda)`` (index k).
    """
    mp_mode = is_mp(lam)
    zero = mpmath.mpc(0) if mp_mode else 0j
    small = SMALL_DIVISOR * max(1.0, float(abs(spec.beta))) if small is None else small
    a = np.array([zero] * (order + 1), dtype=object if mp_mode else complex)
    lam_pow = np.array([lam**n for n in range(order + 1)], dtype=a.dtype)
    numerators = [zero] * (order + 1)
    for k in range(1, order + 1):
        if k >= 2:
            u = Series1.from_dense(a, k)
            v = Series1.from_dense(a * lam_pow, k)
            numerators[k] = eval_poly2_on_series(spec.g, u, v, k).coef(k)
        if k in fixed:
            a[k] = mpmath.mpc(fixed[k]) if mp_mode else fixed[k]
            continue
        d = spec.D(lam_pow[k])
        if abs(d) < small:
            raise SmallDivisor(k, d)
        a[k] = numerators[k] / d
    return a, numerators


def _check_root(spec: EquationSpec, lam):
    if abs(spec.D(lam)) > SMALL_DIVISOR * max(1.0, float(abs(spec.beta)), float(abs(lam)) ** 2):
        raise NotARoot(f"{lam} is not a root of the characteristic equation")


def solve_coefficients(spec: EquationSpec, lam, a1=1.0, N: int = DEFAULT_ORDER) -> Series1:
    """``a_1 .. a_N`` for the root ``lam`` with free leading coefficient ``a1``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if a1 == 0:
        raise ValueError("a1 must be nonzero")
    _check_root(spec, lam)
    a, _ = _recurrence(spec, lam, N, {1: a1})
    return Series1.from_dense(a, N)


def substitution_defect(spec: EquationSpec, coeffs: Series1, lam, order: int | None = None) -> Series1:
    """Series of ``U(lam^2 z) + alpha U(lam z) + beta U(z) - g(U(z), U(lam z))``."""
    order = coeffs.order if order is None else order
    dense = coeffs.dense(order)
    pw = np.array([lam**n for n in range(order + 1)], dtype=dense.dtype)
    u = Series1.from_dense(dense, order)
    ul = Series1.from_dense(dense * pw, order)
    lin = Series1.from_dense(dense * (pw * pw + spec.alpha * pw + spec.beta), order)
    return lin - eval_poly2_on_series(spec.g, u, ul, order)


def c_star(spec: EquationSpec, lam, k: int):
    """Order-k numerator with ``a_1 = 1``, the constant ``C*_k``."""
    _, num = _recurrence(spec, lam, k, {1: 1.0, k: 0.0})
    return num[k]


def _c_star_tol(spec: EquationSpec, tol: float) -> float:
    scale = max([1.0] + [float(abs(c)) for _, c in spec.g.items()])
    return tol * scale


def classify_resonances(spec: EquationSpec, chars: CharacteristicData,
                        report: ResonanceReport) -> ResonanceReport:
    """Fill ``c_star`` on every entry of ``report``."""
    out = []
    for e in report.entries:
        try:
            c = c_star(spec, chars.lam(e.m), e.k)
        except SmallDivisor:
            out.append(e)
            continue
        zero = abs(c) <= _c_star_tol(spec, RESONANCE_TOL)
        out.append(ResonanceEntry(e.m, e.k, e.relevant, c, bool(zero)))
    return report.with_entries(out)


def solve_resonant(spec: EquationSpec, chars: CharacteristicData, entry: ResonanceEntry,
                   a_free=1.0, N: int = DEFAULT_ORDER, a_second=0.0,
                   tol: float = RESONANCE_TOL) -> ParticularSolution:
    """Particular solution for a root with ``lambda_m**k == lambda_other``.

    Branch A (``C* == 0``): ``a_1 = a_free`` and ``a_k = a_second`` are both
    free; ``N`` is the truncation order in ``z = lambda**t``.

    Branch B (``C* != 0``): ``a_1`` is forced to zero, ``a_k = a_free`` and
    only multiples of ``k`` survive; ``N`` counts the stored terms in
    ``w = lambda**(k*t)``.
    """
    m, k = entry.m, entry.k
    lam, target = chars.lam(m), chars.other(m)
    if abs(lam**k - target) > tol * abs(target):
        raise NotResonant(f"lambda{m}^{k} = {lam**k} is not lambda{m % 2 + 1} = {target}")
    if a_free == 0:
        raise ValueError("the free coefficient must be nonzero")
    cs = c_star(spec, lam, k)
    ctol = _c_star_tol(spec, tol)
    if abs(cs) <= ctol:
        a, _ = _recurrence(spec, lam, N, {1: a_free, k: a_second})
        coeffs = Series1.from_dense(a, N)
        branch, stride = "A", 1
    elif abs(cs) < 100 * ctol:
        raise AmbiguousBranch(
            f"|C*| = {float(abs(cs)):.3e} is too close to the zero threshold {ctol:.1e} "
            "to choose a branch"
        )
    else:
        a, _ = _recurrence(spec, lam, k * N, {1: 0.0, k: a_free})
        coeffs = Series1(list(a[k::k][:N]))
        branch, stride = "B", k
    eta = estimate_radius(coeffs, lam, spec, stride=stride)
    log.info("resonant root %d, k=%d: branch %s, C*=%s, eta=%.3g", m, k, branch, cs, eta)
    return ParticularSolution(m, lam, coeffs, eta, stride, branch, cs)


def empirical_radius(coeffs: Series1) -> float:
    """Root-test radius ``1 / max |a_n|**(1/n)`` over the top half of the orders."""
    n0 = max(2, coeffs.order // 2)
    best = 0.0
    for n in range(n0, coeffs.order + 1):
        c = float(abs(coeffs.coef(n)))
        if c > 0:
            best = max(best, math.exp(math.log(c) / n))
    return math.inf if best == 0 else 1.0 / best


def estimate_radius(coeffs: Series1, lam, spec: EquationSpec, stride: int = 1,
                    tol: float = RADIUS_TOL, angles: int = 16) -> float:
    """Working radius ``eta`` for the sector ``|lambda**t| <= eta``.

    Starts at ``0.5 * min(1, R)`` with ``R`` from :func:`empirical_radius`
    and halves until the equation residual on the ring ``|lambda**t| = eta``
    is at most ``tol``.  Heuristic: nothing here proves convergence.
    """
    from .verify import ring_residual

    if all(coeffs.coef(n) == 0 for n in range(2, coeffs.order + 1)):
        # in the stride variable w a unit shift in t multiplies w by lam**stride
        defect = substitution_defect(spec, coeffs, lam**stride)
        if max(float(abs(c)) for c in defect.coeffs) > 1e-10:
            raise DegenerateSeries(
                "all coefficients beyond a_1 vanish but g forces nonzero higher orders"
            )
    r_emp = empirical_radius(coeffs)
    eta = 0.5 * min(1.0, r_emp)
    sector = DomainSector(lam, eta, stride)

    def series(t):
        return horner(coeffs.coeffs, cexp(sector.log_z * t))

    for _ in range(MAX_HALVINGS):
        res, _ = ring_residual(spec, series, DomainSector(lam, eta, stride), eta, angles)
        if res <= tol:
            break
        eta /= 2
    else:
        warnings.warn(f"residual never fell below {tol:g}; eta={eta:.3e}", DomainWarning,
                      stacklevel=2)
    if eta < 1e-3:
        warnings.warn(f"tiny working radius eta={eta:.3e} (empirical radius {r_emp:.3e})",
                      DomainWarning, stacklevel=2)
    return float(eta)


def eval_particular(sol: ParticularSolution, t, check_domain: bool = True):
    """``sum_n a_n z**n`` with ``z = lambda**(stride*t)`` (principal branch)."""
    z = sol.z(t)
    if check_domain and abs(z) > sol.eta * (1 + 1e-12):
        raise OutsideDomain(f"|lambda^t| = {float(abs(z)):.6g} exceeds eta = {sol.eta:.6g} at t={t}")
    return horner(sol.coeffs.coeffs, z)


def particular_solution(spec: EquationSpec, chars: CharacteristicData, m: int,
                        N: int = DEFAULT_ORDER, a1=1.0, a_second=0.0,
                        report: ResonanceReport | None = None,
                        tol: float = RADIUS_TOL) -> ParticularSolution:
    """Solve for ``u_m``, routing to :func:`solve_resonant` when needed."""
    lam = chars.lam(m)
    if abs(abs(lam) - 1) <= 1e-9:
        raise NoHyperbolicCase(f"|lambda{m}| = 1: no decaying particular solution")
    report = detect_resonance(chars) if report is None else report
    entry = report.for_root(m)
    if entry is not None:
        return solve_resonant(spec, chars, entry, a_free=a1, N=N, a_second=a_second)
    coeffs = solve_coefficients(spec, lam, a1, N)
    eta = estimate_radius(coeffs, lam, spec, tol=tol)
    log.debug("root %d: lambda=%s, N=%d, eta=%.3g", m, lam, N, eta)
    return ParticularSolution(m, lam, coeffs, eta)
