"""The equation ``u(t+2) = -beta*u(t) - alpha*u(t+1) + g(u(t), u(t+1))``.

Holds the equation data, its characteristic roots and the resonance scan.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import mpmath

from .algebra import Poly2, csqrt, is_mp
from .errors import BadDegree, BetaZero, GNontrivial, NoHyperbolicCase

log = logging.getLogger(__name__)

HYPERBOLIC_TOL = 1e-9
RESONANCE_TOL = 1e-9
NEAR_RESONANCE = 1e-3


@dataclass(frozen=True)
class EquationSpec:
    alpha: complex
    beta: complex
    g: Poly2 = field(default_factory=Poly2)

    def __post_init__(self):
        if not is_mp(self.alpha):
            object.__setattr__(self, "alpha", complex(self.alpha))
        if not is_mp(self.beta):
            object.__setattr__(self, "beta", complex(self.beta))
        if not isinstance(self.g, Poly2):
            object.__setattr__(self, "g", Poly2(self.g))

    def f(self, x, y):
        """Right-hand side: ``u(t+2) = f(u(t), u(t+1))``."""
        return -self.beta * x - self.alpha * y + self.g(x, y)

    def D(self, lam):
        """Characteristic polynomial ``lam**2 + alpha*lam + beta``."""
        return lam * lam + self.alpha * lam + self.beta

    def residual(self, u0, u1, u2):
        return abs(u2 - self.f(u0, u1))

    def to_mp(self) -> "EquationSpec":
        """Same equation with mpmath coefficients (ambient precision)."""
        return EquationSpec(mpmath.mpc(self.alpha), mpmath.mpc(self.beta), self.g.to_mp())

    @classmethod
    def from_roots(cls, lam1, lam2, g: Poly2) -> "EquationSpec":
        return cls(-(lam1 + lam2), lam1 * lam2, g)


def validate_spec(spec: EquationSpec) -> EquationSpec:
    if spec.beta == 0:
        raise BetaZero("beta must be nonzero (the backward step needs df/dx(0,0) = -beta != 0)")
    for (i, j), _ in spec.g.items():
        if i + j < 2:
            raise BadDegree(f"g term x^{i} y^{j} has degree < 2")
    if not spec.g:
        raise GNontrivial("g must not vanish identically")
    return spec


@dataclass(frozen=True)
class CharacteristicData:
    lambda1: complex
    lambda2: complex
    case_i_available: bool
    case_ii_available: bool

    def lam(self, m: int):
        if m not in (1, 2):
            raise ValueError("m must be 1 or 2")
        return self.lambda1 if m == 1 else self.lambda2

    def other(self, m: int):
        """The root with index ``m + 1`` (``lambda_3`` means ``lambda_1``)."""
        return self.lam(m % 2 + 1)

    @property
    def hyperbolic_saddle(self) -> bool:
        return self.case_i_available and self.case_ii_available

    @property
    def repeated(self) -> bool:
        scale = max(abs(self.lambda1), abs(self.lambda2))
        return abs(self.lambda1 - self.lambda2) <= 1e-12 * scale


def characteristic_roots(spec: EquationSpec) -> CharacteristicData:
    """Roots of ``lam**2 + alpha*lam + beta``, ordered ``|lambda1| <= |lambda2|``.

    Moduli within 1e-12 relative count as equal and are ordered by (real, imag).  The larger root comes from the
    cancellation-free branch and the smaller one from ``beta / larger``.
    """
    a, b = spec.alpha, spec.beta
    if b == 0:
        raise BetaZero("beta must be nonzero")
    sq = csqrt(a * a - 4 * b)
    # pick the sign that avoids cancellation in alpha + sign*sq
    if (a.conjugate() * sq).real < 0:
        sq = -sq
    big = -(a + sq) / 2
    small = b / big
    r1, r2 = sorted((small, big), key=lambda z: abs(z))
    m1, m2 = abs(r1), abs(r2)
    if abs(m1 - m2) <= 1e-12 * max(m1, m2):
        r1, r2 = sorted((r1, r2), key=lambda z: (float(z.real), float(z.imag)))
        m1, m2 = abs(r1), abs(r2)
    case_i = m1 < 1 - HYPERBOLIC_TOL
    case_ii = m2 > 1 + HYPERBOLIC_TOL
    if not (case_i or case_ii):
        raise NoHyperbolicCase(
            f"|lambda1| = {float(m1):.6g}, |lambda2| = {float(m2):.6g}: neither "
            "|lambda1| < 1 nor |lambda2| > 1"
        )
    return CharacteristicData(r1, r2, bool(case_i), bool(case_ii))


@dataclass(frozen=True)
class ResonanceEntry:
    """``lambda_m**k == lambda_other``.

    ``relevant`` marks the modulus regimes where the resonance obstructs the
    series for root ``m`` (``|lambda2| < 1`` for m=2, ``|lambda1| > 1`` for
    m=1); other hits are informational.  ``c_star`` stays ``None`` until the
    particular-solution solver has evaluated the order-k numerator.
    """

    m: int
    k: int
    relevant: bool = True
    c_star: complex | None = None
    c_star_zero: bool | None = None


@dataclass(frozen=True)
class ResonanceReport:
    entries: tuple[ResonanceEntry, ...]
    k_max_scanned: int
    warnings: tuple[str, ...] = ()

    def for_root(self, m: int) -> ResonanceEntry | None:
        for e in self.entries:
            if e.m == m and e.relevant:
                return e
        return None

    def with_entries(self, entries) -> "ResonanceReport":
        return replace(self, entries=tuple(entries))


def detect_resonance(chars: CharacteristicData, k_max: int = 64,
                     tol: float = RESONANCE_TOL) -> ResonanceReport:
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    entries, warns = [], []
    for m in (1, 2):
        lam, target = chars.lam(m), chars.other(m)
        mod, tmod = abs(lam), abs(target)
        relevant = (m == 2 and abs(chars.lambda2) < 1) or (m == 1 and abs(chars.lambda1) > 1)
        p = lam
        for k in range(2, k_max + 1):
            p = p * lam
            rel = abs(p - target) / tmod
            if rel <= tol:
                entries.append(ResonanceEntry(m, k, relevant))
            elif rel < NEAR_RESONANCE:
                warns.append(
                    f"near resonance lambda{m}^{k} ~ lambda{m % 2 + 1} "
                    f"(relative gap {float(rel):.3e}); coefficients may be inflated"
                )
            # powers only move away from the target once past it
            if (mod > 1 and abs(p) > 2 * tmod) or (mod < 1 and abs(p) < tmod / 2):
                break
    for w in warns:
        log.warning(w)
    return ResonanceReport(tuple(entries), k_max, tuple(warns))
