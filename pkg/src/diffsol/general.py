"""General solutions decaying along one root, parameterised by a periodic function.

For ``|lambda1| < 1 < |lambda2|`` and ``m`` in ``{1, 2}``::

    chi(t) = (lam_o * u_m(s) - u_m(s + 1)) / (lam_o - lam_m),   s = t + pi(t)
    Upsilon(t) = chi(t) + Psi_m(chi(t))

where ``lam_o`` is the other root and ``Psi_1`` / ``Psi_2`` are the invariant
curves of the ``P`` / ``Q`` diagonal systems.  Any period-1 ``pi`` gives a
solution; ``Upsilon(t + n) -> 0`` for ``m = 1`` and ``Upsilon(t - n) -> 0``
for ``m = 2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .equation import CharacteristicData, EquationSpec
from .errors import DivisionNearZero, NoHyperbolicCase, OutsideDomain, RepeatedRoot, ValidationError
from .manifold import ManifoldSeries, diagonalize, eval_psi, solve_psi
from .particular import DomainSector, ParticularSolution, eval_particular, particular_solution

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class PeriodicFunction:
    """``pi(t) = sum_j c_j exp(2 pi i j t)``, a finite Fourier sum."""

    terms: tuple[tuple[int, complex], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((int(j), complex(c)) for j, c in self.terms))

    def __call__(self, t):
        return sum((c * cmath.exp(TWO_PI_I * j * t) for j, c in self.terms), 0j)

    def shifted(self, s: float) -> "PeriodicFunction":
        """The function ``t -> pi(t + s)``."""
        return PeriodicFunction(tuple((j, c * cmath.exp(TWO_PI_I * j * s)) for j, c in self.terms))

    @classmethod
    def constant(cls, c: complex) -> "PeriodicFunction":
        return cls(((0, c),))


@dataclass(frozen=True)
class GeneralSolutionSpec:
    m: int
    particular: ParticularSolution
    psi: ManifoldSeries
    pi: PeriodicFunction
    chars: CharacteristicData

    def __post_init__(self):
        if self.m not in (1, 2):
            raise ValidationError("m must be 1 or 2")
        if self.particular.m != self.m:
            raise ValidationError(f"particular solution is for root {self.particular.m}, not {self.m}")
        if self.particular.stride != 1:
            raise ValidationError("general solutions need a stride-1 particular solution")
        want = "P" if self.m == 1 else "Q"
        if self.psi.system.which != want:
            raise ValidationError(f"root {self.m} needs the {want} diagonal system")
        if self.chars.repeated:
            raise RepeatedRoot("general solutions need distinct roots")

    @property
    def lam(self):
        return self.chars.lam(self.m)

    @property
    def lam_other(self):
        return self.chars.other(self.m)

    @property
    def direction(self) -> int:
        """+1 if the solution decays under forward shifts, -1 for backward."""
        return 1 if self.m == 1 else -1

    def sector(self, shrink: float = 0.5) -> DomainSector:
        """Sector where ``chi`` is defined when ``pi`` is small, scaled by ``shrink``.

        ``chi`` reads ``u_m`` at ``s`` and ``s + 1``; for ``m = 2`` the second
        point lies a factor ``|lambda2|`` further out.
        """
        eta = self.particular.eta * shrink
        if self.m == 2:
            eta /= abs(self.lam)
        return DomainSector(self.lam, eta)

    def __call__(self, t):
        return eval_general(self, t)


def build_general(spec: EquationSpec, chars: CharacteristicData, m: int, *, N: int = 16,
                  M: int | None = None, pi: PeriodicFunction | None = None,
                  a1=1.0) -> GeneralSolutionSpec:
    """Particular solution, invariant curve and ``pi`` assembled for root ``m``."""
    if not chars.hyperbolic_saddle:
        raise NoHyperbolicCase("general solutions need |lambda1| < 1 < |lambda2|")
    sol = particular_solution(spec, chars, m, N=N, a1=a1)
    system = diagonalize(spec, chars, "P" if m == 1 else "Q")
    psi = solve_psi(system, N if M is None else M)
    return GeneralSolutionSpec(m, sol, psi, pi or PeriodicFunction(), chars)


def build_chi(gspec: GeneralSolutionSpec, t):
    s = t + gspec.pi(t)
    lo, lm = gspec.lam_other, gspec.lam
    try:
        u0 = eval_particular(gspec.particular, s)
        u1 = eval_particular(gspec.particular, s + 1)
    except OutsideDomain as exc:
        raise OutsideDomain(f"t + pi(t) = {s} leaves S(eta) for t = {t}: {exc}") from exc
    return (lo * u0 - u1) / (lo - lm)


def eval_general(gspec: GeneralSolutionSpec, t):
    chi = build_chi(gspec, t)
    return chi + eval_psi(gspec.psi, chi)


def check_grid(gspec: GeneralSolutionSpec, ts) -> None:
    """Raise :class:`OutsideDomain` naming the first ``t`` that ``pi`` pushes out."""
    sector = gspec.particular.sector
    for t in ts:
        s = t + gspec.pi(t)
        lead = s + 1 if gspec.m == 2 else s
        if not sector.contains(lead):
            z = abs(cmath.exp(sector.log_z * lead))
            raise OutsideDomain(
                f"pi pushes t + pi(t) outside S(eta) at t = {t}: |lambda^(t+pi(t))| "
                f"= {z:.6g} > eta = {sector.eta:.6g} (pi(t) = {gspec.pi(t)})"
            )


def ratio_limit_check(gspec: GeneralSolutionSpec, t0, n_max: int = 40) -> list[complex]:
    """Ratios ``Upsilon(t0 + 1 + d*n) / Upsilon(t0 + d*n)`` for ``n = 1..n_max``,
    ``d = +1`` for ``m = 1`` and ``-1`` for ``m = 2``; they tend to ``lambda_m``."""
    d = gspec.direction
    ratios: list[complex] = []
    for n in range(1, n_max + 1):
        den = eval_general(gspec, t0 + d * n)
        num = eval_general(gspec, t0 + 1 + d * n)
        if abs(den) < 1e-300:
            raise DivisionNearZero(f"Upsilon underflowed at n = {n}", ratios)
        ratios.append(num / den)
    return ratios
