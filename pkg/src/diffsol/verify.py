"""Independent numerical checks of computed solutions.

Nothing here reads series coefficients.  Every check works from an
evaluator ``t -> u(t)`` and the equation's own right-hand side, so agreement
is evidence rather than a restatement of the solver.

Residual convention: a point ``t`` on a ring is the *leading* point of the
triple used, i.e. the one with the largest ``|lambda**t|``.  For
``|lambda| < 1`` the triple is ``(t, t+1, t+2)``, otherwise
``(t-2, t-1, t)``.  Either way all three points lie in the sector whenever
the ring does.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import is_mp, working_eps
from .equation import EquationSpec
from .errors import NewtonDiverged, OutsideBox
from .particular import DomainSector

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
SLOPE_REL_TOL = 0.15
FLOOR_FACTOR = 32

Evaluator = Callable[[complex], complex]


@dataclass(frozen=True)
class VerificationReport:
    max_residual: float
    grid: str
    oracle_max_error: float | None
    bound_slope: float
    passed: bool
    notes: str = ""
    ring_radii: tuple[float, ...] = field(default=(), repr=False)
    ring_residuals: tuple[float, ...] = field(default=(), repr=False)

    def lines(self) -> list[str]:
        oracle = "nan" if self.oracle_max_error is None else f"{self.oracle_max_error:.17g}"
        return [
            f"max_residual={self.max_residual:.17g}",
            f"grid={self.grid}",
            f"oracle_max_error={oracle}",
            f"bound_slope={self.bound_slope:.17g}",
            f"passed={'true' if self.passed else 'false'}",
            f"notes={self.notes}",
        ]


@dataclass(frozen=True)
class BacksteppingContext:
    """Box ``|w|, |z| <= rho`` where ``s = phi(w, z)`` is trusted, and the
    growth constant ``K`` with ``|phi(w, z)| <= K (|w| + |z|)``."""

    rho: float
    K: float
    newton_tol: float = NEWTON_TOL
    newton_max_iter: int = NEWTON_MAX_ITER

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")


# -- backward step ------------------------------------------------------------

def _newton(spec: EquationSpec, w, z, tol: float, max_iter: int):
    s = (-z - spec.alpha * w) / spec.beta
    eps = working_eps(s if is_mp(s) else w)
    F = spec.f(s, w) - z
    for _ in range(max_iter):
        if F == 0:
            break
        dF = -spec.beta + spec.g.dx(s, w)
        step = F / dF
        damp = 1.0
        for _ in range(30):
            s_new = s - damp * step
            F_new = spec.f(s_new, w) - z
            if abs(F_new) <= abs(F):
                break
            damp /= 2
        else:
            break
        done = abs(s_new - s) <= 4 * eps * abs(s_new)
        s, F = s_new, F_new
        if done:
            break
    scale = max(1.0, float(abs(z)))
    if not abs(F) <= tol * scale:
        raise NewtonDiverged(f"no backward step for w={w}, z={z}: |residual|={float(abs(F)):.3e}")
    return s


def implicit_backstep(spec: EquationSpec, ctx: BacksteppingContext, w, z):
    """Solve ``z = f(s, w)`` for ``s`` near the equilibrium (damped Newton)."""
    if abs(w) > ctx.rho or abs(z) > ctx.rho:
        raise OutsideBox(f"|w|={float(abs(w)):.3e}, |z|={float(abs(z)):.3e} outside rho={ctx.rho:.3e}")
    s = _newton(spec, w, z, ctx.newton_tol, ctx.newton_max_iter)
    bound = ctx.K * float(abs(w) + abs(z))
    if float(abs(s)) > bound * (1 + 1e-9) + 1e-300:
        log.warning("backstep |s|=%.3e exceeds K(|w|+|z|)=%.3e", float(abs(s)), bound)
    return s


def estimate_backstep_context(spec: EquationSpec, probe: int = 8,
                              newton_tol: float = NEWTON_TOL,
                              max_iter: int = NEWTON_MAX_ITER) -> BacksteppingContext:
    """Largest dyadic box (at most 1) where Newton from the linear guess works.

    A probe point counts as working when Newton converges and the solution
    stays where ``df/ds`` is at least half its value at the origin, i.e. on
    the branch the implicit function theorem provides.
    """
    beta = abs(spec.beta)
    ring = [np.exp(2j * np.pi * k / probe) for k in range(probe)]
    rho = 1.0
    for _ in range(40):
        pts = [0.0] + [rho * c for c in ring] + [0.5 * rho * c for c in ring]
        ratios, ok = [], True
        for w in pts:
            for z in pts:
                try:
                    s = _newton(spec, complex(w), complex(z), newton_tol, max_iter)
                except NewtonDiverged:
                    ok = False
                    break
                if abs(-spec.beta + spec.g.dx(s, w)) < beta / 2:
                    ok = False
                    break
                if abs(w) + abs(z) > 0:
                    ratios.append(abs(s) / (abs(w) + abs(z)))
            if not ok:
                break
        if ok:
            return BacksteppingContext(rho, 1.1 * max(ratios), newton_tol, max_iter)
        rho /= 2
    raise NewtonDiverged("could not find a box where the backward step is well defined")


# -- residuals ----------------------------------------------------------------

def _triple(sector: DomainSector, t):
    if float(sector.log_z.real) < 0:
        return t, t + 1, t + 2
    return t - 2, t - 1, t


def point_residual(spec: EquationSpec, evaluator: Evaluator, sector: DomainSector, t):
    """Residual at the triple led by ``t`` and the magnitude scale for its roundoff."""
    t0, t1, t2 = _triple(sector, t)
    u0, u1, u2 = evaluator(t0), evaluator(t1), evaluator(t2)
    f = spec.f(u0, u1)
    scale = max(float(abs(u2)), float(abs(spec.beta * u0)), float(abs(spec.alpha * u1)),
                float(abs(f)))
    return float(abs(u2 - f)), scale, working_eps(u2 if is_mp(u2) else u0)


def ring_residual(spec: EquationSpec, evaluator: Evaluator, sector: DomainSector, r: float,
                  angles: int, arg_center: float = 0.0, arg_span: float = math.pi):
    """Max residual over one ring and the roundoff floor for that ring."""
    worst, floor = 0.0, 0.0
    for t in sector.ring_points(r, angles, arg_center, arg_span):
        res, scale, eps = point_residual(spec, evaluator, sector, t)
        worst = max(worst, res)
        floor = max(floor, FLOOR_FACTOR * eps * scale)
    return worst, floor


def residual_scan(spec: EquationSpec, evaluator: Evaluator, sector: DomainSector,
                  samples: int = 16, *, order: int | None = None, tol: float = RESIDUAL_TOL,
                  rings: int = 8, arg_center: float = 0.0,
                  arg_span: float = math.pi) -> VerificationReport:
    """Residual of the equation on log-spaced rings ``|lambda**t| = r <= eta``.

    ``samples`` points per ring.  With ``order`` given, the slope of
    log-residual against log r is fitted over the rings whose residual sits
    clearly above roundoff and must reach ``(order + 1) * (1 - 0.15)``.  If
    fewer than four rings qualify the fit is skipped (slope NaN) and only the
    magnitude is checked.
    """
    if samples < 8:
        raise ValueError("samples must be >= 8")
    eta = sector.eta
    top, top_floor = ring_residual(spec, evaluator, sector, eta, samples, arg_center, arg_span)
    r_lo = eta / 4
    if order is not None and top > 100 * top_floor:
        bottom = max(100 * top_floor, top * 1e-6)
        r_lo = eta * (bottom / top) ** (1.0 / (order + 1))
    radii = np.geomspace(r_lo, eta, rings)
    res, floors = [], []
    for r in radii[:-1]:
        w, fl = ring_residual(spec, evaluator, sector, float(r), samples, arg_center, arg_span)
        res.append(w)
        floors.append(fl)
    res.append(top)
    floors.append(top_floor)
    use = [i for i in range(rings) if res[i] > 10 * floors[i]]
    notes = []
    slope = math.nan
    if order is not None and len(use) >= 4:
        slope = float(np.polyfit(np.log(radii[use]), np.log(np.array(res)[use]), 1)[0])
    elif order is not None:
        notes.append("slope fit skipped: residual at roundoff floor")
    max_res = max(res)
    passed = max_res <= tol
    if order is not None and not math.isnan(slope):
        need = (order + 1) * (1 - SLOPE_REL_TOL)
        if slope < need:
            passed = False
            notes.append(f"slope {slope:.3f} below {need:.3f}")
    if max_res > tol:
        notes.append(f"max residual {max_res:.3e} above {tol:.1e}")
    grid = (f"rings={rings} samples={samples} r=[{r_lo:.6g},{eta:.6g}] "
            f"arg=[{arg_center - arg_span:.6g},{arg_center + arg_span:.6g}]")
    return VerificationReport(
        max_residual=max_res,
        grid=grid,
        oracle_max_error=None,
        bound_slope=slope,
        passed=bool(passed),
        notes="; ".join(notes),
        ring_radii=tuple(float(r) for r in radii),
        ring_residuals=tuple(res),
    )


# -- iteration oracle ---------------------------------------------------------

def iteration_oracle(spec: EquationSpec, evaluator: Evaluator, t0, depth: int,
                     sector: DomainSector, ctx: BacksteppingContext | None = None) -> float:
    """Max deviation between the evaluator and exact iteration of the equation.

    Seeds two consecutive values at the end of ``t0 .. t0 +- depth`` closest
    to the equilibrium and walks back to ``t0``: with ``|lambda| < 1`` by the
    backward step ``s = phi(w, z)`` over ``t0 + depth .. t0``, otherwise by
    the forward map over ``t0 - depth .. t0``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if float(sector.log_z.real) < 0:
        ctx = estimate_backstep_context(spec) if ctx is None else ctx
        ts = [t0 + n for n in range(depth + 2)]
        ref = [evaluator(t) for t in ts]
        x = list(ref)
        for n in range(depth - 1, -1, -1):
            x[n] = implicit_backstep(spec, ctx, x[n + 1], x[n + 2])
    else:
        ts = [t0 - depth + n for n in range(depth + 1)]
        ref = [evaluator(t) for t in ts]
        x = list(ref)
        for n in range(2, depth + 1):
            x[n] = spec.f(x[n - 2], x[n - 1])
    return max(float(abs(a - b)) for a, b in zip(x, ref))


def verify_solution(spec: EquationSpec, evaluator: Evaluator, sector: DomainSector, *,
                    order: int | None = None, tol: float = RESIDUAL_TOL,
                    oracle_tol: float | None = None, depth: int = 20, samples: int = 16,
                    rings: int = 8, ctx: BacksteppingContext | None = None,
                    arg_center: float = 0.0, arg_span: float = math.pi) -> VerificationReport:
    """Residual scan plus the iteration oracle started at ``|lambda**t0| = eta/4``."""
    report = residual_scan(spec, evaluator, sector, samples, order=order, tol=tol,
                           rings=rings, arg_center=arg_center, arg_span=arg_span)
    oracle_tol = tol if oracle_tol is None else oracle_tol
    t0 = sector.ring_points(sector.eta / 4, 1, arg_center)[0]
    err = iteration_oracle(spec, evaluator, t0, depth, sector, ctx)
    notes = [report.notes] if report.notes else []
    if err > oracle_tol:
        notes.append(f"oracle error {err:.3e} above {oracle_tol:.1e}")
    return VerificationReport(
        max_residual=report.max_residual,
        grid=report.grid + f" oracle_depth={depth}",
        oracle_max_error=err,
        bound_slope=report.bound_slope,
        passed=bool(report.passed and err <= oracle_tol),
        notes="; ".join(notes),
        ring_radii=report.ring_radii,
        ring_residuals=report.ring_residuals,
    )
