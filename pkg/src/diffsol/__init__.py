"""Analytic solutions of ``u(t+2) = f(u(t), u(t+1))`` near an equilibrium.

Power series in ``lambda**t`` for the particular solutions, the invariant
curve of the diagonalised map, general solutions built from both, and
numerical checks that never look at the coefficients.
"""

from .algebra import Poly2, Series1
from .config import RunConfig, dump_config, parse_config
from .equation import (
    CharacteristicData,
    EquationSpec,
    ResonanceEntry,
    ResonanceReport,
    characteristic_roots,
    detect_resonance,
    validate_spec,
)
from .errors import (
    DiffSolError, ValidationError, NumericError, BetaZero, GNontrivial, BadDegree,
    NotARoot, NoHyperbolicCase, RepeatedRoot, ParseError, SemanticError, SmallDivisor,
    NotResonant, AmbiguousBranch, DegenerateSeries, OutsideDomain, ManifoldResonance,
    NewtonDiverged, OutsideBox, DivisionNearZero, DomainWarning, ConditioningWarning,
)
from .general import (
    GeneralSolutionSpec,
    PeriodicFunction,
    build_general,
    eval_general,
    ratio_limit_check,
)
from .manifold import DiagonalSystem, ManifoldSeries, diagonalize, functional_residual, solve_psi
from .particular import (
    DomainSector,
    ParticularSolution,
    classify_resonances,
    estimate_radius,
    eval_particular,
    particular_solution,
    solve_coefficients,
    solve_resonant,
)
from .verify import VerificationReport, iteration_oracle, residual_scan, verify_solution

__version__ = "0.1.0"
