"""Command-line front end.

    diffsol <subcommand> --config PATH [--out PATH] [--n ORDER] [--quiet]

Exit status: 0 success, 1 invalid input, 2 numeric failure or failed check.
The log level comes from ``DIFFSOL_LOG_LEVEL`` (falling back to
``TOOL_LOG_LEVEL``): one of error, warn, info, debug.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import tempfile
import warnings
from dataclasses import replace

from .config import RunConfig, fmt_complex, fmt_real, parse_config
from .equation import CharacteristicData, characteristic_roots, detect_resonance
from .errors import DiffSolError, NumericError, ValidationError
from .general import GeneralSolutionSpec, PeriodicFunction, build_general, check_grid, ratio_limit_check
from .manifold import diagonalize, functional_residual, solve_psi
from .particular import ParticularSolution, classify_resonances, particular_solution
from .verify import point_residual, verify_solution

log = logging.getLogger("diffsol")

SUBCOMMANDS = ("roots", "solve", "resonance", "psi", "general", "verify", "orbit-csv")
LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2
GENERAL_ARG_SPAN = 0.2


class CheckFailed(Exception):
    def __init__(self, text: str, why: str):
        super().__init__(why)
        self.text = text


def fmt_z(z) -> str:
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{fmt_real(z.real)}{sign}{fmt_real(abs(z.imag))}i"


def _bool(x: bool) -> str:
    return "true" if x else "false"


# -- pipelines ----------------------------------------------------------------

def _particular(cfg: RunConfig, chars: CharacteristicData) -> ParticularSolution:
    report = detect_resonance(chars, cfg.k_max)
    return particular_solution(cfg.spec(), chars, cfg.m, N=cfg.N, a1=cfg.a1(cfg.m),
                               a_second=cfg.a_second, report=report, tol=cfg.radius_tol)


def _general(cfg: RunConfig, chars: CharacteristicData) -> GeneralSolutionSpec:
    return build_general(cfg.spec(), chars, cfg.m, N=cfg.N, M=cfg.psi_order,
                         pi=PeriodicFunction(cfg.pi_terms), a1=cfg.a1(cfg.m))


def cmd_roots(cfg: RunConfig) -> str:
    ch = characteristic_roots(cfg.spec())
    return "\n".join([
        f"lambda1={fmt_z(ch.lambda1)}",
        f"lambda2={fmt_z(ch.lambda2)}",
        f"|lambda1|={fmt_real(abs(ch.lambda1))}",
        f"|lambda2|={fmt_real(abs(ch.lambda2))}",
        f"case_i={'available' if ch.case_i_available else 'unavailable'}",
        f"case_ii={'available' if ch.case_ii_available else 'unavailable'}",
    ]) + "\n"


def cmd_resonance(cfg: RunConfig) -> str:
    spec = cfg.spec()
    ch = characteristic_roots(spec)
    report = classify_resonances(spec, ch, detect_resonance(ch, cfg.k_max))
    out = [f"k_max={report.k_max_scanned}", f"entries={len(report.entries)}"]
    for e in report.entries:
        if e.c_star is None:
            branch, cs = "unknown", "nan"
        else:
            branch, cs = ("A" if e.c_star_zero else "B"), fmt_z(e.c_star)
        out.append(f"entry m={e.m} k={e.k} relevant={_bool(e.relevant)} branch={branch} c_star={cs}")
    out += [f"warning={w}" for w in report.warnings]
    return "\n".join(out) + "\n"


def cmd_solve(cfg: RunConfig) -> str:
    ch = characteristic_roots(cfg.spec())
    sol = _particular(cfg, ch)
    out = [
        f"m={sol.m}",
        f"lambda={fmt_z(sol.lam)}",
        f"branch={sol.branch or 'none'}",
        f"stride={sol.stride}",
        f"N={sol.N}",
        f"eta={fmt_real(sol.eta)}",
    ]
    out += [f"a[{sol.stride * n}]={fmt_complex(sol.coeffs.coef(n))}" for n in range(1, sol.N + 1)]
    return "\n".join(out) + "\n"


def cmd_psi(cfg: RunConfig) -> str:
    ch = characteristic_roots(cfg.spec())
    which = "P" if cfg.m == 1 else "Q"
    psi = solve_psi(diagonalize(cfg.spec(), ch, which), cfg.psi_order)
    res = max(abs(complex(c)) for c in functional_residual(psi).coeffs)
    out = [f"system={which}", f"M={psi.M}", f"radius={fmt_real(psi.radius)}",
           f"functional_residual={fmt_real(res)}"]
    out += [f"gamma[{n}]={fmt_complex(psi.gamma(n))}" for n in range(2, psi.M + 1)]
    out += [f"warning={w}" for w in psi.warnings]
    return "\n".join(out) + "\n"


def cmd_general(cfg: RunConfig) -> str:
    ch = characteristic_roots(cfg.spec())
    gs = _general(cfg, ch)
    sec = gs.sector()
    t0 = sec.ring_points(sec.eta / 2, 1)[0]
    ratios = ratio_limit_check(gs, t0, cfg.ratio_n)
    err = abs(ratios[-1] - gs.lam)
    passed = err <= cfg.ratio_tol
    text = "\n".join([
        f"m={gs.m}",
        f"lambda={fmt_z(gs.lam)}",
        f"sector_eta={fmt_real(sec.eta)}",
        f"t0={fmt_z(t0)}",
        f"ratio_n={cfg.ratio_n}",
        f"ratio_last={fmt_z(ratios[-1])}",
        f"ratio_error={fmt_real(err)}",
        f"passed={_bool(passed)}",
    ]) + "\n"
    if not passed:
        raise CheckFailed(text, f"ratio error {err:.3e} above {cfg.ratio_tol:.1e}")
    return text


def cmd_verify(cfg: RunConfig) -> str:
    spec = cfg.spec()
    ch = characteristic_roots(spec)
    sol = _particular(cfg, ch)
    blocks, ok = [], True
    rep = verify_solution(spec, sol, sol.sector, order=sol.N, tol=cfg.residual_tol,
                          oracle_tol=cfg.oracle_tol, depth=cfg.depth, samples=cfg.samples)
    blocks.append([f"target=particular m={sol.m}"] + rep.lines())
    ok &= rep.passed
    if cfg.pi_terms:
        gs = _general(cfg, ch)
        rep = verify_solution(spec, gs, gs.sector(), tol=cfg.residual_tol,
                              oracle_tol=cfg.oracle_tol, depth=cfg.depth, samples=cfg.samples,
                              arg_span=GENERAL_ARG_SPAN)
        blocks.append([f"target=general m={gs.m}"] + rep.lines())
        ok &= rep.passed
    text = "\n\n".join("\n".join(b) for b in blocks) + "\n"
    if not ok:
        raise CheckFailed(text, "verification failed")
    return text


def orbit_grid(cfg: RunConfig, sector) -> list[complex]:
    """``t_n = base + n * direction``; defaults start on ``|lambda**t| = eta/2``
    and step toward the equilibrium."""
    base = cfg.grid_base
    if base is None:
        base = complex(sector.ring_points(sector.eta / 2, 1)[0])
    d = cfg.grid_direction
    if d is None:
        d = 1.0 if float(sector.log_z.real) < 0 else -1.0
    return [base + n * d for n in range(cfg.grid_count)]


def orbit_rows(cfg: RunConfig) -> list[tuple[float, float, float, float, float]]:
    """Orbit of the general solution when ``pi`` terms are given, else of
    the particular solution, with the equation residual at each point."""
    spec = cfg.spec()
    ch = characteristic_roots(spec)
    if cfg.pi_terms:
        gs = _general(cfg, ch)
        evaluator, sector = gs, gs.sector()
        check_grid(gs, orbit_grid(cfg, sector))
    else:
        sol = _particular(cfg, ch)
        evaluator, sector = sol, sol.sector
    rows = []
    for t in orbit_grid(cfg, sector):
        u = complex(evaluator(t))
        res, _, _ = point_residual(spec, evaluator, sector, t)
        rows.append((t.real, t.imag, u.real, u.imag, res))
    return rows


def cmd_orbit_csv(cfg: RunConfig) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_re", "t_im", "u_re", "u_im", "residual"])
    for row in orbit_rows(cfg):
        w.writerow([fmt_real(x) for x in row])
    return buf.getvalue()


COMMANDS = {
    "roots": cmd_roots,
    "solve": cmd_solve,
    "resonance": cmd_resonance,
    "psi": cmd_psi,
    "general": cmd_general,
    "verify": cmd_verify,
    "orbit-csv": cmd_orbit_csv,
}


# -- output -------------------------------------------------------------------

def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".diffsol-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None, quiet: bool, stdout) -> None:
    if out:
        write_atomic(out, text)
    elif not quiet:
        stdout.write(text)


def run(cfg: RunConfig, subcommand: str, *, out: str | None = None, quiet: bool = False,
        stdout=None, stderr=None) -> int:
    """Run one subcommand and return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    out = out or cfg.output_path
    log.info("%s: N=%d m=%d", subcommand, cfg.N, cfg.m)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            logging.captureWarnings(True)
            try:
                text = COMMANDS[subcommand](cfg)
            finally:
                logging.captureWarnings(False)
    except CheckFailed as exc:
        # failed reports are still useful; only numeric crashes lose output
        _emit(exc.text, out, quiet, stdout)
        print(f"diffsol: check failed: {exc}", file=stderr)
        return EXIT_NUMERIC
    except ValidationError as exc:
        print(f"diffsol: error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INVALID
    except (NumericError, ArithmeticError) as exc:
        print(f"diffsol: numeric failure: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERIC
    _emit(text, out, quiet, stdout)
    return EXIT_OK


def _log_level() -> int:
    name = os.environ.get("DIFFSOL_LOG_LEVEL") or os.environ.get("TOOL_LOG_LEVEL") or "warn"
    return LOG_LEVELS.get(name.strip().lower(), logging.WARNING)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diffsol", description=__doc__.split("\n\n")[0])
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, help="run configuration file")
    p.add_argument("--out", help="write the result here instead of stdout")
    p.add_argument("--n", type=int, help="override the series order N")
    p.add_argument("--quiet", action="store_true", help="no report on stdout")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=_log_level(), format="%(levelname)s %(name)s: %(message)s")
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        cfg = parse_config(text)
        if args.n is not None:
            if args.n < 1:
                raise ValidationError(f"--n must be >= 1, got {args.n}")
            cfg = replace(cfg, N=args.n)
    except OSError as exc:
        print(f"diffsol: error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DiffSolError as exc:
        print(f"diffsol: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(cfg, args.subcommand, out=args.out, quiet=args.quiet)


if __name__ == "__main__":
    sys.exit(main())
