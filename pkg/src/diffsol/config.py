"""Flat sectioned key-value run configuration.

Format::

    # comments and blank lines are ignored
    [equation]
    alpha = -3.5,0
    beta = 1.5,0
    b = 0 2 1 0          # i j re im: the term (re + i*im) x^i y^j of g
    [solve]
    N = 16
    ...

Complex values are ``re,im`` pairs.  ``b`` (in ``[equation]``) and ``pi``
(``j re im`` in ``[general]``) may repeat.  :func:`dump_config` writes the
canonical form: fixed section and key order, numbers with 17 significant
digits, every key present except the optional ones left unset.  Parsing
canonical text and dumping it again reproduces it byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .algebra import Poly2
from .equation import EquationSpec, validate_spec
from .errors import BadDegree, ParseError, SemanticError, ValidationError


def fmt_real(x: float) -> str:
    s = format(float(x), ".17g")
    return "0" if s == "-0" else s


def fmt_complex(z: complex) -> str:
    z = complex(z)
    return f"{fmt_real(z.real)},{fmt_real(z.imag)}"


@dataclass(frozen=True)
class RunConfig:
    alpha: complex
    beta: complex
    g_terms: tuple[tuple[int, int, complex], ...]
    N: int = 16
    k_max: int = 64
    m: int = 1
    a1_1: complex = 1.0
    a1_2: complex = 1.0
    a_second: complex = 0.0
    radius_tol: float = 1e-8
    M: int | None = None
    pi_terms: tuple[tuple[int, complex], ...] = ()
    ratio_n: int = 40
    ratio_tol: float = 1e-6
    grid_base: complex | None = None
    grid_direction: complex | None = None
    grid_count: int = 16
    residual_tol: float = 1e-8
    oracle_tol: float = 1e-8
    depth: int = 20
    samples: int = 16
    output_path: str | None = None
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    def spec(self) -> EquationSpec:
        return EquationSpec(self.alpha, self.beta, Poly2({(i, j): c for i, j, c in self.g_terms}))

    def a1(self, m: int) -> complex:
        return self.a1_1 if m == 1 else self.a1_2

    @property
    def psi_order(self) -> int:
        return self.N if self.M is None else self.M


# key -> (section, kind)
_KEYS = {
    "alpha": ("equation", "complex"),
    "beta": ("equation", "complex"),
    "b": ("equation", "term"),
    "N": ("solve", "int"),
    "k_max": ("solve", "int"),
    "m": ("solve", "int"),
    "a1_1": ("solve", "complex"),
    "a1_2": ("solve", "complex"),
    "a_second": ("solve", "complex"),
    "radius_tol": ("solve", "real"),
    "M": ("psi", "int"),
    "pi": ("general", "fourier"),
    "ratio_n": ("general", "int"),
    "ratio_tol": ("general", "real"),
    "grid_base": ("verify", "complex"),
    "grid_direction": ("verify", "complex"),
    "grid_count": ("verify", "int"),
    "residual_tol": ("verify", "real"),
    "oracle_tol": ("verify", "real"),
    "depth": ("verify", "int"),
    "samples": ("verify", "int"),
    "path": ("output", "str"),
}
_SECTIONS = ("equation", "solve", "psi", "general", "verify", "output")
_REPEATED = {"b", "pi"}
_FIELD = {"path": "output_path"}

# lower bounds for integers, checked after parsing
_INT_MIN = {"N": 1, "k_max": 2, "M": 2, "ratio_n": 1, "grid_count": 1, "depth": 1, "samples": 8}


def _real(text: str, line: int, key: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise ParseError(line, key, f"not a number: {text!r}") from None
    if not math.isfinite(x):
        raise ParseError(line, key, f"not finite: {text!r}")
    return x


def _int(text: str, line: int, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(line, key, f"not an integer: {text!r}") from None


def _complex(text: str, line: int, key: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError(line, key, f"expected a complex pair 're,im', got {text!r}")
    return complex(_real(parts[0].strip(), line, key), _real(parts[1].strip(), line, key))


def _fields(text: str, n: int, line: int, key: str, shape: str) -> list[str]:
    parts = text.split()
    if len(parts) != n:
        raise ParseError(line, key, f"expected '{shape}', got {text!r}")
    return parts


def parse_config(text: str) -> RunConfig:
    """Parse and validate; errors name the offending line and key."""
    section = None
    seen_sections: set[str] = set()
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    terms: list[tuple[int, int, complex]] = []
    term_lines: list[int] = []
    pis: list[tuple[int, complex]] = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if body.startswith("["):
            if not body.endswith("]"):
                raise ParseError(no, body, "unterminated section header")
            name = body[1:-1].strip()
            if name not in _SECTIONS:
                raise ParseError(no, name, "unknown section")
            if name in seen_sections:
                raise ParseError(no, name, "duplicate section")
            seen_sections.add(name)
            section = name
            continue
        if "=" not in body:
            raise ParseError(no, body, "expected 'key = value'")
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in _KEYS:
            raise ParseError(no, key, "unknown key")
        want, kind = _KEYS[key]
        if section != want:
            raise ParseError(no, key, f"belongs in [{want}]")
        if key in lines and key not in _REPEATED:
            raise ParseError(no, key, f"duplicate key (first on line {lines[key]})")
        lines.setdefault(key, no)
        if kind == "term":
            i, j, re, im = _fields(value, 4, no, key, "i j re im")
            i, j = _int(i, no, key), _int(j, no, key)
            if i < 0 or j < 0:
                raise ParseError(no, key, "exponents must be >= 0")
            if any((i, j) == (a, b) for a, b, _ in terms):
                raise ParseError(no, key, f"duplicate term x^{i} y^{j}")
            if i + j < 2:
                raise SemanticError(no, key, BadDegree(f"g term x^{i} y^{j} has degree < 2"))
            terms.append((i, j, complex(_real(re, no, key), _real(im, no, key))))
            term_lines.append(no)
        elif kind == "fourier":
            j, re, im = _fields(value, 3, no, key, "j re im")
            j = _int(j, no, key)
            if any(j == a for a, _ in pis):
                raise ParseError(no, key, f"duplicate Fourier index {j}")
            pis.append((j, complex(_real(re, no, key), _real(im, no, key))))
        elif kind == "complex":
            values[key] = _complex(value, no, key)
        elif kind == "real":
            x = _real(value, no, key)
            if not x > 0:
                raise ParseError(no, key, "must be positive")
            values[key] = x
        elif kind == "int":
            n = _int(value, no, key)
            if n < _INT_MIN.get(key, n):
                raise ParseError(no, key, f"must be >= {_INT_MIN[key]}")
            values[key] = n
        else:
            if not value:
                raise ParseError(no, key, "empty value")
            values[key] = value
    for key in ("alpha", "beta"):
        if key not in values:
            raise ParseError(0, key, "missing required key")
    if "m" in values and values["m"] not in (1, 2):
        raise ParseError(lines["m"], "m", "must be 1 or 2")
    if values.get("grid_direction") == 0:
        raise ParseError(lines["grid_direction"], "grid_direction", "must be nonzero")
    kwargs = {_FIELD.get(k, k): v for k, v in values.items()}
    cfg = RunConfig(g_terms=tuple(terms), pi_terms=tuple(pis), lines=lines, **kwargs)
    try:
        validate_spec(cfg.spec())
    except ValidationError as exc:
        key = "beta" if type(exc).__name__ == "BetaZero" else "b"
        line = lines.get(key, term_lines[0] if term_lines else 0)
        raise SemanticError(line, key, exc) from exc
    return cfg


def dump_config(cfg: RunConfig) -> str:
    """Canonical text for ``cfg``; ``parse_config`` inverts it exactly."""
    out = ["[equation]", f"alpha = {fmt_complex(cfg.alpha)}", f"beta = {fmt_complex(cfg.beta)}"]
    for i, j, c in cfg.g_terms:
        c = complex(c)
        out.append(f"b = {i} {j} {fmt_real(c.real)} {fmt_real(c.imag)}")
    out += [
        "",
        "[solve]",
        f"N = {cfg.N}",
        f"k_max = {cfg.k_max}",
        f"m = {cfg.m}",
        f"a1_1 = {fmt_complex(cfg.a1_1)}",
        f"a1_2 = {fmt_complex(cfg.a1_2)}",
        f"a_second = {fmt_complex(cfg.a_second)}",
        f"radius_tol = {fmt_real(cfg.radius_tol)}",
        "",
        "[psi]",
    ]
    if cfg.M is not None:
        out.append(f"M = {cfg.M}")
    out += ["", "[general]"]
    for j, c in cfg.pi_terms:
        c = complex(c)
        out.append(f"pi = {j} {fmt_real(c.real)} {fmt_real(c.imag)}")
    out += [f"ratio_n = {cfg.ratio_n}", f"ratio_tol = {fmt_real(cfg.ratio_tol)}", "", "[verify]"]
    if cfg.grid_base is not None:
        out.append(f"grid_base = {fmt_complex(cfg.grid_base)}")
    if cfg.grid_direction is not None:
        out.append(f"grid_direction = {fmt_complex(cfg.grid_direction)}")
    out += [
        f"grid_count = {cfg.grid_count}",
        f"residual_tol = {fmt_real(cfg.residual_tol)}",
        f"oracle_tol = {fmt_real(cfg.oracle_tol)}",
        f"depth = {cfg.depth}",
        f"samples = {cfg.samples}",
        "",
        "[output]",
    ]
    if cfg.output_path is not None:
        out.append(f"path = {cfg.output_path}")
    return "\n".join(out) + "\n"
