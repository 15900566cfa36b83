"""Truncated power series in one variable and bivariate polynomials.

Every series here vanishes at the origin, so :class:`Series1` stores the
coefficients of ``z**1 .. z**N`` only.  Arithmetic runs in complex double
precision by default.  If coefficients are :class:`mpmath.mpc` values the same
code runs at the ambient ``mpmath`` precision (set it with
``mpmath.workdps``); results stay in that number type.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Iterable, Mapping

import mpmath
import numpy as np

from .errors import BadDegree

__all__ = [
    "Series1",
    "Poly2",
    "mul1",
    "eval_poly2_on_series",
    "compose1",
    "substitute_linear",
    "horner",
    "is_mp",
    "cexp",
    "clog",
    "csqrt",
    "working_eps",
]


# -- scalar helpers ----------------------------------------------------------

def is_mp(x) -> bool:
    if isinstance(x, np.ndarray):
        return x.dtype == object
    return isinstance(x, (mpmath.mpc, mpmath.mpf))


def cexp(x):
    if is_mp(x):
        return mpmath.exp(x)
    if isinstance(x, np.ndarray):
        return np.exp(x)
    return cmath.exp(x)


def clog(x):
    """Principal logarithm, imaginary part in (-pi, pi]."""
    if is_mp(x):
        return mpmath.log(x)
    return cmath.log(x)


def csqrt(x):
    if is_mp(x):
        return mpmath.sqrt(x)
    return cmath.sqrt(x)


def working_eps(x) -> float:
    """Unit roundoff of the number type of ``x``."""
    return float(mpmath.mp.eps) if is_mp(x) else float(np.finfo(float).eps)


def _coerce(values) -> np.ndarray:
    values = list(values)
    if any(is_mp(v) for v in values):
        arr = np.array([mpmath.mpc(v) for v in values], dtype=object)
        if not all(mpmath.isfinite(v.real) and mpmath.isfinite(v.imag) for v in arr):
            raise ValueError("series coefficients must be finite")
        return arr
    arr = np.array(values, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError("series coefficients must be finite")
    return arr


def _zeros_like(arr: np.ndarray, n: int) -> np.ndarray:
    if arr.dtype == object:
        return np.array([mpmath.mpc(0)] * n, dtype=object)
    return np.zeros(n, dtype=complex)


# -- univariate series -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Series1:
    """Truncated series ``sum_{n=1}^{N} c_n z**n``.

    ``coeffs[i]`` is the coefficient of ``z**(i+1)``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        arr = _coerce(np.asarray(self.coeffs).ravel())
        if arr.size < 1:
            raise ValueError("a series needs order >= 1")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def zeros(cls, order: int) -> "Series1":
        return cls(np.zeros(order, dtype=complex))

    @classmethod
    def monomial(cls, n: int, order: int, c=1.0) -> "Series1":
        arr = [0j] * order
        if n <= order:
            arr[n - 1] = c
        return cls(arr)

    @classmethod
    def from_dense(cls, dense: np.ndarray, order: int) -> "Series1":
        """Build from an array whose index ``k`` holds the ``z**k`` coefficient."""
        body = list(dense[1 : order + 1])
        zero = mpmath.mpc(0) if is_mp(np.asarray(dense)) else 0j
        body += [zero] * (order - len(body))
        return cls(body)

    @property
    def order(self) -> int:
        return int(self.coeffs.size)

    def coef(self, n: int):
        """Coefficient of ``z**n`` (zero outside ``1..order``)."""
        if 1 <= n <= self.order:
            return self.coeffs[n - 1]
        return 0j

    def dense(self, order: int | None = None) -> np.ndarray:
        """Array of length ``order + 1`` with a zero constant slot."""
        order = self.order if order is None else order
        out = _zeros_like(self.coeffs, order + 1)
        m = min(order, self.order)
        out[1 : m + 1] = self.coeffs[:m]
        return out

    def truncate(self, order: int) -> "Series1":
        return Series1.from_dense(self.dense(order), order)

    def scaled(self, c) -> "Series1":
        return Series1(self.coeffs * c)

    def __add__(self, other: "Series1") -> "Series1":
        n = max(self.order, other.order)
        return Series1.from_dense(self.dense(n) + other.dense(n), n)

    def __sub__(self, other: "Series1") -> "Series1":
        n = max(self.order, other.order)
        return Series1.from_dense(self.dense(n) - other.dense(n), n)

    def __eq__(self, other):
        if not isinstance(other, Series1):
            return NotImplemented
        return self.order == other.order and bool(np.all(self.coeffs == other.coeffs))

    def __call__(self, z):
        return horner(self.coeffs, z)

    def __repr__(self):
        return f"Series1(order={self.order}, coeffs={list(self.coeffs)!r})"


def horner(coeffs: np.ndarray, z, stride: int = 1):
    """Evaluate ``sum_n coeffs[n-1] * z**(n*stride)``; works on arrays of ``z``."""
    w = z**stride if stride != 1 else z
    acc = 0
    for c in coeffs[::-1]:
        acc = (acc + c) * w
    return acc


def _mul_dense(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    out = np.convolve(a, b)[: order + 1]
    if out.size < order + 1:
        pad = _zeros_like(out, order + 1 - out.size)
        out = np.concatenate([out, pad])
    return out


def mul1(a: Series1, b: Series1, order: int) -> Series1:
    """Cauchy product of two series truncated at ``z**order``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return Series1.from_dense(_mul_dense(a.dense(order), b.dense(order), order), order)


def _power_table(base: np.ndarray, top: int, order: int) -> list[np.ndarray]:
    one = _zeros_like(base, order + 1)
    one[0] = 1
    table = [one]
    for _ in range(top):
        table.append(_mul_dense(table[-1], base, order))
    return table


# -- bivariate polynomials ---------------------------------------------------

class Poly2:
    """Polynomial ``sum b_ij x**i y**j`` with every stored term of degree >= 2."""

    __slots__ = ("_terms",)

    def __init__(self, coeffs: Mapping[tuple[int, int], complex] | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        terms: dict[tuple[int, int], object] = {}
        for (i, j), c in items:
            i, j = int(i), int(j)
            if i < 0 or j < 0:
                raise BadDegree(f"negative exponent in term ({i}, {j})")
            if i + j < 2:
                raise BadDegree(f"term x^{i} y^{j} has total degree {i + j} < 2")
            if not is_mp(c):
                c = complex(c)
                if not cmath.isfinite(c):
                    raise ValueError(f"coefficient of ({i}, {j}) is not finite")
            if c != 0:
                terms[(i, j)] = terms.get((i, j), 0) + c
        self._terms = tuple(sorted((k, v) for k, v in terms.items() if v != 0))

    def items(self):
        return self._terms

    def as_dict(self) -> dict[tuple[int, int], complex]:
        return dict(self._terms)

    def __getitem__(self, key):
        return dict(self._terms).get(tuple(key), 0j)

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if not isinstance(other, Poly2):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(self._terms)

    def __repr__(self):
        return f"Poly2({dict(self._terms)!r})"

    @property
    def max_total_degree(self) -> int:
        return max((i + j for (i, j), _ in self._terms), default=0)

    def __call__(self, x, y):
        acc = 0
        for (i, j), c in self._terms:
            acc = acc + c * x**i * y**j
        return acc

    def dx(self, x, y):
        acc = 0
        for (i, j), c in self._terms:
            if i:
                acc = acc + c * i * x ** (i - 1) * y**j
        return acc

    def dy(self, x, y):
        acc = 0
        for (i, j), c in self._terms:
            if j:
                acc = acc + c * j * x**i * y ** (j - 1)
        return acc

    def scaled(self, c) -> "Poly2":
        return Poly2({k: v * c for k, v in self._terms})

    def to_mp(self) -> "Poly2":
        return Poly2({k: mpmath.mpc(v) for k, v in self._terms})


def eval_poly2_on_series(g: Poly2, u: Series1, v: Series1, order: int) -> Series1:
    """``sum b_ij u**i v**j`` truncated at ``z**order``."""
    if not g:
        return Series1.zeros(order)
    ud, vd = u.dense(order), v.dense(order)
    mp_mode = is_mp(ud) or is_mp(vd)
    if mp_mode:
        ud, vd = ud.astype(object), vd.astype(object)
    imax = max(i for (i, _), _ in g.items())
    jmax = max(j for (_, j), _ in g.items())
    upow = _power_table(ud, imax, order)
    vpow = _power_table(vd, jmax, order)
    acc = _zeros_like(ud, order + 1)
    for (i, j), c in g.items():
        acc = acc + c * _mul_dense(upow[i], vpow[j], order)
    return Series1.from_dense(acc, order)


def compose1(outer: Series1, inner: Series1, order: int) -> Series1:
    """``outer(inner(z))`` truncated at ``z**order``."""
    if order < 1:
        raise ValueError("order must be >= 1")
    inn = inner.dense(order)
    acc = _zeros_like(inn, order + 1)
    for n in range(min(outer.order, order), 0, -1):
        acc[0] = acc[0] + outer.coef(n)
        acc = _mul_dense(acc, inn, order)
    return Series1.from_dense(acc, order)


# -- bivariate dense helpers -------------------------------------------------

def _poly2_array(g: Poly2, deg: int) -> np.ndarray:
    arr = np.zeros((deg + 1, deg + 1), dtype=complex)
    for (i, j), c in g.items():
        if i + j <= deg:
            arr[i, j] = c
    return arr


def _mul2(a: np.ndarray, b: np.ndarray, deg: int) -> np.ndarray:
    out = np.zeros((deg + 1, deg + 1), dtype=complex)
    ai, aj = np.nonzero(a)
    bi, bj = np.nonzero(b)
    for p, q in zip(ai, aj):
        for r, s in zip(bi, bj):
            if p + q + r + s <= deg:
                out[p + r, q + s] += a[p, q] * b[r, s]
    return out


def substitute_linear(g: Poly2, row_u, row_w, deg: int) -> Poly2:
    """Expand ``g(a*x + b*y, c*x + d*y)`` up to total degree ``deg``.

    ``row_u = (a, b)`` and ``row_w = (c, d)`` are the rows of the linear map
    taking ``(x, y)`` to the arguments of ``g``.
    """
    if not g:
        return Poly2()
    lu = np.zeros((deg + 1, deg + 1), dtype=complex)
    lw = np.zeros_like(lu)
    lu[1, 0], lu[0, 1] = row_u
    lw[1, 0], lw[0, 1] = row_w
    one = np.zeros_like(lu)
    one[0, 0] = 1
    imax = max(i for (i, _), _ in g.items())
    jmax = max(j for (_, j), _ in g.items())
    upow, wpow = [one], [one]
    for _ in range(imax):
        upow.append(_mul2(upow[-1], lu, deg))
    for _ in range(jmax):
        wpow.append(_mul2(wpow[-1], lw, deg))
    acc = np.zeros_like(lu)
    for (i, j), c in g.items():
        if i + j <= deg:
            acc += c * _mul2(upow[i], wpow[j], deg)
    return Poly2({(i, j): acc[i, j] for i in range(deg + 1) for j in range(deg + 1 - i)
                  if i + j >= 2 and acc[i, j] != 0})
