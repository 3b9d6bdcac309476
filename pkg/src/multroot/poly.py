"""Sparse multivariate polynomials and truncated power series.

A polynomial (or the representative of a truncated series) is stored as a
*term map*: a ``dict`` from exponent tuples to complex coefficients.  Term
maps are never mutated after construction; every helper below returns a new
map.

Two system types are built on top of term maps:

``PolySystem``
    ``s`` exact polynomials in ``n`` variables, the user-facing input.
``SeriesSystem``
    ``s`` series in the local variable ``u = x - center``, truncated at a
    total degree ``order``.  Terms of degree above ``order`` are unknown,
    not zero, which is why arithmetic always truncates to the smallest
    operand order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

Exponent = Tuple[int, ...]
Terms = Dict[Exponent, complex]


class NotAUnitError(ArithmeticError):
    """Raised when a series (or matrix of series) is not invertible at its center."""


# ---------------------------------------------------------------------------
# term-map helpers
# ---------------------------------------------------------------------------

def degree_of(e: Exponent) -> int:
    return sum(e)


def _grlex_key(e: Exponent):
    return (sum(e), tuple(-k for k in e))


def canonical(terms: Terms) -> Terms:
    """Drop zero coefficients and order keys graded-lexicographically."""
    return {e: complex(terms[e]) for e in sorted(terms, key=_grlex_key) if terms[e] != 0}


def truncate(terms: Terms, order: Optional[int]) -> Terms:
    if order is None:
        return dict(terms)
    return {e: c for e, c in terms.items() if sum(e) <= order}


def add(a: Terms, b: Terms, order: Optional[int] = None) -> Terms:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return canonical(truncate(out, order))


def sub(a: Terms, b: Terms, order: Optional[int] = None) -> Terms:
    return add(a, scale(b, -1), order)


def scale(a: Terms, c: complex) -> Terms:
    if c == 0:
        return {}
    return {e: v * c for e, v in a.items()}


def mul(a: Terms, b: Terms, order: Optional[int] = None) -> Terms:
    out: Terms = {}
    for ea, ca in a.items():
        da = sum(ea)
        if order is not None and da > order:
            continue
        for eb, cb in b.items():
            if order is not None and da + sum(eb) > order:
                continue
            e = tuple(i + j for i, j in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return canonical(out)


def deriv(a: Terms, j: int) -> Terms:
    """Partial derivative with respect to variable ``j``."""
    out: Terms = {}
    for e, c in a.items():
        k = e[j]
        if k == 0:
            continue
        e2 = e[:j] + (k - 1,) + e[j + 1:]
        out[e2] = c * k
    return canonical(out)


def constant_term(a: Terms, n: int) -> complex:
    return a.get((0,) * n, 0j)


def max_abs(a: Terms) -> float:
    return max((abs(c) for c in a.values()), default=0.0)


def evaluate(a: Terms, u: Sequence[complex]) -> complex:
    """Evaluate a term map at ``u``.

    Powers are accumulated per variable (a Horner-like table of ``u_j**k``),
    so each term costs ``n`` multiplications.
    """
    if not a:
        return 0j
    u = [complex(v) for v in u]
    n = len(u)
    top = [0] * n
    for e in a:
        for j in range(n):
            if e[j] > top[j]:
                top[j] = e[j]
    powers = []
    for j in range(n):
        p = [1 + 0j]
        for _ in range(top[j]):
            p.append(p[-1] * u[j])
        powers.append(p)
    total = 0j
    for e, c in a.items():
        t = c
        for j, k in enumerate(e):
            if k:
                t *= powers[j][k]
        total += t
    return total


def shift(a: Terms, x0: Sequence[complex], order: Optional[int] = None) -> Terms:
    """Coefficients of ``a(x0 + u)`` as a polynomial in ``u``.

    Exact binomial expansion of each monomial; no finite differencing.
    """
    x0 = [complex(v) for v in x0]
    n = len(x0)
    out: Terms = {}
    for e, c in a.items():
        # univariate expansions (x0_j + u_j)^k = sum_i C(k,i) x0_j^(k-i) u_j^i
        factors = []
        for j, k in enumerate(e):
            factors.append([(i, math.comb(k, i) * x0[j] ** (k - i)) for i in range(k + 1)])
        for combo in product(*factors):
            exps = tuple(i for i, _ in combo)
            if order is not None and sum(exps) > order:
                continue
            coef = c
            for _, w in combo:
                coef *= w
            out[exps] = out.get(exps, 0) + coef
    return canonical(out)


def series_invert(u: Terms, order: int, n: Optional[int] = None) -> Terms:
    """Inverse of a truncated series in the local ring, to total degree ``order``.

    Writes ``u = c0 (1 - w)`` and sums the geometric series ``sum w^k`` for
    ``k <= order``; ``w`` has no constant term so higher powers vanish after
    truncation.

    Raises
    ------
    NotAUnitError
        If the constant term is zero or below ``1e-12 * max(1, max|coef|)``.
    """
    if n is None:
        if not u:
            raise NotAUnitError("zero series is not a unit")
        n = len(next(iter(u)))
    zero = (0,) * n
    c0 = u.get(zero, 0j)
    tau = 1e-12 * max(1.0, max_abs(u))
    if abs(c0) <= tau:
        raise NotAUnitError(f"constant term {c0!r} is below the unit threshold {tau:.3g}")
    w = {e: -c / c0 for e, c in u.items() if e != zero}
    w = truncate(w, order)
    acc: Terms = {zero: 1 + 0j}
    power: Terms = {zero: 1 + 0j}
    for _ in range(order):
        power = mul(power, w, order)
        if not power:
            break
        acc = add(acc, power)
    return scale(acc, 1 / c0)


def monomials(n: int, max_degree: int) -> list:
    """All exponent tuples of total degree <= ``max_degree`` in grlex order."""
    out = []
    for d in range(max_degree + 1):
        out.extend(_monomials_of_degree(n, d))
    return out


def _monomials_of_degree(n: int, d: int):
    if n == 1:
        yield (d,)
        return
    for k in range(d, -1, -1):
        for rest in _monomials_of_degree(n - 1, d - k):
            yield (k,) + rest


def format_terms(a: Terms, names: Sequence[str]) -> str:
    if not a:
        return "0"
    # output is valid input for parse_system, and repr keeps it exact
    out = ""
    for e, c in a.items():
        mono = "*".join(
            name if k == 1 else f"{name}^{k}" for name, k in zip(names, e) if k
        )
        if c.imag == 0:
            sign = "-" if c.real < 0 else "+"
            coef = repr(abs(c.real))
        else:
            sign = "+"
            im_sign = "-" if c.imag < 0 else "+"
            coef = f"({c.real!r} {im_sign} {abs(c.imag)!r}i)"
        term = coef if not mono else f"{coef}*{mono}"
        if not out:
            out = term if sign == "+" else "-" + term
        else:
            out += f" {sign} {term}"
    return out


# ---------------------------------------------------------------------------
# systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolySystem:
    """``s`` polynomials in ``n_vars`` variables with complex coefficients."""

    n_vars: int
    polys: Tuple[Terms, ...]
    var_names: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.n_vars < 1:
            raise ValueError("n_vars must be >= 1")
        if len(self.polys) < 1:
            raise ValueError("a system needs at least one polynomial")
        polys = []
        for p in self.polys:
            for e in p:
                if len(e) != self.n_vars:
                    raise ValueError(f"exponent {e} does not have length {self.n_vars}")
            polys.append(canonical(p))
        object.__setattr__(self, "polys", tuple(polys))
        names = tuple(self.var_names) or tuple(f"x{j + 1}" for j in range(self.n_vars))
        if len(names) != self.n_vars:
            raise ValueError("var_names length does not match n_vars")
        object.__setattr__(self, "var_names", names)

    @property
    def n_eqs(self) -> int:
        return len(self.polys)

    @property
    def max_degree(self) -> int:
        return max((sum(e) for p in self.polys for e in p), default=0)

    def __eq__(self, other):
        if not isinstance(other, PolySystem):
            return NotImplemented
        return self.n_vars == other.n_vars and list(self.polys) == list(other.polys)

    def __hash__(self):
        return hash((self.n_vars, tuple(tuple(p.items()) for p in self.polys)))

    def __str__(self):
        lines = ["vars: " + " ".join(self.var_names)]
        for i, p in enumerate(self.polys):
            lines.append(f"f{i + 1} = {format_terms(p, self.var_names)}")
        return "\n".join(lines)


@dataclass(frozen=True)
class SeriesSystem:
    """Truncated series in ``u = x - center``, retaining total degree <= ``order``.

    ``level`` is the index of this system in a deflation sequence.
    """

    center: np.ndarray
    order: int
    series: Tuple[Terms, ...]
    level: int = 0

    def __post_init__(self):
        center = np.asarray(self.center, dtype=complex).ravel()
        center.setflags(write=False)
        object.__setattr__(self, "center", center)
        if self.order < 0:
            raise ValueError("order must be nonnegative")
        n = center.size
        series = []
        for t in self.series:
            for e in t:
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not match the center dimension {n}")
            series.append(canonical(truncate(t, self.order)))
        object.__setattr__(self, "series", tuple(series))

    @property
    def n_vars(self) -> int:
        return self.center.size

    @property
    def n_eqs(self) -> int:
        return len(self.series)

    def constants(self) -> np.ndarray:
        return np.array([constant_term(t, self.n_vars) for t in self.series], dtype=complex)

    def as_poly(self) -> PolySystem:
        """The polynomial representative in the *local* variable ``u``."""
        return PolySystem(self.n_vars, tuple(self.series))

    def __add__(self, other: "SeriesSystem") -> "SeriesSystem":
        _check_compatible(self, other)
        order = min(self.order, other.order)
        return SeriesSystem(self.center, order,
                            tuple(add(a, b, order) for a, b in zip(self.series, other.series)),
                            self.level)

    def __sub__(self, other: "SeriesSystem") -> "SeriesSystem":
        _check_compatible(self, other)
        order = min(self.order, other.order)
        return SeriesSystem(self.center, order,
                            tuple(sub(a, b, order) for a, b in zip(self.series, other.series)),
                            self.level)


def _check_compatible(a: SeriesSystem, b: SeriesSystem):
    if a.n_eqs != b.n_eqs:
        raise ValueError("systems have different numbers of series")
    if not np.array_equal(a.center, b.center):
        raise ValueError("series arithmetic requires equal centers")


@dataclass(frozen=True)
class SeriesMatrix:
    """Matrix of term maps sharing a center; ``order=None`` means exact polynomials."""

    center: np.ndarray
    order: Optional[int]
    entries: Tuple[Tuple[Terms, ...], ...]

    @property
    def shape(self):
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    def at_center(self) -> np.ndarray:
        """Numeric matrix of constant terms."""
        n = np.asarray(self.center).size
        return np.array([[constant_term(t, n) for t in row] for row in self.entries],
                        dtype=complex).reshape(self.shape)

    def at(self, x: Sequence[complex]) -> np.ndarray:
        u = np.asarray(x, dtype=complex) - np.asarray(self.center, dtype=complex)
        return np.array([[evaluate(t, u) for t in row] for row in self.entries],
                        dtype=complex).reshape(self.shape)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def _local_point(f, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != f.n_vars:
        raise ValueError(f"point has dimension {x.size}, system has {f.n_vars} variables")
    if isinstance(f, SeriesSystem):
        return x - f.center
    return x


def _terms_of(f) -> Tuple[Terms, ...]:
    return f.series if isinstance(f, SeriesSystem) else f.polys


def eval_system(f, x: Sequence[complex]) -> np.ndarray:
    """Value of ``f`` at the absolute point ``x``.

    A ``SeriesSystem`` is evaluated through its truncated representative at
    ``u = x - center``.
    """
    u = _local_point(f, x)
    return np.array([evaluate(t, u) for t in _terms_of(f)], dtype=complex)


def jacobian(f) -> SeriesMatrix:
    """Matrix of partial derivatives ``d f_i / d x_j``.

    For a ``SeriesSystem`` of order ``p`` the entries have order ``p - 1``.
    """
    if isinstance(f, SeriesSystem):
        order = max(f.order - 1, 0)
        entries = tuple(tuple(truncate(deriv(t, j), order) for j in range(f.n_vars))
                        for t in f.series)
        if f.order == 0:
            entries = tuple(tuple({} for _ in range(f.n_vars)) for _ in f.series)
        return SeriesMatrix(f.center, order, entries)
    entries = tuple(tuple(deriv(p, j) for j in range(f.n_vars)) for p in f.polys)
    return SeriesMatrix(np.zeros(f.n_vars, dtype=complex), None, entries)


def jacobian_at(f, x: Sequence[complex]) -> np.ndarray:
    return jacobian(f).at(x)


def recenter(f: PolySystem, x0: Sequence[complex], p: Optional[int]) -> SeriesSystem:
    """Taylor shift of ``f`` to ``x0``, truncated at total degree ``p``.

    ``p=None`` keeps every term (the shift of a polynomial is exact).
    """
    x0 = np.asarray(x0, dtype=complex).ravel()
    if x0.size != f.n_vars:
        raise ValueError(f"center has dimension {x0.size}, system has {f.n_vars} variables")
    if p is None:
        p = f.max_degree
    if p < 0:
        raise ValueError("order must be nonnegative")
    return SeriesSystem(x0, p, tuple(shift(t, x0, p) for t in f.polys))


def series_representative(f, center: Sequence[complex]) -> PolySystem:
    """Polynomial representative of ``f`` expanded in ``z - center``."""
    center = np.asarray(center, dtype=complex).ravel()
    if isinstance(f, SeriesSystem):
        delta = center - f.center
        if not np.any(delta):
            return PolySystem(f.n_vars, tuple(f.series))
        return PolySystem(f.n_vars, tuple(shift(t, delta) for t in f.series))
    if not np.any(center):
        return f
    return PolySystem(f.n_vars, tuple(shift(t, center) for t in f.polys), f.var_names)


# ---------------------------------------------------------------------------
# matrices of series
# ---------------------------------------------------------------------------

def matmul_series(a, b, order: Optional[int]):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc: Terms = {}
            for k in range(inner):
                acc = add(acc, mul(a[i][k], b[k][j], order))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def matrix_series_invert(a, order: int, n: int):
    """Inverse of a square matrix of series whose constant part is invertible.

    Uses ``A = A0 (I + E)`` with ``E = A0^{-1} (A - A0)`` and the truncated
    Neumann sum ``A^{-1} = sum_k (-E)^k A0^{-1}``.
    """
    r = len(a)
    zero = (0,) * n
    a0 = np.array([[t.get(zero, 0j) for t in row] for row in a], dtype=complex).reshape(r, r)
    sv = np.linalg.svd(a0, compute_uv=False)
    tau = 1e-12 * max(1.0, max(max_abs(t) for row in a for t in row))
    if r == 0:
        return ()
    if sv[-1] <= tau:
        raise NotAUnitError(f"pivot block is singular at the center (sigma_min={sv[-1]:.3g})")
    if r == 1:
        return ((series_invert(a[0][0], order, n),),)
    a0inv = np.linalg.inv(a0)
    const = lambda m: tuple(tuple(({zero: complex(m[i, j])} if m[i, j] != 0 else {})
                                  for j in range(r)) for i in range(r))
    a0inv_s = const(a0inv)
    rest = tuple(tuple({e: c for e, c in t.items() if e != zero} for t in row) for row in a)
    neg_e = matmul_series(const(-a0inv), rest, order)
    acc = a0inv_s
    term = a0inv_s
    for _ in range(order):
        term = matmul_series(neg_e, term, order)
        if all(not t for row in term for t in row):
            break
        acc = tuple(tuple(add(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(acc, term))
    return acc


def poly_from_coeffs(n: int, coeffs: Iterable[Tuple[Exponent, complex]]) -> Terms:
    out: Terms = {}
    for e, c in coeffs:
        out[tuple(e)] = out.get(tuple(e), 0) + c
    return canonical(out)
