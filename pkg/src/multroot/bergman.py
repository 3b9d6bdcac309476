"""Bergman-space norms on balls and the point estimates derived from them.

The space is ``A^2(omega, R)``: analytic functions on the open ball
``B(omega, R)`` of ``C^n``, square integrable for the Lebesgue measure
normalized so that the ball has measure ``R^(2n)``.  Monomials in
``z - omega`` are orthogonal and

    ||(z - omega)^a||^2 = R^(2n + 2|a|) * a! * n! / (n + |a|)!
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .poly import PolySystem, SeriesSystem, eval_system, series_representative


@dataclass(frozen=True)
class BallContext:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=complex).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        if c.size < 1:
            raise ValueError("ball dimension must be >= 1")

    @property
    def n(self) -> int:
        return self.center.size

    def rho(self, x: Sequence[complex]) -> float:
        """Distance from ``x`` to the center."""
        return float(np.linalg.norm(np.asarray(x, dtype=complex) - self.center))


@dataclass(frozen=True)
class SmallnessReport:
    norm_f: float
    value_norm: float
    eta: float
    cond1: bool
    cond2: bool

    @property
    def small(self) -> bool:
        return self.cond2


@lru_cache(maxsize=1)
def constants():
    """Return ``(c0, alpha0)``.

    ``c0 = sum_k (1/2)^(2^k - 1)`` and ``alpha0`` is the first positive root
    of ``(1 - 4u + 2u^2)^2 - 2u``, bracketed in ``(0, 0.2]``.
    """
    c0 = 0.0
    k = 0
    while True:
        term = 0.5 ** (2 ** k - 1)
        if term < 1e-17:
            break
        c0 += term
        k += 1

    def tri(u):
        return (1 - 4 * u + 2 * u * u) ** 2 - 2 * u

    lo, hi = 0.0, 0.2
    # tri(0) = 1 > 0 and tri(0.2) < 0; the trinomial has a single sign change here
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        if tri(mid) > 0:
            lo = mid
        else:
            hi = mid
    return c0, 0.5 * (lo + hi)


def monomial_norm_sq(alpha: Sequence[int], radius: float) -> float:
    n = len(alpha)
    d = sum(alpha)
    log = ((2 * n + 2 * d) * math.log(radius)
           + sum(math.lgamma(a + 1) for a in alpha)
           + math.lgamma(n + 1) - math.lgamma(n + d + 1))
    return math.exp(log)


def bergman_norm(f, ctx: BallContext) -> float:
    """Norm of ``f`` in ``A^2(omega, R)^s``.

    ``f`` is a :class:`PolySystem` in absolute coordinates or a
    :class:`SeriesSystem`, whose polynomial representative is re-expanded
    around the ball center first.
    """
    if f.n_vars != ctx.n:
        raise ValueError("system and ball dimensions differ")
    rep = series_representative(f, ctx.center)
    total = 0.0
    for p in rep.polys:
        for e, c in p.items():
            total += abs(c) ** 2 * monomial_norm_sq(e, ctx.radius)
    return math.sqrt(total)


def derivative_bound(norm_f: float, ctx: BallContext, x: Sequence[complex], k: int) -> float:
    """Upper bound on ``||D^k f(x)||`` from the Bergman norm of ``f``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    rho = ctx.rho(x)
    R = ctx.radius
    if rho >= R:
        raise ValueError("point lies outside the open ball")
    n = ctx.n
    rising = math.prod(range(n + 1, n + k + 1))
    return norm_f * rising * R ** (1 + k) / (R * R - rho * rho) ** ((n + 1) / 2 + k)


def smallness_certificate(f, ctx: BallContext) -> SmallnessReport:
    """Decide whether ``f(omega)`` is small without a user tolerance.

    ``eta = 2 alpha0 / ((n+1)(n+2)(R + ||f||) R^(n-2))``; the value is
    small when ``||f(omega)|| <= eta``.  ``cond1`` is the companion
    condition ``c0 R^(n-1) ||f(omega)|| < 1``.
    """
    n = ctx.n
    if n < 2:
        raise ValueError("the smallness test is defined for n >= 2")
    c0, alpha0 = constants()
    R = ctx.radius
    norm_f = bergman_norm(f, ctx)
    value = float(np.linalg.norm(eval_system(f, ctx.center)))
    eta = 2 * alpha0 / ((n + 1) * (n + 2) * (R + norm_f) * R ** (n - 2))
    return SmallnessReport(
        norm_f=norm_f,
        value_norm=value,
        eta=eta,
        cond1=bool(c0 * R ** (n - 1) * value < 1),
        cond2=bool(value <= eta),
    )
