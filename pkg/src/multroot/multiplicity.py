"""Multiplicity of an isolated root through the dual space.

The local dual space of order ``d`` at ``zeta`` is the null space of the
Macaulay matrix whose rows are ``u^b f_i`` (``u = x - zeta``) truncated at
total degree ``d`` and whose columns are the monomials of degree ``<= d``.
Its dimension grows with ``d`` until it stops, and the stable value is the
multiplicity.  Rank decisions use a fixed relative threshold so the oracle
stays independent of the adaptive rank test used by the solver.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .poly import PolySystem, SeriesSystem, eval_system, monomials, mul, series_representative

RANK_TOL = 1e-8
ROOT_TOL = 1e-8
DEFAULT_CAP = 12


class MultiplicityError(ValueError):
    pass


@dataclass(frozen=True)
class MultiplicityResult:
    mu: int
    degree_cap_used: int
    stabilized: bool
    nullities: Tuple[int, ...] = ()


def _local_terms(f, zeta) -> Tuple[tuple, Optional[int]]:
    zeta = np.asarray(zeta, dtype=complex).ravel()
    if zeta.size != f.n_vars:
        raise ValueError(f"point has dimension {zeta.size}, system has {f.n_vars} variables")
    res = float(np.linalg.norm(eval_system(f, zeta)))
    if res > ROOT_TOL:
        raise MultiplicityError(f"point is not a root: residual {res:.3e} > {ROOT_TOL:g}")
    trusted = f.order if isinstance(f, SeriesSystem) else None
    return series_representative(f, zeta).polys, trusted


def macaulay_matrix(polys, n: int, d: int) -> np.ndarray:
    cols = monomials(n, d)
    index = {e: k for k, e in enumerate(cols)}
    rows = []
    for g in polys:
        for b in monomials(n, d):
            prod = mul({b: 1.0}, g, d)
            if not prod:
                continue
            row = np.zeros(len(cols), dtype=complex)
            for e, c in prod.items():
                row[index[e]] = c
            rows.append(row)
    if not rows:
        return np.zeros((0, len(cols)), dtype=complex)
    return np.array(rows)


def _nullity(M: np.ndarray) -> int:
    ncols = M.shape[1]
    if M.shape[0] == 0:
        return ncols
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return ncols
    return ncols - int(np.count_nonzero(sv > RANK_TOL * sv[0]))


def multiplicity(f, zeta, cap: int = DEFAULT_CAP) -> MultiplicityResult:
    """Dimension of the local quotient ring of ``f`` at ``zeta``.

    ``f`` may be a :class:`PolySystem` or a :class:`SeriesSystem`; for the
    latter the degree never exceeds the series order.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    polys, trusted = _local_terms(f, zeta)
    if trusted is not None:
        cap = min(cap, trusted)
        if cap < 1:
            raise MultiplicityError("series order is too small for the oracle")
    n = f.n_vars
    nullities = [1]  # order 0: only evaluation at zeta
    for d in range(1, cap + 1):
        nullities.append(_nullity(macaulay_matrix(polys, n, d)))
        if nullities[-1] == nullities[-2]:
            return MultiplicityResult(nullities[-1], d, True, tuple(nullities))
    return MultiplicityResult(nullities[-1], cap, False, tuple(nullities))


def check_drop(f: PolySystem, K_f, zeta, cap: int = DEFAULT_CAP) -> bool:
    """True when the multiplicity of ``K_f`` at ``zeta`` is below that of ``f``."""
    mf = multiplicity(f, zeta, cap)
    if not mf.stabilized:
        raise MultiplicityError(f"multiplicity of f did not stabilize by degree {cap}")
    if mf.mu == 1:
        raise MultiplicityError("zeta is a regular root of f; there is nothing to drop")
    mk = multiplicity(K_f, zeta, cap)
    if not mk.stabilized:
        raise MultiplicityError(f"multiplicity of K(f) did not stabilize by degree {mk.degree_cap_used}")
    return mk.mu < mf.mu


def valuation(f, zeta) -> int:
    """Smallest total degree of a nonzero term of ``f`` expanded at ``zeta``."""
    rep = series_representative(f, np.asarray(zeta, dtype=complex).ravel())
    degs = [sum(e) for p in rep.polys for e in p]
    if not degs:
        raise ValueError("the zero system has no valuation")
    return min(degs)
