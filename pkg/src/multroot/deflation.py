"""Kerneling, the deflation sequence and extraction of the deflated system.

Kerneling replaces a system ``F`` whose Jacobian has numerical rank
``r < n`` at the center by

    K(F) = (F_1, ..., F_r, vec(D - C A^{-1} B))

where ``A`` is an invertible ``r x r`` block of ``DF`` (after row and column
permutations) and ``vec`` concatenates rows.  Everything is computed in the
ring of truncated series, so ``A^{-1}`` is a series inverse.  Each
kerneling consumes one order of the truncation budget.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .bergman import BallContext, SmallnessReport, smallness_certificate
from .numrank import RankProfile, numerical_rank
from .poly import (
    PolySystem,
    SeriesMatrix,
    SeriesSystem,
    add,
    jacobian,
    matmul_series,
    matrix_series_invert,
    recenter,
    sub,
    truncate,
)

COMPLETED = "completed"
SMALLNESS_FAILED = "smallness_failed"
DEPTH_EXCEEDED = "depth_exceeded"


class DeflationError(RuntimeError):
    pass


class OrderBudgetError(DeflationError):
    """The truncation order ran out before the Jacobian reached full rank."""


@dataclass(frozen=True)
class Level:
    system: SeriesSystem
    smallness: SmallnessReport
    profile: Optional[RankProfile]
    row_perm: Optional[Tuple[int, ...]] = None
    col_perm: Optional[Tuple[int, ...]] = None

    @property
    def eta(self) -> float:
        return self.smallness.eta

    @property
    def value_norm(self) -> float:
        return self.smallness.value_norm

    @property
    def norm(self) -> float:
        return self.smallness.norm_f

    @property
    def rank(self) -> Optional[int]:
        return None if self.profile is None else self.profile.rank

    @property
    def epsilon(self) -> Optional[float]:
        return None if self.profile is None else self.profile.epsilon


@dataclass(frozen=True)
class DeflationTrace:
    levels: Tuple[Level, ...]
    status: str
    deflated: Optional[SeriesSystem]
    selected_rows: Optional[Tuple[int, ...]] = None
    order: int = 0
    radius: float = 0.0

    @property
    def thickness(self) -> Optional[int]:
        if self.status != COMPLETED:
            return None
        return len(self.levels) - 1

    @property
    def failed_level(self) -> Optional[int]:
        if self.status == COMPLETED:
            return None
        return len(self.levels) - 1


def pivot_block(J0, r: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Row and column permutations putting a well-conditioned ``r x r`` block first.

    Greedy complete pivoting on magnitudes; ties go to the first entry in
    row-major order.
    """
    if r <= 0:
        raise ValueError("pivot_block needs r > 0")
    M = np.array(J0, dtype=complex)
    s, n = M.shape
    if r > min(s, n):
        raise ValueError("r exceeds the matrix dimensions")
    rows = list(range(s))
    cols = list(range(n))
    for t in range(r):
        sub_ = np.abs(M[t:, t:])
        i, j = np.unravel_index(int(np.argmax(sub_)), sub_.shape)
        i += t
        j += t
        M[[t, i], :] = M[[i, t], :]
        M[:, [t, j]] = M[:, [j, t]]
        rows[t], rows[i] = rows[i], rows[t]
        cols[t], cols[j] = cols[j], cols[t]
        piv = M[t, t]
        if piv == 0:
            break
        M[t + 1:, t:] -= np.outer(M[t + 1:, t] / piv, M[t, t:])
    return tuple(rows), tuple(cols)


def _leading_block_ok(J0, r: int) -> bool:
    J0 = np.asarray(J0, dtype=complex)
    top = np.linalg.svd(J0, compute_uv=False)[0]
    block = np.linalg.svd(J0[:r, :r], compute_uv=False)
    return bool(block[-1] >= 1e-6 * top)


def choose_pivots(J0, r: int, pivot: str = "max"):
    """``pivot="max"``: complete pivoting.  ``pivot="leading"``: keep the
    first ``r`` rows and columns when that block is well conditioned."""
    s, n = np.shape(J0)
    if pivot == "leading" and _leading_block_ok(J0, r):
        return tuple(range(s)), tuple(range(n))
    if pivot not in ("max", "leading"):
        raise ValueError(f"unknown pivot strategy {pivot!r}")
    return pivot_block(J0, r)


def schur_complement(J: SeriesMatrix, r: int, row_perm=None, col_perm=None) -> SeriesMatrix:
    """``D - C A^{-1} B`` of the permuted series matrix; ``r = 0`` returns ``J``."""
    if r == 0:
        return J
    s, n = J.shape
    row_perm = tuple(range(s)) if row_perm is None else tuple(row_perm)
    col_perm = tuple(range(n)) if col_perm is None else tuple(col_perm)
    order = J.order
    nv = np.asarray(J.center).size
    P = [[J.entries[i][j] for j in col_perm] for i in row_perm]
    A = [row[:r] for row in P[:r]]
    B = [row[r:] for row in P[:r]]
    C = [row[:r] for row in P[r:]]
    D = [row[r:] for row in P[r:]]
    if order is None:
        raise ValueError("schur_complement works on truncated series; recenter first")
    Ainv = matrix_series_invert(A, order, nv)
    CAinvB = matmul_series(matmul_series(C, Ainv, order), B, order)
    out = tuple(tuple(sub(d, x, order) for d, x in zip(drow, xrow))
                for drow, xrow in zip(D, CAinvB))
    return SeriesMatrix(J.center, order, out)


def kerneling(F: SeriesSystem, r: int, profile: Optional[RankProfile] = None,
              row_perm=None, col_perm=None, pivot: str = "max") -> SeriesSystem:
    """One kerneling step ``F -> K(F)``; the result has order ``F.order - 1``.

    Permutations are chosen from the Jacobian at the center unless given.
    """
    n = F.n_vars
    if r >= n:
        raise ValueError("kerneling needs r < n")
    if F.order < 1:
        raise OrderBudgetError("series order is exhausted; increase the order budget")
    J = jacobian(F)
    if r == 0:
        entries = [t for row in J.entries for t in row]
        return SeriesSystem(F.center, J.order, tuple(entries), F.level + 1)
    if row_perm is None or col_perm is None:
        row_perm, col_perm = choose_pivots(J.at_center(), r, pivot)
    S = schur_complement(J, r, row_perm, col_perm)
    head = [truncate(F.series[i], J.order) for i in row_perm[:r]]
    tail = [t for row in S.entries for t in row]
    return SeriesSystem(F.center, J.order, tuple(head + tail), F.level + 1)


def extract_deflated(F: SeriesSystem, profile: Optional[RankProfile] = None,
                     rows: Optional[Sequence[int]] = None) -> Tuple[SeriesSystem, Tuple[int, ...]]:
    """Pick ``n`` equations of ``F`` whose Jacobian rows at the center are
    best conditioned (column-pivoted QR of ``DF(x0)^T``), unless ``rows`` is given.
    """
    n = F.n_vars
    J0 = jacobian(F).at_center()
    if profile is not None and profile.rank != n:
        raise DeflationError("extraction needs a Jacobian of full numerical rank")
    if rows is None:
        if F.n_eqs == n:
            rows = tuple(range(n))
        else:
            _, _, piv = scipy.linalg.qr(J0.T, pivoting=True, mode="economic")
            rows = tuple(sorted(int(i) for i in piv[:n]))
    rows = tuple(rows)
    if len(rows) != n:
        raise ValueError(f"need exactly {n} rows")
    check = numerical_rank(J0[list(rows), :])
    if check.rank != n:
        raise DeflationError(f"extracted rows {rows} have numerical rank {check.rank} < {n}")
    out = SeriesSystem(F.center, F.order, tuple(F.series[i] for i in rows), F.level)
    return out, rows


def deflation_sequence(f: PolySystem, x0, R: float, p: int = 8, max_depth: int = 32,
                       pivot: str = "max", select: Optional[Sequence[int]] = None) -> DeflationTrace:
    """Build the (truncated) deflation sequence of ``f`` at ``x0``.

    Level ``k`` holds a series of order ``p - k``.  At each level the
    numerical rank of ``DF_k(x0)`` is computed; full rank ends the loop with
    the extracted deflated system.  ``F_k(x0)`` must pass the smallness test
    on ``B(x0, R)`` at level 0 and before every kerneling.  The terminal
    (full-rank) level is reported but not required to be small: its root is
    regular and is judged by the alpha/gamma certificates instead.
    """
    if p < 1:
        raise ValueError("order budget p must be >= 1")
    ctx = BallContext(x0, R)
    F = recenter(f, ctx.center, p)
    n = f.n_vars
    levels: List[Level] = []
    for k in range(max_depth + 1):
        report = smallness_certificate(F, ctx)
        profile = numerical_rank(jacobian(F).at_center())
        if not report.small and (k == 0 or profile.rank < n):
            levels.append(Level(F, report, profile))
            return DeflationTrace(tuple(levels), SMALLNESS_FAILED, None, order=p, radius=R)
        if profile.rank == n:
            levels.append(Level(F, report, profile))
            deflated, rows = extract_deflated(F, profile, select)
            return DeflationTrace(tuple(levels), COMPLETED, deflated, rows, order=p, radius=R)
        if k == max_depth:
            levels.append(Level(F, report, profile))
            return DeflationTrace(tuple(levels), DEPTH_EXCEEDED, None, order=p, radius=R)
        if F.order < 2:
            raise OrderBudgetError(
                f"order budget p={p} exhausted at level {k} (rank {profile.rank} < {n}); "
                f"retry with p={2 * p}")
        rp = cp = None
        if profile.rank > 0:
            rp, cp = choose_pivots(jacobian(F).at_center(), profile.rank, pivot)
        G = kerneling(F, profile.rank, profile, rp, cp)
        levels.append(Level(F, report, profile, rp, cp))
        F = G
    raise AssertionError("unreachable")
