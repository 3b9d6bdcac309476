"""Singular Newton iteration and alpha/gamma certificates.

The singular Newton operator is the classical Newton operator of the
deflated system.  Certificates use Bergman-norm point estimates:

    beta  = ||Dg(x)^{-1} g(x)||
    kappa = max(1, R (n+1) / (R^2 - rho^2))
    gamma = max(1, ||g|| ||Dg(x)^{-1}|| R kappa / (R^2 - rho^2)^((n+1)/2))
    alpha = beta * kappa

with ``rho = ||x - omega||`` for the ball ``B(omega, R)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bergman import BallContext, bergman_norm
from .deflation import COMPLETED, DeflationTrace, deflation_sequence
from .poly import PolySystem, SeriesSystem, eval_system, jacobian

ALPHA = "alpha"
GAMMA = "gamma"


class SingularJacobianError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class NewtonRun:
    iterates: Tuple[np.ndarray, ...]
    residual_norms: Tuple[float, ...]
    step_norms: Tuple[float, ...]
    converged: bool
    trace: Optional[DeflationTrace] = None

    @property
    def quadratic_ratios(self) -> Tuple[float, ...]:
        s = self.step_norms
        return tuple(s[k + 1] / s[k] ** 2 for k in range(len(s) - 1) if s[k] > 0)


@dataclass(frozen=True)
class Certificate:
    kind: str
    beta: float
    kappa: float
    gamma_val: float
    alpha_val: float
    bound: float
    verdict: bool
    theta_interval: Optional[Tuple[float, float]] = None
    radius: Optional[float] = None
    failed_level: Optional[int] = None


def _check_square(g):
    if g.n_eqs != g.n_vars:
        raise ValueError(f"need a square system, got {g.n_eqs} equations in {g.n_vars} variables")


def _invertible_jacobian(g, x) -> np.ndarray:
    J = jacobian(g).at(x)
    sv = np.linalg.svd(J, compute_uv=False)
    tau = J.shape[0] * np.finfo(float).eps
    if sv[0] == 0 or sv[-1] <= tau * sv[0]:
        raise SingularJacobianError(f"Jacobian is numerically singular at {x}")
    return J


def newton_step(g, x) -> np.ndarray:
    """``x - Dg(x)^{-1} g(x)`` for a square system."""
    _check_square(g)
    x = np.asarray(x, dtype=complex).ravel()
    J = _invertible_jacobian(g, x)
    return x - np.linalg.solve(J, eval_system(g, x))


def singular_newton(f: PolySystem, x0, R: float = 0.25, p: int = 8, max_iters: int = 30,
                    tol: float = 1e-14, max_depth: int = 32, redeflate: bool = False,
                    pivot: str = "max", select=None) -> NewtonRun:
    """Deflate once at ``x0`` and iterate Newton on the frozen deflated system.

    If deflation does not complete, the run holds only ``x0`` and
    ``converged`` is False.  ``redeflate=True`` rebuilds the deflated system
    at every iterate.
    """
    x = np.asarray(x0, dtype=complex).ravel()
    trace = deflation_sequence(f, x, R, p, max_depth, pivot=pivot, select=select)
    if trace.status != COMPLETED:
        res = float(np.linalg.norm(eval_system(f, x)))
        return NewtonRun((x,), (res,), (), False, trace)
    g = trace.deflated
    iterates = [x]
    residuals = [float(np.linalg.norm(eval_system(g, x)))]
    steps: List[float] = []
    converged = residuals[0] == 0
    for _ in range(0 if converged else max_iters):
        if redeflate and steps:
            t = deflation_sequence(f, x, R, p, max_depth, pivot=pivot, select=select)
            if t.status != COMPLETED:
                break
            g = t.deflated
        x_new = newton_step(g, x)
        step = float(np.linalg.norm(x_new - x))
        x = x_new
        iterates.append(x)
        steps.append(step)
        residuals.append(float(np.linalg.norm(eval_system(g, x))))
        if step <= tol:
            converged = True
            break
    return NewtonRun(tuple(iterates), tuple(residuals), tuple(steps), converged, trace)


def _point_estimates(g, x, ctx: BallContext):
    _check_square(g)
    if g.n_vars != ctx.n:
        raise ValueError("system and ball dimensions differ")
    x = np.asarray(x, dtype=complex).ravel()
    n = ctx.n
    R = ctx.radius
    rho = ctx.rho(x)
    if rho >= R:
        raise ValueError("point lies outside the open ball")
    J = _invertible_jacobian(g, x)
    Jinv = np.linalg.inv(J)
    gx = eval_system(g, x)
    beta = float(np.linalg.norm(np.linalg.solve(J, gx)))
    gap = R * R - rho * rho
    kappa = max(1.0, R * (n + 1) / gap)
    norm_g = bergman_norm(g, ctx)
    gamma = max(1.0, norm_g * np.linalg.norm(Jinv, 2) * R * kappa / gap ** ((n + 1) / 2))
    return beta, kappa, float(gamma), rho


def alpha_bound(gamma: float) -> float:
    """``2g + 1 - sqrt((2g+1)^2 - 1)``, written without cancellation."""
    t = 2 * gamma + 1
    return 1.0 / (t + math.sqrt(t * t - 1))


def gamma_bound(gamma: float) -> float:
    """``(2g + 1 - sqrt(4g^2 + 3g)) / (g + 1)``, written without cancellation."""
    return 1.0 / (2 * gamma + 1 + math.sqrt(4 * gamma * gamma + 3 * gamma))


def alpha_certificate(g, x0, ctx: BallContext) -> Certificate:
    """Existence and uniqueness of a root of ``g`` near ``x0``.

    When ``alpha < alpha_bound(gamma)``, ``g`` has exactly one root in
    ``B(x0, theta)`` for every ``theta`` in ``theta_interval``; ``radius``
    is the lower end of that interval.
    """
    beta, kappa, gamma, rho = _point_estimates(g, x0, ctx)
    alpha = beta * kappa
    bound = alpha_bound(gamma)
    interval = None
    verdict = False
    if alpha < bound:
        disc = (alpha + 1) ** 2 - 4 * alpha * (gamma + 1)
        u_lo = 2 * alpha / (alpha + 1 + math.sqrt(max(disc, 0.0)))
        lo = u_lo / kappa
        hi = min(1.0 / (kappa * (gamma + 1)), ctx.radius - rho)
        if lo < hi:
            interval = (lo, hi)
            verdict = True
    return Certificate(ALPHA, beta, kappa, gamma, alpha, bound, verdict, interval,
                       interval[0] if interval else None)


def gamma_certificate(g, zeta, ctx: BallContext) -> Certificate:
    """Radius of guaranteed quadratic convergence around a regular root ``zeta``."""
    beta, kappa, gamma, _ = _point_estimates(g, zeta, ctx)
    bound = gamma_bound(gamma)
    radius = bound / kappa
    return Certificate(GAMMA, beta, kappa, gamma, beta * kappa, bound, radius > 0, None, radius)


def certify_singular(f: PolySystem, x0, ctx: BallContext, p: int = 8, at_root: bool = False,
                     max_depth: int = 32, pivot: str = "max", select=None):
    """Deflate ``f`` at ``x0`` with radius ``ctx.radius`` and certify the deflated system.

    Returns ``(certificate, trace)``.  A deflation that stops early gives a
    negative certificate carrying the failing level index.
    """
    trace = deflation_sequence(f, x0, ctx.radius, p, max_depth, pivot=pivot, select=select)
    if trace.status != COMPLETED:
        nan = float("nan")
        cert = Certificate(GAMMA if at_root else ALPHA, nan, nan, nan, nan, nan, False,
                           failed_level=trace.failed_level)
        return cert, trace
    if at_root:
        return gamma_certificate(trace.deflated, x0, ctx), trace
    return alpha_certificate(trace.deflated, x0, ctx), trace
