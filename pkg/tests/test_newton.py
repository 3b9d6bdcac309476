import math

import numpy as np
import pytest

from multroot.bergman import BallContext
from multroot.deflation import SMALLNESS_FAILED, deflation_sequence
from multroot.newton import (
    SingularJacobianError,
    alpha_bound,
    alpha_certificate,
    certify_singular,
    gamma_bound,
    gamma_certificate,
    newton_step,
    singular_newton,
)
from multroot.parse import parse_system
from multroot.poly import PolySystem, recenter, shift

from conftest import X0


def planted_system(rng, n, zeta, quad=0.3):
    """A(x - zeta) + quad * (x - zeta)_i (x - zeta)_j terms, expanded in x."""
    A = rng.normal(size=(n, n)) + 3 * np.eye(n)
    polys = []
    for i in range(n):
        local = {tuple(int(k == j) for k in range(n)): complex(A[i, j]) for j in range(n)}
        a, b = rng.integers(0, n, size=2)
        e = [0] * n
        e[a] += 1
        e[b] += 1
        local[tuple(e)] = local.get(tuple(e), 0) + quad * rng.normal()
        polys.append(shift(local, -np.asarray(zeta)))
    return PolySystem(n, tuple(polys))


def test_newton_step_examples():
    g = parse_system("vars: x y\na = x^2 - 1\nb = y - 1")
    assert np.allclose(newton_step(g, [2, 1]), [1.25, 1])
    lin = parse_system("vars: x y\na = 2*x + y - 3\nb = x - y")
    assert np.array_equal(newton_step(lin, [1, 1]), np.array([1, 1], dtype=complex))


def test_newton_step_rejects_singular_jacobian():
    g = parse_system("vars: x y\na = x^2\nb = y")
    with pytest.raises(SingularJacobianError):
        newton_step(g, [0, 0])
    with pytest.raises(ValueError):
        newton_step(parse_system("vars: x y\na = x"), [0, 0])


def test_worked_example_iterates(example):
    run = singular_newton(example, X0, 0.25, 16, pivot="leading", select=(0, 1))
    assert run.converged
    x1, x2 = run.iterates[1], run.iterates[2]
    assert np.linalg.norm(x1 - np.array([-1.017e-4, 3.4e-4])) <= 2e-5
    assert 1.7e-8 / 3 <= abs(x2[0]) <= 3 * 1.7e-8
    assert 8.1e-8 / 3 <= abs(x2[1]) <= 3 * 8.1e-8
    assert len(run.residual_norms) == len(run.iterates) == len(run.step_norms) + 1
    assert run.step_norms[-1] <= 1e-14


def test_quadratic_convergence(example):
    run = singular_newton(example, X0, 0.25, 16)
    err = [np.linalg.norm(x) for x in run.iterates]  # the root is the origin
    for k in (1, 2, 3):
        assert err[k] <= 0.5 ** (2 ** k - 1) * err[0]
    ratios = run.quadratic_ratios[:3]
    assert max(ratios) <= 10 * float(np.median(ratios))


def test_start_at_root_of_regular_system():
    f = parse_system("vars: x y\na = x - 1\nb = x + y - 3")
    run = singular_newton(f, [1, 2])
    assert run.converged and run.step_norms == () and len(run.iterates) == 1


def test_failed_deflation_returns_start():
    f = parse_system("vars: x y\na = x^2\nb = y^2")
    run = singular_newton(f, [10, 10])
    assert not run.converged and len(run.iterates) == 1
    assert run.trace.status == SMALLNESS_FAILED


def test_redeflation_also_converges(example):
    run = singular_newton(example, X0, 0.25, 8, redeflate=True)
    assert np.linalg.norm(run.iterates[-1]) < 1e-10


def test_root_is_a_fixed_point(example):
    t = deflation_sequence(example, [0, 0], 0.25, 8)
    x = newton_step(t.deflated, [0, 0])
    assert np.linalg.norm(x) <= 1e-12


def test_regular_newton_agrees_with_classical(example):
    rng = np.random.default_rng(3)
    for n in (2, 3):
        zeta = rng.normal(size=n)
        f = planted_system(rng, n, zeta)
        x0 = zeta + 1e-3 * rng.normal(size=n)
        run = singular_newton(f, x0, 0.25, 8, max_iters=1)
        assert run.trace.thickness == 0
        assert np.linalg.norm(run.iterates[1] - newton_step(f, x0)) <= 1e-12


def test_bounds():
    assert gamma_bound(1.0) == pytest.approx((3 - math.sqrt(7)) / 2)
    for g in (1.0, 3.0, 13.06, 1e4):
        t = 2 * g + 1
        assert alpha_bound(g) == pytest.approx(t - math.sqrt(t * t - 1), rel=1e-6)
        assert gamma_bound(g) == pytest.approx((t - math.sqrt(4 * g * g + 3 * g)) / (g + 1), rel=1e-6)


def test_alpha_at_exact_root():
    g = PolySystem(1, ({(1,): 1.0},))
    c = alpha_certificate(g, [0], BallContext([0], 0.7))
    assert c.beta == 0 and c.alpha_val == 0 and c.verdict
    assert c.kappa >= 1 and c.gamma_val >= 1


def test_alpha_near_and_far_for_linear_systems():
    rng = np.random.default_rng(8)
    for _ in range(10):
        zeta = rng.normal(size=2)
        f = planted_system(rng, 2, zeta, quad=0.0)
        near = zeta + 1e-4 * rng.normal(size=2)
        assert alpha_certificate(f, near, BallContext(near, 0.5)).verdict
        far = zeta + 5.0
        assert not alpha_certificate(f, far, BallContext(far, 0.5)).verdict


def test_alpha_soundness_on_planted_roots():
    rng = np.random.default_rng(21)
    certified = 0
    for trial in range(20):
        n = 2 if trial % 2 == 0 else 3
        zeta = rng.normal(size=n)
        f = planted_system(rng, n, zeta)
        x0 = zeta + 10.0 ** rng.uniform(-5, -2) * rng.normal(size=n)
        cert, trace = certify_singular(f, x0, BallContext(x0, 0.5), 8)
        assert trace.thickness == 0
        assert cert.kappa >= 1 and cert.gamma_val >= 1
        if cert.verdict:
            certified += 1
            lo, hi = cert.theta_interval
            assert np.linalg.norm(x0 - zeta) <= lo * (1 + 1e-9)
    assert certified >= 10


def test_gamma_certificate_matches_formula():
    rng = np.random.default_rng(4)
    zeta = rng.normal(size=2)
    f = planted_system(rng, 2, zeta)
    for R in (0.5, 0.25):
        c = gamma_certificate(f, zeta, BallContext(zeta, R))
        assert c.kappa == pytest.approx(max(1, 3 / R))
        assert c.radius == pytest.approx(gamma_bound(c.gamma_val) / c.kappa)
        assert c.verdict and c.theta_interval is None


def test_certify_worked_example(example):
    x0 = [-0.001, 0.002]
    cert, trace = certify_singular(example, x0, BallContext(x0, 0.25), 8)
    assert trace.thickness == 2
    assert all(lv.smallness.small for lv in trace.levels[:-1])
    assert cert.verdict
    lo, hi = cert.theta_interval
    assert lo <= np.linalg.norm(x0) * 1.2 and np.linalg.norm(x0) <= lo


def test_certify_reports_failed_level():
    f = parse_system("vars: x y\na = x^2\nb = y^2")
    cert, trace = certify_singular(f, [10, 10], BallContext([10, 10], 0.25))
    assert not cert.verdict and cert.failed_level == 0


def test_certify_regular_system_is_plain_alpha():
    f = parse_system("vars: x y\na = x - 1 + 0.1*y^2\nb = y - 2")
    x0 = np.array([0.601, 2.0005])  # root at (0.6, 2)
    ctx = BallContext(x0, 0.25)
    cert, trace = certify_singular(f, x0, ctx, 8)
    direct = alpha_certificate(recenter(f, x0, 8), x0, ctx)
    assert trace.thickness == 0 and cert == direct
