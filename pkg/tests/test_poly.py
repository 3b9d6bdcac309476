import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multroot.poly import (
    NotAUnitError,
    PolySystem,
    SeriesSystem,
    eval_system,
    evaluate,
    jacobian,
    matmul_series,
    matrix_series_invert,
    monomials,
    mul,
    recenter,
    series_invert,
    series_representative,
    shift,
    truncate,
)

from conftest import X0, random_terms


def coeff_close(a, b, rtol=1e-12):
    keys = set(a) | set(b)
    scale = max([abs(v) for v in a.values()] + [abs(v) for v in b.values()] + [1.0])
    return all(abs(a.get(k, 0) - b.get(k, 0)) <= rtol * scale for k in keys)


def test_canonical_drops_zero_terms():
    f = PolySystem(2, ({(1, 0): 1.0, (0, 1): 0.0},))
    assert f.polys[0] == {(1, 0): 1.0}
    assert f == PolySystem(2, ({(1, 0): 1.0},))


def test_rejects_bad_exponents():
    with pytest.raises(ValueError):
        PolySystem(2, ({(1,): 1.0},))
    with pytest.raises(ValueError):
        PolySystem(2, ())


def test_example_vanishes_at_origin(example):
    assert np.allclose(eval_system(example, [0, 0]), 0)


def test_recentered_value_matches_worked_example(example):
    F0 = recenter(example, X0, 3)
    v = eval_system(F0, X0)  # absolute point: u = 0
    assert v[0].real == pytest.approx(9.5667e-5, rel=1e-3)
    assert v[1].real == pytest.approx(1.06e-4, rel=1e-3)
    # first order terms of F0 (shown to 4 digits in the worked example)
    assert F0.series[0][(1, 0)].real == pytest.approx(0.0205, abs=5e-5)
    assert F0.series[0][(0, 1)].real == pytest.approx(0.0196, abs=5e-5)


def test_recenter_identity_and_order_zero(example):
    F = recenter(example, [0, 0], 5)
    assert list(F.series) == list(example.polys)
    F0 = recenter(example, X0, 0)
    assert all(set(t) <= {(0, 0)} for t in F0.series)
    assert np.allclose(F0.constants(), eval_system(example, X0))


def test_jacobian_of_identity_and_constants():
    ident = PolySystem(3, tuple({tuple(int(i == j) for i in range(3)): 1.0} for j in range(3)))
    assert np.array_equal(jacobian(ident).at([1, 2, 3]), np.eye(3))
    const = PolySystem(2, ({(0, 0): 4.0}, {(0, 0): -1.0}))
    assert not jacobian(const).at([0.3, 0.1]).any()


def test_jacobian_of_example(example):
    J = jacobian(example)
    x, y = 0.3, -0.2
    expected = np.array([
        [x * x + y * y + 2 * x + 2 * y, 2 * x * y + 2 * x + 2 * y],
        [2 * x * y - y * y + 2 * x + 2 * y, x * x - 2 * x * y + 2 * x + 2 * y],
    ])
    assert np.allclose(J.at([x, y]), expected)


def test_series_jacobian_loses_one_order(example):
    F = recenter(example, X0, 4)
    J = jacobian(F)
    assert J.order == 3


def test_geometric_series_inverse():
    v = series_invert({(0,): 1.0, (1,): 1.0}, 3, 1)
    assert v == {(0,): 1.0, (1,): -1.0, (2,): 1.0, (3,): -1.0}
    assert series_invert({(0, 0): 2.0}, 4, 2) == {(0, 0): 0.5}


def test_non_unit_raises():
    with pytest.raises(NotAUnitError):
        series_invert({(1, 0): 1.0}, 3, 2)
    with pytest.raises(NotAUnitError):
        series_invert({(0, 0): 1e-14, (1, 0): 1.0}, 3, 2)


def test_series_systems_need_equal_centers():
    a = SeriesSystem([0, 0], 3, ({(1, 0): 1.0},))
    b = SeriesSystem([0, 1], 3, ({(1, 0): 1.0},))
    with pytest.raises(ValueError):
        a + b
    c = SeriesSystem([0, 0], 2, ({(0, 1): 1.0, (0, 3): 5.0},))
    s = a + c
    assert s.order == 2 and s.series[0] == {(1, 0): 1.0, (0, 1): 1.0}


def test_matrix_series_inverse_round_trip():
    rng = np.random.default_rng(1)
    n, order = 2, 4
    A = [[random_terms(rng, n, 3, 4) for _ in range(2)] for _ in range(2)]
    A[0][0][(0, 0)] = 3.0
    A[1][1][(0, 0)] = 3.0
    A[0][1][(0, 0)] = 0.5
    A[1][0][(0, 0)] = 0.2
    Ainv = matrix_series_invert(A, order, n)
    P = matmul_series(A, Ainv, order)
    for i in range(2):
        for j in range(2):
            expect = {(0, 0): 1.0} if i == j else {}
            assert coeff_close(P[i][j], expect, 1e-10)


# ---------------------------------------------------------------- properties

coeff = st.floats(-1, 1, allow_nan=False)
point = st.lists(st.floats(-2, 2, allow_nan=False), min_size=2, max_size=2)


@st.composite
def polys2(draw):
    entries = draw(st.dictionaries(
        st.tuples(st.integers(0, 3), st.integers(0, 3)), st.complex_numbers(max_magnitude=2),
        min_size=1, max_size=8))
    return entries


@given(polys2(), point)
@settings(max_examples=60, deadline=None)
def test_shift_is_invertible(a, x0):
    back = shift(shift(a, x0), [-v for v in x0])
    assert coeff_close(back, {k: v for k, v in a.items() if v != 0}, 1e-9)


@given(polys2(), point, st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_truncated_shift_error_is_high_order(a, x0, p):
    f = PolySystem(2, (a,))
    F = recenter(f, x0, p)
    rng = np.random.default_rng(p)
    u = rng.normal(size=2)
    u *= 1e-3 / np.linalg.norm(u)
    exact = eval_system(f, np.array(x0) + u)
    approx = eval_system(F, np.array(x0) + u)
    size = max(abs(c) for c in shift(a, x0).values()) if shift(a, x0) else 1.0
    assert np.all(np.abs(exact - approx) <= 10 * max(size, 1.0) * 1e-3 ** (p + 1))


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), coeff), min_size=0, max_size=6),
       st.floats(0.5, 1.0), st.integers(1, 6))
@settings(max_examples=300, deadline=None)
def test_series_invert_property(extra, c0, order):
    u = {(0, 0): c0}
    for i, j, c in extra:
        if (i, j) != (0, 0):
            u[(i, j)] = u.get((i, j), 0) + c
    v = series_invert(u, order, 2)
    prod = truncate(mul(u, v), order)
    one = {(0, 0): 1.0}
    keys = set(prod) | set(one)
    assert max(abs(prod.get(k, 0) - one.get(k, 0)) for k in keys) <= 1e-10


def test_jacobian_commutes_with_recenter(example):
    p = 5
    F = recenter(example, X0, p)
    JF = jacobian(F)
    for i in range(2):
        for j in range(2):
            entry = PolySystem(2, (jacobian(example).entries[i][j],))
            expect = recenter(entry, X0, p - 1).series[0]
            assert coeff_close(JF.entries[i][j], expect, 1e-12)


def test_series_representative_round_trip(example):
    F = recenter(example, X0, None)
    rep = series_representative(F, [0, 0])
    for a, b in zip(rep.polys, example.polys):
        assert coeff_close(a, b, 1e-12)


def test_monomial_count():
    assert len(monomials(3, 4)) == 35
    assert monomials(2, 1) == [(0, 0), (1, 0), (0, 1)]
