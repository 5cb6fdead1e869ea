import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from fatlocus import _kernel_py, linalg
from fatlocus.errors import DimensionError
from fatlocus.linalg import (
    QMatrix,
    Span,
    as_rational,
    kernel_basis,
    rank_exact,
    rowspace_contains,
    rowspace_intersection,
    solve_combination,
    stack,
)

small = st.integers(-4, 4)


@st.composite
def matrices(draw, max_rows=6, max_cols=6, cols=None):
    ncols = cols if cols is not None else draw(st.integers(1, max_cols))
    nrows = draw(st.integers(0, max_rows))
    rows = draw(st.lists(st.lists(small, min_size=ncols, max_size=ncols), min_size=nrows, max_size=nrows))
    if rows and draw(st.booleans()):
        # force a dependency now and then
        k = draw(st.integers(-3, 3))
        rows.append([k * x for x in rows[0]])
    return QMatrix(rows, ncols)


def sym_rank(m):
    return sympy.Matrix(m.rows, m.cols, [x for row in m for x in row]).rank() if m.rows else 0


def test_rank_examples():
    assert rank_exact(QMatrix.identity(3)) == 3
    assert rank_exact(QMatrix.zeros(2, 4)) == 0
    assert rank_exact([[1, 2], [2, 4], [1, 0]]) == 2


def test_rank_accepts_fractions():
    assert rank_exact([[Fraction(1, 2), Fraction(1, 3)], [3, 2]]) == 1
    assert rank_exact([["1/2", "2/3"], [1, 1]]) == 2


def test_kernel_examples():
    assert kernel_basis(QMatrix.identity(2)) == []
    ker = kernel_basis([[1, 1, 0]])
    assert len(ker) == 2
    assert all(sum(x * y for x, y in zip([1, 1, 0], v)) == 0 for v in ker)
    (v,) = kernel_basis([[1, 2], [2, 4]])
    assert v == (1, Fraction(-1, 2))  # spans (2, -1), first nonzero entry 1


def test_kernel_is_normalized():
    for v in kernel_basis([[1, 2, 3, 4], [2, 3, 5, 9]]):
        assert next(x for x in v if x) == 1


def test_rowspace_contains_examples():
    assert rowspace_contains((1, 1), kernel_basis([[1, 1]]))
    assert rowspace_contains((0, 0, 0), kernel_basis([[1, 2, 3]]))
    with pytest.raises(DimensionError):
        rowspace_contains((1, 2), kernel_basis([[1, 2, 3]]))


def test_intersection_examples():
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    assert rowspace_intersection([e1, e2], [e2, e3]).entries == (e2,)
    assert rowspace_intersection([e1], [e2]).rows == 0
    m = QMatrix([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert rowspace_intersection(m, m).rows == rank_exact(m)
    with pytest.raises(DimensionError):
        rowspace_intersection([e1], [[1, 0]])


def test_stack_mismatch():
    with pytest.raises(DimensionError):
        stack([[1, 2]], [[1, 2, 3]])


def test_as_rational_refuses_floats():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(ValueError):
        as_rational("0.5")
    assert as_rational("6/4") == Fraction(3, 2)
    assert as_rational(Fraction(4, 2)) == 2


def test_solve_combination():
    assert solve_combination([[1, 0], [1, 1]], [3, 5]) == [-2, 5]
    assert solve_combination([[1, 1]], [1, 0]) is None
    c = solve_combination([[2, 0, 0], [0, 3, 0]], [1, 1, 0])
    assert c == [Fraction(1, 2), Fraction(1, 3)]


@given(matrices())
def test_rank_plus_nullity(m):
    assert rank_exact(m) + len(kernel_basis(m)) == m.cols


@given(matrices())
def test_rank_matches_sympy(m):
    assert rank_exact(m) == sym_rank(m)


@settings(max_examples=1000)
@given(matrices(), st.randoms(use_true_random=False))
def test_rank_invariant_under_permutation_and_scaling(m, rnd):
    rows = [list(r) for r in m]
    rnd.shuffle(rows)
    scales = [Fraction(rnd.choice([-3, -2, -1, 1, 2, 5]), rnd.randint(1, 4)) for _ in rows]
    rows = [[c * x for x in r] for c, r in zip(scales, rows)]
    assert rank_exact(QMatrix(rows, m.cols)) == rank_exact(m)


@settings(max_examples=500)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(matrices(cols=n), st.lists(small, min_size=n, max_size=n))))
def test_membership_agrees_with_rank(case):
    m, v = case
    direct = rank_exact(stack(m, [v])) == rank_exact(m) if m.rows else not any(v)
    assert rowspace_contains(v, kernel_basis(m)) == direct
    assert Span(m.integer_rows(), m.cols).contains(v) == direct


@settings(max_examples=200)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(matrices(cols=n), matrices(cols=n))))
def test_intersection_dimension_formula(pair):
    m1, m2 = pair
    inter = rowspace_intersection(m1, m2)
    both = rank_exact(stack(m1, m2)) if (m1.rows or m2.rows) else 0
    assert rank_exact(m1) + rank_exact(m2) == both + inter.rows
    assert rank_exact(inter) == inter.rows if inter.rows else True
    k1, k2 = kernel_basis(m1), kernel_basis(m2)
    for v in inter:
        assert rowspace_contains(v, k1) and rowspace_contains(v, k2)


@given(matrices(), st.lists(small, min_size=0, max_size=3))
def test_span_rank_with(m, extra_seed):
    extra = [[x + i for x in range(m.cols)] for i in extra_seed]
    sp = Span(m.integer_rows(), m.cols)
    want = rank_exact(QMatrix([list(r) for r in m] + extra, m.cols)) if (m.rows or extra) else 0
    assert sp.rank_with(extra) == want


def test_backends_agree_on_random_matrices():
    if "compiled" not in linalg.available_backends():
        pytest.skip("compiled kernel not built")
    from fatlocus import _kernel
    rng = random.Random(11)
    for _ in range(500):
        nr, nc = rng.randint(1, 8), rng.randint(1, 8)
        big = rng.choice([3, 10**6, 10**12])
        rows = [[rng.randint(-big, big) if rng.random() < 0.7 else 0 for _ in range(nc)] for _ in range(nr)]
        for fn in ("echelon", "rref"):
            assert getattr(_kernel, fn)([r[:] for r in rows], nc) == getattr(_kernel_py, fn)([r[:] for r in rows], nc)


def test_backend_switching():
    before = linalg.backend()
    try:
        linalg.use_backend("python")
        assert linalg.backend() == "python"
        assert rank_exact(QMatrix.identity(4)) == 4
    finally:
        linalg.use_backend(before)
    with pytest.raises(ValueError):
        linalg.use_backend("gpu")


def test_rref_matches_sympy():
    rng = random.Random(5)
    for _ in range(100):
        nr, nc = rng.randint(1, 5), rng.randint(1, 5)
        rows = [[rng.randint(-5, 5) for _ in range(nc)] for _ in range(nr)]
        rank, pivots, red = linalg.rref_int([r[:] for r in rows], nc)
        ref, piv = sympy.Matrix(rows).rref()
        assert tuple(pivots) == tuple(piv)
        for i in range(rank):
            scale = Fraction(red[i][pivots[i]])
            assert [Fraction(x) / scale for x in red[i]] == [Fraction(int(x.p), int(x.q)) for x in ref.row(i)]
