import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from hyperqss.ffield import (FieldCtx, NoSolution, NotPrime, ZeroArgument, ZeroInverse, discrete_log,
                             field_ctx, find_primitive, inv, is_prime, rank, row_reduce, solve_affine_combination,
                             solve_linear)

PRIMES = [5, 7, 11, 13]


def span_rank(mat, p):
    """Rank by counting the vectors in the row span (p^rank of them)."""
    mat = np.array(mat, dtype=np.int64) % p
    vecs = {tuple(np.array(c) @ mat % p) for c in itertools.product(range(p), repeat=len(mat))}
    r = 0
    while p ** r < len(vecs):
        r += 1
    return r


def test_primality_matches_sympy():
    assert [n for n in range(60) if is_prime(n)] == list(sympy.primerange(0, 60))


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 101])
def test_smallest_primitive_matches_sympy(p):
    assert find_primitive(p) == sympy.primitive_root(p)


def test_field_generator_p11():
    assert field_ctx(11).c == 2


@pytest.mark.parametrize("bad", [1, 2, 3, 4, 9, 15])
def test_field_rejects_non_primes_and_tiny_primes(bad):
    with pytest.raises(NotPrime):
        FieldCtx(bad)


def test_log_table_inverts_power_table():
    ctx = field_ctx(13)
    for e, v in enumerate(ctx.pow_table):
        assert discrete_log(v, ctx) == e
    assert sorted(ctx.pow_table) == list(range(1, 13))


def test_inverse_and_zero_errors():
    ctx = field_ctx(11)
    assert inv(3, ctx) == 4
    assert inv(-1, ctx) == 10
    with pytest.raises(ZeroInverse):
        inv(22, ctx)
    with pytest.raises(ZeroArgument):
        discrete_log(0, ctx)


@given(st.sampled_from(PRIMES), st.integers(1, 10**6))
def test_inverse_property(p, a):
    ctx = field_ctx(p)
    if a % p:
        assert a * inv(a, ctx) % p == 1


@given(st.sampled_from([5, 7]), st.integers(1, 3), st.integers(1, 4), st.data())
def test_rank_matches_span_count(p, rows, cols, data):
    mat = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols),
                             min_size=rows, max_size=rows))
    assert rank(mat, p) == span_rank(mat, p)


@given(st.sampled_from(PRIMES), st.data())
def test_rref_shape(p, data):
    mat = np.array(data.draw(st.lists(st.lists(st.integers(-50, 50), min_size=5, max_size=5),
                                      min_size=4, max_size=4)))
    red, piv = row_reduce(mat, p)
    for i, c in enumerate(piv):
        assert red[i, c] == 1
        assert np.count_nonzero(red[:, c]) == 1
    assert not red[len(piv):].any()
    assert piv == sorted(piv)


@given(st.sampled_from(PRIMES), st.data())
def test_solve_linear_satisfies_system(p, data):
    ctx = field_ctx(p)
    a = np.array(data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=4, max_size=4),
                                    min_size=3, max_size=3)))
    x0 = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=4, max_size=4)))
    b = a @ x0 % p
    x = solve_linear(a, b, ctx)
    assert np.array_equal(a @ np.array(x) % p, b)


def test_solve_linear_inconsistent():
    with pytest.raises(NoSolution):
        solve_linear([[1, 1], [2, 2]], [1, 3], field_ctx(5))


def test_solve_linear_free_variables_zero():
    assert solve_linear([[1, 0, 2]], [3], field_ctx(7)) == [3, 0, 0]


def test_affine_combination_small():
    ctx = field_ctx(11)
    mu = solve_affine_combination([(1, 0), (0, 1), (0, 0)], (0, 0), ctx)
    assert mu == [0, 0, 1]


def test_affine_combination_needs_points():
    with pytest.raises(NoSolution):
        solve_affine_combination([], (0, 0), field_ctx(5))
