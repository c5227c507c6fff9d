import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import chisquare

from hyperqss.qudit import (BadIndex, BasisId, QuditState, apply_shift, basis_matrix, computational_state,
                            measure, measure_many, mub_state, overlap)

PRIMES = [3, 5, 7, 11]
W3 = np.exp(2j * np.pi / 3)


def shift_matrix(p, x, y):
    """Dense oracle: X^x Y^y with X = diag(w^k), Y = diag(w^(k^2))."""
    w = np.exp(2j * np.pi / p)
    X = np.diag([w ** k for k in range(p)])
    Y = np.diag([w ** (k * k) for k in range(p)])
    return np.linalg.matrix_power(X, x) @ np.linalg.matrix_power(Y, y)


def test_small_states():
    assert np.allclose(mub_state(3, 0, 0).amps, np.ones(3) / np.sqrt(3), atol=1e-12)
    assert np.allclose(mub_state(3, 0, 1).amps, np.array([1, W3, W3 ** 2]) / np.sqrt(3), atol=1e-12)
    assert abs(mub_state(11, 7, 4).norm() - 1) < 1e-12


@pytest.mark.parametrize("args", [(3, 3, 0), (3, 0, -1), (5, 0, 5)])
def test_bad_index(args):
    with pytest.raises(BadIndex):
        mub_state(*args)


@pytest.mark.parametrize("p", PRIMES)
def test_complete_set_of_unbiased_bases(p):
    bases = [basis_matrix(p, j) for j in range(p)] + [basis_matrix(p, None)]
    for a, b in itertools.combinations_with_replacement(range(p + 1), 2):
        gram = np.abs(bases[a].conj().T @ bases[b])
        if a == b:
            assert np.allclose(gram, np.eye(p), atol=1e-10)
        else:
            assert np.allclose(gram, 1 / np.sqrt(p), atol=1e-10)


def test_overlap_values():
    assert overlap(mub_state(3, 0, 0), mub_state(3, 1, 2)) == pytest.approx(1 / np.sqrt(3), abs=1e-10)
    assert overlap(mub_state(5, 2, 1), mub_state(5, 2, 3)) == pytest.approx(0, abs=1e-10)
    assert overlap(computational_state(7, 3), mub_state(7, 4, 6)) == pytest.approx(1 / np.sqrt(7), abs=1e-10)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_shift_law_exhaustive(p):
    for j, l, x, y in itertools.product(range(p), repeat=4):
        got = apply_shift(x, y, mub_state(p, j, l))
        assert got.close_to(mub_state(p, (j + y) % p, (l + x) % p))


@given(st.integers(0, 10), st.integers(0, 10), st.integers(0, 10), st.integers(0, 10))
def test_shift_law_sampled_p11(j, l, x, y):
    got = apply_shift(x, y, mub_state(11, j, l))
    assert got.close_to(mub_state(11, (j + y) % 11, (l + x) % 11))


@given(st.sampled_from(PRIMES), st.data())
def test_shift_matches_matrix_oracle_and_composes(p, data):
    x1, y1, x2, y2, j, l = (data.draw(st.integers(0, p - 1)) for _ in range(6))
    psi = mub_state(p, j, l)
    once = apply_shift(x1, y1, psi)
    assert np.allclose(once.amps, shift_matrix(p, x1, y1) @ psi.amps, atol=1e-10)
    twice = apply_shift(x1, y1, apply_shift(x2, y2, psi))
    assert twice.close_to(apply_shift(x1 + x2, y1 + y2, psi))
    assert abs(twice.norm() - 1) < 1e-12
    assert apply_shift(0, 0, psi).close_to(psi)


def test_eigenstate_measurements(rng):
    for p in PRIMES:
        for j in range(p):
            for l in range(p):
                out, post = measure(mub_state(p, j, l), BasisId.mub(j), rng)
                assert out == l and post.close_to(mub_state(p, j, l))
        assert measure(computational_state(p, p - 1), BasisId.computational(), rng)[0] == p - 1


@pytest.mark.parametrize("p", PRIMES)
def test_mismatched_basis_is_uniform(p, rng):
    n = 10_000
    state = mub_state(p, 1, 2)
    outs = np.array([measure(state, BasisId.mub(0), rng)[0] for _ in range(n)])
    freq = np.bincount(outs, minlength=p) / n
    sigma = np.sqrt((1 / p) * (1 - 1 / p) / n)
    assert np.all(np.abs(freq - 1 / p) < 4 * sigma)
    assert chisquare(np.bincount(outs, minlength=p)).pvalue > 0.01


def test_batch_measurement_matches_single(rng):
    p = 7
    amps = np.array([mub_state(p, 3, l).amps for l in range(p)])
    out, post = measure_many(amps, 3, rng)
    assert list(out) == list(range(p))
    assert np.allclose(post, amps)
    out, _ = measure_many(amps, [3] * p, rng)
    assert list(out) == list(range(p))
    comp = np.eye(p, dtype=complex)
    assert list(measure_many(comp, p, rng)[0]) == list(range(p))


def test_state_equality_helper():
    a = QuditState(np.array([1, 0, 0], dtype=complex))
    assert a.close_to(computational_state(3, 0))
    assert not a.close_to(computational_state(3, 1))
