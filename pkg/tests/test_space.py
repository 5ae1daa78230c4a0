import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgiso import fp
from pgiso.errors import CapExceeded, NotSkew, ParseError, ShapeMismatch
from pgiso.oracle import zero_subspace_bruteforce
from pgiso.space import (MatrixSpace, check_individualization, format_space, individualization_size,
                         parse_space, sample_individualization, semi_canonical_basis,
                         span_from_generators, zero_subspace)

from conftest import E


def Eij(i, j, m=2, n=2):
    A = np.zeros((m, n), dtype=np.int64)
    A[i, j] = 1
    return A


def random_space(p, m, n, d, rng, skew=False):
    while True:
        mats = [fp.random_skew(n, p, rng) if skew else fp.random_matrix(m, n, p, rng) for _ in range(d)]
        S = span_from_generators(mats, p, shape=(m, n))
        if S.d == d:
            return S


def vec_span(mats, p):
    mats = np.asarray(mats)
    if len(mats) == 0:
        return np.zeros((0, int(np.prod(mats.shape[1:])) if mats.ndim > 1 else 0), dtype=np.int64)
    return fp.row_basis(mats.reshape(len(mats), -1), p)


def test_span_from_generators_examples():
    z = span_from_generators([np.zeros((2, 2))], 3)
    assert z.d == 0
    A = np.array([[1, 2], [0, 1]])
    S = span_from_generators([A, 2 * A], 3)
    assert S.d == 1 and S.contains(A)
    S = span_from_generators([Eij(0, 0), Eij(0, 1), Eij(0, 0) + Eij(0, 1)], 3)
    assert S.d == 2
    with pytest.raises(ShapeMismatch):
        span_from_generators([np.zeros((2, 2)), np.zeros((2, 3))], 3)


def test_space_basics():
    S = MatrixSpace(np.array([E(0, 1, 3, 3), E(0, 2, 3, 3)]), 3)
    assert S.skew and S.d == 2 and S.shape == (3, 3)
    assert S.contains((E(0, 1, 3, 3) + 2 * E(0, 2, 3, 3)) % 3)
    assert not S.contains(E(1, 2, 3, 3))
    assert len(S.elements()) == 9
    assert np.array_equal(S.combine(S.coords(S.basis[1])), S.basis[1])
    T = MatrixSpace(np.array([(E(0, 1, 3, 3) + E(0, 2, 3, 3)) % 3, E(0, 2, 3, 3)]), 3)
    assert S == T
    with pytest.raises(ShapeMismatch):
        MatrixSpace(np.array([Eij(0, 0), Eij(0, 0)]), 3)
    with pytest.raises(NotSkew):
        MatrixSpace(np.array([Eij(0, 1)]), 3, skew=True)


def test_zero_subspace_examples():
    S = MatrixSpace(np.array([Eij(0, 0), Eij(1, 1)]), 3)
    assert zero_subspace(S, fp.eye(2), fp.eye(2)).d == 0
    assert zero_subspace(S, np.zeros((1, 2), dtype=np.int64), fp.eye(2)) == S
    Z = zero_subspace(S, np.array([[1, 0]]), np.array([[1], [0]]))
    assert Z == MatrixSpace(np.array([Eij(1, 1)]), 3)
    # brute force over all 9 elements of S
    hits = [A for A in S.elements() if not (np.array([[1, 0]]) @ A @ np.array([[1], [0]]) % 3).any()]
    assert len(hits) == 3
    with pytest.raises(ShapeMismatch):
        zero_subspace(S, fp.eye(3), fp.eye(2))


@given(st.integers(0, 10 ** 6), st.sampled_from([3, 5]), st.integers(1, 3), st.integers(1, 3),
       st.integers(0, 4), st.integers(1, 3), st.integers(1, 3))
def test_zero_subspace_matches_bruteforce(seed, p, m, n, d, a, b):
    rng = fp.make_rng(seed)
    d = min(d, m * n)
    if p == 5:
        d = min(d, 3)
    S = random_space(p, m, n, d, rng)
    L = fp.random_matrix(a, m, p, rng)
    R = fp.random_matrix(n, b, p, rng)
    Z = zero_subspace(S, L, R)
    assert np.array_equal(vec_span(Z.basis, p), zero_subspace_bruteforce(S, L, R))
    for A in Z.basis:
        assert not (L @ A @ R % p).any()


@pytest.mark.parametrize("d", [5, 6])
def test_zero_subspace_dimension_six(d):
    rng = fp.make_rng(d, 99)
    S = random_space(3, 3, 3, d, rng)
    L = fp.random_matrix(1, 3, 3, rng)
    R = fp.random_matrix(3, 2, 3, rng)
    assert np.array_equal(vec_span(zero_subspace(S, L, R).basis, 3), zero_subspace_bruteforce(S, L, R))


def greedy_oracle(S, L, R):
    """Sort all elements by (fingerprint, vec) and pick greedily."""
    p = S.p
    elems = list(S.elements())
    key = lambda A: tuple(int(x) for x in (L @ A @ R % p).ravel()) + tuple(int(x) for x in A.ravel())
    elems.sort(key=key)
    out = []
    for A in elems:
        if A.any() and (not out or not fp.in_span(vec_span(out, p), A.ravel(), p)):
            out.append(A)
    return np.array(out)


def test_semi_canonical_example():
    S = MatrixSpace(np.array([Eij(0, 0), Eij(1, 1)]), 3)
    L, R = np.array([[1, 0]]), np.array([[1], [0]])
    mats, C = semi_canonical_basis(S, L, R)
    assert np.array_equal(mats[0], Eij(1, 1))
    assert (L @ mats[1] @ R % 3).any()
    assert np.array_equal(mats, greedy_oracle(S, L, R))


def test_semi_canonical_one_dimensional():
    A = np.array([[0, 2], [1, 1]])
    S = MatrixSpace(A[None], 3)
    L, R = fp.eye(2), fp.eye(2)
    mats, _ = semi_canonical_basis(S, L, R)
    best = min((c * A % 3 for c in (1, 2)), key=lambda X: tuple(X.ravel()))
    assert np.array_equal(mats[0], best)


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_semi_canonical_properties(seed, d):
    p = 3
    rng = fp.make_rng(seed)
    S = random_space(p, 2, 3, d, rng)
    L = fp.random_matrix(1, 2, p, rng)
    R = fp.random_matrix(3, 2, p, rng)
    mats, C = semi_canonical_basis(S, L, R)
    assert np.array_equal(S.combine(C), mats)
    assert MatrixSpace(mats, p) == S
    assert np.array_equal(mats, greedy_oracle(S, L, R))
    z = zero_subspace(S, L, R).d
    assert all(not (L @ A @ R % p).any() for A in mats[:z])
    assert MatrixSpace(mats[:z], p, 2, 3) == zero_subspace(S, L, R)
    # greedy minimality of fingerprints
    elems = S.elements()
    for i in range(d):
        prev = vec_span(mats[:i], p)
        fi = (L @ mats[i] @ R % p).ravel()
        for A in elems:
            if A.any() and (i == 0 or not fp.in_span(prev, A.ravel(), p)):
                assert fp.lex_compare(fi, (L @ A @ R % p).ravel()) <= 0
    # permuting the input basis does not change the output
    perm = rng.permutation(d)
    S2 = MatrixSpace(S.basis[perm], p)
    assert np.array_equal(semi_canonical_basis(S2, L, R)[0], mats)
    # randomized tie-breaking differs only inside the zero subspace
    Z = zero_subspace(S, L, R)
    for s in range(3):
        alt, _ = semi_canonical_basis(S, L, R, rng=fp.make_rng(seed, s))
        for A, B in zip(mats, alt):
            assert Z.contains((A - B) % p)


def test_semi_canonical_cap():
    S = random_space(3, 3, 3, 5, fp.make_rng(1))
    with pytest.raises(CapExceeded):
        semi_canonical_basis(S, fp.eye(3), fp.eye(3), cap=100)


def test_individualization_size():
    assert individualization_size(2, 1, 3) == int(np.ceil(32 * 2 * np.log2(3)))
    assert individualization_size(1, 16, 3, const=1) == 4


def test_individualization_identity_fallback():
    rng = fp.make_rng(4)
    S = random_space(3, 3, 3, 2, rng)
    pair = sample_individualization(S, 1, seed=0)
    assert pair.t >= 3
    assert np.array_equal(pair.L, fp.eye(3)) and np.array_equal(pair.R, fp.eye(3))
    assert pair.verified is True


def test_verified_pair_kills_zero_subspace():
    # every nonzero element of span{I, cyclic shift} has rank >= 2
    p = 3
    S = MatrixSpace(np.array([fp.eye(3), np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])]), p)
    assert all(fp.rank(A, p) >= 2 for A in S.elements() if A.any())
    ok = 0
    for seed in range(40):
        pair = sample_individualization(S, 2, seed, const=0.5)
        if pair.verified:
            ok += 1
            assert zero_subspace(S, pair.L, pair.R).d == 0
    assert ok > 0


def test_sampling_rate_random_space():
    p = 3
    S = random_space(p, 6, 6, 2, fp.make_rng(8))
    assert individualization_size(2, 1, p, const=0.6) == 2
    wins = sum(bool(sample_individualization(S, 1, s, const=0.6).verified) for s in range(100))
    assert wins >= 50


def test_check_individualization_budget():
    S = random_space(3, 3, 3, 3, fp.make_rng(2))
    assert check_individualization(S, fp.eye(3), fp.eye(3), 1, budget=10) is None


def test_space_text_round_trip():
    S = random_space(5, 2, 3, 3, fp.make_rng(3))
    T = parse_space(format_space(S))
    assert np.array_equal(T.basis, S.basis) and T.p == 5


@pytest.mark.parametrize("text", ["", "3 2 2", "3 2 2 1\n0 0", "3 1 1 2\n1\n2"])
def test_space_parse_errors(text):
    with pytest.raises(ParseError):
        parse_space(text)
