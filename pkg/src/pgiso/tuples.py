"""Matrix tuples: skew tuple isometry and tuple equivalence by exhaustive
search.

Both backends are exact. skew_tuple_isometry builds S one row at a time:
given rows s_1..s_{i-1}, the conditions s_i A_l s_j^T = B_l[i, j] are linear
in s_i, and s_i A_l = 0 whenever row i of B_l vanishes. The affine solution
space is enumerated and filtered before recursing.
"""
import numpy as np

from . import fp
from .errors import BudgetExceeded, ShapeMismatch

DEFAULT_CAP = 2 * 10 ** 6


def as_tuple(mats, p):
    mats = np.asarray(mats, dtype=np.int64) % p
    if mats.ndim != 3:
        raise ShapeMismatch("a matrix tuple is a (k, rows, cols) stack")
    return mats


def is_skew_tuple(mats, p):
    return all(fp.is_skew(A, p) for A in mats)


def act(S, mats, p):
    """(S A_l S^T)_l."""
    return np.einsum("ab,lbc,dc->lad", S, mats, S) % p


def act2(P, mats, Q, p):
    """(P A_l Q)_l."""
    return np.einsum("ab,lbc,cd->lad", P, mats, Q) % p


class _Counter:
    def __init__(self, cap):
        self.cap = cap
        self.n = 0

    def add(self, k):
        self.n += k
        if self.cap is not None and self.n > self.cap:
            raise BudgetExceeded("candidate budget %d exhausted" % self.cap)


def iter_skew_isometries(A, B, p, mask=None, cap=DEFAULT_CAP, stats=None):
    """Yield every invertible S with S A_l S^T = B_l for all l.

    mask (D x D bool) restricts which entries of S may be nonzero. stats, if
    a dict, receives the candidate count under key 'candidates'.
    """
    A = as_tuple(A, p)
    B = as_tuple(B, p)
    if A.shape != B.shape or A.shape[1] != A.shape[2]:
        raise ShapeMismatch("tuples must have equal shapes of square matrices")
    k, D, _ = A.shape
    if mask is None:
        mask = np.ones((D, D), dtype=bool)
    counter = _Counter(cap)
    zero_rows = [[l for l in range(k) if not B[l, i].any()] for i in range(D)]
    profile = [fp.rank(B[:, i, :], p) for i in range(D)]

    def candidates(i, rows):
        idx = np.nonzero(mask[i])[0]
        if len(idx) == 0:
            return np.zeros((0, D), dtype=np.int64)
        cols = []
        rhs = []
        for l in zero_rows[i]:
            cols.append(A[l][idx, :])
            rhs.extend([0] * D)
        for j, sj in enumerate(rows):
            c = A[:, idx, :] @ sj % p  # (k, |idx|)
            cols.append(c.T)
            rhs.extend(int(B[l, i, j]) for l in range(k))
        if cols:
            Mx = np.hstack(cols) % p
            x0 = fp.solve_left(Mx, np.array(rhs, dtype=np.int64), p)
            if x0 is None:
                return np.zeros((0, D), dtype=np.int64)
            x0 = x0[0]
            Nb = fp.left_nullspace(Mx, p).reshape(-1, len(idx))
        else:
            x0 = np.zeros(len(idx), dtype=np.int64)
            Nb = fp.eye(len(idx))
        h = Nb.shape[0]
        counter.add(p ** h)
        X = (x0 + fp.enumerate_vectors(h, p) @ Nb) % p
        out = np.zeros((X.shape[0], D), dtype=np.int64)
        out[:, idx] = X
        # independence from the rows chosen so far
        if rows:
            R, r, _, piv = fp.rref(np.array(rows), p)
            red = out.copy()
            for row, c in zip(R[:r], piv):
                f = red[:, c].copy()
                red = (red - np.outer(f, row)) % p
            out = out[red.any(axis=1)]
        else:
            out = out[out.any(axis=1)]
        keep = [s for s in out if fp.rank(np.einsum("b,lbc->lc", s, A) % p, p) == profile[i]]
        return keep

    def rec(i, rows):
        if i == D:
            S = np.array(rows, dtype=np.int64).reshape(D, D)
            if np.array_equal(act(S, A, p), B):
                yield S
            return
        for s in candidates(i, rows):
            yield from rec(i + 1, rows + [s])

    try:
        yield from rec(0, [])
    finally:
        if stats is not None:
            stats["candidates"] = stats.get("candidates", 0) + counter.n


def skew_tuple_isometry(A, B, p, mask=None, cap=DEFAULT_CAP, stats=None):
    """First S (in search order) with S A_l S^T = B_l, or None."""
    A = as_tuple(A, p)
    B = as_tuple(B, p)
    if A.shape != B.shape:
        raise ShapeMismatch("tuples differ in shape: %s vs %s" % (A.shape, B.shape))
    if not (is_skew_tuple(A, p) and is_skew_tuple(B, p)):
        raise ShapeMismatch("skew_tuple_isometry needs skew-symmetric tuples")
    if np.array_equal(A, B):
        return fp.eye(A.shape[1])
    for S in iter_skew_isometries(A, B, p, mask=mask, cap=cap, stats=stats):
        assert fp.is_invertible(S, p) and np.array_equal(act(S, A, p), B)
        return S
    return None


def tuple_equivalence(A, B, p, cap=DEFAULT_CAP, stats=None):
    """(P, Q) invertible with P A_i Q = B_i for all i, or None.

    P runs over GL(m) in lexical order; for each P the equations are linear
    in Q and the affine solution space is scanned for an invertible member.
    """
    A = as_tuple(A, p)
    B = as_tuple(B, p)
    if A.shape != B.shape:
        raise ShapeMismatch("tuples differ in shape: %s vs %s" % (A.shape, B.shape))
    k, m, n = A.shape
    if m == 0 or n == 0 or np.array_equal(A, B):
        return fp.eye(m), fp.eye(n)
    counter = _Counter(cap)
    Bst = B.reshape(k * m, n)
    try:
        for P in fp.iter_gl(m, p):
            counter.add(1)
            M = (P @ A % p).reshape(k * m, n)
            # M Q = Bst  <=>  Q^T M^T = Bst^T
            Qt = fp.solve_left(M.T, Bst.T, p)
            if Qt is None:
                continue
            Q0 = Qt.T
            Nb = fp.right_nullspace(M, p).reshape(-1, n)
            h = Nb.shape[0]
            if h == 0:
                if fp.is_invertible(Q0, p):
                    return P, Q0
                continue
            counter.add(p ** (h * n))
            # Q = Q0 + sum of columns drawn from the right nullspace of M
            for c in fp.enumerate_vectors(h * n, p):
                C = c.reshape(n, h)
                Q = (Q0 + (Nb.T @ C.T)) % p
                if fp.is_invertible(Q, p):
                    assert np.array_equal(act2(P, A, Q, p), B)
                    return P, Q
        return None
    finally:
        if stats is not None:
            stats["candidates"] = stats.get("candidates", 0) + counter.n
