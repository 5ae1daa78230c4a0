"""Attribute sets, kernels, complementary and formatting matrices for
low-rank matrix spaces."""
from dataclasses import dataclass

import numpy as np

from . import fp
from .errors import BudgetExceeded, Infeasible, NotSkew, ShapeMismatch


def as_attr(Lam, n):
    Lam = np.asarray(Lam, dtype=np.int64)
    if Lam.size == 0:
        return np.zeros((0, n), dtype=np.int64)
    Lam = Lam.reshape(-1, n)
    return Lam


def check_attr(Lam, n, p):
    Lam = as_attr(Lam, n)
    if fp.rank(Lam, p) != Lam.shape[0]:
        raise ShapeMismatch("attribute set vectors are dependent")
    return Lam


def annihilator_cols(Lam, n, p):
    """Columns Pi (n x (n-|Lam|)) with Lam.Pi = 0; x in span(Lam) iff x.Pi = 0."""
    Lam = as_attr(Lam, n)
    if Lam.shape[0] == 0:
        return fp.eye(n)
    return fp.right_nullspace(Lam, p).T.reshape(n, -1)


def _kernel_system(S, Lam):
    p = S.p
    Lam = check_attr(Lam, S.n, p)
    Pi = annihilator_cols(Lam, S.n, p)
    blocks = [B @ Pi % p for B in S.basis]
    return Lam, (np.hstack(blocks) if blocks else np.zeros((S.m, 0), dtype=np.int64))


def kernel_general(S, Lam):
    """Basis of {v in F_p^m : v A in span(Lam) for every A in S}."""
    _, M = _kernel_system(S, Lam)
    if M.shape[1] == 0:
        return fp.eye(S.m)
    return fp.left_nullspace(M, S.p)


def kernel_skew(S, Lam):
    """As kernel_general, and additionally v orthogonal to every x in Lam."""
    if not S.skew:
        raise NotSkew("kernel_skew needs a skew space")
    Lam, M = _kernel_system(S, Lam)
    M = np.hstack([M, Lam.T])
    if M.shape[1] == 0:
        return fp.eye(S.n)
    return fp.left_nullspace(M, S.p)


def complementary_matrix(S, Lam, skew=False, kernel=None):
    """Canonical complementary matrix.

    General: unit vectors e_j on the non-pivot columns of the kernel RREF.
    Skew: first complete the kernel inside Lam^perp (canonical basis order),
    then complete to F_p^n with unit vectors.
    """
    p = S.p
    amb = S.n if skew else S.m
    if kernel is None:
        kernel = kernel_skew(S, Lam) if skew else kernel_general(S, Lam)
    K = np.asarray(kernel, dtype=np.int64).reshape(-1, amb)
    dk = K.shape[0]
    if not skew:
        return fp.complete_basis(K, amb, p)[dk:]
    Lam = as_attr(Lam, amb)
    if dk + Lam.shape[0] > amb:
        raise Infeasible("|Lambda| + dim ker_skew exceeds n")
    perp = fp.right_nullspace(Lam, p) if Lam.shape[0] else fp.eye(amb)
    cur = K.copy()
    rows = []
    for v in perp:
        if not fp.in_span(cur, v, p):
            rows.append(v)
            cur = np.vstack([cur, v])
    if len(rows) != amb - Lam.shape[0] - dk:
        raise Infeasible("kernel is not contained in the orthogonal complement of Lambda")
    for j in range(amb):
        e = fp.eye(amb)[j]
        if not fp.in_span(cur, e, p):
            rows.append(e)
            cur = np.vstack([cur, e])
    return np.array(rows, dtype=np.int64).reshape(-1, amb)


def is_complementary(S, Lam, C, skew=False, kernel=None):
    p = S.p
    amb = S.n if skew else S.m
    if kernel is None:
        kernel = kernel_skew(S, Lam) if skew else kernel_general(S, Lam)
    K = np.asarray(kernel).reshape(-1, amb)
    C = np.asarray(C, dtype=np.int64).reshape(-1, amb)
    if C.shape[0] != amb - K.shape[0]:
        return False
    if fp.rank(np.vstack([K, C]), p) != amb:
        return False
    if skew:
        Lam = as_attr(Lam, amb)
        head = C[:amb - K.shape[0] - Lam.shape[0]]
        if (Lam @ head.T % p).any():
            return False
    return True


@dataclass
class FormattingData:
    kernel: np.ndarray
    C: np.ndarray
    P: np.ndarray
    Q: np.ndarray  # right formatting matrix; P^T in the skew case


def formatting_matrices(S, Lam, C, skew=False, kernel=None):
    p = S.p
    amb = S.n if skew else S.m
    if kernel is None:
        kernel = kernel_skew(S, Lam) if skew else kernel_general(S, Lam)
    K = np.asarray(kernel, dtype=np.int64).reshape(-1, amb)
    C = np.asarray(C, dtype=np.int64).reshape(-1, amb)
    P = np.vstack([K, C]) % p
    if P.shape[0] != amb or fp.rank(P, p) != amb:
        raise Infeasible("kernel basis and complementary matrix are not a basis")
    if skew:
        Q = P.T.copy()
    else:
        Pi = annihilator_cols(Lam, S.n, p)
        Q = fp.complete_basis(Pi.T, S.n, p).T
    return FormattingData(K, C, P, Q)


def max_rank(S, budget=10 ** 6):
    if S.p ** S.d > budget:
        return None
    return max((fp.rank(A, S.p) for A in S.elements()), default=0)


@dataclass
class AttributeResult:
    Lam: np.ndarray
    kernel: np.ndarray
    rows: np.ndarray  # greedily chosen x_1..x_d
    r: int


def find_attribute_set(S, r=None, seed=0, c=8, skew=None, samples=64,
                       tries=200, budget=10 ** 6):
    """Greedy search for a small attribute set with a large kernel.

    Rows x_i are taken from a seeded sequence and accepted when adding them
    raises rank(X A) for more than half of the sampled coefficient vectors.
    The chosen rows are completed to an invertible P and Lam is a basis of
    the span of p_i A over the trailing rows.
    """
    p = S.p
    skew = S.skew if skew is None else skew
    amb = S.m
    if r is None:
        r = max_rank(S, budget)
        if r is None:
            raise BudgetExceeded("max rank not computable within budget; pass r")
    if S.d == 0 or r == 0:
        Lam = np.zeros((0, S.n), dtype=np.int64)
        ker = kernel_skew(S, Lam) if skew else kernel_general(S, Lam)
        return AttributeResult(Lam, ker, np.zeros((0, amb), dtype=np.int64), r)
    rng = fp.make_rng(seed, 2)
    if p ** S.d <= samples:
        alphas = fp.enumerate_vectors(S.d, p)
    else:
        alphas = fp.random_matrix(samples, S.d, p, rng)
    mats = S.combine(alphas)
    X = np.zeros((0, amb), dtype=np.int64)
    base = np.zeros(len(mats), dtype=np.int64)
    while X.shape[0] < amb:
        found = None
        for _ in range(tries):
            x = fp.random_matrix(1, amb, p, rng)
            if fp.in_span(X, x[0], p):
                continue
            Xn = np.vstack([X, x])
            ranks = np.array([fp.rank(Xn @ A % p, p) for A in mats])
            if np.mean(ranks > base) > 0.5:
                found = (Xn, ranks)
                break
        if found is None:
            break
        X, base = found
    P = fp.complete_basis(X, amb, p)
    tail = P[X.shape[0]:]
    imgs = [(v @ A) % p for v in tail for A in S.basis]
    Lam = fp.row_basis(np.array(imgs).reshape(-1, S.n), p) if imgs else np.zeros((0, S.n), dtype=np.int64)
    Lam = Lam.reshape(-1, S.n)
    ker = kernel_skew(S, Lam) if skew else kernel_general(S, Lam)
    lim = c * r * r
    ker_lim = c * r * r if skew else c * r
    if Lam.shape[0] > lim:
        raise BudgetExceeded("|Lambda| = %d exceeds %d" % (Lam.shape[0], lim))
    if ker.shape[0] < amb - ker_lim:
        raise BudgetExceeded("kernel dimension %d below %d" % (ker.shape[0], amb - ker_lim))
    return AttributeResult(Lam, ker, X, r)
