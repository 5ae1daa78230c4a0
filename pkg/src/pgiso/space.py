"""Matrix spaces with canonical bases, zero subspaces, semi-canonical bases
and sampled individualization matrices."""
import math
from dataclasses import dataclass

import numpy as np

from . import fp
from .errors import CapExceeded, NotSkew, ParseError, ShapeMismatch

DEFAULT_CAP = 10 ** 7


class MatrixSpace:
    """Span of linearly independent m x n matrices over F_p.

    `basis` is a (d, m, n) array kept in the order given; `canonical` is the
    RREF of the vectorized basis and decides membership and equality.
    """

    def __init__(self, basis, p, m=None, n=None, skew=None):
        p = fp.check_prime(p)
        basis = np.asarray(basis, dtype=np.int64) % p
        if basis.ndim == 2 and basis.size == 0:
            basis = basis.reshape(0, m or 0, n or 0)
        if basis.ndim != 3:
            raise ShapeMismatch("basis must be a stack of matrices")
        if basis.shape[0] == 0 and m is not None:
            basis = basis.reshape(0, m, n)
        self.p = p
        self.d, self.m, self.n = basis.shape
        self.basis = basis
        flat = basis.reshape(self.d, self.m * self.n)
        R, r, _, _ = fp.rref(flat, p) if self.d else (flat, 0, None, None)
        if r != self.d:
            raise ShapeMismatch("basis matrices are linearly dependent")
        self.canonical = R[:r]
        if skew is None:
            skew = self.m == self.n and all(fp.is_skew(B, p) for B in basis)
        elif skew and not all(fp.is_skew(B, p) for B in basis):
            raise NotSkew("basis matrix is not skew-symmetric")
        self.skew = bool(skew)

    @property
    def dim(self):
        return self.d

    @property
    def shape(self):
        return (self.m, self.n)

    def flat(self):
        return self.basis.reshape(self.d, self.m * self.n)

    def contains(self, A):
        A = np.asarray(A) % self.p
        if A.shape != (self.m, self.n):
            raise ShapeMismatch("matrix shape %s, space shape %s" % (A.shape, self.shape))
        return fp.in_span(self.canonical, A.ravel(), self.p)

    def coords(self, A):
        """Coefficient vector of A w.r.t. the stored basis, or None."""
        A = np.asarray(A) % self.p
        x = fp.solve_left(self.flat(), A.ravel(), self.p)
        return None if x is None else x[0]

    def combine(self, coeffs):
        """sum_i c_i B_i for one coefficient row or a stack of rows."""
        c = np.asarray(coeffs, dtype=np.int64)
        out = np.tensordot(c, self.basis, axes=([c.ndim - 1], [0])) % self.p
        return out

    def elements(self):
        """All p^d elements, ordered by coefficient vector in lex order."""
        return self.combine(fp.enumerate_vectors(self.d, self.p))

    def __eq__(self, other):
        return (isinstance(other, MatrixSpace) and self.p == other.p
                and self.shape == other.shape
                and np.array_equal(self.canonical, other.canonical))

    def __repr__(self):
        return "MatrixSpace(p=%d, %dx%d, dim=%d%s)" % (
            self.p, self.m, self.n, self.d, ", skew" if self.skew else "")


def span_from_generators(mats, p, shape=None):
    """Space spanned by mats; the basis is the greedy maximal independent
    subset in input order."""
    mats = [np.asarray(A, dtype=np.int64) % p for A in mats]
    if not mats:
        if shape is None:
            raise ShapeMismatch("empty generator list needs an explicit shape")
        return MatrixSpace(np.zeros((0,) + tuple(shape), dtype=np.int64), p)
    shp = mats[0].shape
    if any(A.shape != shp for A in mats):
        raise ShapeMismatch("generators have different shapes")
    keep = []
    cur = np.zeros((0, shp[0] * shp[1]), dtype=np.int64)
    for A in mats:
        if not fp.in_span(cur, A.ravel(), p):
            keep.append(A)
            cur = np.vstack([cur, A.ravel()])
    if not keep:
        return MatrixSpace(np.zeros((0,) + shp, dtype=np.int64), p)
    return MatrixSpace(np.array(keep), p)


def zero_subspace(S, L, R):
    """{A in S : L A R = 0}, via the nullspace of coeffs -> vec(L A R)."""
    p = S.p
    L = np.asarray(L, dtype=np.int64)
    R = np.asarray(R, dtype=np.int64)
    if L.shape[1] != S.m or R.shape[0] != S.n:
        raise ShapeMismatch("individualization matrices do not fit %dx%d" % S.shape)
    if S.d == 0:
        return S
    imgs = np.array([(L @ B @ R % p).ravel() for B in S.basis]).reshape(S.d, -1)
    C = fp.left_nullspace(imgs, p) if imgs.shape[1] else fp.eye(S.d)
    mats = S.combine(C).reshape(-1, S.m, S.n)
    return MatrixSpace(mats, p, S.m, S.n, skew=S.skew)


def _reduce_against(V, piv_rows, pivots, p):
    """Reduce rows of V modulo the span of RREF rows; zero result means in span."""
    V = V.copy()
    for row, c in zip(piv_rows, pivots):
        f = V[:, c].copy()
        if f.any():
            V = (V - np.outer(f, row)) % p
    return V


def _lex_argmins(K):
    """Indices of rows of K that are lexicographically minimal."""
    idx = np.arange(K.shape[0])
    for j in range(K.shape[1]):
        col = K[idx, j]
        idx = idx[col == col.min()]
        if len(idx) == 1:
            break
    return idx


def semi_canonical_basis(S, L, R, cap=DEFAULT_CAP, rng=None):
    """Greedy basis lex-minimizing the fingerprints L A_i R.

    Returns (mats, coeffs) where coeffs[i] are the coordinates of mats[i]
    w.r.t. S.basis. Ties go to the lexically smallest vec(A); with an rng
    they are broken at random among minimal fingerprints instead.
    """
    p, d = S.p, S.d
    if p ** d > cap:
        raise CapExceeded("p^d = %d^%d exceeds cap %d" % (p, d, cap))
    if d == 0:
        return np.zeros((0, S.m, S.n), dtype=np.int64), np.zeros((0, 0), dtype=np.int64)
    L = np.asarray(L, dtype=np.int64)
    R = np.asarray(R, dtype=np.int64)
    coeffs = fp.enumerate_vectors(d, p)
    elems = S.combine(coeffs)
    keys = np.einsum("am,kmn,nb->kab", L, elems, R) % p
    keys = keys.reshape(len(coeffs), -1)
    vecs = elems.reshape(len(coeffs), -1)
    full = np.hstack([keys, vecs])
    chosen = []
    for _ in range(d):
        if chosen:
            B, r, _, piv = fp.rref(np.array(chosen), p)
            red = _reduce_against(coeffs, B[:r], piv, p)
            alive = red.any(axis=1)
        else:
            alive = coeffs.any(axis=1)
        cand = np.nonzero(alive)[0]
        if rng is None:
            best = cand[_lex_argmins(full[cand])[0]]
        else:
            ties = cand[_lex_argmins(keys[cand])]
            best = ties[rng.integers(len(ties))]
        chosen.append(coeffs[best])
    C = np.array(chosen)
    return S.combine(C), C


@dataclass
class IndividualizationPair:
    L: np.ndarray
    R: np.ndarray
    t: int
    verified: object  # True / False, or None when not checked


def individualization_size(d, k, p, const=32.0):
    return int(math.ceil(const * max(d * math.log2(p), k) / math.sqrt(k)))


def check_individualization(S, L, R, k, budget=10 ** 6):
    """True iff every A in S of rank >= k has L A R != 0; None if too big."""
    p = S.p
    if p ** S.d > budget:
        return None
    for A in S.elements():
        if fp.rank(A, p) >= k and not (L @ A @ R % p).any():
            return False
    return True


def sample_individualization(S, k, seed, const=32.0, skew=False, budget=10 ** 6):
    """Random (L, R) of size t from the rank threshold k.

    A side whose dimension is at most t uses the identity. In the skew
    setting R = L^T.
    """
    if k < 1:
        raise ValueError("rank threshold must be >= 1")
    p = S.p
    t = individualization_size(S.d, k, p, const)
    rng = fp.make_rng(seed, 1)
    L = fp.eye(S.m) if t >= S.m else fp.random_matrix(t, S.m, p, rng)
    if skew:
        R = L.T.copy()
    else:
        R = fp.eye(S.n) if t >= S.n else fp.random_matrix(S.n, t, p, rng)
    return IndividualizationPair(L, R, t, check_individualization(S, L, R, k, budget))


# text format

def format_space(S):
    head = "%d %d %d %d" % (S.p, S.m, S.n, S.d)
    blocks = [fp.format_body(B) for B in S.basis]
    return "\n".join([head] + blocks) + "\n"


def parse_space(text):
    lines = fp.content_lines(text)
    if not lines:
        raise ParseError("empty space file")
    head = fp._ints(lines[0])
    if len(head) != 4:
        raise ParseError("space header must be 'p m n d'")
    p, m, n, d = head
    try:
        fp.check_prime(p)
    except ValueError as e:
        raise ParseError(str(e))
    body = lines[1:]
    if len(body) != m * d:
        raise ParseError("expected %d body lines, got %d" % (m * d, len(body)))
    mats = [fp.parse_body(body[i * m:(i + 1) * m], m, n, p) for i in range(d)]
    basis = np.array(mats, dtype=np.int64).reshape(d, m, n)
    try:
        return MatrixSpace(basis, p, m, n)
    except ShapeMismatch as e:
        raise ParseError(str(e))
