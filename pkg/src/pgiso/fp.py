"""Dense linear algebra over the prime field F_p.

Matrices are plain int64 numpy arrays with entries in {0,...,p-1}; the
prime is passed explicitly. Row vectors are 1-d arrays.
"""
import itertools

import numpy as np

from .errors import ParseError, ShapeMismatch, Singular


def check_prime(p):
    p = int(p)
    if p < 3:
        raise ValueError("p must be an odd prime, got %d" % p)
    d = 2
    while d * d <= p:
        if p % d == 0:
            raise ValueError("%d is not prime" % p)
        d += 1
    return p


def mat(A, p):
    """Copy A into a reduced int64 array."""
    return np.array(A, dtype=np.int64) % p


def eye(n):
    return np.eye(n, dtype=np.int64)


def zeros(*shape):
    return np.zeros(shape, dtype=np.int64)


def mul(*Ms, p):
    """Product of a chain of matrices mod p."""
    out = Ms[0]
    for M in Ms[1:]:
        out = (out @ M) % p
    return out % p


def rref(A, p):
    """Return (R, rank, T, pivots) with T.A = R and R in reduced row echelon form.

    Pivot rule: scan columns left to right, take the first nonzero row at or
    below the current one.
    """
    A = mat(A, p)
    if A.ndim != 2:
        raise ShapeMismatch("rref needs a matrix")
    rows, cols = A.shape
    T = eye(rows)
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
            T[[r, i]] = T[[i, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = A[r] * inv % p
        T[r] = T[r] * inv % p
        f = A[:, c].copy()
        f[r] = 0
        if f.any():
            A = (A - np.outer(f, A[r])) % p
            T = (T - np.outer(f, T[r])) % p
        pivots.append(c)
        r += 1
    return A, r, T, pivots


def rank(A, p):
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return rref(A, p)[1]


def row_basis(A, p):
    """Canonical basis (nonzero RREF rows) of the row span of A."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[0] == 0:
        return A.reshape(0, A.shape[1]) if A.ndim == 2 else zeros(0, 0)
    R, r, _, _ = rref(A, p)
    return R[:r]


def inv(A, p):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeMismatch("inverse of a non-square matrix")
    n = A.shape[0]
    if n == 0:
        return zeros(0, 0)
    _, r, T, _ = rref(A, p)
    if r < n:
        raise Singular("matrix has rank %d < %d" % (r, n))
    return T


def is_invertible(A, p):
    A = np.asarray(A)
    return A.ndim == 2 and A.shape[0] == A.shape[1] and rank(A, p) == A.shape[0]


def left_nullspace(A, p):
    """Canonical basis of {v : v.A = 0}, as rows."""
    A = np.asarray(A, dtype=np.int64)
    rows = A.shape[0]
    if rows == 0:
        return zeros(0, 0)
    if A.shape[1] == 0:
        return eye(rows)
    _, r, T, _ = rref(A, p)
    if r == rows:
        return zeros(0, rows)
    return row_basis(T[r:], p)


def right_nullspace(A, p):
    """Basis of {x : A.x^T = 0}, as rows."""
    return left_nullspace(np.asarray(A).T, p)


def solve_left(A, b, p):
    """One solution x of x.A = b, or None. b may be a stack of rows."""
    A = np.asarray(A, dtype=np.int64)
    b = np.atleast_2d(np.asarray(b, dtype=np.int64)) % p
    rows = A.shape[0]
    if rows == 0:
        return zeros(b.shape[0], 0) if not b.any() else None
    R, r, T, piv = rref(A, p)
    y = b[:, piv]
    if not np.array_equal((y @ R[:r]) % p, b):
        return None
    return (y @ T[:r]) % p


def in_span(basis, v, p):
    basis = np.asarray(basis)
    v = np.asarray(v) % p
    if not v.any():
        return True
    if basis.shape[0] == 0:
        return False
    return rank(np.vstack([basis, v.reshape(1, -1)]), p) == rank(basis, p)


def complete_basis(B, n, p):
    """Extend independent rows B to a basis of F_p^n with unit vectors e_j
    for the non-pivot columns of rref(B)."""
    B = np.asarray(B, dtype=np.int64).reshape(-1, n)
    if B.shape[0] == 0:
        return eye(n)
    _, r, _, piv = rref(B, p)
    extra = [j for j in range(n) if j not in piv]
    E = eye(n)[extra]
    return np.vstack([B, E])


def lex_compare(A, B):
    """-1, 0 or 1 according to row-major first-difference order."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ShapeMismatch("lex_compare on shapes %s and %s" % (A.shape, B.shape))
    d = np.nonzero(A.ravel() != B.ravel())[0]
    if len(d) == 0:
        return 0
    i = d[0]
    return -1 if A.ravel()[i] < B.ravel()[i] else 1


def enumerate_vectors(d, p):
    """All p^d vectors of F_p^d in lex order, as a (p^d, d) array."""
    if d == 0:
        return zeros(1, 0)
    idx = np.arange(p ** d, dtype=np.int64)
    out = np.empty((p ** d, d), dtype=np.int64)
    for j in range(d - 1, -1, -1):
        out[:, j] = idx % p
        idx //= p
    return out


def iter_gl(n, p):
    """Invertible n x n matrices in row-major lexical order."""
    vecs = enumerate_vectors(n, p)

    def rec(rows, basis):
        if len(rows) == n:
            yield np.array(rows, dtype=np.int64)
            return
        for v in vecs:
            if not v.any():
                continue
            if basis is not None and in_span(basis, v, p):
                continue
            nb = v.reshape(1, -1) if basis is None else np.vstack([basis, v])
            yield from rec(rows + [v], nb)

    if n == 0:
        yield zeros(0, 0)
        return
    yield from rec([], None)


def gl_order(n, p):
    out = 1
    for i in range(n):
        out *= p ** n - p ** i
    return out


def iter_subspaces(n, k, p):
    """All k-dim subspaces of F_p^n, each as its RREF basis (k x n)."""
    for piv in itertools.combinations(range(n), k):
        free = [(i, j) for i in range(k) for j in range(n)
                if j > piv[i] and j not in piv]
        for vals in itertools.product(range(p), repeat=len(free)):
            B = zeros(k, n)
            for i, c in enumerate(piv):
                B[i, c] = 1
            for (i, j), v in zip(free, vals):
                B[i, j] = v
            yield B


def is_skew(A, p):
    A = np.asarray(A) % p
    return np.array_equal(A, (-A.T) % p)


# randomness

def make_rng(seed, *keys):
    """Counter-based generator; keys split the stream deterministically.
    A tuple seed (s, k1, ...) is the same as make_rng(s, k1, ...)."""
    if isinstance(seed, tuple):
        seed, keys = seed[0], tuple(seed[1:]) + keys
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def random_matrix(rows, cols, p, rng):
    return rng.integers(0, p, size=(rows, cols), dtype=np.int64)


def random_invertible(n, p, rng):
    while True:
        A = random_matrix(n, n, p, rng)
        if rank(A, p) == n:
            return A


def random_skew(n, p, rng):
    U = np.triu(random_matrix(n, n, p, rng), 1)
    return (U - U.T) % p


# text format

def format_body(A):
    return "\n".join(" ".join(str(int(x)) for x in row) for row in np.asarray(A))


def format_matrix(A, p):
    A = np.asarray(A)
    head = "%d %d %d" % (p, A.shape[0], A.shape[1])
    body = format_body(A)
    return head + ("\n" + body if body else "") + "\n"


def _ints(line):
    try:
        return [int(x) for x in line.split()]
    except ValueError:
        raise ParseError("non-integer token in line %r" % line)


def parse_body(lines, rows, cols, p):
    if len(lines) < rows:
        raise ParseError("expected %d rows, got %d" % (rows, len(lines)))
    out = []
    for line in lines[:rows]:
        vals = _ints(line)
        if len(vals) != cols:
            raise ParseError("expected %d entries per row, got %d" % (cols, len(vals)))
        if any(v < 0 or v >= p for v in vals):
            raise ParseError("entry out of range in row %r" % line)
        out.append(vals)
    return np.array(out, dtype=np.int64).reshape(rows, cols)


def content_lines(text):
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def parse_matrix(text):
    """Inverse of format_matrix; returns (A, p)."""
    lines = content_lines(text)
    if not lines:
        raise ParseError("empty matrix file")
    head = _ints(lines[0])
    if len(head) != 3:
        raise ParseError("matrix header must be 'p rows cols'")
    p, rows, cols = head
    try:
        check_prime(p)
    except ValueError as e:
        raise ParseError(str(e))
    A = parse_body(lines[1:], rows, cols, p)
    if len(lines) != rows + 1:
        raise ParseError("trailing data after matrix body")
    return A, p
