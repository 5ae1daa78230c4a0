"""Skew 3-tensors, transforms, characterization tuples, semi-canonical forms
and the tensor isometry driver."""
import itertools
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import fp
from .errors import (BoundsTooSmall, BudgetExceeded, ConstructionFailed, Degenerate,
                     InvalidTuple, NotSkew, ParseError, ShapeMismatch, Singular)
from .lowrank import complementary_matrix, is_complementary, kernel_general, kernel_skew
from .space import MatrixSpace, semi_canonical_basis, zero_subspace


class SkewTensor:
    """G in F_p^{m x n x n}, skew in the last two indices."""

    def __init__(self, data, p, check_independent=True):
        p = fp.check_prime(p)
        data = np.asarray(data, dtype=np.int64) % p
        if data.ndim != 3 or data.shape[1] != data.shape[2]:
            raise ShapeMismatch("tensor data must have shape (m, n, n)")
        if not np.array_equal(data, (-data.transpose(0, 2, 1)) % p):
            raise NotSkew("X-slices are not skew-symmetric")
        self.p = p
        self.data = data
        self.m, self.n = data.shape[0], data.shape[1]
        if check_independent and fp.rank(data.reshape(self.m, -1), p) != self.m:
            raise ShapeMismatch("X-slices are linearly dependent")

    def shape(self):
        return (self.p, self.m, self.n)

    def X(self):
        return self.data

    def Y(self):
        """Y[j][i, k] = G[i, j, k]."""
        return self.data.transpose(1, 0, 2)

    def Z(self):
        """Z[k][i, j] = G[i, j, k]."""
        return self.data.transpose(2, 0, 1)

    def space(self):
        return MatrixSpace(self.data, self.p, skew=True)

    def y_space(self):
        return MatrixSpace(self.Y(), self.p)

    def __eq__(self, other):
        return (isinstance(other, SkewTensor) and self.shape() == other.shape()
                and np.array_equal(self.data, other.data))

    def __repr__(self):
        return "SkewTensor(p=%d, m=%d, n=%d)" % (self.p, self.m, self.n)


def tensor_from_space(S):
    """Tensor whose X-slices are the canonical basis of the skew space S."""
    if not S.skew:
        raise NotSkew("tensor_from_space needs a skew space")
    mats = S.canonical.reshape(S.d, S.m, S.n)
    return SkewTensor(mats, S.p)


def transform(G, N, M):
    """X'_i = sum_i' M[i, i'] N X_i' N^T."""
    p = G.p
    N = np.asarray(N, dtype=np.int64) % p
    M = np.asarray(M, dtype=np.int64) % p
    if N.shape != (G.n, G.n) or M.shape != (G.m, G.m):
        raise ShapeMismatch("transform matrices do not fit the tensor")
    if not (fp.is_invertible(N, p) and fp.is_invertible(M, p)):
        raise Singular("transform matrices must be invertible")
    inner = np.einsum("ab,ibc,dc->iad", N, G.data, N) % p
    out = np.einsum("ij,jad->iad", M, inner) % p
    return SkewTensor(out, p, check_independent=False)


def radical(G):
    """Basis of {v : v X_i = 0 for all i}."""
    H = np.hstack(list(G.data)) if G.m else np.zeros((G.n, 0), dtype=np.int64)
    return fp.left_nullspace(H, G.p).reshape(-1, G.n)


def is_nondegenerate(G):
    return radical(G).shape[0] == 0


def split_radical(G):
    """(B, core): trans(B, I)(G) has the core in its top-left corner and
    zeros on the radical coordinates, which come last."""
    rad = radical(G)
    r = rad.shape[0]
    comp = fp.complete_basis(rad, G.n, G.p)[r:]
    B = np.vstack([comp, rad]).reshape(G.n, G.n) % G.p
    T = transform(G, B, fp.eye(G.m))
    k = G.n - r
    core = SkewTensor(T.data[:, :k, :k], G.p)
    return B, core


def rank_profile(G, budget=10 ** 5):
    """Multiset of ranks over all elements of the X-space, or None."""
    if G.p ** G.m > budget:
        return None
    elems = G.space().elements()
    return tuple(sorted(Counter(fp.rank(A, G.p) for A in elems).items()))


# characterization tuples

@dataclass
class CharacterizationTuple:
    Ls: np.ndarray
    L: np.ndarray
    Lam: np.ndarray
    Cs: np.ndarray
    C: np.ndarray

    def sizes(self):
        return (self.Ls.shape[0], self.L.shape[0], self.Lam.shape[0],
                self.Cs.shape[0], self.C.shape[0])


@dataclass
class TupleData:
    """Zero subspaces and kernels attached to (G, Ls, L, Lam)."""
    ZX: MatrixSpace
    ZY: MatrixSpace
    Ks: np.ndarray
    K: np.ndarray


def _require_core(G):
    if not is_nondegenerate(G):
        raise Degenerate("tensor has a nontrivial radical; split it first")


def tuple_data(G, Ls, L, Lam):
    p, m, n = G.p, G.m, G.n
    Ls = np.asarray(Ls, dtype=np.int64).reshape(-1, n) % p
    L = np.asarray(L, dtype=np.int64).reshape(-1, m) % p
    Lam = np.asarray(Lam, dtype=np.int64).reshape(-1, n) % p
    ZX = zero_subspace(G.space(), Ls, Ls.T)
    ZY = zero_subspace(G.y_space(), L, Ls.T)
    Ks = kernel_skew(ZX, Lam).reshape(-1, n)
    K = kernel_general(ZY, Lam).reshape(-1, m)
    return TupleData(ZX, ZY, Ks, K)


def complete_tuple(G, Ls, L, Lam):
    """Tuple with the canonical complementary matrices."""
    _require_core(G)
    p, m, n = G.p, G.m, G.n
    Ls = np.asarray(Ls, dtype=np.int64).reshape(-1, n) % p
    L = np.asarray(L, dtype=np.int64).reshape(-1, m) % p
    Lam = np.asarray(Lam, dtype=np.int64).reshape(-1, n) % p
    if fp.rank(Lam, p) != Lam.shape[0]:
        raise InvalidTuple("attribute vectors are dependent")
    td = tuple_data(G, Ls, L, Lam)
    Cs = complementary_matrix(td.ZX, Lam, skew=True, kernel=td.Ks)
    C = complementary_matrix(td.ZY, Lam, skew=False, kernel=td.K)
    return CharacterizationTuple(Ls, L, Lam, Cs.reshape(-1, n), C.reshape(-1, m))


def validate_tuple(G, T, td=None):
    """Raise InvalidTuple unless T is a characterization tuple for G."""
    p, m, n = G.p, G.m, G.n
    if T.Ls.ndim != 2 or T.Ls.shape[1] != n or T.L.ndim != 2 or T.L.shape[1] != m:
        raise InvalidTuple("individualization matrices have the wrong width")
    if T.Lam.shape[1:] != (n,) or fp.rank(T.Lam, p) != T.Lam.shape[0]:
        raise InvalidTuple("attribute set is not a set of independent vectors in F_p^n")
    if td is None:
        td = tuple_data(G, T.Ls, T.L, T.Lam)
    if not is_complementary(td.ZX, T.Lam, T.Cs, skew=True, kernel=td.Ks):
        raise InvalidTuple("C_skew is not a complementary matrix")
    if not is_complementary(td.ZY, T.Lam, T.C, skew=False, kernel=td.K):
        raise InvalidTuple("C is not a complementary matrix")
    return td


def random_tuple(G, seed, sizes=(1, 1, 1)):
    """Random Ls (a x n), L (b x m), Lam (c independent vectors) with
    canonical complementary matrices."""
    p, m, n = G.p, G.m, G.n
    a, b, c = sizes
    rng = fp.make_rng(seed, 3)
    Ls = fp.random_matrix(a, n, p, rng)
    L = fp.random_matrix(b, m, p, rng)
    c = min(c, n)
    while True:
        Lam = fp.random_matrix(c, n, p, rng)
        if fp.rank(Lam, p) == c:
            break
    return complete_tuple(G, Ls, L, Lam)


def derive_image_tuple(T, N0, M0, p):
    """Transport of T along (N0, M0) to trans(N0, M0)(G)."""
    Ni = fp.inv(N0, p)
    Mi = fp.inv(M0, p)
    return CharacterizationTuple(T.Ls @ Ni % p, T.L @ Mi % p, T.Lam @ np.asarray(N0).T % p,
                                 T.Cs @ Ni % p, T.C @ Mi % p)


# semi-canonical forms

@dataclass
class SemiCanonicalForm:
    tensor: SkewTensor
    params: tuple  # (alpha_X, beta_X, alpha_Y, beta_Y)
    N: np.ndarray
    M: np.ndarray
    tuple: CharacterizationTuple

    @property
    def mprime(self):
        return self.params[0] + self.params[1]

    @property
    def nprime(self):
        return self.params[2] + self.params[3]

    def kernel_region(self):
        return self.tensor.data[:self.mprime, :self.nprime, :self.nprime]


def kernel_pattern_ok(T, params):
    aX, bX, aY, bY = params
    mp, nq = aX + bX, aY + bY
    return not (T[:aX, :nq, :nq].any() or T[:mp, :aY, :nq].any()
                or T[:mp, :nq, :aY].any())


def build_semi_canonical_form(G, T, rng=None, cap=10 ** 7, td=None):
    """semic(G) with respect to T.

    The first rows of M (of N) are the coefficient vectors of a semi-canonical
    basis of the X-slices over ker (of the Y-slices over ker_skew); the
    complementary matrices fill the remaining rows.
    """
    _require_core(G)
    p, m, n = G.p, G.m, G.n
    td = validate_tuple(G, T, td)
    Ls = T.Ls
    K, Ks = td.K, td.Ks
    if K.shape[0]:
        XK = MatrixSpace(np.tensordot(K, G.data, axes=(1, 0)) % p, p, skew=True)
        _, cx = semi_canonical_basis(XK, Ls, Ls.T, cap=cap, rng=rng)
        Mtop = cx @ K % p
        aX = zero_subspace(XK, Ls, Ls.T).d
    else:
        Mtop, aX = np.zeros((0, m), dtype=np.int64), 0
    if Ks.shape[0]:
        YK = MatrixSpace(np.tensordot(Ks, G.Y(), axes=(1, 0)) % p, p)
        _, cy = semi_canonical_basis(YK, T.L, Ls.T, cap=cap, rng=rng)
        Ntop = cy @ Ks % p
        aY = zero_subspace(YK, T.L, Ls.T).d
    else:
        Ntop, aY = np.zeros((0, n), dtype=np.int64), 0
    M = np.vstack([Mtop, T.C]) % p
    N = np.vstack([Ntop, T.Cs]) % p
    if M.shape != (m, m) or not fp.is_invertible(M, p):
        raise ConstructionFailed("stacked M rows are not invertible")
    if N.shape != (n, n) or not fp.is_invertible(N, p):
        raise ConstructionFailed("stacked N rows are not invertible")
    params = (aX, K.shape[0] - aX, aY, Ks.shape[0] - aY)
    sc = transform(G, N, M)
    if not kernel_pattern_ok(sc.data, params):
        raise ConstructionFailed("kernel zero pattern violated")
    return SemiCanonicalForm(sc, params, N, M, T)


# decisions

@dataclass
class Decision:
    status: str  # 'isometric' | 'not_isometric' | 'inconclusive'
    witness: object = None  # (N, M) with transform(G, N, M) = H
    reason: str = ""
    counters: dict = field(default_factory=dict)

    @property
    def isometric(self):
        return self.status == "isometric"

    @property
    def decided(self):
        return self.status != "inconclusive"


ISO, NOT, INC = "isometric", "not_isometric", "inconclusive"


@dataclass
class IsometryConfig:
    mode: str = "guided"
    seed: int = 0
    sizes: tuple = (1, 1, 1)  # guided default tuple sizes
    bounds: tuple = (1, 1, 1, 3)  # enumerate: l1, l2, l3, l4
    budget: int = 20000  # enumerate: semi-canonical builds
    cap: int = 2 * 10 ** 6  # tuple backend candidates
    strict: bool = False
    oracle_budget: int = 10 ** 7
    profile_budget: int = 10 ** 5


def _verify(G, H, N, M):
    return transform(G, N, M) == H


def _lift(BG, BH, Nc, Mc, p, n):
    k = Nc.shape[0]
    D = fp.eye(n)
    D[:k, :k] = Nc
    return fp.inv(BH, p) @ D @ BG % p, Mc


def _core_hint(BG, BH, hint, p, k):
    N0, M0 = hint
    Np = BH @ N0 @ fp.inv(BG, p) % p
    return Np[:k, :k], np.asarray(M0) % p


def tensor_isometry(G, H, config=None, tuple_G=None, hint=None):
    """Decide whether transform(G, N, M) = H for some invertible N, M.

    Modes: 'guided' runs the pipeline on T (given or random) and its image
    under the hint; 'enumerate' fixes T for G within the bounds and scans all
    tuples of the same shape for H; 'oracle' runs the brute-force search.
    """
    cfg = config or IsometryConfig()
    if G.shape() != H.shape():
        raise ShapeMismatch("tensors differ in (p, m, n): %s vs %s" % (G.shape(), H.shape()))
    p, m, n = G.shape()
    counters = {}
    if cfg.mode == "oracle":
        from .oracle import space_isometry_bruteforce
        S = space_isometry_bruteforce(G.space(), H.space(), budget=cfg.oracle_budget)
        if S is None:
            return Decision(NOT, reason="oracle: no isometry", counters=counters)
        M = _slice_map(G, H, S)
        assert _verify(G, H, S, M)
        return Decision(ISO, (S, M), "oracle", counters)
    pG, pH = rank_profile(G, cfg.profile_budget), rank_profile(H, cfg.profile_budget)
    if pG is not None and pH is not None and pG != pH:
        return Decision(NOT, reason="rank profiles differ", counters=counters)
    BG, cG = split_radical(G)
    BH, cH = split_radical(H)
    if cG.n != cH.n:
        return Decision(NOT, reason="radical dimensions differ", counters=counters)
    if cfg.mode == "guided":
        d = _guided(cG, cH, cfg, tuple_G, hint, BG, BH, counters)
    elif cfg.mode == "enumerate":
        d = _enumerate(cG, cH, cfg, tuple_G, counters)
    else:
        raise ValueError("unknown mode %r" % cfg.mode)
    if d.status == ISO:
        N, M = _lift(BG, BH, d.witness[0], d.witness[1], p, n)
        if not _verify(G, H, N, M):
            raise ConstructionFailed("lifted witness does not verify")
        d.witness = (N, M)
    return d


def _slice_map(G, H, S):
    """M with transform(G, S, M) = H once S G S^T = H as spaces."""
    p = G.p
    inner = np.einsum("ab,ibc,dc->iad", S, G.data, S) % p
    A = inner.reshape(G.m, -1)
    Bm = H.data.reshape(H.m, -1)
    X = fp.solve_left(A, Bm, p)
    return X


def _run_pair(cG, cH, TG, TH, cfg, counters, rng=None, scG=None):
    from .reduction import semic_isometry
    if scG is None:
        scG = build_semi_canonical_form(cG, TG, rng=rng)
    scH = build_semi_canonical_form(cH, TH, rng=rng)
    sd = semic_isometry(scG, scH, cap=cfg.cap)
    for key, v in sd.counters.items():
        counters[key] = counters.get(key, 0) + v
    if sd.status == ISO:
        Ns, Ms = sd.witness
        N = fp.inv(scH.N, cG.p) @ Ns @ scG.N % cG.p
        M = fp.inv(scH.M, cG.p) @ Ms @ scG.M % cG.p
        if not _verify(cG, cH, N, M):
            raise ConstructionFailed("recovered witness does not verify")
        return sd.status, (N, M), sd.path
    return sd.status, None, sd.path


def _guided(cG, cH, cfg, tuple_G, hint, BG, BH, counters):
    p = cG.p
    TG = tuple_G if tuple_G is not None else random_tuple(cG, cfg.seed, cfg.sizes)
    hint_ok = None
    if hint is not None:
        Nc, Mc = _core_hint(BG, BH, hint, p, cG.n)
        if not (fp.is_invertible(Nc, p) and fp.is_invertible(Mc, p)):
            return Decision(INC, reason="hint is not invertible on the cores", counters=counters)
        hint_ok = _verify(cG, cH, Nc, Mc)
        TH = derive_image_tuple(TG, Nc, Mc, p)
        try:
            validate_tuple(cH, TH)
        except InvalidTuple as e:
            return Decision(INC, reason="hint-derived tuple invalid for H: %s" % e, counters=counters)
    else:
        TH = TG
        try:
            validate_tuple(cH, TH)
        except InvalidTuple:
            TH = complete_tuple(cH, TG.Ls, TG.L, TG.Lam)
    status, w, path = _run_pair(cG, cH, TG, TH, cfg, counters)
    if status == ISO:
        return Decision(ISO, w, "guided: " + path, counters)
    if hint_ok:
        counters["pipeline_rejected_hint"] = 1
    # a no under guessed tuples does not certify non-isometry
    return Decision(INC, reason="guided: no isometry under the %s tuples (%s)" % (
        "hinted" if hint is not None else "unhinted", path), counters=counters)


# enumerate mode

def _all_matrices(rows, cols, p):
    if rows * cols == 0:
        yield np.zeros((rows, cols), dtype=np.int64)
        return
    for v in fp.enumerate_vectors(rows * cols, p):
        yield v.reshape(rows, cols)


def _signature(G, Ls, L, Lam):
    td = tuple_data(G, Ls, L, Lam)
    p = G.p
    if td.K.shape[0]:
        XK = MatrixSpace(np.tensordot(td.K, G.data, axes=(1, 0)) % p, p, skew=True)
        aX = zero_subspace(XK, Ls, Ls.T).d
    else:
        aX = 0
    if td.Ks.shape[0]:
        YK = MatrixSpace(np.tensordot(td.Ks, G.Y(), axes=(1, 0)) % p, p)
        aY = zero_subspace(YK, L, Ls.T).d
    else:
        aY = 0
    return td, (td.ZX.d, td.ZY.d, td.K.shape[0], td.Ks.shape[0], aX, aY)


def _count_subspaces(n, k, p):
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def choose_fixed_tuple(G, bounds, seed=0, draws=4):
    """A tuple for G within the bounds that minimizes the size of the
    matching enumeration for the other tensor, or None."""
    p, m, n = G.p, G.m, G.n
    l1, l2, l3, l4 = bounds
    best = None
    rng = fp.make_rng(seed, 4)
    for a, b, c in itertools.product(range(l1 + 1), range(l2 + 1), range(min(l3, n) + 1)):
        for _ in range(draws):
            Ls = fp.random_matrix(a, n, p, rng)
            L = fp.random_matrix(b, m, p, rng)
            Lam = fp.random_matrix(c, n, p, rng)
            if fp.rank(Lam, p) != c:
                continue
            td, _ = _signature(G, Ls, L, Lam)
            rs, r = n - td.Ks.shape[0], m - td.K.shape[0]
            if rs > l4 or r > l4:
                continue
            cost = p ** (a * n + b * m + rs * n + r * m) * _count_subspaces(n, c, p)
            if best is None or cost < best[0]:
                best = (cost, complete_tuple(G, Ls, L, Lam))
    return None if best is None else best[1]


def _enumerate(cG, cH, cfg, tuple_G, counters):
    p, m, n = cG.p, cG.m, cG.n
    TG = tuple_G if tuple_G is not None else choose_fixed_tuple(cG, cfg.bounds, cfg.seed)
    if TG is None:
        if cfg.strict:
            raise BoundsTooSmall("no characterization tuple for G fits bounds %s" % (cfg.bounds,))
        return Decision(INC, reason="no tuple for G fits the bounds", counters=counters)
    _, sigG = _signature(cG, TG.Ls, TG.L, TG.Lam)
    scG = build_semi_canonical_form(cG, TG)
    a, b, c, rs, r = TG.sizes()
    builds = 0
    counters["tuples_enumerated"] = 0
    for Ls in _all_matrices(a, n, p):
        for L in _all_matrices(b, m, p):
            for Lam in fp.iter_subspaces(n, c, p):
                counters["tuples_enumerated"] += 1
                td, sig = _signature(cH, Ls, L, Lam)
                if sig != sigG:
                    continue
                for Cs in _all_matrices(rs, n, p):
                    if not is_complementary(td.ZX, Lam, Cs, skew=True, kernel=td.Ks):
                        continue
                    for C in _all_matrices(r, m, p):
                        if not is_complementary(td.ZY, Lam, C, skew=False, kernel=td.K):
                            continue
                        builds += 1
                        counters["semic_builds"] = builds
                        if builds > cfg.budget:
                            return Decision(INC, reason="enumeration budget %d exhausted" % cfg.budget,
                                            counters=counters)
                        TH = CharacterizationTuple(Ls, L, Lam, Cs, C)
                        try:
                            status, w, path = _run_pair(cG, cH, TG, TH, cfg, counters, scG=scG)
                        except BudgetExceeded:
                            counters["backend_budget"] = counters.get("backend_budget", 0) + 1
                            return Decision(INC, reason="tuple backend budget exhausted",
                                            counters=counters)
                        if status == ISO:
                            return Decision(ISO, w, "enumerate: " + path, counters)
                        if status == INC:
                            return Decision(INC, reason="enumerate: " + path, counters=counters)
    return Decision(NOT, reason="enumeration exhausted for a fixed tuple of G", counters=counters)


# text format

def format_tensor(G):
    head = "%d %d %d" % (G.p, G.m, G.n)
    return "\n".join([head] + [fp.format_body(X) for X in G.data]) + "\n"


def parse_tensor(text):
    lines = fp.content_lines(text)
    if not lines:
        raise ParseError("empty tensor file")
    head = fp._ints(lines[0])
    if len(head) != 3:
        raise ParseError("tensor header must be 'p m n'")
    p, m, n = head
    try:
        fp.check_prime(p)
    except ValueError as e:
        raise ParseError(str(e))
    body = lines[1:]
    if len(body) != m * n:
        raise ParseError("expected %d body lines, got %d" % (m * n, len(body)))
    data = np.array([fp.parse_body(body[i * n:(i + 1) * n], n, n, p) for i in range(m)],
                    dtype=np.int64).reshape(m, n, n)
    try:
        return SkewTensor(data, p)
    except (NotSkew, ShapeMismatch) as e:
        raise ParseError(str(e))


def space_isometry(A, B, config=None, hint=None):
    """tensor_isometry on the canonical bases of two skew spaces; spaces of
    different dimension are not isometric."""
    if (A.p, A.m, A.n) != (B.p, B.m, B.n):
        raise ShapeMismatch("spaces differ in p or matrix shape")
    if A.d != B.d:
        return Decision(NOT, reason="dimensions differ")
    return tensor_isometry(tensor_from_space(A), tensor_from_space(B), config, hint=hint)
