"""Cayley tables, class-2 exponent-p verification, the Baer construction in
both directions, and the group isomorphism driver."""
import math
from dataclasses import dataclass

import numpy as np

from . import fp
from .errors import (Degenerate, Inconclusive, NotAGroup, NotClass2, NotPPower, ParseError,
                     WrongExponent)
from .tensor import (ISO, NOT, Decision, IsometryConfig, SkewTensor, is_nondegenerate, radical,
                     tensor_isometry)

FULL_ASSOC_LIMIT = 512
MAX_ORDER = 3 ** 8


@dataclass
class CayleyTable:
    mul: np.ndarray  # 0-based product table
    identity: int = 0

    @property
    def order(self):
        return self.mul.shape[0]


def _first_assoc_failure(mul, rows):
    for a in rows:
        left = mul[mul[a, :], :]  # (a b) c
        right = mul[a, mul]  # a (b c)
        bad = np.argwhere(left != right)
        if len(bad):
            b, c = bad[0]
            return (int(a), int(b), int(c))
    return None


def _generated(mul, e, gens):
    seen = np.zeros(mul.shape[0], dtype=bool)
    seen[e] = True
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(mul[x, g])
                if not seen[y]:
                    seen[y] = True
                    nxt.append(y)
        frontier = nxt
    return seen


def validate_table(mul, identity=0):
    """Raise NotAGroup unless mul is a group table with the given identity."""
    mul = np.asarray(mul, dtype=np.int64)
    N = mul.shape[0]
    if mul.shape != (N, N) or N == 0:
        raise NotAGroup("table is not square")
    if mul.min() < 0 or mul.max() >= N:
        raise NotAGroup("entry out of range")
    idx = np.arange(N)
    if not (np.array_equal(mul[identity], idx) and np.array_equal(mul[:, identity], idx)):
        bad = int(np.nonzero((mul[identity] != idx) | (mul[:, identity] != idx))[0][0])
        raise NotAGroup("identity law fails", witness=(identity, bad))
    for x in range(N):
        if not (mul[x] == identity).any():
            raise NotAGroup("element has no inverse", witness=(x,))
    srt = np.sort(mul, axis=1)
    if not (srt == idx).all():
        raise NotAGroup("a row is not a permutation", witness=(int(np.nonzero((srt != idx).any(axis=1))[0][0]),))
    if N <= FULL_ASSOC_LIMIT:
        bad = _first_assoc_failure(mul, range(N))
    else:
        # Light's test on a generating set
        gens = []
        seen = _generated(mul, identity, gens)
        for x in range(N):
            if not seen[x]:
                gens.append(x)
                seen = _generated(mul, identity, gens)
        bad = None
        for g in gens:
            left = mul[mul[:, g], :]
            right = mul[:, mul[g, :]]
            hit = np.argwhere(left != right)
            if len(hit):
                x, y = hit[0]
                bad = (int(x), int(g), int(y))
                break
    if bad is not None:
        raise NotAGroup("associativity fails", witness=bad)
    return CayleyTable(mul, identity)


def parse_cayley(text):
    lines = fp.content_lines(text)
    if not lines:
        raise ParseError("empty Cayley file")
    head = fp._ints(lines[0])
    if len(head) != 1 or head[0] < 1:
        raise ParseError("first line must be the group order")
    N = head[0]
    if len(lines) != N + 1:
        raise ParseError("expected %d table rows, got %d" % (N, len(lines) - 1))
    rows = []
    for ln in lines[1:]:
        vals = fp._ints(ln)
        if len(vals) != N:
            raise ParseError("expected %d entries per row" % N)
        if min(vals) < 1 or max(vals) > N:
            raise ParseError("entries must be 1-based indices in 1..%d" % N)
        rows.append(vals)
    mul = np.array(rows, dtype=np.int64) - 1
    idx = np.arange(N)
    if not (np.array_equal(mul[0], idx) and np.array_equal(mul[:, 0], idx)):
        raise NotAGroup("element 1 is not the identity", witness=(0,))
    return validate_table(mul, 0)


def format_cayley(g):
    """Text form; the identity is moved to position 1 when needed."""
    mul = g.mul
    if g.identity != 0:
        perm = np.arange(g.order)
        perm[[0, g.identity]] = perm[[g.identity, 0]]
        mul = relabel(g, perm).mul
    return "%d\n%s\n" % (g.order, fp.format_body(mul + 1))


def relabel(g, perm):
    """Table of g with element x renamed perm[x]."""
    perm = np.asarray(perm, dtype=np.int64)
    inv = np.argsort(perm)
    mul = perm[g.mul[np.ix_(inv, inv)]]
    return CayleyTable(mul, int(perm[g.identity]))


def random_relabel(g, seed):
    """Random relabeling that keeps the identity at index 0; returns
    (table, perm)."""
    rng = fp.make_rng(seed, 5)
    rest = rng.permutation(np.arange(1, g.order))
    perm = np.zeros(g.order, dtype=np.int64)
    others = [x for x in range(g.order) if x != g.identity]
    perm[g.identity] = 0
    perm[others] = rest
    return relabel(g, perm), perm


def cyclic_group(N):
    idx = np.arange(N)
    return CayleyTable((idx[:, None] + idx[None, :]) % N, 0)


def direct_product(g, h):
    a, b = g.order, h.order
    x = np.arange(a * b)
    gi, hi = x // b, x % b
    mul = g.mul[gi[:, None], gi[None, :]] * b + h.mul[hi[:, None], hi[None, :]]
    return CayleyTable(mul, g.identity * b + h.identity)


# class 2, exponent p

@dataclass
class PGroupData:
    p: int
    k: int
    center: np.ndarray  # element indices
    commutator: np.ndarray
    reps: np.ndarray  # coset representatives of a basis of G/Z
    cbasis: np.ndarray  # basis of [G, G]
    n: int
    m: int
    tensor: SkewTensor


def _prime_power(N):
    if N < 2:
        return None
    p = next(d for d in range(2, N + 1) if N % d == 0)
    k = 0
    while N % p == 0:
        N //= p
        k += 1
    return (p, k) if N == 1 else None


def inverses(g):
    return np.argmax(g.mul == g.identity, axis=1)


def commutator_table(g):
    """C[x, y] = x^-1 y^-1 x y."""
    inv = inverses(g)
    mul = g.mul
    xy = mul
    yx_inv = mul[inv[:, None], inv[None, :]]  # x^-1 y^-1
    return mul[yx_inv, xy]


def _span_elems(mul, e, gens, p):
    """Elements of the elementary abelian group generated by commuting
    elements gens, keyed by coefficient vector."""
    coords = {e: ()}
    for g in gens:
        new = {}
        for x, c in coords.items():
            y = x
            for a in range(p):
                new[y] = c + (a,)
                y = int(mul[y, g])
        coords = new
    return coords


def verify_class2_exp_p(g):
    """Baer data of a class-2 exponent-p group, or the violated property."""
    N, e, mul = g.order, g.identity, g.mul
    pk = _prime_power(N)
    if pk is None or pk[0] == 2:
        raise NotPPower("order %d is not a power of an odd prime" % N, witness=N)
    p, k = pk
    idx = np.arange(N)
    y = idx.copy()
    for _ in range(p - 1):
        y = mul[y, idx]
    bad = np.nonzero(y != e)[0]
    if len(bad):
        raise WrongExponent("element has order larger than %d" % p, witness=int(bad[0]))
    comm = commutator_table(g)
    if (comm == e).all():
        raise NotClass2("group is abelian")
    central = np.all(mul == mul.T, axis=1)
    center = np.nonzero(central)[0]
    nc = np.argwhere(~central[comm])
    if len(nc):
        x, yy = nc[0]
        raise NotClass2("commutator is not central; class exceeds 2", witness=(int(x), int(yy)))
    # [G, G]: generated by the (central, hence commuting) commutators
    cb = []
    inside = np.zeros(N, dtype=bool)
    inside[e] = True
    for c in np.unique(comm):
        if not inside[c]:
            cb.append(int(c))
            inside = _generated(mul, e, cb)
    commutator = np.nonzero(inside)[0]
    # G/Z: greedy representatives
    reps = []
    sub = central.copy()
    gens = [int(z) for z in center]
    for x in range(N):
        if not sub[x]:
            reps.append(x)
            sub = _generated(mul, e, gens + reps)
    n, m = len(reps), len(cb)
    coords = _span_elems(mul, e, cb, p)
    data = np.zeros((m, n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            c = coords[int(comm[reps[a], reps[b]])]
            data[:, a, b] = c
    T = SkewTensor(data, p)
    return PGroupData(p, k, center, commutator, np.array(reps), np.array(cb), n, m, T)


# Baer construction

def _encode_all(n, m, p):
    V = fp.enumerate_vectors(n + m, p)
    return V[:, :n], V[:, n:]


def group_from_tensor(G, allow_degenerate=False, max_order=MAX_ORDER):
    """Group on F_p^n x F_p^m with (u, w)(u', w') = (u+u', w+w'+b(u,u')/2).

    Element index = base-p number with the u digits first; (0, 0) is 0.
    A tensor with a radical yields a central direct factor; it is refused
    unless allow_degenerate is set.
    """
    p, m, n = G.p, G.m, G.n
    if not G.data.any():
        raise Degenerate("zero bilinear map gives an abelian group")
    if not allow_degenerate and not is_nondegenerate(G):
        raise Degenerate("tensor has a radical of dimension %d" % radical(G).shape[0])
    N = p ** (n + m)
    if N > max_order:
        raise Degenerate("order %d exceeds the cap %d" % (N, max_order))
    U, W = _encode_all(n, m, p)
    half = (p + 1) // 2
    b = np.einsum("aj,ijk,bk->abi", U, G.data, U) % p
    Wp = (W[:, None, :] + W[None, :, :] + half * b) % p
    Up = (U[:, None, :] + U[None, :, :]) % p
    digits = np.concatenate([Up, Wp], axis=2)
    weights = p ** np.arange(n + m - 1, -1, -1, dtype=np.int64)
    mul = digits @ weights
    g = CayleyTable(mul.astype(np.int64), 0)
    # exponent p: x^p = e for every element
    idx = np.arange(N)
    y = idx.copy()
    for _ in range(p - 1):
        y = mul[y, idx]
    assert (y == 0).all()
    return g


def decode(index, n, m, p):
    """(u, w) of a constructed element index."""
    digits = []
    for _ in range(n + m):
        digits.append(index % p)
        index //= p
    digits = digits[::-1]
    return np.array(digits[:n], dtype=np.int64), np.array(digits[n:], dtype=np.int64)


@dataclass
class Provenance:
    """How a table was built: group_from_tensor(transform(base, N, M)) with
    table index x holding constructed element code[x]."""
    base: SkewTensor
    N: np.ndarray
    M: np.ndarray
    code: np.ndarray


def build_group(base, N, M, seed=None, allow_degenerate=False):
    """(table, provenance) for transform(base, N, M), optionally relabeled."""
    from .tensor import transform
    X = transform(base, N, M)
    g = group_from_tensor(X, allow_degenerate=allow_degenerate)
    code = np.arange(g.order)
    if seed is not None:
        g, perm = random_relabel(g, seed)
        code = np.argsort(perm)
    return g, Provenance(base, np.asarray(N) % base.p, np.asarray(M) % base.p, code)


def _uw(prov, idx):
    b = prov.base
    return decode(int(prov.code[idx]), b.n, b.m, b.p)


def construction_hint(gd, prov_g, hd, prov_h):
    """(N0, M0) between the extracted tensors of two tables built from the
    same base tensor, derived from their constructions."""
    p = gd.p
    base = prov_g.base

    def parts(d, prov):
        U = np.array([_uw(prov, r)[0] for r in d.reps]).reshape(d.n, base.n)
        Wc = np.array([_uw(prov, c)[1] for c in d.cbasis]).reshape(d.m, base.m)
        return U @ prov.N % p, Wc, prov.M

    Vg, Wg, Mg = parts(gd, prov_g)
    Vh, Wh, Mh = parts(hd, prov_h)
    rad = radical(base)
    A = np.vstack([Vg, rad]) if rad.shape[0] else Vg
    X = fp.solve_left(A, Vh, p)
    if X is None:
        return None
    N0 = X[:, :gd.n] % p
    M0 = fp.inv(Wh.T, p) @ Mh @ fp.inv(Mg, p) @ Wg.T % p
    return N0, M0


@dataclass
class GroupConfig:
    branch: str = "auto"  # auto | small | baer
    threshold: float = None  # k <= threshold selects the small branch
    oracle_budget: int = 10 ** 6
    tensor: IsometryConfig = None


def group_decision(g, h, config=None, provenance=None, hint=None):
    """Decision for g vs h. A tensor witness refers to the extracted tensors;
    the small branch returns no witness."""
    from .oracle import group_isom_bruteforce
    cfg = config or GroupConfig()
    if g.order != h.order:
        return Decision(NOT, reason="orders differ")
    gd, hd = verify_class2_exp_p(g), verify_class2_exp_p(h)
    if gd.p != hd.p:
        return Decision(NOT, reason="primes differ")
    thr = cfg.threshold if cfg.threshold is not None else math.log2(gd.p) ** 5
    branch = cfg.branch
    if branch == "auto":
        branch = "small" if gd.k <= thr else "baer"
    if branch == "small":
        ok = group_isom_bruteforce(g, h, budget=cfg.oracle_budget)
        return Decision(ISO if ok else NOT, reason="generating-set search")
    if (gd.n, gd.m) != (hd.n, hd.m):
        return Decision(NOT, reason="(dim G/Z, dim [G,G]) differ")
    if hint is None and provenance is not None:
        hint = construction_hint(gd, provenance[0], hd, provenance[1])
    return tensor_isometry(gd.tensor, hd.tensor, cfg.tensor, hint=hint)


def group_isomorphism(g, h, config=None, provenance=None, hint=None):
    """True iff g and h are isomorphic (both class 2, exponent p).

    Raises Inconclusive when the tensor pipeline cannot decide.
    """
    d = group_decision(g, h, config, provenance, hint)
    if d.status == ISO:
        return True
    if d.status == NOT:
        return False
    raise Inconclusive("tensor pipeline inconclusive: %s" % d.reason, d)
