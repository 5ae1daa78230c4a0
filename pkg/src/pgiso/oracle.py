"""Brute-force ground truth. Straight transcriptions of the definitions;
only the fp primitives are shared with the pipeline."""
import itertools
from collections import deque

import numpy as np

from . import fp
from .errors import BudgetExceeded


def _basis_of(S):
    """(basis stack, p) from a MatrixSpace-like object or (stack, p)."""
    if isinstance(S, tuple):
        mats, p = S
        return np.asarray(mats, dtype=np.int64) % p, p
    return np.asarray(S.basis, dtype=np.int64) % S.p, S.p


def _span_rank(vecs, p):
    return fp.rank(np.asarray(vecs).reshape(len(vecs), -1), p) if len(vecs) else 0


def space_isometry_bruteforce(A, B, budget=10 ** 7):
    """Some S in GL(n) with S A S^T = B as spaces, or None."""
    a, p = _basis_of(A)
    b, q = _basis_of(B)
    if p != q or a.shape[1:] != b.shape[1:]:
        return None
    if _span_rank(a, p) != _span_rank(b, p):
        return None
    d, n = a.shape[0], a.shape[1]
    if d == 0:
        return fp.eye(n)
    if fp.gl_order(n, p) > budget:
        raise BudgetExceeded("|GL(%d, %d)| exceeds budget %d" % (n, p, budget))
    Bflat = b.reshape(d, -1)
    target = fp.rank(Bflat, p)
    # the identity first, so equal spaces report I
    for S in itertools.chain([fp.eye(n)], fp.iter_gl(n, p)):
        imgs = np.array([(S @ X @ S.T % p).ravel() for X in a])
        if fp.rank(np.vstack([Bflat, imgs]), p) == target:
            # image has dimension d inside a d-dimensional space: equality
            assert fp.rank(imgs, p) == d
            return S
    return None


def zero_subspace_bruteforce(S, L, R):
    """Canonical basis (vectorized, RREF) of the span of {A in S : L A R = 0}."""
    a, p = _basis_of(S)
    d = a.shape[0]
    hits = []
    for c in fp.enumerate_vectors(d, p):
        A = np.tensordot(c, a, axes=(0, 0)) % p if d else np.zeros(a.shape[1:], dtype=np.int64)
        if not (L @ A @ R % p).any():
            hits.append(A.ravel())
    return fp.row_basis(np.array(hits), p)


def kernel_bruteforce(S, Lam, skew=False, budget=10 ** 6):
    """Canonical basis of the kernel by enumerating every vector.

    General: v in F_p^m with v A in span(Lam) for every basis A.
    Skew: additionally x . v = 0 for every x in Lam.
    """
    a, p = _basis_of(S)
    m, n = a.shape[1], a.shape[2]
    Lam = np.asarray(Lam, dtype=np.int64).reshape(-1, n) % p
    r = fp.rank(Lam, p) if Lam.shape[0] else 0
    if p ** m > budget:
        raise BudgetExceeded("p^%d vectors exceed budget" % m)
    keep = []
    for v in fp.enumerate_vectors(m, p):
        if skew and (Lam @ v % p).any():
            continue
        ok = True
        for A in a:
            w = v @ A % p
            if w.any() and (r == 0 or fp.rank(np.vstack([Lam, w]), p) != r):
                ok = False
                break
        if ok:
            keep.append(v)
    return fp.row_basis(np.array(keep), p)


# groups

def _orders(mul, e):
    N = mul.shape[0]
    out = np.zeros(N, dtype=np.int64)
    for x in range(N):
        y, k = x, 1
        while y != e:
            y = mul[y, x]
            k += 1
        out[x] = k
    return out


def _generated(mul, e, gens):
    seen = {e}
    q = deque([e])
    while q:
        x = q.popleft()
        for g in gens:
            y = int(mul[x, g])
            if y not in seen:
                seen.add(y)
                q.append(y)
    return seen


def _generating_set(mul, e):
    gens = []
    sub = {e}
    for x in range(mul.shape[0]):
        if x not in sub:
            gens.append(x)
            sub = _generated(mul, e, gens)
            if len(sub) == mul.shape[0]:
                break
    return gens


def _extend(gm, ge, hm, he, gens, imgs):
    """Propagate x g_i -> phi(x) h_i; the map on <gens>, or None on conflict."""
    phi = {ge: he}
    q = deque([ge])
    while q:
        x = q.popleft()
        for g, h in zip(gens, imgs):
            y = int(gm[x, g])
            yi = int(hm[phi[x], h])
            if y in phi:
                if phi[y] != yi:
                    return None
            else:
                phi[y] = yi
                q.append(y)
    if len(set(phi.values())) != len(phi):
        return None
    return phi


def group_isom_bruteforce(g, h, budget=10 ** 6):
    """True iff the Cayley tables are isomorphic.

    Images of a generating set are chosen one generator at a time; each
    partial assignment is extended over the generated subgroup and pruned on
    the first inconsistency.
    """
    gm, ge = np.asarray(g.mul), g.identity
    hm, he = np.asarray(h.mul), h.identity
    if gm.shape != hm.shape:
        return False
    og, oh = _orders(gm, ge), _orders(hm, he)
    if sorted(og) != sorted(oh):
        return False
    gens = _generating_set(gm, ge)
    count = [0]

    def rec(i, imgs):
        if i == len(gens):
            phi = _extend(gm, ge, hm, he, gens, imgs)
            if phi is None or len(phi) != gm.shape[0]:
                return False
            f = np.array([phi[x] for x in range(gm.shape[0])])
            return bool(np.array_equal(f[gm], hm[f][:, f]))
        prev = _generated(hm, he, imgs) if imgs else {he}
        for y in range(hm.shape[0]):
            if oh[y] != og[gens[i]] or y in prev:
                continue
            count[0] += 1
            if count[0] > budget:
                raise BudgetExceeded("generator assignments exceed budget %d" % budget)
            if _extend(gm, ge, hm, he, gens[:i + 1], imgs + [y]) is None:
                continue
            if rec(i + 1, imgs + [y]):
                return True
        return False

    return rec(0, [])
