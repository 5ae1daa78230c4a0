"""Encode a semi-canonical form as a skew matrix tuple (the FF tuple) and
decide isometry of two forms through restricted tuple isometry.

Index layout of an FF matrix (0-based): rows/cols 0..2 are selector
coordinates, 3..3+n'-1 the kernel part of F_p^n, 3+n'..3+n-1 the rest of
F_p^n, and 3+n..3+n+m'-1 the kernel part of F_p^m.
"""
from dataclasses import dataclass, field

import numpy as np

from . import fp
from .errors import Ambiguous, InvalidForm, NormalizationFailed, ParseError, ShapeMismatch
from .tuples import act, iter_skew_isometries, skew_tuple_isometry, tuple_equivalence


@dataclass
class FFTuple:
    p: int
    n: int
    m: int
    mprime: int
    nprime: int
    params: tuple
    mats: np.ndarray  # (t, D, D)
    marks: dict

    @property
    def dim(self):
        return 3 + self.n + self.mprime

    @property
    def t(self):
        return self.mats.shape[0]

    def A(self, l):
        k = 3 + self.n
        return self.mats[l][:k, :k]

    def B(self, l):
        k = 3 + self.n
        return self.mats[l][:k, k:]


def zero_pattern_ok(T, params):
    """The three kernel zero regions of a semi-canonical form."""
    aX, bX, aY, bY = params
    mp, np_ = aX + bX, aY + bY
    return not (T[:aX, :np_, :np_].any() or T[:mp, :aY, :np_].any()
                or T[:mp, :np_, :aY].any())


def build_ff(sc):
    """FF tuple of a semi-canonical form (steps 1-8 of the construction)."""
    G = sc.tensor
    p, m, n = G.p, G.m, G.n
    aX, bX, aY, bY = sc.params
    mp, nq = aX + bX, aY + bY
    T = G.data
    if not zero_pattern_ok(T, sc.params):
        raise InvalidForm("semi-canonical form violates its kernel zero pattern")
    D = 3 + n + mp
    Y = G.Y()  # Y[j] is m x n
    mats = []
    marks = {}

    def new():
        F = np.zeros((D, D), dtype=np.int64)
        mats.append(F)
        return F

    def put(F, i, j):
        F[i, j] = 1
        F[j, i] = p - 1

    # 1. selectors
    put(new(), 0, 1)
    put(new(), 0, 2)
    put(new(), 1, 2)
    marks["t1"] = len(mats)
    # 2. kernel block of X-slices aX+1..m
    for i in range(aX, m):
        new()[3:3 + nq, 3:3 + nq] = T[i, :nq, :nq]
    marks["t2"] = len(mats)
    # 3. complement block of X-slices m'+1..m
    for i in range(mp, m):
        new()[3 + nq:3 + n, 3 + nq:3 + n] = T[i, nq:, nq:]
    marks["t3"] = len(mats)
    # 4. off-diagonal blocks of the same slices
    for i in range(mp, m):
        F = new()
        F[3:3 + nq, 3 + nq:3 + n] = T[i, :nq, nq:]
        F[3 + nq:3 + n, 3:3 + nq] = T[i, nq:, :nq]
    marks["t4"] = len(mats)
    # 5. selectors for coordinates aY+1..n of F_p^n
    for l in range(n - aY):
        put(new(), 0, 3 + aY + l)
        put(new(), 1, 3 + aY + l)
    marks["t5"] = len(mats)
    # 6. Y-slices aY+1..n, kernel columns
    for j in range(aY, n):
        F = new()
        blk = Y[j][:mp, :nq]
        F[3 + n:, 3:3 + nq] = blk
        F[3:3 + nq, 3 + n:] = -blk.T
    marks["t6"] = len(mats)
    # 7. Y-slices n'+1..n, complement columns
    for j in range(nq, n):
        F = new()
        blk = Y[j][:mp, nq:]
        F[3 + n:, 3 + nq:3 + n] = blk
        F[3 + nq:3 + n, 3 + n:] = -blk.T
    marks["t7"] = len(mats)
    # 8. selectors for the surface coordinates of F_p^m'
    for l in range(bX):
        put(new(), 0, 3 + n + aX + l)
        put(new(), 1, 3 + n + aX + l)
    marks["t"] = len(mats)
    arr = np.array(mats, dtype=np.int64).reshape(-1, D, D) % p
    return FFTuple(p, n, m, mp, nq, tuple(sc.params), arr, marks)


def classify(F, n):
    """1 if the B-block is zero, 2 if the A-block is zero."""
    k = 3 + n
    a = F[:k, :k].any()
    b = F[:k, k:].any()
    if a and b:
        raise Ambiguous("matrix has both blocks nonzero")
    return 2 if b else 1


def type2_indices(ff):
    return [l for l in range(ff.t) if classify(ff.mats[l], ff.n) == 2]


def ff_properties(ff):
    """Check the structural properties of an FF tuple; returns a dict of bools."""
    p, D, k = ff.p, ff.dim, 3 + ff.n
    t5 = ff.marks["t5"]
    # each range is checked against its defining zero block; a zero matrix
    # (possible when m' = 0) satisfies both
    for F in ff.mats:
        classify(F, ff.n)
    out = {
        "skew": all(fp.is_skew(F, p) for F in ff.mats),
        "bounded": ff.t <= 3 + 3 * ff.m + 4 * ff.n + 2 * ff.mprime,
        "type1_prefix": all(not F[:k, k:].any() for F in ff.mats[:t5]),
        "type2_suffix": all(not F[:k, :k].any() for F in ff.mats[t5:]),
    }
    rel = [F for F in ff.mats if not F[:3].any()]
    if D > 3:
        stacked = np.hstack([F[3:, :] for F in rel]) if rel else np.zeros((D - 3, 0), dtype=np.int64)
        out["nonvanishing"] = stacked.shape[1] > 0 and fp.rank(stacked, p) == D - 3
    else:
        out["nonvanishing"] = True
    Bs = np.vstack([F[:k, k:] for F in ff.mats]) if ff.mprime else np.zeros((0, 0))
    out["b_span"] = (fp.rank(Bs, p) if ff.mprime else 0) == ff.mprime
    return out


def phi_set(ff):
    aX, bX, aY, bY = ff.params
    n = ff.n
    return ([0, 1, 2] + list(range(3 + aY, 3 + n))
            + list(range(3 + n + aX, 3 + n + ff.mprime)))


def witness_structure(S, ffG, ffH=None):
    """Structural checks for S with S FF_G S^T = FF_H; returns a dict of bools."""
    p, n, k = ffG.p, ffG.n, 3 + ffG.n
    aX, bX, aY, bY = ffG.params
    gamma = int(S[0, 0])
    Phi = phi_set(ffG)
    out = {"invertible": fp.is_invertible(S, p), "gamma_square": gamma * gamma % p == 1}
    diag_ok = True
    for c in Phi:
        col = S[:, c].copy()
        if col[c] != gamma:
            diag_ok = False
        col[c] = 0
        if col.any():
            diag_ok = False
    out["phi_diagonal"] = diag_ok
    out["selector_rows"] = not S[:3, 3:].any()
    VL = S[k:, :k]
    out["bottom_left_annihilates"] = all(not (VL @ ffG.A(l) % p).any() for l in range(ffG.t))
    blk = S[3:k, 3:k]
    g = np.eye(n - aY, dtype=np.int64) * gamma % p
    shape_ok = (not blk[:aY, aY:].any()) and np.array_equal(blk[aY:, aY:], g)
    out["block_shape"] = shape_ok
    return out


def split_S(S, n):
    k = 3 + n
    return S[:k, :k], S[:k, k:], S[k:, :k], S[k:, k:]


def _maps(S, ffG, ffH):
    return np.array_equal(act(S, ffG.mats, ffG.p), ffH.mats)


def repair_block_diagonal(S, ffG, ffH):
    """Block-diagonal S' from S when Q or W is invertible, else None."""
    p, n = ffG.p, ffG.n
    Q, R, V, W = split_S(S, n)
    cands = []
    if fp.is_invertible(Q, p):
        cands.append((Q, (W - V @ fp.inv(Q, p) @ R) % p))
    if W.shape[0] == 0 or fp.is_invertible(W, p):
        Wi = fp.inv(W, p) if W.shape[0] else W
        cands.append(((Q - R @ Wi @ V) % p, W))
    for Qn, Wn in cands:
        Sp = _block_diag(Qn, Wn)
        if fp.is_invertible(Sp, p) and _maps(Sp, ffG, ffH):
            return Sp
    return None


def _block_diag(Q, W):
    a, b = Q.shape[0], W.shape[0]
    S = np.zeros((a + b, a + b), dtype=np.int64)
    S[:a, :a] = Q
    S[a:, a:] = W
    return S


def _subspace_map_into(X, Y, p):
    """Basis of {k : k X in rowspan(Y)}."""
    a = X.shape[0]
    if a == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if Y.shape[0] == 0:
        return fp.left_nullspace(X, p).reshape(-1, a)
    N = fp.left_nullspace(np.vstack([X, Y]), p).reshape(-1, a + Y.shape[0])
    return fp.row_basis(N[:, :a], p).reshape(-1, a)


def _intersect(A, B, p, width):
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros((0, width), dtype=np.int64)
    N = fp.left_nullspace(np.vstack([A, B]), p).reshape(-1, A.shape[0] + B.shape[0])
    return fp.row_basis(N[:, :A.shape[0]] @ A % p, p).reshape(-1, width)


def _rows(X, width):
    return np.asarray(X, dtype=np.int64).reshape(-1, width)


@dataclass
class Normalized:
    J: np.ndarray
    K: np.ndarray
    S: np.ndarray  # stacked (Q'|0 / 0|R' / 0|W' / V'|0)
    q: int
    Qp: np.ndarray
    Rp: np.ndarray
    Wp: np.ndarray
    Vp: np.ndarray
    iterations: int


def _tau(S, ffG, t2):
    p, n = ffG.p, ffG.n
    Q, R, _, _ = split_S(S, n)
    k = 3 + n
    mats = [Q @ ffG.B(l) @ R.T % p for l in t2]
    H = np.hstack(mats) if mats else np.zeros((k, 0), dtype=np.int64)
    return H, fp.rank(H, p)


def _split_top(S, ffG, H, tau):
    """J0 rows: (top tau rows; rows giving (Q0|0); rows giving (0|R0))."""
    p, n = ffG.p, ffG.n
    k = 3 + n
    Q, R, _, _ = split_S(S, n)
    Lnull = fp.left_nullspace(H, p).reshape(-1, k) if H.shape[1] else fp.eye(k)
    QL, RL = Lnull @ Q % p, Lnull @ R % p
    UQ = fp.left_nullspace(RL, p).reshape(-1, Lnull.shape[0]) if RL.shape[1] else fp.eye(Lnull.shape[0])
    UR = fp.left_nullspace(QL, p).reshape(-1, Lnull.shape[0])
    if UQ.shape[0] + UR.shape[0] != k - tau:
        raise NormalizationFailed("bottom rows do not split into (Q0|0) and (0|R0)")
    JQ, JR = UQ @ Lnull % p, UR @ Lnull % p
    bottom = np.vstack([JQ, JR])
    top = fp.complete_basis(bottom, k, p)[bottom.shape[0]:]
    return top, JQ, JR


def _lower_split(S, Qrows, Rrows, ffG):
    """K0 pieces: I = rows with kV in span(Q) and kW in span(R), A' and B'."""
    p, n, mp = ffG.p, ffG.n, ffG.mprime
    _, _, V, W = split_S(S, n)
    Asub = _subspace_map_into(V, Qrows, p).reshape(-1, mp)
    Bsub = _subspace_map_into(W, Rrows, p).reshape(-1, mp)
    I = _intersect(Asub, Bsub, p, mp)
    Aext = _complement_within(I, Asub, p, mp)
    Bext = _complement_within(I, Bsub, p, mp)
    return I, Aext, Bext


def _complement_within(I, A, p, width):
    cur = I.copy()
    out = []
    for v in A:
        if not fp.in_span(cur, v, p):
            out.append(v)
            cur = np.vstack([cur, v])
    return _rows(out, width)


def normalize_S(S, ffG, ffH, max_iter=None):
    """Rewrite S (both Q and W singular) into the stacked normal form.

    Each rewrite keeps S FF_G S^T = FF_H and strictly lowers tau, the rank of
    the span of the rows of Q B_l R^T; at tau = 0 the rows split directly.
    """
    p, n, mp = ffG.p, ffG.n, ffG.mprime
    k = 3 + n
    t2 = type2_indices(ffG)
    max_iter = 3 + n if max_iter is None else max_iter
    cur = S.copy()
    H, tau = _tau(cur, ffG, t2)
    for it in range(max_iter + 1):
        if tau == 0:
            return _case1(cur, ffG, ffH, t2, it)
        if it == max_iter:
            break
        top, JQ, JR = _split_top(cur, ffG, H, tau)
        Q, R, V, W = split_S(cur, n)
        Q1, R1 = top @ Q % p, top @ R % p
        Q0, R0 = JQ @ Q % p, JR @ R % p
        I, _, _ = _lower_split(cur, np.vstack([Q1, Q0]), np.vstack([R1, R0]), ffG)
        if I.shape[0] != tau:
            raise NormalizationFailed("intersection has dimension %d, expected %d" % (I.shape[0], tau))
        zq = fp.solve_left(np.vstack([Q1, Q0]), I @ V % p, p)
        zr = fp.solve_left(np.vstack([R1, R0]), I @ W % p, p)
        if zq is None or zr is None:
            raise NormalizationFailed("top rows of K0 S are not in the expected spans")
        ZQ1, ZQ0 = zq[:, :tau], zq[:, tau:]
        ZR1, ZR0 = zr[:, :tau], zr[:, tau:]
        zeros_q = np.zeros((JR.shape[0], k), dtype=np.int64)
        zeros_r = np.zeros((JQ.shape[0], mp), dtype=np.int64)
        if fp.is_invertible(ZQ1, p):
            R1n = (R1 - fp.inv(ZQ1, p) @ (ZR1 @ R1 + ZR0 @ R0)) % p
            Tq = np.vstack([np.zeros((tau, k), dtype=np.int64), Q0, zeros_q])
            Tr = np.vstack([R1n, zeros_r, R0])
        elif fp.is_invertible(ZR1, p):
            # mirror image: clear R1 instead of Q1
            Q1n = (Q1 - fp.inv(ZR1, p) @ (ZQ1 @ Q1 + ZQ0 @ Q0)) % p
            Tq = np.vstack([Q1n, Q0, zeros_q])
            Tr = np.vstack([np.zeros((tau, mp), dtype=np.int64), zeros_r, R0])
        else:
            Q1n = ZR1 @ Q1 % p
            R1n = (2 * ZR1 - ZQ1) @ R1 % p
            Tq = np.vstack([Q1n, Q0, zeros_q])
            Tr = np.vstack([R1n, zeros_r, R0])
        Ttop = np.hstack([Tq, Tr]) % p
        coef = Ttop @ fp.inv(cur, p) % p
        X = coef[:, :k]
        if not fp.is_invertible(X, p):
            raise NormalizationFailed("rewrite is not an upper block-triangular change")
        new = np.vstack([fp.inv(X, p) @ Ttop % p, cur[k:]])
        if not _maps(new, ffG, ffH):
            raise NormalizationFailed("rewrite broke S FF_G S^T = FF_H")
        Hn, tn = _tau(new, ffG, t2)
        if tn >= tau:
            raise NormalizationFailed("tau did not decrease (%d -> %d)" % (tau, tn))
        cur, H, tau = new, Hn, tn
    raise NormalizationFailed("tau did not reach 0 within %d rewrites" % max_iter)


def _case1(S, ffG, ffH, t2, iters):
    p, n, mp = ffG.p, ffG.n, ffG.mprime
    k = 3 + n
    Q, R, V, W = split_S(S, n)
    H = np.zeros((k, 0), dtype=np.int64)
    _, JQ, JR = _split_top(S, ffG, H, 0)
    Q0, R0 = JQ @ Q % p, JR @ R % p
    q = Q0.shape[0]
    Asub = _subspace_map_into(V, Q0, p).reshape(-1, mp)
    Bsub = _subspace_map_into(W, R0, p).reshape(-1, mp)
    Kmat = np.vstack([Asub, Bsub]) % p
    J = np.vstack([JQ, JR]) % p
    if Kmat.shape[0] != mp or not fp.is_invertible(Kmat, p) or not fp.is_invertible(J, p):
        raise NormalizationFailed("case-1 decomposition is not invertible")
    W0, V0 = Asub @ W % p, Bsub @ V % p
    Sp = np.vstack([
        np.hstack([Q0, np.zeros((q, mp), dtype=np.int64)]),
        np.hstack([np.zeros((R0.shape[0], k), dtype=np.int64), R0]),
        np.hstack([np.zeros((W0.shape[0], k), dtype=np.int64), W0]),
        np.hstack([V0, np.zeros((V0.shape[0], mp), dtype=np.int64)]),
    ]) % p
    JK = _block_diag(J, Kmat)
    lhs = act(Sp, ffG.mats, p)
    rhs = act(JK, ffH.mats, p)
    if not np.array_equal(lhs, rhs):
        raise NormalizationFailed("S' FF_G S'^T differs from the (J, K) image of FF_H")
    w0 = W0.shape[0]
    for l in t2:
        Dl = lhs[l][:k, k:]
        if Dl[:q, w0:].any() or Dl[q:, :w0].any():
            raise NormalizationFailed("type-2 image block is not block diagonal")
        if lhs[l][k:, k:].any():
            raise NormalizationFailed("type-2 image has a nonzero lower-right block")
    return Normalized(J, Kmat, Sp, q, Q0, R0, W0, V0, iters)


def decide_normalized(norm, ffG, cap=None, stats=None):
    """Tuple equivalence of (V' B_l R'^T)_l against (R' B_l^T V'^T)_l."""
    p = ffG.p
    t2 = type2_indices(ffG)
    Vp, Rp = norm.Vp, norm.Rp
    left = np.array([Vp @ ffG.B(l) @ Rp.T % p for l in t2]).reshape(len(t2), Vp.shape[0], Rp.shape[0])
    right = np.array([Rp @ ffG.B(l).T @ Vp.T % p for l in t2]).reshape(len(t2), Rp.shape[0], Vp.shape[0])
    if not t2:
        return True
    kw = {} if cap is None else {"cap": cap}
    return tuple_equivalence(left, right, p, stats=stats, **kw) is not None


def block_mask(ff):
    D, k = ff.dim, 3 + ff.n
    mask = np.zeros((D, D), dtype=bool)
    mask[:k, :k] = True
    mask[k:, k:] = True
    return mask


def recover_witness(S, scG, scH):
    """(N, M) with transform(semic G, N, M) = semic H from block-diagonal S,
    or None."""
    from .tensor import transform
    p = scG.tensor.p
    n, m = scG.tensor.n, scG.tensor.m
    aX, bX, aY, bY = scG.params
    mp = aX + bX
    k = 3 + n
    gamma = int(S[0, 0])
    if gamma * gamma % p != 1:
        return None
    N = S[3:k, 3:k] * gamma % p
    N[aY + bY:, :aY] = 0
    M = fp.eye(m)
    M[:mp, :mp] = S[k:, k:] * gamma % p
    if not (fp.is_invertible(N, p) and fp.is_invertible(M, p)):
        return None
    if transform(scG.tensor, N, M) != scH.tensor:
        return None
    return N, M


def forward_S(N, M, sc):
    """diag(I_3, N, M[:m', :m']) for (N, M) in the isometry block shape."""
    mp = sc.params[0] + sc.params[1]
    return _block_diag(_block_diag(fp.eye(3), N), M[:mp, :mp])


@dataclass
class SemicDecision:
    status: str  # 'isometric' | 'not_isometric' | 'inconclusive'
    witness: object = None  # (N, M) on the semi-canonical forms
    path: str = ""
    counters: dict = field(default_factory=dict)


def _restricted_witness(ffG, ffH, scG, scH, cap, stats, limit=256):
    """(S, witness, exhausted): scans block-diagonal S for one that lifts to
    the forms; exhausted is False when the scan stopped at the limit."""
    seen = 0
    for S in iter_skew_isometries(ffG.mats, ffH.mats, ffG.p, mask=block_mask(ffG),
                                  cap=cap, stats=stats):
        seen += 1
        w = recover_witness(S, scG, scH)
        if w is not None:
            return S, w, True
        if seen >= limit:
            return None, None, False
    return None, None, True


def semic_isometry(scG, scH, cap=2 * 10 ** 6):
    """Decide isometry of two semi-canonical forms.

    Flow: parameter check; full skew tuple isometry on the FF tuples; block
    repair when Q or W is invertible; otherwise normalization followed by
    tuple equivalence. Every yes carries a witness verified on the tensors.
    """
    stats = {}
    counters = {}
    if scG.tensor.shape() != scH.tensor.shape():
        raise ShapeMismatch("forms have different shapes")
    if tuple(scG.params) != tuple(scH.params):
        return SemicDecision("not_isometric", path="parameters", counters=counters)
    ffG, ffH = build_ff(scG), build_ff(scH)
    if ffG.t != ffH.t:
        return SemicDecision("not_isometric", path="parameters", counters=counters)
    S = skew_tuple_isometry(ffG.mats, ffH.mats, ffG.p, cap=cap, stats=stats)
    counters["tuple_candidates"] = stats.get("candidates", 0)
    if S is None:
        return SemicDecision("not_isometric", path="tuple-isometry", counters=counters)
    p, n = ffG.p, ffG.n
    Q, _, _, W = split_S(S, n)
    if fp.is_invertible(Q, p) or W.shape[0] == 0 or fp.is_invertible(W, p):
        Sp = repair_block_diagonal(S, ffG, ffH)
        if Sp is not None:
            w = recover_witness(Sp, scG, scH)
            if w is not None:
                return SemicDecision("isometric", w, "repair", counters)
        Sb, w, _ = _restricted_witness(ffG, ffH, scG, scH, cap, stats)
        counters["tuple_candidates"] = stats.get("candidates", 0)
        if w is not None:
            counters["repair_fallback"] = 1
            return SemicDecision("isometric", w, "restricted-search", counters)
        return SemicDecision("inconclusive", path="repair-unrecoverable", counters=counters)
    counters["hard_case"] = 1
    try:
        norm = normalize_S(S, ffG, ffH)
        eq_stats = {}
        yes = decide_normalized(norm, ffG, cap=cap, stats=eq_stats)
        counters["equivalence_candidates"] = eq_stats.get("candidates", 0)
        path = "normalize"
    except NormalizationFailed as e:
        yes = None
        path = "normalize-failed: %s" % e
        counters["normalize_failed"] = 1
    Sb, w, exhausted = _restricted_witness(ffG, ffH, scG, scH, cap, stats)
    counters["tuple_candidates"] = stats.get("candidates", 0)
    if w is not None:
        if yes is False:
            counters["disagreement"] = 1
        return SemicDecision("isometric", w, path, counters)
    if yes:
        counters["disagreement"] = 1
        return SemicDecision("inconclusive", path=path + "; no block witness", counters=counters)
    if not exhausted:
        return SemicDecision("inconclusive", path=path + "; restricted search truncated",
                             counters=counters)
    # the restricted search covered every block-diagonal S
    return SemicDecision("not_isometric", path=path, counters=counters)


# text dump

def format_ff(ff):
    head = "%d %d %d" % (ff.p, ff.dim, ff.t)
    return "\n".join([head] + [fp.format_body(F) for F in ff.mats]) + "\n"


def parse_ff(text):
    """Parse a tuple dump into (p, mats)."""
    lines = fp.content_lines(text)
    if not lines:
        raise ParseError("empty tuple file")
    head = fp._ints(lines[0])
    if len(head) != 3:
        raise ParseError("tuple header must be 'p dim k'")
    p, d, k = head
    body = lines[1:]
    if len(body) != d * k:
        raise ParseError("expected %d body lines, got %d" % (d * k, len(body)))
    mats = [fp.parse_body(body[i * d:(i + 1) * d], d, d, p) for i in range(k)]
    return p, np.array(mats, dtype=np.int64).reshape(k, d, d)
