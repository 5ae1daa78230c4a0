"""Second, independent transcription of the FF construction.

Written entry by entry with 1-based indices so it can be read side by side
with the construction text. Two index slips in the text are corrected:
step 7 transposes Y_j[1..m'; n'+1..n] (the stated block has the wrong
shape), and in step 8 the -1 entry belongs to F_{t7+2l-1}, not F_{t7+l}.
"""
import numpy as np


def transcribe_ff(G, params, p):
    """Return (mats, marks) for a semi-canonical tensor G (shape m x n x n)."""
    m, n = G.shape[0], G.shape[1]
    aX, bX, aY, bY = params
    mp, nq = aX + bX, aY + bY
    D = 3 + n + mp

    def X(i, j, k):  # X_{G,i}[j, k], 1-based
        return int(G[i - 1, j - 1, k - 1])

    def Y(j, i, k):  # Y_{G,j}[i, k] = G[i, j, k], 1-based
        return int(G[i - 1, j - 1, k - 1])

    F = {}  # l -> {(r, c): value}, 1-based

    def setv(l, r, c, v):
        F.setdefault(l, {})
        if v % p:
            F[l][(r, c)] = v % p

    t1 = 3
    for l in range(1, 4):
        F.setdefault(l, {})
    setv(1, 1, 2, 1)
    setv(1, 2, 1, -1)
    setv(2, 1, 3, 1)
    setv(2, 3, 1, -1)
    setv(3, 2, 3, 1)
    setv(3, 3, 2, -1)

    t2 = t1 + m - aX
    for l in range(t1 + 1, t2 + 1):
        F.setdefault(l, {})
        i = aX + (l - t1)
        for r in range(1, nq + 1):
            for c in range(1, nq + 1):
                setv(l, 3 + r, 3 + c, X(i, r, c))

    t3 = t2 + m - mp
    for l in range(t2 + 1, t3 + 1):
        F.setdefault(l, {})
        i = mp + (l - t2)
        for r in range(nq + 1, n + 1):
            for c in range(nq + 1, n + 1):
                setv(l, 3 + r, 3 + c, X(i, r, c))

    t4 = t3 + m - mp
    for l in range(t3 + 1, t4 + 1):
        F.setdefault(l, {})
        i = mp + (l - t3)
        for r in range(1, nq + 1):
            for c in range(nq + 1, n + 1):
                setv(l, 3 + r, 3 + c, X(i, r, c))
        for r in range(nq + 1, n + 1):
            for c in range(1, nq + 1):
                setv(l, 3 + r, 3 + c, X(i, r, c))

    t5 = t4 + 2 * (n - aY)
    for l in range(1, n - aY + 1):
        a, b = t4 + 2 * l - 1, t4 + 2 * l
        F.setdefault(a, {})
        F.setdefault(b, {})
        setv(a, 1, 3 + aY + l, 1)
        setv(a, 3 + aY + l, 1, -1)
        setv(b, 2, 3 + aY + l, 1)
        setv(b, 3 + aY + l, 2, -1)

    t6 = t5 + n - aY
    for l in range(t5 + 1, t6 + 1):
        F.setdefault(l, {})
        j = l - t5 + aY
        for r in range(1, mp + 1):
            for c in range(1, nq + 1):
                setv(l, 3 + n + r, 3 + c, Y(j, r, c))
                setv(l, 3 + c, 3 + n + r, -Y(j, r, c))

    t7 = t6 + n - nq
    for l in range(t6 + 1, t7 + 1):
        F.setdefault(l, {})
        j = l - t6 + nq
        for r in range(1, mp + 1):
            for c in range(nq + 1, n + 1):
                setv(l, 3 + n + r, 3 + c, Y(j, r, c))
                setv(l, 3 + c, 3 + n + r, -Y(j, r, c))

    t = t7 + 2 * bX
    for l in range(1, bX + 1):
        a, b = t7 + 2 * l - 1, t7 + 2 * l
        F.setdefault(a, {})
        F.setdefault(b, {})
        setv(a, 1, 3 + n + aX + l, 1)
        setv(a, 3 + n + aX + l, 1, -1)
        setv(b, 2, 3 + n + aX + l, 1)
        setv(b, 3 + n + aX + l, 2, -1)

    mats = np.zeros((t, D, D), dtype=np.int64)
    for l, entries in F.items():
        for (r, c), v in entries.items():
            mats[l - 1, r - 1, c - 1] = v
    marks = {"t1": t1, "t2": t2, "t3": t3, "t4": t4, "t5": t5, "t6": t6, "t7": t7, "t": t}
    return mats, marks
