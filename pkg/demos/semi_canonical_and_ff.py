"""Walk a Heisenberg-type tensor through the semi-canonical form and the FF
tuple, then decide isometry of two forms with semic_isometry."""
import numpy as np

from pgiso import fp
from pgiso.reduction import build_ff, ff_properties, semic_isometry
from pgiso.tensor import (SkewTensor, build_semi_canonical_form, derive_image_tuple,
                          random_tuple, transform)

p = 3


def E(i, j, n):
    X = np.zeros((n, n), dtype=np.int64)
    X[i, j], X[j, i] = 1, p - 1
    return X


# two slices on F_3^4
G = SkewTensor(np.array([E(0, 1, 4), E(2, 3, 4)]), p)
# a wide attribute set leaves a nonempty kernel region
T = random_tuple(G, seed=0, sizes=(2, 1, 3))
sc = build_semi_canonical_form(G, T)
print("params (aX, bX, aY, bY):", sc.params)
print("kernel region shape:", sc.kernel_region().shape)

ff = build_ff(sc)
print(f"FF tuple: {ff.t} matrices of size {ff.dim}")
print("marks:", ff.marks)
print("properties:", ff_properties(ff))

# a random transform of G, with the tuple carried along
rng = fp.make_rng(1)
N0, M0 = fp.random_invertible(4, p, rng), fp.random_invertible(2, p, rng)
H = transform(G, N0, M0)
scH = build_semi_canonical_form(H, derive_image_tuple(T, N0, M0, p))
d = semic_isometry(sc, scH)
print("semic_isometry:", d.status, "via", d.path)
N, M = d.witness
print("witness maps form to form:", transform(sc.tensor, N, M) == scH.tensor)
