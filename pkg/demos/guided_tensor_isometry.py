"""Guided and enumerate runs of tensor_isometry on an isometric pair and on a
pair separated only by its rank profile."""
import numpy as np

from pgiso import fp
from pgiso.tensor import IsometryConfig, SkewTensor, tensor_isometry, transform

p = 3


def E(i, j, n=4):
    X = np.zeros((n, n), dtype=np.int64)
    X[i, j], X[j, i] = 1, p - 1
    return X


G = SkewTensor(np.array([E(0, 1), E(2, 3)]), p)
rng = fp.make_rng(7)
N0, M0 = fp.random_invertible(4, p, rng), fp.random_invertible(2, p, rng)
H = transform(G, N0, M0)

d = tensor_isometry(G, H, hint=(N0, M0))
print("guided with hint:", d.status, d.reason)
N, M = d.witness
print("witness verifies:", transform(G, N, M) == H)

d = tensor_isometry(G, H)
print("guided without hint:", d.status, d.reason)

# at n = 4 enumerate runs out of budget; two slices on F_3^3 finish at once
G3 = SkewTensor(np.array([E(0, 1, 3), E(1, 2, 3)]), p)
H3 = transform(G3, fp.random_invertible(3, p, rng), fp.random_invertible(2, p, rng))
d = tensor_isometry(G3, H3, IsometryConfig(mode="enumerate", budget=5000))
print("enumerate:", d.status, d.counters)

# E01+E23 has no rank 2 element in its span, E01 does
K = SkewTensor(np.array([(E(0, 1) + E(2, 3)) % p, (E(0, 2) - E(1, 3)) % p]), p)
d = tensor_isometry(G, K)
print("rank-profile pair:", d.status, d.reason)
d = tensor_isometry(G, K, IsometryConfig(mode="enumerate", budget=200, profile_budget=0))
print("same pair, enumerate with the profile check off:", d.status, d.reason)
