"""Build a class-2 exponent-p group from a skew tensor, read the tensor back
from its Cayley table, and test isomorphism through both branches."""
from pgiso import fp
from pgiso.group import (GroupConfig, build_group, group_decision, group_isomorphism,
                         verify_class2_exp_p)
from pgiso.oracle import space_isometry_bruteforce
from pgiso.tensor import SkewTensor, transform
import numpy as np

p = 3
X = np.zeros((1, 2, 2), dtype=np.int64)
X[0, 0, 1], X[0, 1, 0] = 1, p - 1
base = SkewTensor(X, p)

rng = fp.make_rng(3)
N, M = fp.random_invertible(2, p, rng), fp.random_invertible(1, p, rng)
g, pg = build_group(base, fp.eye(2), fp.eye(1), seed=1)
h, ph = build_group(base, N, M, seed=2)
print("orders:", g.order, h.order)

d = verify_class2_exp_p(h)
print("extracted (p, k, n, m):", (d.p, d.k, d.n, d.m))
print("extracted tensor isometric to the base:",
      space_isometry_bruteforce((d.tensor.data, p), (base.data, p)) is not None)

print("generating-set search:", group_isomorphism(g, h, GroupConfig(branch="small")))
dec = group_decision(g, h, GroupConfig(branch="baer"), provenance=(pg, ph))
print("baer branch:", dec.status)
N0, M0 = dec.witness
print("witness maps Baer tensor to Baer tensor:",
      transform(verify_class2_exp_p(g).tensor, N0, M0) == d.tensor)
