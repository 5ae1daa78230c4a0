import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgiso import fp
from pgiso.errors import (Degenerate, Inconclusive, NotAGroup, NotClass2, NotPPower, ParseError,
                          WrongExponent)
from pgiso.group import (CayleyTable, GroupConfig, build_group, cyclic_group, decode,
                         direct_product, format_cayley, group_decision, group_from_tensor,
                         group_isomorphism, parse_cayley, random_relabel, validate_table,
                         verify_class2_exp_p)
from pgiso.oracle import group_isom_bruteforce, space_isometry_bruteforce
from pgiso.tensor import INC, ISO, IsometryConfig, SkewTensor, is_nondegenerate, transform

from conftest import E, heisenberg, random_skew_tensor


def brute_is_group(mul):
    N = len(mul)
    for a, b, c in itertools.product(range(N), repeat=3):
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            return (a, b, c)
    return None


def test_trivial_group():
    g = parse_cayley("1\n1\n")
    assert g.order == 1 and g.mul.tolist() == [[0]]


def test_z3_round_trip():
    g = parse_cayley("3\n1 2 3\n2 3 1\n3 1 2\n")
    assert np.array_equal(g.mul, cyclic_group(3).mul)
    assert np.array_equal(g.mul, g.mul.T)
    assert np.array_equal(parse_cayley(format_cayley(g)).mul, g.mul)


@pytest.mark.parametrize("text", ["", "x\n", "2\n1 2\n", "2\n1 2\n2\n", "2\n1 2\n2 3\n"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_cayley(text)


def test_identity_must_come_first():
    with pytest.raises(NotAGroup):
        parse_cayley("2\n2 1\n1 2\n")


def test_swapped_entry_breaks_associativity():
    base = cyclic_group(5).mul
    found = 0
    for x in range(1, 5):
        for c1, c2 in itertools.combinations(range(1, 5), 2):
            mul = base.copy()
            mul[x, c1], mul[x, c2] = mul[x, c2], mul[x, c1]
            expected = brute_is_group(mul.tolist())
            if expected is None:
                validate_table(mul)
                continue
            with pytest.raises(NotAGroup) as exc:
                validate_table(mul)
            found += 1
            w = exc.value.witness
            if exc.value.args[0] == "associativity fails":
                a, b, c = w
                assert mul[mul[a, b], c] != mul[a, mul[b, c]]
    assert found > 0


def test_non_latin_rows_rejected():
    mul = cyclic_group(3).mul.copy()
    mul[1, 1] = 1
    with pytest.raises(NotAGroup):
        validate_table(mul)


def test_heisenberg_data():
    g = group_from_tensor(heisenberg(3))
    assert g.order == 27
    assert brute_is_group(g.mul.tolist()) is None
    assert not np.array_equal(g.mul, g.mul.T)
    d = verify_class2_exp_p(g)
    assert (d.p, d.k, d.n, d.m) == (3, 3, 2, 1)
    X = d.tensor.data[0]
    c = int(X[0, 1])
    assert c != 0 and X[1, 0] == (-c) % 3 and X[0, 0] == X[1, 1] == 0
    assert len(d.center) == 3 and np.array_equal(np.sort(d.center), np.sort(d.commutator))


def test_verify_rejections():
    with pytest.raises(WrongExponent) as exc:
        verify_class2_exp_p(cyclic_group(9))
    assert exc.value.witness is not None
    with pytest.raises(NotClass2):
        verify_class2_exp_p(direct_product(cyclic_group(3), cyclic_group(3)))
    with pytest.raises(NotPPower):
        verify_class2_exp_p(cyclic_group(6))
    with pytest.raises(NotPPower):
        verify_class2_exp_p(cyclic_group(8))


def test_group_from_tensor_rejects():
    with pytest.raises(Degenerate):
        group_from_tensor(SkewTensor(np.zeros((1, 2, 2), dtype=np.int64), 3, check_independent=False))
    deg = SkewTensor(np.array([E(0, 1, 3, 3)]), 3)
    with pytest.raises(Degenerate):
        group_from_tensor(deg)
    g = group_from_tensor(deg, allow_degenerate=True)
    d = verify_class2_exp_p(g)
    # the radical becomes a central direct factor
    assert (d.n, d.m, len(d.center)) == (2, 1, 9)
    with pytest.raises(Degenerate):
        group_from_tensor(heisenberg(3), max_order=26)


def test_decode_matches_construction():
    G = heisenberg(5)
    g = group_from_tensor(G)
    for x in (0, 1, 7, 124):
        u, w = decode(x, 2, 1, 5)
        assert int(u @ [25, 5] + w @ [1]) == x
    # (u, 0)(u', 0) = (u + u', b(u, u') / 2)
    x, y = 25, 5  # u = e1, u = e2
    u, w = decode(int(g.mul[x, y]), 2, 1, 5)
    assert u.tolist() == [1, 1] and w.tolist() == [3]  # 1/2 = 3 mod 5


@pytest.mark.parametrize("p", [3, 5])
def test_constructed_groups_are_class2_exp_p(p):
    rng = fp.make_rng(11, p)
    for n, m in [(2, 1), (3, 2)] if p == 3 else [(2, 1)]:
        G = random_skew_tensor(p, n, m, rng)
        g = group_from_tensor(G)
        d = verify_class2_exp_p(g)
        assert (d.n, d.m, d.p, d.k) == (n, m, p, n + m)
        # extracted tensor satisfies the nonvanishing Fact
        assert is_nondegenerate(d.tensor)


def test_baer_round_trip_against_oracle():
    rng = fp.make_rng(12)
    for _ in range(12):
        p = int(rng.choice([3, 5]))
        n, m = [(2, 1), (3, 2), (3, 3)][int(rng.integers(0, 3))] if p == 3 else (2, 1)
        G = random_skew_tensor(p, n, m, rng)
        d = verify_class2_exp_p(group_from_tensor(G))
        S = space_isometry_bruteforce((d.tensor.data, p), (G.data, p))
        assert S is not None


def desk_tensors():
    """p = 3 tensors whose groups have order 27 or 81."""
    rng = fp.make_rng(13)
    out = []
    for k in range(6):
        out.append(random_skew_tensor(3, 2, 1, rng))
        out.append(random_skew_tensor(3, 3, 1, rng, nondegenerate=False))
    return out


def test_baer_correspondence_both_ways():
    Ts = desk_tensors()
    groups = [group_from_tensor(T, allow_degenerate=True) for T in Ts]
    for (a, ga), (b, gb) in itertools.combinations(list(zip(Ts, groups)), 2):
        if a.n != b.n:
            assert not group_isom_bruteforce(ga, gb)
            continue
        iso_space = space_isometry_bruteforce((a.data, 3), (b.data, 3)) is not None
        assert group_isom_bruteforce(ga, gb) == iso_space


def test_group_isomorphism_self_and_orders():
    g = group_from_tensor(heisenberg(3))
    assert group_isomorphism(g, g)
    assert group_isomorphism(g, g, GroupConfig(branch="baer"))
    h = group_from_tensor(heisenberg(5))
    assert not group_isomorphism(g, h)


def test_heisenberg_both_branches():
    rng = fp.make_rng(14)
    N = fp.random_invertible(2, 3, rng)
    M = fp.random_invertible(1, 3, rng)
    g, pg = build_group(heisenberg(3), fp.eye(2), fp.eye(1), seed=1)
    h, ph = build_group(heisenberg(3), N, M, seed=2)
    assert group_isom_bruteforce(g, h)
    assert group_isomorphism(g, h, GroupConfig(branch="small"))
    d = group_decision(g, h, GroupConfig(branch="baer"), provenance=(pg, ph))
    assert d.status == ISO
    gd, hd = verify_class2_exp_p(g), verify_class2_exp_p(h)
    N0, M0 = d.witness
    assert transform(gd.tensor, N0, M0) == hd.tensor


def test_auto_branch_threshold():
    g = group_from_tensor(heisenberg(3))
    # log2(3)^5 is about 10, so k = 3 takes the small branch
    assert group_decision(g, g).reason == "generating-set search"
    assert group_decision(g, g, GroupConfig(threshold=2)).reason != "generating-set search"


def test_inconclusive_is_surfaced():
    p = 3
    base = SkewTensor(np.array([(E(0, 1, 4, p) + E(2, 3, 4, p)) % p]), p)
    g = group_from_tensor(base)
    h, _ = random_relabel(g, 3)
    cfg = GroupConfig(branch="baer", tensor=IsometryConfig(mode="guided"))
    # without provenance the unhinted tuples do not line up on this pair
    assert group_decision(g, h, cfg).status == INC
    with pytest.raises(Inconclusive) as exc:
        group_isomorphism(g, h, cfg)
    assert exc.value.decision.status == INC
    assert group_isom_bruteforce(g, h)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_relabel_is_isomorphic(seed):
    g = group_from_tensor(heisenberg(3))
    h, perm = random_relabel(g, seed)
    assert h.identity == 0
    assert np.array_equal(perm[g.mul], h.mul[np.ix_(perm, perm)])
    assert group_isom_bruteforce(g, h)


def test_format_cayley_puts_identity_first():
    g, _ = random_relabel(cyclic_group(3), 0)
    moved = CayleyTable(g.mul[np.ix_([1, 0, 2], [1, 0, 2])], 1)
    moved.mul = np.array([1, 0, 2])[moved.mul]
    text = format_cayley(moved)
    assert text.startswith("3\n1 2 3")
    assert group_isom_bruteforce(parse_cayley(text), cyclic_group(3))
