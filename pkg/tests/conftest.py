import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pgiso import fp
from pgiso.tensor import SkewTensor, is_nondegenerate

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("repo")

PRIMES = [3, 5, 7]


def E(i, j, n, p):
    """Elementary skew matrix e_i ^ e_j (0-based)."""
    A = np.zeros((n, n), dtype=np.int64)
    A[i, j] = 1
    A[j, i] = p - 1
    return A


def heisenberg(p=3):
    return SkewTensor(np.array([E(0, 1, 2, p)]), p)


def feasible(n, m, nondegenerate=True):
    """Whether some m x n x n skew tensor has independent slices (and, if
    asked, a trivial radical: a single slice of odd size is always singular)."""
    if not 1 <= m <= n * (n - 1) // 2:
        return False
    return not (nondegenerate and m == 1 and n % 2)


def random_shape(rng, nmin=2, nmax=4, mmax=2, nondegenerate=True):
    while True:
        n = int(rng.integers(nmin, nmax + 1))
        m = int(rng.integers(1, mmax + 1))
        if feasible(n, m, nondegenerate):
            return n, m


def random_skew_tensor(p, n, m, rng, nondegenerate=True):
    if not feasible(n, m, nondegenerate):
        raise ValueError("no such tensor for n=%d, m=%d" % (n, m))
    while True:
        data = np.array([fp.random_skew(n, p, rng) for _ in range(m)], dtype=np.int64)
        if fp.rank(data.reshape(m, -1), p) < m:
            continue
        G = SkewTensor(data, p)
        if not nondegenerate or is_nondegenerate(G):
            return G


@st.composite
def fp_matrices(draw, p=None, rows=None, cols=None, max_dim=4):
    p = p or draw(st.sampled_from(PRIMES))
    r = rows if rows is not None else draw(st.integers(1, max_dim))
    c = cols if cols is not None else draw(st.integers(1, max_dim))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return np.array(vals, dtype=np.int64).reshape(r, c), p


@st.composite
def seeds(draw):
    return draw(st.integers(0, 2 ** 31 - 1))


@pytest.fixture
def rng():
    return fp.make_rng(12345)


# acceptance criterion -> summary line, filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
            terminalreporter.write_line(ACCEPTANCE[key])
