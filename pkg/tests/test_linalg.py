import itertools

import pytest
from hypothesis import given, settings, strategies as st

from operlab import linalg
from operlab.errors import SingularMatrix
from operlab.rings import Poly, WittRing, field


def _sign(perm):
    s = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                s = -s
    return s


def leibniz_det(M):
    ring = M[0][0].ring
    n = len(M)
    total = ring.zero
    for perm in itertools.permutations(range(n)):
        term = ring.one
        for i, j in enumerate(perm):
            term = term * M[i][j]
        total = total + term * _sign(perm)
    return total


def charpoly_oracle(M):
    """det(tI - M) with polynomial entries, by the Leibniz formula."""
    base = M[0][0].ring
    n = len(M)
    t = Poly(base, [0, 1])
    T = tuple(tuple((t if i == j else Poly(base, [])) - Poly(base, [M[i][j]]) for j in range(n))
              for i in range(n))
    det = leibniz_det(T)
    return [det.coeff(n - k) for k in range(n + 1)]


matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 48), min_size=n, max_size=n), min_size=n, max_size=n))


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_charpoly_matches_leibniz_over_F49(rows):
    F = field(7, 2)
    M = tuple(tuple(F.from_code(x) for x in r) for r in rows)
    assert linalg.charpoly(M) == charpoly_oracle(M)
    assert linalg.det(M) == leibniz_det(M)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_charpoly_over_witt_ring(rows):
    W = WittRing(5, 2)
    M = linalg.mat(W, rows)
    assert linalg.charpoly(M) == charpoly_oracle(M)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_inverse_over_z_mod_125(rows):
    W = WittRing(5, 3)
    M = linalg.mat(W, rows)
    if linalg.det(M).is_unit():
        Minv = linalg.inverse(M)
        assert linalg.matmul(M, Minv) == linalg.identity(W, len(M))
    else:
        with pytest.raises(SingularMatrix):
            linalg.inverse(M)


def test_matpow_and_rank():
    F = field(5)
    M = linalg.mat(F, [[1, 1], [0, 1]])
    assert linalg.matpow(M, 5) == linalg.identity(F, 2)
    assert linalg.rank(linalg.mat(F, [[1, 2], [2, 4]])) == 1
    assert linalg.rank(linalg.mat(F, [[1, 2, 3], [0, 1, 1]])) == 2
    assert linalg.matpow(linalg.mat(F, [[2, 0], [0, 3]]), -1) == linalg.mat(F, [[3, 0], [0, 2]])
