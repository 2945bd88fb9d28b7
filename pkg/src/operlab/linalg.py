"""Small dense matrices over any of the exact rings in ``rings``.

Matrices are tuples of row tuples.  Entries only need ``+ - *``, ``is_zero``
and a ``ring`` attribute exposing ``zero``/``one``, so the same routines run
over F_q, Z/p^N and polynomial rings.
"""

from __future__ import annotations

from typing import Sequence

from .errors import SingularMatrix

Matrix = tuple


def mat(ring, rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(ring(x) if not hasattr(x, "ring") else x for x in row) for row in rows)


def zeros(ring, n: int, m: int | None = None) -> Matrix:
    m = n if m is None else m
    return tuple(tuple(ring.zero for _ in range(m)) for _ in range(n))


def identity(ring, n: int) -> Matrix:
    return tuple(tuple(ring.one if i == j else ring.zero for j in range(n)) for i in range(n))


def diag(ring, entries) -> Matrix:
    n = len(entries)
    return tuple(tuple(ring(entries[i]) if i == j else ring.zero for j in range(n))
                 for i in range(n))


def shape(A: Matrix):
    return len(A), (len(A[0]) if A else 0)


def _ring_of(A: Matrix):
    return A[0][0].ring


def matadd(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def matsub(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def scale(c, A: Matrix) -> Matrix:
    return tuple(tuple(c * a for a in row) for row in A)


def matmul(A: Matrix, B: Matrix) -> Matrix:
    n, k = shape(A)
    k2, m = shape(B)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} @ {k2}x{m}")
    zero = _ring_of(A).zero
    cols = list(zip(*B))
    out = []
    for row in A:
        new_row = []
        for col in cols:
            acc = zero
            for a, b in zip(row, col):
                if not a.is_zero() and not b.is_zero():
                    acc = acc + a * b
            new_row.append(acc)
        out.append(tuple(new_row))
    return tuple(out)


def matvec(A: Matrix, v: Sequence) -> tuple:
    return tuple(col[0] for col in matmul(A, tuple((x,) for x in v)))


def matpow(A: Matrix, e: int) -> Matrix:
    if e < 0:
        return matpow(inverse(A), -e)
    result = identity(_ring_of(A), len(A))
    base = A
    while e:
        if e & 1:
            result = matmul(result, base)
        e >>= 1
        if e:
            base = matmul(base, base)
    return result


def commutator(A: Matrix, B: Matrix) -> Matrix:
    return matsub(matmul(A, B), matmul(B, A))


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def trace(A: Matrix):
    acc = _ring_of(A).zero
    for i in range(len(A)):
        acc = acc + A[i][i]
    return acc


def is_zero(A: Matrix) -> bool:
    return all(x.is_zero() for row in A for x in row)


def is_diagonal(A: Matrix) -> bool:
    return all(A[i][j].is_zero() for i in range(len(A)) for j in range(len(A)) if i != j)


def charpoly(M: Matrix) -> list:
    """[1, c_1, ..., c_n] with det(tI - M) = t^n + c_1 t^(n-1) + ... + c_n.

    Berkowitz' algorithm: division free, so valid over any commutative ring.
    """
    n = len(M)
    ring = _ring_of(M)
    one, zero = ring.one, ring.zero
    C = [one]
    for r in range(n):
        a = M[r][r]
        R = [M[r][j] for j in range(r)]
        S = [M[i][r] for i in range(r)]
        # toeplitz column: 1, -a, -R S, -R A S, ..., -R A^(r-1) S
        vec = [one, -a]
        cur = S
        for _ in range(r):
            acc = zero
            for x, y in zip(R, cur):
                acc = acc + x * y
            vec.append(-acc)
            cur = [sum((M[i][j] * cur[j] for j in range(r)), zero) for i in range(r)]
        # new C = T * C, T is (r+2) x (r+1) lower triangular toeplitz
        newC = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                if i - j < len(vec):
                    acc = acc + vec[i - j] * C[j]
            newC.append(acc)
        C = newC
    return C


def det(M: Matrix):
    n = len(M)
    c = charpoly(M)[-1]
    return c if n % 2 == 0 else -c


def inverse(M: Matrix) -> Matrix:
    """Gauss-Jordan with unit pivots (fields and the local rings Z/p^N)."""
    n = len(M)
    ring = _ring_of(M)
    A = [list(row) + [ring.one if i == j else ring.zero for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c].is_unit()), None)
        if piv is None:
            raise SingularMatrix("matrix is not invertible")
        A[c], A[piv] = A[piv], A[c]
        inv = A[c][c].inverse()
        A[c] = [x * inv for x in A[c]]
        for i in range(n):
            if i != c and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return tuple(tuple(row[n:]) for row in A)


def rank(M: Matrix) -> int:
    """Rank over a field (entries must support inverse())."""
    A = [list(row) for row in M]
    if not A:
        return 0
    nrows, ncols = len(A), len(A[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if not A[i][c].is_zero()), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        for i in range(nrows):
            if i != r and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == nrows:
            break
    return r


def map_entries(f, M: Matrix) -> Matrix:
    return tuple(tuple(f(x) for x in row) for row in M)


def to_json(M: Matrix):
    return [[x.to_json() for x in row] for row in M]
