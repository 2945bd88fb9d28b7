"""PGL_n opers over Z/p^N indexed by regular a-tuples.

A regular a-tuple (a_1, ..., a_n) over Z/p^N (distinct mod p) gives the
connection d + diag(a) on O^n; the oper flag is spanned by the iterates
v_m = nabla^m(1, ..., 1), a Vandermonde matrix.  Tuples are taken up to
translation (twisting by a rank-one structure) and permutation.

Two sides are modeled:
  "N1": the mod-p^N connection itself (level 0 over Z/p^N);
  "1N": its diagonal reduction, a level-(N-1) structure over F_p, realized
        componentwise by ``dop_local.LevelStructure``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from . import dop_local, linalg
from .errors import (
    NotDormantModP,
    NotRegular,
    PrimeTooSmall,
    RepeatedEigenvalues,
    SideMismatch,
    VerificationFailure,
)
from .rings import NonSeparableReduction, NonSplitReduction, Poly, WittElem, WittRing, field, hensel_lift_roots
from .rings import is_prime, NotPrime

SIDES = ("N1", "1N")


def _check_params(n: int, p: int, N: int):
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if n < 1 or N < 1:
        raise ValueError("need n >= 1 and N >= 1")
    if n > 1 and not n < p:
        raise PrimeTooSmall(f"need n < p, got n={n}, p={p}")


def _check_side(side: str):
    if side not in SIDES:
        raise ValueError(f"level side must be one of {SIDES}, got {side!r}")


@dataclass(frozen=True)
class ATuple:
    entries: tuple
    p: int
    N: int

    @classmethod
    def make(cls, values: Sequence[int], p: int, N: int) -> "ATuple":
        mod = p ** N
        return cls(tuple(int(v) % mod for v in values), p, N)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def ring(self) -> WittRing:
        return WittRing(self.p, self.N)

    def witt(self) -> tuple:
        W = self.ring
        return tuple(W(v) for v in self.entries)

    def is_regular(self) -> bool:
        residues = [v % self.p for v in self.entries]
        return len(set(residues)) == len(residues)

    def translate(self, c: int) -> "ATuple":
        return ATuple.make([v + c for v in self.entries], self.p, self.N)

    def reduce(self, N2: int) -> "ATuple":
        return ATuple.make(self.entries, self.p, N2)

    def to_json(self):
        return list(self.entries)


@dataclass(frozen=True, order=True)
class ATupleClass:
    """Lex-minimal sorted representative over all translates and permutations."""

    canonical: tuple
    p: int
    N: int

    @property
    def n(self) -> int:
        return len(self.canonical)

    def tuple(self) -> ATuple:
        return ATuple(self.canonical, self.p, self.N)

    def to_json(self):
        return list(self.canonical)


def canonicalize(t: ATuple) -> ATupleClass:
    """Lex-min of sorted translates.  Only translates by -t_i can attain it
    (the minimum entry must become 0), so n candidates are compared."""
    if not t.is_regular():
        raise NotRegular(f"{t.entries} has colliding residues mod {t.p}")
    mod = t.p ** t.N
    best = min(tuple(sorted((v - c) % mod for v in t.entries)) for c in t.entries)
    return ATupleClass(best, t.p, t.N)


def canonicalize_bruteforce(t: ATuple) -> ATupleClass:
    """All p^N * n! translate/permutation candidates (test oracle)."""
    if not t.is_regular():
        raise NotRegular(f"{t.entries} has colliding residues mod {t.p}")
    mod = t.p ** t.N
    best = None
    for c in range(mod):
        for perm in itertools.permutations(t.entries):
            cand = tuple((v + c) % mod for v in perm)
            if cand == tuple(sorted(cand)) and (best is None or cand < best):
                best = cand
    return ATupleClass(best, t.p, t.N)


def miura_canonical(t: ATuple) -> ATuple:
    """Ordered tuple up to translation: shift so the first entry is 0."""
    if not t.is_regular():
        raise NotRegular(f"{t.entries} has colliding residues mod {t.p}")
    return t.translate(-t.entries[0]) if t.entries else t


def miura_classify(n: int, p: int, N: int) -> list[ATuple]:
    """Regular ordered tuples with first entry 0, lexicographic order."""
    _check_params(n, p, N)
    mod = p ** N
    out = []
    for tail in itertools.product(range(mod), repeat=n - 1):
        t = ATuple((0,) + tail, p, N)
        if t.is_regular():
            out.append(t)
    return out


def theta_classify(n: int, p: int, N: int, level_side: str = "N1") -> list[ATupleClass]:
    """Regular a-tuples up to translation and permutation, sorted.

    The forgetful map from ``miura_classify`` is checked to be exactly n!-to-1.
    """
    _check_side(level_side)
    tuples = miura_classify(n, p, N)
    fibers: dict = {}
    for t in tuples:
        c = canonicalize(t)
        fibers[c] = fibers.get(c, 0) + 1
    w = math.factorial(n)
    if any(v != w for v in fibers.values()):
        raise VerificationFailure("permutations do not act freely on translation classes")
    return sorted(fibers)


def class_count_formula(n: int, p: int, N: int) -> int:
    """p^((N-1)(n-1)) (p-1)...(p-n+1)/n!."""
    num = p ** ((N - 1) * (n - 1))
    for i in range(1, n):
        num *= p - i
    return num // math.factorial(n)


# ---------------------------------------------------------------------------
# oper data

def vandermonde_flag(values: Sequence[WittElem]) -> tuple:
    """Columns nabla^(n-j-1)(1,...,1) for d + diag(values): V[i][j] = a_i^(n-1-j)."""
    n = len(values)
    return tuple(tuple(values[i] ** (n - 1 - j) for j in range(n)) for i in range(n))


def binomial_flag(structures: Sequence[dop_local.LevelStructure]) -> tuple:
    """Columns d^[n-j-1](1,...,1) under the level structures, over F_p."""
    n = len(structures)
    return tuple(tuple(structures[i].op(n - 1 - j, 0) for j in range(n)) for i in range(n))


def _rank_mod_p(M, p: int) -> int:
    F = field(p)
    return linalg.rank(linalg.map_entries(
        lambda x: F(x.value) if isinstance(x, WittElem) else x, M))


def _columns(M, idx):
    return tuple(tuple(row[j] for j in idx) for row in M)


def flag_contract_holds(flag, p: int) -> bool:
    """Each step span(v_0..v_m) is a rank-(m+1) direct summand (mod-p rank test).

    With v_{m+1} = nabla(v_m) this is Griffiths transversality with
    isomorphic graded pieces.
    """
    n = len(flag)
    # column j of the flag is v_{n-1-j}
    for m in range(n):
        cols = [n - 1 - k for k in range(m + 1)]
        if _rank_mod_p(_columns(flag, cols), p) != m + 1:
            return False
    return True


def miura_transversal(flag, p: int) -> bool:
    """span(e_1..e_{n-j}) + span(v_0..v_{j-1}) = everything, for every j."""
    n = len(flag)
    for j in range(1, n):
        rows = range(n - j, n)
        cols = [n - 1 - k for k in range(j)]
        minor = tuple(tuple(flag[r][c] for c in cols) for r in rows)
        if _rank_mod_p(minor, p) != j:
            return False
    return True


@dataclass(frozen=True)
class WittOperData:
    a_class: ATupleClass
    side: str
    representative: ATuple
    connection_matrix: Optional[tuple] = dc_field(compare=False)
    oper_flag: tuple = dc_field(compare=False)
    structures: tuple = dc_field(default=(), compare=False)
    flag_det_unit: bool = True
    miura_transversal: bool = True

    @property
    def n(self) -> int:
        return self.a_class.n

    @property
    def p(self) -> int:
        return self.a_class.p

    @property
    def N(self) -> int:
        return self.a_class.N

    def oper_basis_matrix(self) -> tuple:
        """The connection written in the oper-flag basis: V^{-1} diag(a) V."""
        if self.side != "N1":
            raise ValueError("only the N1 side carries a matrix over Z/p^N")
        V = self.oper_flag
        return linalg.matmul(linalg.matmul(linalg.inverse(V), self.connection_matrix), V)

    def to_json(self):
        return {"canonical": self.a_class.to_json(), "side": self.side,
                "flag_det_unit": self.flag_det_unit, "miura_transversal": self.miura_transversal}


def build_witt_oper(t: ATuple, level_side: str = "N1") -> WittOperData:
    """Vandermonde oper data for a regular tuple; NotRegular if the flag degenerates."""
    _check_side(level_side)
    _check_params(t.n, t.p, t.N)
    W = t.ring
    if t.n == 1:
        cls = ATupleClass((0,), t.p, t.N)
        if level_side == "N1":
            return WittOperData(cls, "N1", t, ((W(t.entries[0]),),), ((W.one,),))
        s = (dop_local.LevelStructure(W(t.entries[0])),)
        return WittOperData(cls, "1N", t, None, ((field(t.p).one,),), s)
    if level_side == "N1":
        values = t.witt()
        flag = vandermonde_flag(values)
        if not linalg.det(flag).is_unit():
            raise NotRegular(f"Vandermonde determinant of {t.entries} is not a unit")
        conn = linalg.diag(W, list(values))
        structures = ()
    else:
        structures = tuple(dop_local.LevelStructure(v) for v in t.witt())
        flag = binomial_flag(structures)
        if linalg.det(flag).is_zero():
            raise NotRegular(f"binomial flag of {t.entries} is singular mod {t.p}")
        conn = None
    if not flag_contract_holds(flag, t.p):  # pragma: no cover
        raise VerificationFailure("oper flag fails the transversality contract")
    transversal = miura_transversal(flag, t.p)
    if not transversal:  # pragma: no cover
        raise VerificationFailure("coordinate flag is not transverse to the oper flag")
    return WittOperData(canonicalize(t), level_side, t, conn, flag, structures, True, transversal)


def _lift_eigenvectors(A, roots):
    """P with columns eigenvectors of A for the given simple roots (over Z/p^N)."""
    n = len(A)
    W = roots[0].ring
    I = linalg.identity(W, n)
    cols = []
    for i, r in enumerate(roots):
        proj = I
        for j, s in enumerate(roots):
            if j != i:
                proj = linalg.matmul(proj, linalg.matsub(A, linalg.scale(s, I)))
        col = next((c for c in range(n) if any(proj[k][c].is_unit() for k in range(n))), None)
        if col is None:  # pragma: no cover
            raise VerificationFailure("no unimodular eigenvector")
        cols.append([proj[k][col] for k in range(n)])
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def decompose_dormant_matrix(A, p: int, N: int) -> ATupleClass:
    """Class of the a-tuple with (O^n, d + A) isomorphic to the sum of (O, d + a_i).

    Mod-p eigenvalues must be distinct and in F_p (else RepeatedEigenvalues /
    NotDormantModP); roots are Hensel-lifted and the splitting is verified by
    conjugating A to diag(a) with an explicit eigenvector matrix.
    """
    W = WittRing(p, N)
    A = linalg.map_entries(lambda x: W(x.value if isinstance(x, WittElem) else int(x)), A)
    n = len(A)
    Fp = field(p)
    Abar = linalg.map_entries(lambda x: Fp(x.value), A)
    cp = linalg.charpoly(A)
    f = Poly(W, list(reversed(cp)))
    try:
        roots = hensel_lift_roots(f)
    except NonSeparableReduction:
        raise RepeatedEigenvalues("characteristic polynomial has a repeated root mod p")
    except NonSplitReduction:
        raise NotDormantModP("eigenvalues mod p are not all in F_p")
    if linalg.matpow(Abar, p) != Abar:  # pragma: no cover
        raise NotDormantModP("A^p != A mod p")
    P = _lift_eigenvectors(A, roots)
    D = linalg.matmul(linalg.matmul(linalg.inverse(P), A), P)
    if D != linalg.diag(W, roots):
        raise VerificationFailure("eigenvector matrix does not diagonalize A")
    return canonicalize(ATuple(tuple(r.value for r in roots), p, N))


# ---------------------------------------------------------------------------
# diagonal reduction and lifting

def diagonal_reduce(d: WittOperData, window: Optional[int] = None) -> WittOperData:
    """N1 data -> 1N data on the same class.

    Each summand d + a_i is reduced through its horizontal sections
    (``dop_local.diagonal_reduction_report``); the level structures are
    rebuilt from those Sol residues, and the reduced Vandermonde flag is
    checked to span the same flag as the divided-power iterates.
    """
    if d.side != "N1":
        raise SideMismatch("diagonal_reduce expects N1 data")
    t = d.representative
    structures = []
    for v in t.witt():
        report = dop_local.diagonal_reduction_report(v, window)
        if not report.passed:
            raise VerificationFailure(f"descent of a = {v.value} does not match the level structure")
        structures.append(dop_local.rebuild_from_sol(
            dop_local.SolBasis(report.kernel_residue, t.p, t.N)))
    structures = tuple(structures)
    if t.n == 1:
        return WittOperData(d.a_class, "1N", t, None, ((field(t.p).one,),), structures)
    flag = binomial_flag(structures)
    reduced = linalg.map_entries(lambda x: field(t.p)(x.value), d.oper_flag)
    n = t.n
    for m in range(n):
        cols = [n - 1 - k for k in range(m + 1)]
        a, b = _columns(reduced, cols), _columns(flag, cols)
        joint = tuple(ra + rb for ra, rb in zip(a, b))
        if linalg.rank(joint) != m + 1 or linalg.rank(b) != m + 1:
            raise VerificationFailure(f"reduced flag step {m} differs from the level-structure flag")
    transversal = miura_transversal(flag, t.p)
    return WittOperData(d.a_class, "1N", t, None, flag, structures,
                        not linalg.det(flag).is_zero(), transversal)


def canonical_diagonal_lift(d: WittOperData) -> WittOperData:
    """The N1 data whose diagonal reduction is d (identity on classes)."""
    if d.side != "1N":
        raise SideMismatch("canonical_diagonal_lift expects 1N data")
    lifted = build_witt_oper(d.a_class.tuple(), "N1")
    if diagonal_reduce(lifted) != d:
        raise VerificationFailure("canonical lift does not reduce back")
    return lifted


def truncate_class(c: ATupleClass, N2: int) -> ATupleClass:
    """Image of a class under Z/p^N -> Z/p^N2."""
    return canonicalize(c.tuple().reduce(N2))


# ---------------------------------------------------------------------------
# rank-one structures under tensor product

@dataclass(frozen=True)
class ConnElem:
    a: WittElem
    side: str = "N1"

    def __post_init__(self):
        _check_side(self.side)

    def structure(self) -> dop_local.LevelStructure:
        return dop_local.LevelStructure(self.a)

    def to_json(self):
        return {"a": self.a.value, "side": self.side}


def conn_tensor(x: ConnElem, y: ConnElem) -> ConnElem:
    if x.side != y.side:
        raise SideMismatch(f"cannot tensor {x.side} with {y.side}")
    if x.a.ring != y.a.ring:
        raise SideMismatch("structures over different rings")
    if x.side == "1N":
        # the level-structure tensor checks the Leibniz rule on the generator
        s = dop_local.tensor(x.structure(), y.structure())
        return ConnElem(s.a, "1N")
    return ConnElem(x.a + y.a, x.side)


def conn_identity(p: int, N: int, side: str = "N1") -> ConnElem:
    return ConnElem(WittRing(p, N).zero, side)


def conn_equal(x: ConnElem, y: ConnElem) -> bool:
    """Equality via the surjection criterion on scalar tables."""
    return x.side == y.side and dop_local.same_structure(x.structure(), y.structure())


def conn_order(x: ConnElem) -> int:
    cur, k = x, 1
    e = conn_identity(x.a.ring.p, x.a.ring.N, x.side)
    while cur != e:
        cur = conn_tensor(cur, x)
        k += 1
    return k
