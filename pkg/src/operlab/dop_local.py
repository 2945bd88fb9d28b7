"""Level-(N-1) differential operators on Laurent monomials s^k.

The divided powers d^[r] of the Euler field d = s d/ds act on functions by
d^[r] s^k = C(k, r) s^k.  A rank-one structure with parameter a in Z/p^N acts
on s^k by C(k + a~, r) mod p, a~ the integer lift of a.  By Lucas' theorem
this only depends on (k + a~) mod p^N for r < p^N, so every table here is
periodic in k with period p^N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import LevelOutOfRange
from .rings import FieldElem, GF, WittElem, WittRing, coerce, common_field, field, lucas_binom


def _binom_poly(x: FieldElem, r: int) -> FieldElem:
    """x(x-1)...(x-r+1)/r! for 0 <= r < p."""
    acc = x.field.one
    for j in range(r):
        acc = acc * (x - j)
    return acc / math.factorial(r)


def exact_binom(m: int, j: int) -> int:
    """Integer binomial C(m, j), also for negative m."""
    if j < 0:
        return 0
    if m >= 0:
        return math.comb(m, j)
    return (-1) ** j * math.comb(-m + j - 1, j)


@dataclass(frozen=True)
class LevelStructure:
    """The rank-one level-(N-1) structure with parameter a.

    ``top_shift`` adds a constant to the top digit.  Any value outside F_p
    gives a structure that is *not* a Frobenius pullback; it exists only as a
    negative control for the curvature and Sol checks.
    """

    a: WittElem
    top_shift: Optional[FieldElem] = None

    @classmethod
    def make(cls, a: int, p: int, N: int, top_shift=None) -> "LevelStructure":
        return cls(WittRing(p, N)(a), top_shift)

    @property
    def p(self) -> int:
        return self.a.ring.p

    @property
    def N(self) -> int:
        return self.a.ring.N

    @property
    def level(self) -> int:
        return self.N - 1

    @property
    def scalar_field(self) -> GF:
        if self.top_shift is None:
            return field(self.p)
        return self.top_shift.field

    def is_genuine(self) -> bool:
        return self.top_shift is None or self.top_shift.in_prime_field()

    def digits(self, k: int) -> list[FieldElem]:
        F = self.scalar_field
        m = (k + self.a.value) % (self.p ** self.N)
        out = []
        for _ in range(self.N):
            out.append(F(m % self.p))
            m //= self.p
        if self.top_shift is not None:
            out[-1] = out[-1] + coerce(self.top_shift, F)
        return out

    def act(self, i: int, k: int) -> FieldElem:
        """Scalar of d^[p^i] on s^k."""
        return act(i, self, k)

    def op(self, r: int, k: int) -> FieldElem:
        """Scalar of the divided power d^[r] (0 <= r < p^N) on s^k."""
        if not 0 <= r < self.p ** self.N:
            raise LevelOutOfRange(f"d^[{r}] is outside level {self.level}")
        acc = self.scalar_field.one
        for c in self.digits(k):
            acc = acc * _binom_poly(c, r % self.p)
            r //= self.p
        return acc

    def truncate(self, N2: int) -> "LevelStructure":
        """Restriction to level N2 - 1."""
        if not 1 <= N2 <= self.N:
            raise LevelOutOfRange(f"cannot truncate length {self.N} to {N2}")
        shift = self.top_shift if N2 == self.N else None
        return LevelStructure(self.a.reduce(N2), shift)

    def to_json(self):
        out = {"a": self.a.value, "p": self.p, "N": self.N}
        if self.top_shift is not None:
            out["top_shift"] = self.top_shift.to_json()
        return out


def act(op_level: int, structure: LevelStructure, k: int) -> FieldElem:
    """Scalar of d^[p^i] on s^k under the structure: C(k + a~, p^i) mod p."""
    if not 0 <= op_level <= structure.level:
        raise LevelOutOfRange(f"operator level {op_level} outside 0..{structure.level}")
    if structure.top_shift is None:
        return lucas_binom((k + structure.a.value) % structure.a.ring.modulus,
                           structure.p ** op_level, structure.p)
    return structure.digits(k)[op_level]


def default_window(p: int, N: int, n: int = 1) -> int:
    return p ** N * n


def scalar_table(structure: LevelStructure, window: int) -> np.ndarray:
    """Array of shape (2*window+1, N): row k+window holds the d^[p^i] scalars on s^k."""
    ks = np.arange(-window, window + 1, dtype=np.int64)
    if structure.top_shift is None:
        return _kernels.lucas_digit_grid(ks, structure.a.value, structure.p, structure.N)
    return np.array([[c.code for c in structure.digits(int(k))] for k in ks], dtype=np.int64)


def pN_curvature(structure: LevelStructure, window: Optional[int] = None) -> dict:
    """Per-monomial scalar of (d^[p^(N-1)])^p - d^[p^(N-1)].

    On the Euler field the canonical p-th power of d^[p^(N-1)] is itself, so
    this difference is the p^N-curvature; it is zero exactly when the top
    scalars lie in F_p.
    """
    window = default_window(structure.p, structure.N) if window is None else window
    top = structure.level
    out = {}
    for k in range(-window, window + 1):
        c = act(top, structure, k)
        out[k] = c ** structure.p - c
    return out


def pN_curvature_vanishes(structure: LevelStructure, window: Optional[int] = None) -> bool:
    return all(v.is_zero() for v in pN_curvature(structure, window).values())


@dataclass(frozen=True)
class SolBasis:
    """Sol = span{s^k : k = residue mod p^N}; residue None means Sol = 0."""

    residue: Optional[int]
    p: int
    N: int

    def to_json(self):
        return {"residue": self.residue, "modulus": self.p ** self.N}


def sol(structure: LevelStructure, window: Optional[int] = None) -> SolBasis:
    """Horizontal monomials: s^k on which every d^[r], 0 < r < p^N, acts as zero."""
    p, N = structure.p, structure.N
    mod = p ** N
    window = default_window(p, N) if window is None else window
    window = max(window, mod)
    residues = set()
    for k in range(-window, window + 1):
        if all(act(i, structure, k).is_zero() for i in range(N)):
            residues.add(k % mod)
    if not residues:
        return SolBasis(None, p, N)
    if len(residues) != 1:  # pragma: no cover
        raise AssertionError("horizontal monomials in more than one residue class")
    return SolBasis(residues.pop(), p, N)


def canonical_structure_scalar(residue: int, i: int, k: int, p: int) -> FieldElem:
    """d^[p^i] on s^k = s^(k-r) * s^r with s^r horizontal: exact C(k - r, p^i) mod p."""
    return field(p)(exact_binom(k - residue, p ** i))


def rebuild_from_sol(basis: SolBasis) -> LevelStructure:
    """The Frobenius-pullback structure whose Sol is the given basis."""
    if basis.residue is None:
        raise ValueError("Sol = 0 does not come from a pullback")
    return LevelStructure(WittRing(basis.p, basis.N)(-basis.residue))


def same_structure(s1: LevelStructure, s2: LevelStructure, window: Optional[int] = None) -> bool:
    """A degree-0 surjection O -> O intertwining the structures exists iff all scalars agree."""
    if (s1.p, s1.N) != (s2.p, s2.N):
        return False
    window = default_window(s1.p, s1.N) if window is None else window
    for k in range(-window, window + 1):
        for i in range(s1.N):
            a, b = act(i, s1, k), act(i, s2, k)
            F = common_field(a.field, b.field)
            if coerce(a, F) != coerce(b, F):
                return False
    return True


def tensor(s1: LevelStructure, s2: LevelStructure) -> LevelStructure:
    """Tensor product, computed by Leibniz on the generator e1 (x) e2.

    d^[r](e1 e2) = sum_{u+v=r} d^[u] e1 * d^[v] e2; the result is matched
    against the structure with parameter a1 + a2, which must reproduce it.
    """
    if (s1.p, s1.N) != (s2.p, s2.N):
        raise ValueError("structures over different rings")
    candidate = LevelStructure(s1.a + s2.a)
    mod = s1.p ** s1.N
    for r in range(mod):
        total = field(s1.p).zero
        for u in range(r + 1):
            total = total + s1.op(u, 0) * s2.op(r - u, 0)
        if total != candidate.op(r, 0):
            raise AssertionError(f"Leibniz rule fails for the tensor at d^[{r}]")
    return candidate


def check_leibniz(structure: LevelStructure, ms=range(-3, 4), ks=range(-3, 4)) -> bool:
    """d^[r](s^m . s^k) = sum_j C(m, j) d^[r-j](s^k) for all r < p^N."""
    mod = structure.p ** structure.N
    F = structure.scalar_field
    for m in ms:
        for k in ks:
            for r in range(mod):
                lhs = structure.op(r, m + k)
                rhs = F.zero
                for j in range(r + 1):
                    c = exact_binom(m, j) % structure.p
                    if c:
                        rhs = rhs + structure.op(r - j, k) * c
                if lhs != rhs:
                    return False
    return True


@dataclass(frozen=True)
class ReductionReport:
    a: int
    p: int
    N: int
    window: int
    kernel_residue: Optional[int]
    mismatches: int
    passed: bool

    def to_json(self):
        return {"a": self.a, "p": self.p, "N": self.N, "window": self.window,
                "kernel_residue": self.kernel_residue, "mismatches": self.mismatches,
                "passed": self.passed}


def diagonal_reduction_report(a: WittElem, window: Optional[int] = None,
                              compare_to: Optional[LevelStructure] = None) -> ReductionReport:
    """Reduce the mod-p^N structure d + a to level N-1 and compare with LevelStructure(a).

    1. kernel of d + a on Z/p^N-coefficient monomials: the unit multiples of
       s^k with (k + a) = 0 in Z/p^N (scanned in the window);
    2. its mod-p span descends along Frobenius: the level-(N-1) structure with
       that horizontal residue, scalars from exact integer binomials;
    3. compare every d^[p^i] scalar on every s^k in the window.
    """
    p, N = a.ring.p, a.ring.N
    W = a.ring
    window = default_window(p, N) if window is None else window
    kernel = [k for k in range(-window, window + 1) if (W(k) + a).is_zero()]
    target = compare_to or LevelStructure(a)
    if not kernel:
        return ReductionReport(a.value, p, N, window, None, -1, False)
    residue = kernel[0] % W.modulus
    if any(k % W.modulus != residue for k in kernel):  # pragma: no cover
        raise AssertionError("kernel spans several residues")
    mismatches = 0
    for k in range(-window, window + 1):
        for i in range(N):
            mine = canonical_structure_scalar(residue, i, k, p)
            theirs = act(i, target, k)
            F = common_field(mine.field, theirs.field)
            if coerce(mine, F) != coerce(theirs, F):
                mismatches += 1
    return ReductionReport(a.value, p, N, window, residue, mismatches, mismatches == 0)


def verify_diagonal_reduction(a: WittElem, window: Optional[int] = None,
                   compare_to: Optional[LevelStructure] = None) -> bool:
    """True iff the diagonal reduction of d + a equals LevelStructure(a) on the window."""
    return diagonal_reduction_report(a, window, compare_to).passed
