"""Classical root systems, regular torus points and the type-A Lie matrices.

Families B, C, D only support counting (roots, Weyl group, regular points).
Type A additionally has the matrix picture: the principal sl_2-triple, the
adjoint quotient map ``chi`` and the Kostant section.

Kostant section normalization: q_1 = sum_i i(n-i) E_{i,i+1}, and the slice
is q_{-1} + sum_{j=1}^{n-1} c_j q_1^j, whose characteristic polynomial is
solved for (c_1, ..., c_{n-1}) one coefficient at a time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Sequence

from . import linalg
from .errors import PrimeTooSmall, UnrealizedFamily, VerificationFailure
from .rings import PrimeModulus, field, is_prime, NotPrime

FAMILIES = ("A", "B", "C", "D")


def _prime(p) -> int:
    p = p.p if isinstance(p, PrimeModulus) else int(p)
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    return p


@dataclass(frozen=True)
class WeylGenerator:
    """v -> (signs[i] * v[perm[i]])_i, a signed permutation of coordinates."""

    perm: tuple
    signs: tuple

    def __call__(self, v: Sequence[int]) -> tuple:
        return tuple(s * v[j] for j, s in zip(self.perm, self.signs))


@dataclass(frozen=True)
class RootDatum:
    family: str
    rank: int
    roots: tuple = dc_field(repr=False)
    weyl_generators: tuple = dc_field(repr=False)

    @property
    def dim(self) -> int:
        """Number of standard coordinates (n = rank + 1 for type A)."""
        return self.rank + 1 if self.family == "A" else self.rank

    @property
    def coxeter_number(self) -> int:
        r = self.rank
        return {"A": r + 1, "B": 2 * r, "C": 2 * r, "D": 2 * r - 2}[self.family]

    @property
    def weyl_order(self) -> int:
        """Order of W from the classical formula (checked by closure in tests)."""
        import math
        r = self.rank
        if self.family == "A":
            return math.factorial(r + 1)
        if self.family in ("B", "C"):
            return 2 ** r * math.factorial(r)
        return 2 ** (r - 1) * math.factorial(r)

    def __str__(self):
        return f"{self.family}{self.rank}"


def root_datum(family: str, rank: int) -> RootDatum:
    family = family.upper()
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    min_rank = {"A": 1, "B": 1, "C": 1, "D": 2}[family]
    if rank < min_rank:
        raise ValueError(f"{family}{rank} is not a valid root system")
    return _root_datum(family, rank)


@lru_cache(maxsize=None)
def _root_datum(family: str, rank: int) -> RootDatum:
    d = rank + 1 if family == "A" else rank

    def e(i, c=1):
        v = [0] * d
        v[i] = c
        return v

    roots = []
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            if family == "A":
                roots.append(tuple(a - b for a, b in zip(e(i), e(j))))
            elif i < j:
                for si in (1, -1):
                    for sj in (1, -1):
                        roots.append(tuple(a + b for a, b in zip(e(i, si), e(j, sj))))
    if family == "B":
        roots += [tuple(e(i, s)) for i in range(d) for s in (1, -1)]
    if family == "C":
        roots += [tuple(e(i, 2 * s)) for i in range(d) for s in (1, -1)]

    ident = tuple(range(d))
    plus = (1,) * d
    gens = []
    for i in range(d - 1):
        perm = list(ident)
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        gens.append(WeylGenerator(tuple(perm), plus))
    if family in ("B", "C"):
        signs = list(plus)
        signs[-1] = -1
        gens.append(WeylGenerator(ident, tuple(signs)))
    if family == "D":
        perm = list(ident)
        perm[-2], perm[-1] = perm[-1], perm[-2]
        signs = list(plus)
        signs[-2] = signs[-1] = -1
        gens.append(WeylGenerator(tuple(perm), tuple(signs)))
    return RootDatum(family, rank, tuple(sorted(set(roots))), tuple(gens))


def weyl_group_closure(datum: RootDatum) -> set:
    """All elements of W as signed-permutation matrices' actions on e_1..e_d."""
    d = datum.dim
    start = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for elem in frontier:
            # elem stores the images of the basis vectors; compose with each generator
            for g in datum.weyl_generators:
                image = tuple(g(v) for v in elem)
                if image not in seen:
                    seen.add(image)
                    nxt.append(image)
        frontier = nxt
    return seen


@dataclass(frozen=True, order=True)
class TorusPoint:
    """A point of t(F_p) in standard coordinates (residues in [0, p)).

    Type A points are n-vectors modulo the all-ones vector, stored with
    first coordinate 0.
    """

    coords: tuple
    p: int
    family: str = "A"

    @classmethod
    def make(cls, coords: Sequence[int], p: int, family: str = "A") -> "TorusPoint":
        c = [int(x) % p for x in coords]
        if family == "A" and c:
            c = [(x - c[0]) % p for x in c]
        return cls(tuple(c), p, family)

    def field_coords(self):
        F = field(self.p)
        return tuple(F(x) for x in self.coords)

    def traceless_lift(self) -> tuple:
        """Type A: the representative with coordinate sum 0 (needs p not dividing n)."""
        n = len(self.coords)
        shift = (-sum(self.coords) * pow(n, -1, self.p)) % self.p
        return tuple((x + shift) % self.p for x in self.coords)

    def to_json(self):
        return list(self.coords)


def _check_guard(datum: RootDatum, p: int):
    h = datum.coxeter_number
    if not p > h:
        raise PrimeTooSmall(f"need p > h = {h} for {datum}, got p = {p}")


def is_regular(datum: RootDatum, v: Sequence[int], p: int) -> bool:
    return all(sum(a * x for a, x in zip(alpha, v)) % p for alpha in datum.roots)


def act(datum: RootDatum, g: WeylGenerator, pt: TorusPoint) -> TorusPoint:
    return TorusPoint.make(g(pt.coords), pt.p, datum.family)


def regular_points(datum: RootDatum, p) -> list[TorusPoint]:
    """Every v in t(F_p) with alpha(v) != 0 for all roots, in lex order."""
    p = _prime(p)
    _check_guard(datum, p)
    out = []
    if datum.family == "A":
        for tail in itertools.product(range(p), repeat=datum.rank):
            v = (0,) + tail
            if is_regular(datum, v, p):
                out.append(TorusPoint(v, p, "A"))
    else:
        for v in itertools.product(range(p), repeat=datum.rank):
            if is_regular(datum, v, p):
                out.append(TorusPoint(v, p, datum.family))
    return out


def weyl_orbits(datum: RootDatum, p) -> list[list[TorusPoint]]:
    """Partition of the regular points into W-orbits, each sorted, ordered by minimum."""
    pts = regular_points(datum, p)
    remaining = set(pts)
    orbits = []
    for start in pts:
        if start not in remaining:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for x in frontier:
                for g in datum.weyl_generators:
                    y = act(datum, g, x)
                    if y not in orbit:
                        orbit.add(y)
                        nxt.append(y)
            frontier = nxt
        remaining -= orbit
        orbits.append(sorted(orbit))
    return orbits


def weyl_orbit_count(datum: RootDatum, p) -> int:
    """#(t_reg(F_p)/W) by explicit orbit partition; freeness is checked."""
    orbits = weyl_orbits(datum, p)
    w = datum.weyl_order
    bad = [o[0] for o in orbits if len(o) != w]
    if bad:
        raise VerificationFailure(f"W does not act freely: orbit of {bad[0]} is too small")
    return len(orbits)


def regular_class_formula(n: int, p: int) -> int:
    """(p-1)(p-2)...(p-n+1)/n! for type A_{n-1}."""
    import math
    num = 1
    for i in range(1, n):
        num *= p - i
    return num // math.factorial(n)


# ---------------------------------------------------------------------------
# type A matrices

CONVENTIONS = ("gl", "sl", "pgl")


@dataclass(frozen=True)
class LieMatrix:
    entries: tuple
    convention: str = "sl"
    family: str = "A"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown convention {self.convention!r}")

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def ring(self):
        return self.entries[0][0].ring

    def trace(self):
        return linalg.trace(self.entries)

    def to_json(self):
        return linalg.to_json(self.entries)


@dataclass(frozen=True)
class AdjointQuotientPoint:
    """Nontrivial characteristic-polynomial coefficients.

    gl: (e_1, ..., e_n), the elementary symmetric functions of the eigenvalues.
    sl/pgl: the coefficients of t^(n-2), ..., t^0 of det(tI - M).
    """

    coeffs: tuple
    convention: str = "sl"

    @property
    def n(self) -> int:
        return len(self.coeffs) + (0 if self.convention == "gl" else 1)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def to_json(self):
        return [c.to_json() if hasattr(c, "to_json") else c for c in self.coeffs]


def _as_lie(M, convention="sl") -> LieMatrix:
    return M if isinstance(M, LieMatrix) else LieMatrix(tuple(tuple(r) for r in M), convention)


def chi(M, convention: str | None = None) -> AdjointQuotientPoint:
    """Adjoint quotient map: characteristic-polynomial data of M."""
    M = _as_lie(M, convention or "sl")
    if M.family != "A":
        raise UnrealizedFamily(f"no matrix realization for family {M.family}")
    conv = convention or M.convention
    cp = linalg.charpoly(M.entries)
    if conv == "gl":
        return AdjointQuotientPoint(
            tuple(c if k % 2 == 0 else -c for k, c in enumerate(cp[1:], start=1)), "gl")
    return AdjointQuotientPoint(tuple(cp[2:]), conv)


def _int_matrix(ring, rows):
    return tuple(tuple(ring(x) for x in row) for row in rows)


def principal_nilpotents(n: int):
    """Integer matrices (q_{-1}, 2rho_check, q_1) of the principal sl_2."""
    qm = [[int(i == j + 1) for j in range(n)] for i in range(n)]
    qp = [[(i + 1) * (n - i - 1) if j == i + 1 else 0 for j in range(n)] for i in range(n)]
    h = [[(n - 1 - 2 * i) if i == j else 0 for j in range(n)] for i in range(n)]
    return qm, h, qp


def sl2_triple(n: int, p) -> tuple[LieMatrix, LieMatrix, LieMatrix]:
    """(q_{-1}, 2rho_check, q_1) over F_p; requires 2n < p."""
    pm = PrimeModulus(_prime(p), guard_rank=n)
    F = field(pm.p)
    qm, h, qp = principal_nilpotents(n)
    return (LieMatrix(_int_matrix(F, qm)), LieMatrix(_int_matrix(F, h)),
            LieMatrix(_int_matrix(F, qp)))


@lru_cache(maxsize=None)
def _kostant_slopes(n: int, p: int) -> tuple[int, ...]:
    """L_k (k = 2..n): the coefficient of c_{k-1} in the t^(n-k) char-poly coefficient."""
    F = field(p)
    out = []
    for k in range(2, n + 1):
        c = [0] * n
        c[k - 1] = 1
        with_c = linalg.charpoly(_slice_matrix(F, n, [F(x) for x in c]))[k]
        without = linalg.charpoly(_slice_matrix(F, n, [F.zero] * n))[k]
        slope = (with_c - without).code
        if slope == 0:
            raise PrimeTooSmall(f"Kostant slice degenerates for n={n} at p={p}")
        out.append(pow(slope, -1, p))
    return tuple(out)


def _slice_matrix(ring, n: int, c: Sequence) -> tuple:
    """q_{-1} + sum_{j>=1} c[j] q_1^j with entries in ring (c[0] unused)."""
    qm, _, qp = principal_nilpotents(n)
    M = [[ring.one if qm[i][j] else ring.zero for j in range(n)] for i in range(n)]
    power = [[int(i == j) for j in range(n)] for i in range(n)]
    for j in range(1, n):
        power = [[sum(power[a][b] * qp[b][d] for b in range(n)) for d in range(n)]
                 for a in range(n)]
        if c[j].is_zero():
            continue
        for a in range(n):
            for d in range(n):
                if power[a][d]:
                    M[a][d] = M[a][d] + c[j] * power[a][d]
    return tuple(tuple(r) for r in M)


def kostant_section(rho: AdjointQuotientPoint) -> LieMatrix:
    """q_{-1} + v with v centralizing q_1 and chi(q_{-1} + v) = rho (sl convention)."""
    if rho.convention == "gl":
        raise ValueError("kostant_section takes sl/pgl adjoint quotient points")
    coeffs = list(rho.coeffs)
    n = len(coeffs) + 1
    if n == 1:
        raise ValueError("need n >= 2")
    ring = coeffs[0].ring
    p = ring.base.p if hasattr(ring, "base") else ring.p
    slopes = _kostant_slopes(n, p)
    c = [ring.zero] * n
    for k in range(2, n + 1):
        current = linalg.charpoly(_slice_matrix(ring, n, c))[k]
        c[k - 1] = (coeffs[k - 2] - current) * slopes[k - 2]
    return LieMatrix(_slice_matrix(ring, n, c), rho.convention)


def kostant_inverse(rho: AdjointQuotientPoint) -> LieMatrix:
    """kappa^{-1}(rho): the centralizer part v of the Kostant slice."""
    M = kostant_section(rho)
    n = M.n
    qm, _, _ = principal_nilpotents(n)
    ring = M.ring
    return LieMatrix(linalg.matsub(M.entries, _int_matrix(ring, qm)), M.convention)


def adjoint_points(F, n: int):
    """All of c(F) for sl_n: tuples of n-1 field elements, in code-lex order."""
    for codes in itertools.product(range(F.q), repeat=n - 1):
        yield AdjointQuotientPoint(tuple(F.from_code(c) for c in codes))
