"""Exact coefficient rings: F_p, F_{p^d}, Z/p^N and polynomials over them.

Finite-field elements are stored as integer codes ``sum(c_i * p**i)`` of their
coefficient vector in F_p[t]/(modulus).  Witt vectors of F_p are realized as
Z/p^N directly.  Everything here is exact; there are no tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    FieldMismatch,
    NonSeparableReduction,
    NonSplitReduction,
    NotPrime,
    PrimeTooSmall,
    ZeroInput,
)

# scalar log/exp tables are built below this order; above it we multiply polynomials
_LOG_TABLE_LIMIT = 4096
_NUMPY_TABLE_LIMIT = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime, optionally carrying the rank guard ``2 * guard_rank < p``."""

    p: int
    guard_rank: Optional[int] = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if self.p == 2:
            raise PrimeTooSmall("p = 2 is not supported")
        if self.guard_rank is not None and not 2 * self.guard_rank < self.p:
            raise PrimeTooSmall(
                f"need 2n < p, got n={self.guard_rank}, p={self.p}")

    def __int__(self):
        return self.p


def _as_prime(p) -> int:
    return p.p if isinstance(p, PrimeModulus) else int(p)


# ---------------------------------------------------------------------------
# integer polynomial helpers over F_p (lists, low degree first)

def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _pmod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fi) % p
        _trim(a)
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _ppowmod(base: list[int], e: int, f: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [x * inv % p for x in a]
    return a


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p (coefficients low first)."""
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    for r in prime_factors(d):
        h = _ppowmod(x, p ** (d // r), f, p)
        h = _trim(h + [0] * max(0, 2 - len(h)))
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(list(f), _trim(diff), p)) != 1:
            return False
    h = _ppowmod(x, p ** d, f, p)
    diff = list(h) + [0] * max(0, 2 - len(h))
    diff[1] = (diff[1] - 1) % p
    return not _trim(diff)


@lru_cache(maxsize=None)
def default_modulus(p: int, d: int) -> tuple[int, ...]:
    """Lowest monic irreducible of degree d over F_p.

    Candidates t^d + c_{d-1} t^{d-1} + ... + c_0 are ordered lexicographically
    on (c_{d-1}, ..., c_0).  For d = 1 this is ``t``.
    """
    if d == 1:
        return (0, 1)
    for m in range(p ** d):
        low = [(m // p ** i) % p for i in range(d)]
        cand = tuple(low) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# finite fields

class GF:
    """The finite field F_p[t]/(modulus) of order q = p^d."""

    def __init__(self, p, d: int = 1, modulus: Optional[Sequence[int]] = None):
        p = _as_prime(p)
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if modulus is None:
            modulus = default_modulus(p, d)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) - 1 != d or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree d")
            if not is_irreducible(modulus, p):
                raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.d = d
        self.q = p ** d
        self.modulus = tuple(modulus)
        self._log = None
        self._exp = None
        self._np_tables = None
        self._frob_matrix = None

    # identity
    def __eq__(self, other):
        return (isinstance(other, GF) and self.p == other.p
                and self.modulus == other.modulus)

    def __hash__(self):
        return hash(("GF", self.p, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.d})" if self.d > 1 else f"GF({self.p})"

    # construction
    def __call__(self, value) -> "FieldElem":
        if isinstance(value, FieldElem):
            if value.field == self:
                return value
            return coerce(value, self)
        if isinstance(value, (list, tuple)):
            if len(value) > self.d:
                raise ValueError("too many coefficients")
            return FieldElem(self, self._from_digits([int(c) % self.p for c in value]))
        return FieldElem(self, int(value) % self.p)

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, 0)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, 1)

    @property
    def gen(self) -> "FieldElem":
        """The class of t."""
        return self([0, 1]) if self.d > 1 else self(0)

    def elements(self) -> Iterable["FieldElem"]:
        for c in range(self.q):
            yield FieldElem(self, c)

    def from_code(self, code: int) -> "FieldElem":
        return FieldElem(self, int(code))

    def characteristic(self) -> int:
        return self.p

    # code-level arithmetic
    def _digits(self, c: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.d):
            out.append(c % p)
            c //= p
        return out

    def _from_digits(self, digits: Sequence[int]) -> int:
        c = 0
        for x in reversed(list(digits) + [0] * (self.d - len(digits))):
            c = c * self.p + x
        return c

    def _add(self, a: int, b: int) -> int:
        if self.d == 1:
            return (a + b) % self.p
        p = self.p
        return self._from_digits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])

    def _neg(self, a: int) -> int:
        if self.d == 1:
            return (-a) % self.p
        return self._from_digits([(-x) % self.p for x in self._digits(a)])

    def _sub(self, a: int, b: int) -> int:
        return self._add(a, self._neg(b))

    def _mul_direct(self, a: int, b: int) -> int:
        prod = _pmul(self._digits(a), self._digits(b), self.p)
        return self._from_digits(_pmod(prod, self.modulus, self.p))

    def _ensure_logs(self):
        if self._log is not None:
            return
        q = self.q
        g = self._primitive_code()
        exp = [0] * (q - 1)
        log = [0] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._mul_direct(x, g)
        self._exp, self._log = exp, log

    def _primitive_code(self) -> int:
        if self.q == 2:
            return 1
        factors = prime_factors(self.q - 1)
        for c in range(1, self.q):
            if all(self._pow_direct(c, (self.q - 1) // r) != 1 for r in factors):
                return c
        raise AssertionError("no primitive element")  # pragma: no cover

    def _pow_direct(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._mul_direct(result, a)
            a = self._mul_direct(a, a)
            e >>= 1
        return result

    def _mul(self, a: int, b: int) -> int:
        if self.d == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self.q <= _LOG_TABLE_LIMIT:
            self._ensure_logs()
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return self._mul_direct(a, b)

    def _inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.d == 1:
            return pow(a, self.p - 2, self.p)
        if self.q <= _LOG_TABLE_LIMIT:
            self._ensure_logs()
            return self._exp[(-self._log[a]) % (self.q - 1)]
        return self._pow_direct(a, self.q - 2)

    def _pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self._inv(a), -e
        if self.d == 1:
            return pow(a, e, self.p)
        if a == 0:
            return 0 if e else 1
        if self.q <= _LOG_TABLE_LIMIT:
            self._ensure_logs()
            return self._exp[(self._log[a] * e) % (self.q - 1)]
        return self._pow_direct(a, e)

    def primitive_element(self) -> "FieldElem":
        return FieldElem(self, self._primitive_code())

    # tables for the batched kernels
    def numpy_tables(self):
        """(add, mul, neg) lookup tables on codes, as int64 arrays."""
        if self._np_tables is None:
            q = self.q
            if q > _NUMPY_TABLE_LIMIT:
                raise ValueError(f"field of order {q} too large for lookup tables")
            codes = np.arange(q, dtype=np.int64)
            digits = np.stack([(codes // self.p ** i) % self.p for i in range(self.d)], axis=1)
            weights = self.p ** np.arange(self.d, dtype=np.int64)
            add = ((digits[:, None, :] + digits[None, :, :]) % self.p) @ weights
            neg = ((-digits) % self.p) @ weights
            if self.d == 1:
                mul = np.outer(codes, codes) % self.p
            else:
                self._ensure_logs()
                log = np.array(self._log, dtype=np.int64)
                exp = np.array(self._exp, dtype=np.int64)
                mul = exp[(log[:, None] + log[None, :]) % (q - 1)]
                mul[0, :] = 0
                mul[:, 0] = 0
            self._np_tables = (add.astype(np.int64), mul.astype(np.int64), neg.astype(np.int64))
        return self._np_tables

    # Frobenius as an F_p-linear map
    def frobenius_matrix(self) -> list[list[int]]:
        """Matrix (over F_p, column j = image of t^j) of x -> x^p."""
        if self._frob_matrix is None:
            cols = []
            for j in range(self.d):
                basis = self._from_digits([1 if i == j else 0 for i in range(self.d)])
                cols.append(self._digits(self._pow(basis, self.p)))
            self._frob_matrix = [[cols[j][i] for j in range(self.d)] for i in range(self.d)]
        return self._frob_matrix

    def multiplication_matrix(self, a: "FieldElem") -> list[list[int]]:
        cols = []
        for j in range(self.d):
            basis = self._from_digits([1 if i == j else 0 for i in range(self.d)])
            cols.append(self._digits(self._mul(a.code, basis)))
        return [[cols[j][i] for j in range(self.d)] for i in range(self.d)]

    def is_subfield_degree(self, e: int) -> bool:
        return self.d % e == 0


@lru_cache(maxsize=None)
def field(p: int, d: int = 1, modulus: Optional[tuple] = None) -> GF:
    """Cached constructor: one GF object per (p, d, modulus)."""
    return GF(p, d, modulus)


class FieldElem:
    """Immutable element of a finite field."""

    __slots__ = ("field", "code")

    def __init__(self, field: GF, code: int):
        self.field = field
        self.code = code

    @property
    def ring(self) -> GF:
        return self.field

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.field is self.field or other.field == self.field:
                return other.code
            raise FieldMismatch(f"{self.field} vs {other.field}")
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field._add(self.code, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field._sub(self.code, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field._sub(o, self.code))

    def __neg__(self):
        return FieldElem(self.field, self.field._neg(self.code))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field._mul(self.code, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field._mul(self.code, self.field._inv(o)))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElem(self.field, self.field._mul(o, self.field._inv(self.code)))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field._pow(self.code, int(e)))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field._inv(self.code))

    def is_unit(self) -> bool:
        return self.code != 0

    def is_zero(self) -> bool:
        return self.code == 0

    def __bool__(self):
        return self.code != 0

    def frobenius(self) -> "FieldElem":
        return self ** self.field.p

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.field._digits(self.code))

    def in_prime_field(self) -> bool:
        return self.code < self.field.p

    def __int__(self):
        if not self.in_prime_field():
            raise ValueError(f"{self!r} is not in the prime field")
        return self.code

    def to_json(self):
        """Integer for prime-field elements, coefficient list otherwise."""
        return self.code if self.field.d == 1 else list(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.field.modulus, self.code))

    def __lt__(self, other):
        return self.code < other.code

    def __repr__(self):
        if self.field.d == 1:
            return f"{self.code} mod {self.field.p}"
        return f"{list(self.coeffs)} in {self.field!r}"


# ---------------------------------------------------------------------------
# F_p-linear algebra helper (used for subfield embeddings and root scaling)

def _fp_kernel(rows: list[list[int]], p: int) -> list[list[int]]:
    """Basis of the right kernel of an integer matrix mod p (reduced echelon order)."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-m[i][fc]) % p
        basis.append(v)
    return basis


@lru_cache(maxsize=None)
def _embedding_root(src: GF, dst: GF) -> int:
    """Code in dst of a root of src.modulus (the image of t), smallest code."""
    if dst.d % src.d != 0:
        raise FieldMismatch(f"{src} does not embed in {dst}")
    # the copy of F_{p^e} inside dst is the kernel of Frob^e - id
    p = dst.p
    frob = dst.frobenius_matrix()
    power = [[int(i == j) for j in range(dst.d)] for i in range(dst.d)]
    for _ in range(src.d):
        power = [[sum(power[i][k] * frob[k][j] for k in range(dst.d)) % p
                  for j in range(dst.d)] for i in range(dst.d)]
    rows = [[(power[i][j] - (i == j)) % p for j in range(dst.d)] for i in range(dst.d)]
    basis = _fp_kernel(rows, p)
    best = None
    for combo in range(p ** len(basis)):
        coeffs = [(combo // p ** i) % p for i in range(len(basis))]
        vec = [sum(c * b[j] for c, b in zip(coeffs, basis)) % p for j in range(dst.d)]
        code = dst._from_digits(vec)
        x = FieldElem(dst, code)
        val = dst.zero
        for c in reversed(src.modulus):
            val = val * x + c
        if val.is_zero() and (best is None or code < best):
            best = code
    if best is None:  # pragma: no cover
        raise AssertionError("embedding root not found")
    return best


def coerce(x: "FieldElem", dst: GF) -> "FieldElem":
    """Map x into dst along the (deterministic) subfield embedding."""
    if x.field == dst:
        return FieldElem(dst, x.code)
    if x.field.p != dst.p:
        raise FieldMismatch("different characteristics")
    if x.in_prime_field():
        return FieldElem(dst, x.code)
    root = FieldElem(dst, _embedding_root(x.field, dst))
    val = dst.zero
    for c in reversed(x.coeffs):
        val = val * root + c
    return val


def common_field(*fields: GF) -> GF:
    """The largest of a chain of fields, checking that the others embed."""
    best = max(fields, key=lambda F: F.d)
    for F in fields:
        if best.d % F.d:
            raise FieldMismatch(f"{F} and {best} have no common field here")
    return best


# ---------------------------------------------------------------------------
# Z/p^N

class WittRing:
    """W_N(F_p), realized as Z/p^N."""

    def __init__(self, p, N: int):
        p = _as_prime(p)
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if N < 1:
            raise ValueError("length N must be >= 1")
        self.p = p
        self.N = N
        self.modulus = p ** N

    def __eq__(self, other):
        return isinstance(other, WittRing) and (self.p, self.N) == (other.p, other.N)

    def __hash__(self):
        return hash(("W", self.p, self.N))

    def __repr__(self):
        return f"Z/{self.p}^{self.N}"

    def __call__(self, value) -> "WittElem":
        if isinstance(value, WittElem):
            return value.reduce(self.N) if value.ring != self else value
        return WittElem(self, int(value) % self.modulus)

    @property
    def zero(self):
        return WittElem(self, 0)

    @property
    def one(self):
        return WittElem(self, 1)

    def elements(self):
        for v in range(self.modulus):
            yield WittElem(self, v)

    def residue_field(self) -> GF:
        return field(self.p)


class WittElem:
    """Element of Z/p^N."""

    __slots__ = ("ring", "value")

    def __init__(self, ring: WittRing, value: int):
        self.ring = ring
        self.value = value

    @property
    def p(self):
        return self.ring.p

    @property
    def N(self):
        return self.ring.N

    def _other(self, other):
        if isinstance(other, WittElem):
            if other.ring != self.ring:
                raise FieldMismatch(f"{self.ring} vs {other.ring}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def _make(self, v):
        return WittElem(self.ring, v % self.ring.modulus)

    def __add__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self._make(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self._make(self.value - o)

    def __rsub__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self._make(o - self.value)

    def __neg__(self):
        return self._make(-self.value)

    def __mul__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else self._make(self.value * o)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return self._make(pow(self.value, e, self.ring.modulus))

    def is_unit(self) -> bool:
        return self.value % self.ring.p != 0

    def is_zero(self) -> bool:
        return self.value == 0

    def __bool__(self):
        return self.value != 0

    def inverse(self) -> "WittElem":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self} is not a unit")
        return self._make(pow(self.value, -1, self.ring.modulus))

    def __truediv__(self, other):
        if isinstance(other, int):
            other = self.ring(other)
        return self * other.inverse()

    def reduce(self, N: int) -> "WittElem":
        """Image under Z/p^self.N -> Z/p^N (N <= self.N)."""
        if N > self.ring.N:
            raise ValueError("can only reduce to a shorter length")
        return WittElem(WittRing(self.ring.p, N), self.value % self.ring.p ** N)

    def residue(self) -> FieldElem:
        return field(self.ring.p)(self.value)

    def __int__(self):
        return self.value

    def to_json(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, WittElem):
            return self.ring == other.ring and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.ring.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.ring.p, self.ring.N, self.value))

    def __lt__(self, other):
        return self.value < other.value

    def __repr__(self):
        return f"{self.value} mod {self.ring.p}^{self.ring.N}"


# ---------------------------------------------------------------------------
# polynomials

class PolyRing:
    """R[var] for a coefficient ring R (GF or WittRing)."""

    def __init__(self, base, var: str = "t"):
        self.base = base
        self.var = var

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.base == other.base

    def __hash__(self):
        return hash(("Poly", self.base))

    @property
    def zero(self):
        return Poly(self.base, (), self.var)

    @property
    def one(self):
        return Poly(self.base, (self.base.one,), self.var)

    def gen(self):
        return Poly(self.base, (self.base.zero, self.base.one), self.var)

    def __call__(self, coeffs):
        return Poly(self.base, coeffs, self.var)


class Poly:
    """Dense univariate polynomial; coefficients low degree first."""

    __slots__ = ("base", "coeffs", "var")

    def __init__(self, base, coeffs, var: str = "t"):
        cs = [c if not isinstance(c, int) else base(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.base = base
        self.coeffs = tuple(cs)
        self.var = var

    @property
    def ring(self):
        return PolyRing(self.base, self.var)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def is_unit(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0].is_unit()

    def to_json(self):
        """Coefficient list, low degree first."""
        return [c.to_json() for c in self.coeffs]

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.base.zero

    def _wrap(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, int):
            return Poly(self.base, (self.base(other),), self.var)
        if isinstance(other, (FieldElem, WittElem)):
            return Poly(self.base, (other,), self.var)
        return NotImplemented

    def __add__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self.base, [self.coeff(i) + other.coeff(i) for i in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.base, [-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return Poly(self.base, (), self.var)
        out = [self.base.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(self.base, out, self.var)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = Poly(self.base, (self.base.one,), self.var)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if len(self.coeffs) != 1:
            raise ZeroDivisionError("only constant polynomials are inverted")
        return Poly(self.base, (self.coeffs[0].inverse(),), self.var)

    def __call__(self, x):
        """Horner evaluation; F_q coefficients are lifted to x's field if needed."""
        coeffs = self.coeffs
        if isinstance(x, FieldElem) and isinstance(self.base, GF) and x.field != self.base:
            F = common_field(x.field, self.base)
            x = coerce(x, F)
            coeffs = [coerce(c, F) for c in coeffs]
        acc = x.ring.zero if hasattr(x, "ring") else self.base.zero
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        return Poly(self.base, [c * i for i, c in enumerate(self.coeffs)][1:], self.var)

    def map_coeffs(self, f, base) -> "Poly":
        return Poly(base, [f(c) for c in self.coeffs], self.var)

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lead_inv = other.coeffs[-1].inverse()
        rem = list(self.coeffs)
        quot = [self.base.zero] * max(0, len(rem) - len(other.coeffs) + 1)
        while len(rem) >= len(other.coeffs) and rem:
            c = rem[-1] * lead_inv
            shift = len(rem) - len(other.coeffs)
            quot[shift] = c
            for i, oc in enumerate(other.coeffs):
                rem[shift + i] = rem[shift + i] - c * oc
            while rem and rem[-1].is_zero():
                rem.pop()
        return Poly(self.base, quot, self.var), Poly(self.base, rem, self.var)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.base == other.base and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self == self._wrap(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c.is_zero():
                continue
            v = c.to_json()
            terms.append(f"{v}" if i == 0 else f"{v}*{self.var}^{i}")
        return " + ".join(terms)


def monic_poly(base, coeffs) -> Poly:
    """A MonicPoly: checks the leading coefficient is 1."""
    f = Poly(base, coeffs)
    if not f.is_monic():
        raise ValueError("polynomial is not monic")
    return f


# ---------------------------------------------------------------------------
# operations

def hensel_lift_roots(f: Poly) -> list[WittElem]:
    """All roots in Z/p^N of a monic f whose reduction splits with simple roots."""
    ring = f.base
    if not isinstance(ring, WittRing):
        raise TypeError("hensel_lift_roots expects a polynomial over Z/p^N")
    if not f.is_monic():
        raise ValueError("polynomial must be monic")
    p = ring.p
    Fp = field(p)
    fbar = f.map_coeffs(lambda c: Fp(c.value), Fp)
    dfbar = fbar.derivative()
    roots = [x for x in Fp.elements() if fbar(x).is_zero()]
    if any(dfbar(r).is_zero() for r in roots):
        raise NonSeparableReduction(f"reduction of {f} has a repeated root")
    if len(roots) != f.degree:
        raise NonSplitReduction(f"reduction of {f} does not split over F_{p}")
    df = f.derivative()
    out = []
    for r0 in roots:
        r = ring(r0.code)
        for _ in range(ring.N):
            r = r - f(r) / df(r)
        if not f(r).is_zero():  # pragma: no cover
            raise AssertionError("Newton iteration failed to converge")
        out.append(r)
    return sorted(out)


def lucas_digits_binom(k: int, j: int, p: int) -> int:
    """C(k, j) mod p as an int, by products over base-p digits."""
    if k < 0 or j < 0:
        raise ValueError("lucas_binom needs k, j >= 0")
    out = 1
    while j:
        kd, jd = k % p, j % p
        if jd > kd:
            return 0
        out = out * math.comb(kd, jd) % p
        k //= p
        j //= p
    return out


def lucas_binom(k: int, j: int, p) -> FieldElem:
    """C(k, j) mod p via Lucas' theorem, as an element of F_p."""
    p = _as_prime(p)
    return field(p)(lucas_digits_binom(k, j, p))


def find_root_of_unity_scale(h: FieldElem, p=None) -> Optional[FieldElem]:
    """A lambda in h's field with lambda^(p-1) = h, or None if none exists there.

    lambda^(p-1) = h is the F_p-linear eigen-equation Frob(lambda) = h*lambda, so
    the kernel of Frob - (mult by h) is computed directly; the first basis
    vector of the reduced kernel is returned.
    """
    F = h.field
    if p is not None and _as_prime(p) != F.p:
        raise FieldMismatch("p does not match the field of h")
    if h.is_zero():
        raise ZeroInput("h = 0: no scale normalizes a vanishing invariant")
    if h == 1:
        return F.one
    frob = F.frobenius_matrix()
    mh = F.multiplication_matrix(h)
    rows = [[(frob[i][j] - mh[i][j]) % F.p for j in range(F.d)] for i in range(F.d)]
    basis = _fp_kernel(rows, F.p)
    if not basis:
        return None
    lam = FieldElem(F, F._from_digits(basis[0]))
    assert lam ** (F.p - 1) == h
    return lam
