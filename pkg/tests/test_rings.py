import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from operlab.errors import FieldMismatch, NonSeparableReduction, NonSplitReduction, NotPrime, PrimeTooSmall, ZeroInput
from operlab.rings import (
    GF,
    Poly,
    PolyRing,
    PrimeModulus,
    WittRing,
    coerce,
    default_modulus,
    field,
    find_root_of_unity_scale,
    hensel_lift_roots,
    is_irreducible,
    lucas_binom,
)


def _has_root_or_factor(f, p):
    """Reducibility oracle for degree <= 3: a root, or (degree 4) a quadratic factor."""
    d = len(f) - 1
    for x in range(p):
        if sum(c * x ** i for i, c in enumerate(f)) % p == 0:
            return True
    if d == 4:
        for b, c in itertools.product(range(p), repeat=2):
            g = Poly(field(p), [c, b, 1])
            _, r = Poly(field(p), list(f)).divmod(g)
            if r.is_zero():
                return True
    return False


@pytest.mark.parametrize("p,d", [(3, 2), (5, 2), (7, 2), (3, 3), (5, 3), (3, 4), (5, 4)])
def test_irreducibility_matches_factor_search(p, d):
    for m in range(p ** d):
        f = tuple((m // p ** i) % p for i in range(d)) + (1,)
        assert is_irreducible(f, p) == (not _has_root_or_factor(f, p))


def test_default_modulus_is_lowest():
    assert default_modulus(5, 1) == (0, 1)
    assert default_modulus(5, 2) == (2, 0, 1)
    assert default_modulus(7, 2) == (1, 0, 1)
    assert default_modulus(3, 2) == (1, 0, 1)


@pytest.mark.parametrize("p,d", [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (7, 2)])
def test_field_axioms_exhaustive(p, d):
    F = field(p, d)
    els = list(F.elements())
    sample = els if F.q <= 25 else els[::3]
    for a in sample:
        assert a + F.zero == a and a * F.one == a
        assert a - a == F.zero
        if a:
            assert a * a.inverse() == F.one
        for b in sample:
            assert a + b == b + a and a * b == b * a
            for c in sample[:7]:
                assert (a * b) * c == a * (b * c)
                assert a * (b + c) == a * b + a * c


def test_log_tables_agree_with_direct_multiplication():
    F = field(5, 2)
    for a in range(F.q):
        for b in range(F.q):
            assert F._mul(a, b) == F._mul_direct(a, b)


def test_numpy_tables():
    F = field(3, 2)
    add, mul, neg = F.numpy_tables()
    for a in range(F.q):
        assert neg[a] == F._neg(a)
        for b in range(F.q):
            assert add[a, b] == F._add(a, b)
            assert mul[a, b] == F._mul(a, b)


def test_frobenius_fixes_prime_field_only():
    F = field(7, 2)
    fixed = [x for x in F.elements() if x.frobenius() == x]
    assert fixed == [F(i) for i in range(7)]


def test_large_field_without_tables():
    F = field(7, 6)
    x = F.gen
    assert x ** (F.q - 1) == 1
    assert x * x.inverse() == 1


def test_coerce_is_a_ring_map():
    small, big = field(5, 2), field(5, 4)
    for a in small.elements():
        for b in list(small.elements())[::4]:
            assert coerce(a + b, big) == coerce(a, big) + coerce(b, big)
            assert coerce(a * b, big) == coerce(a, big) * coerce(b, big)
    with pytest.raises(FieldMismatch):
        coerce(field(5, 2).gen, field(5, 3))


def test_field_mismatch_in_arithmetic():
    with pytest.raises(FieldMismatch):
        field(5).one + field(7).one


def test_prime_modulus_guards():
    assert int(PrimeModulus(7, guard_rank=3)) == 7
    with pytest.raises(PrimeTooSmall):
        PrimeModulus(5, guard_rank=3)
    with pytest.raises(NotPrime):
        PrimeModulus(9)
    with pytest.raises(PrimeTooSmall):
        PrimeModulus(2)


def test_custom_modulus_checked():
    assert GF(5, 2, (3, 0, 1)).q == 25
    with pytest.raises(ValueError):
        GF(5, 2, (1, 0, 1))   # t^2 + 1 = (t - 2)(t + 2) over F_5


# Witt rings

@pytest.mark.parametrize("p,N", [(3, 1), (3, 2), (5, 2), (3, 3), (7, 1)])
def test_witt_ring_axioms_and_reduction(p, N):
    W = WittRing(p, N)
    els = list(W.elements())
    for a in els:
        for b in els[:: max(1, len(els) // 9)]:
            assert (a + b).value == (a.value + b.value) % p ** N
            for N2 in range(1, N + 1):
                assert (a + b).reduce(N2) == a.reduce(N2) + b.reduce(N2)
                assert (a * b).reduce(N2) == a.reduce(N2) * b.reduce(N2)
        assert a.is_unit() == (a.value % p != 0)
        if a.is_unit():
            assert a * a.inverse() == W.one


def test_witt_length_one_is_prime_field():
    W = WittRing(5, 1)
    F = field(5)
    for a in W.elements():
        for b in W.elements():
            assert (a * b).value == (F(a.value) * F(b.value)).code


def test_witt_non_unit_inverse():
    with pytest.raises(ZeroDivisionError):
        WittRing(5, 2)(10).inverse()


# Hensel lifting

def test_hensel_examples():
    W = WittRing(5, 2)
    t = PolyRing(W).gen()
    assert [r.value for r in hensel_lift_roots(t * t - t * 5 + 6)] == [2, 3]
    W9 = WittRing(3, 2)
    t9 = PolyRing(W9).gen()
    assert [r.value for r in hensel_lift_roots(t9 * t9 - 1)] == [1, 8]
    for a in range(25):
        assert [r.value for r in hensel_lift_roots(t - a)] == [a]


def test_hensel_errors():
    W = WittRing(5, 2)
    t = PolyRing(W).gen()
    with pytest.raises(NonSeparableReduction):
        hensel_lift_roots((t - 1) * (t - 6))
    with pytest.raises(NonSplitReduction):
        hensel_lift_roots(t * t - 2)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=4, unique=True),
       st.lists(st.integers(0, 124), min_size=4, max_size=4))
def test_hensel_recovers_planted_roots_and_commutes_with_reduction(residues, highs):
    p, N = 5, 3
    W = WittRing(p, N)
    roots = sorted((r + p * h) % p ** N for r, h in zip(residues, highs))
    t = PolyRing(W).gen()
    f = PolyRing(W).one
    for r in roots:
        f = f * (t - r)
    lifted = hensel_lift_roots(f)
    assert sorted(x.value for x in lifted) == sorted(roots)
    for N2 in (1, 2):
        W2 = WittRing(p, N2)
        f2 = f.map_coeffs(lambda c: c.reduce(N2), W2)
        assert sorted(x.value for x in hensel_lift_roots(f2)) == sorted(r % p ** N2 for r in roots)


def test_hensel_brute_force_all_quadratics_mod_9():
    W = WittRing(3, 2)
    t = PolyRing(W).gen()
    for b in range(9):
        for c in range(9):
            f = t * t + t * b + c
            brute = [x for x in range(9) if (x * x + b * x + c) % 9 == 0]
            try:
                got = [r.value for r in hensel_lift_roots(f)]
            except (NonSeparableReduction, NonSplitReduction):
                continue
            assert got == brute


# Lucas

def test_lucas_examples():
    assert lucas_binom(6, 5, 5) == 1
    assert lucas_binom(17, 0, 5) == 1
    assert lucas_binom(5, 3, 5) == 0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_lucas_matches_big_integer_binomials(p):
    for k in range(201):
        for j in range(201):
            assert lucas_binom(k, j, p).code == math.comb(k, j) % p


# root-of-unity scaling

def _brute_root(h):
    return [x for x in h.field.elements() if x and x ** (h.field.p - 1) == h]


def test_root_scale_examples():
    assert find_root_of_unity_scale(field(7, 2).one) == 1
    assert find_root_of_unity_scale(field(5)(2)) is None
    assert _brute_root(field(5)(2)) == []
    # no fourth root of 2 in F_25 either: 2 has order 4 in F_25^x
    assert find_root_of_unity_scale(field(5, 2)(2)) is None
    assert _brute_root(field(5, 2)(2)) == []
    lam = find_root_of_unity_scale(field(5, 4)(2))
    assert lam is not None and lam ** 4 == 2
    with pytest.raises(ZeroInput):
        find_root_of_unity_scale(field(5).zero)


@pytest.mark.parametrize("p,d", [(5, 1), (5, 2), (7, 2), (3, 3)])
def test_root_scale_matches_brute_force(p, d):
    F = field(p, d)
    for h in F.elements():
        if not h:
            continue
        lam = find_root_of_unity_scale(h)
        brute = _brute_root(h)
        if brute:
            assert lam is not None and lam ** (p - 1) == h
        else:
            assert lam is None


# polynomials

def test_poly_divmod_and_eval():
    F = field(7)
    f = Poly(F, [1, 2, 3, 4])
    g = Poly(F, [5, 1])
    q, r = f.divmod(g)
    assert q * g + r == f and r.degree < g.degree
    x = F(3)
    assert f(x) == 1 + 2 * 3 + 3 * 9 + 4 * 27
    assert f.derivative() == Poly(F, [2, 6, 12])
