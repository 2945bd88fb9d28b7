"""Acceptance suite: one test per criterion, exact arithmetic, runtime-bounded.

Each test compares the library against an oracle written independently
here (brute-force enumeration, naive point counts, direct orbit sets).
"""

import itertools
import math
import time
from contextlib import contextmanager

import pytest

from operlab import cli, dop_local, opers, rootdata, witt_opers
from operlab.elliptic import NodeModel, WeierstrassCurve, hasse_triple, parse_curve, pth_power_derivation
from operlab.rings import WittRing, field


@contextmanager
def time_limit(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f} s, limit {seconds} s"


def type_a_classes_oracle(n, p):
    """n-subsets of F_p up to translation."""
    seen = set()
    for s in itertools.combinations(range(p), n):
        seen.add(min(tuple(sorted((x + c) % p for x in s)) for c in range(p)))
    return len(seen)


def b2_classes_oracle(p):
    """Regular points of the B2 torus up to signed permutations."""
    pts = [(x, y) for x in range(p) for y in range(p)
           if x and y and (x - y) % p and (x + y) % p]
    orbits = set()
    for x, y in pts:
        orbit = set()
        for a, b in ((x, y), (y, x)):
            for sa in (1, -1):
                for sb in (1, -1):
                    orbit.add(((sa * a) % p, (sb * b) % p))
        orbits.add(min(orbit))
    return len(orbits)


def witt_classes_oracle(n, p, N):
    mod = p ** N
    seen = set()
    for t in itertools.product(range(mod), repeat=n):
        if len({x % p for x in t}) == n:
            seen.add(min(tuple(sorted((x + c) % mod for x in t)) for c in range(mod)))
    return len(seen)


ORDINARY = [("node", p) for p in (5, 7)] + [("p=5 A=1 B=0", 5), ("p=7 A=0 B=1", 7)]
SUPERSINGULAR = [("p=5 A=0 B=1", 5), ("p=7 A=1 B=0", 7)]


def _curve(text, p):
    return NodeModel(p) if text == "node" else parse_curve(text)


@pytest.mark.criterion(1, "regular-class counts")
def test_criterion_1_regular_class_counts():
    with time_limit(5):
        expected = {(2, 5): 2, (2, 7): 3, (2, 11): 5, (3, 7): 5, (3, 11): 15}
        for (n, p), count in expected.items():
            datum = rootdata.root_datum("A", n - 1)
            assert rootdata.weyl_orbit_count(datum, p) == count
            assert rootdata.regular_class_formula(n, p) == count
            assert type_a_classes_oracle(n, p) == count
        B2 = rootdata.root_datum("B", 2)
        assert rootdata.weyl_orbit_count(B2, 5) == 1 == b2_classes_oracle(5)


@pytest.mark.criterion(2, "dormant classification over ordinary curves")
def test_criterion_2_ordinary_classification(monkeypatch):
    with time_limit(30):
        for text, p in ORDINARY:
            curve = _curve(text, p)
            assert not pth_power_derivation(curve).is_zero()
            for n in (2, 3):
                if not n < p:
                    continue
                specs = opers.classify_dormant(curve, n, verify=True)
                assert len(specs) == type_a_classes_oracle(n, p)
                assert all(opers.is_dormant(s) for s in specs)
                # second route: the sweep on the other kernel backend
                monkeypatch.setenv("OPERLAB_NUMBA", "0")
                H = specs[0].hasse.h
                swept = opers.dormant_sweep(n, H, field(p, 2))
                monkeypatch.delenv("OPERLAB_NUMBA")
                assert len(swept) == len(specs)
                assert {tuple(int(c) for c in r.coeffs) for r in swept} == \
                       {tuple(int(c) for c in s.rho.coeffs) for s in specs}


@pytest.mark.criterion(3, "supersingular uniqueness")
def test_criterion_3_supersingular_uniqueness():
    with time_limit(30):
        for text, p in SUPERSINGULAR:
            curve = parse_curve(text)
            triple = hasse_triple(curve)
            assert triple["H_derivation"] == 0 and triple["points"] % p == 1
            for n in (2, 3):
                specs = opers.classify_dormant(curve, n, verify=True)
                assert [s.rho.to_json() for s in specs] == [[0] * (n - 1)]
                F = field(p, 2)
                swept = opers.dormant_sweep(n, F.zero, F)
                assert [[c.code for c in r.coeffs] for r in swept] == [[0] * (n - 1)]


@pytest.mark.criterion(4, "Hitchin-Mochizuki Frobenius fiber")
def test_criterion_4_frobenius_fiber():
    with time_limit(10):
        for p in (3, 5):
            F = field(p, 2)
            for n in (2, 3):
                for rho in rootdata.adjoint_points(F, n):
                    gamma = opers.hm_gamma(F.zero, rho)
                    assert gamma.coeffs == tuple(c ** p for c in rho.coeffs)
            Fp = field(p)
            for a in Fp.elements():
                sym = opers.hm_gamma_symbolic(a).coeffs[0]
                assert sym.degree == p
                for d in F.elements():
                    rho = rootdata.AdjointQuotientPoint((d,))
                    assert sym(d) == opers.hm_gamma(a, rho).coeffs[0]


@pytest.mark.criterion(5, "Miura covering")
def test_criterion_5_miura_covering():
    with time_limit(10):
        for text, p in ORDINARY:
            curve = _curve(text, p)
            for n in (2, 3):
                if not n < p:
                    continue
                datum = rootdata.root_datum("A", n - 1)
                specs = opers.classify_dormant(curve, n, verify=False)
                seen = set()
                for s in specs:
                    lifts = opers.miura_fiber(s)
                    assert len(lifts) == math.factorial(n)
                    for m in lifts:
                        assert rootdata.is_regular(datum, m.mu.coords, p)
                        assert opers.p_curvature(m.matrix(), 1).is_zero()
                        seen.add(m.mu.coords)
                # fibers partition the regular points
                assert len(seen) == len(rootdata.regular_points(datum, p))


@pytest.mark.criterion(6, "Hasse triple agreement")
def test_criterion_6_hasse_triple():
    with time_limit(60):
        for p in (5, 7, 13):
            F = field(p)
            squares = [0] * p
            for y in range(p):
                squares[y * y % p] += 1
            for A, B in itertools.product(range(p), repeat=2):
                if (4 * A ** 3 + 27 * B ** 2) % p == 0:
                    continue
                curve = WeierstrassCurve.short(F, A, B)
                t = hasse_triple(curve)
                naive = 1 + sum(squares[(x ** 3 + A * x + B) % p] for x in range(p))
                assert t["agree_derivation_deuring"] and t["agree_point_count"]
                assert t["points"] == naive
                assert (t["H_derivation"] == 0) == (naive % p == 1)


@pytest.mark.criterion(7, "Witt classification")
def test_criterion_7_witt_classification():
    with time_limit(60):
        expected = {(2, 5, 1): 2, (2, 5, 2): 10, (3, 7, 1): 5, (2, 7, 2): 21}
        for (n, p, N), count in expected.items():
            classes = witt_opers.theta_classify(n, p, N)
            assert len(classes) == count == witt_classes_oracle(n, p, N)
            W = WittRing(p, N)
            gauge = tuple(tuple(W(1 if i == j else (i + 2 * j) * (i < j)) for j in range(n))
                          for i in range(n))
            from operlab import linalg
            for c in classes:
                A = witt_opers.build_witt_oper(c.tuple()).oper_basis_matrix()
                assert witt_opers.decompose_dormant_matrix(A, p, N) == c
                B = linalg.matmul(linalg.matmul(linalg.inverse(gauge), A), gauge)
                assert witt_opers.decompose_dormant_matrix(B, p, N) == c


@pytest.mark.criterion(8, "diagonal reduction triangle and canonical lift")
def test_criterion_8_diagonal_reduction():
    with time_limit(60):
        for p in (3, 5):
            for N in (1, 2, 3):
                W = WittRing(p, N)
                for a in W.elements():
                    assert dop_local.verify_diagonal_reduction(a, window=2 * p ** N)
        for n in (1, 2, 3):
            for N in (1, 2):
                for c in witt_opers.theta_classify(n, 5, N):
                    d = witt_opers.build_witt_oper(c.tuple(), "N1")
                    r = witt_opers.diagonal_reduce(d)
                    assert r == witt_opers.build_witt_oper(c.tuple(), "1N")
                    assert witt_opers.canonical_diagonal_lift(r) == d


@pytest.mark.criterion(9, "level-structure engine invariants")
def test_criterion_9_engine_invariants():
    with time_limit(30):
        for p in (3, 5):
            for N in (1, 2, 3):
                W = WittRing(p, N)
                structures = [dop_local.LevelStructure(a) for a in W.elements()]
                for s in structures:
                    assert dop_local.pN_curvature_vanishes(s)
                    basis = dop_local.sol(s)
                    assert basis.residue == (-s.a).value
                    assert dop_local.same_structure(dop_local.rebuild_from_sol(basis), s)
                    for N2 in range(1, N + 1):
                        t = s.truncate(N2)
                        assert t == dop_local.LevelStructure(s.a.reduce(N2))
                        for k in range(-p ** N, p ** N + 1):
                            for i in range(N2):
                                assert t.act(i, k) == s.act(i, k)
                if N <= 2:
                    for s1, s2 in itertools.product(structures, repeat=2):
                        assert dop_local.same_structure(s1, s2) == (s1.a == s2.a)
            # negative control: a top digit outside F_p is not a Frobenius pullback
            F2 = field(p, 2)
            bad = dop_local.LevelStructure(WittRing(p, 2)(1), F2.gen)
            assert not dop_local.pN_curvature_vanishes(bad)
            assert dop_local.sol(bad).residue is None


DETERMINISM_JOBS = [
    ["census", "--type", "A", "--n", "3", "--p", "5..13"],
    ["census", "--type", "B", "--n", "2", "--p", "5,7"],
    ["curve", "hasse", "--curve", "p=7 A=0 B=1"],
    ["curve", "normalize", "--curve", "p=5 A=1 B=0"],
    ["oper", "classify", "--n", "3", "--curve", "node p=7"],
    ["oper", "classify", "--n", "2", "--curve", "p=5 A=1 B=0"],
    ["oper", "miura-fiber", "--n", "2", "--curve", "node p=5", "--rho", "4"],
    ["oper", "hm", "--a", "1", "--rho", "2", "--p", "5"],
    ["witt", "classify", "--n", "3", "--p", "5", "--N", "2", "--miura"],
    ["witt", "decompose", "--matrix", "0,-6;1,5", "--p", "5", "--N", "2"],
    ["witt", "reduce", "--class", "0,1,3", "--p", "5", "--N", "2"],
    ["witt", "lift", "--class", "0,2", "--p", "5", "--N", "2"],
    ["dop", "verify-reduction", "--a", "11", "--p", "3", "--N", "3", "--table"],
]


@pytest.mark.criterion(10, "determinism across runs, thread counts and backends")
def test_criterion_10_determinism(tmp_path, monkeypatch):
    settings = [("1", "1"), ("1", "1"), ("1", "1"), ("4", "1"), ("4", "0")]
    for j, job in enumerate(DETERMINISM_JOBS):
        blobs = []
        for r, (threads, numba_flag) in enumerate(settings):
            monkeypatch.setenv("OPERLAB_THREADS", threads)
            monkeypatch.setenv("OPERLAB_NUMBA", numba_flag)
            out = tmp_path / f"{j}_{r}.json"
            assert cli.main(job + ["--out", str(out)]) == 0, job
            blobs.append(out.read_bytes())
        assert all(b == blobs[0] for b in blobs), job
