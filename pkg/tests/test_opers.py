import random

import pytest

from operlab import linalg
from operlab.elliptic import InvariantDifferential, NodeModel, parse_curve
from operlab.errors import NotDormant, PrimeTooSmall, SingularMatrix, SupersingularInput
from operlab.opers import (
    OperSpec,
    classify_dormant,
    dormant_sweep,
    frobenius_aqp,
    gauge_transform,
    hm_gamma,
    hm_gamma_symbolic,
    is_dormant,
    is_p_nilpotent,
    miura_fiber,
    p_curvature,
    regular_class_rho,
)
from operlab.rings import field
from operlab.rootdata import AdjointQuotientPoint, adjoint_points, chi, kostant_section, regular_points, root_datum


def test_p_curvature_examples():
    F = field(5)
    assert p_curvature(linalg.diag(F, [1, 2]), F.one).is_zero()
    qm = linalg.mat(F, [[0, 0], [1, 0]])
    assert p_curvature(qm, F.zero).is_zero()
    v = linalg.mat(F, [[1, 1], [0, 1]])
    assert p_curvature(v, F.one).matrix.entries == linalg.mat(F, [[0, -1], [0, 0]])


def test_p_curvature_mixed_fields():
    F = field(5)
    H = field(5, 2).gen
    v = linalg.diag(F, [1, 4])
    out = p_curvature(v, H).matrix.entries
    assert out[0][0] == field(5, 2)(1) - H


def _node_spec(p, rho_vals, F=None):
    node = NodeModel(p)
    F = F or field(p)
    return OperSpec(node, InvariantDifferential.canonical(node),
                    AdjointQuotientPoint(tuple(F.from_code(c) if not isinstance(c, int) else F(c)
                                               for c in rho_vals)))


def test_is_dormant_examples():
    E = parse_curve("p=5 A=0 B=1")
    spec = OperSpec(E, InvariantDifferential.canonical(E), AdjointQuotientPoint((field(5).zero,)))
    assert is_dormant(spec)
    mu = regular_points(root_datum("A", 1), 5)[0]
    spec = OperSpec(NodeModel(5), InvariantDifferential.canonical(NodeModel(5)), regular_class_rho(mu))
    assert is_dormant(spec)
    # rho = 2: kappa(rho) = [[0, -2], [1, 0]], eigenvalues sqrt(3) not in F_5
    F = field(5, 2)
    spec = OperSpec(NodeModel(5), InvariantDifferential.canonical(NodeModel(5)),
                    AdjointQuotientPoint((F(2),)))
    assert not is_dormant(spec)


def _python_sweep(n, H, F):
    """Oracle: p-curvature of every Kostant oper via generic matrix powers."""
    out = []
    for rho in adjoint_points(F, n):
        M = kostant_section(rho).entries
        if p_curvature(M, H).is_zero():
            out.append(tuple(c.code for c in rho.coeffs))
    return out


@pytest.mark.parametrize("n,p,h", [(2, 5, 1), (2, 5, 0), (2, 7, 1), (3, 5, 1), (3, 5, 0)])
def test_dormant_sweep_matches_python(n, p, h):
    F = field(p, 2)
    got = [tuple(c.code for c in r.coeffs) for r in dormant_sweep(n, F(h), F)]
    assert got == _python_sweep(n, F(h), F)


@pytest.mark.parametrize("desc,n,count", [
    ("node p=5", 2, 2), ("node p=7", 3, 5), ("p=7 A=0 B=1", 3, 5), ("p=5 A=1 B=0", 2, 2),
    ("p=5 A=0 B=1", 2, 1), ("p=7 A=1 B=0", 3, 1)])
def test_classify_dormant(desc, n, count):
    specs = classify_dormant(parse_curve(desc), n)
    assert len(specs) == count
    assert all(is_dormant(s) for s in specs)
    keys = [tuple(c.code for c in s.rho.coeffs) for s in specs]
    assert keys == sorted(keys)


def test_supersingular_class_is_zero():
    [spec] = classify_dormant(parse_curve("p=5 A=0 B=1"), 2)
    assert spec.rho.is_zero()


def test_node_classes_match_regular_orbit_parametrization():
    for n, p in [(2, 7), (3, 7), (3, 5)]:
        specs = classify_dormant(NodeModel(p), n)
        got = {tuple(c.code for c in s.rho.coeffs) for s in specs}
        expected = {tuple(c.code for c in regular_class_rho(mu).coeffs)
                    for mu in regular_points(root_datum("A", n - 1), p)}
        assert got == expected


def test_miura_fiber():
    for n, p in [(2, 5), (3, 7)]:
        import math
        for spec in classify_dormant(NodeModel(p), n):
            lifts = miura_fiber(spec)
            assert len(lifts) == math.factorial(n)
            assert len({m.mu for m in lifts}) == len(lifts)
            for m in lifts:
                assert chi(m.matrix()).coeffs == spec.rho.coeffs
    [spec] = classify_dormant(parse_curve("p=5 A=0 B=1"), 2)
    [lift] = miura_fiber(spec)
    assert lift.degenerate
    with pytest.raises(SupersingularInput):
        miura_fiber(spec, allow_degenerate=False)
    with pytest.raises(NotDormant):
        miura_fiber(_node_spec(5, [2]))


def test_miura_pair_is_plus_minus():
    spec = [s for s in classify_dormant(NodeModel(5), 2)][0]
    lifts = [m.mu.traceless_lift() for m in miura_fiber(spec)]
    (a, b), (c, d) = lifts
    assert (a, b) == (d, c)


def test_gauge_transform():
    F = field(5)
    v = linalg.mat(F, [[0, -2], [1, 3]])   # companion of (t - 1)(t - 2)
    assert gauge_transform(v, linalg.identity(F, 2)).entries == v
    V = linalg.mat(F, [[-2, -1], [1, 1]])  # eigenvector columns for 1 and 2
    h = linalg.inverse(V)
    assert gauge_transform(v, h).entries == linalg.diag(F, [1, 2])
    with pytest.raises(SingularMatrix):
        gauge_transform(v, linalg.mat(F, [[1, 2], [2, 4]]))


def test_dormancy_and_chi_gauge_invariant():
    rng = random.Random(3)
    F = field(7)
    for spec in classify_dormant(NodeModel(7), 3):
        M = spec.matrix()
        for _ in range(10):
            h = tuple(tuple(F(rng.randrange(7)) for _ in range(3)) for _ in range(3))
            if linalg.det(h).is_zero():
                continue
            g = gauge_transform(M, h)
            assert chi(g).coeffs == chi(M).coeffs
            assert p_curvature(g, F.one).is_zero()


def test_hm_gamma_examples():
    F = field(5)
    for a in F.elements():
        assert hm_gamma(a, AdjointQuotientPoint((F.zero, F.zero))).is_zero()
    sym = hm_gamma_symbolic(F(1))
    assert sym.coeffs[0].degree == 5
    # gamma_1(d) = d (d^2 - 1)^2
    assert sym.coeffs[0].to_json() == [0, 1, 0, 3, 0, 1]


@pytest.mark.parametrize("p,n", [(3, 2), (3, 3), (5, 2), (5, 3)])
def test_gamma_zero_is_frobenius(p, n):
    F = field(p, 2)
    for rho in adjoint_points(F, n):
        assert hm_gamma(F.zero, rho).coeffs == frobenius_aqp(rho).coeffs


def test_symbolic_gamma_degree_and_values():
    for p in (3, 5, 7):
        F = field(p)
        for a in F.elements():
            sym = hm_gamma_symbolic(a)
            assert sym.coeffs[0].degree == p
            for d in F.elements():
                assert sym.coeffs[0](d) == hm_gamma(a, AdjointQuotientPoint((d,))).coeffs[0]


def test_p_nilpotent_vs_dormant():
    E = parse_curve("p=5 A=0 B=1")
    delta = InvariantDifferential.canonical(E)
    F = field(5)
    zero = OperSpec(E, delta, AdjointQuotientPoint((F.zero,)))
    assert is_p_nilpotent(zero) and is_dormant(zero)
    other = OperSpec(E, delta, AdjointQuotientPoint((F(1),)))
    assert not is_dormant(other)


def test_rank_guard():
    with pytest.raises(PrimeTooSmall):
        classify_dormant(NodeModel(5), 5)
