"""Type-A opers in Kostant normal form: p-curvature, dormancy, Miura lifts.

With a generator of Hasse invariant H, the connection q_{-1} + kappa^{-1}(rho)
has p-curvature M^p - H*M.  Ordinary curves are normalized to H = 1 first,
supersingular ones have H = 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import _kernels, linalg
from .elliptic import (
    HasseValue,
    InvariantDifferential,
    NodeModel,
    normalize_generator,
    pth_power_derivation,
)
from .errors import NotDormant, PrimeTooSmall, SupersingularInput, VerificationFailure
from .rings import FieldElem, GF, Poly, coerce, common_field, field
from .rootdata import (
    AdjointQuotientPoint,
    LieMatrix,
    TorusPoint,
    chi,
    is_regular,
    kostant_section,
    principal_nilpotents,
    regular_points,
    root_datum,
    weyl_orbits,
)


def _check_rank(n: int, p: int):
    if n < 2:
        raise ValueError("opers need n >= 2")
    if not n < p:
        raise PrimeTooSmall(f"need n < p, got n={n}, p={p}")


def _lift_aqp(rho: AdjointQuotientPoint, F: GF) -> AdjointQuotientPoint:
    return AdjointQuotientPoint(tuple(coerce(c, F) for c in rho.coeffs), rho.convention)


@dataclass(frozen=True)
class OperSpec:
    """The oper nabla = d + (q_{-1} + kappa^{-1}(rho)) on a curve with a chosen generator."""

    curve: object
    generator: InvariantDifferential
    rho: AdjointQuotientPoint

    @property
    def n(self) -> int:
        return self.rho.n

    @cached_property
    def hasse(self) -> HasseValue:
        return pth_power_derivation(self.generator.curve, self.generator)

    @cached_property
    def working_field(self) -> GF:
        fields = [self.generator.curve.field] + [c.field for c in self.rho.coeffs]
        return common_field(*fields)

    def matrix(self) -> LieMatrix:
        return kostant_section(_lift_aqp(self.rho, self.working_field))

    def to_json(self):
        return {"rho": self.rho.to_json()}


@dataclass(frozen=True)
class MiuraSpec:
    """The Miura oper d + (q_{-1} + mu) with mu a torus point."""

    curve: object
    generator: InvariantDifferential
    mu: TorusPoint
    degenerate: bool = False

    def matrix(self) -> LieMatrix:
        F = field(self.mu.p)
        n = len(self.mu.coords)
        lift = self.mu.traceless_lift() if not self.degenerate else self.mu.coords
        qm, _, _ = principal_nilpotents(n)
        rows = [[F(qm[i][j] + (lift[i] if i == j else 0)) for j in range(n)] for i in range(n)]
        return LieMatrix(tuple(tuple(r) for r in rows))

    def to_json(self):
        out = {"mu": list(self.mu.traceless_lift() if not self.degenerate else self.mu.coords)}
        if self.degenerate:
            out["degenerate"] = True
        return out


@dataclass(frozen=True)
class PCurvatureValue:
    matrix: LieMatrix

    def is_zero(self) -> bool:
        return linalg.is_zero(self.matrix.entries)


def p_curvature(v, H) -> PCurvatureValue:
    """M^p - H*M, the p-curvature of d + M for a generator with Hasse invariant H."""
    v = v if isinstance(v, LieMatrix) else LieMatrix(tuple(tuple(r) for r in v))
    h = H.h if isinstance(H, HasseValue) else H
    F_v = v.ring
    if isinstance(h, FieldElem) and isinstance(F_v, GF) and h.field != F_v:
        F = common_field(F_v, h.field)
        entries = linalg.map_entries(lambda x: coerce(x, F), v.entries)
        h = coerce(h, F)
    else:
        entries = v.entries
    p = h.field.p if isinstance(h, FieldElem) else F_v.p
    Mp = linalg.matpow(entries, p)
    return PCurvatureValue(LieMatrix(linalg.matsub(Mp, linalg.scale(h, entries)), v.convention))


def is_dormant(spec: OperSpec) -> bool:
    return p_curvature(spec.matrix(), spec.hasse).is_zero()


def is_p_nilpotent(spec: OperSpec) -> bool:
    """chi of the p-curvature vanishes (weaker than dormancy)."""
    psi = p_curvature(spec.matrix(), spec.hasse)
    return chi(psi.matrix).is_zero()


def gauge_transform(v, h) -> LieMatrix:
    """h v h^{-1} for a constant invertible gauge h."""
    v = v if isinstance(v, LieMatrix) else LieMatrix(tuple(tuple(r) for r in v))
    h = h.entries if isinstance(h, LieMatrix) else h
    hinv = linalg.inverse(h)
    return LieMatrix(linalg.matmul(linalg.matmul(h, v.entries), hinv), v.convention)


def hm_gamma(a, rho: AdjointQuotientPoint) -> AdjointQuotientPoint:
    """chi(M^p - a*M) for M = q_{-1} + kappa^{-1}(rho)."""
    base = rho.coeffs[0].ring
    if isinstance(base, GF) and isinstance(a, FieldElem) and a.field != base:
        F = common_field(base, a.field)
        rho = _lift_aqp(rho, F)
        a = coerce(a, F)
    M = kostant_section(rho).entries
    p = base.base.p if hasattr(base, "base") else base.p
    Mp = linalg.matpow(M, p)
    return chi(linalg.matsub(Mp, linalg.scale(a, M)))


def hm_gamma_symbolic(a: FieldElem, n: int = 2) -> AdjointQuotientPoint:
    """gamma_a with rho = (d, ...) as polynomials; only n = 2 is a single variable."""
    if n != 2:
        raise ValueError("the symbolic route is implemented for n = 2")
    d = Poly(a.field, [0, 1], "d")
    return hm_gamma(a, AdjointQuotientPoint((d,)))


def frobenius_aqp(rho: AdjointQuotientPoint) -> AdjointQuotientPoint:
    return AdjointQuotientPoint(tuple(c.frobenius() for c in rho.coeffs), rho.convention)


# ---------------------------------------------------------------------------
# classification

def _normalized(curve):
    """(generator, H): a generator with H = 1 if ordinary, the canonical one otherwise."""
    delta = InvariantDifferential.canonical(curve)
    H = pth_power_derivation(curve, delta)
    if H.is_zero():
        return delta, H
    delta = normalize_generator(curve, delta)
    return delta, pth_power_derivation(delta.curve, delta)


def regular_class_rho(mu: TorusPoint) -> AdjointQuotientPoint:
    F = field(mu.p)
    lift = mu.traceless_lift()
    return chi(linalg.diag(F, list(lift)))


def _sort_key(spec):
    return tuple(c.code for c in spec.rho.coeffs)


def dormant_sweep(n: int, H: FieldElem, F: GF, workers: Optional[int] = None) -> list[AdjointQuotientPoint]:
    """Every rho in c(F) whose Kostant oper has M^p - H*M = 0 (batched kernel)."""
    H = coerce(H, F)
    points = list(_all_aqp(F, n))
    mats = np.empty((len(points), n, n), dtype=np.int64)
    for b, rho in enumerate(points):
        M = kostant_section(rho).entries
        for i in range(n):
            for j in range(n):
                mats[b, i, j] = M[i][j].code
    out = _kernels.batched_pcurvature(mats, F.p, H.code, F.numpy_tables())
    zero = ~out.reshape(len(points), -1).any(axis=1)
    return [rho for rho, z in zip(points, zero) if z]


def _all_aqp(F: GF, n: int):
    for codes in itertools.product(range(F.q), repeat=n - 1):
        yield AdjointQuotientPoint(tuple(F.from_code(c) for c in codes))


def classify_dormant(curve, n: int, verify: bool = True, sweep_field: Optional[GF] = None) -> list[OperSpec]:
    """Dormant opers up to isomorphism, one per class of t_reg(F_p)/W (or rho = 0 if supersingular).

    With ``verify`` every returned spec is checked with ``is_dormant`` and the
    complement is checked exhaustively over c(F_{p^2}) (or ``sweep_field``).
    """
    p = curve.field.p
    _check_rank(n, p)
    delta, H = _normalized(curve)
    Fp = field(p)
    if H.is_zero():
        specs = [OperSpec(curve, delta, AdjointQuotientPoint(tuple(Fp.zero for _ in range(n - 1))))]
    else:
        datum = root_datum("A", n - 1)
        specs = [OperSpec(curve, delta, regular_class_rho(orbit[0]))
                 for orbit in weyl_orbits(datum, p)]
        specs.sort(key=_sort_key)
    if verify:
        for s in specs:
            if not is_dormant(s):
                raise VerificationFailure(f"class {s.rho.to_json()} is not dormant")
        F = sweep_field or field(p, 2)
        swept = dormant_sweep(n, H.h if H.h.field.d <= F.d else H.h, F)
        expected = sorted(tuple(coerce(c, F).code for c in s.rho.coeffs) for s in specs)
        found = sorted(tuple(c.code for c in rho.coeffs) for rho in swept)
        if expected != found:
            raise VerificationFailure(
                f"exhaustive sweep over {F!r} found {len(found)} dormant points, expected {len(expected)}")
    return specs


def miura_fiber(spec: OperSpec, allow_degenerate: bool = True) -> list[MiuraSpec]:
    """All regular mu in t(F_p) with chi(mu) = rho; exactly n! of them."""
    if not is_dormant(spec):
        raise NotDormant(f"rho = {spec.rho.to_json()} is not dormant")
    n, p = spec.n, spec.curve.field.p
    if spec.hasse.is_zero():
        if not allow_degenerate:
            raise SupersingularInput("supersingular fiber is a single degenerate point")
        return [MiuraSpec(spec.curve, spec.generator, TorusPoint((0,) * n, p), degenerate=True)]
    datum = root_datum("A", n - 1)
    target = tuple(c.code for c in spec.rho.coeffs)
    out = []
    for mu in regular_points(datum, p):
        rho = regular_class_rho(mu)
        if tuple(coerce(c, spec.working_field).code for c in rho.coeffs) == \
                tuple(coerce(c, spec.working_field).code for c in spec.rho.coeffs):
            out.append(MiuraSpec(spec.curve, spec.generator, mu))
    if len(out) != math.factorial(n):
        raise VerificationFailure(f"fiber over {target} has {len(out)} points, expected {math.factorial(n)}")
    for m in out:
        if not is_regular(datum, m.mu.coords, p):  # pragma: no cover
            raise VerificationFailure("Miura lift is not regular")
        if chi(m.matrix()).coeffs != spec.rho.coeffs:
            raise VerificationFailure("chi(q_{-1} + mu) differs from rho")
    return out
