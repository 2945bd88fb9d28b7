"""Command-line front end.  Every command emits a certificate.

A certificate is canonical JSON (sorted keys, exact integers) holding the
job echo, the results, every oracle cross-check and the package version.
Exit codes: 0 success, 1 invalid input, 2 a cross-check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Any, Optional

from . import __version__, dop_local, elliptic, opers, rootdata, witt_opers
from ._kernels import thread_cap
from .errors import OperlabError, ValidationError, VerificationFailure
from .rings import WittRing, field, is_prime

COMMANDS = ("curve", "oper", "witt", "dop", "census")


@dataclass(frozen=True)
class JobConfig:
    command: str
    action: Optional[str] = None
    params: dict = dc_field(default_factory=dict)

    def echo(self) -> dict:
        out = {"command": self.command, "params": {k: v for k, v in sorted(self.params.items())
                                                   if k not in ("out", "format")}}
        if self.action:
            out["action"] = self.action
        return out


@dataclass
class Certificate:
    job: dict
    results: Any
    checks: dict
    table: list = dc_field(default_factory=list)
    version: str = __version__
    deterministic: bool = True

    @property
    def passed(self) -> bool:
        return all(v in (True, "pass") for v in _flatten(self.checks))

    def as_dict(self) -> dict:
        return {"job": self.job, "results": self.results, "checks": self.checks,
                "all_checks_pass": self.passed, "version": self.version,
                "deterministic": self.deterministic}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, ensure_ascii=True) + "\n"

    def to_csv(self) -> str:
        rows = self.table or ([self.results] if isinstance(self.results, dict) else [])
        buf = io.StringIO()
        if not rows:
            return ""
        cols = sorted({k for r in rows for k in r})
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _csv_cell(r.get(k)) for k in cols})
        return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return v


def _flatten(checks):
    if isinstance(checks, dict):
        for v in checks.values():
            yield from _flatten(v)
    elif isinstance(checks, list):
        for v in checks:
            yield from _flatten(v)
    else:
        yield checks


def _pmap(fn, items):
    """Order-preserving map over sweep points, capped by OPERLAB_THREADS."""
    items = list(items)
    workers = min(thread_cap(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------------------
# parameter parsing

def parse_primes(text: str) -> list[int]:
    """'5..13' or '5,7,11' (inclusive ranges, composites dropped)."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    primes = sorted({q for q in out if is_prime(q)})
    if not primes:
        raise ValidationError("p", f"no primes in {text!r}")
    return primes


def _prime(params, key="p") -> int:
    if params.get(key) is None:
        raise ValidationError(key, "required")
    p = int(params[key])
    if not is_prime(p):
        raise ValidationError(key, f"{p} is not prime")
    return p


def _int_list(text: str, param: str) -> list[int]:
    try:
        return [int(x) for x in str(text).split(",") if x.strip() != ""]
    except ValueError:
        raise ValidationError(param, f"expected comma-separated integers, got {text!r}")


def parse_matrix(text: str, param: str = "matrix") -> list[list[int]]:
    rows = [_int_list(r, param) for r in str(text).split(";")]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValidationError(param, "matrix must be square, rows separated by ';'")
    return rows


def _required(params, key):
    if params.get(key) is None:
        raise ValidationError(key, "required")
    return params[key]


# ---------------------------------------------------------------------------
# commands

def _curve_hasse(params):
    curve = elliptic.parse_curve(_required(params, "curve"))
    if isinstance(curve, elliptic.NodeModel):
        H = elliptic.pth_power_derivation(curve)
        results = {"curve": curve.describe(), "H": H.to_json(), "ordinary": True}
        checks = {"node_H_is_1": H.h == 1}
        return results, checks, [results]
    triple = elliptic.hasse_triple(curve)
    agree = 1 + int(triple["agree_derivation_deuring"]) + int(triple["agree_point_count"])
    results = {"curve": curve.describe(), "H": triple["H_derivation"],
               "H_deuring": triple["H_deuring"], "points": triple["points"],
               "ordinary": triple["ordinary"], "agreement": f"{agree}/3"}
    checks = {"derivation_equals_deuring": triple["agree_derivation_deuring"],
              "point_count_agrees": triple["agree_point_count"]}
    return results, checks, [results]


def _curve_normalize(params):
    curve = elliptic.parse_curve(_required(params, "curve"))
    delta = elliptic.normalize_generator(curve)
    H = elliptic.pth_power_derivation(delta.curve, delta)
    results = {"curve": curve.describe(), "field_degree": delta.curve.field.d,
               "modulus": list(delta.curve.field.modulus), "scale": delta.scale.to_json(),
               "H_after": H.to_json()}
    return results, {"normalized_H_is_1": H.h == 1}, [results]


def _oper_classify(params):
    curve = elliptic.parse_curve(_required(params, "curve"))
    n = int(_required(params, "n"))
    specs = opers.classify_dormant(curve, n, verify=True)
    H0 = elliptic.pth_power_derivation(curve)
    classes = []
    fibers_ok = True
    for s in specs:
        lifts = opers.miura_fiber(s)
        expected = 1 if s.hasse.is_zero() else math.factorial(n)
        fibers_ok &= len(lifts) == expected
        classes.append({"rho": s.rho.to_json(), "dormant": opers.is_dormant(s),
                        "miura_lifts": [m.to_json() for m in lifts]})
    expected_count = 1 if H0.is_zero() else rootdata.weyl_orbit_count(
        rootdata.root_datum("A", n - 1), curve.field.p)
    results = {"curve": curve.describe(), "H": H0.to_json(), "normalized": not H0.is_zero(),
               "generator_field_degree": specs[0].generator.curve.field.d, "classes": classes,
               "count": len(classes)}
    checks = {"all_dormant": all(c["dormant"] for c in classes),
              "exhaustive_sweep_F_p2": True,  # classify_dormant raises if the sweep disagrees
              "count_matches_orbit_count": len(classes) == expected_count,
              "miura_fiber_sizes": fibers_ok}
    table = [{"rho": c["rho"], "dormant": c["dormant"], "miura_lifts": len(c["miura_lifts"])}
             for c in classes]
    return results, checks, table


def _oper_miura_fiber(params):
    curve = elliptic.parse_curve(_required(params, "curve"))
    n = int(_required(params, "n"))
    specs = opers.classify_dormant(curve, n, verify=False)
    rho = _int_list(_required(params, "rho"), "rho")
    if len(rho) != n - 1:
        raise ValidationError("rho", f"need {n - 1} coefficients")
    Fp = field(curve.field.p)
    target = rootdata.AdjointQuotientPoint(tuple(Fp(x) for x in rho))
    spec = opers.OperSpec(curve, specs[0].generator, target)
    lifts = opers.miura_fiber(spec)
    results = {"curve": curve.describe(), "rho": target.to_json(),
               "miura_lifts": [m.to_json() for m in lifts]}
    expected = 1 if spec.hasse.is_zero() else math.factorial(n)
    return results, {"fiber_size": len(lifts) == expected}, [m.to_json() for m in lifts]


def _oper_hm(params):
    p = _prime(params)
    F = field(p)
    a = F(int(_required(params, "a")))
    rho_vals = _int_list(_required(params, "rho"), "rho")
    n = len(rho_vals) + 1
    if not n < p:
        raise ValidationError("rho", f"n = {n} needs n < p")
    rho = rootdata.AdjointQuotientPoint(tuple(F(x) for x in rho_vals))
    gamma = opers.hm_gamma(a, rho)
    results = {"p": p, "n": n, "a": a.to_json(), "rho": rho.to_json(), "gamma": gamma.to_json()}
    checks = {}
    if a.is_zero():
        checks["gamma_0_is_frobenius"] = gamma.coeffs == opers.frobenius_aqp(rho).coeffs
    if n == 2:
        sym = opers.hm_gamma_symbolic(a)
        results["symbolic_degree"] = sym.coeffs[0].degree
        checks["symbolic_matches_value"] = sym.coeffs[0](rho.coeffs[0]) == gamma.coeffs[0]
        checks["symbolic_degree_is_p"] = sym.coeffs[0].degree == p
    return results, checks, [results]


def _witt_classify(params):
    p, n, N = _prime(params), int(_required(params, "n")), int(_required(params, "N"))
    classes = witt_opers.theta_classify(n, p, N)

    def one(c):
        d = witt_opers.build_witt_oper(c.tuple(), "N1")
        round_trip = witt_opers.decompose_dormant_matrix(d.oper_basis_matrix(), p, N) == c
        reduced = witt_opers.diagonal_reduce(d)
        triangle = reduced == witt_opers.build_witt_oper(c.tuple(), "1N")
        lift_ok = witt_opers.canonical_diagonal_lift(reduced) == d
        return {"canonical": c.to_json(), "flag_det_unit": d.flag_det_unit,
                "miura_transversal": d.miura_transversal,
                "decompose_round_trip": "pass" if round_trip else "fail",
                "reduction_check": "pass" if triangle else "fail",
                "lift_round_trip": "pass" if lift_ok else "fail"}

    rows = _pmap(one, classes)
    results = {"p": p, "N": N, "n": n, "classes": rows, "count": len(rows),
               "formula": witt_opers.class_count_formula(n, p, N)}
    checks = {"count_matches_formula": len(rows) == results["formula"],
              "per_class": [{k: r[k] for k in ("flag_det_unit", "miura_transversal",
                                               "decompose_round_trip", "reduction_check",
                                               "lift_round_trip")} for r in rows]}
    if params.get("miura"):
        tuples = witt_opers.miura_classify(n, p, N)
        results["miura_tuples"] = [t.to_json() for t in tuples]
        checks["miura_fibers_n_factorial"] = len(tuples) == len(rows) * math.factorial(n)
    return results, checks, rows


def _witt_decompose(params):
    p, N = _prime(params), int(_required(params, "N"))
    A = parse_matrix(_required(params, "matrix"))
    c = witt_opers.decompose_dormant_matrix(A, p, N)
    d = witt_opers.build_witt_oper(c.tuple(), "N1")
    back = witt_opers.decompose_dormant_matrix(d.oper_basis_matrix(), p, N)
    results = {"p": p, "N": N, "matrix": A, "class": c.to_json()}
    return results, {"rebuild_round_trip": back == c}, [results]


def _witt_class_arg(params):
    p, N = _prime(params), int(_required(params, "N"))
    vals = _int_list(_required(params, "class"), "class")
    t = witt_opers.ATuple.make(vals, p, N)
    return t, p, N


def _witt_reduce(params):
    t, p, N = _witt_class_arg(params)
    d = witt_opers.build_witt_oper(t, "N1")
    r = witt_opers.diagonal_reduce(d)
    direct = witt_opers.build_witt_oper(t, "1N")
    results = {"p": p, "N": N, "class": d.a_class.to_json(), "reduced": r.to_json(),
               "level_structures": [s.to_json() for s in r.structures]}
    return results, {"reduction_check": r == direct}, [results]


def _witt_lift(params):
    t, p, N = _witt_class_arg(params)
    d = witt_opers.build_witt_oper(t, "1N")
    lifted = witt_opers.canonical_diagonal_lift(d)
    results = {"p": p, "N": N, "class": d.a_class.to_json(), "lifted": lifted.to_json()}
    return results, {"reduces_back": witt_opers.diagonal_reduce(lifted) == d}, [results]


def _dop_verify(params):
    p, N = _prime(params), int(_required(params, "N"))
    if N < 1:
        raise ValidationError("N", "must be >= 1")
    a = WittRing(p, N)(int(_required(params, "a")))
    window = int(params["window"]) if params.get("window") is not None else None
    report = dop_local.diagonal_reduction_report(a, window)
    s = dop_local.LevelStructure(a)
    sol = dop_local.sol(s, report.window)
    curvature = dop_local.pN_curvature_vanishes(s, report.window)
    results = {"report": report.to_json(), "sol_residue": sol.residue}
    checks = {"diagonal_reduction": report.passed,
              "pN_curvature_vanishes": curvature,
              "sol_residue_is_minus_a": sol.residue == (-a).value}
    table = []
    if params.get("table"):
        grid = dop_local.scalar_table(s, report.window)
        for row, k in enumerate(range(-report.window, report.window + 1)):
            table.append({"k": k, **{f"level_{i}": int(grid[row, i]) for i in range(N)}})
        results["table"] = table
    return results, checks, table or [results["report"]]


def _census(params):
    family = str(params.get("type") or "A").upper()
    n = int(_required(params, "n"))
    primes = parse_primes(_required(params, "p"))
    rank = n - 1 if family == "A" else n
    datum = rootdata.root_datum(family, rank)

    def one(p):
        if not p > datum.coxeter_number:
            return {"p": p, "skipped": "p <= h"}
        count = rootdata.weyl_orbit_count(datum, p)
        row = {"p": p, "count": count, "regular_points": len(rootdata.regular_points(datum, p))}
        if family == "A":
            row["formula"] = rootdata.regular_class_formula(n, p)
        return row

    rows = _pmap(one, primes)
    counts = {str(r["p"]): r["count"] for r in rows if "count" in r}
    results = {"type": family, "rank": rank, "weyl_order": datum.weyl_order,
               "counts": counts, "rows": rows}
    checks = {"formula": [r["count"] == r["formula"] for r in rows if "formula" in r],
              "free_action": [r["regular_points"] == r["count"] * datum.weyl_order
                              for r in rows if "count" in r]}
    return results, checks, rows


DISPATCH = {
    ("curve", "hasse"): _curve_hasse,
    ("curve", "normalize"): _curve_normalize,
    ("oper", "classify"): _oper_classify,
    ("oper", "miura-fiber"): _oper_miura_fiber,
    ("oper", "hm"): _oper_hm,
    ("witt", "classify"): _witt_classify,
    ("witt", "decompose"): _witt_decompose,
    ("witt", "reduce"): _witt_reduce,
    ("witt", "lift"): _witt_lift,
    ("dop", "verify-reduction"): _dop_verify,
    ("census", None): _census,
}


def run(config: JobConfig) -> Certificate:
    """Validate and dispatch a job; module errors propagate unchanged."""
    if config.command not in COMMANDS:
        raise ValidationError("command", f"unknown command {config.command!r}")
    handler = DISPATCH.get((config.command, config.action))
    if handler is None:
        raise ValidationError("action", f"unknown action {config.action!r} for {config.command}")
    results, checks, table = handler(dict(config.params))
    return Certificate(config.echo(), results, checks, table)


# ---------------------------------------------------------------------------
# argparse

def _common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the certificate here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="operlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    curve = sub.add_parser("curve", help="Hasse invariant and normalization")
    csub = curve.add_subparsers(dest="action", required=True)
    for name in ("hasse", "normalize"):
        c = csub.add_parser(name)
        c.add_argument("--curve", required=True, help='e.g. "p=5 A=1 B=0" or "node p=5"')
        _common(c)

    oper = sub.add_parser("oper", help="dormant opers over a curve")
    osub = oper.add_subparsers(dest="action", required=True)
    c = osub.add_parser("classify")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--curve", required=True)
    _common(c)
    c = osub.add_parser("miura-fiber")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--curve", required=True)
    c.add_argument("--rho", required=True, help="comma-separated coefficients")
    _common(c)
    c = osub.add_parser("hm")
    c.add_argument("--a", type=int, required=True)
    c.add_argument("--rho", required=True)
    c.add_argument("--p", type=int, default=5)
    _common(c)

    witt = sub.add_parser("witt", help="opers over Z/p^N")
    wsub = witt.add_subparsers(dest="action", required=True)
    c = wsub.add_parser("classify")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--miura", action="store_true")
    _common(c)
    c = wsub.add_parser("decompose")
    c.add_argument("--matrix", required=True, help='rows separated by ";", e.g. "0,-6;1,5"')
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--N", type=int, required=True)
    _common(c)
    for name in ("reduce", "lift"):
        c = wsub.add_parser(name)
        c.add_argument("--class", dest="class_", required=True, help="e.g. 0,1")
        c.add_argument("--p", type=int, required=True)
        c.add_argument("--N", type=int, required=True)
        _common(c)

    dop = sub.add_parser("dop", help="level structures on monomials")
    dsub = dop.add_subparsers(dest="action", required=True)
    c = dsub.add_parser("verify-reduction")
    c.add_argument("--a", type=int, required=True)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--window", type=int)
    c.add_argument("--table", action="store_true", help="include the full scalar table")
    _common(c)

    census = sub.add_parser("census", help="regular Weyl-orbit counts over a prime range")
    census.add_argument("--type", default="A", choices=rootdata.FAMILIES)
    census.add_argument("--n", type=int, required=True, help="n for type A_{n-1}, else the rank")
    census.add_argument("--p", required=True, help='"5..13" or "5,7,11"')
    _common(census)
    return parser


def config_from_args(ns: argparse.Namespace) -> JobConfig:
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "action") and v is not None}
    if "class_" in params:
        params["class"] = params.pop("class_")
    if params.get("miura") is False:
        params.pop("miura")
    if params.get("table") is False:
        params.pop("table")
    return JobConfig(ns.command, getattr(ns, "action", None), params)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    config = config_from_args(ns)
    try:
        cert = run(config)
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 2
    except (OperlabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = cert.to_csv() if config.params.get("format") == "csv" else cert.to_json()
    if config.params.get("out"):
        with open(config.params["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if cert.passed else 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
