"""The fixed list of checks run by ``mhecke verify-paper``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from .errors import MHeckeError
from .field import QuadTowerNumber, factorint, is_fundamental, kronecker, scalar_str
from .forms import (
    Classical, Faber, Hauptmodul, LEVEL9_CUSP_VALUE, expand, faber_polynomial, level9_form,
    level11_form,
)
from .hecke import is_mult_eigenform, mh_exponents, mh_prime_exponents, mh_series_direct
from .prodexp import from_exponents, to_exponents, weighted_divisor_sum
from .quadforms import BQF, gamma0_equivalent

__all__ = ["Check", "CheckResult", "GROUPS", "checks", "run_checks"]

S2 = QuadTowerNumber.sqrt(2)
S3 = QuadTowerNumber.sqrt(-3)


@dataclass(frozen=True)
class Check:
    id: str
    group: str
    description: str
    expected: str
    run: object  # (config) -> (got string, ok)


@dataclass(frozen=True)
class CheckResult:
    id: str
    description: str
    expected: str
    got: str
    ok: bool
    ms: float

    def to_json(self, timings: bool = False) -> dict:
        out = {"id": self.id, "description": self.description, "expected": self.expected,
               "got": self.got, "pass": self.ok}
        if timings:
            out["runtime_ms"] = f"{self.ms:.1f}"
        return out


def _fmt(values) -> str:
    return "(" + ", ".join(scalar_str(v) for v in values) + ")"


def _exact(expected: tuple, compute):
    def run(cfg):
        got = tuple(compute(cfg))
        return _fmt(got), got == expected
    return run


# -- exponents --------------------------------------------------------------


def _twisted_8_3(cfg):
    from .traces import twisted_borcherds_numeric
    H = twisted_borcherds_numeric(8, 3, 1, prec=cfg.prec, T=4)
    return to_exponents(H, 8).c[:3]


def _level11(n):
    def compute(cfg):
        f = expand(level11_form(), max(28, cfg.terms))
        return mh_exponents(to_exponents(f, 8), n, 11).c[:3]
    return compute


def _level9_pe(T):
    return to_exponents(expand(level9_form(), T), 1)


def _level9_t2(cfg):
    pe = mh_prime_exponents(_level9_pe(8), 2, 9)
    return (pe.h,) + pe.c[:3]


def _level9_eigen(cfg):
    v = is_mult_eigenform(expand(level9_form(), 12), (2,), 9)
    return str(v), (not v.eigenform and v.prime == 2 and v.power == 3 and v.witness is not None)


def _level9_cusp(cfg):
    from .traces import cusp_value, recognize
    val = cusp_value(Hauptmodul(9), Fraction(1, 3), 9, cfg.prec)
    got, resid = recognize(val, -3, prec=cfg.prec)
    return f"{got} (residual {resid:.1e})", got == LEVEL9_CUSP_VALUE and resid < 1e-20


# -- traces -----------------------------------------------------------------


def _trace_value(D, d, N, n, expected):
    def run(cfg):
        from .traces import twisted_trace
        r = twisted_trace(D, d, N, Faber(N, n), cfg.prec, class_source=cfg.class_source)
        return (f"{r.recognized} (residual {r.residual:.1e})",
                r.passed and r.residual < 1e-6 and r.recognized == expected)
    return run


def _trace_congruence(r):
    def run(cfg):
        from .traces import verify_trace_congruence
        rep = verify_trace_congruence(13, 4, 7, 3, r, cfg.prec)
        failed = [c for c, ok in rep.verdicts if not ok]
        return ("all pass" if not failed else "failed: " + "; ".join(failed)), not failed
    return run


def _classes(d, N, beta, expected):
    def run(cfg):
        cl = cfg.class_source_single(d, N, beta)
        forms = cl.forms()
        matched = [[i for i, R in enumerate(forms) if gamma0_equivalent(BQF(*q), R, N)] for q in expected]
        ok = len(forms) == len(expected) and sorted(m[0] for m in matched if len(m) == 1) == list(range(len(forms)))
        return f"{len(forms)} classes: " + " ".join(str(q) for q in forms), ok
    return run


# -- properties -------------------------------------------------------------


def _faber73(cfg):
    got = faber_polynomial(7, 3)
    return _fmt(got), got == (-24, -6, 0, 1)


def _delta_eigen(cfg):
    v = is_mult_eigenform(expand(Classical("Delta"), 30), (2, 3, 5), 1)
    ok = v.eigenform
    for p in (2, 3, 5):
        delta = expand(Classical("Delta"), 30)
        g = mh_series_direct(delta, p, 1)
        ok = ok and g.agrees_with(delta ** (p + 1))
    return str(v), ok


def _d_independence(cfg):
    f = expand(level11_form(), 25)
    ref = None
    for D in (1, 5, 8, 13, 17):
        pe = to_exponents(f, D)
        sums = tuple(weighted_divisor_sum(pe, n) for n in range(1, 25))
        if ref is None:
            ref = sums
        elif sums != ref:
            return f"differs at D={D}", False
    return "equal for D in (1, 5, 8, 13, 17)", True


def _round_trip(cfg):
    f = expand(level9_form(), 40)
    back = from_exponents(to_exponents(f, 1))
    return ("exact" if back.agrees_with(f) else "mismatch"), back.agrees_with(f)


def _composition(cfg):
    f = expand(Classical("Delta"), 40)
    pe = to_exponents(f, 8)
    ok = True
    for r, s in ((2, 3), (2, 5)):
        a = mh_exponents(pe, r * s, 1, order=(r, s)).c[:5]
        b = mh_exponents(pe, r * s, 1, order=(s, r)).c[:5]
        ok = ok and a == b
    return ("T(r)T(s) = T(s)T(r) = T(rs)" if ok else "orders disagree"), ok


def _level1_sum(cfg):
    # the weight u is needed: c_m(1) = sum_{u|m} u c(u)
    pe = to_exponents(expand(Classical("E4"), 60), 1)
    ok = all(
        mh_exponents(pe, m, 1)[1] == sum(u * pe[u] for u in range(1, m + 1) if m % u == 0)
        for m in range(1, 21)
    )
    return ("holds for m <= 20" if ok else "fails"), ok


def character_sum_failures(limit: int = 120) -> list:
    """(D, p, m) with p | D, p | m, 0 < m < D and sum_i (D/(m/p + i D/p)) != 0."""
    bad = []
    for D in range(2, limit + 1):
        if not is_fundamental(D):
            continue
        for p, _ in factorint(D):
            for m in range(p, D, p):
                if sum(kronecker(D, m // p + i * (D // p)) for i in range(p)):
                    bad.append((D, p, m))
    return bad


def _character_sum(cfg):
    bad = character_sum_failures(120)
    return ("zero for all fundamental D <= 120" if not bad else f"nonzero at {bad[:3]}"), not bad


def _chi_sum(cfg):
    from .traces import character_sum
    cases = ((13, 4, 7), (13, 36, 7), (8, 3, 1), (5, 4, 1))
    got = [character_sum(D, d, N, cfg.class_source) for D, d, N in cases]
    return _fmt(got), all(g == 0 for g in got)


def checks() -> list[Check]:
    expected_468_p = [(126, 6, 1), (63, 6, 2), (42, 6, 3), (21, 6, 6), (7, 6, 18),
                       (154, 62, 7), (238, 90, 9), (77, 48, 9), (14, 6, 9), (98, 62, 11)]
    expected_468_m = [(133, 8, 1), (119, 22, 2), (147, 36, 3), (21, -6, 6), (63, 36, 7),
                       (7, -6, 18), (49, 36, 9), (14, -6, 9), (182, 78, 9), (266, 106, 11)]
    half = Fraction(1, 2)
    return [
        Check("exponents.twisted_8_3", "exponents", "c(8,1..3) of the twisted Borcherds product for (8,3)",
              "(1707264, 4125992712192, 13288900691444361984)",
              _exact((1707264, 4125992712192, 13288900691444361984), _twisted_8_3)),
        Check("hecke.level11.T3", "hecke", "level-11 form, D=8, exponents of f|T~(3)",
              _fmt((-9 * S2, -288 * S2, 11742 * S2)),
              _exact((-9 * S2, -288 * S2, 11742 * S2), _level11(3))),
        Check("hecke.level11.T9", "hecke", "level-11 form, D=8, exponents of f|T~(9)",
              _fmt((35235 * S2, 1134001917 * S2, 43213358093067 * S2)),
              _exact((35235 * S2, 1134001917 * S2, 43213358093067 * S2), _level11(9))),
        Check("level9.exponents", "level9", "exponents c(1..3) of h - alpha at level 9",
              _fmt((-(3 + 3 * S3) * half, (-3 + 6 * S3) * half, (9 + S3) * half)),
              _exact((-(3 + 3 * S3) * half, (-3 + 6 * S3) * half, (9 + S3) * half),
                     lambda cfg: _level9_pe(8).c[:3])),
        Check("level9.T2", "level9", "offset and exponents of f|T~(2)",
              _fmt((-3, (-9 + 9 * S3) * half, (-9 - 18 * S3) * half, (27 - 3 * S3) * half)),
              _exact((-3, (-9 + 9 * S3) * half, (-9 - 18 * S3) * half, (27 - 3 * S3) * half),
                     _level9_t2)),
        Check("level9.eigen", "level9", "f|T~(2) is not f^3", "counterexample(2)", _level9_eigen),
        Check("level9.cusp", "level9", "value of h at the cusp 1/3", str(LEVEL9_CUSP_VALUE), _level9_cusp),
        Check("traces.13.4.f71", "traces", "(1/sqrt13) Tr_{13,4}(f_{7,1})", "-6",
              _trace_value(13, 4, 7, 1, -6)),
        Check("traces.13.4.f73", "traces", "(1/sqrt13) Tr_{13,4}(f_{7,3})", "8244",
              _trace_value(13, 4, 7, 3, 8244)),
        Check("traces.13.36.f71", "traces", "(1/sqrt13) Tr_{13,36}(f_{7,1})", "8238",
              _trace_value(13, 36, 7, 1, 8238)),
        Check("traces.congruence.r1", "traces", "congruence mod 3 and identity for r=1", "all pass", _trace_congruence(1)),
        Check("traces.congruence.r2", "traces", "identity for r=2 (uses d=324)", "all pass", _trace_congruence(2)),
        Check("classes.52.+2", "classes", "Q_{52,7,2}/Gamma0(7)", "2 classes",
              _classes(52, 7, 2, [(14, 2, 1), (7, 2, 2)])),
        Check("classes.52.-2", "classes", "Q_{52,7,-2}/Gamma0(7)", "2 classes",
              _classes(52, 7, -2, [(49, 12, 1), (7, -2, 2)])),
        Check("classes.468.+6", "classes", "Q_{468,7,6}/Gamma0(7)", "10 classes",
              _classes(468, 7, 6, expected_468_p)),
        Check("classes.468.-6", "classes", "Q_{468,7,-6}/Gamma0(7)", "10 classes",
              _classes(468, 7, -6, expected_468_m)),
        Check("properties.faber73", "properties", "f_{7,3} as a polynomial in the Hauptmodul",
              "X^3 - 6X - 24 = (-24, -6, 0, 1)", _faber73),
        Check("properties.delta", "properties", "Delta|T~(p) = Delta^(p+1), p = 2, 3, 5",
              "eigenform", _delta_eigen),
        Check("properties.d_independence", "properties", "weighted divisor sums do not depend on D",
              "equal", _d_independence),
        Check("properties.round_trip", "properties", "from_exponents(to_exponents(f)) = f", "exact",
              _round_trip),
        Check("properties.composition", "properties", "T~(r)T~(s) in either order, (r,s) = (2,3), (2,5)",
              "equal", _composition),
        Check("properties.level1_sum", "properties", "c_m(1) = sum_{u|m} u c(u) at level 1, m <= 20",
              "holds", _level1_sum),
        Check("properties.character_sum", "properties", "sum_i (D/(m/p + iD/p)) = 0 for p | D, p | m",
              "zero", _character_sum),
        Check("properties.chi_over_omega", "properties", "sum chi_D(Q)/omega_Q over each trace instance",
              "(0, 0, 0, 0)", _chi_sum),
    ]


GROUPS = ("exponents", "hecke", "level9", "traces", "classes", "properties")


def run_checks(cfg, only=None) -> list[CheckResult]:
    """Run every check (or the groups/ids in ``only``); failures never abort the run."""
    out = []
    for chk in checks():
        if only and chk.group not in only and chk.id not in only:
            continue
        t0 = time.perf_counter()
        try:
            got, ok = chk.run(cfg)
        except (MHeckeError, ArithmeticError, ValueError) as exc:
            got, ok = f"error: {type(exc).__name__}: {exc}", False
        out.append(CheckResult(chk.id, chk.description, chk.expected, got, bool(ok),
                               1000 * (time.perf_counter() - t0)))
    return out
