"""Multiplicative Hecke operators on product exponents and on q-series,
plus the usual (additive) Hecke operator on q-expansions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InsufficientTruncation, LeadingNotOne
from .field import factorint, is_prime, kronecker, sigma, simplify
from .prodexp import ProductExpansion
from .qseries import QSeries, exp_zero, log_unit, power_unit, substitute_power

__all__ = [
    "EigenVerdict",
    "HeckeIndex",
    "beta",
    "is_mult_eigenform",
    "mh_exponents",
    "mh_prime_exponents",
    "mh_prime_power_exponents",
    "mh_series_direct",
    "unitary_scalar",
    "usual_hecke",
]


@dataclass(frozen=True)
class HeckeIndex:
    n: int
    N: int

    @property
    def factorization(self) -> tuple:
        return factorint(self.n) if self.n > 1 else ()

    def divides_level(self, p: int) -> bool:
        return self.N % p == 0

    @property
    def beta(self) -> int:
        return beta(self.n, self.N)


def beta(n: int, N: int) -> int:
    """Factor by which T~(n) multiplies the leading power: sigma on the part prime to N."""
    out = 1
    for p, e in (factorint(n) if n > 1 else ()):
        if N % p:
            out *= sigma(p**e)
    return out


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def _step(prev, prevprev, p: int, D: int, N: int):
    """One application of the exponent recursion.

    ``prev`` / ``prevprev`` are lists indexed 1..M (index 0 unused).  Returns
    the new list of length floor(M/p) + 1.
    """
    M = (len(prev) - 1) // p
    chi_p = kronecker(D, p)
    out = [0] * (M + 1)
    for n in range(1, M + 1):
        v = p * prev[p * n]
        if N % p:
            if n % p == 0:
                v = v + prev[n // p]
            if prevprev is not None:
                v = v - p * prevprev[n]
        if chi_p and n % p:
            v = v + chi_p * prev[n]
        out[n] = simplify(v) if v else 0
    return out


def _as_list(pe: ProductExpansion):
    return [0] + list(pe.c)


def _need(pe: ProductExpansion, factor: int) -> None:
    if pe.T - 1 < factor:
        raise InsufficientTruncation(
            f"need exponents up to index {factor} (input T={pe.T}); supply more terms"
        )


def mh_prime_exponents(pe: ProductExpansion, p: int, N: int) -> ProductExpansion:
    """Exponents of f|T~(p); output truncation floor((T-1)/p) + 1."""
    _check_prime(p)
    _need(pe, p)
    out = _step(_as_list(pe), None, p, pe.D, N)
    return ProductExpansion(pe.h * beta(p, N), pe.D, tuple(out[1:]))


def mh_prime_power_exponents(pe: ProductExpansion, p: int, t: int, N: int) -> ProductExpansion:
    """Exponents of f|T~(p^t).

    For p not dividing N this is the three-term recursion in t; for p | N the
    operator is the t-th iterate of T~(p).
    """
    _check_prime(p)
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return pe
    _need(pe, p**t)
    older, old = None, _as_list(pe)
    for _ in range(t):
        new = _step(old, older if N % p else None, p, pe.D, N)
        older, old = old, new
    return ProductExpansion(pe.h * beta(p**t, N), pe.D, tuple(old[1:]))


def mh_exponents(pe: ProductExpansion, n: int, N: int, order=None) -> ProductExpansion:
    """Exponents of f|T~(n) composed over the prime powers of n.

    ``order`` optionally fixes the sequence of prime-power factors; any order
    gives the same result.
    """
    if n < 1:
        raise ValueError("n must be positive")
    factors = list(order) if order is not None else [p**e for p, e in (factorint(n) if n > 1 else ())]
    for q in factors:
        (p, t), = factorint(q)
        pe = mh_prime_power_exponents(pe, p, t, N)
    return pe


def mh_series_direct(f: QSeries, p: int, N: int) -> QSeries:
    """f|T~(p) straight from the q-expansion.

    prod_j f((tau+j)/p) = q^h exp(p * sum_{p|m} l_m q^(m/p)) where
    log(f q^-h) = sum l_m q^m; for p not dividing N multiply by f(p tau).
    The result is normalized to leading coefficient 1.
    """
    _check_prime(p)
    if f.offset.denominator != 1:
        raise ValueError("mh_series_direct needs an integral q-offset")
    if f.leading != 1:
        raise LeadingNotOne(f"leading coefficient is {f.leading}, expected 1")
    h = int(f.offset)
    L = log_unit(QSeries(0, f.coeffs))
    T = f.truncation
    M = (T - 1) // p
    filtered = [0] * (M + 1)
    for m in range(1, M + 1):
        if p * m >= L.offset:
            c = L[p * m]
            filtered[m] = simplify(p * c) if c else 0
    out = QSeries(h, exp_zero(QSeries(0, filtered)).coeffs)
    if N % p:
        out = out * substitute_power(f, p)
    lead = out.leading
    if lead != 1:
        out = out / lead
    return out


def unitary_scalar(k: int, p: int):
    """Factor s with usual_hecke(f) = s * (f|T(p) in the p^(k/2-1) normalization)."""
    if k == 0:
        return p
    if k % 2:
        raise ValueError("odd weight has no integral normalization here")
    return Fraction(p) ** (k // 2)


def usual_hecke(f: QSeries, k: int, p: int, N: int) -> QSeries:
    """Usual Hecke operator on q-expansions.

    Weight k != 0: b(n) = a(pn) + p^(k-1) a(n/p) (only a(pn) when p | N).
    Weight 0: b(n) = p a(pn) + a(n/p), so q^-1 + O(1) maps to q^-p + O(1).
    """
    _check_prime(p)
    if f.offset.denominator != 1:
        raise ValueError("usual_hecke needs an integral q-offset")
    if f.is_zero():
        return f
    lo = int(f.offset)
    prec = int(f.precision)
    scale_up = p if k == 0 else 1
    low_weight = 1 if k == 0 else Fraction(p) ** (k - 1)
    start = -((-lo) // p)
    if N % p:
        start = min(start, p * lo)
    stop = (prec - 1) // p + 1  # need p*n < prec
    out = []
    for n in range(start, stop):
        v = 0
        if p * n >= lo:
            v = scale_up * f[p * n]
        if N % p and n % p == 0 and n // p >= lo:
            v = v + low_weight * f[n // p]
        out.append(simplify(v) if v else 0)
    return QSeries(start, out)


@dataclass(frozen=True)
class EigenVerdict:
    eigenform: bool
    tested_primes: tuple
    prime: int | None = None
    power: object = None
    witness: object = None  # exponent of q where f|T~(p) and f^m first differ

    def __str__(self):
        if self.eigenform:
            return f"eigenform-on-tested-primes {list(self.tested_primes)}"
        return f"counterexample({self.prime}): differs from f^{self.power} at q^{self.witness}"


def _candidate_power(unit: QSeries, g: QSeries, h):
    """The only integer m for which f|T~(p) = f^m is possible (None if there is none)."""
    if h:
        m = g.offset / h
    else:
        body = unit - 1
        if body.is_zero() or body.offset >= g.precision:
            return 1
        m = simplify(Fraction(1) * g[body.offset] / body.leading) if g[body.offset] else 0
        if not isinstance(m, (int, Fraction)):
            m = m.rational() if m.is_rational() else None
            if m is None:
                return None
    m = Fraction(m)
    return int(m) if m.denominator == 1 else None


def is_mult_eigenform(f: QSeries, test_primes, N: int) -> EigenVerdict:
    """Check f|T~(p) == f^m for an integer m, prime by prime."""
    tested = tuple(test_primes)
    h = f.offset
    unit = QSeries(0, f.coeffs)
    for p in tested:
        g = mh_series_direct(f, p, N)
        m = _candidate_power(unit, g, h)
        if m is None:
            witness = g.offset if h else (unit - 1).offset
            return EigenVerdict(False, tested, p, None, witness)
        fm = QSeries(h * m, power_unit(unit, m).coeffs)
        diff = g.first_difference(fm)
        if diff is not None:
            return EigenVerdict(False, tested, p, m, diff)
    return EigenVerdict(True, tested)
