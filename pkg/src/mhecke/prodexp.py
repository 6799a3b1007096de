"""Twisted product expansions f = q^h * prod_n P_D(q^n)^c(D,n).

Both directions go through the formal logarithm, so no roots of unity ever
appear: the q^m coefficient of log(f q^-h) is -(1/m) * sum_{d|m} d sqrt(D)
c(D,d) (D/(m/d)).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import LeadingNotOne, NotFundamental
from .field import divisors, is_fundamental, kronecker, scalar_str, simplify, sqrt_of, as_scalar
from .qseries import QSeries, exp_zero

__all__ = [
    "ProductExpansion",
    "from_exponents",
    "pd_series",
    "to_exponents",
    "weighted_divisor_sum",
]


def _check_disc(D: int) -> None:
    if D < 1 or not is_fundamental(D):
        raise NotFundamental(f"{D} is not a positive fundamental discriminant")


def _sqrt(D: int):
    return simplify(sqrt_of(D))


def _div(x, n: int):
    return simplify(Fraction(x, n)) if isinstance(x, int) else simplify(x / n)


@dataclass(frozen=True)
class ProductExpansion:
    """Leading power ``h``, discriminant ``D`` and exponents c(D, n) for 1 <= n < T."""

    h: int
    D: int
    c: tuple  # c[n - 1] = c(D, n)

    @property
    def T(self) -> int:
        return len(self.c) + 1

    def __getitem__(self, n: int):
        if not 1 <= n < self.T:
            raise IndexError(f"exponent c(D,{n}) outside 1..{self.T - 1}")
        return self.c[n - 1]

    def exponent(self, n: int):
        """c(D, n), or 0 for n that is not a positive integer."""
        if n < 1 or int(n) != n:
            return 0
        return self[int(n)]

    def with_truncation(self, T: int) -> "ProductExpansion":
        if T > self.T:
            raise ValueError("cannot extend a truncated product expansion")
        return ProductExpansion(self.h, self.D, self.c[: T - 1])

    def to_json(self) -> dict:
        return {
            "h": str(self.h),
            "D": str(self.D),
            "c": [scalar_str(x) for x in self.c],
            "T": str(self.T),
        }

    @classmethod
    def from_json(cls, obj) -> "ProductExpansion":
        c = tuple(simplify(as_scalar(x)) for x in obj["c"])
        pe = cls(int(obj["h"]), int(obj["D"]), c)
        if "T" in obj and int(obj["T"]) != pe.T:
            raise ValueError("T does not match the number of exponents")
        return pe


def pd_series(D: int, T: int) -> QSeries:
    """P_D(t) = exp(-sqrt(D) * sum_r (D/r) t^r / r) with T coefficients."""
    _check_disc(D)
    sq = _sqrt(D)
    logs = [0] + [_div(-kronecker(D, r) * sq, r) if kronecker(D, r) else 0 for r in range(1, T)]
    return exp_zero(QSeries(0, logs))


def _leading_check(f: QSeries) -> int:
    if f.offset.denominator != 1:
        raise ValueError(f"product expansions need an integral q-offset, got {f.offset}")
    if f.leading != 1:
        raise LeadingNotOne(f"leading coefficient is {f.leading}, expected 1")
    return int(f.offset)


def to_exponents(f: QSeries, D: int) -> ProductExpansion:
    """Exponents c(D, n), n < T, by the divisor recursion on the coefficients a(n)."""
    _check_disc(D)
    h = _leading_check(f)
    T = f.truncation
    a = f.coeffs  # a[n] = a(n), a[0] = 1
    sq = _sqrt(D)
    inv_sq = simplify(1 / sqrt_of(D)) if D != 1 else 1
    chi = [kronecker(D, k) for k in range(T)]
    c = [0] * T
    wsum = [0] * T  # wsum[u] = sum_{d|u} d sqrt(D) c(D,d) (D/(u/d))
    for n in range(1, T):
        inner = 0
        for d in divisors(n)[:-1]:
            if chi[n // d] and c[d]:
                inner += d * chi[n // d] * c[d]
        inner = inner * sq if inner else 0
        for u in range(1, n):
            if a[n - u] and wsum[u]:
                inner += a[n - u] * wsum[u]
        value = -a[n] * inv_sq if a[n] else 0
        if inner:
            value = value - _div(inner * inv_sq, n)
        c[n] = simplify(value)
        w = 0
        for d in divisors(n):
            if chi[n // d] and c[d]:
                w += d * chi[n // d] * c[d]
        wsum[n] = simplify(w * sq) if w else 0
    return ProductExpansion(h, D, tuple(c[1:]))


def weighted_divisor_sum(pe: ProductExpansion, n: int):
    """sum_{u|n} u sqrt(D) c(D,u) (D/(n/u)); independent of D."""
    if not 1 <= n < pe.T:
        raise IndexError(f"n={n} outside 1..{pe.T - 1}")
    total = 0
    for u in divisors(n):
        k = kronecker(pe.D, n // u)
        if k and pe[u]:
            total += u * k * pe[u]
    return simplify(total * _sqrt(pe.D)) if total else 0


def from_exponents(pe: ProductExpansion) -> QSeries:
    """q^h * prod P_D(q^n)^c(D,n) as a series with T coefficients."""
    _check_disc(pe.D)
    logs = [0] * pe.T
    for m in range(1, pe.T):
        w = weighted_divisor_sum(pe, m)
        logs[m] = _div(-w, m) if w else 0
    body = exp_zero(QSeries(0, logs))
    return QSeries(pe.h, body.coeffs, pe.T)
