"""Truncated Laurent q-expansions with exact coefficients.

A :class:`QSeries` stores ``offset`` (the exponent of its first stored
coefficient, possibly fractional) and ``coeffs[k]`` = coefficient of
``q**(offset + k)`` for ``k < truncation``.  Everything from
``q**(offset + truncation)`` on is unknown.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .errors import NonzeroConstant, NotAUnit
from .field import QuadTowerNumber, as_scalar, scalar_str, simplify

__all__ = [
    "QSeries",
    "exp_zero",
    "log_unit",
    "series_arith",
    "substitute_power",
    "theta",
]


def _frac(x) -> Fraction:
    x = Fraction(x)
    return x


def _clean(x):
    """Keep coefficients as int where possible (faster arithmetic)."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _divn(s, n: int):
    if isinstance(s, int):
        return _clean(Fraction(s, n))
    return _clean(s / n)


def _inv(x):
    if isinstance(x, QuadTowerNumber):
        return x.inverse()
    return Fraction(1) / x


class QSeries:
    __slots__ = ("offset", "coeffs")

    def __init__(self, offset, coeffs: Iterable, truncation: int | None = None):
        coeffs = [_clean(c) for c in coeffs]
        if truncation is not None:
            if truncation < len(coeffs):
                coeffs = coeffs[:truncation]
            elif truncation > len(coeffs):
                coeffs += [0] * (truncation - len(coeffs))
        offset = _frac(offset)
        k = 0
        while k < len(coeffs) and not coeffs[k]:
            k += 1
        self.offset = offset + k
        self.coeffs = coeffs[k:]

    # -- basic properties --------------------------------------------------

    @property
    def truncation(self) -> int:
        return len(self.coeffs)

    @property
    def precision(self) -> Fraction:
        """Absolute precision: the series is known modulo q**precision."""
        return self.offset + len(self.coeffs)

    @property
    def leading(self):
        return self.coeffs[0] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, n):
        """Coefficient of q**n."""
        n = _frac(n)
        if n >= self.precision:
            raise IndexError(f"q^{n} is beyond the known precision q^{self.precision}")
        k = n - self.offset
        if k < 0 or k.denominator != 1:
            return 0
        return self.coeffs[int(k)]

    def coefficients(self, start, stop) -> list:
        """Coefficients of q**start .. q**(stop-1) (integer steps)."""
        return [self[n] for n in range(int(start), int(stop))]

    @classmethod
    def monomial(cls, n, c=1, truncation: int = 1) -> "QSeries":
        return cls(n, [c], truncation)

    @classmethod
    def constant(cls, c, truncation: int) -> "QSeries":
        return cls(0, [c], truncation)

    def with_truncation(self, T: int) -> "QSeries":
        if T > self.truncation:
            raise ValueError("cannot extend a truncated series")
        return QSeries(self.offset, self.coeffs[:T])

    def with_precision(self, prec) -> "QSeries":
        """Drop terms from q**prec on."""
        T = int(_frac(prec) - self.offset)
        return QSeries(self.offset, self.coeffs[: max(T, 0)])

    # -- arithmetic --------------------------------------------------------

    def _aligned(self, other: "QSeries"):
        shift = other.offset - self.offset
        if shift.denominator != 1:
            raise ValueError("series with incommensurable offsets")
        return int(shift)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = as_scalar(other)
            if other is NotImplemented:
                return NotImplemented
            if self.precision <= 0 or self.precision.denominator != 1:
                raise ValueError("constant term of this series is not known")
            other = QSeries(0, [other], int(self.precision))
        lo = min(self.offset, other.offset)
        prec = min(self.precision, other.precision)
        n = int(prec - lo)
        out = [0] * max(n, 0)
        for s in (self, other):
            base = int(s.offset - lo)
            for k, c in enumerate(s.coeffs):
                i = base + k
                if i >= n:
                    break
                if c:
                    out[i] = out[i] + c
        return QSeries(lo, out)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.offset, [-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, QSeries):
            return self + (-other)
        other = as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        return QSeries(self.offset, [x * c for x in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            other = as_scalar(other)
            if other is NotImplemented:
                return NotImplemented
            return self.scale(other)
        T = min(self.truncation, other.truncation)
        a, b = self.coeffs, other.coeffs
        out = [0] * T
        for i in range(T):
            ai = a[i]
            if not ai:
                continue
            for j in range(T - i):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return QSeries(self.offset + other.offset, out)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        if self.is_zero():
            raise ZeroDivisionError("inverse of a zero series")
        a = self.coeffs
        T = len(a)
        inv0 = _inv(a[0])
        out = [0] * T
        out[0] = _clean(inv0)
        for n in range(1, T):
            s = 0
            for k in range(1, n + 1):
                if a[k]:
                    s += a[k] * out[n - k]
            out[n] = _clean(-s * inv0) if s else 0
        return QSeries(-self.offset, out)

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * other.inverse()
        other = as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        if not other:
            raise ZeroDivisionError("series divided by zero scalar")
        return self.scale(_inv(other))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if self.is_zero():
            if e <= 0:
                raise ZeroDivisionError("non-positive power of zero series")
            return self
        c0 = self.coeffs[0]
        unit = power_unit(self.scale(_inv(c0)) if c0 != 1 else self, e)
        lead = c0**e if isinstance(c0, QuadTowerNumber) else Fraction(c0) ** e
        return QSeries(self.offset * e, unit.coeffs).scale(simplify(lead) if lead != 1 else 1)

    # -- comparison --------------------------------------------------------

    def agrees_with(self, other: "QSeries", precision=None) -> bool:
        prec = min(self.precision, other.precision)
        if precision is not None:
            prec = min(prec, _frac(precision))
        lo = min(self.offset, other.offset)
        if (self.offset - other.offset).denominator != 1 and not (self.is_zero() or other.is_zero()):
            return False
        n = lo
        while n < prec:
            if self[n] != other[n]:
                return False
            n += 1
        return True

    def __eq__(self, other):
        if isinstance(other, QSeries):
            return self.agrees_with(other)
        other = as_scalar(other)
        if other is NotImplemented:
            return NotImplemented
        return self.agrees_with(QSeries(0, [other], max(int(self.precision), 1)))

    __hash__ = None

    def first_difference(self, other: "QSeries"):
        """Smallest exponent at which the two series differ, or None."""
        prec = min(self.precision, other.precision)
        n = min(self.offset, other.offset)
        while n < prec:
            if self[n] != other[n]:
                return n
            n += 1
        return None

    # -- rendering ---------------------------------------------------------

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs[:8]):
            if c:
                terms.append(f"({scalar_str(c)})*q^{scalar_str(self.offset + k)}")
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{scalar_str(self.precision)}))"

    def to_json(self) -> dict:
        return {
            "offset": scalar_str(self.offset),
            "coeffs": [scalar_str(c) for c in self.coeffs],
            "truncation": self.truncation,
        }

    @classmethod
    def from_json(cls, obj) -> "QSeries":
        coeffs = [as_scalar(c) for c in obj["coeffs"]]
        return cls(Fraction(obj["offset"]), coeffs, int(obj["truncation"]))


def power_unit(f: QSeries, e) -> QSeries:
    """f**e for a series with leading coefficient 1 and any rational/exact e.

    Uses the recurrence n*g[n] = sum_k ((e+1)*k - n) * f[k] * g[n-k].
    """
    if f.coeffs[0] != 1:
        raise NotAUnit("power_unit needs leading coefficient 1")
    a = f.coeffs
    T = len(a)
    g = [0] * T
    g[0] = 1
    e1 = e + 1
    for n in range(1, T):
        s = 0
        for k in range(1, n + 1):
            if a[k]:
                s += (e1 * k - n) * a[k] * g[n - k]
        g[n] = _divn(s, n) if s else 0
    return QSeries(f.offset * e if isinstance(e, (int, Fraction)) else 0, g)


def series_arith(a: QSeries, b: QSeries, op: str) -> QSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def log_unit(f: QSeries) -> QSeries:
    """Formal logarithm of f = 1 + O(q); the result has zero constant term."""
    if f.offset != 0 or f.leading != 1:
        raise NotAUnit("log_unit needs offset 0 and leading coefficient 1")
    a = f.coeffs
    T = len(a)
    # n*L[n] = n*a[n] - sum_{k=1}^{n-1} k*L[k]*a[n-k]
    L = [0] * T
    for n in range(1, T):
        s = n * a[n] if a[n] else 0
        for k in range(1, n):
            if L[k] and a[n - k]:
                s -= k * L[k] * a[n - k]
        L[n] = _divn(s, n) if s else 0
    return QSeries(0, L)


def exp_zero(g: QSeries) -> QSeries:
    """Formal exponential of a series with zero constant term."""
    if g.offset < 0 or (g.offset == 0 and g.leading):
        raise NonzeroConstant("exp_zero needs a series with zero constant term")
    if g.offset.denominator != 1:
        raise ValueError("exp_zero needs integral exponents")
    T = int(g.precision)
    L = [0] * T
    for k in range(int(g.offset), T):
        L[k] = g[k]
    # n*E[n] = sum_{k=1}^n k*L[k]*E[n-k]
    E = [0] * T
    if T:
        E[0] = 1
    for n in range(1, T):
        s = 0
        for k in range(1, n + 1):
            if L[k] and E[n - k]:
                s += k * L[k] * E[n - k]
        E[n] = _divn(s, n) if s else 0
    return QSeries(0, E)


def theta(f: QSeries) -> QSeries:
    """q d/dq: multiplies the coefficient of q**n by n."""
    return QSeries(f.offset, [c * (f.offset + k) for k, c in enumerate(f.coeffs)])


def substitute_power(f: QSeries, m: int) -> QSeries:
    """q -> q**m."""
    if m < 1:
        raise ValueError("substitute_power needs m >= 1")
    if f.is_zero():
        return QSeries(f.precision * m, [])
    T = (f.truncation - 1) * m + 1
    out = [0] * T
    for k, c in enumerate(f.coeffs):
        out[k * m] = c
    return QSeries(f.offset * m, out)
