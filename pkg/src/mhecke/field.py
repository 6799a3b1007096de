"""Exact scalars: rationals, biquadratic fields Q(sqrt(s1), sqrt(s2)), and
elementary number theory (Kronecker symbol, divisors, discriminants).

Rationals are plain ``int``/``fractions.Fraction``.  Irrational scalars are
:class:`QuadTowerNumber`; they interoperate with ``int`` and ``Fraction`` on
both sides of every operator, so series code can stay generic.

For a negative radicand ``s`` the symbol ``sqrt(s)`` means ``i*sqrt(|s|)``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from itertools import product
from .errors import IncompatibleTower, NotFundamental

__all__ = [
    "QuadTowerNumber",
    "as_scalar",
    "divisors",
    "factorint",
    "is_fundamental",
    "is_prime",
    "is_squarefree",
    "kronecker",
    "mobius",
    "sigma",
    "sqrt_of",
    "squarefree_decomposition",
]


# ---------------------------------------------------------------------------
# elementary number theory


@lru_cache(maxsize=4096)
def factorint(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of ``|n|`` by trial division, as ((p, e), ...)."""
    n = abs(n)
    if n == 0:
        raise ValueError("factorint(0)")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def is_prime(n: int) -> bool:
    return n >= 2 and factorint(n) == ((n, 1),)


def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError("divisors needs n >= 1")
    divs = [1]
    for p, e in factorint(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def sigma(n: int) -> int:
    return sum(divisors(n))


def mobius(n: int) -> int:
    if n == 1:
        return 1
    fac = factorint(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


@lru_cache(maxsize=4096)
def squarefree_decomposition(n: int) -> tuple[int, int]:
    """Return ``(g, s)`` with ``n = g**2 * s`` and ``s`` squarefree (sign kept in s)."""
    if n == 0:
        raise ValueError("squarefree part of 0")
    g, s = 1, (1 if n > 0 else -1)
    for p, e in factorint(n):
        g *= p ** (e // 2)
        if e % 2:
            s *= p
    return g, s


def is_squarefree(n: int) -> bool:
    return n != 0 and squarefree_decomposition(n)[0] == 1


def is_fundamental(D: int) -> bool:
    """True for D = 1 and for fundamental discriminants (either sign)."""
    if D == 1:
        return True
    if D == 0:
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def kronecker(a: int, n: int) -> int:
    """The Kronecker symbol (a/n), defined for all integers."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v % 2 and a % 8 in (3, 5):
        result = -result
    # n is now odd and positive; Jacobi symbol (a/n)
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# ---------------------------------------------------------------------------
# biquadratic towers


@lru_cache(maxsize=4096)
def _radmul(r1: int, r2: int) -> tuple[int, int]:
    """sqrt(r1)*sqrt(r2) == k*sqrt(r) for squarefree r1, r2; returns (r, k)."""
    if r1 == 1:
        return r2, 1
    if r2 == 1:
        return r1, 1
    g, s = squarefree_decomposition(r1 * r2)
    if r1 < 0 and r2 < 0:
        g = -g
    return s, g


@lru_cache(maxsize=1024)
def _generators(rads: frozenset) -> tuple[int, ...]:
    """At most two radicands generating every element of ``rads`` (which excludes 1)."""
    ordered = sorted(rads, key=lambda r: (abs(r), r))
    if not ordered:
        return ()
    g1 = ordered[0]
    if len(ordered) == 1:
        return (g1,)
    g2 = ordered[1]
    g3 = _radmul(g1, g2)[0]
    extra = [r for r in ordered if r not in (g1, g2, g3)]
    if extra:
        raise IncompatibleTower(
            f"radicands {sorted(rads)} need more than two independent square roots"
        )
    # canonical choice: the two smallest of the full triple
    return tuple(sorted((g1, g2, g3), key=lambda r: (abs(r), r))[:2])


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class QuadTowerNumber:
    """Element of Q(sqrt(s1), sqrt(s2)) stored as ``{radicand: coefficient}``.

    Radicands are squarefree integers; the key 1 holds the rational part.
    Immutable and hashable.
    """

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for r, x in coeffs.items():
                if x:
                    c[r] = Fraction(x)
        if len(c) > 2:
            _generators(frozenset(r for r in c if r != 1))
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c):
        obj = cls.__new__(cls)
        obj._c = c
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def sqrt(cls, n) -> "QuadTowerNumber":
        """Principal square root of a rational ``n`` (i*sqrt(|n|) for n < 0)."""
        n = Fraction(n)
        if n == 0:
            return cls()
        # sqrt(p/q) = sqrt(p*q)/q
        g, s = squarefree_decomposition(n.numerator * n.denominator)
        return cls._raw({s: Fraction(g, n.denominator)})

    @classmethod
    def from_parts(cls, s1: int, s2: int, x0, x1=0, x2=0, x3=0) -> "QuadTowerNumber":
        s3 = squarefree_decomposition(s1 * s2)[1]
        out = cls({1: x0}) + Fraction(x1) * cls.sqrt(s1) + Fraction(x2) * cls.sqrt(s2)
        return out + Fraction(x3) * cls.sqrt(s3)

    # -- structure --------------------------------------------------------

    @property
    def radicands(self) -> frozenset:
        return frozenset(r for r in self._c if r != 1)

    def coefficient(self, radicand: int) -> Fraction:
        return self._c.get(radicand, Fraction(0))

    def tower(self) -> tuple[int, int]:
        gens = _generators(self.radicands)
        return (tuple(gens) + (1, 1))[:2]

    @property
    def s1(self) -> int:
        return self.tower()[0]

    @property
    def s2(self) -> int:
        return self.tower()[1]

    def parts(self) -> tuple[int, int, int, Fraction, Fraction, Fraction, Fraction]:
        """(s1, s2, s3, x0, x1, x2, x3) with value x0 + x1√s1 + x2√s2 + x3√s3."""
        s1, s2 = self.tower()
        s3 = _radmul(s1, s2)[0] if s1 != 1 and s2 != 1 else 1
        get = self.coefficient
        return (
            s1, s2, s3,
            get(1),
            get(s1) if s1 != 1 else Fraction(0),
            get(s2) if s2 != 1 else Fraction(0),
            get(s3) if s3 != 1 else Fraction(0),
        )

    def is_rational(self) -> bool:
        return all(r == 1 for r in self._c)

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._c.get(1, Fraction(0))

    # -- arithmetic -------------------------------------------------------

    def __bool__(self):
        return bool(self._c)

    def __neg__(self):
        return QuadTowerNumber._raw({r: -x for r, x in self._c.items()})

    def __pos__(self):
        return self

    def __add__(self, other):
        other = as_scalar(other, promote=True)
        if other is NotImplemented:
            return NotImplemented
        c = dict(self._c)
        for r, x in other._c.items():
            y = c.get(r, 0) + x
            if y:
                c[r] = y
            else:
                c.pop(r, None)
        if len(c) > 3 or (len(c) == 3 and 1 not in c):
            _generators(frozenset(r for r in c if r != 1))
        return QuadTowerNumber._raw(c)

    __radd__ = __add__

    def __sub__(self, other):
        other = as_scalar(other, promote=True)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return QuadTowerNumber._raw({})
            return QuadTowerNumber._raw({r: x * other for r, x in self._c.items()})
        if not isinstance(other, QuadTowerNumber):
            return NotImplemented
        c: dict = {}
        for r1, x1 in self._c.items():
            for r2, x2 in other._c.items():
                r, k = _radmul(r1, r2)
                c[r] = c.get(r, 0) + k * x1 * x2
        c = {r: x for r, x in c.items() if x}
        if len(c) > 2:
            _generators(frozenset(r for r in c if r != 1))
        return QuadTowerNumber._raw(c)

    __rmul__ = __mul__

    def conjugates(self):
        """Images under the Galois group of the tower, identity first."""
        gens = _generators(self.radicands)
        if not gens:
            return [self]
        out = []
        for signs in product((1, -1), repeat=len(gens)):
            if len(gens) == 1:
                flip = {gens[0]: signs[0]}
            else:
                g3 = _radmul(gens[0], gens[1])[0]
                flip = {gens[0]: signs[0], gens[1]: signs[1], g3: signs[0] * signs[1]}
            out.append(QuadTowerNumber._raw({r: x * flip.get(r, 1) for r, x in self._c.items()}))
        return out

    def norm(self) -> Fraction:
        """Product of all Galois conjugates (a rational number)."""
        total = QuadTowerNumber({1: 1})
        for conj in self.conjugates():
            total = total * conj
        return total.rational()

    def inverse(self) -> "QuadTowerNumber":
        if not self._c:
            raise ZeroDivisionError("inverse of zero in QuadTowerNumber")
        if self.is_rational():
            return QuadTowerNumber._raw({1: 1 / self._c[1]})
        if len(self._c) == 1:
            (r, x), = self._c.items()
            # 1/(x sqrt r) = sqrt r / (x r)
            return QuadTowerNumber._raw({r: 1 / (x * r)})
        others = QuadTowerNumber({1: 1})
        for conj in self.conjugates()[1:]:
            others = others * conj
        n = (self * others).rational()
        return others * (1 / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return QuadTowerNumber._raw({r: x / other for r, x in self._c.items()})
        if not isinstance(other, QuadTowerNumber):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = as_scalar(other, promote=True)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        out = QuadTowerNumber({1: 1})
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def conjugate(self) -> "QuadTowerNumber":
        """Complex conjugate under the fixed embedding sqrt(s) = i*sqrt(|s|) for s < 0."""
        return QuadTowerNumber._raw({r: (-x if r < 0 else x) for r, x in self._c.items()})

    # -- comparison / hashing --------------------------------------------

    def __eq__(self, other):
        if isinstance(other, QuadTowerNumber):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self._c
            return len(self._c) == 1 and self._c.get(1) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self._c.get(1, 0))
            else:
                self._hash = hash(frozenset(self._c.items()))
        return self._hash

    # -- rendering --------------------------------------------------------

    def to_complex(self, prec: int = 53):
        """Numeric value as an mpmath number at ``prec`` bits."""
        import mpmath

        with mpmath.workprec(prec + 16):
            total = mpmath.mpf(0)
            for r, x in self._c.items():
                term = mpmath.mpf(x.numerator) / x.denominator
                if r != 1:
                    term *= mpmath.sqrt(r)
                total += term
        return total

    def __complex__(self):
        return complex(self.to_complex())

    def __str__(self):
        if not self._c:
            return "0"
        terms = []
        for r in sorted(self._c, key=lambda r: (r != 1, abs(r), r)):
            x = self._c[r]
            if r == 1:
                terms.append(_frac_str(x))
            elif x == 1:
                terms.append(f"sqrt({r})")
            elif x == -1:
                terms.append(f"-sqrt({r})")
            else:
                terms.append(f"{_frac_str(x)}*sqrt({r})")
        text = " + ".join(terms)
        return text.replace("+ -", "- ")

    def __repr__(self):
        return f"QuadTowerNumber({self})"

    def to_json(self) -> dict:
        s1, s2, _, x0, x1, x2, x3 = self.parts()
        return {
            "s1": str(s1), "s2": str(s2),
            "x0": _frac_str(x0), "x1": _frac_str(x1),
            "x2": _frac_str(x2), "x3": _frac_str(x3),
        }

    @classmethod
    def from_json(cls, obj) -> "QuadTowerNumber":
        if isinstance(obj, str):
            return cls.parse(obj)
        return cls.from_parts(
            int(obj["s1"]), int(obj["s2"]),
            *(Fraction(obj[k]) for k in ("x0", "x1", "x2", "x3")),
        )

    _TERM = re.compile(r"\s*([+-]?)\s*([0-9/]*)\s*\*?\s*(sqrt\((-?\d+)\))?\s*")

    @classmethod
    def parse(cls, text: str) -> "QuadTowerNumber":
        """Inverse of ``str``: accepts e.g. ``"-3/2 - 3/2*sqrt(-3)"``."""
        text = text.strip()
        if not text:
            raise ValueError("empty scalar")
        total = cls()
        pos = 0
        while pos < len(text):
            m = cls._TERM.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse scalar {text!r}")
            sign, num, rad, radicand = m.groups()
            if not num and not rad:
                raise ValueError(f"cannot parse scalar {text!r}")
            coef = Fraction(num) if num else Fraction(1)
            if sign == "-":
                coef = -coef
            term = coef * cls.sqrt(int(radicand)) if rad else cls({1: coef})
            total = total + term
            pos = m.end()
        return total


def as_scalar(x, promote: bool = False):
    """Normalize ``x`` to int/Fraction, or to QuadTowerNumber when ``promote``."""
    if isinstance(x, QuadTowerNumber):
        return x
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, (int, Fraction)):
        return QuadTowerNumber({1: x}) if promote else x
    if isinstance(x, str):
        v = QuadTowerNumber.parse(x)
        return v if promote or not v.is_rational() else v.rational()
    return NotImplemented


def simplify(x):
    """Demote a rational QuadTowerNumber to Fraction/int."""
    if isinstance(x, QuadTowerNumber) and x.is_rational():
        x = x.rational()
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def sqrt_of(D: int) -> QuadTowerNumber:
    """Positive square root of a fundamental discriminant as g*sqrt(s)."""
    if not is_fundamental(D) or D <= 0:
        raise NotFundamental(f"{D} is not a positive fundamental discriminant")
    return QuadTowerNumber.sqrt(D)


def scalar_str(x) -> str:
    if isinstance(x, QuadTowerNumber):
        return str(x)
    return _frac_str(Fraction(x))
