"""Standard q-expansions and the FormSpec expression tree.

FormSpec nodes describe a modular object symbolically; :func:`expand`
turns one into a :class:`~mhecke.qseries.QSeries` and the ``traces`` module
evaluates the same tree numerically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .errors import CuspNotOfLevel, UnsupportedLevel
from .field import QuadTowerNumber, as_scalar, divisors, scalar_str, simplify
from .qseries import QSeries, power_unit, substitute_power

__all__ = [
    "Classical",
    "Constant",
    "E2",
    "EtaQuotient",
    "Faber",
    "FormSpec",
    "Hauptmodul",
    "Power",
    "Product",
    "Scale",
    "Sum",
    "cusps",
    "eta_cusp_order",
    "eta_expansion",
    "expand",
    "faber",
    "hauptmodul",
    "level11_form",
    "level9_form",
    "named_form",
    "spec_from_json",
]

SUPPORTED_LEVELS = (1, 7, 9)


# ---------------------------------------------------------------------------
# raw expansions (cached; lru_cache is safe under concurrent readers)


@lru_cache(maxsize=64)
def _euler(T: int) -> tuple:
    """prod_{n>=1} (1 - q^n) to T terms, via pentagonal numbers."""
    out = [0] * T
    k = 0
    while True:
        hit = False
        for e in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2) if k else (0,):
            if e < T:
                out[e] = -1 if k % 2 else 1
                hit = True
        if not hit:
            break
        k += 1
    return tuple(out)


@lru_cache(maxsize=64)
def _divisor_power_sums(k: int, T: int) -> tuple:
    s = [0] * T
    for d in range(1, T):
        dk = d**k
        for m in range(d, T, d):
            s[m] += dk
    return tuple(s)


def eta_expansion(T: int) -> QSeries:
    """eta(tau) = q^(1/24) prod (1 - q^n), T coefficients."""
    if T < 1:
        raise ValueError("T must be positive")
    return QSeries(Fraction(1, 24), _euler(T))


def _eisenstein(k: int, T: int) -> QSeries:
    const = {2: -24, 4: 240, 6: -504}[k]
    s = _divisor_power_sums(k - 1, T)
    return QSeries(0, [1] + [const * s[n] for n in range(1, T)])


def _eta_product(terms, T: int) -> QSeries:
    """prod eta(m tau)^r with the q^(sum r m / 24) prefactor, T coefficients."""
    offset = Fraction(sum(r * m for m, r in terms), 24)
    acc = None
    for m, r in terms:
        base = substitute_power(QSeries(0, _euler(T)), m).with_truncation(T)
        piece = power_unit(base, r)
        acc = piece if acc is None else acc * piece
    if acc is None:
        acc = QSeries(0, [1], T)
    return QSeries(offset, acc.coeffs)


# ---------------------------------------------------------------------------
# FormSpec tree


class FormSpec:
    """Base class of the expression tree."""

    def to_json(self) -> dict:
        raise NotImplementedError

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class EtaQuotient(FormSpec):
    terms: tuple  # ((m, r), ...)
    level: int = 0

    def __post_init__(self):
        terms = tuple(sorted((int(m), int(r)) for m, r in self.terms))
        object.__setattr__(self, "terms", terms)
        if self.level:
            bad = [m for m, _ in terms if self.level % m]
            if bad:
                raise ValueError(f"eta factors {bad} do not divide level {self.level}")

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(r for _, r in self.terms), 2)

    def to_json(self):
        return {"type": "eta_quotient", "level": self.level,
                "terms": [[m, r] for m, r in self.terms]}


@dataclass(frozen=True)
class E2(FormSpec):
    m: int = 1

    def to_json(self):
        return {"type": "e2", "m": self.m}


@dataclass(frozen=True)
class Classical(FormSpec):
    name: str  # E4, E6, Delta, j
    m: int = 1

    def __post_init__(self):
        if self.name not in ("E4", "E6", "Delta", "j"):
            raise ValueError(f"unknown classical form {self.name!r}")

    def to_json(self):
        return {"type": "classical", "name": self.name, "m": self.m}


@dataclass(frozen=True)
class Constant(FormSpec):
    c: object

    def to_json(self):
        return {"type": "constant", "c": scalar_str(self.c)}


@dataclass(frozen=True)
class Sum(FormSpec):
    terms: tuple

    def to_json(self):
        return {"type": "sum", "terms": [t.to_json() for t in self.terms]}


@dataclass(frozen=True)
class Product(FormSpec):
    terms: tuple

    def to_json(self):
        return {"type": "product", "terms": [t.to_json() for t in self.terms]}


@dataclass(frozen=True)
class Scale(FormSpec):
    c: object
    f: FormSpec

    def to_json(self):
        return {"type": "scale", "c": scalar_str(self.c), "f": self.f.to_json()}


@dataclass(frozen=True)
class Power(FormSpec):
    f: FormSpec
    e: int

    def to_json(self):
        return {"type": "power", "e": self.e, "f": self.f.to_json()}


@dataclass(frozen=True)
class Hauptmodul(FormSpec):
    level: int

    def __post_init__(self):
        if self.level not in SUPPORTED_LEVELS:
            raise UnsupportedLevel(f"no Hauptmodul for level {self.level}")

    def to_json(self):
        return {"type": "hauptmodul", "level": self.level}


@dataclass(frozen=True)
class Faber(FormSpec):
    level: int
    n: int

    def __post_init__(self):
        if self.level not in SUPPORTED_LEVELS:
            raise UnsupportedLevel(f"no Hauptmodul for level {self.level}")
        if self.n < 1:
            raise ValueError("Faber index must be positive")

    def to_json(self):
        return {"type": "faber", "level": self.level, "n": self.n}


def spec_from_json(obj) -> FormSpec:
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj["type"]
    if kind == "eta_quotient":
        return EtaQuotient(tuple(tuple(t) for t in obj["terms"]), int(obj.get("level", 0)))
    if kind == "e2":
        return E2(int(obj.get("m", 1)))
    if kind == "classical":
        return Classical(obj["name"], int(obj.get("m", 1)))
    if kind == "constant":
        return Constant(as_scalar(obj["c"]))
    if kind in ("sum", "product"):
        terms = tuple(spec_from_json(t) for t in obj["terms"])
        return Sum(terms) if kind == "sum" else Product(terms)
    if kind == "scale":
        return Scale(as_scalar(obj["c"]), spec_from_json(obj["f"]))
    if kind == "power":
        return Power(spec_from_json(obj["f"]), int(obj["e"]))
    if kind == "hauptmodul":
        return Hauptmodul(int(obj["level"]))
    if kind == "faber":
        return Faber(int(obj["level"]), int(obj["n"]))
    raise ValueError(f"unknown FormSpec type {kind!r}")


# ---------------------------------------------------------------------------
# expansion


def _expand(spec: FormSpec, T: int) -> QSeries:
    if isinstance(spec, EtaQuotient):
        return _eta_product(spec.terms, T)
    if isinstance(spec, E2):
        return substitute_power(_eisenstein(2, T), spec.m).with_truncation(T)
    if isinstance(spec, Classical):
        if spec.name in ("E4", "E6"):
            base = _eisenstein(int(spec.name[1]), T)
        elif spec.name == "Delta":
            base = _eta_product(((1, 24),), T)
        else:
            base = _j_series(T)
        return substitute_power(base, spec.m).with_truncation(T)
    if isinstance(spec, Constant):
        return QSeries(0, [spec.c], T)
    if isinstance(spec, Sum):
        acc = _expand(spec.terms[0], T)
        for t in spec.terms[1:]:
            acc = acc + _expand(t, T)
        return acc
    if isinstance(spec, Product):
        acc = _expand(spec.terms[0], T)
        for t in spec.terms[1:]:
            acc = acc * _expand(t, T)
        return acc
    if isinstance(spec, Scale):
        return _expand(spec.f, T) * spec.c
    if isinstance(spec, Power):
        return _expand(spec.f, T) ** spec.e
    if isinstance(spec, Hauptmodul):
        return hauptmodul(spec.level, T)
    if isinstance(spec, Faber):
        return faber(spec.level, spec.n, T)[1]
    raise TypeError(f"not a FormSpec: {spec!r}")


def expand(spec: FormSpec, T: int, integral: bool = False) -> QSeries:
    """q-expansion of ``spec`` with exactly T known coefficients.

    With ``integral=True`` the total offset must be an integer.
    """
    if T < 1:
        raise ValueError("T must be positive")
    extra = 2
    while True:
        s = _expand(spec, T + extra)
        if s.truncation >= T or s.is_zero() and s.precision >= T:
            break
        extra = 2 * extra + (T - s.truncation)
        if extra > 64 * (T + 8):
            raise ArithmeticError("cancellation too deep to expand")
    s = s.with_truncation(T) if not s.is_zero() else s
    if integral and s.offset.denominator != 1:
        raise ValueError(f"expected integral q-offset, got {s.offset}")
    return s


@lru_cache(maxsize=32)
def _j_cached(T: int) -> QSeries:
    e4 = _eisenstein(4, T + 1)
    delta = _eta_product(((1, 24),), T + 1)
    return (e4 * e4 * e4) / delta


def _j_series(T: int) -> QSeries:
    return _j_cached(T)


def hauptmodul(N: int, T: int) -> QSeries:
    """Normalized Hauptmodul q^-1 + O(1): j, (eta/eta7)^4 + 4, eta^3/eta9^3."""
    if N == 1:
        return _j_cached(T).with_truncation(T)
    if N == 7:
        return _eta_product(((1, 4), (7, -4)), T) + 4
    if N == 9:
        return _eta_product(((1, 3), (9, -3)), T)
    raise UnsupportedLevel(f"no Hauptmodul for level {N}")


def hauptmodul_spec(N: int) -> FormSpec:
    """The Hauptmodul as an explicit eta/classical tree."""
    if N == 1:
        return Classical("j")
    if N == 7:
        return Sum((EtaQuotient(((1, 4), (7, -4)), 7), Constant(4)))
    if N == 9:
        return EtaQuotient(((1, 3), (9, -3)), 9)
    raise UnsupportedLevel(f"no Hauptmodul for level {N}")


@lru_cache(maxsize=128)
def faber_polynomial(N: int, n: int) -> tuple:
    """Coefficients (c_0, ..., c_n) of P with P(hauptmodul) = q^-n + O(q)."""
    H = hauptmodul(N, n + 2)
    powers = [QSeries(0, [1], n + 2)]
    for _ in range(n):
        powers.append(powers[-1] * H)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    acc = powers[n]
    # eliminate q^-(n-1), ..., q^0 in turn
    for k in range(n - 1, -1, -1):
        c = acc[-k]
        if c:
            coeffs[k] -= c
            acc = acc - powers[k].scale(c)
    return tuple(simplify(c) for c in coeffs)


def faber(N: int, n: int, T: int):
    """(polynomial coefficients, expansion of f_{N,n} = q^-n + O(q) with T coefficients)."""
    if n < 1:
        raise ValueError("Faber index must be positive")
    poly = faber_polynomial(N, n)
    H = hauptmodul(N, T + n)
    acc = QSeries(0, [poly[0]], T + n)
    power = QSeries(0, [1], T + n)
    for k in range(1, n + 1):
        power = power * H
        if poly[k]:
            acc = acc + power.scale(poly[k])
    return poly, acc.with_truncation(T)


# ---------------------------------------------------------------------------
# cusps and orders


def cusps(N: int) -> list[Fraction | None]:
    """Representatives a/c of the cusps of Gamma0(N); ``None`` stands for infinity.

    One cusp per divisor c of N and per unit a modulo gcd(c, N/c).
    """
    out = []
    for c in divisors(N):
        if c == N:
            out.append(None)
            continue
        g = gcd(c, N // c)
        for u in range(g):
            if gcd(u, g) != 1:
                continue
            a = u
            while gcd(a, c) != 1:
                a += g
            out.append(Fraction(a, c))
    return out


def cusp_width(cusp, N: int) -> int:
    c = N if cusp is None else Fraction(cusp).denominator
    return N // gcd(c * c, N)


def eta_cusp_order(spec: EtaQuotient, cusp, N: int) -> Fraction:
    """Ligozat: order of an eta quotient at the cusp a/c of Gamma0(N).

    Measured in the local uniformizer at the cusp.  ``cusp`` is a Fraction,
    the string "oo" or None for infinity.
    """
    if cusp is None or cusp == "oo":
        c = N
    else:
        c = Fraction(cusp).denominator
    if N % c:
        raise CuspNotOfLevel(f"cusp with denominator {c} is not a cusp of Gamma0({N})")
    bad = [m for m, _ in spec.terms if N % m]
    if bad:
        raise CuspNotOfLevel(f"eta factors {bad} do not divide {N}")
    total = sum(Fraction(gcd(c, m) ** 2 * r, m) for m, r in spec.terms)
    return Fraction(N, 24) * total / (gcd(c, N // c) * c)


# ---------------------------------------------------------------------------
# named forms used by the command line and the verification harness


def level11_form() -> FormSpec:
    """-(1/10)(E2 - 11 E2(11 tau) + 24 eta^2 eta(11 tau)^2) = 1 + 12q^2 + ..."""
    return Scale(Fraction(-1, 10), Sum((
        E2(1),
        Scale(-11, E2(11)),
        Scale(24, EtaQuotient(((1, 2), (11, 2)), 11)),
    )))


# value of eta^3/eta(9 tau)^3 at the cusps 1/3 and 2/3 (one of each conjugate pair)
LEVEL9_CUSP_VALUE = Fraction(-9, 2) - Fraction(3, 2) * QuadTowerNumber.sqrt(-3)


def level9_form() -> FormSpec:
    """h - alpha for the level-9 Hauptmodul h, alpha its value at a cusp."""
    return Sum((Hauptmodul(9), Constant(-LEVEL9_CUSP_VALUE)))


def named_form(text: str) -> FormSpec:
    """Short names: j, delta, e4, e6, hauptmodul:N, faber:N:n, level11, level9."""
    parts = text.strip().lower().split(":")
    head = parts[0]
    try:
        if head == "j" and len(parts) == 1:
            return Classical("j")
        if head in ("delta", "e4", "e6") and len(parts) == 1:
            return Classical({"delta": "Delta", "e4": "E4", "e6": "E6"}[head])
        if head == "hauptmodul" and len(parts) == 2:
            return Hauptmodul(int(parts[1]))
        if head == "faber" and len(parts) == 3:
            return Faber(int(parts[1]), int(parts[2]))
        if head == "level11" and len(parts) == 1:
            return level11_form()
        if head == "level9" and len(parts) == 1:
            return level9_form()
    except ValueError as exc:
        raise ValueError(f"bad form name {text!r}: {exc}") from None
    raise ValueError(f"unknown form name {text!r}")
