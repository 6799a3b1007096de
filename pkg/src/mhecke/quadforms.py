"""Positive definite binary quadratic forms under Gamma0(N).

Forms act on the right: ``(Q o g)(x, y) = Q(p x + q y, r x + s y)`` for
``g = [[p, q], [r, s]]``, so ``Q o (g h) = (Q o g) o h``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import count
from math import gcd, isqrt

from .errors import InconsistentSquareCondition, SearchExhausted
from .field import divisors, factorint, kronecker

__all__ = [
    "BQF",
    "ClassList",
    "UnimodularMatrix",
    "act",
    "all_classes",
    "automorphs",
    "class_representatives",
    "gamma0_equivalent",
    "genus_character",
    "omega",
    "reduce",
    "reduced_forms",
]


@dataclass(frozen=True, order=True)
class BQF:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0 or self.disc >= 0:
            raise ValueError(f"[{self.a},{self.b},{self.c}] is not positive definite")

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def content(self) -> int:
        return gcd(gcd(self.a, self.b), self.c)

    def __str__(self):
        return f"[{self.a},{self.b},{self.c}]"

    def to_json(self):
        return [str(self.a), str(self.b), str(self.c)]

    @classmethod
    def from_json(cls, obj):
        return cls(*(int(x) for x in obj))


@dataclass(frozen=True)
class UnimodularMatrix:
    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        if self.p * self.s - self.q * self.r != 1:
            raise ValueError(f"determinant of {self} is not 1")

    def __matmul__(self, o: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.p * o.p + self.q * o.r, self.p * o.q + self.q * o.s,
            self.r * o.p + self.s * o.r, self.r * o.q + self.s * o.s,
        )

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.s, -self.q, -self.r, self.p)

    def in_gamma0(self, N: int) -> bool:
        return self.r % N == 0

    def __neg__(self):
        return UnimodularMatrix(-self.p, -self.q, -self.r, -self.s)

    def mobius(self, tau):
        """tau -> (p tau + q) / (r tau + s)."""
        return (self.p * tau + self.q) / (self.r * tau + self.s)

    def __str__(self):
        return f"[[{self.p},{self.q}],[{self.r},{self.s}]]"


IDENTITY = UnimodularMatrix(1, 0, 0, 1)
_S = UnimodularMatrix(0, -1, 1, 0)


def _translate(k: int) -> UnimodularMatrix:
    return UnimodularMatrix(1, k, 0, 1)


def act(Q: BQF, g: UnimodularMatrix) -> BQF:
    a, b, c = Q.a, Q.b, Q.c
    p, q, r, s = g.p, g.q, g.r, g.s
    return BQF(
        a * p * p + b * p * r + c * r * r,
        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
        a * q * q + b * q * s + c * s * s,
    )


def _normalize_b(Q: BQF) -> tuple[BQF, UnimodularMatrix]:
    """Translate so that -a < b <= a."""
    k = (Q.a - Q.b) // (2 * Q.a)
    if k == 0:
        return Q, IDENTITY
    g = _translate(k)
    return act(Q, g), g


def reduce(Q: BQF) -> tuple[BQF, UnimodularMatrix]:
    """Gauss reduction; returns (R, g) with Q o g = R reduced."""
    g = IDENTITY
    while True:
        Q, t = _normalize_b(Q)
        g = g @ t
        if Q.a > Q.c:
            Q = act(Q, _S)
            g = g @ _S
            continue
        break
    if Q.a == Q.c and Q.b < 0:
        Q = act(Q, _S)
        g = g @ _S
    return Q, g


def is_reduced(Q: BQF) -> bool:
    if not (abs(Q.b) <= Q.a <= Q.c):
        return False
    if (abs(Q.b) == Q.a or Q.a == Q.c) and Q.b < 0:
        return False
    return True


@lru_cache(maxsize=256)
def reduced_forms(d: int) -> tuple:
    """All reduced forms (primitive or not) of discriminant -d."""
    out = []
    for a in range(1, isqrt(d // 3) + 2):
        for b in range(-a + 1, a + 1):
            if (b * b + d) % (4 * a):
                continue
            c = (b * b + d) // (4 * a)
            if c < a:
                continue
            Q = BQF(a, b, c)
            if is_reduced(Q):
                out.append(Q)
    return tuple(sorted(out))


def automorphs(Q: BQF) -> list[UnimodularMatrix]:
    """All g in SL2(Z) with Q o g = Q, from t^2 + d u^2 = 4 for the primitive part."""
    g = Q.content()
    a, b, c = Q.a // g, Q.b // g, Q.c // g
    d = 4 * a * c - b * b
    out = []
    for u in range(-2, 3):
        t2 = 4 - d * u * u
        if t2 < 0:
            continue
        t = isqrt(t2)
        if t * t != t2:
            continue
        for tt in {t, -t}:
            if (tt - b * u) % 2:
                continue
            out.append(UnimodularMatrix((tt - b * u) // 2, -c * u, a * u, (tt + b * u) // 2))
    return out


def gamma0_equivalent(Q1: BQF, Q2: BQF, N: int) -> UnimodularMatrix | None:
    """A witness gamma in Gamma0(N) with Q1 o gamma = Q2, or None."""
    if Q1.disc != Q2.disc:
        return None
    R1, g1 = reduce(Q1)
    R2, g2 = reduce(Q2)
    if R1 != R2:
        return None
    g2inv = g2.inverse()
    for u in automorphs(R1):
        gamma = g1 @ u @ g2inv
        if gamma.in_gamma0(N):
            return gamma
    return None


def omega(Q: BQF, N: int) -> int:
    """|Gamma0(N)_Q / {+-I}|."""
    return sum(1 for u in automorphs(Q) if u.in_gamma0(N)) // 2


# ---------------------------------------------------------------------------
# enumeration


def _psi(N: int) -> int:
    out = N
    for p, _ in (factorint(N) if N > 1 else ()):
        out = out // p * (p + 1)
    return out


def _complete(x: int, z: int) -> UnimodularMatrix:
    """A matrix [[x, y], [z, w]] of determinant 1 (gcd(x, z) = 1)."""
    # extended Euclid: x*w - z*y = 1
    old_r, r = x, z
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    # old_s*x + old_t*z = old_r = +-1
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return UnimodularMatrix(x, -old_t, z, old_s)


@lru_cache(maxsize=64)
def coset_representatives(N: int) -> tuple:
    """Representatives of SL2(Z)/Gamma0(N), indexed by the first column in P^1(Z/N)."""
    units = [u for u in range(1, N + 1) if gcd(u, N) == 1] if N > 1 else [1]

    def key(x, z):
        return min(((u * x) % N, (u * z) % N) for u in units)

    want = _psi(N)
    found = {}
    for radius in count(1):
        for x in range(-radius, radius + 1):
            for z in range(0, radius + 1):
                if gcd(x, z) != 1:
                    continue
                k = key(x, z)
                if k not in found:
                    found[k] = _complete(x, z)
        if len(found) >= want:
            break
    return tuple(found[k] for k in sorted(found))


def _check_square(d: int, N: int, beta: int) -> None:
    if (beta * beta + d) % (4 * N):
        raise InconsistentSquareCondition(f"-{d} is not congruent to {beta}^2 mod {4 * N}")


def _canonical(Q: BQF, N: int) -> BQF:
    """Translate so that -a < b <= a (N | a, so the translation lies in Gamma0(N))."""
    return _normalize_b(Q)[0]


def _dedupe(candidates, N: int) -> list[BQF]:
    reps: list[BQF] = []
    for Q in candidates:
        if not any(gamma0_equivalent(R, Q, N) for R in reps):
            reps.append(Q)
    return reps


def _classes_by_cosets(d: int, N: int, beta: int) -> list[BQF]:
    cands = []
    for R in reduced_forms(d):
        for g in coset_representatives(N):
            Q = act(R, g)
            if Q.a % N == 0 and (Q.b - beta) % (2 * N) == 0:
                cands.append(_canonical(Q, N))
    cands.sort(key=lambda Q: (Q.a, abs(Q.b), -Q.b, Q.c))
    return _dedupe(cands, N)


def _forms_with_b_bound(d: int, N: int, beta: int, bound: int):
    out = []
    b0 = beta % (2 * N)
    for b in range(b0 - 2 * N * ((bound + b0) // (2 * N) + 1), bound + 1, 2 * N):
        if abs(b) > bound or (b * b + d) % 4:
            continue
        m = (b * b + d) // 4
        for a in divisors(m):
            if a % N == 0:
                out.append(BQF(a, b, m // a))
    return out


def search_floor(d: int, N: int) -> int:
    """A b-bound past which no new class can appear.

    Each class is R o gamma for a reduced R (c <= d/3) and a coset
    representative gamma whose first column has entries at most M, so it
    contains [a, b, c] with -a < b <= a and a <= d M^2.
    """
    M = max(max(abs(g.p), abs(g.r)) for g in coset_representatives(N))
    return d * M * M


def _classes_by_search(d: int, N: int, beta: int, bound: int | None) -> list[BQF]:
    def round_(B):
        # only b-normalized forms: every class has one, which keeps dedupe small
        cands = {Q for Q in _forms_with_b_bound(d, N, beta, B) if -Q.a < Q.b <= Q.a}
        return _dedupe(sorted(cands, key=lambda Q: (Q.a, abs(Q.b), -Q.b, Q.c)), N)

    if bound is not None:
        return round_(bound)
    # bound doubling with a stabilization test, but never stopping below the floor
    floor = search_floor(d, N)
    B, reps, stable = 2 * N, [], 0
    while stable < 2 or B <= 2 * floor:
        new = round_(B)
        stable = stable + 1 if len(new) == len(reps) else 0
        reps = new
        B *= 2
    return reps


@dataclass(frozen=True)
class ClassEntry:
    form: BQF
    chi: int
    omega: int


@dataclass(frozen=True)
class ClassList:
    d: int
    N: int
    beta: int
    reps: tuple  # of ClassEntry
    D: int | None = None

    def forms(self) -> list[BQF]:
        return [e.form for e in self.reps]

    def with_character(self, D: int) -> "ClassList":
        """Attach chi_D; here the forms have discriminant -d = -(d/D) * D."""
        if self.d % D:
            raise ValueError(f"D={D} does not divide d={self.d}")
        reps = tuple(replace(e, chi=genus_character(e.form, D, self.N)) for e in self.reps)
        return replace(self, reps=reps, D=D)

    def __len__(self):
        return len(self.reps)

    def to_json(self) -> dict:
        return {
            "d": str(self.d), "N": str(self.N), "beta": str(self.beta),
            "D": None if self.D is None else str(self.D),
            "reps": [{"form": e.form.to_json(), "chi": str(e.chi), "omega": str(e.omega)}
                     for e in self.reps],
        }

    @classmethod
    def from_json(cls, obj) -> "ClassList":
        reps = tuple(ClassEntry(BQF.from_json(e["form"]), int(e["chi"]), int(e["omega"]))
                     for e in obj["reps"])
        D = obj.get("D")
        return cls(int(obj["d"]), int(obj["N"]), int(obj["beta"]), reps,
                   None if D is None else int(D))


def class_representatives(d: int, N: int, beta: int, method: str = "cosets",
                          bound: int | None = None) -> ClassList:
    """Gamma0(N)-classes of forms [a, b, c] with N | a, b = beta mod 2N, disc -d.

    ``method="cosets"`` translates every SL2(Z)-reduced form by coset
    representatives of Gamma0(N) (complete by construction).  ``"search"``
    scans |b| <= bound, doubling the bound until two rounds add nothing.
    """
    _check_square(d, N, beta)
    beta %= 2 * N
    if method == "cosets" and bound is None:
        forms = _classes_by_cosets(d, N, beta)
    elif method in ("cosets", "search"):
        forms = _classes_by_search(d, N, beta, bound)
    else:
        raise ValueError(f"unknown enumeration method {method!r}")
    forms.sort(key=lambda Q: (Q.a, Q.b, Q.c))
    reps = tuple(ClassEntry(Q, 1, omega(Q, N)) for Q in forms)
    return ClassList(d, N, beta, reps)


def betas(d: int, N: int) -> list[int]:
    """Residues beta mod 2N with beta^2 = -d mod 4N."""
    return [b for b in range(2 * N) if (b * b + d) % (4 * N) == 0]


def all_classes(d: int, N: int, D: int | None = None) -> list[ClassList]:
    """Q_{d,N}/Gamma0(N) split by beta; chi_D attached when D is given."""
    out = []
    for beta in betas(d, N):
        cl = class_representatives(d, N, beta)
        out.append(cl.with_character(D) if D is not None else cl)
    return out


# ---------------------------------------------------------------------------
# genus character


def _splittings(N: int):
    return [(N1, N // N1) for N1 in divisors(N)]


def represented_values(Q: BQF, N: int, D: int, radius: int, all_splittings: bool = False):
    """Integers prime to D represented by Q, by increasing box radius.

    With ``all_splittings`` the forms [N1 a', b, N2 c] for every N1 N2 = N
    are scanned as well (Q itself is N1 = N).  Otherwise only the first
    splitting whose form has content prime to D is used, which is Q itself
    whenever that is possible.
    """
    a1 = Q.a // N
    splits = _splittings(N)[::-1]
    if not all_splittings:
        ok = [(N1, N2) for N1, N2 in splits if gcd(gcd(gcd(N1 * a1, Q.b), N2 * Q.c), D) == 1]
        splits = ok[:1]
    for N1, N2 in splits:
        A, B, C = N1 * a1, Q.b, N2 * Q.c
        for r in range(1, radius + 1):
            for x in range(-r, r + 1):
                for y in (-r, r) if abs(x) != r else range(-r, r + 1):
                    n = A * x * x + B * x * y + C * y * y
                    if n and gcd(n, D) == 1:
                        yield n


def square_condition(Q: BQF, D: int, N: int) -> bool:
    """D and disc(Q)/D are both squares modulo 4N.

    Under this condition every splitting N = N1 N2 gives the same character.
    """
    if Q.disc % D:
        return False
    squares = {(x * x) % (4 * N) for x in range(4 * N)}
    return D % (4 * N) in squares and (Q.disc // D) % (4 * N) in squares


def genus_character(Q: BQF, D: int, N: int, radius: int = 60, strategy: str = "first") -> int:
    """chi_D(Q) = (D/n) for Q = [N a', b, c] of discriminant -dD.

    n is an integer prime to D represented by Q; 0 when D does not divide
    the discriminant or gcd(a', b, c, D) > 1.  ``strategy="first"`` takes the
    first such n found, ``"last"`` the largest one in the search box.
    """
    if Q.a % N:
        raise ValueError(f"{Q} does not have N={N} dividing a")
    if D == 1:
        return 1
    disc = Q.disc
    if disc % D or (disc // D) % 4 not in (0, 1):
        return 0
    if gcd(gcd(gcd(Q.a // N, Q.b), Q.c), D) != 1:
        return 0
    if strategy == "first":
        for n in represented_values(Q, N, D, radius):
            return kronecker(D, n)
    elif strategy == "last":
        values = list(represented_values(Q, N, D, radius))
        if values:
            return kronecker(D, max(values))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    raise SearchExhausted(f"no integer prime to {D} represented by {Q} within radius {radius}")
