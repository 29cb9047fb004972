"""Exact charge arithmetic: Gaussian rationals, charge polynomials, slopes.

Everything here is pure and exact.  Rationals are ``fractions.Fraction``
(always in lowest terms, positive denominator); no floating point appears
anywhere in the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

#: Degree marker for the zero polynomial.  Kept distinct from -1 so that
#: "degree <= j" is true for the zero polynomial at every j.
ZERO_MARKER = None


class ChargeError(Exception):
    """Base class for charge-arithmetic errors."""


class NegativeImaginaryError(ChargeError):
    """Im(Z) < 0: a weak-stability axiom was violated upstream."""


class DegreeExceededError(ChargeError):
    """Polynomial degree exceeds the level of a nested-charge spec."""


class LengthMismatchError(ChargeError):
    """Phase vectors of different lengths are not comparable."""


def parse_rational(text: str) -> Fraction:
    return Fraction(text)


def format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class GaussianRational:
    """Element of Q + Qi, componentwise exact."""

    re: Fraction
    im: Fraction

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def scale(self, c: Fraction) -> "GaussianRational":
        return GaussianRational(self.re * c, self.im * c)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __str__(self) -> str:
        return f"{format_rational(self.re)}+{format_rational(self.im)}i"


GAUSSIAN_ZERO = GaussianRational(ZERO, ZERO)


@dataclass(frozen=True)
class ChargePolynomial:
    """Sum_k (a_k + i b_k) n^k, coefficients indexed 0..r.

    Reads of b at index -1 return 0; coefficients above r read as 0 so
    polynomials with a smaller degree bound embed into a larger one.
    """

    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.a) != len(self.b) or not self.a:
            raise ValueError("coefficient arrays a and b must have equal positive length")

    @property
    def r(self) -> int:
        return len(self.a) - 1

    def a_at(self, k: int) -> Fraction:
        if 0 <= k <= self.r:
            return self.a[k]
        if k > self.r:
            return ZERO
        raise IndexError(f"a_{k} is not defined")

    def b_at(self, k: int) -> Fraction:
        if 0 <= k <= self.r:
            return self.b[k]
        if k == -1 or k > self.r:
            return ZERO
        raise IndexError(f"b_{k} is not defined")

    def __add__(self, other: "ChargePolynomial") -> "ChargePolynomial":
        r = max(self.r, other.r)
        return ChargePolynomial(
            tuple(self.a_at(k) + other.a_at(k) for k in range(r + 1)),
            tuple(self.b_at(k) + other.b_at(k) for k in range(r + 1)),
        )

    def __sub__(self, other: "ChargePolynomial") -> "ChargePolynomial":
        r = max(self.r, other.r)
        return ChargePolynomial(
            tuple(self.a_at(k) - other.a_at(k) for k in range(r + 1)),
            tuple(self.b_at(k) - other.b_at(k) for k in range(r + 1)),
        )

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.a) and all(x == 0 for x in self.b)

    @staticmethod
    def zero(r: int) -> "ChargePolynomial":
        return ChargePolynomial((ZERO,) * (r + 1), (ZERO,) * (r + 1))

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "a": [format_rational(x) for x in self.a],
            "b": [format_rational(x) for x in self.b],
        }

    @staticmethod
    def from_json(data: dict) -> "ChargePolynomial":
        a = tuple(parse_rational(x) for x in data["a"])
        b = tuple(parse_rational(x) for x in data["b"])
        if len(a) != data["r"] + 1 or len(b) != data["r"] + 1:
            raise ValueError("coefficient arrays do not match the declared degree bound")
        return ChargePolynomial(a, b)


def poly_degree(p: ChargePolynomial) -> Optional[int]:
    """Largest k with (a_k, b_k) != (0, 0), or ZERO_MARKER for the zero polynomial."""
    for k in range(p.r, -1, -1):
        if p.a[k] != 0 or p.b[k] != 0:
            return k
    return ZERO_MARKER


def degree_at_most(p: ChargePolynomial, j: int) -> bool:
    d = poly_degree(p)
    return d is ZERO_MARKER or d <= j


@dataclass(frozen=True)
class Slope:
    """A rational slope or +infinity (value None), totally ordered.

    Encodes the phase phi in (0,1] monotonically: mu = -Re/Im for Im > 0,
    +infinity for phase-1 objects (Im = 0, including Z = 0).
    """

    value: Optional[Fraction]

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def _key(self):
        return (1, ZERO) if self.value is None else (0, self.value)

    def __lt__(self, other: "Slope") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "Slope") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "Slope") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "Slope") -> bool:
        return self._key() >= other._key()

    def __str__(self) -> str:
        return "inf" if self.value is None else format_rational(self.value)


INFINITY = Slope(None)


def finite_slope(x) -> Slope:
    return Slope(Fraction(x))


def slope_of(re: Fraction, im: Fraction) -> Slope:
    """Slope -re/im for im > 0, +infinity for im = 0 (weak case includes Z=0)."""
    if im < 0:
        raise NegativeImaginaryError(f"Im(Z) = {im} < 0")
    if im == 0:
        return INFINITY
    return Slope(-re / im)


def slope_of_charge(z: GaussianRational) -> Slope:
    return slope_of(z.re, z.im)


PhaseVector = tuple  # tuple[Slope, ...], compared lexicographically

LESS, EQUAL, GREATER = -1, 0, 1


def lex_compare(u: Sequence[Slope], v: Sequence[Slope]) -> int:
    """Lexicographic comparison; vectors are comparable only at equal length."""
    if len(u) != len(v):
        raise LengthMismatchError(f"vector lengths {len(u)} and {len(v)} differ")
    for x, y in zip(u, v):
        if x < y:
            return LESS
        if x > y:
            return GREATER
    return EQUAL


def format_vector(vec: Sequence[Slope]) -> list[str]:
    return [str(s) for s in vec]


@dataclass(frozen=True)
class NestedChargeSpec:
    """Parameters of the level-(k+1) charge on a degree-<=j tower slice.

    t holds t_1..t_{k+1}; ones is the set M of levels m <= k at which the
    recorded phase equals 1 (slope infinity).  Only contiguous prefixes
    {1..n} can occur for genuine phase chains; callers assert that.
    """

    j: int
    k: int
    t: tuple[Fraction, ...]
    ones: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.k < 0 or self.k > self.j:
            raise ValueError(f"nesting depth k={self.k} out of range for j={self.j}")
        if len(self.t) != self.k + 1:
            raise ValueError(f"expected {self.k + 1} t-parameters, got {len(self.t)}")
        if any(ti <= 0 for ti in self.t):
            raise ValueError("all t-parameters must be positive")
        if any(m < 1 or m > self.k for m in self.ones):
            raise ValueError("ones-pattern indices must lie in 1..k")


def nested_charge(p: ChargePolynomial, spec: NestedChargeSpec) -> GaussianRational:
    """Charge of p under the nested weak stability function of the given spec.

    k=0:                a_j t_1 - b_{j-1} + i b_j
    k>=1, M empty:      a_{j-k} t_{k+1} - b_{j-k-1} + i b_j
    k>=1, M nonempty:   a_{j-k} t_{k+1} - b_{j-k-1} - i (a_{j-n+1} t_n - b_{j-n})
    with n = max M and the convention b_{-1} = 0.
    """
    d = poly_degree(p)
    if d is not ZERO_MARKER and d > spec.j:
        raise DegreeExceededError(f"poly_degree {d} exceeds level j={spec.j}")
    j, k = spec.j, spec.k
    re = p.a_at(j - k) * spec.t[k] - p.b_at(j - k - 1)
    if spec.ones:
        n = max(spec.ones)
        im = -(p.a_at(j - n + 1) * spec.t[n - 1] - p.b_at(j - n))
    else:
        im = p.b_at(j)
    return GaussianRational(re, im)


@dataclass(frozen=True)
class PositivityVerdict:
    ok: bool
    clause: Optional[str] = None
    index: Optional[int] = None

    def to_json(self) -> dict:
        return {"ok": self.ok, "clause": self.clause, "index": self.index}


POSITIVITY_PASS = PositivityVerdict(True)


def positivity_audit(p: ChargePolynomial, nonzero: bool) -> PositivityVerdict:
    """Coefficient cascade: b_r >= 0; on a vanishing prefix a_i <= 0 and
    b_{i-1} >= 0 down the ladder; for a nonzero object with everything else
    zero, a_0 < 0.  Returns PASS or the first violated clause."""
    r = p.r
    if p.b[r] < 0:
        return PositivityVerdict(False, f"b_{r} >= 0", r)
    if p.b[r] > 0:
        return POSITIVITY_PASS
    for i in range(r, 0, -1):
        # here b_r = a_r = ... = b_i = 0 (interleaved prefix through b_{i})
        if p.a[i] > 0:
            return PositivityVerdict(False, f"a_{i} <= 0", i)
        if p.a[i] < 0:
            return POSITIVITY_PASS
        if p.b[i - 1] < 0:
            return PositivityVerdict(False, f"b_{i - 1} >= 0", i - 1)
        if p.b[i - 1] > 0:
            return POSITIVITY_PASS
    if nonzero and p.a[0] >= 0:
        return PositivityVerdict(False, "a_0 < 0", 0)
    return POSITIVITY_PASS
