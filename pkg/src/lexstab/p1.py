"""Split coherent sheaves on the projective line: the closed-form oracle backend.

Objects are direct sums of line bundles O(a) and torsion skyscrapers given by
point labels and lengths.  Charges are z times the Hilbert polynomial; the
filtration of a split sheaf is determined combinatorially, so this backend
serves as an independent oracle and never feeds the generic engines (its
subobject lattices are infinite).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .category import (
    AbelianBackend,
    BackendCapabilities,
    LexFiltration,
    Morphism,
    ObjectHandle,
    PreconditionViolatedError,
    ShortExactSequence,
    Subobject,
)
from .charge import (
    ChargePolynomial,
    GaussianRational,
    INFINITY,
    Slope,
    format_rational,
    parse_rational,
)


@dataclass(frozen=True)
class SplitSheaf:
    """Multiset of line-bundle degrees plus torsion (point label, length) parts."""

    line_degrees: tuple[int, ...] = ()
    torsion: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        if any(length < 1 for _, length in self.torsion):
            raise ValueError("torsion lengths must be >= 1")
        object.__setattr__(self, "line_degrees", tuple(sorted(self.line_degrees, reverse=True)))
        object.__setattr__(self, "torsion", tuple(sorted(self.torsion)))

    @property
    def rank(self) -> int:
        return len(self.line_degrees)

    @property
    def degree(self) -> int:
        return sum(self.line_degrees)

    @property
    def torsion_length(self) -> int:
        return sum(length for _, length in self.torsion)

    @property
    def is_zero(self) -> bool:
        return not self.line_degrees and not self.torsion

    def direct_sum(self, other: "SplitSheaf") -> "SplitSheaf":
        return SplitSheaf(self.line_degrees + other.line_degrees, self.torsion + other.torsion)


def sheaf_to_json(sheaf: SplitSheaf, z: GaussianRational) -> dict:
    return {
        "line_degrees": list(sheaf.line_degrees),
        "torsion": [{"pt": pt, "len": length} for pt, length in sheaf.torsion],
        "z": {"re": format_rational(z.re), "im": format_rational(z.im)},
    }


def sheaf_from_json(data: dict) -> tuple[SplitSheaf, GaussianRational]:
    sheaf = SplitSheaf(
        tuple(data["line_degrees"]),
        tuple((t["pt"], t["len"]) for t in data.get("torsion", [])),
    )
    zdata = data.get("z", {"re": "-1", "im": "1"})
    z = GaussianRational(parse_rational(zdata["re"]), parse_rational(zdata["im"]))
    return sheaf, z


DEFAULT_Z = GaussianRational(Fraction(-1), Fraction(1))


class P1Backend(AbelianBackend):
    name = "p1"
    capabilities = BackendCapabilities(supports_closed_form_hn=True)

    def __init__(self, z: GaussianRational = DEFAULT_Z):
        if z.im < 0 or (z.im == 0 and z.re >= 0):
            raise ValueError("z must lie in the upper half plane or the negative real axis")
        self.z = z

    def handle(self, sheaf: SplitSheaf) -> ObjectHandle:
        return ObjectHandle(
            backend=self.name,
            key=sheaf,
            charge=self.charge_poly(sheaf),
            size=sheaf.rank + sheaf.torsion_length,
        )

    def charge_poly(self, sheaf: SplitSheaf) -> ChargePolynomial:
        """z times the Hilbert polynomial rank*n + (rank + degree + torsion length)."""
        rk = Fraction(sheaf.rank)
        const = Fraction(sheaf.rank + sheaf.degree + sheaf.torsion_length)
        return ChargePolynomial(
            (self.z.re * const, self.z.re * rk),
            (self.z.im * const, self.z.im * rk),
        )

    def _summand_subobject(self, parent: ObjectHandle, part: SplitSheaf) -> Subobject:
        return Subobject(parent=parent, child=self.handle(part), witness=("summand", part))

    def zero_subobject(self, handle: ObjectHandle) -> Subobject:
        return self._summand_subobject(handle, SplitSheaf())

    def full_subobject(self, handle: ObjectHandle) -> Subobject:
        return self._summand_subobject(handle, handle.key)

    @staticmethod
    def _complement(parent: SplitSheaf, part: SplitSheaf) -> SplitSheaf:
        degrees = list(parent.line_degrees)
        torsion = list(parent.torsion)
        try:
            for a in part.line_degrees:
                degrees.remove(a)
            for piece in part.torsion:
                torsion.remove(piece)
        except ValueError:
            raise PreconditionViolatedError("subobject is not a summand of the parent")
        return SplitSheaf(tuple(degrees), tuple(torsion))

    def quotient(self, sub: Subobject) -> tuple[ObjectHandle, Morphism]:
        part: SplitSheaf = sub.child.key
        qh = self.handle(self._complement(sub.parent.key, part))
        return qh, Morphism(src=sub.parent, dst=qh, mats=("proj", part))

    def ses_of(self, sub: Subobject) -> ShortExactSequence:
        qh, proj = self.quotient(sub)
        incl = Morphism(src=sub.child, dst=sub.parent, mats=("incl", sub.child.key))
        return ShortExactSequence(
            sub=sub.child, total=sub.parent, quotient=qh,
            inclusion=incl, projection=proj,
        )

    def closed_form_degree_filtration(self, sheaf: SplitSheaf):
        """Degree-0 step is the torsion part; degree-1 step is everything."""
        parent = self.handle(sheaf)
        torsion_part = SplitSheaf((), sheaf.torsion)
        return (
            self._summand_subobject(parent, torsion_part),
            self.full_subobject(parent),
        )

    def closed_form_lex_filtration(self, sheaf: SplitSheaf, t) -> LexFiltration:
        """Torsion first, then line-bundle degree classes in decreasing degree.

        The degree-a class has level-1 slope t1 + a + 1 and level-2 slope
        (a+1) t2; the torsion head carries the all-infinity vector.
        """
        t = tuple(Fraction(x) for x in t)
        levels = len(t)
        if levels not in (1, 2):
            raise ValueError("the closed form supports levels 1 and 2")
        if any(x <= 0 for x in t):
            raise ValueError("t-parameters must be positive")
        parent = self.handle(sheaf)
        pieces: list[tuple[SplitSheaf, tuple[Slope, ...]]] = []
        if sheaf.torsion:
            pieces.append((SplitSheaf((), sheaf.torsion), (INFINITY,) * levels))
        for a in sorted(set(sheaf.line_degrees), reverse=True):
            part = SplitSheaf(tuple(d for d in sheaf.line_degrees if d == a), ())
            vec = [Slope(t[0] + a + 1)]
            if levels == 2:
                vec.append(Slope((a + 1) * t[1]))
            pieces.append((part, tuple(vec)))
        chain = []
        factors = []
        vectors = []
        acc = SplitSheaf()
        for part, vec in pieces:
            acc = acc.direct_sum(part)
            chain.append(self._summand_subobject(parent, acc))
            factors.append(self.handle(part))
            vectors.append(vec)
        return LexFiltration(tuple(chain), tuple(factors), tuple(vectors))

    def level_count_at(self, sheaf: SplitSheaf, t) -> int:
        return len(self.closed_form_lex_filtration(sheaf, t).factors)


def is_slope_semistable(sheaf: SplitSheaf) -> bool:
    """Torsion sheaves, and torsion-free sheaves with one degree class."""
    if sheaf.is_zero:
        return True
    if sheaf.rank == 0:
        return True
    if sheaf.torsion:
        return False
    return len(set(sheaf.line_degrees)) == 1


def is_gieseker_semistable(sheaf: SplitSheaf) -> bool:
    """On a curve the Gieseker refinement adds nothing among split sheaves."""
    return is_slope_semistable(sheaf)
