"""Backend-independent contract for a computable abelian category with charges.

Handles are value objects: the opaque ``key`` is the backend's canonical,
hashable description of the object (equality of handles is equality of keys),
and ``charge`` caches the object's charge polynomial.  Engine code only ever
talks to a backend through the operations declared here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Optional

from .charge import ChargePolynomial


class CategoryError(Exception):
    """Base class for category-level errors."""


class BackendMismatchError(CategoryError):
    """Operands belong to different backends."""


class ParentMismatchError(CategoryError):
    """Subobject lattice operations require a common parent."""


class NotSurjectiveError(CategoryError):
    """Pullback requires a surjection."""


class ZeroObjectError(CategoryError):
    """Operation undefined on the zero object."""


class PreconditionViolatedError(CategoryError):
    """An operation's stated hypothesis does not hold for the inputs."""


class EnumerationUnsupportedError(CategoryError):
    """The backend does not enumerate subobjects; generic engines refuse it."""


@dataclass(frozen=True)
class BackendCapabilities:
    supports_subobject_enumeration: bool = False
    supports_hom_basis: bool = False
    supports_closed_form_hn: bool = False


@dataclass(frozen=True)
class ObjectHandle:
    backend: str
    key: Hashable
    charge: ChargePolynomial
    size: int  # total dimension / length; 0 iff the zero object

    @property
    def is_zero(self) -> bool:
        return self.size == 0


@dataclass(frozen=True)
class Subobject:
    """A monomorphism child -> parent with backend-specific witness data."""

    parent: ObjectHandle
    child: ObjectHandle
    witness: Hashable

    @property
    def is_zero(self) -> bool:
        return self.child.is_zero

    @property
    def is_full(self) -> bool:
        return self.child.size == self.parent.size


@dataclass(frozen=True)
class Morphism:
    """A morphism src -> dst; ``mats`` is backend-specific map data."""

    src: ObjectHandle
    dst: ObjectHandle
    mats: Hashable


@dataclass(frozen=True)
class ShortExactSequence:
    """0 -> sub -> total -> quotient -> 0 with witnessing morphisms."""

    sub: ObjectHandle
    total: ObjectHandle
    quotient: ObjectHandle
    inclusion: Morphism
    projection: Morphism


@dataclass(frozen=True)
class Filtration:
    """HN chain 0 = E_0 < E_1 < ... < E_m = E (the zero step is implicit)."""

    chain: tuple  # Subobjects of E, strictly increasing, last one full
    factors: tuple  # ObjectHandles E_i / E_{i-1}
    slopes: tuple  # Slope per factor, strictly decreasing


@dataclass(frozen=True)
class LexFiltration:
    """Lexicographic chain with one phase vector per factor."""

    chain: tuple  # Subobjects of E (quiver) or partial-sum handles (P1)
    factors: tuple
    vectors: tuple  # tuple[Slope, ...] per factor, strictly lex-decreasing


class AbelianBackend:
    """Base class; concrete backends override what their capabilities declare."""

    name: str = "abstract"
    capabilities = BackendCapabilities()

    def subobjects(self, handle: ObjectHandle, order_seed: Optional[int] = None):
        raise EnumerationUnsupportedError(
            f"backend {self.name!r} does not enumerate subobjects"
        )

    def zero_subobject(self, handle: ObjectHandle) -> Subobject:
        raise NotImplementedError

    def full_subobject(self, handle: ObjectHandle) -> Subobject:
        raise NotImplementedError

    def sum_subobjects(self, a: Subobject, b: Subobject) -> Subobject:
        raise NotImplementedError

    def intersect_subobjects(self, a: Subobject, b: Subobject) -> Subobject:
        raise NotImplementedError

    def quotient(self, sub: Subobject) -> tuple[ObjectHandle, Morphism]:
        raise NotImplementedError

    def ses_of(self, sub: Subobject) -> ShortExactSequence:
        raise NotImplementedError

    def pullback_subobject(self, sub: Subobject, f: Morphism) -> Subobject:
        raise NotImplementedError

    def kernel(self, f: Morphism) -> Subobject:
        raise NotImplementedError

    def image(self, f: Morphism) -> Subobject:
        raise NotImplementedError

    def cokernel(self, f: Morphism) -> tuple[ObjectHandle, Morphism]:
        raise NotImplementedError

    def hom_basis(self, src: ObjectHandle, dst: ObjectHandle):
        raise NotImplementedError
