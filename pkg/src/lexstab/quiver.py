"""Finite-dimensional quiver representations over a small prime field.

The category of such representations is abelian and finite length; it is
the desk-scale model backend.  Subobjects are enumerated by brute force
(per-vertex subspaces filtered by arrow closure), Hom spaces by solving
the commutation equations, and charges come from user presets that assign
coefficient functionals on dimension vectors.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property

from . import linalg_fp as la
from .category import (
    AbelianBackend,
    BackendCapabilities,
    BackendMismatchError,
    Morphism,
    ObjectHandle,
    ParentMismatchError,
    NotSurjectiveError,
    PreconditionViolatedError,
    ShortExactSequence,
    Subobject,
)
from .charge import (
    ChargePolynomial,
    PositivityVerdict,
    format_rational,
    parse_rational,
    positivity_audit,
)


class DimensionBoundExceededError(Exception):
    """Total dimension too large for brute-force subobject enumeration."""


class UnvalidatedPresetError(Exception):
    """Engines refuse presets that failed the positivity audit unless forced."""


@dataclass(frozen=True)
class Quiver:
    vertices: int
    arrows: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for s, t in self.arrows:
            if not (0 <= s < self.vertices and 0 <= t < self.vertices):
                raise ValueError(f"arrow ({s},{t}) references an invalid vertex")

    @cached_property
    def is_acyclic(self) -> bool:
        adj = {v: [] for v in range(self.vertices)}
        for s, t in self.arrows:
            adj[s].append(t)
        state = {}

        def visit(v):
            state[v] = 1
            for w in adj[v]:
                if state.get(w) == 1:
                    return False
                if w not in state and not visit(w):
                    return False
            state[v] = 2
            return True

        return all(visit(v) for v in range(self.vertices) if v not in state)


@dataclass(frozen=True)
class QuiverRep:
    """Representation: one subspace dimension per vertex, one matrix per arrow.

    Arrow s -> t carries a matrix of shape (dims[t], dims[s]), row-major.
    """

    quiver: Quiver
    p: int
    dims: tuple[int, ...]
    mats: tuple[la.Mat, ...]

    def __post_init__(self) -> None:
        if len(self.dims) != self.quiver.vertices:
            raise ValueError("dimension vector length does not match the quiver")
        if len(self.mats) != len(self.quiver.arrows):
            raise ValueError("one matrix per arrow required")
        for (s, t), M in zip(self.quiver.arrows, self.mats):
            if len(M) != self.dims[t] or any(len(row) != self.dims[s] for row in M):
                raise ValueError(
                    f"matrix for arrow ({s},{t}) must have shape ({self.dims[t]},{self.dims[s]})"
                )

    @property
    def total_dim(self) -> int:
        return sum(self.dims)


def zero_rep(quiver: Quiver, p: int) -> QuiverRep:
    return QuiverRep(quiver, p, (0,) * quiver.vertices, tuple(() for _ in quiver.arrows))


def rep_to_json(rep: QuiverRep) -> dict:
    return {
        "vertices": rep.quiver.vertices,
        "arrows": [list(a) for a in rep.quiver.arrows],
        "p": rep.p,
        "dims": list(rep.dims),
        "mats": [[x for row in M for x in row] for M in rep.mats],
    }


def rep_from_json(data: dict) -> QuiverRep:
    quiver = Quiver(data["vertices"], tuple(tuple(a) for a in data["arrows"]))
    dims = tuple(data["dims"])
    mats = []
    for (s, t), flat in zip(quiver.arrows, data["mats"]):
        rows, cols = dims[t], dims[s]
        if len(flat) != rows * cols:
            raise ValueError(f"matrix for arrow ({s},{t}) has wrong entry count")
        mats.append(tuple(tuple(flat[i * cols:(i + 1) * cols]) for i in range(rows)))
    return QuiverRep(quiver, data["p"], dims, tuple(mats))


@dataclass(frozen=True)
class ChargePreset:
    """Charge polynomial on K_0 = Z^vertices: a_k = alpha_k . d, b_k = beta_k . d."""

    name: str
    alpha: tuple[tuple[Fraction, ...], ...]  # indexed 0..r
    beta: tuple[tuple[Fraction, ...], ...]
    validated: bool = False

    @property
    def r(self) -> int:
        return len(self.alpha) - 1

    def charge_of(self, dims: tuple[int, ...]) -> ChargePolynomial:
        a = tuple(sum(c * d for c, d in zip(row, dims)) for row in self.alpha)
        b = tuple(sum(c * d for c, d in zip(row, dims)) for row in self.beta)
        return ChargePolynomial(tuple(Fraction(x) for x in a), tuple(Fraction(x) for x in b))

    def audit(self, samples: int = 50, seed: int = 0) -> tuple[PositivityVerdict, tuple[int, ...]]:
        """Positivity cascade on basis vectors and a seeded sample of the cone.

        Returns the first failing verdict with the offending dimension vector,
        or (PASS, ()) if every audited vector passes.
        """
        nv = len(self.alpha[0])
        vectors = [tuple(1 if i == v else 0 for i in range(nv)) for v in range(nv)]
        rng = random.Random(seed)
        for _ in range(samples):
            d = tuple(rng.randint(0, 5) for _ in range(nv))
            if any(d):
                vectors.append(d)
        for d in vectors:
            verdict = positivity_audit(self.charge_of(d), nonzero=True)
            if not verdict.ok:
                return verdict, d
        return PositivityVerdict(True), ()

    def validate(self, samples: int = 50, seed: int = 0) -> "ChargePreset":
        verdict, _ = self.audit(samples=samples, seed=seed)
        return replace(self, validated=verdict.ok)


def preset_to_json(preset: ChargePreset) -> dict:
    return {
        "name": preset.name,
        "r": preset.r,
        "alpha": [[format_rational(x) for x in row] for row in preset.alpha],
        "beta": [[format_rational(x) for x in row] for row in preset.beta],
    }


def preset_from_json(data: dict) -> ChargePreset:
    alpha = tuple(tuple(parse_rational(x) for x in row) for row in data["alpha"])
    beta = tuple(tuple(parse_rational(x) for x in row) for row in data["beta"])
    if len(alpha) != data["r"] + 1 or len(beta) != data["r"] + 1:
        raise ValueError("coefficient functional arrays do not match the declared r")
    return ChargePreset(data["name"], alpha, beta)


class QuiverBackend(AbelianBackend):
    name = "quiver"
    capabilities = BackendCapabilities(
        supports_subobject_enumeration=True, supports_hom_basis=True
    )

    def __init__(
        self,
        quiver: Quiver,
        p: int,
        preset: ChargePreset,
        dim_bound: int = 8,
        force_unvalidated: bool = False,
    ):
        if not preset.validated and not force_unvalidated:
            raise UnvalidatedPresetError(
                f"preset {preset.name!r} is not validated; pass force_unvalidated to override"
            )
        self.quiver = quiver
        self.p = p
        self.preset = preset
        self.dim_bound = dim_bound
        self._sub_cache: dict = {}

    # -- handles -----------------------------------------------------------

    def handle(self, rep: QuiverRep) -> ObjectHandle:
        if rep.quiver != self.quiver or rep.p != self.p:
            raise BackendMismatchError("representation belongs to a different backend")
        return ObjectHandle(
            backend=self.name,
            key=rep,
            charge=self.preset.charge_of(rep.dims),
            size=rep.total_dim,
        )

    def zero_handle(self) -> ObjectHandle:
        return self.handle(zero_rep(self.quiver, self.p))

    # -- subobjects --------------------------------------------------------

    def _child_rep(self, rep: QuiverRep, bases) -> QuiverRep:
        dims = tuple(len(B) for B in bases)
        mats = []
        for (s, t), M in zip(self.quiver.arrows, rep.mats):
            cols = []
            for v in bases[s]:
                img = la.matvec(M, v, self.p)
                coords = la.span_coords(bases[t], img, rep.dims[t], self.p)
                if coords is None:
                    raise ValueError("subspaces are not closed under the arrow maps")
                cols.append(coords)
            mats.append(tuple(tuple(col[i] for col in cols) for i in range(dims[t])))
        return QuiverRep(self.quiver, self.p, dims, tuple(mats))

    def make_subobject(self, parent: ObjectHandle, bases) -> Subobject:
        rep: QuiverRep = parent.key
        bases = tuple(la.rref(B, rep.dims[v], self.p)[0] for v, B in enumerate(bases))
        child = self._child_rep(rep, bases)
        return Subobject(parent=parent, child=self.handle(child), witness=bases)

    def zero_subobject(self, handle: ObjectHandle) -> Subobject:
        return self.make_subobject(handle, tuple(() for _ in range(self.quiver.vertices)))

    def full_subobject(self, handle: ObjectHandle) -> Subobject:
        rep: QuiverRep = handle.key
        return self.make_subobject(handle, tuple(la.identity(d) for d in rep.dims))

    def subobjects(self, handle: ObjectHandle, order_seed=None):
        rep: QuiverRep = handle.key
        if rep not in self._sub_cache:
            if rep.total_dim > self.dim_bound:
                raise DimensionBoundExceededError(
                    f"total dimension {rep.total_dim} exceeds bound {self.dim_bound}"
                )
            subs = []
            per_vertex = [la.all_subspaces(self.p, d) for d in rep.dims]
            for combo in _product_all(per_vertex):
                if self._closed(rep, combo):
                    subs.append(self.make_subobject(handle, combo))
            subs.sort(key=lambda s: (s.child.size, s.witness))
            self._sub_cache[rep] = tuple(subs)
        subs = list(self._sub_cache[rep])
        if order_seed is not None:
            random.Random(order_seed).shuffle(subs)
        return subs

    def _closed(self, rep: QuiverRep, bases) -> bool:
        for (s, t), M in zip(self.quiver.arrows, rep.mats):
            for v in bases[s]:
                img = la.matvec(M, v, self.p)
                if not la.span_contains(bases[t], img, rep.dims[t], self.p):
                    return False
        return True

    def sum_subobjects(self, a: Subobject, b: Subobject) -> Subobject:
        self._check_parent(a, b)
        rep: QuiverRep = a.parent.key
        bases = tuple(
            la.subspace_sum(a.witness[v], b.witness[v], rep.dims[v], self.p)
            for v in range(self.quiver.vertices)
        )
        return self.make_subobject(a.parent, bases)

    def intersect_subobjects(self, a: Subobject, b: Subobject) -> Subobject:
        self._check_parent(a, b)
        rep: QuiverRep = a.parent.key
        bases = tuple(
            la.subspace_intersection(a.witness[v], b.witness[v], rep.dims[v], self.p)
            for v in range(self.quiver.vertices)
        )
        return self.make_subobject(a.parent, bases)

    def contains(self, big: Subobject, small: Subobject) -> bool:
        self._check_parent(big, small)
        rep: QuiverRep = big.parent.key
        return all(
            la.span_contains(big.witness[v], w, rep.dims[v], self.p)
            for v in range(self.quiver.vertices)
            for w in small.witness[v]
        )

    @staticmethod
    def _check_parent(a: Subobject, b: Subobject) -> None:
        if a.parent.key != b.parent.key:
            raise ParentMismatchError("subobjects have different parents")

    # -- quotients and exact sequences ------------------------------------

    def quotient(self, sub: Subobject) -> tuple[ObjectHandle, Morphism]:
        rep: QuiverRep = sub.parent.key
        qmaps = tuple(
            la.quotient_map(sub.witness[v], rep.dims[v], self.p)
            for v in range(self.quiver.vertices)
        )
        lifts = []
        for v in range(self.quiver.vertices):
            pivots = la.rref(sub.witness[v], rep.dims[v], self.p)[1]
            nonpivot = [c for c in range(rep.dims[v]) if c not in pivots]
            lifts.append(
                tuple(
                    tuple(1 if row == c else 0 for c in nonpivot)
                    for row in range(rep.dims[v])
                )
            )
        dims = tuple(len(q) for q in qmaps)
        mats = []
        for (s, t), M in zip(self.quiver.arrows, rep.mats):
            mats.append(la.matmul(qmaps[t], la.matmul(M, lifts[s], self.p), self.p))
        qrep = QuiverRep(self.quiver, self.p, dims, tuple(mats))
        qh = self.handle(qrep)
        return qh, Morphism(src=sub.parent, dst=qh, mats=qmaps)

    def ses_of(self, sub: Subobject) -> ShortExactSequence:
        rep: QuiverRep = sub.parent.key
        # inclusion matrix per vertex has shape (parent dim, child dim)
        incl = tuple(
            tuple(tuple(B[j][i] for j in range(len(B))) for i in range(rep.dims[v]))
            for v, B in enumerate(sub.witness)
        )
        qh, proj = self.quotient(sub)
        return ShortExactSequence(
            sub=sub.child,
            total=sub.parent,
            quotient=qh,
            inclusion=Morphism(src=sub.child, dst=sub.parent, mats=incl),
            projection=proj,
        )

    def pullback_subobject(self, sub: Subobject, f: Morphism) -> Subobject:
        if sub.parent.key != f.dst.key:
            raise PreconditionViolatedError("subobject does not live in the codomain of f")
        dst_rep: QuiverRep = f.dst.key
        src_rep: QuiverRep = f.src.key
        bases = []
        for v in range(self.quiver.vertices):
            X = f.mats[v]
            if la.rank_of(X, src_rep.dims[v], self.p) < dst_rep.dims[v]:
                raise NotSurjectiveError(f"morphism is not surjective at vertex {v}")
            qmap = la.quotient_map(sub.witness[v], dst_rep.dims[v], self.p)
            comp = la.matmul(qmap, X, self.p)
            bases.append(la.nullspace(comp, src_rep.dims[v], self.p))
        return self.make_subobject(f.src, tuple(bases))

    def restrict(self, small: Subobject, big: Subobject) -> Subobject:
        """small <= big as subobjects of a common parent, re-expressed inside big.child."""
        self._check_parent(small, big)
        rep: QuiverRep = big.parent.key
        bases = []
        for v in range(self.quiver.vertices):
            rows = []
            for w in small.witness[v]:
                coords = la.span_coords(big.witness[v], w, rep.dims[v], self.p)
                if coords is None:
                    raise PreconditionViolatedError("subobject is not contained in the target")
                rows.append(coords)
            bases.append(tuple(rows))
        return self.make_subobject(big.child, tuple(bases))

    def compose_subobject(self, outer: Subobject, inner: Subobject) -> Subobject:
        """Subobject of outer.parent determined by inner <= outer.child."""
        if inner.parent.key != outer.child.key:
            raise ParentMismatchError("inner subobject does not live in outer.child")
        bases = []
        for v in range(self.quiver.vertices):
            rows = []
            for w in inner.witness[v]:
                vec = [0] * outer.parent.key.dims[v]
                for c, brow in zip(w, outer.witness[v]):
                    if c:
                        vec = [(x + c * y) % self.p for x, y in zip(vec, brow)]
                rows.append(tuple(vec))
            bases.append(tuple(rows))
        return self.make_subobject(outer.parent, tuple(bases))

    # -- morphisms ---------------------------------------------------------

    def kernel(self, f: Morphism) -> Subobject:
        src_rep: QuiverRep = f.src.key
        bases = tuple(
            la.nullspace(f.mats[v], src_rep.dims[v], self.p)
            for v in range(self.quiver.vertices)
        )
        return self.make_subobject(f.src, bases)

    def image(self, f: Morphism) -> Subobject:
        dst_rep: QuiverRep = f.dst.key
        bases = tuple(
            la.column_space(f.mats[v], dst_rep.dims[v], self.p)
            for v in range(self.quiver.vertices)
        )
        return self.make_subobject(f.dst, bases)

    def cokernel(self, f: Morphism) -> tuple[ObjectHandle, Morphism]:
        return self.quotient(self.image(f))

    def identity_morphism(self, handle: ObjectHandle) -> Morphism:
        rep: QuiverRep = handle.key
        return Morphism(handle, handle, tuple(la.identity(d) for d in rep.dims))

    def zero_morphism(self, src: ObjectHandle, dst: ObjectHandle) -> Morphism:
        s: QuiverRep = src.key
        d: QuiverRep = dst.key
        return Morphism(src, dst, tuple(la.zeros(d.dims[v], s.dims[v]) for v in range(self.quiver.vertices)))

    def hom_basis(self, src: ObjectHandle, dst: ObjectHandle):
        """Basis of Hom(src, dst): solve the arrow commutation equations."""
        E: QuiverRep = src.key
        F: QuiverRep = dst.key
        if E.quiver != F.quiver or E.p != F.p:
            raise BackendMismatchError("Hom requires a common quiver and field")
        offsets = []
        total = 0
        for v in range(self.quiver.vertices):
            offsets.append(total)
            total += F.dims[v] * E.dims[v]

        def var(v, i, j):
            return offsets[v] + i * E.dims[v] + j

        rows = []
        for a, (s, t) in enumerate(self.quiver.arrows):
            ME, MF = E.mats[a], F.mats[a]
            for i in range(F.dims[t]):
                for j in range(E.dims[s]):
                    row = [0] * total
                    for k in range(E.dims[t]):
                        row[var(t, i, k)] = (row[var(t, i, k)] + ME[k][j]) % self.p
                    for l in range(F.dims[s]):
                        row[var(s, l, j)] = (row[var(s, l, j)] - MF[i][l]) % self.p
                    rows.append(tuple(row))
        basis = la.nullspace(tuple(rows), total, self.p)
        out = []
        for sol in basis:
            mats = []
            for v in range(self.quiver.vertices):
                mats.append(
                    tuple(
                        tuple(sol[var(v, i, j)] for j in range(E.dims[v]))
                        for i in range(F.dims[v])
                    )
                )
            out.append(Morphism(src=src, dst=dst, mats=tuple(mats)))
        return out

    # -- generation --------------------------------------------------------

    def random_rep(self, dim_bound: tuple[int, ...], seed: int) -> QuiverRep:
        rng = random.Random(seed)
        dims = tuple(rng.randint(0, b) for b in dim_bound)
        mats = []
        for s, t in self.quiver.arrows:
            mats.append(
                tuple(
                    tuple(rng.randrange(self.p) for _ in range(dims[s]))
                    for _ in range(dims[t])
                )
            )
        return QuiverRep(self.quiver, self.p, dims, tuple(mats))


def direct_sum_rep(a: QuiverRep, b: QuiverRep) -> QuiverRep:
    """Block-diagonal direct sum; a's coordinates come first at each vertex."""
    if a.quiver != b.quiver or a.p != b.p:
        raise BackendMismatchError("direct sum requires a common quiver and field")
    dims = tuple(da + db for da, db in zip(a.dims, b.dims))
    mats = []
    for (s, t), MA, MB in zip(a.quiver.arrows, a.mats, b.mats):
        rows = []
        for i in range(a.dims[t]):
            rows.append(tuple(MA[i]) + (0,) * b.dims[s])
        for i in range(b.dims[t]):
            rows.append((0,) * a.dims[s] + tuple(MB[i]))
        mats.append(tuple(rows))
    return QuiverRep(a.quiver, a.p, dims, tuple(mats))


def _product_all(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for rest in _product_all(lists[1:]):
            yield (head,) + rest


def all_reps(quiver: Quiver, p: int, dim_bound: tuple[int, ...]):
    """Every representation with dimension vector <= dim_bound, exhaustively."""
    import itertools

    for dims in itertools.product(*(range(b + 1) for b in dim_bound)):
        shapes = [(dims[t], dims[s]) for s, t in quiver.arrows]
        entry_counts = [r * c for r, c in shapes]
        for entries in itertools.product(*(itertools.product(range(p), repeat=n) for n in entry_counts)):
            mats = []
            for (r, c), flat in zip(shapes, entries):
                mats.append(tuple(tuple(flat[i * c:(i + 1) * c]) for i in range(r)))
            yield QuiverRep(quiver, p, tuple(dims), tuple(mats))
