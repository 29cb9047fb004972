"""Nested stability tower: level-l semistability, lexicographic filtrations,
torsion pairs from phase-vector cutoffs, and tilted-heart positivity audits.

Phase slices are represented implicitly: membership in the slice recorded by
a slope prefix is quasi-semistability at each level with those slopes.  The
backend with subobject enumeration runs the generic recursion; the split
sheaf backend routes to its closed form.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .category import (
    AbelianBackend,
    CategoryError,
    LexFiltration,
    ObjectHandle,
    PreconditionViolatedError,
    ShortExactSequence,
    Subobject,
)
from .charge import (
    ChargePolynomial,
    GaussianRational,
    GREATER,
    Slope,
    degree_at_most,
    lex_compare,
    slope_of_charge,
)
from .hn import (
    SigmaTPlane,
    hn_filtration,
    is_semistable,
    level_plane,
    quasi_semistable_decompose,
    slope_under,
)


class LevelOutOfRangeError(CategoryError):
    """Requested level exceeds degree bound + 1."""


def _check_vector_invariant(vec) -> None:
    # infinite coordinates must form a (possibly empty) prefix
    seen_finite = False
    for s in vec:
        if s.is_infinite and seen_finite:
            raise AssertionError("infinite phase after a finite one in a phase vector")
        if not s.is_infinite:
            seen_finite = True


class LexEngine:
    """Tower of nested charges on a subobject-enumerating backend.

    j is the degree bound of the active charge polynomials; t holds the
    positive parameters t_1..t_l of the tower.
    """

    def __init__(self, backend: AbelianBackend, j: int, t, order_seed=None):
        self.backend = backend
        self.j = j
        self.t = tuple(Fraction(x) for x in t)
        if any(x <= 0 for x in self.t):
            raise ValueError("t-parameters must be positive")
        self.order_seed = order_seed
        self._member_cache: dict = {}

    def plane(self, prefix):
        return level_plane(self.j, self.t, tuple(prefix))

    def member_fn(self, prefix):
        prefix = tuple(prefix)
        return lambda handle: self.is_member(handle, prefix)

    def is_member(self, handle: ObjectHandle, prefix) -> bool:
        """Membership in the abelian slice recorded by the slope prefix."""
        if handle.is_zero:
            return True
        prefix = tuple(prefix)
        if not prefix:
            return degree_at_most(handle.charge, self.j)
        key = (handle.key, prefix)
        if key in self._member_cache:
            return self._member_cache[key]
        head, last = prefix[:-1], prefix[-1]
        ok = False
        if self.is_member(handle, head):
            plane = self.plane(head)
            decomp = quasi_semistable_decompose(
                self.backend, handle, plane, self.member_fn(head)
            )
            if decomp is not None:
                _, Kh = decomp
                # zero-charge objects are members of every phase slice
                ok = Kh.is_zero or slope_under(plane, Kh) == last
        self._member_cache[key] = ok
        return ok

    def level_semistable(self, handle: ObjectHandle, l: int):
        """(ok, phase vector); the vector is partial when a level fails."""
        self._check_level(l)
        vec: list[Slope] = []
        for _ in range(l):
            prefix = tuple(vec)
            plane = self.plane(prefix)
            ok, _ = is_semistable(
                self.backend, handle, plane, self.member_fn(prefix), self.order_seed
            )
            if not ok:
                return False, tuple(vec)
            vec.append(slope_under(plane, handle))
        return True, tuple(vec)

    def hn_in_slice(self, handle: ObjectHandle, prefix):
        """HN filtration at level len(prefix)+1 inside the recorded slice."""
        prefix = tuple(prefix)
        return hn_filtration(
            self.backend, handle, self.plane(prefix), self.member_fn(prefix),
            self.order_seed,
        )

    def lex_filtration(self, handle: ObjectHandle, l: int) -> LexFiltration:
        self._check_level(l)
        out = self._lex(handle, (), l)
        prev = None
        for vec in out.vectors:
            _check_vector_invariant(vec)
            if prev is not None and not lex_compare(prev, vec) == GREATER:
                raise AssertionError("phase vectors failed to decrease strictly")
            prev = vec
        return out

    def _lex(self, handle: ObjectHandle, prefix, l: int) -> LexFiltration:
        if handle.is_zero:
            return LexFiltration((), (), ())
        filt = self.hn_in_slice(handle, prefix)
        if len(prefix) + 1 == l:
            return LexFiltration(
                filt.chain,
                filt.factors,
                tuple(prefix + (mu,) for mu in filt.slopes),
            )
        chain = []
        factors = []
        vectors = []
        prev = self.backend.zero_subobject(handle)
        for step, mu in zip(filt.chain, filt.slopes):
            # the factor step/prev, with its projection from step.child
            inner_prev = self.backend.restrict(prev, step)
            Fh, proj = self.backend.quotient(inner_prev)
            refined = self._lex(Fh, prefix + (mu,), l)
            for fsub, ffac, fvec in zip(refined.chain, refined.factors, refined.vectors):
                lifted = self.backend.pullback_subobject(fsub, proj)
                chain.append(self.backend.compose_subobject(step, lifted))
                factors.append(ffac)
                vectors.append(fvec)
            prev = step
        return LexFiltration(tuple(chain), tuple(factors), tuple(vectors))

    def degree_filtration(self, handle: ObjectHandle):
        """Chain E_0 <= E_1 <= ... <= E_j, E_i = maximal subobject of charge
        degree <= i; the top step is all of E."""
        chain = []
        for i in range(self.j + 1):
            acc = self.backend.zero_subobject(handle)
            for s in self.backend.subobjects(handle, order_seed=self.order_seed):
                if degree_at_most(s.child.charge, i):
                    acc = self.backend.sum_subobjects(acc, s)
            chain.append(acc)
        return tuple(chain)

    def _check_level(self, l: int) -> None:
        if not (1 <= l <= self.j + 1):
            raise LevelOutOfRangeError(
                f"level {l} out of range for degree bound {self.j}"
            )


def degree_bound_of(backend: AbelianBackend) -> int:
    if getattr(backend, "preset", None) is not None:
        return backend.preset.r
    return 1


def lex_filtration(
    backend: AbelianBackend, handle: ObjectHandle, l: int, t, order_seed=None
) -> LexFiltration:
    """Backend dispatch: closed form where available, generic engine otherwise."""
    t = tuple(Fraction(x) for x in t)
    if len(t) < l:
        raise LevelOutOfRangeError(f"need {l} t-parameters, got {len(t)}")
    if backend.capabilities.supports_closed_form_hn:
        if l > 2:
            raise LevelOutOfRangeError(f"level {l} out of range for degree bound 1")
        return backend.closed_form_lex_filtration(handle.key, t[:l])
    engine = LexEngine(backend, degree_bound_of(backend), t[:l], order_seed)
    return engine.lex_filtration(handle, l)


def is_lth_level_semistable(
    backend: AbelianBackend, handle: ObjectHandle, l: int, t, order_seed=None
):
    if handle.is_zero:
        raise PreconditionViolatedError("level semistability is undefined at zero")
    if backend.capabilities.supports_closed_form_hn:
        filt = lex_filtration(backend, handle, l, t)
        if len(filt.factors) == 1:
            return True, filt.vectors[0]
        # on the projective line every unstable split sheaf already fails
        # at level 1 (slope and Gieseker semistability coincide)
        return False, ()
    t = tuple(Fraction(x) for x in t)
    engine = LexEngine(backend, degree_bound_of(backend), t[:l], order_seed)
    return engine.level_semistable(handle, l)


def degree_filtration(backend: AbelianBackend, handle: ObjectHandle, order_seed=None):
    if backend.capabilities.supports_closed_form_hn:
        return backend.closed_form_degree_filtration(handle.key)
    engine = LexEngine(
        backend, degree_bound_of(backend), (Fraction(1),), order_seed
    )
    return engine.degree_filtration(handle)


# -- torsion pairs ---------------------------------------------------------


@dataclass(frozen=True)
class TorsionSplit:
    T: ObjectHandle
    F: ObjectHandle
    ses: ShortExactSequence
    cutoff: tuple
    t: tuple
    filtration: LexFiltration
    hom_zero: Optional[bool]  # None when the backend cannot compute Hom


def torsion_split(
    backend: AbelianBackend, handle: ObjectHandle, cutoff, t, order_seed=None
) -> TorsionSplit:
    """Split E along the lex filtration: T collects the factors with phase
    vector strictly above the cutoff, F = E/T gets the rest.

    Cutoff coordinates must be finite slopes; phase-1 factors then always
    land in T since an infinite slope beats any finite one.
    """
    cutoff = tuple(cutoff)
    if any(s.is_infinite for s in cutoff):
        raise PreconditionViolatedError("cutoff coordinates must be finite")
    l = len(cutoff)
    t = tuple(Fraction(x) for x in t)
    filt = lex_filtration(backend, handle, l, t, order_seed)
    idx = 0
    for vec in filt.vectors:
        if lex_compare(vec, cutoff) == GREATER:
            idx += 1
        else:
            break
    for vec in filt.vectors[idx:]:
        if lex_compare(vec, cutoff) == GREATER:
            raise AssertionError("factors above the cutoff are not a prefix")
    if idx == 0:
        tsub = backend.zero_subobject(handle)
    else:
        tsub = filt.chain[idx - 1]
    ses = backend.ses_of(tsub)
    hom_zero = None
    if backend.capabilities.supports_hom_basis and not ses.sub.is_zero and not ses.quotient.is_zero:
        hom_zero = len(backend.hom_basis(ses.sub, ses.quotient)) == 0
    return TorsionSplit(
        T=ses.sub, F=ses.quotient, ses=ses, cutoff=cutoff, t=t,
        filtration=filt, hom_zero=hom_zero,
    )


# -- tilted-heart audits ---------------------------------------------------


def virtual_class(split: TorsionSplit) -> ChargePolynomial:
    """charge(T) - charge(F): the K-theory shadow of the tilted-heart object."""
    return split.T.charge - split.F.charge


@dataclass(frozen=True)
class TiltedVerdict:
    ok: bool
    level: Optional[int] = None
    value: Optional[Fraction] = None

    def to_json(self) -> dict:
        from .charge import format_rational

        return {
            "ok": self.ok,
            "level": self.level,
            "value": None if self.value is None else format_rational(self.value),
        }


def tilted_positivity_audit(split: TorsionSplit, t) -> TiltedVerdict:
    """Inequality cascade on the virtual class v = charge(T) - charge(F):
    -a_r t_1 + b_{r-1} >= 0, and whenever all earlier quantities vanish,
    -a_{r-l} t_{l+1} + b_{r-l-1} >= 0 (with b_{-1} = 0)."""
    v = virtual_class(split)
    t = tuple(Fraction(x) for x in t)
    r = v.r
    if len(t) < r + 1:
        raise PreconditionViolatedError(f"need {r + 1} t-parameters, got {len(t)}")
    for level in range(r + 1):
        q = -v.a_at(r - level) * t[level] + v.b_at(r - level - 1)
        if q < 0:
            return TiltedVerdict(False, level, q)
        if q > 0:
            return TiltedVerdict(True, level, q)
    return TiltedVerdict(True, r, Fraction(0))


@dataclass(frozen=True)
class QuadraticVerdict:
    value: Fraction
    nonnegative: bool

    def to_json(self) -> dict:
        from .charge import format_rational

        return {"value": format_rational(self.value), "nonnegative": self.nonnegative}


def quadratic_value(p: ChargePolynomial) -> Fraction:
    return p.b_at(1) * p.a_at(0) - p.b_at(0) * p.a_at(1)


def sigma_t_quadratic_audit(
    backend: AbelianBackend, handle: ObjectHandle, t
) -> QuadraticVerdict:
    """Report b_1 a_0 - b_0 a_1 for an object semistable under
    Z_t = a_1 t - b_0 + i b_1 t; the sign is a report, not an axiom."""
    t = Fraction(t)
    if not degree_at_most(handle.charge, 1):
        raise PreconditionViolatedError("charge degree must be at most 1")
    if backend.capabilities.supports_closed_form_hn:
        from .p1 import is_slope_semistable

        # on split sheaves Z_t-semistability coincides with slope semistability
        if not is_slope_semistable(handle.key):
            raise PreconditionViolatedError("object is not Z_t-semistable")
    else:
        ok, _ = is_semistable(backend, handle, SigmaTPlane(t))
        if not ok:
            raise PreconditionViolatedError("object is not Z_t-semistable")
    value = quadratic_value(handle.charge)
    return QuadraticVerdict(value, value >= 0)


@dataclass(frozen=True)
class TiltedCharge:
    value: GaussianRational
    contract_ok: bool  # Im >= 0 and (Im = 0 implies Re < 0) for nonzero classes

    def to_json(self) -> dict:
        from .charge import format_rational

        return {
            "re": format_rational(self.value.re),
            "im": format_rational(self.value.im),
            "contract_ok": self.contract_ok,
        }


def tilted_charge(v: ChargePolynomial, s, t) -> TiltedCharge:
    """b_1 s + a_0 + i(-a_1 t + b_0) on a degree-<=1 virtual class."""
    s = Fraction(s)
    t = Fraction(t)
    if not degree_at_most(v, 1):
        raise PreconditionViolatedError("virtual class degree must be at most 1")
    z = GaussianRational(v.b_at(1) * s + v.a_at(0), -v.a_at(1) * t + v.b_at(0))
    if v.is_zero():
        return TiltedCharge(z, True)
    ok = z.im > 0 or (z.im == 0 and z.re < 0)
    return TiltedCharge(z, ok)
