"""Harder-Narasimhan machinery for a weak stability function on a finite backend.

The greedy maximal-destabilizer construction is primary; the convex-hull
reading of the same filtration (hull_vertices) is kept as a verification
oracle.  A charge "plane" evaluates a weak stability function on charge
polynomials; engines only ever see planes through ``evaluate``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .category import (
    AbelianBackend,
    Filtration,
    Morphism,
    ObjectHandle,
    PreconditionViolatedError,
    ShortExactSequence,
    Subobject,
    ZeroObjectError,
)
from .charge import (
    ChargePolynomial,
    GAUSSIAN_ZERO,
    GaussianRational,
    NestedChargeSpec,
    Slope,
    nested_charge,
    slope_of_charge,
)

MemberFn = Optional[Callable[[ObjectHandle], bool]]


@dataclass(frozen=True)
class NestedPlane:
    """Weak stability function given by a nested-charge spec."""

    spec: NestedChargeSpec

    def evaluate(self, poly: ChargePolynomial) -> GaussianRational:
        return nested_charge(poly, self.spec)


@dataclass(frozen=True)
class SigmaTPlane:
    """Z_t = a_1 t - b_0 + i b_1 t on degree-<=1 polynomials."""

    t: Fraction

    def evaluate(self, poly: ChargePolynomial) -> GaussianRational:
        return GaussianRational(
            poly.a_at(1) * self.t - poly.b_at(0), poly.b_at(1) * self.t
        )


def level_plane(j: int, t: tuple, prefix: tuple) -> NestedPlane:
    """Plane for level len(prefix)+1 of the tower, given the recorded slopes.

    ``prefix`` holds the slopes of levels 1..k; infinite entries give the
    ones-pattern, which must be a contiguous prefix (the tower forces this).
    """
    k = len(prefix)
    ones = frozenset(m + 1 for m, s in enumerate(prefix) if s.is_infinite)
    if ones and ones != frozenset(range(1, max(ones) + 1)):
        raise PreconditionViolatedError(
            "phase-1 levels must form a contiguous prefix of the chain"
        )
    spec = NestedChargeSpec(j=j, k=k, t=tuple(Fraction(x) for x in t[: k + 1]), ones=ones)
    return NestedPlane(spec)


def charge_under(plane, handle: ObjectHandle) -> GaussianRational:
    return plane.evaluate(handle.charge)


def slope_under(plane, handle: ObjectHandle) -> Slope:
    return slope_of_charge(charge_under(plane, handle))


def _member_subs(backend, handle, member: MemberFn, order_seed=None):
    subs = backend.subobjects(handle, order_seed=order_seed)
    if member is None:
        return subs
    return [s for s in subs if s.is_zero or member(s.child)]


def max_zero_charge_subobject(
    backend: AbelianBackend, E: ObjectHandle, plane, member: MemberFn = None,
    order_seed=None,
) -> Subobject:
    """Sum of all (member) subobjects with zero plane-charge: the unique
    maximal one, since zero-charge objects are closed under sums."""
    acc = backend.zero_subobject(E)
    for s in _member_subs(backend, E, member, order_seed):
        if charge_under(plane, s.child).is_zero():
            acc = backend.sum_subobjects(acc, s)
    return acc


def is_semistable(
    backend: AbelianBackend, E: ObjectHandle, plane, member: MemberFn = None,
    order_seed=None,
):
    """No (member) subobject of strictly larger slope; returns (bool, witness)."""
    if E.is_zero:
        raise ZeroObjectError("semistability is undefined for the zero object")
    mu = slope_under(plane, E)
    witness = None
    witness_slope = None
    for s in _member_subs(backend, E, member, order_seed):
        if s.is_zero or s.is_full:
            continue
        ms = slope_under(plane, s.child)
        if ms > mu and (witness_slope is None or ms > witness_slope):
            witness, witness_slope = s, ms
    return witness is None, witness


def hn_filtration(
    backend: AbelianBackend, E: ObjectHandle, plane, member: MemberFn = None,
    order_seed=None,
) -> Filtration:
    """Greedy HN: repeatedly pull back the maximal destabilizer of the quotient.

    The maximal destabilizer is the sum of all subobjects achieving the top
    slope, which is canonical; slope-infinity subobjects (including the
    zero-charge part) form the head.
    """
    if E.is_zero:
        return Filtration((), (), ())
    chain: list[Subobject] = []
    factors: list[ObjectHandle] = []
    slopes: list[Slope] = []
    current = backend.zero_subobject(E)
    while current.child.size < E.size:
        Qh, proj = backend.quotient(current)
        subs = [
            s for s in _member_subs(backend, Qh, member, order_seed) if not s.is_zero
        ]
        mu = max(slope_under(plane, s.child) for s in subs)
        dest = backend.zero_subobject(Qh)
        for s in subs:
            if slope_under(plane, s.child) == mu:
                dest = backend.sum_subobjects(dest, s)
        if slope_under(plane, dest.child) != mu:
            raise AssertionError("maximal destabilizer changed slope under summation")
        if slopes and not mu < slopes[-1]:
            raise AssertionError("HN slopes failed to decrease strictly")
        nxt = backend.pullback_subobject(dest, proj)
        chain.append(nxt)
        factors.append(dest.child)
        slopes.append(mu)
        current = nxt
    return Filtration(tuple(chain), tuple(factors), tuple(slopes))


# -- convex-hull verification oracle --------------------------------------


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _convex_hull_ccw(pts):
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def hull_vertices(
    backend: AbelianBackend, E: ObjectHandle, plane, order_seed=None
) -> tuple[GaussianRational, ...]:
    """Extremal vertices 0 = v_0, ..., v_n = Z(Q) of the left charge hull of
    Q = E / (maximal zero-charge subobject), in boundary order.

    The boundary path from 0 to Z(Q) on the left of the 0-Z(Q) chord is the
    clockwise walk of the exact convex hull; it must coincide with the
    partial charge sums of the HN factors.
    """
    zero_part = max_zero_charge_subobject(backend, E, plane, order_seed=order_seed)
    Qh, _ = backend.quotient(zero_part)
    if Qh.is_zero:
        return (GAUSSIAN_ZERO,)
    zq = charge_under(plane, Qh)
    zq_pt = (zq.re, zq.im)
    pts = {(Fraction(0), Fraction(0)), zq_pt}
    for s in backend.subobjects(Qh, order_seed=order_seed):
        z = charge_under(plane, s.child)
        # keep the closed half-plane on the left of the 0 -> Z(Q) chord
        if zq.re * z.im - zq.im * z.re >= 0:
            pts.add((z.re, z.im))
    hull = _convex_hull_ccw(list(pts))
    origin = (Fraction(0), Fraction(0))
    i = hull.index(origin)
    target = hull.index(zq_pt)
    path = []
    while True:
        path.append(hull[i])
        if i == target:
            break
        i = (i - 1) % len(hull)
    return tuple(GaussianRational(x, y) for x, y in path)


# -- abelianizer toolkit ---------------------------------------------------


def quasi_semistable_decompose(
    backend: AbelianBackend, E: ObjectHandle, plane, member: MemberFn = None
):
    """(Q', K') with Q' the maximal zero-charge subobject and K' = E/Q'
    semistable, or None if E is not quasi-semistable."""
    q0 = max_zero_charge_subobject(backend, E, plane, member)
    Kh, _ = backend.quotient(q0)
    if Kh.is_zero:
        return q0, Kh
    ok, _ = is_semistable(backend, Kh, plane, member)
    if ok:
        return q0, Kh
    return None


def phase_of_quasi(
    backend: AbelianBackend, E: ObjectHandle, plane, member: MemberFn = None
) -> Optional[Slope]:
    """Slope of the semistable part of a quasi-semistable object.

    Returns None as a wildcard for objects of zero charge (they belong to
    every phase), and raises if E is not quasi-semistable.
    """
    decomp = quasi_semistable_decompose(backend, E, plane, member)
    if decomp is None:
        raise PreconditionViolatedError("object is not quasi-semistable")
    _, Kh = decomp
    if Kh.is_zero:
        return None
    return slope_under(plane, Kh)


def switch_decomposition(
    backend: AbelianBackend, ses: ShortExactSequence, plane
) -> ShortExactSequence:
    """Turn 0 -> K -> E -> Q -> 0 (K semistable, Z(Q)=0) into
    0 -> Q' -> E -> K' -> 0 with Z(Q') = 0 and K' semistable of the same phase."""
    K, E, Q = ses.sub, ses.total, ses.quotient
    if K.is_zero:
        raise PreconditionViolatedError("the sub must be a nonzero semistable object")
    ok, _ = is_semistable(backend, K, plane)
    if not ok:
        raise PreconditionViolatedError("the sub of the sequence is not semistable")
    if not charge_under(plane, Q).is_zero():
        raise PreconditionViolatedError("the quotient must have zero charge")
    phi = slope_under(plane, K)
    if phi.is_infinite:
        # phase-1 branch: E itself is semistable of phase 1
        return backend.ses_of(backend.zero_subobject(E))
    inf_part = backend.zero_subobject(E)
    for s in backend.subobjects(E):
        if slope_under(plane, s.child).is_infinite:
            inf_part = backend.sum_subobjects(inf_part, s)
    if not charge_under(plane, inf_part.child).is_zero():
        raise AssertionError("maximal phase-1 subobject has nonzero charge")
    out = backend.ses_of(inf_part)
    if not out.quotient.is_zero:
        ok, _ = is_semistable(backend, out.quotient, plane)
        if not ok or slope_under(plane, out.quotient) != phi:
            raise AssertionError("switched quotient failed to be semistable of the same phase")
    return out


@dataclass(frozen=True)
class ClosureVerdict:
    ok: bool
    failing: Optional[str] = None


def phase_closure_check(
    backend: AbelianBackend, f: Morphism, plane, member: MemberFn = None
) -> ClosureVerdict:
    """Kernel, image and cokernel of a morphism between equal-phase
    quasi-semistables must again be quasi-semistable of that phase."""
    phases = []
    for endpoint in (f.src, f.dst):
        if endpoint.is_zero:
            phases.append(None)
            continue
        phases.append(phase_of_quasi(backend, endpoint, plane, member))
    stated = [p for p in phases if p is not None]
    if len(stated) == 2 and stated[0] != stated[1]:
        raise PreconditionViolatedError("endpoints have different phases")
    phi = stated[0] if stated else None
    parts = [
        ("kernel", backend.kernel(f).child),
        ("image", backend.image(f).child),
        ("cokernel", backend.cokernel(f)[0]),
    ]
    for name, handle in parts:
        if handle.is_zero:
            continue
        decomp = quasi_semistable_decompose(backend, handle, plane, member)
        if decomp is None:
            return ClosureVerdict(False, name)
        _, Kh = decomp
        if Kh.is_zero:
            continue
        if phi is not None and slope_under(plane, Kh) != phi:
            return ClosureVerdict(False, name)
    return ClosureVerdict(True)
