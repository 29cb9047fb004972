"""Brute-force reference implementations used to cross-check the engines.

Everything here is computed straight from the defining conditions on raw
dimension vectors and matrices; the only code shared with the package is the
F_p matrix kernel.  The filtration oracle does not replay the engine's
greedy construction: it enumerates every chain of subrepresentations and
keeps the ones whose factors are level-semistable with strictly decreasing
phase vectors, asserting that exactly one chain qualifies.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from lexstab import linalg_fp as la

F = Fraction


def _slope_key(s):
    # None encodes +infinity
    return (1, F(0)) if s is None else (0, s)


def slope_gt(x, y) -> bool:
    return _slope_key(x) > _slope_key(y)


def lex_gt(u, v) -> bool:
    assert len(u) == len(v)
    for x, y in zip(u, v):
        if _slope_key(x) != _slope_key(y):
            return _slope_key(x) > _slope_key(y)
    return False


class Oracle:
    """Reference computations for one quiver, prime, preset and t-vector."""

    def __init__(self, arrows, p, alpha, beta, t):
        self.arrows = tuple(tuple(a) for a in arrows)
        self.p = p
        self.alpha = tuple(tuple(F(x) for x in row) for row in alpha)
        self.beta = tuple(tuple(F(x) for x in row) for row in beta)
        self.t = tuple(F(x) for x in t)
        self.j = len(self.alpha) - 1
        self._subs_cache = {}
        self._member_cache = {}
        self._ss_cache = {}

    # -- raw representations: (dims, mats) tuples --------------------------

    def charge_arrays(self, dims):
        a = tuple(sum(c * d for c, d in zip(row, dims)) for row in self.alpha)
        b = tuple(sum(c * d for c, d in zip(row, dims)) for row in self.beta)
        return a, b

    def plane_value(self, dims, prefix):
        """Nested charge of the level len(prefix)+1 weak stability function."""
        a, b = self.charge_arrays(dims)

        def A(i):
            return a[i] if 0 <= i < len(a) else F(0)

        def B(i):
            return b[i] if 0 <= i < len(b) else F(0)

        j, k = self.j, len(prefix)
        ones = [m + 1 for m, s in enumerate(prefix) if s is None]
        assert ones == list(range(1, len(ones) + 1)), "non-contiguous ones pattern"
        re = A(j - k) * self.t[k] - B(j - k - 1)
        if ones:
            n = ones[-1]
            im = -(A(j - n + 1) * self.t[n - 1] - B(j - n))
        else:
            im = B(j)
        return re, im

    def plane_slope(self, dims, prefix):
        re, im = self.plane_value(dims, prefix)
        assert im >= 0, "imaginary part must be nonnegative"
        return None if im == 0 else -re / im

    def sub_bases(self, rep):
        """All arrow-closed tuples of per-vertex rref bases."""
        dims, mats = rep
        if rep not in self._subs_cache:
            per = [la.all_subspaces(self.p, d) for d in dims]
            found = []
            for combo in product(*per):
                ok = True
                for (s, t), M in zip(self.arrows, mats):
                    for v in combo[s]:
                        img = la.matvec(M, v, self.p)
                        if not la.span_contains(combo[t], img, dims[t], self.p):
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    found.append(combo)
            self._subs_cache[rep] = tuple(found)
        return self._subs_cache[rep]

    def sub_rep(self, rep, bases):
        """The subrepresentation in its own coordinates."""
        dims, mats = rep
        sdims = tuple(len(B) for B in bases)
        smats = []
        for (s, t), M in zip(self.arrows, mats):
            cols = [
                la.span_coords(bases[t], la.matvec(M, v, self.p), dims[t], self.p)
                for v in bases[s]
            ]
            smats.append(tuple(tuple(col[i] for col in cols) for i in range(sdims[t])))
        return sdims, tuple(smats)

    def quotient_rep(self, rep, bases):
        dims, mats = rep
        qmaps = [la.quotient_map(bases[v], dims[v], self.p) for v in range(len(dims))]
        lifts = []
        for v in range(len(dims)):
            pivots = la.rref(bases[v], dims[v], self.p)[1]
            nonpivot = [c for c in range(dims[v]) if c not in pivots]
            lifts.append(
                tuple(
                    tuple(1 if row == c else 0 for c in nonpivot)
                    for row in range(dims[v])
                )
            )
        qdims = tuple(len(q) for q in qmaps)
        qmats = []
        for (s, t), M in zip(self.arrows, mats):
            qmats.append(la.matmul(qmaps[t], la.matmul(M, lifts[s], self.p), self.p))
        return qdims, tuple(qmats)

    # -- slice membership and semistability, from the definitions ----------

    def in_slice(self, rep, prefix) -> bool:
        dims, _ = rep
        if sum(dims) == 0:
            return True
        if not prefix:
            return True
        key = (rep, prefix)
        if key in self._member_cache:
            return self._member_cache[key]
        head = prefix[:-1]
        ok = False
        if self.in_slice(rep, head):
            # maximal zero-charge in-slice subobject, as a sum of bases
            acc = tuple(() for _ in dims)
            for combo in self.sub_bases(rep):
                srep = self.sub_rep(rep, combo)
                if self.plane_value(srep[0], head) == (F(0), F(0)) and self.in_slice(
                    srep, head
                ):
                    acc = tuple(
                        la.subspace_sum(acc[v], combo[v], dims[v], self.p)
                        for v in range(len(dims))
                    )
            krep = self.quotient_rep(rep, acc)
            if sum(krep[0]) == 0:
                ok = True
            else:
                ok = self.semistable_in_slice(krep, head) and _slope_key(
                    self.plane_slope(krep[0], head)
                ) == _slope_key(prefix[-1])
        self._member_cache[key] = ok
        return ok

    def semistable_in_slice(self, rep, prefix) -> bool:
        dims, _ = rep
        assert sum(dims) > 0
        key = (rep, prefix)
        if key in self._ss_cache:
            return self._ss_cache[key]
        mu = self.plane_slope(dims, prefix)
        ok = True
        for combo in self.sub_bases(rep):
            srep = self.sub_rep(rep, combo)
            sd = sum(srep[0])
            if sd == 0 or sd == sum(dims):
                continue
            if self.in_slice(srep, prefix) and slope_gt(
                self.plane_slope(srep[0], prefix), mu
            ):
                ok = False
                break
        self._ss_cache[key] = ok
        return ok

    def level_vector(self, rep, l):
        """Phase vector if rep is l-th level semistable, else None."""
        vec = []
        for _ in range(l):
            prefix = tuple(vec)
            if not self.in_slice(rep, prefix) or not self.semistable_in_slice(
                rep, prefix
            ):
                return None
            vec.append(self.plane_slope(rep[0], prefix))
        return tuple(vec)

    # -- the filtration, by exhaustion over chains --------------------------

    def _contains(self, dims, big, small) -> bool:
        return all(
            la.span_contains(big[v], w, dims[v], self.p)
            for v in range(len(dims))
            for w in small[v]
        )

    def _all_chains(self, rep):
        """Strictly increasing chains of nonzero subobjects ending at the full
        one, as tuples of basis combos."""
        dims, _ = rep
        subs = [c for c in self.sub_bases(rep) if sum(len(B) for B in c) > 0]
        chains = []

        def extend(chain):
            last = chain[-1]
            if sum(len(B) for B in last) == sum(dims):
                chains.append(tuple(chain))
                return
            for c in subs:
                if c != last and self._contains(dims, c, last):
                    chain.append(c)
                    extend(chain)
                    chain.pop()

        for c in subs:
            extend([c])
        return chains

    def _chain_factors(self, rep, chain):
        dims, _ = rep
        factors = []
        prev = tuple(() for _ in dims)
        for combo in chain:
            srep = self.sub_rep(rep, combo)
            inner = tuple(
                tuple(
                    la.span_coords(combo[v], w, dims[v], self.p)
                    for w in prev[v]
                )
                for v in range(len(dims))
            )
            factors.append(self.quotient_rep(srep, inner))
            prev = combo
        return factors

    def lex_filtration(self, rep, l):
        """The unique valid chain with its factor vectors.

        Returns (chain of basis combos, factor reps, vectors); asserts that
        exactly one chain satisfies the defining property.
        """
        dims, _ = rep
        if sum(dims) == 0:
            return (), (), ()
        valid = []
        for chain in self._all_chains(rep):
            factors = self._chain_factors(rep, chain)
            vectors = []
            good = True
            for frep in factors:
                vec = self.level_vector(frep, l)
                if vec is None:
                    good = False
                    break
                if vectors and not lex_gt(vectors[-1], vec):
                    good = False
                    break
                vectors.append(vec)
            if good:
                valid.append((chain, tuple(factors), tuple(vectors)))
        assert len(valid) == 1, f"expected a unique valid chain, found {len(valid)}"
        return valid[0]
