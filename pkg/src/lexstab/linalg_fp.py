"""Dense linear algebra over a small prime field F_p.

Matrices are tuples of row tuples of ints in [0, p); vectors are tuples.
A matrix of shape (m, n) acts on column vectors of length n.  Everything
is immutable and hashable so results can serve as dictionary keys.
Sizes are desk-scale (dimensions <= 8), so simplicity beats speed.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, product

Vec = tuple
Mat = tuple


def zeros(m: int, n: int) -> Mat:
    return tuple((0,) * n for _ in range(m))


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def matvec(M: Mat, v: Vec, p: int) -> Vec:
    return tuple(sum(row[j] * v[j] for j in range(len(v))) % p for row in M)


def matmul(A: Mat, B: Mat, p: int) -> Mat:
    if not A:
        return ()
    n = len(B[0]) if B else 0
    return tuple(
        tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) % p for j in range(n))
        for i in range(len(A))
    )


def transpose(M: Mat, ncols: int) -> Mat:
    return tuple(tuple(row[j] for row in M) for j in range(ncols))


def mat_sub(A: Mat, B: Mat, p: int) -> Mat:
    return tuple(
        tuple((a - b) % p for a, b in zip(ra, rb)) for ra, rb in zip(A, B)
    )


def _inv_mod(a: int, p: int) -> int:
    return pow(a, p - 2, p)


def rref(rows, ncols: int, p: int) -> tuple[Mat, tuple[int, ...]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    work = [list(r) for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(rank, len(work)):
            if work[i][col] % p != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        work[rank], work[pivot_row] = work[pivot_row], work[rank]
        inv = _inv_mod(work[rank][col] % p, p)
        work[rank] = [(x * inv) % p for x in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][col] % p != 0:
                c = work[i][col] % p
                work[i] = [(x - c * y) % p for x, y in zip(work[i], work[rank])]
        pivots.append(col)
        rank += 1
    return tuple(tuple(r) for r in work[:rank]), tuple(pivots)


def rank_of(rows, ncols: int, p: int) -> int:
    return len(rref(rows, ncols, p)[0])


def nullspace(M: Mat, ncols: int, p: int) -> Mat:
    """Basis (rref rows) of {v : M v = 0} in F_p^ncols."""
    R, pivots = rref(M, ncols, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-R[i][fc]) % p
        basis.append(tuple(v))
    return rref(basis, ncols, p)[0]


def solve(M: Mat, b: Vec, ncols: int, p: int):
    """One solution of M x = b, or None."""
    aug = [list(row) + [bi] for row, bi in zip(M, b)]
    R, pivots = rref(aug, ncols + 1, p)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = R[i][ncols]
    return tuple(x)


def span_coords(basis: Mat, v: Vec, ncols: int, p: int):
    """Coordinates of v in the given rref basis, or None if v is outside."""
    residual = list(v)
    R, pivots = rref(basis, ncols, p)
    coords = []
    for i, pc in enumerate(pivots):
        c = residual[pc] % p
        coords.append(c)
        if c:
            residual = [(x - c * y) % p for x, y in zip(residual, R[i])]
    if any(x % p for x in residual):
        return None
    return tuple(coords)


def span_contains(basis: Mat, v: Vec, ncols: int, p: int) -> bool:
    return span_coords(basis, v, ncols, p) is not None


def span_vectors(basis: Mat, ncols: int, p: int):
    """All vectors in the span (p^k of them)."""
    out = []
    for coeffs in product(range(p), repeat=len(basis)):
        v = [0] * ncols
        for c, row in zip(coeffs, basis):
            if c:
                v = [(x + c * y) % p for x, y in zip(v, row)]
        out.append(tuple(v))
    return out


def subspace_sum(a: Mat, b: Mat, ncols: int, p: int) -> Mat:
    return rref(list(a) + list(b), ncols, p)[0]


def subspace_intersection(a: Mat, b: Mat, ncols: int, p: int) -> Mat:
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    found = [v for v in span_vectors(small, ncols, p) if span_contains(big, v, ncols, p)]
    return rref(found, ncols, p)[0]


@lru_cache(maxsize=None)
def all_subspaces(p: int, n: int) -> tuple[Mat, ...]:
    """Every subspace of F_p^n as a canonical rref basis, () for the zero space.

    Enumerated by echelon shape: pick pivot columns, then fill the free
    entries.  Count matches the Gaussian binomial sum.
    """
    spaces: list[Mat] = [()]
    for k in range(1, n + 1):
        for pivots in combinations(range(n), k):
            free_slots = [
                (i, c)
                for i in range(k)
                for c in range(pivots[i] + 1, n)
                if c not in pivots
            ]
            for values in product(range(p), repeat=len(free_slots)):
                rows = [[0] * n for _ in range(k)]
                for i, pc in enumerate(pivots):
                    rows[i][pc] = 1
                for (slot, val) in zip(free_slots, values):
                    rows[slot[0]][slot[1]] = val
                spaces.append(tuple(tuple(r) for r in rows))
    return tuple(spaces)


def quotient_map(sub_basis: Mat, n: int, p: int) -> Mat:
    """Matrix of the projection F_p^n -> F_p^n / span(sub_basis).

    Quotient coordinates are the non-pivot coordinates after reduction by
    the rref basis; the map has shape (n - k, n).
    """
    R, pivots = rref(sub_basis, n, p)
    nonpivot = [c for c in range(n) if c not in pivots]
    rows = []
    for c in nonpivot:
        row = [0] * n
        row[c] = 1
        for i, pc in enumerate(pivots):
            row[pc] = (-R[i][c]) % p
        rows.append(tuple(row))
    return tuple(rows)


def column_space(M: Mat, nrows: int, p: int) -> Mat:
    return rref(transpose(M, len(M[0]) if M else 0), nrows, p)[0] if M else ()
