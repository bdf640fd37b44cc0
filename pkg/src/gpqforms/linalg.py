"""Exact Gaussian elimination over the supported (possibly skew) fields.

Vectors are tuples of ring elements.  Right vector spaces are the convention:
a vector x stands for sum_i e_i x_i and scalars act on the right.  Two
flavours of elimination follow from that:

* ``side="left"``: rows are equations of a system ``A y = b``; rows may be
  rescaled and combined by multiplying on the left.
* ``side="right"``: rows are vectors spanning a right subspace; rescaling
  happens on the right.

Over commutative rings both flavours coincide.
"""

from __future__ import annotations

from .errors import DimensionMismatchError, NotSpanningError


def _inv(ring, x):
    return ring.one / x


def rref(rows, ring, side: str = "left") -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    M = [list(r) for r in rows]
    if not M:
        return [], []
    ncols = len(M[0])
    pivots: list[int] = []
    r = 0
    left = side == "left"
    for c in range(ncols):
        piv = None
        for i in range(r, len(M)):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = _inv(ring, M[r][c])
        M[r] = [inv * x for x in M[r]] if left else [x * inv for x in M[r]]
        row = M[r]
        for i in range(len(M)):
            if i != r:
                a = M[i][c]
                if a:
                    if left:
                        M[i] = [x - a * y for x, y in zip(M[i], row)]
                    else:
                        M[i] = [x - y * a for x, y in zip(M[i], row)]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def nullspace(A, ring, ncols: int | None = None) -> list[tuple]:
    """Basis of the right kernel {y : A y = 0}."""
    if ncols is None:
        ncols = len(A[0]) if A else 0
    R, piv = rref(A, ring, "left") if A else ([], [])
    pivset = set(piv)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        y = [ring.zero] * ncols
        y[f] = ring.one
        for k, p in enumerate(piv):
            y[p] = -R[k][f]
        basis.append(tuple(y))
    return basis


def span_basis(vectors, ring) -> tuple[list[tuple], list[int]]:
    """Echelonized basis (and pivot columns) of the right span of ``vectors``."""
    vecs = [v for v in vectors]
    if not vecs:
        return [], []
    R, piv = rref(vecs, ring, "right")
    return [tuple(r) for r in R], piv


def rank(vectors, ring) -> int:
    return len(span_basis(vectors, ring)[0])


def solve(A, b, ring):
    """One solution y of A y = b, or None when inconsistent."""
    n = len(A[0]) if A else 0
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, piv = rref(aug, ring, "left")
    if piv and piv[-1] == n:
        return None
    y = [ring.zero] * n
    for k, p in enumerate(piv):
        y[p] = R[k][n]
    return tuple(y)


def columns(vectors) -> list[list]:
    """Matrix whose columns are the given vectors."""
    n = len(vectors[0])
    return [[v[i] for v in vectors] for i in range(n)]


def coordinates(basis, x, ring):
    """Right coordinates lambda with x = sum_i basis_i lambda_i (None if x not in span)."""
    if len(x) != len(basis[0]):
        raise DimensionMismatchError("vector length does not match basis")
    return solve(columns(basis), list(x), ring)


def inverse(A, ring) -> list[list]:
    n = len(A)
    aug = [list(row) + [ring.one if i == j else ring.zero for j in range(n)] for i, row in enumerate(A)]
    R, piv = rref(aug, ring, "left")
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise NotSpanningError("matrix is singular")
    return [row[n:] for row in R]


def mat_vec(A, x):
    return tuple(_dot(row, x) for row in A)


def _dot(row, x):
    acc = None
    for a, b in zip(row, x):
        term = a * b
        acc = term if acc is None else acc + term
    return acc


def mat_mul(A, B):
    cols = list(zip(*B))
    return [[_dot(row, col) for col in cols] for row in A]


def identity(n, ring):
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def vec_add(x, y):
    return tuple(a + b for a, b in zip(x, y))


def vec_sub(x, y):
    return tuple(a - b for a, b in zip(x, y))


def vec_scale(x, lam):
    """Right scalar multiple x * lam."""
    return tuple(a * lam for a in x)


def unit_vector(n, i, ring):
    return tuple(ring.one if j == i else ring.zero for j in range(n))


class EchelonBasis:
    """Subspace of B^d over a commutative field B, kept in reduced echelon form.

    :meth:`reduce` returns the unique representative of ``v + span`` whose
    pivot coordinates vanish, which makes it a canonical coset label.
    """

    __slots__ = ("ring", "dim", "rows", "pivots")

    def __init__(self, ring, dim: int, vectors=()):
        self.ring = ring
        self.dim = dim
        vecs = [tuple(v) for v in vectors if any(v)]
        rows, piv = span_basis(vecs, ring) if vecs else ([], [])
        self.rows = rows
        self.pivots = piv

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def is_full(self) -> bool:
        return len(self.rows) == self.dim

    def reduce(self, v) -> tuple:
        v = list(v)
        for row, p in zip(self.rows, self.pivots):
            a = v[p]
            if a:
                v = [x - a * y for x, y in zip(v, row)]
        return tuple(v)

    def contains(self, v) -> bool:
        return not any(self.reduce(v))

    def extend(self, vectors) -> EchelonBasis:
        return EchelonBasis(self.ring, self.dim, list(self.rows) + [tuple(v) for v in vectors])

    def issubset(self, other: EchelonBasis) -> bool:
        return all(other.contains(r) for r in self.rows)

    def __eq__(self, other):
        if not isinstance(other, EchelonBasis):
            return NotImplemented
        return self.dim == other.dim and self.rows == other.rows

    def __hash__(self):
        return hash((self.dim, tuple(self.rows)))

    def __repr__(self):
        return f"EchelonBasis(rank={self.rank}, dim={self.dim})"
