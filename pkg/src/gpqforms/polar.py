"""Polar spaces S_q and S_f over finite fields: points, lines, rank, radical.

Enumeration works on integer codes (see :mod:`gpqforms._kernels`).  Points
are normalized vectors (first nonzero coordinate 1) kept in lexicographic
order of their codes, so indices into the point list are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from . import linalg
from .errors import AmbientMismatchError, InfiniteRingError, SizeCapError
from .forms import GenPseudoQuadraticForm, SesquilinearForm, as_vector
from .scalars import FiniteField

MAX_POINTS = 10**7


@dataclass(frozen=True, order=True)
class ProjectivePoint:
    """A point [v] of PG(V), stored through its normalized representative."""

    codes: tuple
    ring: FiniteField

    @classmethod
    def of(cls, vector) -> ProjectivePoint:
        ring = vector[0].ring
        lead = next((c for c in vector if c), None)
        if lead is None:
            raise ValueError("the zero vector is not a projective point")
        inv = ring.one / lead
        return cls(tuple((inv * c).code for c in vector), ring)

    @property
    def vector(self) -> tuple:
        return tuple(self.ring.from_code(c) for c in self.codes)

    def __str__(self):
        return "(" + ", ".join(self.ring.format(c) for c in self.vector) + ")"


def _require_finite(ring):
    if not isinstance(ring, FiniteField):
        raise InfiniteRingError(f"{ring.spec()} is not enumerable; use membership queries instead")


def _check_size(F: FiniteField, n: int):
    total = (F.order**n - 1) // (F.order - 1)
    if total > MAX_POINTS:
        raise SizeCapError(f"PG({n - 1},{F.order}) has {total} points, cap is {MAX_POINTS}")


class _Arrays:
    """Code tables of a form's pair and Gram data."""

    def __init__(self, source):
        F = source.pair.ring
        _require_finite(F)
        self.F = F
        t = F.tables()
        self.add, self.mul, self.inv = t["add"], t["mul"], t["inv"]
        sig = source.pair.sigma_apply
        self.sig = np.array([sig(F.from_code(c)).code for c in range(F.order)], dtype=np.int64)
        self.G = np.array([[c.code for c in row] for row in source.gram], dtype=np.int64)
        if isinstance(source, GenPseudoQuadraticForm):
            self.vals = np.array([v.code for v in source.values], dtype=np.int64)
            R = source.codefect
            self.in_R = np.array([R.contains(F.from_code(c)) for c in range(F.order)], dtype=bool)
        else:
            self.vals = None
            self.in_R = None

    def singular_mask(self, P):
        if self.vals is not None:
            return self.in_R[K.quad_values(P, self.G, self.vals, self.sig, self.mul, self.add)]
        # isotropic points of a sesquilinear form: f(x, x) = 0
        return _fxx(P, self.G, self.sig, self.mul, self.add) == 0

    def orth(self, A, B):
        return K.sesq_values(A, B, self.G, self.sig, self.mul, self.add) == 0


def _fxx(P, G, sig, mul, add):
    n = P.shape[1]
    SA = sig[P]
    acc = np.zeros(len(P), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            acc = add[acc, mul[mul[SA[:, i], G[i, j]], P[:, j]]]
    return acc


class PolarSpace:
    """Enumerated points and lines of S_q (source "q") or S_f (source "f")."""

    def __init__(self, form, points: np.ndarray, lines: np.ndarray, arrays: _Arrays):
        self.form = form
        self.ring = arrays.F
        self.dim = points.shape[1] if len(points) else form.dim
        self.source = "q" if isinstance(form, GenPseudoQuadraticForm) else "f"
        self.points = points
        self.lines = lines
        self._arrays = arrays
        self.keys = K.point_keys(points, self.ring.order) if len(points) else np.zeros(0, dtype=np.int64)
        self._orth = None
        self._rank = None

    # -- basic views
    @property
    def num_points(self) -> int:
        return len(self.points)

    @property
    def num_lines(self) -> int:
        return len(self.lines)

    def point_vectors(self) -> list[tuple]:
        F = self.ring
        return [tuple(F.from_code(int(c)) for c in row) for row in self.points]

    def projective_points(self) -> list[ProjectivePoint]:
        return [ProjectivePoint(tuple(int(c) for c in row), self.ring) for row in self.points]

    def index_of(self, vector) -> int | None:
        p = ProjectivePoint.of(as_vector(self.ring, vector))
        key = int(np.dot(np.array(p.codes), self.ring.order ** np.arange(self.dim - 1, -1, -1)))
        i = int(np.searchsorted(self.keys, key))
        if i < len(self.keys) and self.keys[i] == key:
            return i
        return None

    @property
    def orth(self) -> np.ndarray:
        """Boolean matrix of f(p_a, p_b) = 0 between enumerated points."""
        if self._orth is None:
            self._orth = self._arrays.orth(self.points, self.points)
        return self._orth

    # -- derived data
    @property
    def rank(self) -> int:
        if self._rank is None:
            self._rank = polar_rank(self)
        return self._rank

    def radical_indices(self) -> list[int]:
        """Points collinear with every point of the space."""
        if not len(self.points):
            return []
        return [int(i) for i in np.nonzero(self.orth.all(axis=1))[0]]

    def radical_basis(self) -> list[tuple]:
        vecs = [self.point_vectors()[i] for i in self.radical_indices()]
        return linalg.span_basis(vecs, self.ring)[0] if vecs else []

    def nondegenerate_rank(self) -> int:
        return self.rank - len(self.radical_basis())

    def line_sets(self) -> set[frozenset]:
        return {frozenset(int(k) for k in self.keys[row]) for row in self.lines}

    def report(self) -> dict:
        fmt = self.ring.format
        vecs = self.point_vectors()
        return {
            "source": self.source,
            "ring": self.ring.spec(),
            "dim": str(self.dim),
            "num_points": str(self.num_points),
            "num_lines": str(self.num_lines),
            "points": [[fmt(c) for c in v] for v in vecs],
            "lines": [[str(int(i)) for i in row] for row in self.lines],
            "rank": str(self.rank),
            "radical": [[fmt(c) for c in v] for v in self.radical_basis()],
        }


def _points_array(source) -> tuple[np.ndarray, _Arrays]:
    arrays = _Arrays(source)
    _check_size(arrays.F, source.dim)
    P = K.projective_points(arrays.F.order, source.dim)
    return P[arrays.singular_mask(P)], arrays


def enumerate_points(source) -> list[ProjectivePoint]:
    """Singular points of a form (or isotropic points of a sesquilinear form), sorted."""
    P, arrays = _points_array(source)
    return [ProjectivePoint(tuple(int(c) for c in row), arrays.F) for row in P]


def _lines_of(P: np.ndarray, arrays: _Arrays) -> np.ndarray:
    F = arrays.F
    if len(P) < 2:
        return np.zeros((0, F.order + 1), dtype=np.int64)
    Z = arrays.orth(P, P)
    keys = K.point_keys(P, F.order)
    L, ok = K.lines(P, Z, keys, arrays.inv, arrays.mul, arrays.add, F.order)
    if not ok:
        raise AssertionError("a line through two orthogonal singular points left the singular set")
    return L


def enumerate_lines(source, points=None) -> list[tuple[int, ...]]:
    """Totally singular (or isotropic) lines as sorted tuples of point indices."""
    arrays = _Arrays(source)
    if points is None:
        P, arrays = _points_array(source)
    else:
        P = np.array([p.codes for p in points], dtype=np.int64).reshape(len(points), source.dim)
    return [tuple(int(i) for i in row) for row in _lines_of(P, arrays)]


def polar_space(source) -> PolarSpace:
    P, arrays = _points_array(source)
    return PolarSpace(source, P, _lines_of(P, arrays), arrays)


def _span_closure(space: PolarSpace, members: np.ndarray, new: int) -> np.ndarray:
    """Indices of the points in span(members + [new]) (all assumed in the space)."""
    F = space.ring
    tb = space._arrays
    P = space.points
    p = P[new]
    if len(members) == 0:
        return np.array([new], dtype=np.int64)
    lams = np.arange(1, F.order, dtype=np.int64)
    X = P[members]
    V = tb.add[tb.mul[X[:, None, :], lams[None, :, None]], p[None, None, :]].reshape(-1, P.shape[1])
    lead = V[np.arange(len(V)), (V != 0).argmax(axis=1)]
    V = tb.mul[tb.inv[lead][:, None], V]
    keys = K.point_keys(V, F.order)
    idx = np.searchsorted(space.keys, keys)
    return np.unique(np.concatenate((members, [new], idx)))


def polar_rank(space: PolarSpace) -> int:
    """Largest vector dimension of a totally singular subspace, by flag extension.

    Every totally singular subspace W has a flag built from points taken in
    increasing index order (p_k = least point of W outside span(p_1..p_{k-1})),
    so the search only extends by points of larger index that are orthogonal
    to everything chosen so far and not yet in the span.
    """
    N = space.num_points
    if N == 0:
        return 0
    orth = space.orth
    masks = [int.from_bytes(np.packbits(row[::-1].astype(np.uint8)).tobytes(), "big") >> (-N % 8) for row in orth]
    limit = space.dim
    best = 0

    def to_mask(idx):
        m = 0
        for i in idx.tolist():
            m |= 1 << i
        return m

    def dfs(members, span_mask, last, cand, depth):
        nonlocal best
        if depth > best:
            best = depth
        if best >= limit:
            return
        c = cand & ~span_mask & ~((1 << (last + 1)) - 1)
        if depth + bin(c).count("1") <= best:
            return
        while c:
            low = c & -c
            i = low.bit_length() - 1
            c ^= low
            span = _span_closure(space, members, i)
            dfs(span, to_mask(span), i, cand & masks[i], depth + 1)
            if best >= limit:
                return

    dfs(np.zeros(0, dtype=np.int64), 0, -1, (1 << N) - 1, 0)
    return best


def radical_of_q(q: GenPseudoQuadraticForm) -> tuple[list[tuple], int]:
    """(echelon basis of Rad(q), dimension of the image q(Rad f))."""
    F = q.ring
    _require_finite(F)
    rad_f = q.f.radical()
    r = len(rad_f)
    for u in rad_f:
        for v in rad_f:
            if q(linalg.vec_add(u, v)) != q(u) + q(v):
                raise AssertionError("q is not additive on Rad(f)")
    singular = []
    for coeffs in itertools.product(F.elements(), repeat=r):
        if not any(coeffs):
            continue
        v = tuple(F.zero for _ in range(q.dim))
        for u, c in zip(rad_f, coeffs):
            v = linalg.vec_add(v, linalg.vec_scale(u, c))
        if q.is_singular(v):
            singular.append(v)
    basis = linalg.span_basis(singular, F)[0] if singular else []
    return basis, r - len(basis)


def is_subspace(inner: PolarSpace, outer: PolarSpace) -> bool:
    if inner.ring is not outer.ring or inner.dim != outer.dim:
        raise AmbientMismatchError("polar spaces live in different projective spaces")
    outer_keys = set(outer.keys.tolist())
    inner_keys = set(inner.keys.tolist())
    if not inner_keys <= outer_keys:
        return False
    outer_lines = outer.line_sets()
    if not inner.line_sets() <= outer_lines:
        return False
    for line in outer_lines:
        meet = len(line & inner_keys)
        if meet > 1 and meet != len(line):
            return False
    return True


def spans_or_totally_singular(q) -> str:
    """'spans' if the singular points span PG(V), else 'totally-singular'."""
    space = polar_space(q)
    vecs = space.point_vectors()
    basis: list[tuple] = []
    for v in vecs:
        if linalg.rank(basis + [v], space.ring) > len(basis):
            basis.append(v)
            if len(basis) == q.dim:
                return "spans"
    if not space.orth.all():
        raise AssertionError("singular points neither span V nor form a totally singular set")
    return "totally-singular"


# ------------------------------------------------ membership for any ring


def is_singular_point(q: GenPseudoQuadraticForm, x) -> bool:
    return q.is_singular(as_vector(q.ring, x, q.dim))


def is_totally_singular_line(q: GenPseudoQuadraticForm, x, y) -> bool:
    x = as_vector(q.ring, x, q.dim)
    y = as_vector(q.ring, y, q.dim)
    return q.is_singular(x) and q.is_singular(y) and not q.f(x, y)
