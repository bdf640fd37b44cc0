"""Recover forms from embedded polar spaces over finite fields, classify and build hulls.

Pipeline: validate the point/line data as a non-degenerate polar space, solve
for the reflexive sesquilinear form f that vanishes exactly on collinear
pairs, build gamma_E from a basis of geometry points, let R be the closed
subgroup generated by the values of gamma_E on points, and then either the
points are the singular points of q = gamma_E + R or (R full) f is
alternating and the points are all of its isotropic points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from . import linalg
from .admissible import AdmissiblePair, ClosedSubgroup, validate_pair
from .errors import (
    AmbiguousFormError,
    GPQError,
    GridGeometryError,
    InvalidGeometryError,
    NoFormFoundError,
    NotAdmissibleError,
    NotReflexiveError,
    NotTraceValuedError,
    VerificationFailedError,
)
from .forms import GenPseudoQuadraticForm, SesquilinearForm, SingularBasis, scale_form
from .polar import PolarSpace, polar_space
from .quotcov import CoverSpec, dominant_cover
from .scalars import IDENTITY, FiniteField, frobenius

# ---------------------------------------------------------------- geometry


class EmbeddedGeometry:
    """Points of PG(n-1, q) (normalized, sorted) and lines as sorted index tuples."""

    def __init__(self, ring: FiniteField, dim: int, points: np.ndarray, lines):
        self.ring = ring
        self.dim = dim
        self.points = np.asarray(points, dtype=np.int64).reshape(-1, dim)
        self.lines = [tuple(sorted(int(i) for i in L)) for L in lines]
        self.keys = K.point_keys(self.points, ring.order)

    @classmethod
    def from_vectors(cls, ring: FiniteField, dim: int, vectors, lines) -> EmbeddedGeometry:
        """Build from arbitrary representatives; ``lines`` index into ``vectors``."""
        rows = []
        for k, v in enumerate(vectors):
            v = [ring(c) for c in v]
            if len(v) != dim:
                raise InvalidGeometryError(f"point {k} has {len(v)} coordinates, expected {dim}")
            lead = next((c for c in v if c), None)
            if lead is None:
                raise InvalidGeometryError(f"point {k} is the zero vector")
            inv = ring.one / lead
            rows.append([(inv * c).code for c in v])
        P = np.array(rows, dtype=np.int64).reshape(-1, dim)
        keys = K.point_keys(P, ring.order)
        order = np.argsort(keys, kind="stable")
        if len(np.unique(keys)) != len(keys):
            raise InvalidGeometryError("a point is listed twice")
        new_index = np.empty(len(order), dtype=np.int64)
        new_index[order] = np.arange(len(order))
        mapped = []
        for L in lines:
            L = list(L)
            if any(i < 0 or i >= len(P) for i in L):
                raise InvalidGeometryError(f"line {L} refers to a missing point")
            mapped.append([int(new_index[i]) for i in L])
        return cls(ring, dim, P[order], mapped)

    @classmethod
    def from_polar_space(cls, space: PolarSpace) -> EmbeddedGeometry:
        return cls(space.ring, space.dim, space.points, [tuple(row) for row in space.lines.tolist()])

    @property
    def num_points(self) -> int:
        return len(self.points)

    def vectors(self) -> list[tuple]:
        F = self.ring
        return [tuple(F.from_code(int(c)) for c in row) for row in self.points]

    def collinearity(self) -> np.ndarray:
        N = self.num_points
        C = np.eye(N, dtype=bool)
        for L in self.lines:
            idx = np.array(L)
            C[np.ix_(idx, idx)] = True
        return C

    def line_sets(self) -> set[frozenset]:
        return {frozenset(int(self.keys[i]) for i in L) for L in self.lines}

    def key_set(self) -> set[int]:
        return set(self.keys.tolist())


def _tables(F: FiniteField):
    t = F.tables()
    return t["add"], t["mul"], t["inv"]


def _line_keys(geom: EmbeddedGeometry, a: int, b: int) -> set[int]:
    F = geom.ring
    add, mul, inv = _tables(F)
    x, y = geom.points[a], geom.points[b]
    out = {int(geom.keys[a])}
    for lam in range(F.order):
        v = add[mul[x, lam], y]
        lead = v[np.nonzero(v)[0][0]]
        v = mul[inv[lead], v]
        out.add(int(K.point_keys(v[None, :], F.order)[0]))
    return out


def validate_geometry(geom: EmbeddedGeometry) -> None:
    """Fail fast with the violated axiom named."""
    F = geom.ring
    q = F.order
    N = geom.num_points
    if N == 0:
        raise InvalidGeometryError("no points", axiom="non-empty")
    seen = set()
    for L in geom.lines:
        if len(set(L)) != q + 1 or len(L) != q + 1:
            raise InvalidGeometryError(f"line {list(L)} does not have {q + 1} distinct points", axiom="full lines")
        if L in seen:
            raise InvalidGeometryError(f"line {list(L)} is listed twice", axiom="full lines")
        seen.add(L)
        if _line_keys(geom, L[0], L[1]) != {int(geom.keys[i]) for i in L}:
            raise InvalidGeometryError(f"line {list(L)} is not a projective line", axiom="full lines")
    vecs = geom.vectors()
    basis: list[tuple] = []
    for v in vecs:
        if linalg.rank(basis + [v], F) > len(basis):
            basis.append(v)
            if len(basis) == geom.dim:
                break
    if len(basis) < geom.dim:
        raise InvalidGeometryError("points do not span the ambient space", axiom="spanning")
    if not geom.lines:
        raise InvalidGeometryError("no lines: rank 1 geometries are not supported", axiom="rank >= 2")
    C = geom.collinearity()
    Larr = np.array(geom.lines, dtype=np.int64)
    counts = C[:, Larr].sum(axis=2)
    bad = np.argwhere((counts != 1) & (counts != q + 1))
    if len(bad):
        p, L = bad[0]
        raise InvalidGeometryError(
            f"point {int(p)} is collinear with {int(counts[p, L])} points of line {list(geom.lines[L])}",
            axiom="one-or-all",
        )
    rad = np.nonzero(C.all(axis=1))[0]
    if len(rad):
        raise InvalidGeometryError(f"point {int(rad[0])} is collinear with every point", axiom="non-degenerate")
    per_point = np.bincount(Larr.ravel(), minlength=N)
    if np.all(per_point == 2) and q > 4:
        raise GridGeometryError("the geometry is a grid over a field with more than 4 elements", axiom="not a grid")


# ------------------------------------------------------------ form recovery


def _mul_matrices(F: FiniteField) -> np.ndarray:
    """MUL[c] is the F_p-matrix of t -> c t in the digit basis."""
    _, mul, _ = _tables(F)
    m = F.n
    basis_codes = np.array([F.p**b for b in range(m)], dtype=np.int64)
    digits = F._digits
    prod = mul[:, basis_codes]  # q x m codes of c * basis_b
    return np.transpose(digits[prod], (0, 2, 1)).copy()  # q x m(row digit) x m(col b)


def _sigma_matrix(F: FiniteField, sig: np.ndarray) -> np.ndarray:
    m = F.n
    basis_codes = np.array([F.p**b for b in range(m)], dtype=np.int64)
    return F._digits[sig[basis_codes]].T.copy()


def _sigma_table(F: FiniteField, pair: AdmissiblePair) -> np.ndarray:
    return np.array([pair.sigma_apply(F.from_code(c)).code for c in range(F.order)], dtype=np.int64)


def _gram_system(geom: EmbeddedGeometry, pair: AdmissiblePair) -> np.ndarray:
    F = geom.ring
    p, m, n = F.p, F.n, geom.dim
    add, mul, _ = _tables(F)
    sig = _sigma_table(F, pair)
    MUL = _mul_matrices(F)
    P = geom.points
    pairs = [(a, a) for a in range(geom.num_points)]
    for L in geom.lines:
        for i in range(len(L)):
            for j in range(i + 1, len(L)):
                pairs.append((L[i], L[j]))
    pa = np.array(pairs, dtype=np.int64)
    X = sig[P[pa[:, 0]]]  # x^sigma
    Y = P[pa[:, 1]]
    coeff = mul[X[:, :, None], Y[:, None, :]]  # (npairs, n, n)
    blocks = MUL[coeff]  # (npairs, n, n, m, m)
    lin = np.transpose(blocks, (0, 3, 1, 2, 4)).reshape(len(pa) * m, n * n * m)
    # reflexivity: G_ji - eps sigma(G_ij) = 0
    S = _sigma_matrix(F, sig)
    EPS = MUL[pair.eps.code] @ S % p
    refl = np.zeros((n * n * m, n * n * m), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            r0 = (i * n + j) * m
            cji = (j * n + i) * m
            cij = (i * n + j) * m
            refl[r0 : r0 + m, cji : cji + m] += np.eye(m, dtype=np.int64)
            refl[r0 : r0 + m, cij : cij + m] -= EPS
    A = np.concatenate((lin, refl % p), axis=0)
    # drop duplicate equations before elimination
    return np.unique(A % p, axis=0)


def _candidate_pairs(F: FiniteField):
    for k in range(F.n):
        sigma = IDENTITY if k == 0 else frobenius(k)
        for c in range(1, F.order):
            try:
                yield k, validate_pair(F, sigma, F.from_code(c))
            except NotAdmissibleError:
                continue


@dataclass
class RecoveredForm:
    f: SesquilinearForm
    sigma_power: int
    solution_dim: int


def _fixed_field(F: FiniteField, pair: AdmissiblePair) -> list:
    return [x for x in F.nonzero_elements() if pair.sigma_apply(x) == x]


def _orthogonal_iff_collinear(geom: EmbeddedGeometry, f: SesquilinearForm, C: np.ndarray) -> bool:
    F = geom.ring
    add, mul, _ = _tables(F)
    sig = _sigma_table(F, f.pair)
    G = np.array([[c.code for c in row] for row in f.gram], dtype=np.int64)
    Z = K.sesq_values(geom.points, geom.points, G, sig, mul, add) == 0
    return bool(np.array_equal(Z, C))


def recover_sesquilinear(geom: EmbeddedGeometry, *, validate: bool = True) -> RecoveredForm:
    """The reflexive form vanishing exactly on collinear pairs, up to proportionality.

    Candidates (sigma-power ascending, eps ascending by code) are tried in
    order; the first whose solution space is a single proportionality class
    and for which orthogonality of points matches collinearity is returned, normalized to the lexicographically
    least Gram matrix in its class.
    """
    if validate:
        validate_geometry(geom)
    F = geom.ring
    n, m, p = geom.dim, F.n, F.p
    C = geom.collinearity()
    for k, pair in _candidate_pairs(F):
        A = _gram_system(geom, pair)
        sol = K.nullspace_mod_p(A, p, n * n * m)
        if len(sol) == 0:
            continue
        expected = math.gcd(k, m) if k else m
        if len(sol) != expected:
            raise AmbiguousFormError(
                f"{pair.spec()}: solution space has F_{p}-dimension {len(sol)}, expected {expected}",
                pair=pair.spec(),
                dimension=len(sol),
            )
        weights = np.array([p**d for d in range(m)], dtype=np.int64)
        codes = (sol[0].reshape(n * n, m) @ weights).reshape(n, n)
        G0 = [[F.from_code(int(c)) for c in row] for row in codes]
        best = None
        for kappa in _fixed_field(F, pair):
            cand = tuple(tuple((kappa * c).code for c in row) for row in G0)
            if best is None or cand < best:
                best = cand
        f = SesquilinearForm(pair, [[F.from_code(c) for c in row] for row in best])
        if not f.is_reflexive():
            raise NotReflexiveError("recovered Gram matrix is not reflexive")
        if _orthogonal_iff_collinear(geom, f, C):
            return RecoveredForm(f, k, len(sol))
    raise NoFormFoundError("no reflexive form vanishes exactly on the collinear pairs")


# ----------------------------------------------------------- gamma and R


def greedy_basis(geom: EmbeddedGeometry, order=None) -> list[int]:
    """Indices of the leftmost independent points (in the given scan order)."""
    F = geom.ring
    vecs = geom.vectors()
    chosen: list[int] = []
    basis: list[tuple] = []
    for i in order if order is not None else range(geom.num_points):
        v = vecs[i]
        if linalg.rank(basis + [v], F) > len(basis):
            basis.append(v)
            chosen.append(i)
            if len(basis) == geom.dim:
                break
    return chosen


@dataclass
class GammaData:
    basis_indices: list
    basis: SingularBasis
    gammas: list
    R: ClosedSubgroup
    q: GenPseudoQuadraticForm


def build_gamma_and_R(geom: EmbeddedGeometry, f: SesquilinearForm, basis_indices=None) -> GammaData:
    pair = f.pair
    if basis_indices is None:
        basis_indices = greedy_basis(geom)
    vecs = geom.vectors()
    full = GenPseudoQuadraticForm(pair, f.gram, [pair.ring.zero] * geom.dim, pair.full_subgroup)
    E = SingularBasis(full, [vecs[i] for i in basis_indices])
    gammas = [E.gamma(v) for v in vecs]
    R = ClosedSubgroup.generated(pair, gammas)
    values = E.diagonal_values()
    try:
        q = GenPseudoQuadraticForm(pair, f.gram, values, R)
    except (NotTraceValuedError, NotReflexiveError) as exc:
        raise NoFormFoundError(f"recovered form is unusable: {exc}") from exc
    return GammaData(list(basis_indices), E, gammas, R, q)


# ------------------------------------------------------------ classification


GPQ = "generalized-pseudo-quadratic"
ALTERNATING = "alternating"


@dataclass
class ClassificationResult:
    verdict: str
    geometry: EmbeddedGeometry
    recovered: RecoveredForm
    gamma: GammaData
    details: dict = field(default_factory=dict)

    @property
    def f(self) -> SesquilinearForm:
        return self.recovered.f

    @property
    def q(self) -> GenPseudoQuadraticForm:
        return self.gamma.q

    @property
    def R(self) -> ClosedSubgroup:
        return self.gamma.R


def _compare(geom: EmbeddedGeometry, space: PolarSpace, what: str) -> None:
    gk = geom.key_set()
    sk = set(space.keys.tolist())
    if gk != sk:
        extra = sorted(sk - gk)
        missing = sorted(gk - sk)
        first = (extra or missing)[0]
        raise VerificationFailedError(
            f"geometry points differ from the points of {what} (first offending key {first})",
            offending=int(first),
        )
    if geom.line_sets() != space.line_sets():
        raise VerificationFailedError(f"geometry lines differ from the lines of {what}")


def classify(geom: EmbeddedGeometry) -> ClassificationResult:
    validate_geometry(geom)
    rec = recover_sesquilinear(geom, validate=False)
    gamma = build_gamma_and_R(geom, rec.f)
    vecs = geom.vectors()
    rad = rec.f.radical()
    if rad:
        for v in vecs:
            if linalg.rank(rad + [v], geom.ring) == len(rad):
                raise VerificationFailedError(f"point {v} lies in the radical of f")
    if not gamma.R.is_full:
        _compare(geom, polar_space(gamma.q), "S_q")
        verdict = GPQ
    else:
        if not rec.f.is_alternating():
            raise VerificationFailedError("R is full but the recovered form is not alternating")
        _compare(geom, polar_space(rec.f), "S_f")
        verdict = ALTERNATING
    return ClassificationResult(verdict, geom, rec, gamma)


# ---------------------------------------------------------------------- hull


@dataclass
class HullResult:
    """A dominant form (or f itself) with the lifting of geometry points."""

    branch: str
    form: object
    dim: int
    source: ClassificationResult
    cover: CoverSpec | None = None

    def lift(self, x) -> tuple:
        res = self.source
        F = res.geometry.ring
        x = tuple(F(c) for c in x)
        if self.branch == "identity":
            return x
        if self.branch == "dominant-cover":
            return self.cover.lift_point(x)
        g = res.gamma.basis.gamma(x)
        return x + (F.sqrt(g),)

    def project(self, v) -> tuple:
        return tuple(v[: self.source.geometry.dim])


def hull(result: ClassificationResult) -> HullResult:
    q, R, f = result.q, result.R, result.f
    n = result.geometry.dim
    if result.verdict == GPQ:
        if R.is_zero:
            return HullResult("identity", q, n, result)
        spec = dominant_cover(q, result.gamma.basis)
        return HullResult("dominant-cover", spec.form, spec.form.dim, result, spec)
    F = result.geometry.ring
    if F.p != 2:
        return HullResult("identity", f, n, result)
    pair = f.pair
    N = n + 1
    gram = [[f.gram[i][j] if i < n and j < n else F.zero for j in range(N)] for i in range(N)]
    values = list(result.gamma.basis.diagonal_values()) + [F.one]
    qt = GenPseudoQuadraticForm(pair, gram, values, pair.zero_subgroup)
    return HullResult("char2-extension", qt, N, result)


def verify_hull(h: HullResult) -> PolarSpace:
    """Check that projection maps the hull's polar space bijectively onto the geometry."""
    space = polar_space(h.form)
    geom = h.source.geometry
    n = geom.dim
    F = geom.ring
    if space.num_points != geom.num_points:
        raise VerificationFailedError(f"hull has {space.num_points} points, geometry has {geom.num_points}")
    P = space.points[:, :n]
    if np.any(~P.any(axis=1)):
        raise VerificationFailedError("a hull point projects to zero")
    add, mul, inv = _tables(F)
    lead = P[np.arange(len(P)), (P != 0).argmax(axis=1)]
    Pn = mul[inv[lead][:, None], P]
    keys = K.point_keys(Pn, F.order)
    if set(keys.tolist()) != geom.key_set() or len(set(keys.tolist())) != len(keys):
        raise VerificationFailedError("projection of hull points is not a bijection onto the geometry")
    proj_lines = {frozenset(int(keys[i]) for i in row) for row in space.lines.tolist()}
    if proj_lines != geom.line_sets():
        raise VerificationFailedError("projection of hull lines does not match the geometry lines")
    for v in geom.vectors():
        w = h.lift(v)
        if isinstance(h.form, GenPseudoQuadraticForm):
            ok = h.form.is_singular(w)
        else:
            ok = not h.form(w, w)
        if not ok:
            raise VerificationFailedError(f"lift of {v} is not singular")
    return space


# ------------------------------------------------------------ proportionality


def proportional_test(q1: GenPseudoQuadraticForm, q2: GenPseudoQuadraticForm):
    """kappa with scale_form(kappa, q1) == q2, or None."""
    if q1.ring is not q2.ring or q1.dim != q2.dim:
        return None
    ring = q1.ring
    kappa = None
    for r1, r2 in zip(q1.gram, q2.gram):
        for a, b in zip(r1, r2):
            if a:
                kappa = b / a if b else None
                break
            if b:
                return None
        if kappa is not None or any(r1):
            break
    candidates = [kappa] if kappa is not None else []
    if kappa is None:
        if isinstance(ring, FiniteField):
            candidates = ring.nonzero_elements()
        else:
            for a, b in zip(q1.values, q2.values):
                if a and b:
                    candidates = [b / a]
                    break
    for k in candidates:
        try:
            scaled = scale_form(k, q1)
        except GPQError:
            continue
        if scaled.pair == q2.pair and scaled.codefect == q2.codefect and scaled.gram == q2.gram and scaled.values == q2.values:
            return k
    return None
