"""Quotients by radical subspaces, covers, liftings and cover isomorphisms.

A cover extends V by a block S carrying the twisted action r o lam.  Given a
circ-basis s_1..s_k of S (every r in S is sum_j s_j o mu_j modulo
K_{sigma,eps}, with unique mu), the block is coordinatized by mu, and in
those coordinates the action is ordinary right multiplication.  The cover of
q therefore becomes an ordinary form on K^(n+k):

    q^{S,T}(x, mu) = g_E(x, x) + sum_j mu_j^sigma s_j mu_j   (mod T)

with Gram matrix G (+) 0.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import linalg
from .admissible import AdmissiblePair, ClosedSubgroup, CosetElement
from .errors import (
    NotDirectSumError,
    NotSingularError,
    QuotientNotDefinedError,
    TrivialFormError,
    UnsupportedError,
    VerificationFailedError,
)
from .forms import GenPseudoQuadraticForm, SingularBasis, as_vector, find_singular_basis, random_vector
from .scalars import FiniteField, FunctionField2, frobenius

# ------------------------------------------------------------ circ algebra


def circ_basis(S: ClosedSubgroup) -> list:
    """A minimal list of elements whose circ-closure is S (greedy over a B-basis)."""
    pair = S.pair
    chosen: list = []
    current = pair.zero_subgroup
    for b in S.basis_elements():
        if not current.contains(b):
            chosen.append(b)
            current = ClosedSubgroup.generated(pair, chosen)
        if current == S:
            break
    return chosen


def circ_combination(pair: AdmissiblePair, basis, mu):
    """sum_j s_j o mu_j as a ring element."""
    acc = pair.ring.zero
    for s, m in zip(basis, mu):
        if m:
            acc = acc + pair.circ(s, m)
    return acc


def circ_coordinates(pair: AdmissiblePair, basis, r) -> tuple:
    """mu with sum_j s_j o mu_j = r modulo K_{sigma,eps}.

    Raises VerificationFailedError when r is not in the circ-span.
    """
    ring = pair.ring
    r = ring(r)
    k = len(basis)
    if k == 0:
        if pair.in_lower(r):
            return ()
        raise VerificationFailedError(f"{ring.format(r)} is not in the zero subgroup")
    if isinstance(ring, FunctionField2):
        # s o mu = mu^2 s: solve over F_2(t^2) and take square roots
        m = pair.model
        lower_rows = list(pair.lower.rows)
        cols = [m.coords(s) for s in basis] + lower_rows
        c = linalg.coordinates(cols, m.coords(r), m.base)
        if c is None:
            raise VerificationFailedError(f"{ring.format(r)} is not in the circ-span")
        return tuple(ring.sqrt(ci) for ci in c[:k])
    if isinstance(ring, FiniteField):
        target = pair.canonical(r)
        for mu in itertools.product(ring.elements(), repeat=k):
            if pair.canonical(circ_combination(pair, basis, mu)) == target:
                return tuple(mu)
        raise VerificationFailedError(f"{ring.format(r)} is not in the circ-span")
    raise UnsupportedError(f"circ coordinates over {ring.spec()} are only available for the zero block")


def _extra_rows(S: ClosedSubgroup) -> list:
    lower = S.pair.lower
    return [row for row in S.span.rows if not lower.contains(row)]


def check_direct_sum(R: ClosedSubgroup, S: ClosedSubgroup, T: ClosedSubgroup) -> None:
    """Raise NotDirectSumError unless R = S (+) T."""
    pair = R.pair
    if S.pair != pair or T.pair != pair:
        raise NotDirectSumError("subgroups belong to different pairs")
    if not (S.issubset(R) and T.issubset(R)):
        raise NotDirectSumError("S or T is not contained in R")
    if S.rank + T.rank != R.rank:
        raise NotDirectSumError(f"ranks do not add up: {S.rank} + {T.rank} != {R.rank}")
    combined = pair.lower.extend(_extra_rows(S) + _extra_rows(T))
    if combined != R.span:
        raise NotDirectSumError("S + T does not exhaust R")


# --------------------------------------------------------------- quotients


@dataclass
class QuotientSpec:
    """q_U on V/U, with V/U coordinatized by the complement W of standard vectors."""

    q: GenPseudoQuadraticForm
    U: list
    pivots: list
    complement: list
    form: GenPseudoQuadraticForm

    def project(self, x) -> tuple:
        """pi_U(x) in the coordinates of the complement basis."""
        rest = list(self.q.vector(x))
        for u, p in zip(self.U, self.pivots):
            d = rest[p]
            if d:
                rest = [a - b * d for a, b in zip(rest, u)]
        return tuple(rest[c] for c in self.complement)

    def section(self, y) -> tuple:
        """The vector of span(W) projecting to y."""
        ring = self.q.ring
        v = [ring.zero] * self.q.dim
        for c, yi in zip(self.complement, y):
            v[c] = ring(yi)
        return tuple(v)


def _radical_check(q: GenPseudoQuadraticForm, U) -> None:
    n = q.dim
    ring = q.ring
    for k, u in enumerate(U):
        for j in range(n):
            if q.f(u, linalg.unit_vector(n, j, ring)):
                raise QuotientNotDefinedError(f"vector {k + 1} of U is not in Rad(f)")


def _echelon(q, U):
    ring = q.ring
    U = [as_vector(ring, u, q.dim) for u in U]
    U = [u for u in U if any(u)]
    rows, piv = linalg.rref(U, ring, "right") if U else ([], [])
    if len(rows) != len(U):
        raise QuotientNotDefinedError("the vectors spanning U are linearly dependent")
    return [tuple(r) for r in rows], piv


def admits_quotient(q: GenPseudoQuadraticForm, U) -> bool:
    try:
        _quotient_data(q, U)
    except QuotientNotDefinedError:
        return False
    return True


def _quotient_data(q, U):
    rows, piv = _echelon(q, U)
    _radical_check(q, rows)
    R = q.codefect
    if R.is_full and rows:
        raise QuotientNotDefinedError("every vector is singular when the codefect is full")
    # q restricted to U is circ-semilinear; U meets Rad(q) trivially iff the
    # values q(u) are circ-independent modulo R.
    pair = q.pair
    gens = list(R.basis_elements())
    current = R
    for k, u in enumerate(rows):
        val = q.raw(u)
        if current.contains(val):
            raise QuotientNotDefinedError(f"U contains a nonzero singular vector (basis vector {k + 1})")
        gens.append(val)
        current = ClosedSubgroup.generated(pair, gens)
    return rows, piv, current


def quotient_form(q: GenPseudoQuadraticForm, U) -> QuotientSpec:
    """The form q_U(x + U) = q(x) + R_U on V/U."""
    rows, piv, R_U = _quotient_data(q, U)
    complement = [c for c in range(q.dim) if c not in set(piv)]
    if not complement:
        raise QuotientNotDefinedError("U is the whole space")
    gram = [[q.gram[i][j] for j in complement] for i in complement]
    vals = [q.values[i] for i in complement]
    form = GenPseudoQuadraticForm(q.pair, gram, vals, R_U)
    return QuotientSpec(q, rows, piv, complement, form)


# ------------------------------------------------------------------ covers


@dataclass
class CoverSpec:
    """The cover q_E^{S,T} of q on K^(n+k); the last k coordinates are circ-coordinates of S."""

    q: GenPseudoQuadraticForm
    S: ClosedSubgroup
    T: ClosedSubgroup
    E: SingularBasis
    basis: list
    form: GenPseudoQuadraticForm
    _theta_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.q.dim

    @property
    def k(self) -> int:
        return len(self.basis)

    def theta(self, r):
        """Projection of r in R onto S along T (a ring element, canonical mod K_{sigma,eps})."""
        pair = self.q.pair
        r = pair.ring(r.rep if isinstance(r, CosetElement) else r)
        key = pair.canonical(r)
        hit = self._theta_cache.get(key)
        if hit is not None:
            return hit
        m = pair.model
        s_rows = _extra_rows(self.S)
        t_rows = _extra_rows(self.T)
        cols = s_rows + t_rows + list(pair.lower.rows)
        if not cols:
            if pair.in_lower(r):
                return pair.ring.zero
            raise VerificationFailedError(f"{pair.ring.format(r)} is not in R")
        c = linalg.coordinates(cols, m.coords(r), m.base)
        if c is None:
            raise VerificationFailedError(f"{pair.ring.format(r)} is not in R")
        B = m.base
        vec = [B.zero] * m.dim
        for ci, row in zip(c[: len(s_rows)], s_rows):
            vec = [a + ci * b for a, b in zip(vec, row)]
        out = pair.canonical(m.element(tuple(vec)))
        self._theta_cache[key] = out
        return out

    def block_vector(self, r) -> tuple:
        """Circ-coordinates of an element r of S."""
        return circ_coordinates(self.q.pair, self.basis, r)

    def block_element(self, v):
        """The element sum_j s_j o mu_j of S encoded by the last k coordinates of v."""
        return circ_combination(self.q.pair, self.basis, v[self.n :])

    def embed(self, x, r=None) -> tuple:
        """The vector x + r of V (+) S."""
        ring = self.q.ring
        x = self.q.vector(x)
        mu = self.block_vector(r) if r is not None else tuple(ring.zero for _ in range(self.k))
        return x + tuple(mu)

    def project(self, v) -> tuple:
        return tuple(v[: self.n])

    def lift_point(self, x) -> tuple:
        """x - theta(g_E(x,x)) for a q-singular x; singular for the cover."""
        x = self.q.vector(x)
        if not self.q.is_singular(x):
            raise NotSingularError("only singular vectors can be lifted")
        return self.embed(x, -self.theta(self.E.gamma(x)))

    def block_subspace(self) -> list:
        ring = self.q.ring
        N = self.n + self.k
        return [linalg.unit_vector(N, self.n + j, ring) for j in range(self.k)]


def cover_form(q: GenPseudoQuadraticForm, S: ClosedSubgroup, T: ClosedSubgroup, E=None, basis=None) -> CoverSpec:
    """q_E^{S,T} for R = S (+) T and a q-singular ordered basis E."""
    if q.is_trivial():
        raise TrivialFormError("covers of trivial forms are not constructed")
    check_direct_sum(q.codefect, S, T)
    if E is None:
        E = find_singular_basis(q)
    elif not isinstance(E, SingularBasis):
        E = SingularBasis(q, E)
    pair = q.pair
    if basis is None:
        basis = circ_basis(S)
    else:
        basis = [pair.canonical(pair.ring(b)) for b in basis]
        if ClosedSubgroup.generated(pair, basis) != S or len(basis) != len(circ_basis(S)):
            raise NotDirectSumError("the given block basis is not a circ-basis of S")
    ring = q.ring
    n, k = q.dim, len(basis)
    N = n + k
    gram = [[q.gram[i][j] if i < n and j < n else ring.zero for j in range(N)] for i in range(N)]
    values = list(E.diagonal_values()) + list(basis)
    form = GenPseudoQuadraticForm(pair, gram, values, T)
    return CoverSpec(q, S, T, E, list(basis), form)


def dominant_cover(q: GenPseudoQuadraticForm, E=None) -> CoverSpec:
    """The cover q^{R,0}; pseudo-quadratic with defect Rad(f) (+) R."""
    spec = cover_form(q, q.codefect, q.pair.zero_subgroup, E)
    assert spec.form.codefect.is_zero
    return spec


def lift_point(spec: CoverSpec, x) -> tuple:
    return spec.lift_point(x)


def basis_change_iso(spec: CoverSpec, E2) -> list[list]:
    """Matrix of Delta with q_E^{S,T}(v) = q_{E'}^{S,T}(Delta v).

    Delta(x, mu) = (x, mu + C x), C[j][k] = sum_i c_ij Ainv[i][k] where c_i are
    the circ-coordinates of theta(-g_{E'}(e_i, e_i)).
    """
    q = spec.q
    if not isinstance(E2, SingularBasis):
        E2 = SingularBasis(q, E2)
    ring = q.ring
    n, k = spec.n, spec.k
    Ainv = spec.E.inv
    coeffs = [spec.block_vector(spec.theta(-E2.gamma(e))) for e in spec.E.vectors]
    N = n + k
    D = linalg.identity(N, ring)
    for j in range(k):
        for kk in range(n):
            acc = ring.zero
            for i in range(n):
                c = coeffs[i][j]
                if c and Ainv[i][kk]:
                    acc = acc + c * Ainv[i][kk]
            D[n + j][kk] = acc
    return D


def cover_with_basis(spec: CoverSpec, E2) -> CoverSpec:
    return cover_form(spec.q, spec.S, spec.T, E2, spec.basis)


def complement_iso(spec1: CoverSpec, spec2: CoverSpec) -> list[list]:
    """Isomorphism q^{S,T} -> q^{S',T} for two complements of the same T (same E)."""
    if spec1.T != spec2.T or spec1.q != spec2.q or spec1.E != spec2.E:
        raise NotDirectSumError("covers differ in more than the complement S")
    q = spec1.q
    ring = q.ring
    n, k = spec1.n, spec1.k
    other = CoverSpec(q, spec2.S, spec2.T, spec1.E, spec2.basis, spec2.form)
    N = n + k
    D = linalg.identity(N, ring)
    for j, s in enumerate(spec1.basis):
        c = other.block_vector(other.theta(s))
        for l in range(k):
            D[n + l][n + j] = c[l]
    return D


# ---------------------------------------------------- reconstruction


@dataclass
class Reconstruction:
    """alpha: V -> V/U (+) S with q(v) = cover(alpha(v)) mod the codefect of q."""

    quotient: QuotientSpec
    cover: CoverSpec
    alpha: list


def reconstruct_cover(
    qt: GenPseudoQuadraticForm, U, hints=(), rng: random.Random | None = None, samples: int = 50
) -> Reconstruction:
    """Express qt as a cover of its quotient by U.

    S is the circ-closure of q(U) and T the codefect of qt.  The complement of U
    is spanned by lifts w_i of a singular basis of V/U adjusted by vectors of U
    so that q(w_i) lies in T; alpha sends w_i to e_i and u_b to the b-th block
    vector.  ``hints`` are singular vectors of V/U (complement coordinates)
    used to start the singular basis there; over infinite fields one may be
    needed when no standard vector is singular.
    """
    if qt.codefect.is_full:
        raise QuotientNotDefinedError("the codefect must lie in K-bar-circ")
    quot = quotient_form(qt, U)
    qbar = quot.form
    if qbar.is_trivial():
        raise TrivialFormError("the quotient form is trivial, no cover of it exists")
    pair = qt.pair
    ring = qt.ring
    Urows = quot.U
    s_basis = [pair.canonical(qt.raw(u)) for u in Urows]
    S = ClosedSubgroup.generated(pair, s_basis) if s_basis else pair.zero_subgroup
    T = qt.codefect
    Ebar = find_singular_basis(qbar, hints)
    spec = cover_form(qbar, S, T, Ebar, s_basis)
    W = []
    for e in Ebar.vectors:
        w = quot.section(e)
        mu = spec.block_vector(spec.theta(qt.raw(w)))
        for u, m in zip(Urows, mu):
            if m:
                w = linalg.vec_sub(w, linalg.vec_scale(u, m))
        if not T.contains(qt.raw(w)):
            raise VerificationFailedError("could not adjust a lifted basis vector into T")
        W.append(w)
    n1, k = qbar.dim, len(Urows)
    N = n1 + k
    # alpha maps the basis (W, U) to (Ebar, block units); alpha = Img * Src^-1
    src = W + Urows
    img = [tuple(Ebar.vectors[i]) + tuple(ring.zero for _ in range(k)) for i in range(n1)]
    img += [linalg.unit_vector(N, n1 + b, ring) for b in range(k)]
    Sinv = linalg.inverse(linalg.columns(src), ring)
    alpha = linalg.mat_mul(linalg.columns(img), Sinv)
    rec = Reconstruction(quot, spec, alpha)
    rng = rng or random.Random(0)
    for _ in range(samples):
        v = random_vector(ring, qt.dim, rng)
        a = linalg.mat_vec(alpha, v)
        if qt(v) != spec.form(a):
            raise VerificationFailedError(f"reconstruction fails at {v}")
    return rec


# --------------------------------------------------- weak isomorphism


def weak_cover_automorphism(q: GenPseudoQuadraticForm, T1: ClosedSubgroup, T2: ClosedSubgroup):
    """A Frobenius power rho fixing the pair with rho(T1) = T2 (finite fields only)."""
    ring = q.ring
    if not isinstance(ring, FiniteField):
        raise UnsupportedError("weak isomorphisms of covers need an explicit field automorphism")
    pair = q.pair
    for k in range(ring.n):
        rho = frobenius(k)
        if rho.apply(pair.eps) != pair.eps:
            continue
        image = ClosedSubgroup.generated(pair, [rho.apply(g) for g in T1.basis_elements()])
        if T1.is_full:
            image = pair.full_subgroup
        if image == T2:
            return rho
    return None
