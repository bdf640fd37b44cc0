"""Reflexive sesquilinear forms and generalized pseudo-quadratic forms.

Vectors are tuples of ring elements in a fixed ordered basis; scalars act on
the right.  A generalized pseudo-quadratic form is stored as

* the Gram matrix G of its sesquilinearization f,
* basis values g_i (representatives of q(e_i) modulo the codefect),
* the codefect R (a :class:`ClosedSubgroup`),

and evaluated through the facilitating formula
``q(x) = sum_{i<j} x_i^s G_ij x_j + sum_i x_i^s g_i x_i  (mod R)``.
"""

from __future__ import annotations

import itertools
import random

from . import linalg
from .admissible import AdmissiblePair, ClosedSubgroup, CosetElement, scale_pair
from .errors import (
    DegreeOverflowError,
    DimensionMismatchError,
    FullCodefectError,
    IncompatibleAutomorphismError,
    NotReflexiveError,
    NotSingularError,
    NotSpanningError,
    NotTraceValuedError,
    Q2ViolationError,
    UnsupportedError,
    VerificationFailedError,
    ZeroScalarError,
)
from .scalars import AntiAutomorphism, FiniteField


def as_vector(ring, x, n: int | None = None) -> tuple:
    if all(getattr(c, "ring", None) is ring for c in x):
        v = tuple(x)
    else:
        v = tuple(ring(c) for c in x)
    if n is not None and len(v) != n:
        raise DimensionMismatchError(f"expected a vector of length {n}, got {len(v)}")
    return v


def random_vector(ring, n: int, rng: random.Random, **kw) -> tuple:
    return tuple(ring.random_element(rng, **kw) for _ in range(n))


def _coerce_matrix(ring, gram):
    G = tuple(tuple(ring(c) for c in row) for row in gram)
    n = len(G)
    if n < 1 or any(len(row) != n for row in G):
        raise DimensionMismatchError("Gram matrix must be square and non-empty")
    return G


def sigma_inverse(pair: AdmissiblePair, t):
    """Preimage of t under sigma."""
    s = pair.sigma
    if s.kind == "frobenius":
        n = pair.ring.n
        return pair.ring.frobenius(t, n - s.power)
    return s.apply(t)


class SesquilinearForm:
    """A (sigma, eps)-sesquilinear form given by its Gram matrix."""

    __slots__ = ("pair", "gram", "dim")

    def __init__(self, pair: AdmissiblePair, gram):
        self.pair = pair
        self.gram = _coerce_matrix(pair.ring, gram)
        self.dim = len(self.gram)

    @property
    def ring(self):
        return self.pair.ring

    def vector(self, x) -> tuple:
        return as_vector(self.ring, x, self.dim)

    def __call__(self, x, y):
        """f(x, y) = sum_ij x_i^sigma G_ij y_j."""
        x = as_vector(self.ring, x, self.dim)
        y = as_vector(self.ring, y, self.dim)
        sig = self.pair.sigma_apply
        acc = self.ring.zero
        for xi, row in zip(x, self.gram):
            if not xi:
                continue
            inner = self.ring.zero
            for g, yj in zip(row, y):
                if g and yj:
                    inner = inner + g * yj
            if inner:
                acc = acc + sig(xi) * inner
        return acc

    def is_reflexive(self) -> bool:
        return self.first_non_reflexive() is None

    def first_non_reflexive(self):
        sig, eps = self.pair.sigma_apply, self.pair.eps
        G = self.gram
        for i in range(self.dim):
            for j in range(i, self.dim):
                if G[j][i] != sig(G[i][j]) * eps:
                    return (i, j)
        return None

    def is_trace_valued(self) -> bool:
        # Off-diagonal contributions x_i^s G_ij x_j + (x_i^s G_ij x_j)^s eps always
        # lie in K_{s,-eps}; a diagonal term x^s G_ii x does whenever G_ii does
        # (K_{s,-eps} is o-stable).  So the diagonal test is exact.
        return self.first_non_trace_entry() is None

    def first_non_trace_entry(self):
        neg = self.pair.negated()
        for i in range(self.dim):
            if not neg.in_lower(self.gram[i][i]):
                return i
        return None

    def is_alternating(self) -> bool:
        return all(not self.gram[i][i] for i in range(self.dim))

    def is_zero(self) -> bool:
        return all(not c for row in self.gram for c in row)

    def radical(self) -> list[tuple]:
        """Echelonized basis of {y : f(x, y) = 0 for all x}."""
        null = linalg.nullspace(self.gram, self.ring)
        return linalg.span_basis(null, self.ring)[0]

    def scaled(self, kappa) -> SesquilinearForm:
        ring = self.ring
        kappa = ring(kappa)
        if not kappa:
            raise ZeroScalarError("kappa must be nonzero")
        pair = scale_pair(kappa, self.pair)
        return SesquilinearForm(pair, [[kappa * c for c in row] for row in self.gram])

    def __eq__(self, other):
        if not isinstance(other, SesquilinearForm):
            return NotImplemented
        return self.pair == other.pair and self.gram == other.gram

    def __hash__(self):
        return hash((self.pair, self.gram))

    def __repr__(self):
        fmt = self.ring.format
        rows = "; ".join(", ".join(fmt(c) for c in row) for row in self.gram)
        return f"SesquilinearForm({self.pair.spec()}, [{rows}])"


def eval_f(f: SesquilinearForm, x, y):
    return f(x, y)


def check_reflexive(f: SesquilinearForm) -> bool:
    return f.is_reflexive()


def radical(f: SesquilinearForm) -> list[tuple]:
    return f.radical()


def is_trace_valued(f: SesquilinearForm) -> bool:
    return f.is_trace_valued()


class GenPseudoQuadraticForm:
    """A generalized (sigma, eps)-quadratic form q: V -> K/R."""

    __slots__ = ("pair", "gram", "values", "codefect", "dim", "f", "_upper")

    def __init__(self, pair: AdmissiblePair, gram, values, codefect: ClosedSubgroup | None = None, *, validate=True):
        ring = pair.ring
        self.pair = pair
        self.gram = _coerce_matrix(ring, gram)
        self.dim = len(self.gram)
        if codefect is None:
            codefect = pair.zero_subgroup
        if codefect.pair != pair:
            raise DimensionMismatchError("codefect belongs to a different pair")
        self.codefect = codefect
        vals = [ring(v.rep if isinstance(v, CosetElement) else v) for v in values]
        if len(vals) != self.dim:
            raise DimensionMismatchError(f"expected {self.dim} basis values, got {len(vals)}")
        self.values = tuple(codefect.reduce(v) for v in vals)
        self.f = SesquilinearForm(pair, self.gram)
        self._upper = [[self.gram[i][j] for j in range(self.dim)] for i in range(self.dim)]
        if validate:
            self.validate()

    def validate(self) -> None:
        bad = self.f.first_non_reflexive()
        if bad is not None:
            i, j = bad
            raise NotReflexiveError(f"Gram entry ({i + 1},{j + 1}) violates G_ji = G_ij^sigma eps", entry=(i + 1, j + 1))
        bad = self.f.first_non_trace_entry()
        if bad is not None:
            raise NotTraceValuedError(
                f"diagonal entry {bad + 1} is not in K_(sigma,-eps): f is not trace-valued", entry=bad + 1
            )
        R = self.codefect
        if R.is_full:
            return
        for g in R.generators:
            if not self.pair.in_upper(g):
                raise Q2ViolationError(f"codefect generator {g} is outside K^(sigma,eps)")
        sig, eps = self.pair.sigma_apply, self.pair.eps
        for i, g in enumerate(self.values):
            if self.gram[i][i] != g + sig(g) * eps:
                raise Q2ViolationError(
                    f"G_{i + 1}{i + 1} != g_{i + 1} + g_{i + 1}^sigma eps: values and Gram disagree",
                    entry=i + 1,
                )

    @property
    def ring(self):
        return self.pair.ring

    def vector(self, x) -> tuple:
        return as_vector(self.ring, x, self.dim)

    def raw(self, x):
        """sum_{i<j} x_i^s G_ij x_j + sum_i x_i^s g_i x_i, before reduction."""
        ring = self.ring
        x = as_vector(ring, x, self.dim)
        sig = self.pair.sigma_apply
        acc = ring.zero
        G = self.gram
        n = self.dim
        for i in range(n):
            xi = x[i]
            if not xi:
                continue
            inner = self.values[i] * xi if self.values[i] else ring.zero
            row = G[i]
            for j in range(i + 1, n):
                g = row[j]
                if g and x[j]:
                    inner = inner + g * x[j]
            if inner:
                acc = acc + sig(xi) * inner
        return acc

    def __call__(self, x) -> CosetElement:
        return CosetElement(self.codefect, self.raw(x))

    def is_singular(self, x) -> bool:
        singular = self.codefect.contains(self.raw(x))
        if __debug__ and singular and not self.codefect.is_full:
            assert not self.f(x, x), "singular vector with f(x,x) != 0"
        return singular

    def is_trivial(self) -> bool:
        if self.codefect.is_full:
            return True
        return self.f.is_zero() and all(self.codefect.contains(g) for g in self.values)

    def coset(self, t) -> CosetElement:
        return CosetElement(self.codefect, t)

    def sesquilinearization(self, rng: random.Random | None = None, samples: int = 25) -> SesquilinearForm:
        if self.codefect.is_full:
            raise FullCodefectError("every trace-valued form is a sesquilinearization when R is full")
        rng = rng or random.Random(0)
        for _ in range(samples):
            x = random_vector(self.ring, self.dim, rng)
            y = random_vector(self.ring, self.dim, rng)
            lhs = self(linalg.vec_add(x, y)) - self(x) - self(y)
            if lhs != self.coset(self.f(x, y)):
                raise Q2ViolationError(f"q(x + y) - q(x) - q(y) != f(x, y) at x={x}, y={y}")
        return self.f

    def scaled(self, kappa) -> GenPseudoQuadraticForm:
        return scale_form(kappa, self)

    def with_codefect(self, codefect: ClosedSubgroup) -> GenPseudoQuadraticForm:
        return GenPseudoQuadraticForm(self.pair, self.gram, self.values, codefect)

    def __eq__(self, other):
        if not isinstance(other, GenPseudoQuadraticForm):
            return NotImplemented
        return (
            self.pair == other.pair
            and self.gram == other.gram
            and self.codefect == other.codefect
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.pair, self.gram, self.values))

    def __repr__(self):
        fmt = self.ring.format
        vals = ", ".join(fmt(v) for v in self.values)
        return f"GenPseudoQuadraticForm(dim={self.dim}, {self.pair.spec()}, values=[{vals}], {self.codefect.spec()})"


def eval_q(q: GenPseudoQuadraticForm, x) -> CosetElement:
    return q(x)


def sesquilinearization(q: GenPseudoQuadraticForm, rng=None) -> SesquilinearForm:
    return q.sesquilinearization(rng)


def is_singular(q: GenPseudoQuadraticForm, x) -> bool:
    return q.is_singular(x)


def is_trivial(q: GenPseudoQuadraticForm) -> bool:
    return q.is_trivial()


def form_from_facilitating(pair: AdmissiblePair, M, codefect: ClosedSubgroup | None = None, *, validate=True):
    """The form q(x) = g(x,x) mod R of a sesquilinear g with Gram matrix M.

    Its sesquilinearization is G = M + M^{sigma T} eps and the basis values
    are the diagonal of M.
    """
    sig, eps = pair.sigma_apply, pair.eps
    n = len(M)
    G = [[M[i][j] + sig(M[j][i]) * eps for j in range(n)] for i in range(n)]
    return GenPseudoQuadraticForm(pair, G, [M[i][i] for i in range(n)], codefect, validate=validate)


# ---------------------------------------------------------------- bases


class SingularBasis:
    """An ordered basis E of q-singular vectors and its facilitating form g_E."""

    __slots__ = ("q", "vectors", "inv", "upper", "matrix")

    def __init__(self, q: GenPseudoQuadraticForm, vectors, *, check: bool = True):
        self.q = q
        ring = q.ring
        self.vectors = tuple(as_vector(ring, v, q.dim) for v in vectors)
        if len(self.vectors) != q.dim:
            raise NotSpanningError(f"need {q.dim} vectors, got {len(self.vectors)}")
        if check:
            for k, v in enumerate(self.vectors):
                if not q.is_singular(v):
                    raise NotSingularError(f"basis vector {k + 1} is not q-singular", index=k + 1)
        A = linalg.columns(self.vectors)
        try:
            self.inv = linalg.inverse(A, ring)
        except NotSpanningError as exc:
            raise NotSpanningError("basis vectors are linearly dependent") from exc
        f = q.f
        n = q.dim
        self.upper = [[f(self.vectors[i], self.vectors[j]) if i < j else ring.zero for j in range(n)] for i in range(n)]
        self.matrix = self._standard_matrix()

    def _standard_matrix(self):
        """Gram matrix of g_E in standard coordinates: M = (A^-1)^{sT} U A^-1."""
        ring = self.q.ring
        sig = self.q.pair.sigma_apply
        n = self.q.dim
        Ainv = self.inv
        U = self.upper
        UA = linalg.mat_mul(U, Ainv)
        M = [[ring.zero] * n for _ in range(n)]
        for k in range(n):
            col = [sig(Ainv[i][k]) for i in range(n)]
            for l in range(n):
                acc = ring.zero
                for i in range(n):
                    if col[i] and UA[i][l]:
                        acc = acc + col[i] * UA[i][l]
                M[k][l] = acc
        return M

    @property
    def dim(self) -> int:
        return self.q.dim

    def coords(self, x) -> tuple:
        return linalg.mat_vec(self.inv, x)

    def g(self, x, y):
        """g_E(x, y) = sum_{i<j} lam_i^s f(e_i, e_j) mu_j in E-coordinates."""
        lam = self.coords(x)
        mu = self.coords(y)
        sig = self.q.pair.sigma_apply
        ring = self.q.ring
        acc = ring.zero
        n = self.dim
        for i in range(n):
            if not lam[i]:
                continue
            inner = ring.zero
            for j in range(i + 1, n):
                if self.upper[i][j] and mu[j]:
                    inner = inner + self.upper[i][j] * mu[j]
            if inner:
                acc = acc + sig(lam[i]) * inner
        return acc

    def gamma(self, x):
        return self.g(x, x)

    def diagonal_values(self) -> list:
        """g_E(e_k, e_k) for the standard basis vectors e_k."""
        return [self.matrix[k][k] for k in range(self.dim)]

    def __eq__(self, other):
        if not isinstance(other, SingularBasis):
            return NotImplemented
        return self.vectors == other.vectors

    def __hash__(self):
        return hash(self.vectors)


def facilitating_eval(q: GenPseudoQuadraticForm, E, x, y):
    if not isinstance(E, SingularBasis):
        E = SingularBasis(q, E)
    return E.g(x, y)


class BasisChange:
    """Transition data e_k = sum_i e'_i alpha_ik between two singular bases."""

    __slots__ = ("source", "target", "alpha")

    def __init__(self, source: SingularBasis, target: SingularBasis):
        self.source = source
        self.target = target
        cols = [target.coords(e) for e in source.vectors]
        n = source.dim
        self.alpha = [[cols[k][i] for k in range(n)] for i in range(n)]


def difference_map_direct(q, E: SingularBasis, E2: SingularBasis, x) -> CosetElement:
    return q.pair.coset(E.gamma(x) - E2.gamma(x))


def difference_map_closed(q, E: SingularBasis, E2: SingularBasis, x) -> CosetElement:
    """-sum_i g_{E'}(e_i, e_i)-bar o lam_i with lam the E-coordinates of x."""
    lam = E.coords(x)
    acc = q.pair.coset(q.ring.zero)
    for e, li in zip(E.vectors, lam):
        acc = acc - q.pair.coset(E2.gamma(e)).circ(li)
    return acc


def difference_map(q: GenPseudoQuadraticForm, E, E2, x) -> CosetElement:
    """delta_{E,E'}(x) = g_E(x,x)-bar - g_{E'}(x,x)-bar, cross-checked against the closed form."""
    if not isinstance(E, SingularBasis):
        E = SingularBasis(q, E)
    if not isinstance(E2, SingularBasis):
        E2 = SingularBasis(q, E2)
    direct = difference_map_direct(q, E, E2, x)
    closed = difference_map_closed(q, E, E2, x)
    if direct != closed:
        raise VerificationFailedError(f"difference map mismatch at {x}: {direct} vs {closed}")
    if not q.codefect.contains(direct.rep):
        raise VerificationFailedError(f"difference map value {direct} is outside the codefect")
    return direct


# ------------------------------------------------------- singular bases


def make_singular(q: GenPseudoQuadraticForm, v, s):
    """v + s*lam, singular, for a singular s with f(s, v) != 0.

    q(s lam + v) = q(v) + lam^s f(s, v), so lam^s = -q(v) f(s,v)^-1 works.
    """
    fsv = q.f(s, v)
    if not fsv:
        return None
    lam = sigma_inverse(q.pair, -q.raw(v) * (q.ring.one / fsv))
    w = linalg.vec_add(linalg.vec_scale(s, lam), v)
    return w if q.is_singular(w) else None


def _finite_singular_vectors(q: GenPseudoQuadraticForm, limit: int):
    F = q.ring
    found = []
    for x in itertools.product(F.elements(), repeat=q.dim):
        if any(x) and q.is_singular(x):
            found.append(tuple(x))
            if len(found) >= limit:
                break
    return found


def find_singular_basis(q: GenPseudoQuadraticForm, hints=()) -> SingularBasis:
    """Deterministically complete known singular vectors to a singular basis."""
    ring = q.ring
    n = q.dim
    std = [linalg.unit_vector(n, k, ring) for k in range(n)]
    basis: list[tuple] = []

    def independent(v):
        return linalg.rank(basis + [v], ring) == len(basis) + 1

    for v in [as_vector(ring, h, n) for h in hints] + std:
        if q.is_singular(v) and any(v) and independent(v):
            basis.append(v)
    if not basis and isinstance(ring, FiniteField) and ring.order**n <= 10**6:
        for v in _finite_singular_vectors(q, 1):
            basis.append(v)
    if not basis:
        raise NotSpanningError("no singular vector available to start a singular basis")
    progress = True
    while len(basis) < n and progress:
        progress = False
        for e in std:
            if len(basis) == n:
                break
            if not independent(e):
                continue
            w = _fix_vector(q, e, basis)
            if w is not None and independent(w):
                basis.append(w)
                progress = True
    if len(basis) < n:
        raise NotSpanningError("singular vectors of q do not span V")
    return SingularBasis(q, basis)


def _fix_vector(q, v, basis):
    if q.is_singular(v):
        return v
    for s in basis:
        w = make_singular(q, v, s)
        if w is not None:
            return w
    # v is orthogonal to the current basis: shift it by a basis vector s1 and
    # repair with some s2 not orthogonal to s1
    for s1 in basis:
        for s2 in basis:
            if q.f(s2, s1):
                w = make_singular(q, linalg.vec_add(v, s1), s2)
                if w is not None:
                    return w
    return None


def random_singular_basis(q: GenPseudoQuadraticForm, rng: random.Random, base: SingularBasis | None = None, tries: int = 200, **kw) -> SingularBasis:
    """A random q-singular basis obtained from sparse random combinations of a known one.

    Falls back to ``base`` when no candidate basis is found (or its entries
    outgrow the polynomial degree cap) within the attempt budget.
    """
    base = base or find_singular_basis(q)
    for _ in range(8):
        chosen = _random_singular_vectors(q, rng, base, tries, **kw)
        if chosen is None:
            continue
        try:
            return SingularBasis(q, chosen)
        except DegreeOverflowError:
            continue
    return base


def _random_singular_vectors(q, rng, base, tries, **kw):
    ring = q.ring
    n = q.dim
    chosen: list[tuple] = []
    for _ in range(tries):
        if len(chosen) == n:
            return chosen
        coeffs = [ring.random_element(rng, **kw) if rng.random() < 0.6 else ring.zero for _ in range(n)]
        v = tuple(ring.zero for _ in range(n))
        try:
            for e, c in zip(base.vectors, coeffs):
                if c:
                    v = linalg.vec_add(v, linalg.vec_scale(e, c))
            if not any(v):
                continue
            if not q.is_singular(v):
                pool = list(base.vectors)
                rng.shuffle(pool)
                w = None
                for s in pool:
                    w = make_singular(q, v, s)
                    if w is not None:
                        break
                if w is None:
                    continue
                v = w
        except DegreeOverflowError:
            continue
        if linalg.rank(chosen + [v], ring) == len(chosen) + 1:
            chosen.append(v)
    return chosen if len(chosen) == n else None


# ------------------------------------------------- proportional / twisted


def scale_form(kappa, q: GenPseudoQuadraticForm) -> GenPseudoQuadraticForm:
    ring = q.ring
    kappa = ring(kappa)
    if not kappa:
        raise ZeroScalarError("kappa must be nonzero")
    if q.codefect.is_full:
        raise FullCodefectError("scaling needs a non-full codefect")
    pair = scale_pair(kappa, q.pair)
    R = ClosedSubgroup.generated(pair, [kappa * g for g in q.codefect.basis_elements()])
    return GenPseudoQuadraticForm(
        pair,
        [[kappa * c for c in row] for row in q.gram],
        [kappa * g for g in q.values],
        R,
    )


def apply_automorphism(rho: AntiAutomorphism, q: GenPseudoQuadraticForm) -> GenPseudoQuadraticForm:
    """Image of q under a field automorphism rho (finite fields only)."""
    ring = q.ring
    if not isinstance(ring, FiniteField):
        raise UnsupportedError("automorphism twists are implemented for finite fields only")
    if rho.kind not in ("identity", "frobenius"):
        raise IncompatibleAutomorphismError("rho must be a Frobenius power")
    if rho.apply(q.pair.eps) != q.pair.eps:
        raise IncompatibleAutomorphismError("rho does not fix eps")
    # Frobenius powers commute with each other, so rho commutes with sigma.
    R = ClosedSubgroup.generated(q.pair, [rho.apply(g) for g in q.codefect.basis_elements()])
    if q.codefect.is_full:
        R = q.pair.full_subgroup
    return GenPseudoQuadraticForm(
        q.pair,
        [[rho.apply(c) for c in row] for row in q.gram],
        [rho.apply(g) for g in q.values],
        R,
    )
