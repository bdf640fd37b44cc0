"""Admissible pairs (sigma, eps), the groups K_{sigma,eps} and K^{sigma,eps},
the twisted action t o lam = lam^sigma t lam, closed subgroups and cosets.

Additive structure is handled through a *linear model* of the ring: a field B
over which K is a finite-dimensional vector space and over which the maps
s -> s - s^sigma eps are linear.  B is F_p for F_{p^n}, the subfield F_2(t^2)
for F_2(t) and Q for the quaternions.  Every additive subgroup that occurs
below is a B-subspace of K, stored as an :class:`EchelonBasis` of coordinate
vectors, so membership and canonical coset representatives reduce to row
reduction.
"""

from __future__ import annotations

from .errors import (
    NotAdmissibleError,
    PairMismatchError,
    UnsupportedError,
    ZeroScalarError,
)
from .linalg import EchelonBasis
from .scalars import (
    AntiAutomorphism,
    FiniteField,
    FunctionField2,
    RationalQuaternions,
    Ring,
    decompose_char2,
    field,
    rationals,
)


class _FiniteModel:
    """F_{p^n} as F_p^n through the digits of the element code."""

    def __init__(self, F: FiniteField):
        self.ring = F
        self.base = field(F.p, 1)
        self.dim = F.n
        base_el = self.base._el
        self._coords = [tuple(base_el[d] for d in row) for row in F._digits.tolist()]
        self._weights = [F.p**i for i in range(F.n)]

    def coords(self, t) -> tuple:
        return self._coords[t.code]

    def element(self, c):
        return self.ring._el[sum(x.code * w for x, w in zip(c, self._weights))]

    def basis(self):
        return [self.ring.from_code(w) for w in self._weights]

    def closure(self, pair: AdmissiblePair, gens) -> EchelonBasis:
        span = pair.lower
        for g in gens:
            if span.is_full:
                break
            span = span.extend(self.coords(pair.circ(g, lam)) for lam in self.ring.nonzero_elements())
        return span


class _Char2FunctionModel:
    """F_2(t) as a 2-dimensional space over F_2(t^2) with basis (1, t)."""

    def __init__(self, K: FunctionField2):
        self.ring = K
        self.base = K
        self.dim = 2

    def coords(self, t) -> tuple:
        return decompose_char2(t)

    def element(self, c):
        return c[0] + self.ring.t * c[1]

    def basis(self):
        return [self.ring.one, self.ring.t]

    def closure(self, pair: AdmissiblePair, gens) -> EchelonBasis:
        # r o lam = lam^2 r and lam^2 runs over F_2(t^2): the closure of a set of
        # generators is its F_2(t^2)-span, no twisting needed.
        return pair.lower.extend(self.coords(g) for g in gens)


class _QuaternionModel:
    """H(Q) as Q^4 via the components on 1, i, j, k."""

    def __init__(self, H: RationalQuaternions):
        self.ring = H
        self.base = rationals()
        self.dim = 4

    def coords(self, t) -> tuple:
        return t.components

    def element(self, c):
        return self.ring._make(*c)

    def basis(self):
        H = self.ring
        return [H.one, H.i, H.j, H.k]

    def closure(self, pair: AdmissiblePair, gens) -> EchelonBasis:
        # For conj and eps = +-1 the orbit lam^sigma g lam of any g outside
        # K_{sigma,eps} spans the whole quotient (norms cover Q_{>0}, rotations
        # cover the pure part), so a closed subgroup is either zero or full.
        if any(not pair.lower.contains(self.coords(g)) for g in gens):
            return _full_span(self)
        return pair.lower


def _full_span(model) -> EchelonBasis:
    B = model.base
    d = model.dim
    return EchelonBasis(B, d, [tuple(B.one if i == j else B.zero for j in range(d)) for i in range(d)])


def linear_model(ring: Ring):
    cache = _MODELS.get(id(ring))
    if cache is None:
        if isinstance(ring, FiniteField):
            cache = _FiniteModel(ring)
        elif isinstance(ring, FunctionField2):
            cache = _Char2FunctionModel(ring)
        elif isinstance(ring, RationalQuaternions):
            cache = _QuaternionModel(ring)
        else:
            raise UnsupportedError(f"no linear model for {ring!r}")
        _MODELS[id(ring)] = cache
    return cache


_MODELS: dict = {}


def _generators(ring: Ring):
    if isinstance(ring, FiniteField):
        return [ring.generator]
    if isinstance(ring, FunctionField2):
        return [ring.t]
    return [ring.i, ring.j]


class AdmissiblePair:
    """A validated pair (sigma, eps); build it with :func:`validate_pair`."""

    def __init__(self, ring: Ring, sigma: AntiAutomorphism, eps):
        self.ring = ring
        self.sigma = sigma
        self.eps = eps
        self.model = linear_model(ring)
        self._sig = sigma.apply
        m = self.model
        self.lower = EchelonBasis(m.base, m.dim, [m.coords(s - self._sig(s) * eps) for s in m.basis()])
        self._zero_subgroup = None
        self._full_subgroup = None

    # -- basic maps
    def sigma_apply(self, t):
        return self._sig(t)

    def circ(self, t, lam):
        """Raw product lam^sigma t lam (no reduction)."""
        return self._sig(lam) * t * lam

    def in_lower(self, t) -> bool:
        """t in K_{sigma,eps} = {s - s^sigma eps}."""
        return self.lower.contains(self.model.coords(t))

    def in_upper(self, t) -> bool:
        """t in K^{sigma,eps} = {t : t = -t^sigma eps}."""
        return not (t + self._sig(t) * self.eps)

    def canonical(self, t):
        """Canonical representative of t + K_{sigma,eps}."""
        m = self.model
        return m.element(self.lower.reduce(m.coords(t)))

    def negated(self) -> AdmissiblePair:
        return validate_pair(self.ring, self.sigma, -self.eps)

    def is_trace_type(self) -> bool:
        """K_{sigma,-eps} = K^{sigma,-eps}, compared by B-dimension.

        K_{sigma,-eps} is the image of s -> s + s^sigma eps and K^{sigma,-eps}
        the kernel of t -> t - t^sigma eps; both maps are B-linear.
        """
        m = self.model
        eps = self.eps
        image = EchelonBasis(m.base, m.dim, [m.coords(s + self._sig(s) * eps) for s in m.basis()])
        other = EchelonBasis(m.base, m.dim, [m.coords(s - self._sig(s) * eps) for s in m.basis()])
        return image.rank == m.dim - other.rank

    def upper_rank(self) -> int:
        """B-dimension of K^{sigma,eps} (kernel of t -> t + t^sigma eps)."""
        m = self.model
        img = EchelonBasis(m.base, m.dim, [m.coords(s + self._sig(s) * self.eps) for s in m.basis()])
        return m.dim - img.rank

    # -- subgroups
    @property
    def zero_subgroup(self) -> ClosedSubgroup:
        if self._zero_subgroup is None:
            self._zero_subgroup = ClosedSubgroup(self, (), self.lower)
        return self._zero_subgroup

    @property
    def full_subgroup(self) -> ClosedSubgroup:
        if self._full_subgroup is None:
            self._full_subgroup = ClosedSubgroup(self, (), _full_span(self.model))
        return self._full_subgroup

    def coset(self, t) -> CosetElement:
        return CosetElement(self.zero_subgroup, t)

    # -- identity
    def key(self):
        return (self.ring.spec(), self.sigma, self.eps)

    def __eq__(self, other):
        if not isinstance(other, AdmissiblePair):
            return NotImplemented
        return self.ring is other.ring and self.sigma == other.sigma and self.eps == other.eps

    def __hash__(self):
        return hash((self.ring.spec(), self.sigma, self.eps))

    def spec(self) -> str:
        return f"pair(sigma = {self.sigma.spec()}, eps = {self.ring.format(self.eps)})"

    def __repr__(self):
        return f"{self.ring.spec()} {self.spec()}"


_PAIRS: dict = {}


def validate_pair(ring: Ring, sigma: AntiAutomorphism, eps) -> AdmissiblePair:
    """Check eps^sigma eps = 1 and sigma^2 = conjugation by eps on generators."""
    sigma.compatible(ring)
    sigma = sigma.normalized(ring)
    eps = ring(eps)
    key = (id(ring), sigma, eps)
    hit = _PAIRS.get(key)
    if hit is not None:
        return hit
    if not eps:
        raise NotAdmissibleError("eps must be nonzero", identity="eps != 0")
    if sigma.apply(eps) * eps != ring.one:
        raise NotAdmissibleError(
            f"eps^sigma * eps = {sigma.apply(eps) * eps} != 1", identity="eps^sigma eps = 1"
        )
    inv = ring.one / eps
    for g in _generators(ring):
        if sigma.apply(sigma.apply(g)) != eps * g * inv:
            raise NotAdmissibleError(
                f"sigma^2({g}) != eps {g} eps^-1", identity="t^(sigma^2) = eps t eps^-1"
            )
    pair = AdmissiblePair(ring, sigma, eps)
    _PAIRS[key] = pair
    return pair


def in_lower(pair: AdmissiblePair, t) -> bool:
    return pair.in_lower(t)


def in_upper(pair: AdmissiblePair, t) -> bool:
    return pair.in_upper(t)


def is_trace_type(pair: AdmissiblePair) -> bool:
    return pair.is_trace_type()


def scale_pair(kappa, pair: AdmissiblePair) -> AdmissiblePair:
    """kappa . (sigma, eps) = (t -> kappa t^sigma kappa^-1, kappa kappa^-sigma eps)."""
    ring = pair.ring
    kappa = ring(kappa)
    if not kappa:
        raise ZeroScalarError("kappa must be nonzero")
    if not ring.is_commutative and not kappa.is_real:
        raise UnsupportedError("non-central kappa gives a non-standard involution")
    eps = kappa * (ring.one / pair.sigma_apply(kappa)) * pair.eps
    return validate_pair(ring, pair.sigma, eps)


class ClosedSubgroup:
    """A circ-closed subgroup R/K_{sigma,eps} of K/K_{sigma,eps}.

    ``span`` is the echelonized B-subspace R of K (the preimage, always
    containing K_{sigma,eps}).
    """

    __slots__ = ("pair", "generators", "span", "kind")

    def __init__(self, pair: AdmissiblePair, generators, span: EchelonBasis):
        self.pair = pair
        self.span = span
        self.generators = tuple(generators)
        # when K_{sigma,eps} = K the zero group is also the full one; "full"
        # wins so that such forms are recognized as trivial
        if span.is_full:
            self.kind = "full"
        elif span == pair.lower:
            self.kind = "zero"
        else:
            self.kind = "finitely-generated"

    @classmethod
    def zero(cls, pair: AdmissiblePair) -> ClosedSubgroup:
        return pair.zero_subgroup

    @classmethod
    def full(cls, pair: AdmissiblePair) -> ClosedSubgroup:
        return pair.full_subgroup

    @classmethod
    def generated(cls, pair: AdmissiblePair, gens) -> ClosedSubgroup:
        reps = []
        for g in gens:
            if isinstance(g, CosetElement):
                g = g.rep
            g = pair.canonical(pair.ring(g))
            if g and g not in reps:
                reps.append(g)
        if not reps:
            return pair.zero_subgroup
        span = pair.model.closure(pair, reps)
        group = cls(pair, reps, span)
        if group.kind != "full":
            # a closed subgroup not inside K^{sigma,eps}/K_{sigma,eps} is everything
            assert all(pair.in_upper(g) for g in reps), "closure produced a non-full group outside K-bar-circ"
        return group

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or self.span == self.pair.lower

    @property
    def is_full(self) -> bool:
        return self.kind == "full"

    @property
    def rank(self) -> int:
        """B-dimension of R/K_{sigma,eps}."""
        return self.span.rank - self.pair.lower.rank

    def basis_elements(self) -> list:
        """Ring elements whose B-span together with K_{sigma,eps} is R."""
        m = self.pair.model
        lower = self.pair.lower
        out = []
        for row in self.span.rows:
            if not lower.contains(row):
                out.append(m.element(row))
        return out

    def _check(self, t):
        return self.pair.model.coords(self.pair.ring(t))

    def contains(self, t) -> bool:
        if isinstance(t, CosetElement):
            self._same_pair(t.subgroup.pair)
            t = t.rep
        if self.kind == "full":
            return True
        return self.span.contains(self._check(t))

    __contains__ = contains

    def reduce(self, t):
        """Canonical representative of t + R."""
        if isinstance(t, CosetElement):
            self._same_pair(t.subgroup.pair)
            t = t.rep
        if self.kind == "full":
            return self.pair.ring.zero
        m = self.pair.model
        return m.element(self.span.reduce(m.coords(t)))

    def coset(self, t) -> CosetElement:
        return CosetElement(self, t)

    def _same_pair(self, other: AdmissiblePair):
        if other != self.pair:
            raise PairMismatchError("subgroup and element belong to different pairs")

    def issubset(self, other: ClosedSubgroup) -> bool:
        self._same_pair(other.pair)
        return self.span.issubset(other.span)

    def __eq__(self, other):
        if not isinstance(other, ClosedSubgroup):
            return NotImplemented
        return self.pair == other.pair and self.span == other.span

    def __hash__(self):
        return hash((self.pair, self.span))

    def spec(self) -> str:
        if self.kind == "zero":
            return "codefect(zero)"
        if self.kind == "full":
            return "codefect(full)"
        fmt = self.pair.ring.format
        return "codefect(gens = [" + ", ".join(fmt(g) for g in self.generators) + "])"

    def __repr__(self):
        return self.spec()


def subgroup_membership(R: ClosedSubgroup, t) -> bool:
    return R.contains(t)


def reduce_mod(R: ClosedSubgroup, t) -> CosetElement:
    return CosetElement(R, t)


class CosetElement:
    """An element of K/R with R a closed subgroup (R = K_{sigma,eps} gives K-bar)."""

    __slots__ = ("subgroup", "rep")

    def __init__(self, subgroup: ClosedSubgroup, t):
        if isinstance(t, CosetElement):
            t = t.rep
        self.subgroup = subgroup
        self.rep = subgroup.reduce(t)

    @property
    def pair(self) -> AdmissiblePair:
        return self.subgroup.pair

    def _other(self, other):
        if isinstance(other, CosetElement):
            if other.subgroup is not self.subgroup and other.subgroup != self.subgroup:
                raise PairMismatchError("cosets modulo different subgroups")
            return other.rep
        return self.pair.ring(other)

    def __add__(self, other):
        return CosetElement(self.subgroup, self.rep + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return CosetElement(self.subgroup, self.rep - self._other(other))

    def __neg__(self):
        return CosetElement(self.subgroup, -self.rep)

    def circ(self, lam) -> CosetElement:
        return CosetElement(self.subgroup, self.pair.circ(self.rep, self.pair.ring(lam)))

    def modulo(self, R: ClosedSubgroup) -> CosetElement:
        return CosetElement(R, self.rep)

    def __eq__(self, other):
        if isinstance(other, CosetElement):
            return self.subgroup == other.subgroup and self.rep == other.rep
        if isinstance(other, int) and other == 0:
            return not self.rep
        return NotImplemented

    def __hash__(self):
        return hash(self.rep)

    def __bool__(self):
        return bool(self.rep)

    def is_zero(self) -> bool:
        return not self.rep

    def __repr__(self):
        return f"{self.pair.ring.format(self.rep)} + R"

    def __str__(self):
        return self.pair.ring.format(self.rep)


def circ(tbar: CosetElement, lam) -> CosetElement:
    return tbar.circ(lam)
