"""Standard forms over finite fields, F_2(t) and H(Q), plus random generators."""

from __future__ import annotations

import random

from . import linalg
from .admissible import AdmissiblePair, ClosedSubgroup, validate_pair
from .forms import GenPseudoQuadraticForm, SesquilinearForm, SingularBasis, form_from_facilitating
from .scalars import (
    CONJUGATION,
    IDENTITY,
    FiniteField,
    Ring,
    frobenius,
    funcfield2,
    quaternions,
)


def orthogonal_pair(ring: Ring) -> AdmissiblePair:
    return validate_pair(ring, IDENTITY, ring.one)


def _zeros(n, ring):
    return [[ring.zero] * n for _ in range(n)]


def _hyperbolic_block(G, start, m, ring, sign=1):
    for i in range(m):
        a, b = start + 2 * i, start + 2 * i + 1
        G[a][b] = ring.one
        G[b][a] = ring.one if sign == 1 else -ring.one


def hyperbolic(F: Ring, m: int) -> GenPseudoQuadraticForm:
    """x1 x2 + x3 x4 + ... + x_{2m-1} x_{2m}."""
    pair = orthogonal_pair(F)
    G = _zeros(2 * m, F)
    _hyperbolic_block(G, 0, m, F)
    return GenPseudoQuadraticForm(pair, G, [F.zero] * (2 * m))


def anisotropic_constant(F: FiniteField):
    """delta with X^2 + X + delta irreducible (char 2) or a non-square (odd char)."""
    els = F.elements()
    if F.p == 2:
        image = {x * x + x for x in els}
        return next(d for d in els if d not in image)
    squares = {x * x for x in els}
    return next(d for d in els if d not in squares)


def elliptic(F: FiniteField, m: int) -> GenPseudoQuadraticForm:
    """Hyperbolic part in 2m-2 variables plus an anisotropic binary form."""
    pair = orthogonal_pair(F)
    n = 2 * m
    G = _zeros(n, F)
    _hyperbolic_block(G, 0, m - 1, F)
    vals = [F.zero] * n
    delta = anisotropic_constant(F)
    a, b = n - 2, n - 1
    if F.p == 2:
        G[a][b] = G[b][a] = F.one
        vals[a], vals[b] = F.one, delta
    else:
        vals[a], vals[b] = F.one, -delta
        G[a][a], G[b][b] = F(2), -delta * 2
    return GenPseudoQuadraticForm(pair, G, vals)


def parabolic(F: FiniteField, m: int) -> GenPseudoQuadraticForm:
    """x1 x2 + ... + x_{2m-1} x_{2m} + x_{2m+1}^2."""
    pair = orthogonal_pair(F)
    n = 2 * m + 1
    G = _zeros(n, F)
    _hyperbolic_block(G, 0, m, F)
    vals = [F.zero] * n
    vals[-1] = F.one
    G[-1][-1] = F(2)
    return GenPseudoQuadraticForm(pair, G, vals)


def symplectic(F: Ring, m: int) -> SesquilinearForm:
    """Alternating form x1 y2 - x2 y1 + ... on F^{2m}."""
    pair = validate_pair(F, IDENTITY, -F.one)
    G = _zeros(2 * m, F)
    _hyperbolic_block(G, 0, m, F, sign=-1)
    return SesquilinearForm(pair, G)


def hermitian_pair(F: FiniteField) -> AdmissiblePair:
    if F.n % 2:
        raise ValueError("hermitian forms need a field of square order")
    return validate_pair(F, frobenius(F.n // 2), F.one)


def hermitian(F: FiniteField, n: int) -> GenPseudoQuadraticForm:
    """sum_i x_i^sigma x_i as a (sigma,1)-quadratic form with Gram = identity."""
    pair = hermitian_pair(F)
    sig = pair.sigma_apply
    g = next(x for x in F.elements() if x + sig(x) == F.one)
    G = _zeros(n, F)
    for i in range(n):
        G[i][i] = F.one
    return GenPseudoQuadraticForm(pair, G, [g] * n)


def hermitian_sesquilinear(F: FiniteField, n: int) -> SesquilinearForm:
    pair = hermitian_pair(F)
    G = _zeros(n, F)
    for i in range(n):
        G[i][i] = F.one
    return SesquilinearForm(pair, G)


def char2_hyperbolic(m: int = 1, codefect_gens=(1,), var: str = "t") -> GenPseudoQuadraticForm:
    """x1 x2 + ... over F_2(t) with codefect spanned over F_2(t^2) by the given elements."""
    K = funcfield2(var)
    pair = orthogonal_pair(K)
    G = _zeros(2 * m, K)
    _hyperbolic_block(G, 0, m, K)
    R = ClosedSubgroup.generated(pair, [K(g) if not isinstance(g, str) else K.parse(g) for g in codefect_gens])
    return GenPseudoQuadraticForm(pair, G, [K.zero] * (2 * m), R)


def builtin_quaternion_form() -> GenPseudoQuadraticForm:
    """x1^sigma x2 + x3^sigma x4 modulo K_{sigma,eps} = Q over H(Q), (conj, -1)."""
    H = quaternions()
    pair = validate_pair(H, CONJUGATION, -H.one)
    G = _zeros(4, H)
    G[0][1] = G[2][3] = H.one
    G[1][0] = G[3][2] = -H.one
    return GenPseudoQuadraticForm(pair, G, [H.zero] * 4)


def finite_builtins() -> dict:
    """Named finite-field instances used by the verification suites."""
    from .scalars import field

    out = {}
    for q, (p, n) in {2: (2, 1), 3: (3, 1), 4: (2, 2)}.items():
        F = field(p, n)
        out[f"hyperbolic(4,{q})"] = hyperbolic(F, 2)
        out[f"parabolic(5,{q})"] = parabolic(F, 2)
        out[f"elliptic(6,{q})"] = elliptic(F, 3)
        out[f"symplectic(4,{q})"] = symplectic(F, 2)
    out["hermitian(4,4)"] = hermitian(field(2, 2), 4)
    return out


# ------------------------------------------------------------ random forms


def random_form(pair: AdmissiblePair, n: int, rng: random.Random, codefect: ClosedSubgroup | None = None, **kw) -> GenPseudoQuadraticForm:
    """Random form from a random upper-triangular facilitating matrix."""
    ring = pair.ring
    M = _zeros(n, ring)
    for i in range(n):
        for j in range(i, n):
            M[i][j] = ring.random_element(rng, **kw)
    return form_from_facilitating(pair, M, codefect)


def transform(q: GenPseudoQuadraticForm, A) -> GenPseudoQuadraticForm:
    """The form x -> q(A x)."""
    ring = q.ring
    n = q.dim
    cols = [tuple(A[i][k] for i in range(n)) for k in range(n)]
    G = [[q.f(cols[i], cols[j]) for j in range(n)] for i in range(n)]
    vals = [q.raw(c) for c in cols]
    # values must be consistent with the diagonal; raw(A e_k) is a valid representative
    return GenPseudoQuadraticForm(q.pair, G, vals, q.codefect)


def random_char2_form(rng: random.Random, n: int, codefect_rank: int, degree: int = 2) -> tuple[GenPseudoQuadraticForm, SingularBasis]:
    """Random non-trivial form over F_2(t) with a known singular basis.

    A form whose standard basis is singular is pushed through a random unit
    upper-triangular and then unit lower-triangular change of basis with
    linear entries; entries stay well below degree 8.
    """
    K = funcfield2()
    pair = orthogonal_pair(K)
    if codefect_rank == 0:
        R = pair.zero_subgroup
        gens = []
    else:
        g = K.random_element(rng, nonzero=True, degree=degree)
        R = ClosedSubgroup.generated(pair, [g])
        gens = [g]
    G = _zeros(n, K)
    for i in range(n):
        for j in range(i + 1, n):
            G[i][j] = G[j][i] = K.random_element(rng, degree=degree)
    if n >= 2 and not G[0][1]:
        G[0][1] = G[1][0] = K.one
    vals = []
    for _ in range(n):
        if gens and rng.random() < 0.7:
            c = K.random_element(rng, degree=1)
            vals.append(c * c * gens[0])
        else:
            vals.append(K.zero)
    q0 = GenPseudoQuadraticForm(pair, G, vals, R)
    A = linalg.identity(n, K)
    for i in range(n):
        for j in range(i + 1, n):
            A[i][j] = K.random_element(rng, degree=1)
    L = linalg.identity(n, K)
    for i in range(n):
        for j in range(i):
            if rng.random() < 0.5:
                L[i][j] = K.random_element(rng, degree=1)
    A = linalg.mat_mul(A, L)
    q = transform(q0, A)
    Ainv = linalg.inverse(A, K)
    E = [tuple(Ainv[i][k] for i in range(n)) for k in range(n)]
    return q, SingularBasis(q, E)
