from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpqforms import catalog, linalg
from gpqforms.admissible import ClosedSubgroup, validate_pair
from gpqforms.errors import NotAdmissibleError, NotReflexiveError, NotTraceValuedError, Q2ViolationError
from gpqforms.forms import (
    GenPseudoQuadraticForm,
    SesquilinearForm,
    difference_map_closed,
    difference_map_direct,
    find_singular_basis,
    random_singular_basis,
    random_vector,
)
from gpqforms.scalars import AntiAutomorphism, field, frobenius, funcfield2
from gpqforms.verify import random_char2_forms

SMALL_FIELDS = [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3)]


def all_pairs(F):
    sigmas = [AntiAutomorphism("identity")] + [frobenius(k) for k in range(1, F.n)]
    out = []
    for sigma in sigmas:
        for eps in F.nonzero_elements():
            try:
                out.append(validate_pair(F, sigma, eps))
            except NotAdmissibleError:
                pass
    return out


def _brute_closure(pair, gens):
    """Smallest additive set containing K_{sigma,eps} and gens, closed under t -> l^sigma t l."""
    F = pair.ring
    sig = pair.sigma_apply
    lower = {s - sig(s) * pair.eps for s in F.elements()}
    group = set(lower) | set(gens)
    while True:
        new = {a + b for a in group for b in group}
        new |= {sig(lam) * t * lam for t in group for lam in F.elements()}
        if new <= group:
            return group
        group |= new


@pytest.mark.parametrize("p,n", SMALL_FIELDS)
def test_admissible_pairs_satisfy_identities(p, n):
    F = field(p, n)
    pairs = all_pairs(F)
    assert pairs
    for pair in pairs:
        sig, eps = pair.sigma_apply, pair.eps
        assert sig(eps) * eps == F.one
        for t in F.elements():
            assert sig(sig(t)) == t


def test_rejects_non_admissible_eps():
    with pytest.raises(NotAdmissibleError):
        validate_pair(field(5), AntiAutomorphism("identity"), 2)


@pytest.mark.parametrize("p,n", SMALL_FIELDS)
def test_lower_upper_and_trace_type_against_enumeration(p, n):
    F = field(p, n)
    for pair in all_pairs(F):
        sig, eps = pair.sigma_apply, pair.eps
        lower = {s - sig(s) * eps for s in F.elements()}
        upper = {t for t in F.elements() if t == -sig(t) * eps}
        assert lower <= upper
        for t in F.elements():
            assert pair.in_lower(t) == (t in lower)
            assert pair.in_upper(t) == (t in upper)
        lower_neg = {s + sig(s) * eps for s in F.elements()}
        upper_neg = {t for t in F.elements() if t == sig(t) * eps}
        assert pair.is_trace_type() == (lower_neg == upper_neg)
        assert p ** pair.lower.rank == len(lower)
        assert p ** pair.upper_rank() == len(upper)


@pytest.mark.parametrize("p,n", SMALL_FIELDS)
def test_closed_subgroups_match_brute_force_closure(p, n):
    F = field(p, n)
    for pair in all_pairs(F):
        for g in F.elements():
            R = ClosedSubgroup.generated(pair, [g])
            oracle = _brute_closure(pair, [g])
            assert {t for t in F.elements() if R.contains(t)} == oracle
            # finite fields only have the two extreme closed subgroups
            assert R.is_zero or R.is_full


def test_char2_function_field_subgroups():
    K = funcfield2()
    pair = validate_pair(K, AntiAutomorphism("identity"), 1)
    R = ClosedSubgroup.generated(pair, [K.t])
    assert R.rank == 1 and not R.is_full
    assert R.contains(K.t * K.parse("t^2 + 1") ** 2)
    assert not R.contains(K.one)
    assert ClosedSubgroup.generated(pair, [K.one, K.t]).is_full
    assert pair.zero_subgroup.is_zero


# -- forms ------------------------------------------------------------------


def _finite_forms():
    out = {k: v for k, v in catalog.finite_builtins().items() if isinstance(v, GenPseudoQuadraticForm)}
    rng = random.Random(5)
    for F in (field(3), field(2, 2), field(5)):
        for pair in all_pairs(F):
            for _ in range(2):
                q = catalog.random_form(pair, 3, rng)
                out[f"random {F.spec()} {pair.spec()} {_}"] = q
    return out


FORMS = _finite_forms()


@pytest.mark.parametrize("name", sorted(FORMS))
def test_polarization_and_homogeneity(name):
    q = FORMS[name]
    rng = random.Random(hash(name) & 0xFFFF)
    sig = q.pair.sigma_apply
    for _ in range(40):
        x = random_vector(q.ring, q.dim, rng)
        y = random_vector(q.ring, q.dim, rng)
        lam = q.ring.random_element(rng)
        assert q(linalg.vec_add(x, y)) - q(x) - q(y) == q.coset(q.f(x, y))
        assert q.codefect.contains(q.raw(linalg.vec_scale(x, lam)) - sig(lam) * q.raw(x) * lam)
        if q.is_singular(x) and not q.codefect.is_full:
            assert not q.f(x, x)


def test_reflexivity_and_trace_errors():
    F = field(3)
    pair = validate_pair(F, AntiAutomorphism("identity"), 1)
    with pytest.raises(NotReflexiveError) as err:
        GenPseudoQuadraticForm(pair, [[0, 1], [2, 0]], [0, 0])
    assert err.value.details["entry"] == (1, 2)
    with pytest.raises(Q2ViolationError):
        GenPseudoQuadraticForm(pair, [[1, 0], [0, 0]], [1, 0])
    # in characteristic 2 a symmetric Gram matrix can fail to be trace-valued
    orth2 = validate_pair(field(2), AntiAutomorphism("identity"), 1)
    with pytest.raises(NotTraceValuedError):
        GenPseudoQuadraticForm(orth2, [[1, 0], [0, 0]], [0, 0])


def test_sesquilinear_radical():
    f = SesquilinearForm(validate_pair(field(2), AntiAutomorphism("identity"), 1), [[0, 1, 0], [1, 0, 0], [0, 0, 0]])
    rad = f.radical()
    assert len(rad) == 1 and f.is_reflexive() and f.is_alternating()
    v = rad[0]
    for w in itertools.product(field(2).elements(), repeat=3):
        assert not f(v, w)


@given(st.integers(0, 2**32 - 1))
def test_difference_map_closed_form_over_f2t(seed):
    rng = random.Random(seed)
    (q, E), = random_char2_forms(rng, 1)
    E2 = random_singular_basis(q, rng, E, degree=1)
    for _ in range(5):
        x = random_vector(q.ring, q.dim, rng, degree=2)
        a = difference_map_direct(q, E, E2, x)
        assert a == difference_map_closed(q, E, E2, x)
        assert difference_map_direct(q, E2, E, x) == -a


@pytest.mark.parametrize("name", ["hyperbolic(4,3)", "parabolic(5,2)"])
def test_singular_basis_vectors_are_singular(name):
    q = catalog.finite_builtins()[name]
    E = find_singular_basis(q)
    assert all(q.is_singular(e) for e in E.vectors)
    assert len(E.diagonal_values()) == q.dim
