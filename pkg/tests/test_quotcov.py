from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpqforms import catalog, linalg
from gpqforms.admissible import ClosedSubgroup
from gpqforms.errors import (
    NotDirectSumError,
    QuotientNotDefinedError,
    TrivialFormError,
    UnsupportedError,
)
from gpqforms.forms import GenPseudoQuadraticForm, random_singular_basis, random_vector
from gpqforms.quotcov import (
    admits_quotient,
    basis_change_iso,
    circ_basis,
    circ_combination,
    circ_coordinates,
    complement_iso,
    cover_form,
    cover_with_basis,
    dominant_cover,
    quotient_form,
    reconstruct_cover,
    weak_cover_automorphism,
)
from gpqforms.scalars import field, funcfield2
from gpqforms.verify import random_char2_forms

K = funcfield2()
seeds = st.integers(0, 2**32 - 1)


def _vec(q, rng):
    return random_vector(q.ring, q.dim, rng, degree=3) if q.ring is K else random_vector(q.ring, q.dim, rng)


def test_dominant_cover_of_char2_hyperbolic_plane():
    q = catalog.char2_hyperbolic(1, (1,))
    spec = dominant_cover(q)
    assert spec.form.dim == 3
    assert [K.format(v) for v in spec.form.values] == ["0", "0", "1"]
    assert spec.form.codefect.is_zero
    x = (K.one, K.t**2)
    assert spec.lift_point(x) == (K.one, K.t**2, K.t)


def test_circ_coordinates_round_trip():
    q = catalog.char2_hyperbolic(2, ("t",))
    basis = circ_basis(q.codefect)
    assert len(basis) == q.codefect.rank == 1
    r = K.t * K.parse("t^3 + t + 1") ** 2
    mu = circ_coordinates(q.pair, basis, r)
    assert circ_combination(q.pair, basis, mu) == r


@given(seeds)
def test_round_trip_and_cover_invariants(seed):
    rng = random.Random(seed)
    (q, E), = random_char2_forms(rng, 1)
    R = q.codefect
    zero = q.pair.zero_subgroup
    for S, T in [(R, zero), (zero, R)]:
        spec = cover_form(q, S, T, E)
        cov = spec.form
        # Rad of the cover's sesquilinear form is Rad f plus the block
        assert len(cov.f.radical()) == len(q.f.radical()) + spec.k
        back = quotient_form(cov, spec.block_subspace()).form
        assert back.codefect == R
        for _ in range(10):
            v = _vec(q, rng)
            assert back(v) == q(v)
            w = random_vector(K, cov.dim, rng, degree=2)
            # the cover agrees with q on projections, modulo R
            assert R.contains(cov.raw(w) - q.raw(spec.project(w)))
        for e in E.vectors:
            lifted = spec.lift_point(e)
            assert spec.project(lifted) == e
            assert cov.is_singular(lifted)


@given(seeds)
def test_basis_change_isomorphism(seed):
    rng = random.Random(seed)
    (q, E), = random_char2_forms(rng, 1)
    spec = cover_form(q, q.codefect, q.pair.zero_subgroup, E)
    E2 = random_singular_basis(q, rng, E, degree=1)
    other = cover_with_basis(spec, E2)
    D = basis_change_iso(spec, E2)
    for _ in range(10):
        v = random_vector(K, spec.form.dim, rng, degree=2)
        assert spec.form(v) == other.form(linalg.mat_vec(D, v))


def test_complement_iso_same_complement_is_identity_on_block():
    q = catalog.char2_hyperbolic(2, ("t",))
    spec = dominant_cover(q)
    D = complement_iso(spec, spec)
    assert D == linalg.identity(spec.form.dim, K)


def test_reconstruct_cover_recovers_quotient():
    q = catalog.char2_hyperbolic(2, ("t",))
    spec = dominant_cover(q)
    rec = reconstruct_cover(spec.form.with_codefect(q.pair.zero_subgroup), spec.block_subspace(), hints=[spec.E.vectors[0]])
    assert rec.quotient.form == q
    assert rec.cover.S == q.codefect


def test_quotient_requires_radical_vectors():
    F = field(2)
    pair = catalog.orthogonal_pair(F)
    q = GenPseudoQuadraticForm(pair, [[0, 1, 0], [1, 0, 0], [0, 0, 0]], [0, 0, 1])
    assert admits_quotient(q, [[0, 0, 1]])
    assert not admits_quotient(q, [[1, 0, 0]])
    with pytest.raises(QuotientNotDefinedError):
        quotient_form(q, [[1, 0, 0]])
    # a singular radical vector cannot be factored out
    q0 = GenPseudoQuadraticForm(pair, [[0, 1, 0], [1, 0, 0], [0, 0, 0]], [0, 0, 0])
    with pytest.raises(QuotientNotDefinedError):
        quotient_form(q0, [[0, 0, 1]])


def test_direct_sum_is_checked():
    q = catalog.char2_hyperbolic(1, (1,))
    R = q.codefect
    with pytest.raises(NotDirectSumError):
        cover_form(q, R, R)
    with pytest.raises(NotDirectSumError):
        cover_form(q, q.pair.zero_subgroup, q.pair.zero_subgroup)


def test_trivial_forms_have_no_cover():
    q = catalog.char2_hyperbolic(1, (1, "t"))
    assert q.codefect.is_full
    with pytest.raises(TrivialFormError):
        dominant_cover(q)


def test_weak_cover_automorphism():
    q = catalog.hyperbolic(field(2, 2), 2)
    R = q.codefect
    assert weak_cover_automorphism(q, R, R) is not None
    q2 = catalog.char2_hyperbolic(1, (1,))
    zero = ClosedSubgroup.zero(q2.pair)
    with pytest.raises(UnsupportedError):
        weak_cover_automorphism(q2, zero, zero)
