from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpqforms import catalog, linalg
from gpqforms.classify import (
    ALTERNATING,
    GPQ,
    EmbeddedGeometry,
    build_gamma_and_R,
    classify,
    greedy_basis,
    hull,
    proportional_test,
    recover_sesquilinear,
    verify_hull,
)
from gpqforms.errors import GridGeometryError, InvalidGeometryError
from gpqforms.forms import GenPseudoQuadraticForm, scale_form
from gpqforms.polar import polar_space
from gpqforms.scalars import field


def _geometry(source):
    return EmbeddedGeometry.from_polar_space(polar_space(source))


BUILTINS = catalog.finite_builtins()


def test_w32_recovers_standard_symplectic_gram():
    res = classify(_geometry(catalog.symplectic(field(2), 2)))
    assert res.verdict == ALTERNATING
    assert [[c.code for c in row] for row in res.f.gram] == [
        [0, 1, 0, 0],
        [1, 0, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 1, 0],
    ]


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtins_classify_to_proportional_forms(name):
    src = BUILTINS[name]
    res = classify(_geometry(src))
    if isinstance(src, GenPseudoQuadraticForm):
        assert res.verdict == GPQ
        assert proportional_test(res.q, src) is not None
    else:
        assert res.verdict == ALTERNATING


def test_hermitian_pair_is_recovered():
    res = classify(_geometry(catalog.hermitian(field(2, 2), 4)))
    assert res.f.pair.sigma.spec() == "frob^1"
    assert res.recovered.sigma_power == 1


@settings(max_examples=8)
@given(st.integers(0, 2**32 - 1))
def test_classification_is_covariant_under_base_change(seed):
    rng = random.Random(seed)
    F = field(3)
    src = catalog.hyperbolic(F, 2)
    while True:
        A = [[F.random_element(rng) for _ in range(4)] for _ in range(4)]
        if linalg.rank(A, F) == 4:
            break
    moved = catalog.transform(src, A)
    res = classify(_geometry(moved))
    assert res.verdict == GPQ
    assert proportional_test(res.q, moved) is not None


def test_codefect_does_not_depend_on_basis_choice():
    geom = _geometry(catalog.parabolic(field(3), 2))
    f = recover_sesquilinear(geom).f
    R1 = build_gamma_and_R(geom, f).R
    order = list(range(geom.num_points))[::-1]
    R2 = build_gamma_and_R(geom, f, greedy_basis(geom, order)).R
    assert R1 == R2


def test_char2_hull_of_w32():
    res = classify(_geometry(catalog.symplectic(field(2), 2)))
    h = hull(res)
    assert h.branch == "char2-extension" and h.dim == 5
    space = verify_hull(h)
    assert (space.num_points, space.num_lines) == (15, 15)
    for v in res.geometry.vectors():
        assert h.project(h.lift(v)) == v
        assert h.form.is_singular(h.lift(v))


def test_hull_is_idempotent():
    h = hull(classify(_geometry(catalog.symplectic(field(2), 2))))
    again = hull(classify(_geometry(h.form)))
    assert again.branch == "identity"
    assert again.dim == h.dim


def test_odd_symplectic_hull_is_identity():
    h = hull(classify(_geometry(catalog.symplectic(field(3), 2))))
    assert h.branch == "identity"


def test_proportional_test_finds_scalar():
    q = catalog.hyperbolic(field(5), 2)
    F = field(5)
    assert proportional_test(q, scale_form(F(2), q)) == F(2)
    assert proportional_test(q, catalog.parabolic(F, 2)) is None


def test_grids_over_large_fields_are_rejected():
    with pytest.raises(GridGeometryError):
        classify(_geometry(catalog.hyperbolic(field(5), 2)))


def test_geometry_validation_names_axiom():
    F = field(2)
    geom = _geometry(catalog.hyperbolic(F, 2))
    broken = EmbeddedGeometry(F, 4, geom.points, geom.lines[:-1])
    with pytest.raises(InvalidGeometryError) as err:
        classify(broken)
    assert err.value.details["axiom"] == "one-or-all"
    with pytest.raises(InvalidGeometryError):
        EmbeddedGeometry.from_vectors(F, 2, [[1, 0], [1, 0]], [])
    no_lines = EmbeddedGeometry(F, 4, geom.points, [])
    with pytest.raises(InvalidGeometryError) as err:
        classify(no_lines)
    assert err.value.details["axiom"] == "rank >= 2"
