from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpqforms.errors import DegreeOverflowError, GPQError, ParseError
from gpqforms.scalars import (
    AntiAutomorphism,
    FunctionField2,
    decompose_char2,
    field,
    frobenius,
    funcfield2,
    parse_ring,
    quaternions,
)

FIELDS = [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3), (2, 4), (5, 2)]


# -- naive polynomial oracle for F_p[w]/(m) -------------------------------


def _oracle_mul(F, a, b):
    p = F.p
    da, db = F.digits(a.code), F.digits(b.code)
    prod = [0] * (len(da) + len(db) - 1)
    for i, x in enumerate(da):
        for j, y in enumerate(db):
            prod[i + j] = (prod[i + j] + x * y) % p
    mod = list(F.modulus)
    n = len(mod) - 1
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * mod[i]) % p
    return (prod + [0] * n)[:n]


@pytest.mark.parametrize("p,n", FIELDS)
def test_finite_field_matches_polynomial_oracle(p, n):
    F = field(p, n)
    els = list(F.elements())
    for a in els:
        for b in els:
            assert (a * b).digits() == _oracle_mul(F, a, b)
            assert (a + b).digits() == [(x + y) % p for x, y in zip(a.digits(), b.digits())]


@pytest.mark.parametrize("p,n", FIELDS)
def test_finite_field_inverses_and_frobenius(p, n):
    F = field(p, n)
    for a in F.nonzero_elements():
        assert a * a.inverse() == F.one
    for a in F.elements():
        assert F.frobenius(a) == a**p
        assert F.frobenius(a, n) == a
    assert len(set(F.elements())) == p**n


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_char2_sqrt(n):
    F = field(2, n)
    for a in F.elements():
        r = F.sqrt(a)
        assert r * r == a


def test_fields_are_interned():
    assert field(3, 2) is field(3, 2)
    assert parse_ring("field(3,2)") is field(3, 2)
    assert funcfield2() is funcfield2("t")


@given(st.integers(0, 15), st.integers(0, 15), st.integers(0, 15))
def test_f16_ring_axioms(x, y, z):
    F = field(2, 4)
    a, b, c = (F.from_code(v) for v in (x, y, z))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a - a == F.zero


# -- F_2(t) ----------------------------------------------------------------

K = funcfield2()
polys = st.integers(0, 2**7 - 1)
nonzero_polys = st.integers(1, 2**7 - 1)


def _oracle_pmul(a, b):
    out = 0
    for i in range(a.bit_length()):
        if a >> i & 1:
            out ^= b << i
    return out


@given(polys, nonzero_polys, polys, nonzero_polys)
def test_rational_functions_add_and_multiply_like_fractions(a, b, c, d):
    x, y = K.fraction(a, b), K.fraction(c, d)
    # cross-multiplied comparison with an independent carry-less product
    s = x * y
    assert _oracle_pmul(s.num, _oracle_pmul(b, d)) == _oracle_pmul(_oracle_pmul(a, c), s.den)
    s = x + y
    lhs = _oracle_pmul(s.num, _oracle_pmul(b, d))
    rhs = _oracle_pmul(_oracle_pmul(a, d) ^ _oracle_pmul(c, b), s.den)
    assert lhs == rhs


@given(polys, nonzero_polys, polys, nonzero_polys, polys, nonzero_polys)
def test_rational_function_field_axioms(a, b, c, d, e, f):
    x, y, z = K.fraction(a, b), K.fraction(c, d), K.fraction(e, f)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + x == K.zero
    if x:
        assert x * x.inverse() == K.one


@given(polys, nonzero_polys)
def test_char2_decomposition_and_sqrt(a, b):
    u = K.fraction(a, b)
    u0, u1 = decompose_char2(u)
    assert K.is_square_class(u0) and K.is_square_class(u1)
    assert u0 + K.t * u1 == u
    r = K.sqrt(u * u)
    assert r == u


def test_degree_cap():
    small = FunctionField2("s", max_degree=8)
    x = small.fraction(1 << 8)
    with pytest.raises(DegreeOverflowError):
        x * small.t


def test_rational_function_parse_format_round_trip():
    for text in ["t^3 + t + 1", "(t + 1)/(t^2 + t + 1)", "0", "1"]:
        x = K.parse(text)
        assert K.parse(K.format(x)) == x
    assert K.parse("t/t") == K.one


# -- quaternions -----------------------------------------------------------

H = quaternions()
fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
quats = st.tuples(fracs, fracs, fracs, fracs).map(lambda c: H.quaternion(*c))


def test_quaternion_units():
    i, j, k = H.i, H.j, H.k
    assert i * i == j * j == k * k == -H.one
    assert i * j == k and j * i == -k
    assert i * j * k == -H.one


@given(quats, quats, quats)
def test_quaternion_laws(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x * y).conjugate() == y.conjugate() * x.conjugate()
    if x:
        assert x * x.inverse() == H.one == x.inverse() * x


def test_quaternion_parse_round_trip():
    x = H.quaternion(Fraction(1, 2), -3, 0, Fraction(5, 7))
    assert H.parse(H.format(x)) == x


# -- anti-automorphisms and parsing ----------------------------------------


def test_antiautomorphism_parse_and_normalize():
    assert AntiAutomorphism.parse("frob^2") == frobenius(2)
    assert AntiAutomorphism.parse("id").spec() == "id"
    assert frobenius(2).normalized(field(2, 2)).spec() == "id"
    with pytest.raises(ParseError):
        AntiAutomorphism.parse("swap")


def test_incompatible_antiautomorphism():
    with pytest.raises(GPQError):
        frobenius(1).apply(K.t)


@pytest.mark.parametrize("text", ["field(4,1)", "field(1,1)", "ring(3)", "field(2,a)"])
def test_bad_ring_specs(text):
    with pytest.raises((GPQError, ValueError)):
        parse_ring(text)
