from __future__ import annotations

import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gpqforms import _kernels as K
from gpqforms.scalars import field

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")


def _tables(p, n):
    F = field(p, n)
    t = F.tables()
    sig = np.array([F.frobenius(F.from_code(c)).code for c in range(F.order)], dtype=np.int64)
    return F, t["add"], t["mul"], t["inv"], sig


@needs_numba
@pytest.mark.parametrize("p,n,dim", [(2, 1, 4), (3, 1, 3), (2, 2, 3), (5, 1, 3)])
def test_quad_and_sesq_values_agree_across_backends(p, n, dim):
    F, add, mul, inv, sig = _tables(p, n)
    rng = np.random.default_rng(p * 100 + n * 10 + dim)
    P = K.projective_points(F.order, dim)
    G = rng.integers(0, F.order, size=(dim, dim))
    vals = rng.integers(0, F.order, size=dim)
    a = K._quad_values_nb(P, G, vals, sig, mul, add)
    b = K._quad_values_np(P, G, vals, sig, mul, add)
    assert np.array_equal(a, b)
    A, B = P[:20], P[-15:]
    assert np.array_equal(K._sesq_values_nb(A, B, G, sig, mul, add), K._sesq_values_np(A, B, G, sig, mul, add))


@needs_numba
@given(st.integers(0, 2**31), st.sampled_from([2, 3, 5, 7]))
def test_rref_agrees_across_backends(seed, p):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, p, size=(rng.integers(1, 7), rng.integers(1, 7)))
    R1, piv1 = K._rref_mod_p_nb(np.ascontiguousarray(A), p)
    R2, piv2 = K._rref_mod_p_np(np.ascontiguousarray(A), p)
    assert np.array_equal(R1 % p, R2 % p)
    assert list(piv1) == list(piv2)


@given(st.integers(0, 2**31), st.sampled_from([2, 3, 5]))
def test_nullspace_is_a_kernel_basis(seed, p):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 6)), int(rng.integers(1, 7))
    A = rng.integers(0, p, size=(m, n))
    N = K.nullspace_mod_p(A, p, n)
    assert not ((A @ N.T) % p).any()
    rank = len(K.rref_mod_p(A, p)[1])
    assert len(N) == n - rank


def test_projective_points_are_normalized_and_distinct():
    P = K.projective_points(3, 3)
    assert len(P) == (27 - 1) // 2
    for row in P:
        nz = row[row != 0]
        assert nz[0] == 1
    assert len({tuple(r) for r in P}) == len(P)


def test_numpy_fallback_selected_by_environment():
    script = (
        "import json\n"
        "from gpqforms import _kernels, catalog, polar\n"
        "from gpqforms.scalars import field\n"
        "s = polar.polar_space(catalog.hermitian(field(2, 2), 4))\n"
        "print(json.dumps([_kernels.backend(), s.num_points, s.num_lines, s.rank]))\n"
    )
    env = dict(os.environ, GPQFORMS_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", script], env=env, capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == ["numpy", 45, 27, 2]
