"""Time the numba and numpy implementations of the hot kernels side by side.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel is called once first so numba compilation is excluded.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gpqforms import _kernels as K
from gpqforms import catalog
from gpqforms.polar import _Arrays
from gpqforms.scalars import field


def _best(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    """(label, {backend: thunk}) pairs."""
    out = []
    for label, src in [
        ("elliptic(6,4)", catalog.elliptic(field(2, 2), 3)),
        ("hermitian(5,4)", catalog.hermitian(field(2, 2), 5)),
        ("parabolic(7,3)", catalog.parabolic(field(3), 3)),
    ]:
        a = _Arrays(src)
        P = K.projective_points(a.F.order, src.dim)
        S = np.ascontiguousarray(P[a.singular_mask(P)])
        out.append((
            f"quad_values {label} [{len(P)} pts]",
            {"numba": lambda P=P, a=a: K._quad_values_nb(P, a.G, a.vals, a.sig, a.mul, a.add),
             "numpy": lambda P=P, a=a: K._quad_values_np(P, a.G, a.vals, a.sig, a.mul, a.add)},
        ))
        out.append((
            f"sesq_values {label} [{len(S)}^2 pairs]",
            {"numba": lambda S=S, a=a: K._sesq_values_nb(S, S, a.G, a.sig, a.mul, a.add),
             "numpy": lambda S=S, a=a: K._sesq_values_np(S, S, a.G, a.sig, a.mul, a.add)},
        ))
    A = np.ascontiguousarray(np.random.default_rng(0).integers(0, 3, size=(120, 160)))
    out.append((
        "rref_mod_p 120x160 over F_3",
        {"numba": lambda: K._rref_mod_p_nb(A, 3), "numpy": lambda: K._rref_mod_p_np(A, 3)},
    ))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not K.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    print(f"{'kernel':48s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, run in cases():
        t_nb = _best(run["numba"], args.repeat)
        t_np = _best(run["numpy"], args.repeat)
        print(f"{name:48s} {t_nb * 1e3:8.2f}ms {t_np * 1e3:8.2f}ms {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
