"""Hot loops over finite-field codes, compiled with numba when available.

Every kernel has two implementations with identical results: a loop version
compiled by ``numba.njit`` and a vectorized pure-numpy version.  Set
``GPQFORMS_DISABLE_NUMBA=1`` to force the numpy path (also used automatically
when numba is not importable).  ``GPQFORMS_WORKERS`` caps the numba thread
count used by the parallel kernels.

Field elements are integer codes; arithmetic goes through dense ``add`` and
``mul`` tables plus ``inv`` and ``sig`` (the field automorphism) lookups.
"""

from __future__ import annotations

import os

import numpy as np

# the bundled TBB is often too old for numba; the omp/workqueue layers are fine here
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

try:
    import numba
    from numba import prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    prange = range
    HAVE_NUMBA = False


def _flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and not _flag("GPQFORMS_DISABLE_NUMBA")

if USE_NUMBA and os.environ.get("GPQFORMS_WORKERS"):
    try:
        numba.set_num_threads(max(1, min(int(os.environ["GPQFORMS_WORKERS"]), numba.config.NUMBA_NUM_THREADS)))
    except ValueError:
        pass


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"


def _njit(parallel=False):
    def wrap(fn):
        if not HAVE_NUMBA:
            return fn
        return numba.njit(cache=True, parallel=parallel)(fn)

    return wrap


# ------------------------------------------------------------ enumeration


def projective_points(q: int, n: int) -> np.ndarray:
    """All normalized vectors of PG(n-1, q) (first nonzero coordinate 1), lexicographically sorted."""
    blocks = []
    for lead in range(n):
        rest = n - lead - 1
        m = q**rest
        block = np.zeros((m, n), dtype=np.int64)
        block[:, lead] = 1
        idx = np.arange(m, dtype=np.int64)
        for k in range(rest):
            block[:, n - 1 - k] = idx % q
            idx //= q
        blocks.append(block)
    pts = np.concatenate(blocks[::-1], axis=0)
    return pts[np.argsort(point_keys(pts, q), kind="stable")]


def point_keys(P: np.ndarray, q: int) -> np.ndarray:
    n = P.shape[1]
    w = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return P @ w


# ------------------------------------------------------- quadratic values


@_njit()
def _quad_values_nb(P, G, vals, sig, mul, add):
    N, n = P.shape
    out = np.zeros(N, dtype=np.int64)
    for a in range(N):
        acc = 0
        for i in range(n):
            xi = P[a, i]
            if xi == 0:
                continue
            inner = mul[vals[i], xi]
            for j in range(i + 1, n):
                inner = add[inner, mul[G[i, j], P[a, j]]]
            acc = add[acc, mul[sig[xi], inner]]
        out[a] = acc
    return out


def _quad_values_np(P, G, vals, sig, mul, add):
    N, n = P.shape
    acc = np.zeros(N, dtype=np.int64)
    for i in range(n):
        inner = mul[vals[i], P[:, i]]
        for j in range(i + 1, n):
            inner = add[inner, mul[G[i, j], P[:, j]]]
        acc = add[acc, mul[sig[P[:, i]], inner]]
    return acc


def quad_values(P, G, vals, sig, mul, add) -> np.ndarray:
    """Codes of sum_{i<j} x_i^s G_ij x_j + sum_i x_i^s g_i x_i for every row x of P."""
    fn = _quad_values_nb if USE_NUMBA else _quad_values_np
    return fn(np.ascontiguousarray(P), G, vals, sig, mul, add)


# ------------------------------------------------------ sesquilinear values


@_njit(parallel=True)
def _sesq_values_nb(A, B, G, sig, mul, add):
    NA, n = A.shape
    NB = B.shape[0]
    T = np.zeros((NA, n), dtype=np.int64)
    out = np.zeros((NA, NB), dtype=np.int64)
    for a in prange(NA):
        for j in range(n):
            acc = 0
            for i in range(n):
                acc = add[acc, mul[sig[A[a, i]], G[i, j]]]
            T[a, j] = acc
        for b in range(NB):
            acc = 0
            for j in range(n):
                acc = add[acc, mul[T[a, j], B[b, j]]]
            out[a, b] = acc
    return out


def _sesq_values_np(A, B, G, sig, mul, add):
    NA, n = A.shape
    NB = B.shape[0]
    SA = sig[A]
    T = np.zeros((NA, n), dtype=np.int64)
    for j in range(n):
        acc = np.zeros(NA, dtype=np.int64)
        for i in range(n):
            acc = add[acc, mul[SA[:, i], G[i, j]]]
        T[:, j] = acc
    out = np.zeros((NA, NB), dtype=np.int64)
    for j in range(n):
        out = add[out, mul[T[:, j][:, None], B[:, j][None, :]]]
    return out


def sesq_values(A, B, G, sig, mul, add) -> np.ndarray:
    """Matrix of codes f(a, b) = sum_ij a_i^s G_ij b_j for rows a of A and b of B."""
    fn = _sesq_values_nb if USE_NUMBA else _sesq_values_np
    return fn(np.ascontiguousarray(A), np.ascontiguousarray(B), G, sig, mul, add)


# ------------------------------------------------------------------ lines


@_njit()
def _normalize_key(v, inv, mul, q):
    n = v.shape[0]
    lead = 0
    for i in range(n):
        if v[i] != 0:
            lead = v[i]
            break
    s = inv[lead]
    key = 0
    for i in range(n):
        key = key * q + mul[s, v[i]]
    return key


@_njit()
def _lines_nb(S, Z, keys, inv, mul, add, q):
    Ns, n = S.shape
    covered = np.zeros((Ns, Ns), dtype=np.bool_)
    cap = 16
    out = np.empty((cap, q + 1), dtype=np.int64)
    count = 0
    v = np.empty(n, dtype=np.int64)
    pts = np.empty(q + 1, dtype=np.int64)
    for a in range(Ns):
        for b in range(a + 1, Ns):
            if not Z[a, b] or covered[a, b]:
                continue
            pts[0] = a
            pts[1] = b
            ok = True
            for lam in range(1, q):
                for i in range(n):
                    v[i] = add[mul[S[a, i], lam], S[b, i]]
                k = _normalize_key(v, inv, mul, q)
                idx = np.searchsorted(keys, k)
                if idx >= Ns or keys[idx] != k:
                    ok = False
                    break
                pts[lam + 1] = idx
            if not ok:
                return out[:0].copy(), False
            srt = np.sort(pts)
            for x in range(q + 1):
                for y in range(x + 1, q + 1):
                    covered[srt[x], srt[y]] = True
            if count == cap:
                cap *= 2
                grown = np.empty((cap, q + 1), dtype=np.int64)
                grown[:count] = out[:count]
                out = grown
            out[count] = srt
            count += 1
    return out[:count].copy(), True


def _lines_np(S, Z, keys, inv, mul, add, q):
    Ns, n = S.shape
    covered = np.zeros((Ns, Ns), dtype=bool)
    lams = np.arange(1, q, dtype=np.int64)
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    out = []
    ia, ib = np.nonzero(np.triu(Z, 1))
    for a, b in zip(ia.tolist(), ib.tolist()):
        if covered[a, b]:
            continue
        V = add[mul[S[a][None, :], lams[:, None]], S[b][None, :]]
        lead = V[np.arange(len(V)), (V != 0).argmax(axis=1)]
        V = mul[inv[lead][:, None], V]
        k = V @ weights
        idx = np.searchsorted(keys, k)
        idx_c = np.minimum(idx, Ns - 1)
        if np.any(idx >= Ns) or np.any(keys[idx_c] != k):
            return np.zeros((0, q + 1), dtype=np.int64), False
        pts = np.sort(np.concatenate(([a, b], idx)))
        covered[np.ix_(pts, pts)] = True
        out.append(pts)
    if not out:
        return np.zeros((0, q + 1), dtype=np.int64), True
    return np.array(out, dtype=np.int64), True


def lines(S, Z, keys, inv, mul, add, q):
    """Lines spanned by pairs of rows of S flagged in Z.

    S holds normalized points sorted by key; returns (array of sorted index
    rows, ok) where ok is False when some line leaves the point set.
    """
    fn = _lines_nb if USE_NUMBA else _lines_np
    L, ok = fn(np.ascontiguousarray(S), np.ascontiguousarray(Z), keys, inv, mul, add, q)
    if len(L):
        L = L[np.lexsort(L.T[::-1])]
    return L, ok


# --------------------------------------------------------------- rref mod p


@_njit()
def _rref_mod_p_nb(A, p):
    M = A.copy() % p
    rows, cols = M.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if M[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(cols):
                tmp = M[r, j]
                M[r, j] = M[piv, j]
                M[piv, j] = tmp
        # inverse by Fermat
        a = M[r, c]
        inv = 1
        e = p - 2
        base = a
        while e > 0:
            if e & 1:
                inv = inv * base % p
            base = base * base % p
            e >>= 1
        for j in range(cols):
            M[r, j] = M[r, j] * inv % p
        for i in range(rows):
            if i != r and M[i, c] != 0:
                f = M[i, c]
                for j in range(cols):
                    M[i, j] = (M[i, j] - f * M[r, j]) % p
        pivots[r] = c
        r += 1
    return M[:r].copy(), pivots[:r].copy()


def _rref_mod_p_np(A, p):
    M = np.array(A, dtype=np.int64) % p
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r] = M[r] * inv % p
        f = M[:, c].copy()
        f[r] = 0
        M = (M - np.outer(f, M[r])) % p
        pivots.append(c)
        r += 1
    return M[:r], np.array(pivots, dtype=np.int64)


def rref_mod_p(A, p: int):
    """Reduced row echelon form over F_p; returns (nonzero rows, pivot columns)."""
    A = np.ascontiguousarray(np.asarray(A, dtype=np.int64))
    if A.size == 0:
        return A.reshape(0, A.shape[1] if A.ndim == 2 else 0), np.zeros(0, dtype=np.int64)
    fn = _rref_mod_p_nb if USE_NUMBA else _rref_mod_p_np
    return fn(A, p)


def nullspace_mod_p(A, p: int, ncols: int) -> np.ndarray:
    """Basis (rows) of {y : A y = 0} over F_p."""
    if len(A) == 0:
        return np.eye(ncols, dtype=np.int64)
    R, piv = rref_mod_p(A, p)
    pivset = set(int(c) for c in piv)
    free = [c for c in range(ncols) if c not in pivset]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for r, c in enumerate(piv):
            out[k, c] = (-R[r, f]) % p
    return out
