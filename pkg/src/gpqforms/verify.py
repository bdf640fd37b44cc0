"""Verification suites, shared by the ``verify`` subcommand and the test suite.

Every suite is deterministic given its seed and returns a :class:`SuiteResult`
counting individual checks and listing the first failures.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from functools import lru_cache

from . import catalog, linalg
from .classify import ALTERNATING, GPQ, EmbeddedGeometry, classify, hull, proportional_test, verify_hull
from .errors import DegreeOverflowError, GPQError
from .forms import (
    GenPseudoQuadraticForm,
    difference_map_closed,
    difference_map_direct,
    find_singular_basis,
    random_singular_basis,
    random_vector,
)
from .polar import polar_space
from .quotcov import basis_change_iso, cover_form, cover_with_basis, quotient_form
from .scalars import field as finite_field
from .scalars import funcfield2, quaternions

DEFAULT_SEED = 20240607
MAX_FAILURES = 5


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures and self.checks > 0

    def check(self, ok: bool, message: str) -> bool:
        self.checks += 1
        if not ok and len(self.failures) < MAX_FAILURES:
            self.failures.append(message)
        elif not ok:
            self.info["suppressed_failures"] = self.info.get("suppressed_failures", 0) + 1
        return ok

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.checks} checks, {len(self.failures)} failures, {self.seconds:.2f}s"

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "passed": "true" if self.passed else "false",
            "checks": str(self.checks),
            "failures": list(self.failures),
        }
        if self.info:
            out["info"] = {k: str(v) for k, v in sorted(self.info.items())}
        return out


def _timed(fn):
    def run(seed: int = DEFAULT_SEED) -> SuiteResult:
        t = time.perf_counter()
        res = fn(seed)
        res.seconds = time.perf_counter() - t
        return res

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# ------------------------------------------------------------------ inputs


def _max_degree(q: GenPseudoQuadraticForm) -> int:
    entries = [c for row in q.gram for c in row] + list(q.values)
    return max(max(c.num.bit_length(), c.den.bit_length()) - 1 for c in entries)


def random_char2_forms(rng: random.Random, count: int, max_degree: int = 8) -> list:
    """Non-trivial forms over F_2(t) with dim <= 4, codefect rank <= 1 and entries of degree <= 8.

    Rank 2 codefects are the whole of F_2(t) and make the form trivial, so
    they do not occur.
    """
    out = []
    while len(out) < count:
        n = rng.randint(2, 4)
        try:
            q, E = catalog.random_char2_form(rng, n, rng.randint(0, 1))
        except DegreeOverflowError:
            continue
        if q.is_trivial() or _max_degree(q) > max_degree:
            continue
        out.append((q, E))
    return out


def builtin_gpq_forms() -> dict:
    """Every built-in generalized form (finite, F_2(t), quaternion)."""
    forms = {k: v for k, v in catalog.finite_builtins().items() if isinstance(v, GenPseudoQuadraticForm)}
    forms["char2-hyperbolic(2, R = <1>)"] = catalog.char2_hyperbolic(1, (1,))
    forms["char2-hyperbolic(4, R = <t>)"] = catalog.char2_hyperbolic(2, ("t",))
    forms["quaternion(4)"] = catalog.builtin_quaternion_form()
    return forms


def _vec(ring, n, rng):
    if ring is funcfield2():
        return random_vector(ring, n, rng, degree=3)
    return random_vector(ring, n, rng)


# ------------------------------------------------------------------ suites


@_timed
def suite_round_trip(seed: int) -> SuiteResult:
    """quotient(cover(q), S) == q for random F_2(t) forms and all built-ins."""
    res = SuiteResult("cover/quotient round trip")
    rng = random.Random(seed)
    cases = [(name, q, None) for name, q in builtin_gpq_forms().items()]
    cases += [(f"random F_2(t) #{i}", q, E) for i, (q, E) in enumerate(random_char2_forms(rng, 100))]
    for name, q, E in cases:
        R = q.codefect
        zero = q.pair.zero_subgroup
        decomps = [(R, zero)] if R == zero else [(R, zero), (zero, R)]
        for S, T in decomps:
            try:
                spec = cover_form(q, S, T, E)
                back = quotient_form(spec.form, spec.block_subspace()).form
            except GPQError as exc:
                res.check(False, f"{name}: {exc.code}: {exc}")
                continue
            res.check(back.codefect == q.codefect, f"{name}: codefect differs after round trip")
            ok = True
            for _ in range(500):
                t = q.ring.random_element(rng) if q.ring is not funcfield2() else q.ring.random_element(rng, degree=6)
                if back.codefect.contains(t) != q.codefect.contains(t):
                    ok = False
                    break
            res.check(ok, f"{name}: codefect membership differs")
            ok = True
            for _ in range(500):
                v = _vec(q.ring, q.dim, rng)
                if back(v) != q(v):
                    ok = False
                    break
            res.check(ok, f"{name}: eval_q differs after round trip")
    res.info["forms"] = len(cases)
    return res


def _finite_test_forms(rng: random.Random) -> dict:
    forms = {k: v for k, v in catalog.finite_builtins().items() if isinstance(v, GenPseudoQuadraticForm)}
    for (p, n) in ((2, 1), (3, 1), (2, 2), (5, 1)):
        F = finite_field(p, n)
        pair = catalog.orthogonal_pair(F)
        for k in range(3):
            forms[f"random orthogonal over F_{F.order} #{k}"] = catalog.random_form(pair, rng.randint(2, 4), rng)
    F4 = finite_field(2, 2)
    for k in range(3):
        forms[f"random hermitian over F_4 #{k}"] = catalog.random_form(catalog.hermitian_pair(F4), rng.randint(2, 4), rng)
    return forms


@_timed
def suite_form_invariants(seed: int) -> SuiteResult:
    """Codefect generators lie in K-bar-circ; singular points are isotropic."""
    res = SuiteResult("codefect in K-bar-circ and singular => isotropic")
    rng = random.Random(seed)
    all_forms = dict(builtin_gpq_forms())
    for i, (q, _) in enumerate(random_char2_forms(rng, 20)):
        all_forms[f"random F_2(t) #{i}"] = q
    finite = _finite_test_forms(rng)
    all_forms.update(finite)
    for name, q in all_forms.items():
        if q.codefect.is_full:
            continue
        for g in q.codefect.generators:
            res.check(q.pair.in_upper(g), f"{name}: generator {g} outside K^(sigma,eps)")
    points = 0
    for name, q in finite.items():
        space = polar_space(q)
        for v in space.point_vectors():
            points += 1
            res.check(not q.f(v, v), f"{name}: singular point {v} is not isotropic")
    res.info["points"] = points
    return res


def classification_sources() -> dict:
    """Built-in sources for the classification suites (rank >= 2 only)."""
    out = {}
    for q, (p, n) in {2: (2, 1), 3: (3, 1), 4: (2, 2)}.items():
        F = finite_field(p, n)
        out[f"hyperbolic(4,{q})"] = catalog.hyperbolic(F, 2)
        out[f"parabolic(5,{q})"] = catalog.parabolic(F, 2)
        out[f"elliptic(6,{q})"] = catalog.elliptic(F, 3)
        out[f"symplectic(4,{q})"] = catalog.symplectic(F, 2)
    out["hermitian(4,4)"] = catalog.hermitian(finite_field(2, 2), 4)
    return out


@lru_cache(maxsize=None)
def _classified(name: str):
    src = classification_sources()[name]
    geom = EmbeddedGeometry.from_polar_space(polar_space(src))
    return src, classify(geom)


def _gram_ratio(G1, G2):
    kappa = None
    for r1, r2 in zip(G1, G2):
        for a, b in zip(r1, r2):
            if a:
                if kappa is None:
                    kappa = b / a
                if b != kappa * a:
                    return None
            elif b:
                return None
    return kappa


@_timed
def suite_classification(seed: int) -> SuiteResult:
    """classify(enumerate(S_q)) is proportional to q; symplectic => alternating."""
    res = SuiteResult("classification soundness")
    for name in classification_sources():
        try:
            src, out = _classified(name)
        except GPQError as exc:
            res.check(False, f"{name}: {exc.code}: {exc}")
            continue
        if isinstance(src, GenPseudoQuadraticForm):
            res.check(out.verdict == GPQ, f"{name}: verdict {out.verdict}")
            res.check(proportional_test(src, out.q) is not None, f"{name}: recovered form not proportional")
        else:
            res.check(out.verdict == ALTERNATING, f"{name}: verdict {out.verdict}")
            res.check(_gram_ratio(src.gram, out.f.gram) is not None, f"{name}: recovered f not proportional")
    return res


@_timed
def suite_char2_hull(seed: int) -> SuiteResult:
    """Hull of W(3,2): 5-dim quadratic form, 15 points, 15 lines, bijective projection."""
    res = SuiteResult("char-2 hull of W(3,2)")
    _, out = _classified("symplectic(4,2)")
    h = hull(out)
    res.check(h.branch == "char2-extension", f"branch {h.branch}")
    res.check(h.dim == 5, f"hull dimension {h.dim}")
    res.check(h.form.codefect.is_zero, "hull form is not quadratic (codefect non-zero)")
    space = polar_space(h.form)
    res.check(space.num_points == 15, f"{space.num_points} points")
    res.check(space.num_lines == 15, f"{space.num_lines} lines")
    try:
        verify_hull(h)
        res.check(True, "")
    except GPQError as exc:
        res.check(False, str(exc))
    return res


ENUMERATION_EXPECTED = {
    "Q+(3,2)": {"points": 9, "lines": 6, "rank": 2},
    "W(3,2)": {"points": 15, "lines": 15, "rank": 2},
    "Q+(5,2)": {"points": 35, "rank": 3},
    "Q(4,2)": {"points": 15, "rank": 2},
}


def enumeration_sources() -> dict:
    F2 = finite_field(2, 1)
    return {
        "Q+(3,2)": catalog.hyperbolic(F2, 2),
        "W(3,2)": catalog.symplectic(F2, 2),
        "Q+(5,2)": catalog.hyperbolic(F2, 3),
        "Q(4,2)": catalog.parabolic(F2, 2),
    }


@_timed
def suite_enumeration(seed: int) -> SuiteResult:
    """Locked point/line/rank counts of small polar spaces."""
    res = SuiteResult("enumeration regressions")
    for name, src in enumeration_sources().items():
        space = polar_space(src)
        got = {"points": space.num_points, "lines": space.num_lines, "rank": space.rank}
        for key, want in ENUMERATION_EXPECTED[name].items():
            res.check(got[key] == want, f"{name}: {key} = {got[key]}, expected {want}")
    return res


@_timed
def suite_quaternion(seed: int) -> SuiteResult:
    """Homogeneity, polarization, reflexivity and K_(sigma,eps) = Q for the quaternion form."""
    res = SuiteResult("quaternion exceptional form")
    rng = random.Random(seed)
    q = catalog.builtin_quaternion_form()
    H = quaternions()
    pair = q.pair
    q1 = q2 = lower = 0
    for _ in range(1000):
        x = random_vector(H, 4, rng)
        y = random_vector(H, 4, rng)
        lam = H.random_element(rng)
        q1 += q(linalg.vec_scale(x, lam)) != q(x).circ(lam)
        q2 += q(linalg.vec_add(x, y)) - q(x) - q(y) != q.coset(q.f(x, y))
        t = H.random_element(rng) if rng.random() < 0.5 else H(rng.randint(-9, 9))
        lower += pair.in_lower(t) != all(c == 0 for c in t.components[1:])
    res.check(q1 == 0, f"q(x lam) != lam^sigma q(x) lam on {q1} samples")
    res.check(q2 == 0, f"q(x + y) != q(x) + q(y) + f(x, y) on {q2} samples")
    res.check(lower == 0, f"K_(sigma,eps) membership differs from the real-part test on {lower} samples")
    f = q.sesquilinearization(rng)
    res.check(f.is_reflexive(), "sesquilinearization is not reflexive")
    res.check(pair.eps == -H.one, f"eps = {pair.eps}")
    return res


def _difference_instances(rng: random.Random) -> list:
    out = [(f"random F_2(t) #{i}", q, E) for i, (q, E) in enumerate(random_char2_forms(rng, 6))]
    for name in ("hyperbolic(4,2)", "parabolic(5,2)", "hyperbolic(4,3)", "parabolic(5,3)", "elliptic(6,3)"):
        q = classification_sources()[name]
        out.append((name, q, find_singular_basis(q)))
    return out


@_timed
def suite_difference_map(seed: int) -> SuiteResult:
    """delta_{E,E'} direct == closed form, and delta_{E',E} = -delta_{E,E'}."""
    res = SuiteResult("difference-map closed form")
    rng = random.Random(seed)
    inst = _difference_instances(rng)
    for k in range(200):
        name, q, E = inst[k % len(inst)]
        E1 = random_singular_basis(q, rng, E, degree=1)
        E2 = random_singular_basis(q, rng, E, degree=1)
        x = _vec(q.ring, q.dim, rng)
        d12 = difference_map_direct(q, E1, E2, x)
        res.check(d12 == difference_map_closed(q, E1, E2, x), f"{name}: direct != closed at {x}")
        res.check(difference_map_direct(q, E2, E1, x) == -d12, f"{name}: antisymmetry fails at {x}")
    return res


@_timed
def suite_basis_change(seed: int) -> SuiteResult:
    """q_E^{S,T}(v) = q_{E'}^{S,T}(Delta v) on 500 random v per instance."""
    res = SuiteResult("basis-change isomorphism")
    rng = random.Random(seed)
    forms = [(q, E) for q, E in random_char2_forms(rng, 12) if not q.codefect.is_zero][:4]
    forms.append((catalog.char2_hyperbolic(1, (1,)), None))
    forms.append((catalog.hyperbolic(finite_field(3, 1), 2), None))
    for idx, (q, E) in enumerate(forms):
        E = E or find_singular_basis(q)
        R, zero = q.codefect, q.pair.zero_subgroup
        for S, T in ([(R, zero), (zero, R)] if R != zero else [(R, zero)]):
            spec = cover_form(q, S, T, E)
            E2 = random_singular_basis(q, rng, E, degree=1)
            D = basis_change_iso(spec, E2)
            spec2 = cover_with_basis(spec, E2)
            bad = 0
            for _ in range(500):
                v = _vec(q.ring, spec.form.dim, rng)
                bad += spec.form(v) != spec2.form(linalg.mat_vec(D, v))
            res.check(bad == 0, f"instance {idx}: {bad} mismatches")
            back = basis_change_iso(spec2, E)
            ident = linalg.mat_mul(back, D) == linalg.identity(spec.form.dim, q.ring)
            res.check(ident, f"instance {idx}: Delta_(E',E) Delta_(E,E') is not the identity")
    return res


@_timed
def suite_trace_type(seed: int) -> SuiteResult:
    """Over trace-type pairs the constructed R is zero or full."""
    res = SuiteResult("trace-type dichotomy")
    seen = 0
    for name in classification_sources():
        _, out = _classified(name)
        if out.f.pair.is_trace_type():
            seen += 1
            res.check(out.R.is_zero or out.R.is_full, f"{name}: intermediate codefect {out.R.spec()}")
    res.info["trace_type_geometries"] = seen
    return res


SUITES = {
    "round-trip": suite_round_trip,
    "form-invariants": suite_form_invariants,
    "classification": suite_classification,
    "char2-hull": suite_char2_hull,
    "enumeration": suite_enumeration,
    "quaternion": suite_quaternion,
    "difference-map": suite_difference_map,
    "basis-change": suite_basis_change,
    "trace-type": suite_trace_type,
}


def run_suites(names=None, seed: int = DEFAULT_SEED) -> list[SuiteResult]:
    if names is None or names == ["all"]:
        names = list(SUITES)
    return [SUITES[n](seed) for n in names]
