"""Command-line front end; every subcommand writes one key-sorted JSON document."""

from __future__ import annotations

import argparse
import sys

from . import __version__, formats
from .admissible import ClosedSubgroup
from .classify import classify, hull, verify_hull
from .errors import ERROR_CODES, GPQError, ParseError
from .forms import GenPseudoQuadraticForm, as_vector
from .polar import polar_space
from .quotcov import cover_form, dominant_cover, quotient_form
from .scalars import FiniteField, parse_ring
from .verify import DEFAULT_SEED, SUITES, run_suites

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE = 0, 1, 2


class _Fail(Exception):
    def __init__(self, status: int, payload: dict):
        super().__init__(payload.get("message", ""))
        self.status = status
        self.payload = payload


# ---------------------------------------------------------------- helpers


def _load_form(path, want_quadratic: bool = True):
    try:
        form = formats.read_form(path)
    except FileNotFoundError as exc:
        raise _Fail(EXIT_PARSE, {"code": "file-not-found", "message": str(exc)}) from exc
    if want_quadratic and not isinstance(form, GenPseudoQuadraticForm):
        raise _Fail(EXIT_DOMAIN, {"code": "unsupported", "message": "this operation needs values and a codefect"})
    return form


def _load_geometry(path):
    try:
        return formats.read_geometry(path)
    except FileNotFoundError as exc:
        raise _Fail(EXIT_PARSE, {"code": "file-not-found", "message": str(exc)}) from exc


def _vector(ring, text: str, n: int):
    items = formats.parse_list("[" + text + "]")
    if any(isinstance(it, list) for it in items):
        raise ParseError("expected a flat list of coordinates")
    return as_vector(ring, [ring.parse(it[0]) for it in items], n)


def _vectors(ring, text: str, n: int):
    rows = formats.parse_list(text)
    out = []
    for row in rows:
        if not isinstance(row, list):
            raise ParseError("expected a list of vectors")
        out.append(as_vector(ring, [ring.parse(it[0]) for it in row], n))
    return out


def _subgroup(pair, text: str) -> ClosedSubgroup:
    s = text.strip()
    if not s.startswith("codefect("):
        s = f"codefect({s})"
    return formats.parse_codefect(pair, s)


def _vec_str(ring, v):
    return [ring.format(c) for c in v]


# ------------------------------------------------------------- subcommands


def cmd_pair_info(args) -> dict:
    ring = parse_ring(args.ring)
    pair = formats.parse_pair(ring, f"pair(sigma = {args.sigma}, eps = {args.eps})")
    m = pair.model
    out = {
        "ring": ring.spec(),
        "pair": pair.spec(),
        "trace_type": "true" if pair.is_trace_type() else "false",
        "lower_rank": str(pair.lower.rank),
        "upper_rank": str(pair.upper_rank()),
        "linear_model_dim": str(m.dim),
    }
    if isinstance(ring, FiniteField):
        out["lower_order"] = str(ring.p ** pair.lower.rank)
        out["upper_order"] = str(ring.p ** pair.upper_rank())
    return out


def cmd_form_eval(args) -> dict:
    form = _load_form(args.form, want_quadratic=False)
    ring = form.ring
    n = len(form.gram)
    x = _vector(ring, args.x, n)
    out = {"x": _vec_str(ring, x)}
    if isinstance(form, GenPseudoQuadraticForm):
        out["q"] = str(form(x))
        out["singular"] = "true" if form.is_singular(x) else "false"
    if args.y is not None:
        y = _vector(ring, args.y, n)
        out["y"] = _vec_str(ring, y)
        out["f"] = ring.format(form.f(x, y) if isinstance(form, GenPseudoQuadraticForm) else form(x, y))
    return out


def cmd_enumerate(args) -> dict:
    form = _load_form(args.form, want_quadratic=False)
    return polar_space(form).report()


def _provenance(op: str, **parts) -> dict:
    out = {"op": op}
    out.update(parts)
    return out


def cmd_quotient(args) -> dict:
    q = _load_form(args.form)
    U = _vectors(q.ring, args.subspace, q.dim)
    spec = quotient_form(q, U)
    return {
        "form": formats.form_to_dict(spec.form),
        "provenance": _provenance(
            "quotient",
            U=[_vec_str(q.ring, u) for u in spec.U],
            complement=[str(c) for c in spec.complement],
        ),
    }


def _cover_report(spec, op: str) -> dict:
    q = spec.q
    fmt = q.ring.format
    return {
        "form": formats.form_to_dict(spec.form),
        "provenance": _provenance(
            op,
            S=spec.S.spec(),
            T=spec.T.spec(),
            basis=[_vec_str(q.ring, e) for e in spec.E.vectors],
            block_basis=[fmt(s) for s in spec.basis],
        ),
    }


def cmd_cover(args) -> dict:
    q = _load_form(args.form)
    S = _subgroup(q.pair, args.S)
    T = _subgroup(q.pair, args.T)
    E = _vectors(q.ring, args.basis, q.dim) if args.basis else None
    return _cover_report(cover_form(q, S, T, E), "cover")


def cmd_dominant_cover(args) -> dict:
    q = _load_form(args.form)
    E = _vectors(q.ring, args.basis, q.dim) if args.basis else None
    return _cover_report(dominant_cover(q, E), "dominant-cover")


def _classification_report(res) -> dict:
    F = res.geometry.ring
    out = {
        "verdict": res.verdict,
        "sesquilinear_form": formats.form_to_dict(res.f),
        "codefect": res.R.spec(),
        "basis_points": [str(i) for i in res.gamma.basis_indices],
        "num_points": str(res.geometry.num_points),
        "num_lines": str(len(res.geometry.lines)),
        "trace_type": "true" if res.f.pair.is_trace_type() else "false",
    }
    if res.verdict != "alternating":
        out["form"] = formats.form_to_dict(res.q)
    out["ambient"] = F.spec()
    return out


def cmd_classify(args) -> dict:
    return _classification_report(classify(_load_geometry(args.geometry)))


def cmd_hull(args) -> dict:
    res = classify(_load_geometry(args.geometry))
    h = hull(res)
    if h.branch != "identity":
        verify_hull(h)
    F = res.geometry.ring
    return {
        "classification": _classification_report(res),
        "branch": h.branch,
        "dim": str(h.dim),
        "form": formats.form_to_dict(h.form),
        "lifted_points": [_vec_str(F, h.lift(v)) for v in res.geometry.vectors()],
    }


def cmd_verify(args) -> dict:
    names = None if args.suite == ["all"] else args.suite
    for n in names or []:
        if n not in SUITES:
            raise _Fail(EXIT_PARSE, {"code": "parse-error", "message": f"unknown suite {n!r}"})
    results = run_suites(names, args.seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    passed = sum(r.passed for r in results)
    report = {
        "seed": str(args.seed),
        "suites": [r.to_dict() for r in results],
        "passed": str(passed),
        "failed": str(len(results) - passed),
    }
    if passed != len(results):
        raise _Fail(EXIT_DOMAIN, {"code": "verification-failed", "message": "some suites failed", "report": report})
    return report


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    epilog = "error codes: " + ", ".join(sorted(set(ERROR_CODES) | {"file-not-found"}))
    p = argparse.ArgumentParser(
        prog="gpqforms",
        description="Generalized pseudo-quadratic forms, polar spaces, covers and embedding classification.",
        epilog=epilog,
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("pair-info", help="properties of an admissible pair", epilog=epilog)
    s.add_argument("--ring", required=True, help='e.g. "field(2,2)", "funcfield2(t)", "quaternions()"')
    s.add_argument("--sigma", default="id", help="id | frob^k | conj")
    s.add_argument("--eps", default="1")
    s.set_defaults(func=cmd_pair_info)

    s = sub.add_parser("form-eval", help="evaluate q(x) and optionally f(x, y)", epilog=epilog)
    s.add_argument("form")
    s.add_argument("--x", required=True, help='comma separated coordinates, e.g. "1, w, 0"')
    s.add_argument("--y")
    s.set_defaults(func=cmd_form_eval)

    s = sub.add_parser("enumerate", help="points, lines, rank and radical of S_q or S_f", epilog=epilog)
    s.add_argument("form")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("quotient", help="quotient by a subspace of Rad(f)", epilog=epilog)
    s.add_argument("form")
    s.add_argument("--subspace", required=True, help='list of vectors, e.g. "[[0, 0, 1]]"')
    s.set_defaults(func=cmd_quotient)

    s = sub.add_parser("cover", help="cover for a decomposition R = S + T", epilog=epilog)
    s.add_argument("form")
    s.add_argument("--S", required=True, help="zero | full | gens = [...]")
    s.add_argument("--T", required=True, help="zero | full | gens = [...]")
    s.add_argument("--basis", help="singular ordered basis as a list of vectors")
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("dominant-cover", help="cover with S = R and T = 0", epilog=epilog)
    s.add_argument("form")
    s.add_argument("--basis", help="singular ordered basis as a list of vectors")
    s.set_defaults(func=cmd_dominant_cover)

    s = sub.add_parser("classify", help="recover the form of an embedded polar space", epilog=epilog)
    s.add_argument("geometry")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("hull", help="hull of an embedded polar space", epilog=epilog)
    s.add_argument("geometry")
    s.set_defaults(func=cmd_hull)

    s = sub.add_parser("verify", help="run the verification suites", epilog=epilog)
    s.add_argument("--suite", nargs="+", default=["all"], help="all or any of: " + ", ".join(SUITES))
    s.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    s.set_defaults(func=cmd_verify)
    return p


def _emit(payload: dict, output: str | None) -> None:
    text = formats.dumps(payload)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = args.func(args)
        status = EXIT_OK
    except _Fail as exc:
        payload, status = {"error": exc.payload}, exc.status
    except ParseError as exc:
        payload, status = {"error": exc.to_dict()}, EXIT_PARSE
    except GPQError as exc:
        payload, status = {"error": exc.to_dict()}, EXIT_DOMAIN
    if isinstance(payload.get("error"), dict) and "report" in payload["error"]:
        payload = {"error": {k: v for k, v in payload["error"].items() if k != "report"}, **payload["error"]["report"]}
    _emit(payload, args.output)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
