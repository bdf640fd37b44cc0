"""Text formats: form-definition files, geometry files and JSON reports.

Form file (line oriented, ``#`` starts a comment)::

    ring = field(2,2)
    pair = pair(sigma = frob^1, eps = 1)
    dim = 2
    gram = [[1, 0], [0, 1]]
    values = [w, w]
    codefect = codefect(zero)

``values`` and ``codefect`` may be omitted together, in which case the file
describes a sesquilinear form only.  ``codefect`` alone defaults to zero.

Geometry file::

    ambient = field(2,1), dim = 4
    point 1 0 0 0
    line 0 3 5

Point coordinates are separated by whitespace or commas; line entries are
0-based indices into the listed points.
"""

from __future__ import annotations

import json
import re

from .admissible import AdmissiblePair, ClosedSubgroup, validate_pair
from .errors import GPQError, ParseError
from .forms import GenPseudoQuadraticForm, SesquilinearForm
from .scalars import AntiAutomorphism, FiniteField, Ring, parse_ring

# ---------------------------------------------------------------- lists


def _split_top(text: str, line: int, col0: int) -> list[tuple[str, int]]:
    """Split on commas outside brackets; returns (piece, column) pairs."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced bracket", line, col0 + i)
        elif ch == "," and depth == 0:
            out.append((text[start:i], col0 + start))
            start = i + 1
    if depth:
        raise ParseError("unbalanced bracket", line, col0 + len(text))
    out.append((text[start:], col0 + start))
    return out


def parse_list(text: str, line: int = 1, col0: int = 1):
    """Nested ``[a, [b, c]]`` lists of element strings."""
    s = text.strip()
    lead = len(text) - len(text.lstrip())
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("expected a bracketed list", line, col0 + lead)
    inner = s[1:-1]
    if not inner.strip():
        return []
    items = []
    for piece, col in _split_top(inner, line, col0 + lead + 1):
        if piece.strip().startswith("["):
            items.append(parse_list(piece, line, col))
        else:
            items.append((piece.strip().strip('"'), col))
    return items


def _element(ring: Ring, item, line: int):
    if isinstance(item, list):
        raise ParseError("expected an element, found a list", line)
    text, col = item
    if not text:
        raise ParseError("empty element", line, col)
    try:
        return ring.parse(text)
    except ParseError as exc:
        raise ParseError(f"bad element {text!r}: {exc}", line, col) from exc
    except GPQError:
        raise
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad element {text!r}: {exc}", line, col) from exc


# ----------------------------------------------------------- pair / codefect

_PAIR = re.compile(r"pair\(\s*sigma\s*=\s*([^,]+?)\s*,\s*eps\s*=\s*(.+?)\s*\)\s*$")
_CODEFECT = re.compile(r"codefect\(\s*(zero|full|gens\s*=\s*(\[.*\]))\s*\)\s*$")


def parse_pair(ring: Ring, text: str, line: int = 1) -> AdmissiblePair:
    m = _PAIR.match(text.strip())
    if not m:
        raise ParseError(f"expected pair(sigma = ..., eps = ...), got {text.strip()!r}", line)
    sigma = AntiAutomorphism.parse(m.group(1))
    eps = _element(ring, (m.group(2), 1), line)
    return validate_pair(ring, sigma, eps)


def parse_codefect(pair: AdmissiblePair, text: str, line: int = 1) -> ClosedSubgroup:
    m = _CODEFECT.match(text.strip())
    if not m:
        raise ParseError(f"expected codefect(zero | full | gens = [...]), got {text.strip()!r}", line)
    if m.group(1) == "zero":
        return pair.zero_subgroup
    if m.group(1) == "full":
        return pair.full_subgroup
    gens = [_element(pair.ring, it, line) for it in parse_list(m.group(2), line)]
    return ClosedSubgroup.generated(pair, gens)


# ------------------------------------------------------------ form files

_KEYS = ("ring", "pair", "dim", "gram", "values", "codefect")


def _assignments(text: str) -> dict:
    found: dict = {}
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            raise ParseError("expected 'key = value'", no, 1)
        key, value = body.split("=", 1)
        key = key.strip()
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", no, 1)
        if key in found:
            raise ParseError(f"duplicate key {key!r}", no, 1)
        found[key] = (value, no, body.index("=") + 2)
    for key in ("ring", "pair", "dim", "gram"):
        if key not in found:
            raise ParseError(f"missing key {key!r}")
    if "codefect" in found and "values" not in found:
        raise ParseError("'codefect' given without 'values'", found["codefect"][1])
    return found


def parse_form_text(text: str):
    """A GenPseudoQuadraticForm (or a SesquilinearForm when no values are given)."""
    found = _assignments(text)
    value, no, _ = found["ring"]
    try:
        ring = parse_ring(value)
    except ParseError as exc:
        raise ParseError(str(exc), no) from exc
    value, no, _ = found["pair"]
    pair = parse_pair(ring, value, no)
    value, no, col = found["dim"]
    try:
        dim = int(value.strip())
    except ValueError as exc:
        raise ParseError(f"dim must be an integer, got {value.strip()!r}", no, col) from exc
    if dim < 1:
        raise ParseError("dim must be positive", no, col)
    value, no, col = found["gram"]
    rows = parse_list(value, no, col)
    if len(rows) != dim or any(not isinstance(r, list) or len(r) != dim for r in rows):
        raise ParseError(f"gram must be a {dim}x{dim} matrix", no, col)
    gram = [[_element(ring, it, no) for it in row] for row in rows]
    if "values" not in found:
        return SesquilinearForm(pair, gram)
    value, no, col = found["values"]
    items = parse_list(value, no, col)
    if len(items) != dim:
        raise ParseError(f"values must list {dim} elements", no, col)
    values = [_element(ring, it, no) for it in items]
    codefect = pair.zero_subgroup
    if "codefect" in found:
        value, no, _ = found["codefect"]
        codefect = parse_codefect(pair, value, no)
    return GenPseudoQuadraticForm(pair, gram, values, codefect)


def read_form(path) -> GenPseudoQuadraticForm | SesquilinearForm:
    with open(path, encoding="utf-8") as fh:
        return parse_form_text(fh.read())


def form_to_dict(form) -> dict:
    ring = form.ring
    fmt = ring.format
    out = {
        "ring": ring.spec(),
        "pair": form.pair.spec(),
        "dim": str(len(form.gram)),
        "gram": [[fmt(c) for c in row] for row in form.gram],
    }
    if isinstance(form, GenPseudoQuadraticForm):
        out["values"] = [fmt(v) for v in form.values]
        out["codefect"] = form.codefect.spec()
    return out


def format_form(form) -> str:
    d = form_to_dict(form)
    lines = [f"ring = {d['ring']}", f"pair = {d['pair']}", f"dim = {d['dim']}"]
    lines.append("gram = [" + ", ".join("[" + ", ".join(row) + "]" for row in d["gram"]) + "]")
    if "values" in d:
        lines.append("values = [" + ", ".join(d["values"]) + "]")
        lines.append(f"codefect = {d['codefect']}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------- geometry files

_AMBIENT = re.compile(r"ambient\s*=\s*(field\([^)]*\))\s*,\s*dim\s*=\s*(\d+)\s*$")


def parse_geometry_text(text: str):
    from .classify import EmbeddedGeometry

    ring = None
    dim = None
    points, lines = [], []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if ring is None:
            m = _AMBIENT.match(body)
            if not m:
                raise ParseError("expected header 'ambient = field(p,n), dim = d'", no, 1)
            try:
                ring = parse_ring(m.group(1))
            except ParseError as exc:
                raise ParseError(str(exc), no) from exc
            if not isinstance(ring, FiniteField):
                raise ParseError("geometries live over finite fields", no)
            dim = int(m.group(2))
            continue
        word, _, rest = body.partition(" ")
        parts = [p for p in re.split(r"[\s,]+", rest.strip()) if p]
        if word == "point":
            if len(parts) != dim:
                raise ParseError(f"point needs {dim} coordinates, got {len(parts)}", no)
            points.append([_element(ring, (p, 1), no) for p in parts])
        elif word == "line":
            try:
                lines.append([int(p) for p in parts])
            except ValueError as exc:
                raise ParseError("line entries must be point indices", no) from exc
        else:
            raise ParseError(f"expected 'point' or 'line', got {word!r}", no, 1)
    if ring is None:
        raise ParseError("empty geometry file")
    return EmbeddedGeometry.from_vectors(ring, dim, points, lines)


def read_geometry(path):
    with open(path, encoding="utf-8") as fh:
        return parse_geometry_text(fh.read())


def format_geometry(geom) -> str:
    F = geom.ring
    out = [f"ambient = {F.spec()}, dim = {geom.dim}"]
    for v in geom.vectors():
        out.append("point " + " ".join(F.format(c) for c in v))
    for L in geom.lines:
        out.append("line " + " ".join(str(i) for i in L))
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------- JSON


def dumps(obj) -> str:
    """Key-sorted JSON; callers pass strings for every number."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
