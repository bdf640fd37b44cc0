from __future__ import annotations

import json
import subprocess
import sys

import pytest

from gpqforms import catalog, formats
from gpqforms.classify import EmbeddedGeometry
from gpqforms.cli import main
from gpqforms.errors import NotReflexiveError, ParseError
from gpqforms.polar import polar_space
from gpqforms.scalars import field

HERMITIAN = """\
ring = field(2,2)
pair = pair(sigma = frob^1, eps = 1)
dim = 3
gram = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
values = [0, 0, w]
codefect = codefect(zero)
"""

CHAR2 = """\
ring = funcfield2(t)
pair = pair(sigma = id, eps = 1)
dim = 2
gram = [[0, 1], [1, 0]]
values = [0, 0]
codefect = codefect(gens = [t])
"""


@pytest.mark.parametrize(
    "form",
    [
        catalog.hermitian(field(2, 2), 4),
        catalog.char2_hyperbolic(2, ("t",)),
        catalog.builtin_quaternion_form(),
        catalog.symplectic(field(3), 2),
        catalog.elliptic(field(3), 2),
    ],
)
def test_form_text_round_trip(form):
    text = formats.format_form(form)
    assert formats.parse_form_text(text) == form


def test_geometry_round_trip():
    geom = EmbeddedGeometry.from_polar_space(polar_space(catalog.hyperbolic(field(3), 2)))
    again = formats.parse_geometry_text(formats.format_geometry(geom))
    assert (again.points == geom.points).all()
    assert again.lines == geom.lines


def test_parse_errors_carry_position():
    bad = HERMITIAN.replace("gram = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]", "gram = [[0, 1, 0], [1, 0, 0], [0, 0, 1]")
    with pytest.raises(ParseError) as err:
        formats.parse_form_text(bad)
    assert err.value.line == 4
    with pytest.raises(ParseError) as err:
        formats.parse_form_text(HERMITIAN + "colour = blue\n")
    assert err.value.line == 7
    with pytest.raises(ParseError):
        formats.parse_form_text(HERMITIAN.replace("dim = 3", "dim = three"))
    with pytest.raises(ParseError):
        formats.parse_form_text("ring = field(2,1)\n")


def test_non_reflexive_gram_is_reported():
    text = HERMITIAN.replace("[[0, 1, 0], [1, 0, 0]", "[[0, w, 0], [w, 0, 0]")
    with pytest.raises(NotReflexiveError) as err:
        formats.parse_form_text(text)
    assert err.value.details["entry"] == (1, 2)


def test_form_without_values_is_sesquilinear():
    text = "\n".join(HERMITIAN.splitlines()[:4]) + "\n"
    form = formats.parse_form_text(text)
    assert not hasattr(form, "values")


# -- command line -----------------------------------------------------------


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def _all_strings(obj):
    if isinstance(obj, dict):
        return all(isinstance(k, str) and _all_strings(v) for k, v in obj.items())
    if isinstance(obj, list):
        return all(_all_strings(v) for v in obj)
    return isinstance(obj, str)


@pytest.fixture
def files(tmp_path):
    h = tmp_path / "h.form"
    h.write_text(HERMITIAN)
    c = tmp_path / "c.form"
    c.write_text(CHAR2)
    geom = EmbeddedGeometry.from_polar_space(polar_space(catalog.symplectic(field(2), 2)))
    g = tmp_path / "w32.geom"
    g.write_text(formats.format_geometry(geom))
    return {"h": str(h), "c": str(c), "g": str(g), "dir": tmp_path}


def test_pair_info(capsys):
    code, out = _run(capsys, "pair-info", "--ring", "field(2,2)", "--sigma", "frob^1", "--eps", "1")
    assert code == 0
    assert out["trace_type"] == "true" and out["lower_order"] == "2"
    assert _all_strings(out)


def test_form_eval_and_enumerate(capsys, files):
    code, out = _run(capsys, "form-eval", files["h"], "--x", "1, w, 1", "--y", "0, 1, 0")
    assert code == 0 and out["singular"] == "true" and out["f"] == "1"
    code, out = _run(capsys, "enumerate", files["h"])
    assert code == 0 and out["num_points"] == "9" and out["num_lines"] == "0"
    assert _all_strings(out)


def test_cover_and_quotient_provenance(capsys, files):
    code, out = _run(capsys, "dominant-cover", files["c"])
    assert code == 0
    assert out["provenance"]["op"] == "dominant-cover"
    assert out["provenance"]["S"] == "codefect(gens = [t])"
    assert out["form"]["dim"] == "3"
    code, out = _run(capsys, "cover", files["c"], "--S", "zero", "--T", "gens = [t]")
    assert code == 0 and out["form"]["dim"] == "2"
    cover = files["dir"] / "cover.form"
    cover.write_text(
        "ring = funcfield2(t)\npair = pair(sigma = id, eps = 1)\ndim = 3\n"
        "gram = [[0, 1, 0], [1, 0, 0], [0, 0, 0]]\nvalues = [0, 0, t]\n"
    )
    code, out = _run(capsys, "quotient", str(cover), "--subspace", "[[0, 0, 1]]")
    assert code == 0
    assert out["form"]["codefect"] == "codefect(gens = [t])"
    assert out["provenance"]["U"] == [["0", "0", "1"]]


def test_classify_and_hull(capsys, files):
    code, out = _run(capsys, "classify", files["g"])
    assert code == 0 and out["verdict"] == "alternating"
    code, out = _run(capsys, "hull", files["g"])
    assert code == 0 and out["branch"] == "char2-extension" and out["dim"] == "5"
    assert len(out["lifted_points"]) == 15


def test_exit_codes(capsys, files):
    code, out = _run(capsys, "enumerate", str(files["dir"] / "missing.form"))
    assert code == 2 and out["error"]["code"] == "file-not-found"
    bad = files["dir"] / "bad.form"
    bad.write_text(HERMITIAN.replace("values = [0, 0, w]", "values = [0, 0, 1]"))
    code, out = _run(capsys, "enumerate", str(bad))
    assert code == 1 and out["error"]["code"] == "q2-violation"
    bad.write_text("ring = field(2,2)\npair = nonsense\n")
    code, out = _run(capsys, "enumerate", str(bad))
    assert code == 2 and out["error"]["code"] == "parse-error"
    code, out = _run(capsys, "cover", files["c"], "--S", "gens = [t]", "--T", "gens = [t]")
    assert code == 1 and out["error"]["code"] == "not-a-direct-sum"


def test_output_option_and_verify(capsys, tmp_path):
    target = tmp_path / "v.json"
    code = main(["--output", str(target), "verify", "--suite", "enumeration", "--seed", "7"])
    assert code == 0
    report = json.loads(target.read_text())
    assert report["seed"] == "7" and report["passed"] == "1"
    assert "[PASS] enumeration regressions" in capsys.readouterr().err


def test_help_lists_error_codes():
    out = subprocess.run([sys.executable, "-m", "gpqforms", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "not-a-direct-sum" in out.stdout and "parse-error" in out.stdout
