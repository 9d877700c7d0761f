import csv
import json

import numpy as np
import numpy.testing as npt
import pytest

from olpuc import cli, measure as M
from olpuc.errors import ParseError

LEB = {"kind": "lebesgue"}
TRIG = {"kind": "trig_poly_weight", "params": {"a": 0.5}}
EXPCOS = {"kind": "exp_cos_weight"}


@pytest.fixture
def mfile(tmp_path):
    def write(obj, name="m.json"):
        p = tmp_path / name
        p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
        return str(p)
    return write


def test_fourier_table_equals_trig():
    spec = cli.parse_measure({"kind": "fourier_table", "coeffs": {"0": [1, 0], "1": [0.25, 0], "-1": [0.25, 0]}})
    for n in range(-3, 4):
        npt.assert_allclose(M.fourier_coeff(spec, n), M.fourier_coeff(M.trig_poly_weight(0.5), n), atol=1e-15)


def test_decorated_spec():
    obj = {"kind": "decorated", "base": LEB,
           "decorations": [{"kind": "miwa1_minus", "w": [2, 0]}, {"kind": "linear_z", "lambda": 0.3}]}
    spec = cli.parse_measure(obj)
    assert spec.kind == "decorated"
    times = {"kind": "decorated", "base": LEB, "decorations": [{"kind": "toda_exp", "times": {"t1": [0.1]}}]}
    npt.assert_allclose(M.fourier_coeff(cli.parse_measure(times), 1), 0.1)


@pytest.mark.parametrize("obj,field", [
    ({"kind": "nope"}, "$.kind"),
    ({"kind": "fourier_table", "coeffs": {"x": 1}}, "$.coeffs"),
    ({"kind": "fourier_table", "coeffs": {"0": "one"}}, "$.coeffs['0']"),
    ({"kind": "fourier_table"}, "$.coeffs"),
    ({"kind": "trig_poly_weight", "params": {"a": 1.5}}, "$"),
    ({"kind": "decorated", "decorations": []}, "$.base"),
    ({"kind": "lebesgue", "decorations": [{"kind": "miwa1_plus"}]}, "$.decorations[0].w"),
    ({"kind": "lebesgue", "decorations": [{"kind": "linear_z"}]}, "$.decorations[0].lambda"),
])
def test_parse_errors_name_the_field(obj, field):
    with pytest.raises(ParseError, match=field.replace("[", r"\[").replace("$", r"\$")):
        cli.parse_measure(obj)


def test_json_syntax_error_has_line(mfile):
    with pytest.raises(ParseError, match="line 2"):
        cli.load_measure(mfile('{"kind":\n "lebesgue",,}'))


def test_verblunsky_lebesgue_csv(mfile, tmp_path):
    out = tmp_path / "out.csv"
    assert cli.run(["verblunsky", "-m", mfile(LEB), "-n", "1,1", "-l", "16", "-o", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 16
    for r in rows[1:]:
        assert float(r["re_alpha1"]) == 0 and float(r["im_alpha2"]) == 0


def test_moments_json(mfile, capsys):
    assert cli.run(["moments", "-m", mfile(TRIG), "-n", "2,1", "-l", "8"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["exponents"][:4] == [0, 1, -1, 2]
    g = np.array(doc["re"])
    npt.assert_allclose(g[0, 1], np.pi / 2)
    npt.assert_allclose(g, g.T)


def test_factorize_csv_header(mfile, capsys):
    assert cli.run(["factorize", "-m", mfile(EXPCOS), "-l", "6", "--format", "csv"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "family,l,exponent,re,im"


def test_cd_check_table(mfile, capsys):
    assert cli.run(["cd-check", "-m", mfile(TRIG), "-n", "2,1", "-l", "10", "--points", "5", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("l,re_z,im_z")
    assert len(lines) == 1 + 8 * 5
    assert all(line.endswith("True") for line in lines[1:])


def test_evolve_trajectory(mfile, tmp_path):
    out = tmp_path / "traj.csv"
    assert cli.run(["evolve", "-m", mfile(EXPCOS), "-l", "8", "--samples", "3", "-o", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert {r["t"] for r in rows} == {"0", "0.5", "1"}


@pytest.mark.parametrize("extra", [[], ["--kind", "D2"], ["--kind", "conj_pair", "--direction", "T2"]])
def test_discrete_step(mfile, capsys, extra):
    assert cli.run(["discrete-step", "-m", mfile(EXPCOS), *extra]) == 0
    assert all(c["pass"] for c in json.loads(capsys.readouterr().out))


@pytest.mark.parametrize("cmd", ["tau-check", "bilinear-check", "second-kind"])
def test_check_commands_pass(mfile, capsys, cmd):
    assert cli.run([cmd, "-m", mfile(EXPCOS), "-l", "8", "--points", "4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report and all(set(c) == {"check", "params", "residual", "tolerance", "pass"} for c in report)


def test_coarse_quadrature_fails(mfile, monkeypatch, capsys):
    monkeypatch.setenv("OLPUC_QUAD_N", "8")
    assert cli.run(["second-kind", "-m", mfile(EXPCOS), "-l", "8", "--points", "4"]) == 1
    assert "FAIL" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["bogus", "-m", "x.json"],
    ["verblunsky"],
    ["verblunsky", "-m", "missing.json"],
    ["verblunsky", "-m", "{M}", "-n", "0,1"],
    ["verblunsky", "-m", "{M}", "-n", "3,2", "-l", "6"],
    ["cd-check", "-m", "{M}", "--points", "0"],
    ["discrete-step", "-m", "{M}", "--kind", "D2", "--direction", "T1"],
    ["discrete-step", "-m", "{L}", "--lam", "0"],
])
def test_input_errors_exit_2(mfile, argv):
    paths = {"{M}": mfile(EXPCOS), "{L}": mfile(LEB, "leb.json")}
    assert cli.run([paths.get(a, a) for a in argv]) == 2


def test_bad_measure_file_exit_2(mfile, capsys):
    assert cli.run(["verblunsky", "-m", mfile({"kind": "fourier_table", "coeffs": {"0": "x"}})]) == 2
    assert "coeffs" in capsys.readouterr().err
