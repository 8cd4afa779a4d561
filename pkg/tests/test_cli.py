import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from colliq.builders import random_structured_colligation
from colliq.cli import run_command
from colliq.colligation import transfer_eval
from colliq.document import load_document, save_document
from colliq.factorize import factor_fn, verification_grid


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def fn_file(tmp_path):
    path = tmp_path / "fn.json"
    save_document(path, random_structured_colligation("fn", split=((1, 2), (2, 1)), seed=3))
    return path


@pytest.fixture
def fm_file(tmp_path):
    path = tmp_path / "fm.json"
    save_document(path, random_structured_colligation("fm", (1, 2), m=1, seed=4))
    return path


def test_check_fm_satisfied(fm_file):
    code, out, _ = run("check", fm_file, "--property", "fm", "--m", 1)
    assert code == 0 and "satisfied" in out


def test_check_violated(fn_file):
    code, out, _ = run("check", fn_file, "--property", "fm", "--m", 1)
    assert code == 1 and "violated" in out


def test_check_chain_zero_constant(tmp_path):
    path = tmp_path / "z.json"
    save_document(path, random_structured_colligation("zero_origin_1", (1, 1), seed=1))
    assert run("check", path, "--property", "chain")[0] == 1
    assert run("check", path, "--property", "zero1")[0] == 0


def test_eval_prints_15_digits(fm_file):
    code, out, _ = run("eval", fm_file, "--point", "0.1,0.2")
    expected = transfer_eval(load_document(fm_file), [0.1, 0.2])
    assert code == 0
    assert out.strip() == f"{expected.real:.15g}{expected.imag:+.15g}j"
    assert complex(out.strip()) == pytest.approx(expected, abs=1e-14)


def test_eval_outside_domain(fm_file):
    assert run("eval", fm_file, "--point", "1.0,0.2")[0] == 2


def test_grid_csv(fm_file, tmp_path):
    out_path = tmp_path / "g.csv"
    code, _, _ = run("grid", fm_file, "--points", 7, "--out", out_path)
    assert code == 0
    with open(out_path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["z1_re", "z1_im", "z2_re", "z2_im", "value_re", "value_im", "modulus"]
    assert len(rows) == 8
    v = load_document(fm_file)
    for row in rows[1:]:
        z = [complex(float(row[0]), float(row[1])), complex(float(row[2]), float(row[3]))]
        w = transfer_eval(v, z)
        assert float(row[4]) == w.real and float(row[5]) == w.imag
        assert float(row[6]) == abs(w)


def test_grid_is_deterministic_and_seeded(fm_file, monkeypatch):
    a = run("grid", fm_file, "--points", 3)[1]
    assert a == run("grid", fm_file, "--points", 3, "--seed", 42)[1]
    assert a != run("grid", fm_file, "--points", 3, "--seed", 1)[1]
    monkeypatch.setenv("COLLIQ_SEED", "1")
    assert run("grid", fm_file, "--points", 3)[1] == run("grid", fm_file, "--points", 3,
                                                         "--seed", 1)[1]


def test_factor_fn_then_product(fn_file, tmp_path):
    left, right, back = tmp_path / "l.json", tmp_path / "r.json", tmp_path / "p.json"
    code, out, _ = run("factor", fn_file, "--mode", "fn", "--verify",
                       "--out-left", left, "--out-right", right)
    assert code == 0 and left.exists() and right.exists()
    expected = factor_fn(load_document(fn_file), verify=True).residual
    assert f"residual: {expected!r}" in out
    code, out, _ = run("product", left, right, "--mode", "fn", "--compare", fn_file,
                       "--out", back)
    assert code == 0
    dev = float(out.split("compare: max |tau_ref - tau_product| = ")[1].split()[0])
    assert dev <= 1e-9


def test_factor_chain_prefix(tmp_path):
    path = tmp_path / "c.json"
    save_document(path, random_structured_colligation("chain", (1, 2, 1), seed=2))
    code, out, _ = run("factor", path, "--mode", "chain", "--verify",
                       "--out-prefix", tmp_path / "f")
    assert code == 0 and "factors: 3" in out
    files = [tmp_path / f"f_{k}.json" for k in (1, 2, 3)]
    code, out, _ = run("product", *files, "--mode", "chain", "--compare", path)
    assert code == 0


def test_factor_unstructured_fails(tmp_path):
    path = tmp_path / "r.json"
    assert run("random", "--dims", "2,2", "--out", path)[0] == 0
    code, _, err = run("factor", path, "--mode", "fm", "--m", 1)
    assert code == 1 and "failed" in err


def test_embed_then_check(fm_file, tmp_path):
    out_path = tmp_path / "e.json"
    code, out, _ = run("embed", fm_file, "--m", 1, "--pad-dim", 2, "--out", out_path)
    assert code == 0
    assert run("check", out_path, "--property", "fn")[0] == 0


def test_roundtrip(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("random", "--dims", "1,2", "--seed", 1, "--out", a)
    run("random", "--dims", "2,1", "--seed", 2, "--out", b)
    code, out, _ = run("roundtrip", a, b)
    assert code == 0 and "max deviation" in out


def test_blaschke_and_monomial_to_stdout():
    code, out, _ = run("blaschke", "--lambda", "0.5")
    assert code == 0 and '"kind": "polydisc"' in out
    code, out, _ = run("monomial", "--m", 3)
    assert code == 0


def test_random_ball_and_check(tmp_path):
    path = tmp_path / "b.json"
    assert run("random", "--kind", "ball", "--dims", 2, "--variables", 2,
               "--split", "1:1", "--out", path)[0] == 0
    assert run("check", path, "--property", "ball", "--m", 1)[0] == 1
    assert run("check", path, "--property", "fn")[0] == 2
    assert run("eval", path, "--point", "0.1,0.2")[0] == 0


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["check"],
    ["eval", "missing.json", "--point", "0.1"],
    ["blaschke", "--lambda", "abc"],
    ["blaschke", "--lambda", "1.5"],
    ["monomial", "--m", "0"],
    ["random", "--dims", "x"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_malformed_document(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\n  \"a\": \n}")
    code, _, err = run("check", path, "--property", "fn")
    assert code == 2 and "line 3" in err


def test_help_exits_zero():
    assert run("--help")[0] == 0


def test_module_entry_point(fm_file):
    proc = subprocess.run([sys.executable, "-m", "colliq", "check", str(fm_file),
                           "--property", "fm", "--m", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and "satisfied" in proc.stdout
