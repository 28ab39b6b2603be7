import json
import subprocess
import sys

import numpy as np
import pytest

from specfact.cli import main
from specfact.errors import SchemaError
from specfact.harness import MatrixFamilySpec, fixture, random_spd
from specfact.io import FORMAT, from_dict, load_coeffs, save_coeffs, to_dict
from specfact.msf import factorization_error
from specfact.numcore import LaurentPolyMatrix


# --- io ----------------------------------------------------------------------

def test_round_trip_is_bit_exact(tmp_path):
    S = random_spd(MatrixFamilySpec(3, 4, 1))
    rng = np.random.default_rng(0)
    F = LaurentPolyMatrix(rng.standard_normal((3, 3, 3)) + 1j * rng.standard_normal((3, 3, 3)), 0)
    save_coeffs(S, tmp_path / "s.json", "density")
    save_coeffs(F, tmp_path / "f.json", "factor")
    S2 = load_coeffs(tmp_path / "s.json", "density")
    F2 = load_coeffs(tmp_path / "f.json")
    assert S2.window == S.window and np.array_equal(S2.coeffs, S.coeffs)
    assert F2.window == F.window and np.array_equal(F2.coeffs, F.coeffs)


def test_document_layout():
    S, _ = fixture("ieee0")
    doc = to_dict(S)
    assert doc["format"] == FORMAT and doc["kind"] == "density"
    assert np.array(doc["coeffs"]).shape == (3, 2, 2, 2)
    json.dumps(doc)


def _doc():
    return to_dict(fixture("ieee0")[0])


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(format="other/1"),
    lambda d: d.update(kind="matrix"),
    lambda d: d.update(lo="a"),
    lambda d: d.update(hi=5),
    lambda d: d.update(coeffs="x"),
    lambda d: d["coeffs"][0][0][1].__setitem__(0, 99.0),  # breaks Hermitian symmetry
])
def test_schema_errors(mutate):
    d = _doc()
    mutate(d)
    with pytest.raises(SchemaError):
        from_dict(d)


def test_kind_mismatch_and_factor_window():
    d = _doc()
    with pytest.raises(SchemaError):
        from_dict(d, "factor")
    F = fixture("ieee0")[1]["factor"]
    f = to_dict(F, "factor")
    f["lo"], f["hi"] = -1, 0
    with pytest.raises(SchemaError):
        from_dict(f)


def test_nonfinite_rejected(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(_doc()).replace("38.0", "NaN", 1), encoding="utf-8")
    with pytest.raises(SchemaError):
        load_coeffs(p)
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(SchemaError):
        load_coeffs(p)
    bad = LaurentPolyMatrix(np.full((1, 1, 1), np.inf, dtype=complex), 0)
    with pytest.raises(ValueError):
        save_coeffs(bad, tmp_path / "x.json", "factor")


def test_symmetry_tolerance_is_configurable():
    d = _doc()
    d["coeffs"][0][0][1][0] += 1e-7
    with pytest.raises(SchemaError):
        from_dict(d)
    assert from_dict(d, sym_tol=1e-6).rows == 2


# --- cli ---------------------------------------------------------------------

@pytest.fixture
def ieee0_files(tmp_path):
    s, f = tmp_path / "S.json", tmp_path / "F.json"
    assert main(["fixture", "ieee0", "--output", str(s), "--factor-output", str(f)]) == 0
    return s, f


def test_fixture_and_verify(ieee0_files, capsys):
    s, f = ieee0_files
    assert main(["verify", "--density", str(s), "--factor", str(f)]) == 0
    assert "err = 0.0" in capsys.readouterr().out


def test_fixture_without_factor(tmp_path):
    assert main(["fixture", "sa4", "--output", str(tmp_path / "a.json")]) == 0
    assert main(["fixture", "sa4", "--output", str(tmp_path / "b.json"),
                 "--factor-output", str(tmp_path / "c.json")]) == 1
    assert not (tmp_path / "b.json").exists()
    assert main(["fixture", "nope", "--output", str(tmp_path / "d.json")]) == 1


def test_factor_then_verify(ieee0_files, tmp_path, capsys):
    s, _ = ieee0_files
    out = tmp_path / "out.json"
    code = main(["factor", "--alg", "jle1", "--input", str(s), "--output", str(out),
                 "--N", "30", "--scalar-iters", "45", "--det-method", "direct"])
    assert code == 0
    printed = capsys.readouterr().out
    err = float(printed.split("=")[1])
    assert err <= 1e-10
    diag = json.loads((tmp_path / "out.json.diag.json").read_text(encoding="utf-8"))
    assert diag["err"] == err
    F = load_coeffs(out, "factor")
    assert factorization_error(load_coeffs(s), F) == err
    assert main(["verify", "--density", str(s), "--factor", str(out)]) == 0
    assert float(capsys.readouterr().out.split("=")[1]) == err
    assert main(["verify", "--density", str(s), "--factor", str(out), "--tol", "1e-300"]) == 2


def test_factor_numerical_failure_writes_nothing(ieee0_files, tmp_path, capsys):
    s, _ = ieee0_files
    out = tmp_path / "never.json"
    assert main(["factor", "--alg", "jle3", "--input", str(s), "--output", str(out)]) == 2
    assert "SingularDelta" in capsys.readouterr().err
    assert not out.exists()
    assert not (tmp_path / "never.json.diag.json").exists()


def test_factor_io_errors(tmp_path, ieee0_files):
    s, f = ieee0_files
    out = str(tmp_path / "o.json")
    assert main(["factor", "--alg", "jle1", "--input", str(tmp_path / "missing.json"),
                 "--output", out]) == 1
    # a factor file is not a density
    assert main(["factor", "--alg", "jle1", "--input", str(f), "--output", out]) == 1
    assert main(["factor", "--alg", "jle1", "--input", str(s), "--output", out,
                 "--kappa", "3"]) == 1
    assert main(["factor", "--alg", "nope", "--input", str(s), "--output", out]) == 1
    assert main([]) == 1


def test_verify_dimension_mismatch(tmp_path, ieee0_files):
    s, _ = ieee0_files
    f1 = tmp_path / "f1.json"
    save_coeffs(LaurentPolyMatrix(np.ones((1, 1, 1), dtype=complex), 0), f1, "factor")
    assert main(["verify", "--density", str(s), "--factor", str(f1)]) == 1


def test_bench_custom_and_empty(tmp_path, capsys):
    out = tmp_path / "rows.jsonl"
    assert main(["bench", "--r", "3", "--n", "2", "--seeds", "2", "--shift", "1",
                 "--algs", "jle1,jle2,wilson", "--kappa", "10", "--output", str(out)]) == 0
    rows = [json.loads(l) for l in out.read_text(encoding="utf-8").splitlines()]
    assert len(rows) == 6 and all(r["status"] == "ok" for r in rows)
    assert all(r["err"] <= 1e-8 for r in rows)
    assert len(capsys.readouterr().out.splitlines()) == 6
    assert main(["bench", "--r", "3", "--n", "2", "--seeds", "0", "--output", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == ""
    assert main(["bench", "--r", "3", "--n", "2", "--algs", "foo", "--output", str(out)]) == 1
    assert main(["bench", "--output", str(out)]) == 1


def test_bench_preset_singular(tmp_path):
    out = tmp_path / "rows.jsonl"
    assert main(["bench", "--preset", "singular", "--quiet", "--output", str(out)]) == 0
    rows = [json.loads(l) for l in out.read_text(encoding="utf-8").splitlines()]
    assert len(rows) == 8
    by = {(r["input"], r["alg"]): r for r in rows}
    assert by[("ieee0", "jle1")]["err"] <= 1e-10
    assert by[("ieee0", "jle3")]["status"].startswith("error: SingularDeltaError")
    assert by[("sa4", "jle1")]["err"] <= 1e-4


def test_module_entry_point(ieee0_files):
    s, f = ieee0_files
    proc = subprocess.run([sys.executable, "-m", "specfact", "verify", "--density", str(s),
                           "--factor", str(f)], capture_output=True, text=True)
    assert proc.returncode == 0 and "err = 0.0" in proc.stdout
