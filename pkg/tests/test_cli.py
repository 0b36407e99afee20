import json
import subprocess
import sys

import numpy as np
import pytest

from symdefect.cli import EXIT_INVALID, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main
from symdefect.constructions import sic_vectors
from symdefect.core import VectorSet
from symdefect.io import save_vectors
from symdefect.tables import Cell, TableResult


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_defect_mub4(capsys):
    code, out, _ = run(capsys, "defect", "mub", "4")
    assert code == EXIT_OK
    assert "r=141" in out and "Delta=0" in out


def test_defect_sic3_json(capsys):
    code, out, _ = run(capsys, "defect", "sic", "3", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["delta_paper"] == 4 and d["r"] == 24
    assert "elapsed" not in d


def test_defect_ks_csv(capsys):
    code, out, _ = run(capsys, "defect", "ks", "yu-oh-13", "--format", "csv")
    assert code == 0 and "free_parameters,0" in out


def test_defect_file_and_invalid_file(capsys, tmp_path):
    p = tmp_path / "s.json"
    save_vectors(sic_vectors(3), p)
    assert run(capsys, "defect", str(p))[0] == 0
    a = sic_vectors(3).vectors.copy()
    a[0, 1] *= -1
    q = tmp_path / "bad.json"
    save_vectors(VectorSet(a), q)
    code, _, err = run(capsys, "defect", str(q))
    assert code == EXIT_INVALID and "invalid input" in err


def test_usage_errors(capsys):
    assert run(capsys, "defect", "unknown-kind", "3")[0] == EXIT_USAGE
    assert run(capsys, "robustness", "sic", "4", "--grid", "1:2")[0] == EXIT_USAGE
    assert run(capsys, "tables", "7")[0] == EXIT_USAGE
    assert run(capsys, "defect", "sic", "3", "--tol", "-1")[0] == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == EXIT_USAGE


def test_tables_3_and_output_file(capsys, tmp_path):
    out = tmp_path / "t3.csv"
    code, _, _ = run(capsys, "tables", "3", "--format", "csv", "--out", str(out))
    assert code == EXIT_OK
    text = out.read_text()
    assert text.startswith("table,cell,reference,computed,status,detail")
    assert text.count("match") == 9


def test_tables_mismatch_exit_code(capsys, monkeypatch):
    import symdefect.cli as cli

    bad = TableResult(1, [Cell("m=2,d=2", 0, 1, "MISMATCH")])
    monkeypatch.setattr(cli, "run_table", lambda *a, **k: bad)
    assert run(capsys, "tables", "1")[0] == EXIT_MISMATCH


def test_robustness_csv_deterministic(capsys):
    a = run(capsys, "robustness", "sic", "3", "--grid", "1e-6,1e-3", "--samples", "2", "--seed", "4")
    b = run(capsys, "robustness", "sic", "3", "--grid", "1e-6,1e-3", "--samples", "2", "--seed", "4")
    assert a[0] == 0 and a[1] == b[1]
    assert "# samples: 2" in a[1]


def test_family_commands(capsys):
    code, out, _ = run(capsys, "family", "sic", "4")
    assert code == 0 and "no kernel directions beyond gauge" in out
    code, out, _ = run(capsys, "family", "etf-fourier", "3", "--starts", "60")
    assert code == 0 and "kernel dimension 4" in out


def test_family_export(capsys, tmp_path):
    code, out, _ = run(capsys, "family", "sic", "3", "--starts", "60", "--export-dir", str(tmp_path))
    assert code == 0 and "realness condition: vacuous" in out
    files = sorted(tmp_path.glob("S*.csv"))
    assert files and files[0].read_text().startswith("# structure: sic(3)")


def test_verify(capsys, tmp_path):
    p = tmp_path / "s.json"
    save_vectors(sic_vectors(4), p, accuracy=1e-30)
    code, out, _ = run(capsys, "verify", str(p))
    assert code == 0 and "PASS" in out and "certified" in out
    a = sic_vectors(4).vectors.copy()
    a[2, 5] *= -1
    q = tmp_path / "bad.json"
    save_vectors(VectorSet(a), q)
    code, out, _ = run(capsys, "verify", str(q), "--symmetry", "etf")
    assert code == EXIT_INVALID and "symmetry deviation" in out


def test_console_entry_point_runs():
    out = subprocess.run([sys.executable, "-m", "symdefect", "defect", "sic", "2"], capture_output=True, text=True)
    assert out.returncode == 0 and "isolated" in out.stdout


def test_identical_invocations_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        f = tmp_path / f"o{i}.json"
        subprocess.run([sys.executable, "-m", "symdefect", "defect", "mub", "3", "--format", "json", "--out", str(f)], check=True)
        outs.append(f.read_bytes())
    assert outs[0] == outs[1]
