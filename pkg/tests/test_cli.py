import json
import subprocess
import sys

import pytest

from heterotic5.cli import main
from heterotic5.heterotic import Report

from conftest import DATA, GOLDEN

N21 = str(DATA / "n21.alg")
BROKEN = str(DATA / "broken.alg")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_susy(capsys):
    code, out, _ = run(capsys, "check", N21, "--what", "susy")
    assert code == 0
    assert "PASS  d_eta_ASD" in out and "FAIL" not in out


def test_bundled_file_by_name(capsys):
    code, out, _ = run(capsys, "check", "n21.alg", "--what", "jacobi")
    assert code == 0 and "PASS  jacobi" in out


def test_anomaly(capsys):
    code, out, _ = run(capsys, "anomaly", N21, "--conn", "plus", "--inst", "l,m,t")
    assert code == 0
    assert out.splitlines()[0] == "alpha' = (2)/(a^2 + b^2 + c^2 - l^2 - m^2 - t^2)"


def test_anomaly_json(capsys):
    code, out, _ = run(capsys, "anomaly", N21, "--conn", "lc", "--format", "json")
    assert code == 0
    assert json.loads(out)["alpha_prime"] == {"num": "16", "den": "3*a^2 + 3*b^2 + 3*c^2 - 8*l^2 - 8*m^2 - 8*t^2"}


def test_anomaly_no_solution(capsys):
    code, out, _ = run(capsys, "anomaly", N21, "--conn", "minus", "--inst", "0,0,0")
    assert code == 1 and "no solution" in out


def test_broken_jacobi(capsys):
    code, out, _ = run(capsys, "check", BROKEN, "--what", "jacobi")
    assert code == 1
    assert "FAIL  jacobi  [d(de1) = -e123]" in out


def test_broken_report_stops_at_jacobi(capsys):
    code, out, _ = run(capsys, "report", BROKEN)
    assert code == 1 and out.count("FAIL") == 1


def test_parse_error_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("algebra x\nparams a\ndim 2\nde 1 = 0\nde 3 = e12\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2
    assert "bad.alg:5:" in err and "out of range" in err


def test_usage_errors_exit_2(capsys):
    assert run(capsys, "check", "missing-file.alg")[0] == 2
    assert run(capsys, "anomaly", N21, "--conn", "weird")[0] == 2
    assert run(capsys, "anomaly", N21, "--inst", "1,2")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["check", N21, "--what", "nothing"])
    assert info.value.code == 2


def test_internal_error_exit_3(capsys, monkeypatch):
    import heterotic5.cli as cli

    def boom(*args, **kwargs):
        raise RuntimeError("invariant violated")

    monkeypatch.setattr(cli, "full_report", boom)
    code, _, err = run(capsys, "report", N21)
    assert code == 3 and "internal error" in err


def test_instanton_conn_selector(capsys):
    code, out, _ = run(capsys, "check", N21, "--what", "instanton", "--conn", "inst:1,2,3")
    assert code == 0 and "instanton_R[inst:1,2,3]" in out
    code, out, _ = run(capsys, "check", N21, "--what", "instanton", "--conn", "lc")
    assert code == 1 and "Omega^" in out


def test_pontrjagin(capsys):
    code, out, _ = run(capsys, "pontrjagin", N21, "--conn", "minus")
    assert code == 0 and out == "P = 0\n"


def test_motion(capsys):
    assert run(capsys, "motion", N21)[0] == 0
    code, out, _ = run(capsys, "motion", N21, "--conn", "lc")
    assert code == 1 and "FAIL  supmot" in out


@pytest.mark.parametrize("argv, golden", [
    (["report", N21], "n21_report.txt"),
    (["report", N21, "--format", "json"], "n21_report.json"),
    (["report", N21, "--conn", "lc", "--format", "json"], "n21_report_lc.json"),
    (["curvature", N21, "--conn", "plus"], "n21_curvature_plus.txt"),
    (["curvature", N21, "--conn", "lc"], "n21_curvature_lc.txt"),
])
def test_golden(capsys, argv, golden):
    _, out, _ = run(capsys, *argv)
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


def test_json_round_trip(capsys, n21, std, plus, inst):
    from heterotic5.heterotic import full_report

    _, out, _ = run(capsys, "report", N21, "--format", "json")
    assert Report.from_dict(json.loads(out)) == full_report(n21, std, plus, inst)


def test_out_flag(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "report", N21, "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text() == (GOLDEN / "n21_report.json").read_text()


def test_probe_deterministic(capsys):
    first = run(capsys, "probe", "--samples", "15", "--seed", "9", "--format", "json")
    second = run(capsys, "probe", "--samples", "15", "--seed", "9", "--format", "json")
    assert first == second
    assert first[0] == 0
    assert json.loads(first[1])["counterexamples"] == []


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "heterotic5", "check", N21, "--what", "structure"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "PASS  quaternion" in proc.stdout
