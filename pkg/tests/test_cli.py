import subprocess
import sys

import pytest

from shortpa import apcover, cli, geometry, kpt, optimize, presburger, satred

TINY_CNF = "p cnf 2 2\n1 2 0\n-1 2 0\n"
UNSAT_CNF = "p cnf 1 2\n1 0\n-1 0\n"
REF_AP = "J 1 5\nAP 2 1 3\n"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (("tiny.cnf", TINY_CNF), ("unsat.cnf", UNSAT_CNF), ("ref.ap", REF_AP)):
        paths[name] = tmp_path / name
        paths[name].write_text(text)
    return paths


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_detect_kind():
    assert cli.detect_kind(TINY_CNF) == "cnf"
    assert cli.detect_kind("c x\np cnf 2 1\na 1 0\ne 2 0\n1 2 0\n") == "qbf"
    assert cli.detect_kind(REF_AP) == "apcover"
    assert cli.detect_kind("PREFIX AE\n") == "mapcover"
    assert cli.detect_kind("hello\n") == "unknown"


def test_decide_and_count(capsys, files):
    assert run(capsys, "decide", files["tiny.cnf"])[:2] == (0, "yes\n")
    assert run(capsys, "decide", files["unsat.cnf"])[:2] == (1, "no\n")
    assert run(capsys, "count", files["ref.ap"])[:2] == (0, "3\n")


def test_reduce_targets(capsys, files, tmp_path):
    code, out, _ = run(capsys, "reduce", files["tiny.cnf"], "--target", "apcover")
    assert code == 0 and apcover.decide_apcover(apcover.loads_apcover(out))
    code, out, _ = run(capsys, "reduce", files["tiny.cnf"], "--target", "sentence")
    s = presburger.loads_sentence(out)
    assert (s.num_variables, s.num_inequalities) == (5, 10)
    code, out, _ = run(capsys, "reduce", files["tiny.cnf"], "--target", "gip1")
    assert geometry.loads_gip(out).num_rows == 24
    dest = tmp_path / "bl.txt"
    assert run(capsys, "reduce", files["ref.ap"], "--target", "bilevel", "-o", dest)[0] == 0
    assert optimize.solve_bilevel_brute(optimize.loads_bilevel(dest.read_text())) == 1


def test_reduced_files_round_trip(capsys, files):
    for target in cli.TARGETS:
        _, out, _ = run(capsys, "reduce", files["ref.ap"], "--target", target)
        kind, obj = cli.load(out)
        assert cli.reduce_to("apcover", apcover.loads_apcover(REF_AP), target) == out
        _, again, _ = run(capsys, "reduce", files["ref.ap"], "--target", target)
        assert again == out


def test_decide_every_format(capsys, files, tmp_path):
    for target in cli.TARGETS:
        _, out, _ = run(capsys, "reduce", files["ref.ap"], "--target", target)
        f = tmp_path / f"{target}.txt"
        f.write_text(out)
        assert run(capsys, "decide", f)[:2] == (0, "yes\n"), target


def test_verify_pipeline(capsys, files):
    code, out, _ = run(capsys, "verify-pipeline", files["ref.ap"])
    assert code == 0 and out.splitlines()[-1] == "PASS"
    assert "SKIPPED" not in out
    code, out, _ = run(capsys, "verify-pipeline", files["unsat.cnf"])
    assert code == 0
    assert all("count=0" in l for l in out.splitlines() if " ok " in l)
    code, out, _ = run(capsys, "verify-pipeline", files["tiny.cnf"], "--corrupt")
    assert code == cli.EXIT_MISMATCH
    assert "sentence  MISMATCH" in out and "FAIL: sat=2 but sentence=1" in out


def test_verify_is_deterministic(capsys, files):
    a = run(capsys, "verify-pipeline", files["tiny.cnf"])[1]
    b = run(capsys, "verify-pipeline", files["tiny.cnf"])[1]
    assert a == b


def test_gen_kpt(capsys):
    code, out, _ = run(capsys, "gen-kpt", 2)
    assert code == 0
    assert "# points 3 convex yes midpoint-free yes" in out
    assert kpt.loads_pip(out) == kpt.fibonacci_family(2).pip
    assert "# points 2 " in run(capsys, "gen-kpt", 1)[1]
    out = run(capsys, "gen-kpt", 6)[1]
    assert "# points 7 " in out and "# p 610 " in out
    assert run(capsys, "gen-kpt", 9)[0] == cli.EXIT_SCALE


def test_gen_bilevel_and_pareto(capsys, files):
    code, out, err = run(capsys, "gen-bilevel", files["ref.ap"], "--solve")
    assert code == 0 and out.startswith("BILEVEL") and "# value 1" in err
    code, out, err = run(capsys, "gen-pareto", files["ref.ap"], "--solve")
    assert code == 0 and out.startswith("PARETO") and "# value -1" in err


def test_errors(capsys, tmp_path, files):
    bad = tmp_path / "bad.txt"
    bad.write_text("garbage\n")
    assert run(capsys, "decide", bad)[0] == cli.EXIT_USAGE
    broken = tmp_path / "broken.cnf"
    broken.write_text("p cnf 2 1\n1 7 0\n")
    code, _, err = run(capsys, "decide", broken)
    assert code == cli.EXIT_USAGE and "line 2" in err
    assert run(capsys, "decide", tmp_path / "missing")[0] == cli.EXIT_USAGE
    assert run(capsys, "count", files["ref.ap"], "--max-scale", "2")[0] == cli.EXIT_SCALE
    with pytest.raises(SystemExit) as exc:
        cli.main(["reduce", str(files["ref.ap"])])
    assert exc.value.code == 2


def test_props(capsys):
    code, out, _ = run(capsys, "props", "--seed", 3)
    assert code == 0 and out.count("PASS") == len(cli.SUITES)
    code2, out2, _ = run(capsys, "props", "--seed", 3, "--jobs", 2)
    assert (code2, out2) == (code, out)


def test_console_script_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "shortpa.cli", "decide", "-"], input=REF_AP, capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout == "yes\n"
