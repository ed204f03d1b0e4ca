import json
import subprocess
import sys

from ktgvolume.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "--dsl", "A v1; U e4 rings=2")
    assert code == 0
    assert out.startswith("t=1 u=1 theta=0 r=2")


def test_validate_bad_target(capsys):
    code, out, err = run(capsys, "validate", "--dsl", "A v1\nU e40")
    assert code == 1
    assert "line 2, col 3" in err


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "jones", "--dsl", "Z v1")
    assert code == 1 and "line 1, col 1" in err


def test_jones_empty_sequence(capsys):
    code, out, _ = run(capsys, "jones", "--dsl", "", "--N", "5")
    assert code == 0
    assert out.startswith("N=5 multisum 8.8541019662")


def test_jones_closed_form(capsys):
    code, out, _ = run(capsys, "jones", "--dsl", "U e1 rings=1", "--N", "3", "--method", "closed")
    assert code == 0 and out == "N=3 closed_form 6.0+0.0j\n"


def test_even_N_needs_flag(capsys):
    code, _, err = run(capsys, "jones", "--dsl", "U e1 rings=1", "--N", "4")
    assert code == 1 and "--allow-even" in err
    code, out, _ = run(capsys, "jones", "--dsl", "U e1 rings=1", "--N", "4", "--allow-even", "--method", "both")
    assert code == 0
    assert "N=4 multisum 0.0+0.0j" in out and "N=4 closed_form 0.0+0.0j" in out


def test_jones_json_and_csv(capsys):
    _, out, _ = run(capsys, "jones", "--dsl", "A v1; U e4 rings=3", "--N", "3,5", "--format", "json")
    recs = json.loads(out)
    assert [r["N"] for r in recs] == [3, 5]
    _, out, _ = run(capsys, "jones", "--dsl", "A v1; U e4 rings=3", "--N", "3", "--format", "csv")
    assert out.splitlines()[0] == "sequence_hash,N,method,value_re,value_im"


def test_jones_generic(capsys):
    code, out, _ = run(capsys, "jones", "--dsl", "", "--N", "2", "--at", "generic", "--allow-even")
    assert code == 0 and out.startswith("N=2 multisum generic")


def test_twisted_unzip_modes(capsys):
    code, _, err = run(capsys, "jones", "--dsl", "H+ e1; U e1 rings=1", "--N", "3")
    assert code == 1 and "half twists" in err
    code, _, _ = run(capsys, "jones", "--dsl", "H+ e1; U e1 rings=1", "--N", "3", "--mode", "lenient")
    assert code == 0


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--dsl", "A v1; U e4", "--rings", "106",
                       "--Nlist", "3,4,5,7,51,101", "--allow-even")
    assert code == 0
    assert "14.6554495068" in out.splitlines()[0]
    assert "N=4 J_N=0" in out
    assert "so(3) volume conjecture: supported" in out


def test_verify_flags_too_few_rings(capsys):
    code, out, _ = run(capsys, "verify", "--dsl", "A v1; U e4 rings=1", "--Nlist", "3,5")
    assert code == 2
    assert "differ" in out


def test_gluing_and_volume(capsys):
    code, out, _ = run(capsys, "gluing", "--dsl", "")
    assert code == 0 and out == "2 octahedra, all checks passed\n"
    code, out, _ = run(capsys, "gluing", "--dsl", "A v1", "--format", "json")
    assert code == 0 and len(json.loads(out)["octs"]) == 4
    code, out, _ = run(capsys, "volume", "--dsl", "A v1; U e4 rings=1")
    assert code == 0 and "octahedra 4" in out


def test_asymptotics(capsys, tmp_path):
    target = tmp_path / "rows.csv"
    code, out, _ = run(capsys, "asymptotics", "--Nlist", "101,501", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().splitlines()[0] == "N,lhs,target,error"


def test_file_input_crlf(capsys, tmp_path):
    f = tmp_path / "prog.ktg"
    f.write_bytes(b"tet\r\nA v1\r\nU e4 rings=1\r\n")
    code, out, _ = run(capsys, "validate", str(f))
    assert code == 0 and out.startswith("t=1 u=1")
    code, _, err = run(capsys, "validate", str(tmp_path / "missing.ktg"))
    assert code == 1


def test_module_entry_point_is_deterministic():
    cmd = [sys.executable, "-m", "ktgvolume", "jones", "--dsl", "A v1; U e4 rings=3",
           "--N", "3,5,7", "--method", "both", "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
