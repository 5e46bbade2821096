import io
import json
import subprocess
import sys

import pytest

from dlaguerre import cli, harness
from dlaguerre.laguerre import discrete_fn


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, (json.loads(out) if out else None), err


def test_fn_expand(capsys):
    code, doc, _ = run_json(capsys, "fn", "--poly", '{"roots":[0,1,2]}', "--n", "3", "--h", "1", "--expand")
    assert code == 0 and doc["result"]["coeffs"] == [72, -144, 72]
    assert set(doc) == {"command", "inputs", "result", "provenance"}
    assert set(doc["provenance"]) == {"backend", "seed", "tolerances"}


def test_fn_at_point(capsys):
    code, doc, _ = run_json(capsys, "fn", "--poly", '{"roots":[0,1,2]}', "--n", "2", "--h", "1", "--at", "4")
    assert code == 0 and doc["result"]["value"] == -540


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "--poly", '{"roots":[0,1,2]}', "--h", "1")
    assert code == 0 and "Certified" in out and "x*(x - 1)*(x - 2)" in out


def test_certify_precondition_exit_2(capsys):
    code, _, err = run(capsys, "certify", "--poly", '{"roots":[0,"-3/4"]}')
    assert code == 2 and "mesh" in err
    code, _, err = run(capsys, "certify", "--poly", '{"coeffs":[1.0,0,1]}')
    assert code == 2


def test_malformed_input_positions(capsys):
    code, _, err = run(capsys, "mesh", "--poly", '{"coeffs":[1, 2,')
    assert code == 2 and "line 1 column" in err
    code, _, err = run(capsys, "mesh", "--poly", '{"coeffs":["1/2", 0.5]}')
    assert code == 2 and "coeffs[0]" in err and "coeffs[1]" in err
    code, _, err = run(capsys, "mesh", "--poly", '{"coeffs":[1, "abc"]}')
    assert code == 2 and "coeffs[1]" in err
    code, _, err = run(capsys, "mesh", "--poly", '{"roots":[1], "coeffs":[1]}')
    assert code == 2
    code, _, err = run(capsys, "mesh", "--poly", '{"root":[1]}')
    assert code == 2 and "unknown key" in err


def test_poly_from_file_and_stdin(capsys, tmp_path, monkeypatch):
    path = tmp_path / "p.json"
    path.write_text('{"roots": ["1/2", 3], "leading": -2}')
    code, doc, _ = run_json(capsys, "mesh", "--poly", f"@{path}")
    assert code == 0 and doc["result"]["mesh"] == "5/2"
    monkeypatch.setattr(sys, "stdin", io.StringIO('{"coeffs": [0, -1, 1]}'))
    code, doc, _ = run_json(capsys, "mesh", "--poly", "-")
    assert code == 0 and doc["result"]["mesh"] == 1
    code, _, err = run(capsys, "mesh", "--poly", f"@{tmp_path / 'missing.json'}")
    assert code == 2


def test_float_input_selects_float_backend(capsys):
    code, doc, _ = run_json(capsys, "fn", "--poly", '{"coeffs":[0.0, 2.0, -3.0, 1.0]}', "--n", "3", "--at", "1.0")
    assert code == 0 and doc["provenance"]["backend"] == "float" and doc["result"]["value"] == 0.0
    code, doc, _ = run_json(capsys, "mesh", "--poly", '{"coeffs":[0.0, 2.0, -3.0, 1.0]}', "--backend", "exact")
    assert code == 0 and doc["result"]["mesh"] == 1


@pytest.mark.parametrize("argv", [
    ["fn", "--poly", '{"roots":["1/3",2,"9/2"]}', "--n", "4", "--h", "1/2"],
    ["mesh", "--poly", '{"roots":[-1,1,3], "leading":"3/2"}'],
    ["measure", "--poly", '{"roots":[0,1,2]}', "--lam", "2"],
    ["logderiv", "--poly", '{"roots":[0,3,6]}'],
])
def test_json_round_trip(capsys, argv):
    code, first, _ = run_json(capsys, *argv)
    assert code == 0
    again = list(argv)
    again[again.index("--poly") + 1] = json.dumps(first["inputs"]["poly"])
    code, second, _ = run_json(capsys, *again)
    assert code == 0 and second == first


def test_measure_outputs(capsys):
    code, doc, _ = run_json(capsys, "measure", "--poly", '{"roots":[0,1]}', "--lam", "1")
    assert code == 0 and doc["result"]["total"] == 2 and doc["result"]["intervals"] == [[1, 3]]
    code, doc, _ = run_json(capsys, "measure", "--poly", '{"roots":[0,"1/2"]}', "--lam", "1")
    assert code == 1 and doc["result"]["pairing_ok"] is False
    code, doc, _ = run_json(capsys, "measure", "--poly", '{"roots":[0,"1/2"]}', "--lam", "1", "--mode", "scan")
    assert code == 0 and doc["provenance"]["tolerances"] == {"scan": 1e-9}


def test_logderiv_checks(capsys):
    code, doc, _ = run_json(capsys, "logderiv", "--poly", '{"roots":[0,1,2]}', "--check", "cauchy-schwarz")
    assert code == 0 and doc["result"]["holds"]
    code, doc, _ = run_json(capsys, "logderiv", "--poly", '{"roots":[0,2,4]}', "--check", "spacing", "--d", "2")
    assert code == 0 and doc["result"]["mesh_at_least_one"]
    code, _, _ = run(capsys, "logderiv", "--poly", '{"roots":[0,"1/2"]}', "--check", "cauchy-schwarz")
    assert code == 2


def test_entire_commands(capsys):
    code, doc, _ = run_json(capsys, "entire", "--phi", '{"kind":"exp_square"}', "--at", "0")
    assert code == 0 and abs(doc["result"]["value"] + 13.746254627672) < 1e-9
    code, doc, _ = run_json(capsys, "entire", "--phi", '{"kind":"exp_square"}', "--window", "-2", "2")
    assert code == 1 and doc["result"]["confirmed"]
    code, doc, _ = run_json(capsys, "entire", "--phi",
                            '{"kind":"poly_exp","poly":{"roots":[0,1,2]},"b":1}')
    assert code == 0 and doc["result"]["confirmed"] == []
    code, _, _ = run(capsys, "entire", "--phi", '{"kind":"sine"}')
    assert code == 2


def test_sumlem_and_qn(capsys):
    code, doc, _ = run_json(capsys, "sumlem", "--n", "6")
    assert code == 0 and doc["result"]["bracketed"]
    code, _, err = run(capsys, "sumlem", "--n", "2", "--a", "-3")
    assert code == 2 and "pole" in err
    code, doc, _ = run_json(capsys, "qn", "--n", "4", "--x", "0")
    assert code == 0 and doc["result"]["value"] == 1.0
    code, doc, _ = run_json(capsys, "qn", "--n-list", "3", "4", "5", "6")
    assert code == 0 and doc["result"]["strictly_decreasing"]


def test_campaign_requires_seed(capsys):
    code, _, err = run(capsys, "campaign", "--conjecture", "MainTheorem", "--trials", "3")
    assert code == 2 and "--seed" in err


def test_campaign_json_is_reproducible(capsys):
    argv = ["campaign", "--conjecture", "Zspc", "--d", "3/2", "--min-gap", "3/2", "--trials", "6", "--seed", "5"]
    code, a, _ = run_json(capsys, *argv)
    code2, b, _ = run_json(capsys, *argv)
    assert code == code2 == 0
    a["result"].pop("runtime"), b["result"].pop("runtime")
    assert a == b and a["provenance"]["seed"] == 5


def test_campaign_hypothesis_mismatch_exit_2(capsys):
    code, _, _ = run(capsys, "campaign", "--conjecture", "Zspc", "--d", "2", "--trials", "3", "--seed", "1")
    assert code == 2


def test_reproduce_exit_codes(capsys, monkeypatch):
    code, doc, _ = run_json(capsys, "reproduce")
    assert code == 0 and doc["result"]["ok"]

    def flipped(p, n, h):
        return discrete_fn(p, n, h).scale(-1)

    original = harness.reproduce_paper_examples
    monkeypatch.setattr(harness, "reproduce_paper_examples", lambda: original(flipped))
    code, doc, _ = run_json(capsys, "reproduce")
    assert code == 1 and "72(x-1)^2" in doc["result"]["failures"][0]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dlaguerre", "fn", "--poly", '{"roots":[0,1,2]}'],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "72*x^2 - 144*x + 72" in proc.stdout
