import json

import numpy as np
import pytest

from contextuality import ncycle
from contextuality.cli import run
from contextuality.quantum import matrix_to_json

OSP = {
    "scenario": {"contexts": [["X0", "X1"], ["X1", "X2"], ["X0", "X2"]]},
    "expectations": {"X0": 0, "X1": 0, "X2": 0, "X0,X1": -1, "X1,X2": -1, "X0,X2": -1},
}


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_ncycle_inequalities(capsys):
    code, out, err = _run(capsys, "ncycle", "--n", "5", "--emit", "inequalities")
    assert code == 0
    assert len(out["inequalities"]) == 16
    assert {q["bound"] for q in out["inequalities"]} == {"3"}
    assert "16 inequalities" in err


@pytest.mark.parametrize("emit", ["vertices", "realization", "bounds"])
def test_ncycle_other_outputs(capsys, emit):
    code, out, _ = _run(capsys, "ncycle", "--n", "4", "--emit", emit)
    assert code == 0 and out["n"] == 4


def test_decide_osp_with_certificate(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    code, out, _ = _run(capsys, "decide", "--model", _write(tmp_path, "osp.json", OSP), "--certificate", str(cert))
    assert code == 0
    assert out["verdict"] == "contextual"
    assert out["certificate"]["coefficients"] == {"X0,X1": "-1", "X0,X2": "-1", "X1,X2": "-1"}
    assert json.loads(cert.read_text())["bound"] == "1"


def test_theta_family(capsys):
    code, out, err = _run(capsys, "theta", "--family", "prism", "--n", "5")
    assert code == 0
    assert abs(out["theta"] - 4.47213595499958) < 1e-6
    assert abs(out["closed_form"] - 4.47213595499958) < 1e-12
    assert "closed form" in err


def test_theta_graph_and_inequality(capsys, tmp_path):
    g = {"vertices": list("abcde"), "edges": [[x, y] for x, y in zip("abcde", "bcdea")]}
    code, out, _ = _run(capsys, "theta", "--graph", _write(tmp_path, "g.json", g))
    assert code == 0 and abs(out["theta"] - 5 ** 0.5) < 1e-6
    q = ncycle.quantum_realization(5).inequality.to_json()
    code, out, _ = _run(capsys, "theta", "--inequality", _write(tmp_path, "q.json", q))
    assert code == 0 and out["vertices"] == 10


def test_facets_and_vertices(capsys, tmp_path):
    code, out, _ = _run(capsys, "facets", "--scenario", _write(tmp_path, "s.json", OSP["scenario"]))
    assert code == 0 and len(out["facets"]) == 16
    hrep = {"scenario": OSP["scenario"], "inequalities": [{k: v for k, v in f.items() if k != "kind"} for f in out["facets"]]}
    code, out, _ = _run(capsys, "vertices", "--hrep", _write(tmp_path, "h.json", hrep))
    assert code == 0 and len(out["vertices"]) == 8


def test_quantum_max_with_realization(capsys, tmp_path):
    r = ncycle.quantum_realization(5)
    real = {"state": matrix_to_json(r.state), "observables": {k: matrix_to_json(v) for k, v in r.named_observables.items()}}
    code, out, _ = _run(capsys, "quantum-max", "--inequality", _write(tmp_path, "q.json", r.inequality.to_json()),
                        "--realization", _write(tmp_path, "r.json", real))
    assert code == 0
    assert abs(out["quantum_max"] - out["realized_value"]) < 1e-6
    assert out["upper_bound_only"] is False


@pytest.mark.parametrize("model", ["ks", "bell", "ljbr", "bell-mermin"])
def test_simulate_deterministic(capsys, model):
    args = ("simulate", "--model", model, "--samples", "20000", "--seed", "123")
    _, first, _ = _run(capsys, *args)
    _, second, _ = _run(capsys, *args)
    assert first == second
    assert first["rng"].startswith("numpy.random.PCG64")


def test_simulate_bell_general(capsys, tmp_path):
    psi = np.array([1, 1, 1]) / np.sqrt(3)
    obj = {"state": matrix_to_json(np.outer(psi, psi)), "pvm": [matrix_to_json(np.diag(e)) for e in np.eye(3)]}
    code, out, _ = _run(capsys, "simulate", "--model", "bell-general", "--samples", "30000", "--input", _write(tmp_path, "b.json", obj))
    assert code == 0 and len(out["queries"]) == 3


def test_ks_check_and_verify(capsys):
    code, out, _ = _run(capsys, "ks-check", "--dataset", "ceg18")
    assert code == 0 and out["ks_set"]
    code, out, _ = _run(capsys, "verify-datasets")
    assert code == 0 and out["ok"]


def test_scenario_validate(capsys, tmp_path):
    code, out, _ = _run(capsys, "scenario", "validate", _write(tmp_path, "s.json", OSP["scenario"]))
    assert code == 0 and out["dimension"] == 6


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["decide", "--model", "/nonexistent.json"],
    ["simulate", "--model", "ks", "--seed", "-1"],
    ["simulate", "--model", "ks", "--psi", "1,2"],
    ["theta", "--family", "mobius", "--n", "5"],
    ["ncycle", "--n", "40"],
])
def test_errors_exit_one(capsys, argv):
    code, out, err = _run(capsys, *argv)
    assert code == 1 and out is None and err


def test_malformed_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, err = _run(capsys, "decide", "--model", str(p))
    assert code == 1 and "not valid JSON" in err


def test_solver_failure_exits_two(capsys, monkeypatch):
    from contextuality import csw

    def fail(*a, **k):
        raise csw.SolverError("no convergence", 1.0)

    monkeypatch.setattr(csw, "lovasz_theta", fail)
    code, _, err = _run(capsys, "theta", "--family", "prism", "--n", "5")
    assert code == 2 and "solver" in err
