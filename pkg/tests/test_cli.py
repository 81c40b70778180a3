import csv
import io as stdio
import json

import numpy as np
import pytest

from oracles import circle_gap
from pssa import cli, io, plotdata, polysphere, report, synth
from pssa.errors import DimensionError, UnknownExample, UnknownReportSection


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    rows = list(csv.reader(stdio.StringIO(text)))
    return rows[0], rows[1:]


@pytest.fixture
def write(tmp_path):
    def _write(name, manifold, data):
        path = tmp_path / name
        io.write_dataset(path, manifold, data)
        return path
    return _write


# --- synth ----------------------------------------------------------------------

def test_synth_sphere_rows(capsys):
    code, out, _ = run(["synth", "sphere-1", "--seed", 0], capsys)
    assert code == 0
    rows = [r for r in out.splitlines() if r and not r.startswith("#")]
    X = np.array([[float(v) for v in r.split(",")] for r in rows])
    assert X.shape == (20, 4)
    assert np.allclose(np.linalg.norm(X, axis=1), 1.0, atol=1e-12)


def test_synth_torus_rows(tmp_path, capsys):
    path = tmp_path / "t.json"
    assert run(["synth", "torus-25", "--output", path], capsys)[0] == 0
    ds = io.read_dataset(path)
    assert ds.manifold == "torus" and ds.data.shape == (50, 2)
    assert np.all((ds.data >= 0) & (ds.data < 1))


def test_synth_is_seeded(capsys):
    a = run(["synth", "polysphere-coupled", "--seed", 5], capsys)[1]
    b = run(["synth", "polysphere-coupled", "--seed", 5], capsys)[1]
    c = run(["synth", "polysphere-coupled", "--seed", 6], capsys)[1]
    assert a == b != c


def test_synth_unknown_example(capsys):
    code, _, err = run(["synth", "no-such"], capsys)
    assert code == 2 and "unknown example" in err
    with pytest.raises(UnknownExample):
        synth.generate("no-such")


# --- fit ------------------------------------------------------------------------

def test_fit_equator_exact(write, rng, capsys):
    t = rng.uniform(0, 2 * np.pi, 12)
    path = write("eq.csv", "sphere", np.column_stack([np.cos(t), np.sin(t), 0 * t]))
    code, out, _ = run(["fit", "--input", path], capsys)
    assert code == 0
    doc = json.loads(out)
    report.validate(doc)
    circle = doc["models"][0]
    assert circle["dim"] == 1 and circle["fit_error"] < 1e-12
    assert abs(abs(np.array(circle["model"]["complement"])[2, 0]) - 1) < 1e-12


def test_fit_torus_ranks_true_relation(tmp_path, capsys):
    data = tmp_path / "t.csv"
    run(["synth", "torus-25", "--output", data], capsys)
    code, out, _ = run(["fit", "--input", data, "--top", 5], capsys)
    doc = json.loads(out)
    assert code == 0 and len(doc["models"]) == 5
    assert doc["models"][0]["model"]["A"] == [[2, 5]]
    assert doc["models"][0]["model"]["dual_basis"] == [["2/29"], ["5/29"]]


def test_fit_constant_planes(write, rng, capsys):
    Q = np.linalg.qr(rng.normal(size=(4, 2)))[0]
    path = write("g.json", "grassmannian", [Q] * 5)
    doc = json.loads(run(["fit", "--input", path], capsys)[1])
    assert all(m["fit_error"] < 1e-10 for m in doc["models"])


def test_fit_polysphere_reports_models(tmp_path, capsys):
    data = tmp_path / "p.csv"
    run(["synth", "polysphere-torus", "--output", data], capsys)
    doc = json.loads(run(["fit", "--input", data], capsys)[1])
    report.validate(doc)
    dims = [m["dim"] for m in doc["models"]]
    assert dims == sorted(dims, reverse=True)


# --- tree and determinism -------------------------------------------------------

def test_tree_is_byte_identical_across_thread_counts(tmp_path, capsys, monkeypatch):
    data = tmp_path / "t.csv"
    run(["synth", "torus-123", "--output", data], capsys)
    one = run(["tree", "--input", data, "--resonance-bound", 3], capsys)[1]
    monkeypatch.setenv("PSSA_THREADS", "4")
    four = run(["tree", "--input", data, "--resonance-bound", 3], capsys)[1]
    assert one == four
    report.validate(json.loads(one))


def test_tree_writes_output_file(tmp_path, capsys):
    data, out = tmp_path / "s.csv", tmp_path / "r.json"
    run(["synth", "sphere-2", "--output", data], capsys)
    assert run(["tree", "--input", data, "--output", out, "--min-dim", 1], capsys)[0] == 0
    doc = json.loads(out.read_text())
    assert [n["dim"] for _, n in report.iter_nodes(doc)] == [3, 2, 1]


# --- plotdata -------------------------------------------------------------------

def _report(tmp_path, capsys, example, *extra):
    data, rep = tmp_path / f"{example}.csv", tmp_path / f"{example}.json"
    run(["synth", example, "--output", data], capsys)
    assert run(["tree", "--input", data, "--output", rep, *extra], capsys)[0] == 0
    return data, rep


def test_plotdata_circles_are_unit(tmp_path, capsys):
    _, rep = _report(tmp_path, capsys, "sphere-3")
    code, out, _ = run(["plotdata", "--report", rep, "--what", "circles"], capsys)
    header, rows = table(out)
    assert code == 0 and header[:2] == ["node", "sample"]
    P = np.array([[float(v) for v in r[2:]] for r in rows])
    assert len(rows) == plotdata.SAMPLES
    assert np.abs(np.linalg.norm(P, axis=1) - 1).max() < 1e-10


def test_plotdata_geodesics_satisfy_relation(tmp_path, capsys):
    _, rep = _report(tmp_path, capsys, "torus-25")
    doc = json.loads(rep.read_text())
    first = doc["root"]["children"][0]["model"]
    out = run(["plotdata", "--report", rep, "--what", "geodesics"], capsys)[1]
    _, rows = table(out)
    pts = np.array([[float(v) for v in r[2:]] for r in rows if r[0] == "0.0"])
    assert len(pts) == plotdata.SAMPLES
    lhs = pts @ np.array(first["A"][0])
    assert max(circle_gap(v, first["c"][0]) for v in lhs) < 1e-9


def test_plotdata_polysphere_projections(tmp_path, capsys):
    data, rep = _report(tmp_path, capsys, "polysphere-torus")
    doc = json.loads(rep.read_text())
    X = io.read_dataset(data).data
    out = run(["plotdata", "--report", rep, "--what", "projections", "--input", data], capsys)[1]
    header, rows = table(out)
    assert header == ["node", "point", "factor", "angle"]
    nodes = dict(report.iter_nodes(doc))
    checked = 0
    for nid, i, f, a in rows[:200]:
        axis = next(c["axis"] for c in nodes[nid]["model"]["constraints"]
                    if c["type"] == "circle_factor" and c["i"] == int(f))
        ref = polysphere.angles_on_circle(X[int(i), int(f)][None], axis)[0]
        assert circle_gap(float(a), ref) < 1e-12
        checked += 1
    assert checked > 0
    fc = run(["plotdata", "--report", rep, "--what", "factor-circles"], capsys)[1]
    P = np.array([[float(v) for v in r[3:]] for r in table(fc)[1]])
    assert np.abs(np.linalg.norm(P, axis=1) - 1).max() < 1e-10


def test_plotdata_errors(tmp_path, capsys):
    _, rep = _report(tmp_path, capsys, "sphere-1")
    code, _, err = run(["plotdata", "--report", rep, "--what", "nonsense"], capsys)
    assert code == 2 and "unknown section" in err
    code, _, err = run(["plotdata", "--report", rep, "--what", "geodesics"], capsys)
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["plotdata", "--report", bad, "--what", "circles"], capsys)[0] == 2
    bad.write_text(json.dumps({"schema_version": "9"}))
    code, _, err = run(["plotdata", "--report", bad, "--what", "circles"], capsys)
    assert code == 2 and "schema" in err
    with pytest.raises(UnknownReportSection):
        plotdata.section(json.loads(rep.read_text()), "projections")


# --- exit codes -----------------------------------------------------------------

def test_invalid_input_exit_code(tmp_path, capsys):
    path = tmp_path / "s.csv"
    path.write_text("# manifold: sphere\n2,0,0\n0,1,0\n")
    code, _, err = run(["fit", "--input", path], capsys)
    assert code == 2 and err.startswith("error:")
    assert run(["fit", "--input", path, "--renormalize"], capsys)[0] == 0
    assert run(["fit", "--input", tmp_path / "missing.csv"], capsys)[0] == 2
    assert run(["synth", "sphere-1", "--seed", -1], capsys)[0] == 2


def test_numerical_failure_exit_code(write, capsys):
    path = write("t.csv", "torus", [[0.0, 0.0], [0.5, 0.5]])
    code, _, err = run(["fit", "--input", path, "--selection", "training"], capsys)
    assert code == 3 and err.startswith("numerical error:")


# --- dataset io -----------------------------------------------------------------

@pytest.mark.parametrize("suffix", [".csv", ".json"])
@pytest.mark.parametrize("example", sorted(synth.EXAMPLES))
def test_dataset_round_trip(tmp_path, example, suffix):
    manifold, data, _ = synth.generate(example, 3)
    path = tmp_path / f"d{suffix}"
    io.write_dataset(path, manifold, data, {"note": "x"})
    ds = io.read_dataset(path)
    assert ds.manifold == manifold and ds.header["note"] == "x"
    if manifold == "grassmannian":
        assert all(np.array_equal(a, b) for a, b in zip(ds.data, data))
    else:
        assert np.array_equal(ds.data, np.asarray(data))


def test_dataset_errors(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("1,2\n3,4\n")
    with pytest.raises(DimensionError):
        io.read_dataset(path)
    assert io.read_dataset(path, "torus").data.shape == (2, 2)
    path.write_text("# manifold: torus\n1,2\n3\n")
    with pytest.raises(DimensionError):
        io.read_dataset(path)
    path.write_text("# manifold: polysphere\n1,0,0,1\n")
    with pytest.raises(DimensionError):
        io.read_dataset(path)


def test_report_provenance(tmp_path, capsys):
    import hashlib
    from pssa.config import TOL

    data = tmp_path / "t.csv"
    run(["synth", "torus-25", "--output", data], capsys)
    doc = json.loads(run(["fit", "--input", data, "--seed", 7], capsys)[1])
    prov = doc["provenance"]
    assert prov["command"] == "fit" and prov["seed"] == 7
    assert prov["input_sha256"] == hashlib.sha256(data.read_bytes()).hexdigest()
    assert prov["tolerances"]["rank"] == TOL.rank
    assert prov["config"]["resonance_bound"] == 10
