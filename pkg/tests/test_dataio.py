import numpy as np
import pytest

from semjd import (
    MalformedRow,
    NonUniformGrid,
    PathData,
    SimConfig,
    TooFewRows,
    simulate_observations,
)
from semjd.dataio import ingest_csv, write_path_csv, write_selection_csv


def test_round_trip_exact(tmp_path, true_model):
    path = simulate_observations(true_model, SimConfig(n=50, t_end=1.0, seed=8))
    fname = str(tmp_path / "path.csv")
    write_path_csv(path, fname)
    back = ingest_csv(fname)
    # h is inferred from the written grid; i*h - (i-1)*h wobbles by ulps
    assert abs(back.h - path.h) <= np.spacing(path.h)
    assert np.array_equal(back.x, path.x)


def test_three_row_file(tmp_path):
    fname = tmp_path / "tiny.csv"
    fname.write_text("t,X1,X2\n0,1.0,2.0\n0.5,1.1,2.1\n1.0,1.2,2.2\n")
    path = ingest_csv(str(fname))
    assert path.n == 2
    assert path.h == pytest.approx(0.5)
    assert path.p == 2


def test_non_uniform_grid(tmp_path):
    fname = tmp_path / "bad.csv"
    fname.write_text("t,X1\n0,1\n0.1,2\n0.25,3\n")
    with pytest.raises(NonUniformGrid):
        ingest_csv(str(fname))


def test_decreasing_grid(tmp_path):
    fname = tmp_path / "bad.csv"
    fname.write_text("t,X1\n0,1\n0.2,2\n0.1,3\n")
    with pytest.raises(NonUniformGrid):
        ingest_csv(str(fname))


def test_malformed_arity(tmp_path):
    fname = tmp_path / "bad.csv"
    fname.write_text("t,X1,X2\n0,1,2\n0.5,1\n1.0,1,2\n")
    with pytest.raises(MalformedRow):
        ingest_csv(str(fname))


def test_malformed_value(tmp_path):
    fname = tmp_path / "bad.csv"
    fname.write_text("t,X1\n0,1\n0.5,oops\n1.0,3\n")
    with pytest.raises(MalformedRow):
        ingest_csv(str(fname))


def test_too_few_rows(tmp_path):
    fname = tmp_path / "bad.csv"
    fname.write_text("t,X1\n0,1\n0.5,2\n")
    with pytest.raises(TooFewRows):
        ingest_csv(str(fname))


def test_empty_file(tmp_path):
    fname = tmp_path / "empty.csv"
    fname.write_text("")
    with pytest.raises(TooFewRows):
        ingest_csv(str(fname))


def test_spacing_tolerance(tmp_path):
    # uniform up to ~1e-12 relative wobble is accepted
    t = np.arange(5) * 0.1
    t[2] += 1e-13
    lines = ["t,X1"] + [f"{ti:.17g},{float(i):.17g}" for i, ti in enumerate(t)]
    fname = tmp_path / "ok.csv"
    fname.write_text("\n".join(lines) + "\n")
    path = ingest_csv(str(fname))
    assert path.n == 4


def test_selection_csv(tmp_path, true_model):
    from semjd import CandidateModel, ExperimentConfig, run_experiment
    from semjd.presets import builtin_model

    spec, init = builtin_model("model1")
    cfg = ExperimentConfig(
        true_model=true_model,
        candidates=[CandidateModel("model1", spec, init)],
        replications=2,
        n_grid=[500],
        master_seed=1,
        threads=1,
    )
    table = run_experiment(cfg)
    out = tmp_path / "table.csv"
    write_selection_csv(table, str(out))
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "criterion,n,model,count,fraction"
    # (model1 + failed) rows for each of the two criteria
    assert len(lines) == 1 + 2 * 2
    assert "qbic,500,model1,2,1" in lines[1]


def test_write_protects_nothing_silently(tmp_path):
    path = PathData(0.25, np.arange(8, dtype=float).reshape(4, 2))
    fname = str(tmp_path / "p.csv")
    write_path_csv(path, fname)
    txt = open(fname).read().splitlines()
    assert txt[0] == "t,X1,X2"
    assert txt[1].startswith("0,")
    assert len(txt) == 5
