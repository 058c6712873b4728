import numpy as np
import pytest
import scipy.sparse as sp

import igamg


def test_benchmark_names():
    assert set(igamg.benchmark_names()) == {"cube", "lshape", "ring"}


def test_assemble_cube_size():
    s = igamg.assemble("cube", 12, 3)
    assert s["shape"] == (2730, 2730)
    k = sp.csr_matrix((s["data"], s["indices"], s["indptr"]), shape=s["shape"])
    assert abs(k - k.T).max() == 0.0
    assert s["rhs"].shape == (2730,)


def test_solve_matches_direct():
    s = igamg.assemble("ring", 6, 2)
    u, report = igamg.solve(s["indptr"], s["indices"], s["data"], s["rhs"], {"rtol": 1e-10})
    assert report["converged"]
    assert report["residual_history"][0] == 1.0
    k = sp.csr_matrix((s["data"], s["indices"], s["indptr"]), shape=s["shape"])
    direct = sp.linalg.spsolve(k.tocsc(), s["rhs"])
    assert np.max(np.abs(u - direct)) <= 1e-6 * np.max(np.abs(direct))


def test_solve_rejects_nonsymmetric():
    indptr = np.array([0, 2, 3])
    indices = np.array([0, 1, 1])
    data = np.array([2.0, -1.0, 2.0])
    with pytest.raises(ValueError):
        igamg.solve(indptr, indices, data, np.ones(2))


def test_run_benchmark_report():
    r = igamg.run_benchmark({"problem": "cube", "k": 6, "p": 2})
    assert list(r.keys()) == list(igamg.report_fields)
    assert r["converged"]
    assert r["config"]["problem"] == "cube"


def test_unknown_option():
    with pytest.raises(ValueError):
        igamg.run_benchmark({"problme": "cube"})


def test_sweep_csv():
    rows = igamg.sweep_csv({"problem": "ring"}, [4], [2, 3]).strip().splitlines()
    assert rows[0].startswith("problem,k,p,n_free")
    assert len(rows) == 3
