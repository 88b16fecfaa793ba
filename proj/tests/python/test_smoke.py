import numpy as np
import pytest
import scipy.optimize as sopt
import scipy.sparse as sp

import chainbound as cb


def scipy_optimum(prob):
    """Independent MILP solve of the exposed problem via HiGHS."""
    c = -np.asarray(prob.objective())  # scipy minimizes, the model maximizes
    lo, hi, integrality = prob.bounds()
    rows = prob.constraints()
    data, ri, ci, lb, ub = [], [], [], [], []
    for k, (terms, rel, rhs) in enumerate(rows):
        for var, coef in terms:
            ri.append(k)
            ci.append(var)
            data.append(coef)
        if rel == "==":
            lb.append(rhs)
            ub.append(rhs)
        elif rel == "<=":
            lb.append(-np.inf)
            ub.append(rhs)
        else:
            lb.append(rhs)
            ub.append(np.inf)
    A = sp.csr_matrix((data, (ri, ci)), shape=(len(rows), prob.num_vars))
    res = sopt.milp(
        c,
        constraints=sopt.LinearConstraint(A, lb, ub),
        integrality=np.asarray(integrality),
        bounds=sopt.Bounds(np.asarray(lo), np.asarray(hi)),
    )
    assert res.status == 0, res.message
    return -res.fun


def test_toy_welfare():
    inst = cb.generate(cb.toy_config())
    out = cb.solve(cb.formulate_full(inst))
    assert out["status"] == "optimal"
    assert out["objective"] == pytest.approx(35.0, abs=1e-9)


def test_full_model_matches_scipy():
    cfg = cb.Config()
    cfg.nodes = 10
    cfg.products = 2
    cfg.technologies = 2
    cfg.seed = 33
    prob = cb.formulate_full(cb.generate(cfg))
    ours = cb.solve(prob)
    assert ours["status"] == "optimal"
    assert ours["objective"] == pytest.approx(scipy_optimum(prob), rel=1e-7, abs=1e-7)


def test_phase_bounds_sandwich_scipy():
    cfg = cb.Config()
    cfg.nodes = 9
    cfg.products = 1
    cfg.seed = 12
    inst = cb.generate(cfg)
    optimum = scipy_optimum(cb.formulate_full(inst))
    eps = 1e-5 * (1 + abs(optimum))

    lb = cb.lower_bound(inst, edges=20, draws=4, seed=2, threads=2)
    ub = cb.upper_bound(inst, partitions=3, trials=4, seed=2, threads=2)
    assert lb["best_lb"] <= optimum + eps
    assert ub["best_ub"] >= optimum - eps
    assert lb["stats"]["n"] == 4


def test_gsc_report_shape_and_exactness():
    cfg = cb.Config()
    cfg.nodes = 8
    cfg.products = 1
    cfg.seed = 5
    inst = cb.generate(cfg)
    report = cb.run_gsc(inst, [(10, 2, 3), ("max", "max", 1)], seed=3)
    direct = cb.solve(cb.formulate_full(inst))["objective"]
    eps = 1e-5 * (1 + abs(direct))
    assert report["best_lb"] <= direct + eps
    assert report["best_ub"] >= direct - eps
    assert report["levels"][-1]["gap_percent"] <= 1e-6
    assert report["gap"] == cb.format_gap(report["gap_percent"])


def test_bundle_roundtrip(tmp_path):
    cfg = cb.Config()
    cfg.nodes = 7
    cfg.products = 2
    cfg.technologies = 1
    cfg.seed = 9
    inst = cb.generate(cfg)
    cb.write_bundle(inst, str(tmp_path / "b"))
    back = cb.read_bundle(str(tmp_path / "b"))
    assert back.num_nodes == inst.num_nodes
    assert back.num_edges == inst.num_edges
    assert back.validate() == []
    assert cb.formulate_full(back) == cb.formulate_full(inst)


def test_gap_formatting():
    assert cb.format_gap(cb.gap_percent(163179868, 164114871)) == "0.57"
    assert cb.format_gap(cb.gap_percent(97366828, 164124897)) == "40.7"
