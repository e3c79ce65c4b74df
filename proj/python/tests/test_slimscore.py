import itertools
import os

import pytest

import slimscore as slim

DATA = os.environ.get("SLIM_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def toy():
    return slim.Dataset([[1, 0], [0, 1], [2, -1], [-1, 1]], [1, -1, 1, -1], ["a", "b"])


def test_solve_matches_enumeration():
    data = toy()
    lattice = slim.parse_lattice("{0,±1,±2}", 2)
    report = slim.solve(data, lattice, c0="0.05", c1="0.01", intercept="none", time_limit=10)
    assert report["status"] == "optimal"
    best = min(
        slim.objective(data, slim.ScoringSystem(list(c), 0, ["a", "b"]), "0.05", "0.01", "none")[2]
        for c in itertools.product([-2, -1, 0, 1, 2], repeat=2)
    )
    assert report["objective"] == pytest.approx(best)
    assert report["model"].predict(data) == [1, -1, 1, -1]


def test_brute_force_agrees():
    data = toy()
    lattice = slim.parse_lattice("int[-2,2]", 2)
    a = slim.solve(data, lattice, c0="0.02", c1="0.001")
    b = slim.brute_force(data, lattice, c0="0.02", c1="0.001")
    assert a["model"] == b["model"]


def test_errors_raise():
    with pytest.raises(slim.SlimError, match="does not contain 0"):
        slim.parse_lattice("{1,2}", 1)
    with pytest.raises(slim.SlimError):
        slim.load_csv("/nonexistent.csv")


def test_model_text_round_trip():
    m = slim.ScoringSystem([-10, 9, -9], -1, ["PettyTheft", "WeaponUse", "Employment"])
    assert str(m).startswith("Score = -10 PettyTheft + 9 WeaponUse - 9 Employment - 1")
    assert slim.parse_model(slim.serialize_model(m)) == m
    assert slim.render_tree(m).startswith("PettyTheft?")


def test_bound():
    lk = slim.log_cardinality(slim.parse_lattice("int[-100,100]", 10))
    assert slim.generalization_bound(0.037, lk, 683, 0.05) == pytest.approx(0.2395, abs=1e-3)


def test_haberman_cv():
    data = slim.load_csv(os.path.join(DATA, "haberman.csv"), label="Died")
    assert (data.n, data.p) == (306, 3)
    res = slim.cross_validate(data, slim.parse_lattice("int[-10,10]", 3), folds=3, time_limit=30)
    assert len(res["folds"]) == 3
    assert 0 <= res["mean_test_error"] <= 0.5


def test_exported_mip_solves_to_the_same_objective(tmp_path):
    highspy = pytest.importorskip("highspy")
    data = toy()
    lattice = slim.parse_lattice("int[-3,3]", 2)
    args = dict(c0="0.05", c1="0.01", intercept="none")
    exported = slim.export_mip(data, lattice, format="interchange-fixed", **args)
    assert (exported["variables"], exported["constraints"]) == (10, 16)
    path = tmp_path / "toy.mps"
    path.write_text(exported["text"])
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    assert h.readModel(str(path)) == highspy.HighsStatus.kOk
    h.run()
    assert h.getModelStatus() == highspy.HighsModelStatus.kOptimal
    report = slim.solve(data, lattice, time_limit=10, **args)
    assert h.getInfo().objective_function_value == pytest.approx(report["objective"], abs=1e-6)
