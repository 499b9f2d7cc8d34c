import json

import pytest

import irm


def cars():
    return irm.dataset_from_rows([[0.4, 0.8], [0.6, 0.5], [0.3, 0.6], [0.7, 0.4], [0.9, 0.2]], name="cars")


def test_generate_and_skyline():
    ds = irm.generate_dataset("anti", n=500, d=3, seed=4)
    assert len(ds) == 500 and ds.dim == 3
    sky = irm.skyline(ds)
    assert 0 < len(sky) < 500
    assert all(0.0 <= x <= 1.0 for x in ds.coords(sky[0]))


def test_car_skyline_and_regret():
    ds = cars()
    assert irm.skyline(ds) == [0, 1, 3, 4]
    assert irm.regret_ratio(ds, [4], [1.0, 0.0]) == 0.0
    assert irm.regret_ratio(ds, [0], [1.0, 0.0]) > 0.0


@pytest.mark.parametrize("algorithm", ["sorting-simplex", "sorting-random", "uh-simplex", "uh-random"])
def test_session_converges_to_zero_regret(algorithm):
    ds = irm.generate_dataset("anti", n=2000, d=4, seed=2)
    weights = [0.1, 0.2, 0.3, 0.4]
    user = irm.HiddenUser(weights)
    s = irm.Session(ds, algorithm=algorithm, s=4, seed=3)
    assert s.round == 1 and len(s.next_display()) == 4
    irm.simulate(s, user, ds)
    assert s.status == "converged"
    point, bound = s.recommend()
    assert user.true_regret(ds, point) == 0.0
    assert bound >= 0.0
    assert s.contains_utility(weights)
    assert json.loads(s.document())["status"] == "converged"


def test_errors_carry_codes():
    ds = irm.generate_dataset("anti", n=300, d=3, seed=1)
    s = irm.Session(ds, algorithm="sorting-simplex", s=3)
    shown = s.next_display()
    with pytest.raises(irm.IrmError) as err:
        s.submit_sort(shown[:2])
    assert err.value.code == "not_a_permutation"
    with pytest.raises(irm.IrmError) as err:
        s.submit_sort(shown, round=5)
    assert err.value.code == "stale_round"
    with pytest.raises(irm.IrmError):
        irm.Session(ds, s=20)


def test_replay_round_trip():
    ds = irm.generate_dataset("indep", n=800, d=3, seed=5)
    s = irm.Session(ds, algorithm="uh-random", s=3, seed=8)
    irm.simulate(s, irm.HiddenUser.sample(3, 2), ds)
    text = s.document(embed_dataset=True)
    again = irm.replay(text)
    assert again.document(embed_dataset=True) == text
    assert irm.replay(s.document(), ds).recommend() == s.recommend()
    with pytest.raises(irm.IrmError) as err:
        irm.replay(text[: len(text) // 2])
    assert err.value.code == "corrupt_record"


def test_experiment_records():
    ds = irm.generate_dataset("anti", n=1000, d=3, seed=3)
    recs = irm.run_experiment(ds, algorithms=["sorting-simplex", "uh-simplex"], trials=2)
    assert len(recs) == 4
    assert {r["algorithm"] for r in recs} == {"sorting-simplex", "uh-simplex"}
    assert all(r["final_regret"] == 0.0 and r["error"] == "" for r in recs)


def test_original_weights_user():
    rows = [[4029, 2052, 0, 192], [2432, 985, 0, 899], [2633, 652, 234, 650], [2505, 251, 354, 276]]
    ds = irm.dataset_from_rows(rows, name="nba", columns=["pts", "reb", "stl", "ast"])
    user = irm.HiddenUser.from_original_weights(ds, [0.3, 0.3, 0.2, 0.2])
    assert user.sort(ds, [0, 1, 2, 3]) == [0, 1, 2, 3]
    assert ds.original(0) == pytest.approx([4029, 2052, 0, 192])


def test_service_in_process():
    svc = irm.Service()
    svc.add_dataset(irm.generate_dataset("anti", n=400, d=3, seed=1), "anti")
    status, body = svc.handle("POST", "/api/sessions", {"dataset": "anti", "algorithm": "uh-simplex", "s": 3})
    assert status == 200
    sid = body["id"]
    status, disp = svc.handle("GET", f"/api/sessions/{sid}/display")
    fav = disp["points"][0]["id"]
    status, body = svc.handle("POST", f"/api/sessions/{sid}/favorite", {"round": 1, "favorite": fav})
    assert status == 200 and body["rounds_completed"] == 1
    status, body = svc.handle("POST", f"/api/sessions/{sid}/favorite", {"round": 1, "favorite": fav})
    assert status == 409 and body["code"] == "stale_round"
