import time

import pytest
from fastapi.testclient import TestClient

from preftours.gtop import TourSet, tour_length
from preftours.service import create_app


@pytest.fixture
def client():
    app = create_app()
    with TestClient(app) as c:
        yield c


def start_session(client, k=2, seed=0, scenario="coastline", n=3):
    response = client.post(
        "/sessions",
        json={"scenario": scenario,
              "config": {"max_iterations": k, "n_regions_sampled": n, "seed": seed}},
    )
    assert response.status_code == 201
    return response.json()


def wait_for_query(client, sid, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        response = client.get(f"/sessions/{sid}/query")
        if response.status_code != 202:
            return response
        time.sleep(min(0.05, float(response.json().get("retry_after", 0.1))))
    raise AssertionError("query never became ready")


def wait_for_status(client, sid, wanted, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        body = client.get(f"/sessions/{sid}/status").json()
        if body["status"] == wanted:
            return body
        time.sleep(0.05)
    raise AssertionError(f"status never reached {wanted}")


def test_create_session_returns_id(client):
    body = start_session(client)
    assert body["id"]
    assert body["status"] in ("computing", "awaiting_choice")
    assert body["max_iterations"] == 2


def test_scenarios_endpoint_lists_shipped(client):
    body = client.get("/scenarios").json()
    names = [s["name"] for s in body]
    assert "coastline" in names
    entry = next(s for s in body if s["name"] == "coastline")
    assert entry["num_regions"] == 17


def test_unknown_scenario_404(client):
    response = client.post("/sessions", json={"scenario": "atlantis"})
    assert response.status_code == 404


def test_malformed_config_rejected(client):
    response = client.post(
        "/sessions",
        json={"scenario": "coastline", "config": {"cut_prob": 0.2}},
    )
    assert response.status_code in (400, 422)
    # the offending field is named somewhere in the error payload
    assert "cut_prob" in response.text


def test_zero_iterations_finishes_immediately(client):
    body = start_session(client, k=0)
    assert body["status"] == "finished"
    result = client.get(f"/sessions/{body['id']}/result")
    assert result.status_code == 200
    assert result.json()["trace"] == []


def test_query_payload_shape(client):
    body = start_session(client)
    response = wait_for_query(client, body["id"])
    assert response.status_code == 200
    payload = response.json()
    assert payload["iteration"] == 1
    assert set(payload) >= {"option1", "option2", "geometry"}
    for option in (payload["option1"], payload["option2"]):
        assert len(option["tours"]) == 2
        assert len(option["visit_counts"]) == 17
    geometry = payload["geometry"]
    assert len(geometry["regions"]) == 17
    assert "depot" in geometry


def test_query_tour_lengths_recompute(client, coastline_env):
    body = start_session(client)
    payload = wait_for_query(client, body["id"]).json()
    for option in (payload["option1"], payload["option2"]):
        tours = TourSet.from_dict(option)
        for tour in tours.tours:
            actual = tour_length(coastline_env, list(tour.vertices))
            assert abs(actual - tour.length) < 1e-6


def test_unknown_session_404(client):
    assert client.get("/sessions/nope/query").status_code == 404
    assert client.get("/sessions/nope/status").status_code == 404
    assert client.get("/sessions/nope/result").status_code == 404
    assert client.post("/sessions/nope/choice", json={"chosen": 1}).status_code == 404


def test_invalid_choice_index(client):
    body = start_session(client)
    wait_for_query(client, body["id"])
    response = client.post(f"/sessions/{body['id']}/choice", json={"chosen": 3})
    assert response.status_code in (400, 422)


def test_result_before_finish_conflicts(client):
    body = start_session(client)
    wait_for_query(client, body["id"])
    assert client.get(f"/sessions/{body['id']}/result").status_code == 409


def test_full_round_trip_three_choices(client):
    body = start_session(client, k=3, seed=5)
    sid = body["id"]
    for k in (1, 2, 3):
        payload = wait_for_query(client, sid).json()
        assert payload["iteration"] == k
        response = client.post(
            f"/sessions/{sid}/choice",
            json={"chosen": 1 if k % 2 else 2, "iteration": k},
        )
        assert response.status_code == 200
    final = wait_for_status(client, sid, "finished")
    assert final["iteration"] == 3
    result = client.get(f"/sessions/{sid}/result").json()
    assert len(result["trace"]) == 3
    assert result["final_tours"]["tours"]
    # a finished session refuses further queries and choices
    assert client.get(f"/sessions/{sid}/query").status_code == 409
    late = client.post(f"/sessions/{sid}/choice", json={"chosen": 1})
    assert late.status_code == 409


def test_double_submit_is_idempotent(client):
    body = start_session(client, k=2, seed=8)
    sid = body["id"]
    wait_for_query(client, sid)
    first = client.post(f"/sessions/{sid}/choice", json={"chosen": 2, "iteration": 1})
    assert first.status_code == 200
    again = client.post(f"/sessions/{sid}/choice", json={"chosen": 2, "iteration": 1})
    assert again.status_code == 200
    wait_for_query(client, sid)
    status = client.get(f"/sessions/{sid}/status").json()
    assert status["iteration"] == 1
    assert status["cuts"] <= 1


def test_conflicting_resubmit_rejected(client):
    body = start_session(client, k=2, seed=9)
    sid = body["id"]
    wait_for_query(client, sid)
    assert client.post(f"/sessions/{sid}/choice",
                       json={"chosen": 1, "iteration": 1}).status_code == 200
    # a different choice for the already-applied iteration is a conflict
    response = client.post(f"/sessions/{sid}/choice",
                           json={"chosen": 2, "iteration": 1})
    assert response.status_code == 409


def test_query_during_computing_gives_retry_hint(client):
    body = start_session(client, k=2, seed=10)
    sid = body["id"]
    response = client.get(f"/sessions/{sid}/query")
    if response.status_code == 202:
        assert float(response.json()["retry_after"]) > 0
    else:
        assert response.status_code == 200


def test_inline_scenario(client):
    scenario = {
        "name": "inline",
        "depot": {"x": 0, "y": 0},
        "regions": [
            {"id": 0, "points": [{"x": 4, "y": 0}]},
            {"id": 1, "points": [{"x": 0, "y": 4}]},
        ],
        "num_robots": 1,
        "budget_factor": 2.5,
    }
    response = client.post(
        "/sessions",
        json={"scenario": scenario, "config": {"max_iterations": 1, "seed": 0}},
    )
    assert response.status_code == 201
    payload = wait_for_query(client, response.json()["id"]).json()
    assert len(payload["geometry"]["regions"]) == 2


def test_invalid_inline_scenario_400(client):
    scenario = {
        "name": "broken",
        "depot": {"x": 0, "y": 0},
        "regions": [
            {"id": 0, "points": [{"x": 1, "y": 1}]},
            {"id": 1, "points": [{"x": 1, "y": 1}]},
        ],
        "num_robots": 1,
        "budget_factor": 2.0,
    }
    response = client.post("/sessions", json={"scenario": scenario})
    assert response.status_code == 400
