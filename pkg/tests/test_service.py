import json

import pytest
from fastapi.testclient import TestClient

from privacy_elicit.service import ServiceConfig, SessionStore, create_app

from conftest import VC_GOAL


@pytest.fixture
def client(tmp_path):
    config = ServiceConfig(store_dir=str(tmp_path / "sessions"))
    app = create_app(config)
    with TestClient(app) as c:
        c.store_dir = tmp_path / "sessions"
        c.config = config
        yield c


def create_session(client, seed=7):
    resp = client.post("/sessions", json={"goal": VC_GOAL, "seed": seed})
    assert resp.status_code == 201
    body = resp.json()
    client.put(
        f"/sessions/{body['session_id']}/requirements",
        json={"requirements": body["requirements"]},
    )
    return body["session_id"]


def drive(client, sid, steps):
    """Answer `steps` questions with the first option; returns responses."""
    out = []
    for _ in range(steps):
        q = client.get(f"/sessions/{sid}/question").json()
        if q["terminated"]:
            break
        resp = client.post(
            f"/sessions/{sid}/answer",
            json={"question_id": q["question"]["id"], "variant": "selected", "selected": [0]},
        )
        assert resp.status_code == 200
        out.append(resp.json())
    return out


class TestSessionEndpoints:
    def test_create_returns_initial_state(self, client):
        resp = client.post("/sessions", json={"goal": VC_GOAL})
        assert resp.status_code == 201
        body = resp.json()
        assert body["requirements"]
        assert body["initial_graph"]["data_flow"]
        assert "video_conferencing" in body["domain_labels"]

    def test_empty_goal_422(self, client):
        assert client.post("/sessions", json={"goal": "  "}).status_code == 422
        assert client.post("/sessions", json={}).status_code == 422

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/question").status_code == 404
        assert client.post("/sessions/nope/stop").status_code == 404

    def test_question_loop_and_answer(self, client):
        sid = create_session(client)
        q = client.get(f"/sessions/{sid}/question").json()
        assert not q["terminated"]
        assert q["question"]["options"] == ["yes", "no"]
        assert q["progress"]["limit"] == 25
        answers = drive(client, sid, 1)
        assert answers[0]["graph_delta"]
        assert answers[0]["progress"]["asked"] == 1

    def test_question_before_requirements_409(self, client):
        resp = client.post("/sessions", json={"goal": VC_GOAL})
        sid = resp.json()["session_id"]
        assert client.get(f"/sessions/{sid}/question").status_code == 409

    def test_stale_answer_409_and_bad_index_422(self, client):
        sid = create_session(client)
        q = client.get(f"/sessions/{sid}/question").json()["question"]
        stale = client.post(
            f"/sessions/{sid}/answer",
            json={"question_id": "q999", "variant": "selected", "selected": [0]},
        )
        assert stale.status_code == 409
        bad = client.post(
            f"/sessions/{sid}/answer",
            json={"question_id": q["id"], "variant": "selected", "selected": [17]},
        )
        assert bad.status_code == 422

    def test_mode_stop_resume(self, client):
        sid = create_session(client)
        assert client.post(f"/sessions/{sid}/mode", json={"mode": "explore"}).status_code == 200
        assert client.post(f"/sessions/{sid}/mode", json={"mode": "warp"}).status_code == 422
        drive(client, sid, 2)
        assert client.post(f"/sessions/{sid}/stop").json()["terminated"] == "user_stop"
        q = client.get(f"/sessions/{sid}/question").json()
        assert q["terminated"] and q["reason"] == "user_stop"
        assert client.post(f"/sessions/{sid}/assessment").status_code == 200
        assert client.post(f"/sessions/{sid}/resume").status_code == 200
        assert not client.get(f"/sessions/{sid}/question").json()["terminated"]

    def test_representation_views(self, client):
        sid = create_session(client)
        drive(client, sid, 6)
        rep = client.get(f"/sessions/{sid}/representation").json()
        overview = rep["overview"]
        assert overview["data_flow"]
        for interaction in overview["interactions"]:
            assert interaction["attached_to"] in [n["id"] for n in overview["data_flow"]]
        assert set(rep["detail"]) == {
            n["id"] for n in overview["data_flow"]
        } | {i["id"] for i in overview["interactions"]}

    def test_assessment_flow_and_export(self, client):
        sid = create_session(client)
        drive(client, sid, 30)
        rows = client.post(f"/sessions/{sid}/assessment").json()["rows"]
        assert rows
        patched = client.patch(
            f"/sessions/{sid}/assessment",
            json={"edit": {"row": 0, "add_issue": "manual concern"}},
        ).json()["rows"]
        assert patched[0]["issues"][-1]["text"] == "manual concern"
        bad = client.patch(
            f"/sessions/{sid}/assessment", json={"edit": {"row": 99, "add_issue": "x"}}
        )
        assert bad.status_code == 422
        csv_resp = client.get(f"/sessions/{sid}/export", params={"format": "csv"})
        assert csv_resp.headers["content-type"].startswith("text/csv")
        assert csv_resp.content.startswith(b"Data Action,Data,Specific Context,Summary Issues\r\n")
        xlsx_resp = client.get(f"/sessions/{sid}/export", params={"format": "xlsx"})
        assert xlsx_resp.content[:2] == b"PK"

    def test_export_before_assessment_409(self, client):
        sid = create_session(client)
        assert client.get(f"/sessions/{sid}/export").status_code == 409
        assert client.patch(
            f"/sessions/{sid}/assessment", json={"edit": {"row": 0, "add_issue": "x"}}
        ).status_code == 409


class TestPersistence:
    def test_log_written_per_input(self, client):
        sid = create_session(client)
        drive(client, sid, 2)
        log = (client.store_dir / f"{sid}.log").read_text().strip().splitlines()
        header = json.loads(log[0])
        assert header["schema"] == "session-inputs/1"
        types = [json.loads(line)["type"] for line in log[1:]]
        assert types == [
            "start", "requirements",
            "next_question", "answer", "next_question", "answer",
        ]

    def test_recovery_resumes_identically(self, client):
        sid = create_session(client)
        drive(client, sid, 5)
        before = client.get(f"/sessions/{sid}/representation").json()

        fresh = create_app(ServiceConfig(store_dir=str(client.store_dir)))
        with TestClient(fresh) as restarted:
            after = restarted.get(f"/sessions/{sid}/representation").json()
            assert after == before
            # and the restarted service keeps serving the same session
            q = restarted.get(f"/sessions/{sid}/question").json()
            assert not q["terminated"]

    def test_corrupt_log_quarantines_only_that_session(self, client):
        good = create_session(client)
        bad = create_session(client)
        drive(client, good, 2)
        with open(client.store_dir / f"{bad}.log", "a") as fp:
            fp.write("{torn json\n")

        fresh = create_app(ServiceConfig(store_dir=str(client.store_dir)))
        with TestClient(fresh) as restarted:
            assert restarted.get(f"/sessions/{good}/question").status_code == 200
            assert restarted.get(f"/sessions/{bad}/question").status_code == 500

    def test_store_replay_equals_live_state(self, client):
        sid = create_session(client)
        drive(client, sid, 30)
        client.post(f"/sessions/{sid}/assessment")
        client.patch(
            f"/sessions/{sid}/assessment",
            json={"edit": {"row": 0, "column": "data", "value": "hand edited"}},
        )
        live_csv = client.get(f"/sessions/{sid}/export").content

        fresh = create_app(ServiceConfig(store_dir=str(client.store_dir)))
        with TestClient(fresh) as restarted:
            assert restarted.get(f"/sessions/{sid}/export").content == live_csv


class TestConfigFile:
    def test_from_file(self, tmp_path):
        path = tmp_path / "service.json"
        path.write_text(json.dumps({
            "port": 9100,
            "store_dir": str(tmp_path / "s"),
            "provider": {"backend": "stub", "seed": 3},
            "engine": {"hard_limit": 10},
        }))
        cfg = ServiceConfig.from_file(path)
        assert cfg.port == 9100
        assert cfg.provider.seed == 3
        assert cfg.engine.hard_limit == 10
