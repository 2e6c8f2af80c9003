import json

import pytest
from fastapi.testclient import TestClient

from collimator.config import EngineConfig
from collimator.service import create_app


IDENTITY = {"position": [0, 0, 0], "orientation": [1, 0, 0, 0]}


@pytest.fixture
def client():
    app = create_app(EngineConfig())
    return TestClient(app)


def _start(client, include_training=False):
    r = client.post("/session/start", json={
        "participant_id": "p1", "set": "A", "seed": 5,
        "include_training": include_training})
    assert r.status_code == 200
    return r.json()


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_stateless_acw_frame(client):
    r = client.post("/frame/acw", json={
        "tool": {"position": [10, 0, 0], "orientation": [1, 0, 0, 0]},
        "target": IDENTITY})
    assert r.status_code == 200
    msg = r.json()
    assert msg["type"] == "acw_frame"
    ecws = msg["payload"]["ecws"]
    assert [e["visible"] for e in ecws] == [True, False, False, False, False]
    assert ecws[0]["cs"] == 500.0


def test_stateless_gsw_frame(client):
    r = client.post("/frame/gsw", json={"tool": IDENTITY, "target": IDENTITY})
    assert r.json()["payload"]["color"] == "green"


def test_session_flow(client):
    info = _start(client)
    assert [b["widget"] for b in info["blocks"]] == ["GSW", "ACW", "GSW", "GSW", "ACW", "ACW"]
    msg = client.post("/session/begin").json()
    assert msg["type"] == "target"
    assert msg["payload"]["widget"] == "GSW"

    frame = client.post("/session/frame", json=IDENTITY).json()
    assert frame["type"] == "gsw_frame"

    target_pose = msg["payload"]["pose"]
    r = client.post("/session/confirm", json=target_pose)
    assert r.status_code == 200
    body = r.json()
    assert body["record"]["pem_mm"] == pytest.approx(0.0, abs=1e-9)
    assert body["record"]["first_of_block"] is True
    assert body["next_target"] is not None


def test_frame_requires_active_trial(client):
    _start(client)
    assert client.post("/session/frame", json=IDENTITY).status_code == 409


def test_double_begin_conflict(client):
    _start(client)
    assert client.post("/session/begin").status_code == 200
    assert client.post("/session/begin").status_code == 409


def test_second_session_conflict(client):
    _start(client)
    r = client.post("/session/start", json={
        "participant_id": "p2", "set": "B", "seed": 6})
    assert r.status_code == 409


def test_status_and_csv_export(client):
    _start(client)
    msg = client.post("/session/begin").json()
    client.post("/session/confirm", json=msg["payload"]["pose"])
    status = client.get("/session/status").json()
    assert status["records"] == 1
    csv_text = client.get("/session/records.csv").text
    lines = csv_text.strip().splitlines()
    assert lines[0].startswith("participant_id,set,block,")
    assert len(lines) == 2


def test_websocket_protocol(client):
    _start(client)
    with client.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"type": "begin"}))
        target_msg = json.loads(ws.receive_text())
        assert target_msg["type"] == "target"
        begin_msg = json.loads(ws.receive_text())
        assert begin_msg["type"] == "trial_begin"

        ws.send_text(json.dumps({"type": "pose", "payload": IDENTITY}))
        frame_msg = json.loads(ws.receive_text())
        assert frame_msg["type"] in ("acw_frame", "gsw_frame")

        # malformed JSON must produce an error and keep the connection alive
        ws.send_text("{broken")
        err = ws.receive_json()
        assert err["type"] == "error"

        ws.send_text(json.dumps({"type": "confirm",
                                 "payload": target_msg["payload"]["pose"]}))
        confirm_msg = json.loads(ws.receive_text())
        assert confirm_msg["type"] == "trial_confirm"
        assert confirm_msg["payload"]["pem_mm"] == pytest.approx(0.0, abs=1e-9)


def test_frame_round_trip_latency(client):
    import time
    _start(client)
    msg = client.post("/session/begin").json()
    assert msg["type"] == "target"
    t0 = time.perf_counter()
    n = 50
    for _ in range(n):
        r = client.post("/session/frame", json=IDENTITY)
        assert r.status_code == 200
    per_frame_ms = (time.perf_counter() - t0) * 1000 / n
    assert per_frame_ms < 5.0
