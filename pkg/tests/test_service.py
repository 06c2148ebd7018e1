import json
import threading

import pytest
from fastapi.testclient import TestClient

from blindpe.interleave import PreparedDocument, PreparedRow
from blindpe.service import create_app


class FakeClock:
    def __init__(self, start=1_000_000.0):
        self.now = start

    def __call__(self):
        return self.now

    def advance(self, seconds):
        self.now += seconds


def make_prepared(n=5, rater="r1"):
    rows = tuple(
        PreparedRow(segment_id=f"s{i}", source=f"Quelle {i}", target=f"Ziel {i}")
        for i in range(1, n + 1)
    )
    return {rater: PreparedDocument(rater_id=rater, rows=rows)}


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def journal(tmp_path):
    return tmp_path / "journal.jsonl"


@pytest.fixture
def client(clock, journal):
    app = create_app(make_prepared(), journal, deadline_minutes=90, clock=clock)
    return TestClient(app)


def start_session(client, rater="r1"):
    resp = client.post("/sessions", json={"rater_id": rater})
    assert resp.status_code == 200
    return resp.json()


class TestSessions:
    def test_deadline_is_exactly_deadline_minutes_after_start(self, client, clock):
        body = start_session(client)
        from datetime import datetime

        start = datetime.fromisoformat(body["started_at"])
        deadline = datetime.fromisoformat(body["deadline"])
        assert (deadline - start).total_seconds() == 90 * 60

    def test_duplicate_active_session_conflict(self, client):
        start_session(client)
        resp = client.post("/sessions", json={"rater_id": "r1"})
        assert resp.status_code == 409

    def test_unknown_rater_not_found(self, client):
        resp = client.post("/sessions", json={"rater_id": "nobody"})
        assert resp.status_code == 404

    def test_new_session_allowed_after_expiry(self, client, clock):
        start_session(client)
        clock.advance(91 * 60)
        assert client.post("/sessions", json={"rater_id": "r1"}).status_code == 200


class TestGetTask:
    def test_first_task_position(self, client):
        token = start_session(client)["token"]
        body = client.get(f"/sessions/{token}/tasks/0").json()
        assert body["position"] == 1
        assert body["total"] == 5

    def test_payload_field_set_exactly(self, client):
        token = start_session(client)["token"]
        body = client.get(f"/sessions/{token}/tasks/0").json()
        assert set(body) == {
            "segment_id",
            "source",
            "target",
            "position",
            "total",
            "remaining_seconds",
        }

    def test_expired_session_no_payload(self, client, clock):
        token = start_session(client)["token"]
        clock.advance(90 * 60 + 1)
        resp = client.get(f"/sessions/{token}/tasks/0")
        assert resp.status_code == 410
        assert resp.json()["detail"]["state"] == "expired"

    def test_out_of_range_index(self, client):
        token = start_session(client)["token"]
        assert client.get(f"/sessions/{token}/tasks/99").status_code == 404


def submit(client, token, index, postedit="edited", flags=None, comment=None):
    return client.put(
        f"/sessions/{token}/tasks/{index}",
        json={"postedit": postedit, "flags": flags or {}, "comment": comment},
    )


class TestSubmit:
    def test_valid_submission_persisted(self, client, journal):
        token = start_session(client)["token"]
        resp = submit(client, token, 0)
        assert resp.status_code == 200
        entries = [json.loads(l) for l in journal.read_text().splitlines()]
        assert any(e["type"] == "submit" for e in entries)

    def test_resubmission_last_write_wins_both_journaled(self, client, journal):
        token = start_session(client)["token"]
        submit(client, token, 0, postedit="first")
        submit(client, token, 0, postedit="second")
        exported = client.get("/export").text.strip().splitlines()
        records = [json.loads(l) for l in exported]
        assert len(records) == 1
        assert records[0]["postedited"] == "second"
        journaled = [
            json.loads(l) for l in journal.read_text().splitlines() if '"submit"' in l
        ]
        assert len(journaled) == 2

    def test_late_submission_rejected_and_journaled(self, client, clock, journal):
        token = start_session(client)["token"]
        submit(client, token, 0)
        clock.advance(90 * 60 + 1)  # one second past the deadline
        resp = submit(client, token, 1)
        assert resp.status_code == 410
        entries = [json.loads(l) for l in journal.read_text().splitlines()]
        assert sum(e["type"] == "late" for e in entries) == 1
        exported = [json.loads(l) for l in client.get("/export").text.strip().splitlines()]
        assert {r["segment_id"] for r in exported} == {"s1"}


class TestExport:
    def test_line_per_record(self, client):
        token = start_session(client)["token"]
        for i in range(3):
            submit(client, token, i)
        lines = client.get("/export").text.strip().splitlines()
        assert len(lines) == 3

    def test_no_origin_field_anywhere(self, client):
        token = start_session(client)["token"]
        submit(client, token, 0, flags={"omission": True})
        for line in client.get("/export").text.strip().splitlines():
            record = json.loads(line)
            assert "origin" not in record
            assert "HT" not in record.values() and "MT" not in record.values()

    def test_operator_token_enforced(self, clock, journal):
        app = create_app(
            make_prepared(), journal, clock=clock, operator_token="secret"
        )
        client = TestClient(app)
        assert client.get("/export").status_code == 403
        assert client.get("/export", headers={"x-operator-token": "secret"}).status_code == 200

    def test_snapshot_consistent_under_concurrent_writers(self, clock, journal):
        app = create_app(make_prepared(n=40), journal, clock=clock)
        client = TestClient(app)
        token = start_session(client)["token"]

        def writer(base):
            for i in range(base, base + 10):
                submit(client, token, i)

        threads = [threading.Thread(target=writer, args=(b,)) for b in (0, 10, 20, 30)]
        for t in threads:
            t.start()
        for _ in range(5):
            for line in client.get("/export").text.strip().splitlines():
                json.loads(line)  # no torn records
        for t in threads:
            t.join()
        assert len(client.get("/export").text.strip().splitlines()) == 40


class TestBlinding:
    def test_no_route_exposes_origin(self, client):
        token = start_session(client)["token"]
        submit(client, token, 0, flags={"terminology": True})
        responses = [
            client.post("/sessions", json={"rater_id": "nobody"}),
            client.get(f"/sessions/{token}/status"),
            client.get(f"/sessions/{token}/tasks/1"),
            client.get("/export"),
        ]
        for resp in responses:
            body = resp.text
            assert '"origin"' not in body
            assert "blinding_key" not in body


class TestDurability:
    def test_acknowledged_submissions_survive_restart(self, clock, journal):
        app = create_app(make_prepared(), journal, clock=clock)
        client = TestClient(app)
        token = start_session(client)["token"]
        submit(client, token, 0, postedit="durable")
        submit(client, token, 1)

        reborn = TestClient(create_app(make_prepared(), journal, clock=clock))
        lines = reborn.get("/export").text.strip().splitlines()
        records = {json.loads(l)["segment_id"]: json.loads(l) for l in lines}
        assert set(records) == {"s1", "s2"}
        assert records["s1"]["postedited"] == "durable"

    def test_deadline_monotone_no_unexpire(self, client, clock):
        token = start_session(client)["token"]
        clock.advance(90 * 60 + 5)
        assert submit(client, token, 1).status_code == 410
        # even if a skewed client retries immediately, state stays expired
        assert client.get(f"/sessions/{token}/status").json()["state"] == "expired"
