"""Tests for the live grouping-session service.

A small catalog is rendered once; every test drives the HTTP API through
the in-process test client, including a full scripted 3-round session.
"""

import io
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from texturespace.cli import cmd_synth
from texturespace.config import (
    ExperimentConfig,
    MdsConfig,
    PipelineConfig,
    SynthesisConfig,
)
from texturespace.exports import read_wav
from texturespace.grouping import (
    session_from_dict,
    session_points,
    validate_session,
)
from texturespace.service import create_app, replay_events

IDS = list(range(1, 25))

ROUND1 = {tid: "ABCDEFGH"[(tid - 1) // 3] for tid in IDS}
MERGE2 = {"A": "A", "B": "A", "C": "B", "D": "B", "E": "C", "F": "C",
          "G": "D", "H": "D"}
MERGE3 = {"A": "A", "B": "A", "C": "B", "D": "B"}


@pytest.fixture(scope="module")
def catalog_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("catalog")
    config = PipelineConfig(
        synthesis=SynthesisConfig(duration_s=0.25, base_seed=0),
        experiment=ExperimentConfig(participants=2),
        mds=MdsConfig(restarts=2),
        out_dir=str(out),
    )
    cmd_synth(config, out)
    return out


@pytest.fixture()
def client(catalog_dir):
    app = create_app(catalog_dir, seed=7)
    return TestClient(app)


def new_session(client, participant="p1"):
    response = client.post("/sessions", json={"participant_id": participant})
    assert response.status_code == 201
    return response.json()


def assign_all(client, sid, assignment):
    for tid, gid in assignment.items():
        response = client.post(
            f"/sessions/{sid}/assignments",
            json={"texture_id": tid, "group_id": gid},
        )
        assert response.status_code == 200, response.text


def run_full_session(client, participant="p1"):
    sid = new_session(client, participant)["session_id"]
    assign_all(client, sid, ROUND1)
    assert client.post(f"/sessions/{sid}/commit-round").status_code == 200

    round2 = {tid: MERGE2[g] for tid, g in ROUND1.items()}
    assign_all(client, sid, round2)
    assert client.post(f"/sessions/{sid}/commit-round").status_code == 200
    response = client.post(
        f"/sessions/{sid}/names",
        json={"names": {"A": "smooth", "B": "bumpy", "C": "buzzy", "D": "harsh"}},
    )
    assert response.status_code == 200

    round3 = {tid: MERGE3[g] for tid, g in round2.items()}
    assign_all(client, sid, round3)
    assert client.post(f"/sessions/{sid}/commit-round").status_code == 200
    response = client.post(
        f"/sessions/{sid}/names", json={"names": {"A": "soft", "B": "rough"}}
    )
    assert response.status_code == 200
    return sid


class TestSessions:
    def test_create_returns_permutation(self, client):
        snapshot = new_session(client)
        assert snapshot["state"] == "training"
        assert snapshot["current_round"] == 1
        assert sorted(snapshot["display_order"]) == IDS
        assert snapshot["group_slots"] == 12

    def test_distinct_sessions_get_distinct_orders(self, client):
        orders = [tuple(new_session(client)["display_order"]) for _ in range(8)]
        assert len(set(orders)) == len(orders)

    def test_get_unknown_session_404(self, client):
        assert client.get("/sessions/nope").status_code == 404

    def test_snapshot_stable_across_reads(self, client):
        sid = new_session(client)["session_id"]
        a = client.get(f"/sessions/{sid}").json()
        b = client.get(f"/sessions/{sid}").json()
        assert a == b


class TestTextures:
    def test_listing_follows_session_order(self, client):
        snapshot = new_session(client)
        sid = snapshot["session_id"]
        listed = client.get("/textures", params={"session_id": sid}).json()
        ids = [t["id"] for t in listed["textures"]]
        assert ids == snapshot["display_order"]
        again = client.get("/textures", params={"session_id": sid}).json()
        assert again == listed

    def test_listing_reveals_no_parameters(self, client):
        sid = new_session(client)["session_id"]
        payload = client.get("/textures", params={"session_id": sid}).text
        for needle in ("f0", "frequency", "amplitude", "irregularity",
                       "150", "260", "450", "0.067", "0.34", "1.67"):
            assert needle not in payload

    def test_labels_are_positional(self, client):
        sid = new_session(client)["session_id"]
        listed = client.get("/textures", params={"session_id": sid}).json()
        labels = [t["label"] for t in listed["textures"]]
        assert labels == [f"T{i:02d}" for i in range(1, 25)]

    def test_audio_bytes_decode_to_manifest_duration(self, client, catalog_dir):
        manifest = json.loads((catalog_dir / "manifest.json").read_text())
        response = client.get("/textures/1/audio")
        assert response.status_code == 200
        assert response.content[:4] == b"RIFF"
        fs, samples = read_wav(io.BytesIO(response.content))
        assert len(samples) / fs == pytest.approx(
            manifest["duration_s"], abs=1e-3
        )

    def test_unknown_texture_audio_404(self, client):
        assert client.get("/textures/99/audio").status_code == 404

    def test_masking_noise_served(self, client):
        response = client.get("/masking-noise")
        assert response.status_code == 200
        fs, samples = read_wav(io.BytesIO(response.content))
        assert fs == 44100.0
        assert len(samples) / fs == pytest.approx(5.0, abs=1e-3)
        # identical bytes on every request: it is a fixed seeded loop
        assert client.get("/masking-noise").content == response.content


class TestAssignments:
    def test_first_assignment_starts_grouping(self, client):
        sid = new_session(client)["session_id"]
        response = client.post(
            f"/sessions/{sid}/assignments",
            json={"texture_id": 1, "group_id": "A"},
        )
        assert response.json()["state"] == "grouping"

    def test_reassignment_wins(self, client):
        sid = new_session(client)["session_id"]
        for gid in ("A", "B"):
            client.post(
                f"/sessions/{sid}/assignments",
                json={"texture_id": 5, "group_id": gid},
            )
        snapshot = client.get(f"/sessions/{sid}").json()
        assert snapshot["working"]["5"] == "B"

    def test_unassign_removes(self, client):
        sid = new_session(client)["session_id"]
        client.post(
            f"/sessions/{sid}/assignments",
            json={"texture_id": 5, "group_id": "A"},
        )
        client.post(
            f"/sessions/{sid}/assignments",
            json={"texture_id": 5, "group_id": None},
        )
        assert client.get(f"/sessions/{sid}").json()["working"] == {}

    def test_slot_limit_enforced(self, client):
        sid = new_session(client)["session_id"]
        response = client.post(
            f"/sessions/{sid}/assignments",
            json={"texture_id": 1, "group_id": "M"},
        )
        assert response.status_code == 422
        assert "12" in response.text

    def test_unknown_texture_rejected(self, client):
        sid = new_session(client)["session_id"]
        response = client.post(
            f"/sessions/{sid}/assignments",
            json={"texture_id": 99, "group_id": "A"},
        )
        assert response.status_code == 422


class TestCommit:
    def test_commit_with_missing_lists_ids(self, client):
        sid = new_session(client)["session_id"]
        partial = dict(ROUND1)
        del partial[7], partial[19]
        assign_all(client, sid, partial)
        response = client.post(f"/sessions/{sid}/commit-round")
        assert response.status_code == 422
        detail = response.json()["detail"]
        assert detail["missing"] == [7, 19]

    def test_group_count_cannot_grow(self, client):
        sid = new_session(client)["session_id"]
        assign_all(client, sid, {tid: "AB"[tid % 2] for tid in IDS})
        client.post(f"/sessions/{sid}/commit-round")
        # try to split into three groups in round 2
        assign_all(client, sid, {tid: "ABC"[tid % 3] for tid in IDS})
        response = client.post(f"/sessions/{sid}/commit-round")
        assert response.status_code == 422
        assert "may not increase" in response.text

    def test_rough_halving_is_advisory_only(self, client):
        sid = new_session(client)["session_id"]
        assign_all(client, sid, ROUND1)
        client.post(f"/sessions/{sid}/commit-round")
        # merging 8 -> 7 is allowed but warned about
        barely = dict(ROUND1)
        barely.update({24: "A"})
        assign_all(client, sid, barely)
        response = client.post(f"/sessions/{sid}/commit-round")
        assert response.status_code == 200
        assert "roughly half" in response.json()["warning"]

    def test_expected_halving_no_warning(self, client):
        sid = new_session(client)["session_id"]
        assign_all(client, sid, ROUND1)
        client.post(f"/sessions/{sid}/commit-round")
        assign_all(client, sid, {t: MERGE2[g] for t, g in ROUND1.items()})
        response = client.post(f"/sessions/{sid}/commit-round")
        assert response.status_code == 200
        assert response.json()["warning"] is None

    def test_round1_commit_skips_naming(self, client):
        sid = new_session(client)["session_id"]
        assign_all(client, sid, ROUND1)
        snapshot = client.post(f"/sessions/{sid}/commit-round").json()
        assert snapshot["state"] == "grouping"
        assert snapshot["current_round"] == 2

    def test_round2_commit_requests_names(self, client):
        sid = new_session(client)["session_id"]
        assign_all(client, sid, ROUND1)
        client.post(f"/sessions/{sid}/commit-round")
        assign_all(client, sid, {t: MERGE2[g] for t, g in ROUND1.items()})
        snapshot = client.post(f"/sessions/{sid}/commit-round").json()
        assert snapshot["state"] == "naming"


class TestNames:
    def prepare_naming(self, client):
        sid = new_session(client)["session_id"]
        assign_all(client, sid, ROUND1)
        client.post(f"/sessions/{sid}/commit-round")
        assign_all(client, sid, {t: MERGE2[g] for t, g in ROUND1.items()})
        client.post(f"/sessions/{sid}/commit-round")
        return sid

    def test_names_outside_naming_state_rejected(self, client):
        sid = new_session(client)["session_id"]
        response = client.post(
            f"/sessions/{sid}/names", json={"names": {"A": "x"}}
        )
        assert response.status_code == 422

    def test_names_for_unknown_group_rejected(self, client):
        sid = self.prepare_naming(client)
        response = client.post(
            f"/sessions/{sid}/names", json={"names": {"Z": "ghost"}}
        )
        assert response.status_code == 422
        assert "Z" in response.text

    def test_blank_name_stored_verbatim(self, client):
        # the client confirms blanks; the server must not second-guess them
        sid = self.prepare_naming(client)
        response = client.post(
            f"/sessions/{sid}/names", json={"names": {"A": ""}}
        )
        assert response.status_code == 200
        assert response.json()["rounds"][1]["names"] == {"A": ""}

    def test_names_advance_to_round3(self, client):
        sid = self.prepare_naming(client)
        snapshot = client.post(
            f"/sessions/{sid}/names", json={"names": {"A": "soft"}}
        ).json()
        assert snapshot["state"] == "grouping"
        assert snapshot["current_round"] == 3
        assert snapshot["rounds"][1]["names"] == {"A": "soft"}


class TestFullFlow:
    def test_complete_session_passes_invariants(self, client, catalog_dir):
        sid = run_full_session(client, participant="p-full")
        snapshot = client.get(f"/sessions/{sid}").json()
        assert snapshot["state"] == "complete"
        assert [r["round"] for r in snapshot["rounds"]] == [1, 2, 3]

        record_path = catalog_dir / "live" / f"{sid}.session.json"
        assert record_path.exists()
        session = session_from_dict(json.loads(record_path.read_text()))
        validate_session(session, texture_ids=IDS)
        points = session_points(session)
        off = points[~np.eye(len(points), dtype=bool)]
        assert set(np.unique(off)) <= {0, 1, 2, 3}
        assert points.max() == 3

    def test_event_log_replay_matches_snapshot(self, client, catalog_dir):
        sid = run_full_session(client, participant="p-replay")
        replayed = replay_events(catalog_dir / "live" / "events.jsonl", sid)
        stored = json.loads(
            (catalog_dir / "live" / "sessions" / f"{sid}.json").read_text()
        )
        assert replayed == stored

    def test_commit_after_complete_rejected(self, client):
        sid = run_full_session(client, participant="p-done")
        assert client.post(f"/sessions/{sid}/commit-round").status_code == 422
        response = client.post(
            f"/sessions/{sid}/assignments",
            json={"texture_id": 1, "group_id": "A"},
        )
        assert response.status_code == 422


class TestAppCreation:
    def test_missing_manifest_rejected(self, tmp_path):
        with pytest.raises(OSError, match="manifest"):
            create_app(tmp_path)
