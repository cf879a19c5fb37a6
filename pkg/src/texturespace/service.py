"""HTTP service for running live grouping sessions.

Serves texture audio previews (keeping participants blind to the synthesis
parameters) and walks each session through the 3-round protocol: free
grouping, then two merge rounds, with names collected after rounds 2 and 3.
State is persisted as one JSON snapshot per session plus an append-only
event log; replaying the log reproduces every snapshot exactly.
"""

from __future__ import annotations

import io
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, Response
from pydantic import BaseModel

from .exports import read_manifest, write_wav
from .grouping import (
    GROUP_LABELS,
    GroupingSession,
    RoundRecord,
    session_to_dict,
    validate_session,
)
from .synthesis import pink_noise

TOTAL_ROUNDS = 3
DEFAULT_GROUP_SLOTS = 12
MASKING_SECONDS = 5.0
MASKING_RATE_HZ = 44_100

STATE_TRAINING = "training"
STATE_GROUPING = "grouping"
STATE_NAMING = "naming"
STATE_COMPLETE = "complete"


@dataclass
class LiveSession:
    """Mutable server-side state for one participant's run."""

    session_id: str
    participant_id: str
    display_order: list
    group_slots: int
    state: str = STATE_TRAINING
    current_round: int = 1
    working: dict = field(default_factory=dict)
    committed: list = field(default_factory=list)

    def snapshot(self) -> dict:
        return {
            "session_id": self.session_id,
            "participant_id": self.participant_id,
            "state": self.state,
            "current_round": self.current_round,
            "display_order": list(self.display_order),
            "group_slots": self.group_slots,
            "working": {str(t): g for t, g in sorted(self.working.items())},
            "rounds": [
                {
                    "round": record.round_index,
                    "groups": {
                        gid: members
                        for gid, members in sorted(record.groups().items())
                    },
                    "names": dict(sorted(record.group_names.items())),
                }
                for record in self.committed
            ],
        }

    def to_grouping_session(self) -> GroupingSession:
        return GroupingSession(
            participant_id=self.participant_id, rounds=tuple(self.committed)
        )


class CreateSessionBody(BaseModel):
    participant_id: str


class AssignmentBody(BaseModel):
    texture_id: int
    group_id: str | None = None


class NamesBody(BaseModel):
    names: dict


def _halving_warning(previous: int, committed: int) -> str | None:
    target = max(2, round(previous / 2))
    if abs(committed - target) > 1:
        return (
            f"round reduced {previous} groups to {committed}; "
            f"the protocol suggests roughly half ({target})"
        )
    return None


class SessionStore:
    """All live sessions plus their on-disk snapshots and event log."""

    def __init__(self, live_dir: Path, seed: int):
        self.live_dir = live_dir
        self.sessions_dir = live_dir / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.events_path = live_dir / "events.jsonl"
        self.seed = seed
        self.sessions: dict = {}
        self.locks: dict = {}
        self.counter = 0
        self.seq = 0
        self.global_lock = threading.Lock()
        self.log_lock = threading.Lock()

    def log_event(self, session_id: str, event_type: str, data: dict) -> None:
        with self.log_lock:
            self.seq += 1
            record = {
                "seq": self.seq,
                "session_id": session_id,
                "type": event_type,
                "data": data,
            }
            with self.events_path.open("a") as handle:
                handle.write(json.dumps(record) + "\n")

    def persist(self, session: LiveSession) -> None:
        path = self.sessions_dir / f"{session.session_id}.json"
        path.write_text(json.dumps(session.snapshot(), indent=2) + "\n")

    def create(self, participant_id: str, texture_ids) -> LiveSession:
        with self.global_lock:
            index = self.counter
            self.counter += 1
        rng = np.random.Generator(np.random.Philox(key=[self.seed, index]))
        token = "".join(f"{b:02x}" for b in rng.integers(0, 256, size=4))
        session = LiveSession(
            session_id=f"s{index:04d}-{token}",
            participant_id=participant_id,
            display_order=[int(t) for t in rng.permutation(texture_ids)],
            group_slots=DEFAULT_GROUP_SLOTS,
        )
        with self.global_lock:
            self.sessions[session.session_id] = session
            self.locks[session.session_id] = threading.Lock()
        self.log_event(
            session.session_id,
            "created",
            {
                "participant_id": participant_id,
                "display_order": session.display_order,
                "group_slots": session.group_slots,
            },
        )
        self.persist(session)
        return session

    def get(self, session_id: str) -> LiveSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(404, detail=f"unknown session {session_id!r}")
        return session

    def lock_for(self, session_id: str) -> threading.Lock:
        return self.locks[session_id]


def apply_assignment(session: LiveSession, texture_id: int, group_id) -> None:
    """Pure state transition shared by the endpoint and log replay."""
    if group_id is None:
        session.working.pop(texture_id, None)
        return
    session.working[texture_id] = group_id
    if session.state == STATE_TRAINING:
        session.state = STATE_GROUPING


def apply_commit(session: LiveSession) -> str | None:
    """Freeze the working assignment as the current round; returns the
    advisory warning, if any."""
    record = RoundRecord(
        round_index=session.current_round,
        assignment=dict(session.working),
        group_names={},
    )
    warning = None
    if session.committed:
        previous = len(session.committed[-1].groups())
        committed = len(record.groups())
        warning = _halving_warning(previous, committed)
    session.committed.append(record)
    if session.current_round == 1:
        session.current_round = 2
        session.state = STATE_GROUPING
    else:
        session.state = STATE_NAMING
    return warning


def apply_names(session: LiveSession, names: dict) -> None:
    last = session.committed[-1]
    session.committed[-1] = RoundRecord(
        round_index=last.round_index,
        assignment=dict(last.assignment),
        group_names={str(g): str(n) for g, n in names.items()},
    )
    if last.round_index >= TOTAL_ROUNDS:
        session.state = STATE_COMPLETE
    else:
        session.current_round = last.round_index + 1
        session.state = STATE_GROUPING


def replay_events(events_path, session_id: str) -> dict | None:
    """Rebuild a session snapshot purely from the event log."""
    session = None
    with open(events_path) as handle:
        for line in handle:
            event = json.loads(line)
            if event["session_id"] != session_id:
                continue
            data = event["data"]
            if event["type"] == "created":
                session = LiveSession(
                    session_id=session_id,
                    participant_id=data["participant_id"],
                    display_order=list(data["display_order"]),
                    group_slots=data["group_slots"],
                )
            elif event["type"] == "assign":
                apply_assignment(
                    session, data["texture_id"], data["group_id"]
                )
            elif event["type"] == "commit":
                apply_commit(session)
            elif event["type"] == "names":
                apply_names(session, data["names"])
    return session.snapshot() if session else None


def create_app(out_dir, seed: int = 0, group_slots: int = DEFAULT_GROUP_SLOTS):
    """Build the service around a rendered catalog directory."""
    out = Path(out_dir)
    manifest_path = out / "manifest.json"
    if not manifest_path.exists():
        raise OSError(f"missing manifest: {manifest_path} (run synth first)")
    manifest = read_manifest(manifest_path)
    textures = {int(t["id"]): t for t in manifest["textures"]}
    texture_ids = sorted(textures)
    store = SessionStore(out / "live", seed=seed)

    masking = pink_noise(
        int(MASKING_SECONDS * MASKING_RATE_HZ), seed=seed
    )
    buffer = io.BytesIO()
    write_wav(buffer, masking, MASKING_RATE_HZ)
    masking_bytes = buffer.getvalue()

    app = FastAPI(title="texture grouping service")
    app.state.store = store

    def allowed_groups(slots):
        return set(GROUP_LABELS[:slots])

    @app.get("/textures")
    def list_textures(session_id: str | None = None):
        if session_id is None:
            order = texture_ids
        else:
            order = store.get(session_id).display_order
        return {
            "textures": [
                {
                    "id": tid,
                    "label": f"T{position + 1:02d}",
                    "audio_url": f"/textures/{tid}/audio",
                }
                for position, tid in enumerate(order)
            ]
        }

    @app.get("/textures/{texture_id}/audio")
    def texture_audio(texture_id: int):
        entry = textures.get(texture_id)
        if entry is None:
            raise HTTPException(404, detail=f"unknown texture {texture_id}")
        preview = entry.get("preview") or entry.get("wav")
        return FileResponse(out / preview, media_type="audio/wav")

    @app.get("/masking-noise")
    def masking_noise():
        return Response(content=masking_bytes, media_type="audio/wav")

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if not body.participant_id.strip():
            raise HTTPException(422, detail="participant_id must be nonempty")
        session = store.create(body.participant_id, texture_ids)
        return session.snapshot()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return store.get(session_id).snapshot()

    @app.post("/sessions/{session_id}/assignments")
    def post_assignment(session_id: str, body: AssignmentBody):
        session = store.get(session_id)
        with store.lock_for(session_id):
            if session.state not in (STATE_TRAINING, STATE_GROUPING):
                raise HTTPException(
                    422, detail=f"cannot assign in state {session.state!r}"
                )
            if body.texture_id not in textures:
                raise HTTPException(
                    422, detail=f"unknown texture {body.texture_id}"
                )
            if body.group_id is not None and body.group_id not in allowed_groups(
                session.group_slots
            ):
                raise HTTPException(
                    422,
                    detail=(
                        f"group {body.group_id!r} outside the "
                        f"{session.group_slots} slots"
                    ),
                )
            apply_assignment(session, body.texture_id, body.group_id)
            store.log_event(
                session_id,
                "assign",
                {"texture_id": body.texture_id, "group_id": body.group_id},
            )
            store.persist(session)
            return session.snapshot()

    @app.post("/sessions/{session_id}/commit-round")
    def post_commit(session_id: str):
        session = store.get(session_id)
        with store.lock_for(session_id):
            if session.state != STATE_GROUPING:
                raise HTTPException(
                    422, detail=f"cannot commit in state {session.state!r}"
                )
            missing = sorted(set(texture_ids) - set(session.working))
            if missing:
                raise HTTPException(
                    422,
                    detail={
                        "error": "unassigned textures",
                        "missing": missing,
                    },
                )
            if session.committed:
                previous = len(session.committed[-1].groups())
                now = len(
                    set(session.working.values())
                )
                if now > previous:
                    raise HTTPException(
                        422,
                        detail=(
                            f"group count may not increase: round "
                            f"{session.current_round} has {now}, previous "
                            f"round had {previous}"
                        ),
                    )
            warning = apply_commit(session)
            store.log_event(session_id, "commit", {})
            store.persist(session)
            payload = session.snapshot()
            payload["warning"] = warning
            return payload

    @app.post("/sessions/{session_id}/names")
    def post_names(session_id: str, body: NamesBody):
        session = store.get(session_id)
        with store.lock_for(session_id):
            if session.state != STATE_NAMING:
                raise HTTPException(
                    422, detail=f"names not requested in state {session.state!r}"
                )
            groups = set(session.committed[-1].groups())
            unknown = sorted(set(body.names) - groups)
            if unknown:
                raise HTTPException(
                    422, detail=f"names given for empty groups: {unknown}"
                )
            # blank names are legal: the client confirms them, we store them
            apply_names(session, body.names)
            store.log_event(session_id, "names", {"names": dict(body.names)})
            store.persist(session)
            if session.state == STATE_COMPLETE:
                final = session.to_grouping_session()
                validate_session(final, texture_ids=texture_ids)
                record_path = (
                    store.live_dir / f"{session.session_id}.session.json"
                )
                record_path.write_text(
                    json.dumps(session_to_dict(final), indent=2) + "\n"
                )
            return session.snapshot()

    return app
