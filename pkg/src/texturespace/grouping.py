"""Three-round grouping sessions, pair scoring, and similarity aggregation.

A session records how one participant partitioned the texture set in up to
three rounds (free grouping, then merge rounds). Pairs earn 3/2/1 points for
first being co-grouped in round 1/2/3 and 0 if never; summing across
participants yields the similarity matrix that drives the embedding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GROUP_LABELS = "ABCDEFGHIJKLMNOPQRSTUVWX"

MAX_POINTS_PER_PAIR = 3


@dataclass(frozen=True)
class RoundRecord:
    """One committed round: a total assignment texture_id -> group_id."""

    round_index: int
    assignment: dict
    group_names: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.round_index <= 3:
            raise ValueError(f"round_index must be 1..3, got {self.round_index}")
        if not self.assignment:
            raise ValueError("round assignment is empty")

    def groups(self) -> dict:
        """Invert the assignment into group_id -> sorted member list."""
        members: dict = {}
        for tid, gid in self.assignment.items():
            members.setdefault(gid, []).append(tid)
        return {gid: sorted(tids) for gid, tids in members.items()}


@dataclass(frozen=True)
class GroupingSession:
    participant_id: str
    rounds: tuple

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(self.rounds))

    def texture_ids(self) -> list:
        return sorted(self.rounds[0].assignment)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Summed pair points across participants; entries in [0, 3P]."""

    ids: tuple
    counts: np.ndarray
    participants: int

    def __post_init__(self):
        if self.counts.shape != (len(self.ids), len(self.ids)):
            raise ValueError(
                f"counts must be {len(self.ids)}x{len(self.ids)}, "
                f"got {self.counts.shape}"
            )
        if self.participants < 1:
            raise ValueError("participants must be >= 1")
        self.counts.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def max_count(self) -> int:
        return MAX_POINTS_PER_PAIR * self.participants


@dataclass(frozen=True)
class DissimilarityMatrix:
    ids: tuple
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.ids), len(self.ids)):
            raise ValueError(
                f"values must be {len(self.ids)}x{len(self.ids)}, "
                f"got {self.values.shape}"
            )
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.ids)


def validate_session(session: GroupingSession, texture_ids=None) -> None:
    """Check the protocol invariants, raising ValueError with specifics.

    Round 1 must assign every texture, later rounds must stay total, group
    counts must be non-increasing, and no group may be empty (emptiness is
    impossible in an assignment map, so that amounts to totality).
    """
    if not 2 <= len(session.rounds) <= 3:
        raise ValueError(
            f"session needs 2 or 3 rounds, has {len(session.rounds)}"
        )
    indices = [r.round_index for r in session.rounds]
    if indices != list(range(1, len(indices) + 1)):
        raise ValueError(f"round indices must run 1..{len(indices)}, got {indices}")
    expected = set(texture_ids) if texture_ids is not None else set(
        session.rounds[0].assignment
    )
    prev_count = None
    for rnd in session.rounds:
        assigned = set(rnd.assignment)
        missing = expected - assigned
        if missing:
            raise ValueError(
                f"round {rnd.round_index} is missing textures {sorted(missing)}"
            )
        extra = assigned - expected
        if extra:
            raise ValueError(
                f"round {rnd.round_index} has unknown textures {sorted(extra)}"
            )
        count = len(set(rnd.assignment.values()))
        if prev_count is not None and count > prev_count:
            raise ValueError(
                f"group count grew from {prev_count} to {count} "
                f"in round {rnd.round_index}"
            )
        prev_count = count


def session_points(session: GroupingSession) -> np.ndarray:
    """Score every unordered pair: 4 - earliest co-grouped round, else 0.

    Output rows/columns follow sorted(texture ids of round 1); diagonal is
    zero (self-pairs carry no information). Sessions that violated merge
    discipline still score by the same earliest-round rule.
    """
    ids = session.texture_ids()
    index = {tid: i for i, tid in enumerate(ids)}
    n = len(ids)
    points = np.zeros((n, n), dtype=int)
    for rnd in sorted(session.rounds, key=lambda r: r.round_index, reverse=True):
        missing = set(ids) - set(rnd.assignment)
        if missing:
            raise ValueError(
                f"round {rnd.round_index} is missing textures {sorted(missing)}"
            )
        value = 4 - rnd.round_index
        for members in rnd.groups().values():
            for a in range(len(members)):
                i = index[members[a]]
                for b in range(a + 1, len(members)):
                    j = index[members[b]]
                    points[i, j] = points[j, i] = value
    return points


def aggregate(sessions) -> SimilarityMatrix:
    """Sum pair points across participants into one similarity matrix."""
    sessions = list(sessions)
    if not sessions:
        raise ValueError("no sessions to aggregate")
    ids = sessions[0].texture_ids()
    counts = np.zeros((len(ids), len(ids)), dtype=int)
    for session in sessions:
        if session.texture_ids() != ids:
            raise ValueError(
                f"session {session.participant_id!r} covers a different texture set"
            )
        counts += session_points(session)
    return SimilarityMatrix(ids=tuple(ids), counts=counts, participants=len(sessions))


def to_dissimilarity(matrix: SimilarityMatrix) -> DissimilarityMatrix:
    """Linear order-reversing map: d = 3P - counts off-diagonal, 0 diagonal.

    The embedding that consumes this is nonmetric, so any monotone
    decreasing transform would land in the same place; linear is simplest.
    """
    if matrix.participants < 1:
        raise ValueError("need at least one participant")
    values = (matrix.max_count - matrix.counts).astype(float)
    np.fill_diagonal(values, 0.0)
    return DissimilarityMatrix(ids=matrix.ids, values=values)


# ------------------------------------------------------------- simulation


def _kmeans(points: np.ndarray, k: int, rng) -> np.ndarray:
    """Deterministic Lloyd clustering; empty clusters reseeded greedily."""
    n = len(points)
    # farthest-first init from a random start keeps clusters spread out
    centers = [points[rng.integers(n)]]
    for _ in range(k - 1):
        dists = np.min(
            [np.sum((points - c) ** 2, axis=1) for c in centers], axis=0
        )
        centers.append(points[int(np.argmax(dists))])
    centers = np.array(centers)
    labels = np.zeros(n, dtype=int)
    for _ in range(100):
        d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)
        for g in range(k):
            if not np.any(new_labels == g):  # reseed an empty cluster
                new_labels[int(np.argmax(np.min(d2, axis=1)))] = g
                d2[new_labels == g, :] = 0.0
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for g in range(k):
            centers[g] = points[labels == g].mean(axis=0)
    return labels


def _merge_to(labels: np.ndarray, points: np.ndarray, target: int) -> np.ndarray:
    """Repeatedly fuse the two closest-centroid groups until target remain."""
    labels = labels.copy()
    while len(set(labels)) > target:
        groups = sorted(set(labels))
        centroids = {g: points[labels == g].mean(axis=0) for g in groups}
        best, best_d = None, np.inf
        for i, a in enumerate(groups):
            for b in groups[i + 1 :]:
                d = float(np.sum((centroids[a] - centroids[b]) ** 2))
                if d < best_d:
                    best, best_d = (a, b), d
        a, b = best
        labels[labels == b] = a
    return labels


def _labels_to_assignment(ids, labels) -> dict:
    remap = {}
    assignment = {}
    for tid, lab in zip(ids, labels):
        if lab not in remap:
            remap[lab] = GROUP_LABELS[len(remap)]
        assignment[tid] = remap[lab]
    return assignment


def simulate_participant(
    texture_set,
    weights=(1.0, 1.0, 1.0),
    noise_sd: float = 0.3,
    group_counts=(8, 4, 2),
    seed: int = 0,
) -> GroupingSession:
    """Generate one plausible 3-round session from a latent parameter space.

    Each texture gets latent coordinates: per-parameter z-scored log values
    scaled by the salience weights, plus Gaussian perceptual noise. Round 1
    clusters the latent points into group_counts[0] groups; later rounds
    merge the closest groups down to the next count, mirroring a participant
    combining the most similar groups.
    """
    g1, g2, g3 = group_counts
    ids = texture_set.texture_ids()
    if not (len(ids) >= g1 >= g2 >= g3 >= 2):
        raise ValueError(f"infeasible group counts {group_counts}")
    raw = np.array(
        [
            [p.f0_hz, p.amplitude, p.irregularity]
            for _, p in texture_set.entries
        ]
    )
    logs = np.log(raw)
    z = (logs - logs.mean(axis=0)) / logs.std(axis=0)
    rng = np.random.Generator(np.random.Philox(seed))
    latent = z * np.asarray(weights, dtype=float) + noise_sd * rng.standard_normal(
        z.shape
    )

    labels1 = _kmeans(latent, g1, rng)
    labels2 = _merge_to(labels1, latent, g2)
    labels3 = _merge_to(labels2, latent, g3)

    rounds = []
    for round_index, labels in ((1, labels1), (2, labels2), (3, labels3)):
        assignment = _labels_to_assignment(ids, labels)
        names = {}
        if round_index >= 2:  # names are collected after merge rounds
            names = {
                gid: f"r{round_index}-{gid}"
                for gid in sorted(set(assignment.values()))
            }
        rounds.append(
            RoundRecord(round_index=round_index, assignment=assignment, group_names=names)
        )
    return GroupingSession(
        participant_id=f"sim-{seed:03d}", rounds=tuple(rounds)
    )


# ------------------------------------------------------------- JSON schema


def session_to_dict(session: GroupingSession) -> dict:
    """Session as the on-disk JSON shape (groups keyed by group id)."""
    return {
        "participant_id": session.participant_id,
        "rounds": [
            {
                "round": rnd.round_index,
                "groups": rnd.groups(),
                "names": dict(rnd.group_names),
            }
            for rnd in session.rounds
        ],
    }


def session_from_dict(payload: dict) -> GroupingSession:
    rounds = []
    for entry in payload["rounds"]:
        assignment = {}
        for gid, tids in entry["groups"].items():
            for tid in tids:
                if tid in assignment:
                    raise ValueError(f"texture {tid} appears in two groups")
                assignment[tid] = gid
        rounds.append(
            RoundRecord(
                round_index=int(entry["round"]),
                assignment=assignment,
                group_names=dict(entry.get("names", {})),
            )
        )
    rounds.sort(key=lambda r: r.round_index)
    return GroupingSession(
        participant_id=str(payload["participant_id"]), rounds=tuple(rounds)
    )
