"""Tests for grouping sessions, pair scoring, and the simulated participant.

The scoring oracle here is written from scratch: enumerate every pair and
find the earliest round whose assignment puts both textures in one group.
"""

import numpy as np
import pytest

from texturespace.grouping import (
    DissimilarityMatrix,
    GroupingSession,
    MAX_POINTS_PER_PAIR,
    RoundRecord,
    SimilarityMatrix,
    aggregate,
    session_from_dict,
    session_points,
    session_to_dict,
    simulate_participant,
    to_dissimilarity,
    validate_session,
)
from texturespace.synthesis import TextureParams, TextureSet, build_texture_set


def make_session(participant, assignments, names=None):
    rounds = []
    for i, assignment in enumerate(assignments, start=1):
        rounds.append(
            RoundRecord(
                round_index=i,
                assignment=dict(assignment),
                group_names=dict((names or {}).get(i, {})),
            )
        )
    return GroupingSession(participant_id=participant, rounds=tuple(rounds))


def brute_force_points(assignments):
    """Pair points by direct enumeration: 4 - earliest co-grouped round."""
    ids = sorted(assignments[0])
    points = {}
    for a in ids:
        for b in ids:
            if a >= b:
                continue
            score = 0
            for round_number, assignment in enumerate(assignments, start=1):
                if assignment[a] == assignment[b]:
                    score = 4 - round_number
                    break
            points[(a, b)] = score
    return points


# a 4-texture session reused across the scoring tests:
# round 1 {1,2} {3,4}; round 2 {1,2,3} {4}; round 3 everything together
FOUR = [
    {1: "A", 2: "A", 3: "B", 4: "B"},
    {1: "A", 2: "A", 3: "A", 4: "B"},
    {1: "A", 2: "A", 3: "A", 4: "A"},
]


class TestSessionPoints:
    def test_round1_pair_scores_three(self):
        session = make_session("p1", FOUR)
        matrix = session_points(session)
        assert matrix[0, 1] == 3  # textures 1,2 together from round 1

    def test_round3_pair_scores_one(self):
        session = make_session("p1", FOUR)
        matrix = session_points(session)
        assert matrix[0, 3] == 1  # texture 4 only joins in round 3

    def test_matches_brute_force_enumeration(self):
        session = make_session("p1", FOUR)
        matrix = session_points(session)
        expected = brute_force_points(FOUR)
        ids = sorted(FOUR[0])
        for (a, b), score in expected.items():
            i, j = ids.index(a), ids.index(b)
            assert matrix[i, j] == score
            assert matrix[j, i] == score

    def test_diagonal_zero_and_symmetry(self):
        session = make_session("p1", FOUR)
        matrix = session_points(session)
        assert np.all(np.diag(matrix) == 0)
        assert np.array_equal(matrix, matrix.T)

    def test_values_bounded(self):
        session = make_session("p1", FOUR)
        matrix = session_points(session)
        off = matrix[~np.eye(len(matrix), dtype=bool)]
        assert set(np.unique(off)) <= {0, 1, 2, 3}

    def test_round1_only_groups_give_zero_after_split(self):
        # pair together in round 1, apart by round 2: non-monotone sessions
        # still score by the earliest co-grouping
        assignments = [
            {1: "A", 2: "A", 3: "B", 4: "B"},
            {1: "A", 2: "B", 3: "B", 4: "B"},
        ]
        session = make_session("p1", assignments)
        matrix = session_points(session)
        assert matrix[0, 1] == 3  # earliest round wins even after the split

    def test_nested_session_thresholds_are_partitions(self):
        # for nested merges, points >= t means co-grouped in round 4 - t,
        # so each threshold level must be transitive like the partition it is
        session = simulate_participant(tiny_set(), group_counts=(4, 3, 2), seed=9)
        matrix = session_points(session)
        n = len(matrix)
        for threshold in (1, 2, 3):
            together = matrix >= threshold
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        if i != j and j != k and i != k:
                            if together[i, j] and together[j, k]:
                                assert together[i, k]

    def test_two_round_session_scores(self):
        assignments = [
            {1: "A", 2: "B", 3: "B"},
            {1: "A", 2: "A", 3: "A"},
        ]
        session = make_session("p1", assignments)
        matrix = session_points(session)
        assert matrix[0, 1] == 2  # co-grouped first in round 2
        assert matrix[1, 2] == 3


class TestValidation:
    def test_missing_texture_listed_in_error(self):
        session = make_session("p1", [{1: "A", 2: "A"}])
        with pytest.raises(ValueError, match="2 or 3 rounds"):
            validate_session(session)

    def test_totality_against_reference_ids(self):
        assignments = [{1: "A", 2: "A"}, {1: "A", 2: "A"}]
        session = make_session("p1", assignments)
        with pytest.raises(ValueError, match="3"):
            validate_session(session, texture_ids=[1, 2, 3])

    def test_rounds_must_cover_same_textures(self):
        assignments = [{1: "A", 2: "A"}, {1: "A"}]
        session = make_session("p1", assignments)
        with pytest.raises(ValueError):
            validate_session(session)

    def test_group_count_must_not_increase(self):
        assignments = [
            {1: "A", 2: "A", 3: "B"},
            {1: "A", 2: "B", 3: "C"},
        ]
        session = make_session("p1", assignments)
        with pytest.raises(ValueError, match="group count"):
            validate_session(session)

    def test_round_indices_must_be_sequential(self):
        rounds = (
            RoundRecord(round_index=1, assignment={1: "A", 2: "A"}, group_names={}),
            RoundRecord(round_index=3, assignment={1: "A", 2: "A"}, group_names={}),
        )
        session = GroupingSession(participant_id="p", rounds=rounds)
        with pytest.raises(ValueError, match="round"):
            validate_session(session)

    def test_valid_session_passes(self):
        session = make_session("p1", FOUR)
        validate_session(session)
        validate_session(session, texture_ids=[1, 2, 3, 4])

    def test_empty_assignment_rejected(self):
        with pytest.raises(ValueError):
            RoundRecord(round_index=1, assignment={}, group_names={})


class TestAggregate:
    def test_seventeen_identical_sessions_hit_max(self):
        sessions = [make_session(f"p{i}", FOUR) for i in range(17)]
        similarity = aggregate(sessions)
        assert similarity.participants == 17
        assert similarity.max_count == 51  # 3 points x 17 participants
        assert similarity.counts[0, 1] == 51

    def test_sum_over_two_sessions(self):
        other = [
            {1: "A", 2: "B", 3: "B", 4: "A"},
            {1: "A", 2: "B", 3: "B", 4: "A"},
            {1: "A", 2: "A", 3: "A", 4: "A"},
        ]
        sessions = [make_session("p1", FOUR), make_session("p2", other)]
        similarity = aggregate(sessions)
        # pair (1,2): 3 from the first session, 1 from the second
        assert similarity.counts[0, 1] == 4
        # pair (1,4): 1 + 3
        assert similarity.counts[0, 3] == 4

    def test_permutation_equivariance(self):
        sessions = [make_session("p1", FOUR)]
        base = aggregate(sessions).counts
        # relabel textures 1..4 -> 11..14 reversed; sorted ids give the
        # reverse permutation of the original matrix
        relabel = {1: 14, 2: 13, 3: 12, 4: 11}
        remapped = [
            {relabel[t]: g for t, g in assignment.items()} for assignment in FOUR
        ]
        flipped = aggregate([make_session("p1", remapped)]).counts
        perm = [3, 2, 1, 0]
        assert np.array_equal(flipped, base[np.ix_(perm, perm)])

    def test_mismatched_texture_sets_rejected(self):
        a = make_session("p1", FOUR)
        b = make_session(
            "p2",
            [
                {1: "A", 2: "A", 5: "B"},
                {1: "A", 2: "A", 5: "A"},
            ],
        )
        with pytest.raises(ValueError, match="texture"):
            aggregate([a, b])

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            aggregate([])


class TestDissimilarity:
    def test_linear_flip_of_counts(self):
        sessions = [make_session(f"p{i}", FOUR) for i in range(3)]
        similarity = aggregate(sessions)
        diss = to_dissimilarity(similarity)
        assert diss.values[0, 1] == similarity.max_count - similarity.counts[0, 1]
        assert np.all(np.diag(diss.values) == 0)
        assert np.array_equal(diss.values, diss.values.T)

    def test_never_grouped_pair_is_farthest(self):
        assignments = [
            {1: "A", 2: "A", 3: "B", 4: "B"},
            {1: "A", 2: "A", 3: "B", 4: "B"},
            {1: "A", 2: "A", 3: "B", 4: "B"},
        ]
        similarity = aggregate([make_session("p1", assignments)])
        diss = to_dissimilarity(similarity)
        assert diss.values[0, 2] == 3  # never together: the full 3 points
        assert diss.values[0, 1] == 0  # always together from round 1


def tiny_set():
    entries = []
    tid = 1
    for f0 in (150.0, 450.0):
        for a in (0.3, 1.0):
            for r in (0.067, 1.67):
                entries.append((tid, TextureParams(f0, a, r)))
                tid += 1
    return TextureSet(entries=tuple(entries), base_seed=100)


class TestSimulator:
    def test_deterministic_for_seed(self, default_set):
        a = simulate_participant(default_set, seed=5)
        b = simulate_participant(default_set, seed=5)
        assert session_to_dict(a) == session_to_dict(b)

    def test_different_seeds_differ(self, default_set):
        a = simulate_participant(default_set, seed=1)
        b = simulate_participant(default_set, seed=2)
        assert session_to_dict(a) != session_to_dict(b)

    def test_sessions_are_valid(self, default_set):
        session = simulate_participant(default_set, seed=3)
        validate_session(session, texture_ids=default_set.texture_ids())
        assert len(session.rounds) == 3

    def test_noiseless_frequency_listener_partitions_by_f0(self, default_set):
        # weight only the frequency axis: the round with 3 groups must
        # split exactly along the three center frequencies
        session = simulate_participant(
            default_set, weights=(1.0, 0.0, 0.0), noise_sd=0.0,
            group_counts=(3, 3, 2), seed=0,
        )
        assignment = session.rounds[0].assignment
        by_group = {}
        for tid, gid in assignment.items():
            by_group.setdefault(gid, set()).add(default_set.params_for(tid).f0_hz)
        freqs_seen = [frozenset(v) for v in by_group.values()]
        assert sorted(len(v) for v in freqs_seen) == [1, 1, 1]
        assert set().union(*freqs_seen) == {150.0, 260.0, 450.0}

    def test_rounds_are_nested_merges(self):
        session = simulate_participant(tiny_set(), group_counts=(4, 3, 2), seed=9)
        validate_session(session)
        matrix = session_points(session)
        # nested merges: any pair together in round r stays together after
        for r1, r2 in ((0, 1), (1, 2)):
            g1 = session.rounds[r1].assignment
            g2 = session.rounds[r2].assignment
            for a in g1:
                for b in g1:
                    if a < b and g1[a] == g1[b]:
                        assert g2[a] == g2[b]
        assert matrix.max() == 3

    def test_group_counts_respected(self, default_set):
        session = simulate_participant(default_set, group_counts=(8, 4, 2), seed=1)
        for record, expected in zip(session.rounds, (8, 4, 2)):
            assert len(record.groups()) == expected

    def test_names_present_for_later_rounds(self, default_set):
        session = simulate_participant(default_set, seed=2)
        assert session.rounds[0].group_names == {}
        for record in session.rounds[1:]:
            assert set(record.group_names) == set(record.groups())

    def test_seventeen_participant_aggregate(self, default_set):
        sessions = [simulate_participant(default_set, seed=s) for s in range(17)]
        similarity = aggregate(sessions)
        assert similarity.counts.max() <= similarity.max_count == 51
        assert np.array_equal(similarity.counts, similarity.counts.T)
        diss = to_dissimilarity(similarity)
        assert diss.values.min() >= 0

    def test_infeasible_group_counts_rejected(self):
        with pytest.raises(ValueError):
            simulate_participant(tiny_set(), group_counts=(9, 4, 2))
        with pytest.raises(ValueError):
            simulate_participant(tiny_set(), group_counts=(4, 5, 2))
        with pytest.raises(ValueError):
            simulate_participant(tiny_set(), group_counts=(4, 3, 1))


class TestJsonRoundTrip:
    def test_round_trip_preserves_session(self):
        names = {2: {"A": "smooth", "B": "rough"}, 3: {"A": "everything"}}
        session = make_session("p7", FOUR, names=names)
        restored = session_from_dict(session_to_dict(session))
        assert restored == session

    def test_dict_shape(self):
        session = make_session("p7", FOUR)
        payload = session_to_dict(session)
        assert payload["participant_id"] == "p7"
        assert [r["round"] for r in payload["rounds"]] == [1, 2, 3]
        assert payload["rounds"][0]["groups"]["A"] == [1, 2]

    def test_duplicate_membership_rejected(self):
        payload = {
            "participant_id": "p1",
            "rounds": [
                {"round": 1, "groups": {"A": [1, 2], "B": [2, 3]}, "names": {}},
                {"round": 2, "groups": {"A": [1, 2, 3]}, "names": {}},
            ],
        }
        with pytest.raises(ValueError, match="2"):
            session_from_dict(payload)

    def test_rounds_sorted_by_index(self):
        payload = {
            "participant_id": "p1",
            "rounds": [
                {"round": 2, "groups": {"A": [1, 2]}, "names": {}},
                {"round": 1, "groups": {"A": [1], "B": [2]}, "names": {}},
            ],
        }
        session = session_from_dict(payload)
        assert [r.round_index for r in session.rounds] == [1, 2]


class TestMatrixTypes:
    def test_similarity_shape_checks(self):
        with pytest.raises(ValueError):
            SimilarityMatrix(ids=(1, 2), counts=np.zeros((3, 3)), participants=1)

    def test_dissimilarity_shape_checks(self):
        with pytest.raises(ValueError):
            DissimilarityMatrix(ids=(1, 2, 3), values=np.zeros((2, 2)))

    def test_max_points_constant(self):
        assert MAX_POINTS_PER_PAIR == 3
