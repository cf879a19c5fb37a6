"""Relating engineering parameters to an embedded perceptual space.

Each parameter (center frequency, amplitude, irregularity) becomes a vector
in the embedding: p = sum(q_i * x_i) / sum(q_i^2) over textures i, where q_i
is the (transformed) parameter value and x_i the embedded coordinates. The
vector points along the direction of greatest change of that parameter, and
its length reflects how much of the layout the parameter explains. Angles
between vectors, correlation tables, and group-label placements follow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grouping import GroupingSession
from .mds import MdsSolution
from .synthesis import TextureSet

TRANSFORMS = ("raw", "log", "zscore", "log-zscore")
DEFAULT_TRANSFORM = "log-zscore"


@dataclass(frozen=True)
class ParameterColumn:
    """One value per texture, in solution row order, with its transform tag."""

    name: str
    values: np.ndarray
    transform: str = "raw"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or len(values) == 0:
            raise ValueError("values must be a nonempty 1-d array")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"column {self.name!r} has non-finite values")
        if self.transform not in TRANSFORMS:
            raise ValueError(f"unknown transform {self.transform!r}")
        object.__setattr__(self, "values", values)
        values.setflags(write=False)

    @classmethod
    def from_raw(cls, name, raw_values, transform: str = DEFAULT_TRANSFORM):
        return cls(
            name=name,
            values=_apply_transform(name, raw_values, transform),
            transform=transform,
        )

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class ParameterVector:
    name: str
    components: np.ndarray

    def __post_init__(self):
        components = np.asarray(self.components, dtype=float)
        object.__setattr__(self, "components", components)
        components.setflags(write=False)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


@dataclass(frozen=True)
class LabelPlacement:
    """A participant's group name at the mean position of its members."""

    label: str
    position: np.ndarray
    participant_id: str
    round_index: int
    member_ids: tuple

    def __post_init__(self):
        position = np.asarray(self.position, dtype=float)
        object.__setattr__(self, "position", position)
        position.setflags(write=False)


@dataclass(frozen=True)
class CorrelationTable:
    """Pearson r per (parameter, dimension), with Table-style bold flags."""

    parameters: tuple
    r: np.ndarray
    strongest: np.ndarray  # boolean, True where |r| is the column max

    def __post_init__(self):
        self.r.setflags(write=False)
        self.strongest.setflags(write=False)

    def strongest_parameter(self, dim: int) -> str:
        column = np.flatnonzero(self.strongest[:, dim])
        return self.parameters[column[0]]


def _apply_transform(name, raw_values, transform) -> np.ndarray:
    values = np.asarray(raw_values, dtype=float)
    if transform not in TRANSFORMS:
        raise ValueError(f"unknown transform {transform!r}")
    if transform in ("log", "log-zscore"):
        if np.any(values <= 0):
            raise ValueError(f"column {name!r} must be positive for a log transform")
        values = np.log(values)
    if transform in ("zscore", "log-zscore"):
        sd = values.std()
        if sd == 0:
            raise ValueError(f"column {name!r} has zero variance, cannot z-score")
        values = (values - values.mean()) / sd
    return values


def catalog_columns(texture_set: TextureSet, transform: str = DEFAULT_TRANSFORM):
    """The three stimulus parameters as columns, in sorted texture-id order."""
    ids = texture_set.texture_ids()
    params = [texture_set.params_for(tid) for tid in ids]
    return (
        ParameterColumn.from_raw(
            "frequency", [p.f0_hz for p in params], transform
        ),
        ParameterColumn.from_raw(
            "amplitude", [p.amplitude for p in params], transform
        ),
        ParameterColumn.from_raw(
            "irregularity", [p.irregularity for p in params], transform
        ),
    )


def parameter_vector(
    column: ParameterColumn, solution: MdsSolution
) -> ParameterVector:
    """Project a parameter into the embedding: sum(q_i x_i) / sum(q_i^2)."""
    if len(column) != solution.n:
        raise ValueError(
            f"column has {len(column)} values for {solution.n} embedded points"
        )
    q = column.values
    denom = float(np.sum(q**2))
    if denom == 0:
        raise ValueError(f"column {column.name!r} is all zero")
    components = q @ solution.coordinates / denom
    return ParameterVector(name=column.name, components=components)


def vector_angle(a: ParameterVector, b: ParameterVector) -> float:
    """Angle between two parameter vectors in degrees, within [0, 180]."""
    if a.norm == 0 or b.norm == 0:
        raise ValueError("angle undefined for a zero vector")
    cosine = float(np.dot(a.components, b.components) / (a.norm * b.norm))
    return float(np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0))))


def pairwise_angles(vectors) -> dict:
    """(name_a, name_b) -> degrees for every unordered pair, input order."""
    angles = {}
    for i, a in enumerate(vectors):
        for b in vectors[i + 1 :]:
            angles[(a.name, b.name)] = vector_angle(a, b)
    return angles


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    norm_a = float(np.sqrt(a @ a))
    norm_b = float(np.sqrt(b @ b))
    if norm_b == 0:
        # a degenerate (collapsed) dimension carries no association
        return 0.0
    return float(np.clip(a @ b / (norm_a * norm_b), -1.0, 1.0))


def dim_correlations(columns, solution: MdsSolution) -> CorrelationTable:
    """Pearson r of every parameter column against every dimension.

    The strongest |r| in each dimension is flagged, mirroring how such
    tables are usually set in bold.
    """
    if solution.n < 3:
        raise ValueError("need at least 3 points for a correlation table")
    columns = list(columns)
    if not columns:
        raise ValueError("no parameter columns given")
    for column in columns:
        if len(column) != solution.n:
            raise ValueError(
                f"column {column.name!r} has {len(column)} values "
                f"for {solution.n} points"
            )
        if column.values.std() == 0:
            raise ValueError(f"column {column.name!r} has zero variance")
    r = np.zeros((len(columns), solution.k))
    for i, column in enumerate(columns):
        for j in range(solution.k):
            r[i, j] = _pearson(column.values, solution.coordinates[:, j])
    strongest = np.zeros_like(r, dtype=bool)
    strongest[np.argmax(np.abs(r), axis=0), np.arange(r.shape[1])] = True
    return CorrelationTable(
        parameters=tuple(c.name for c in columns), r=r, strongest=strongest
    )


def label_positions(
    sessions: list[GroupingSession], round_index: int, solution: MdsSolution
):
    """Each named group of the given round at its members' mean position.

    Solution rows are assumed to follow sorted texture ids, the row order
    everything downstream of aggregation uses. Groups left unnamed are
    skipped; a name attached to a group with no members is an error.
    """
    placements = []
    for session in sessions:
        ids = session.texture_ids()
        if len(ids) != solution.n:
            raise ValueError(
                f"session {session.participant_id!r} covers {len(ids)} textures, "
                f"solution embeds {solution.n}"
            )
        row = {tid: i for i, tid in enumerate(ids)}
        record = next(
            (r for r in session.rounds if r.round_index == round_index), None
        )
        if record is None:
            raise ValueError(
                f"session {session.participant_id!r} has no round {round_index}"
            )
        groups = record.groups()
        for gid in sorted(record.group_names):
            label = record.group_names[gid]
            members = groups.get(gid, [])
            if not members:
                raise ValueError(
                    f"group {gid!r} named {label!r} has no members"
                )
            coords = solution.coordinates[[row[tid] for tid in members]]
            placements.append(
                LabelPlacement(
                    label=label,
                    position=coords.mean(axis=0),
                    participant_id=session.participant_id,
                    round_index=round_index,
                    member_ids=tuple(members),
                )
            )
    return placements
