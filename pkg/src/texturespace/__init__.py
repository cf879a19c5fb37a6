"""Fine-texture design space toolkit.

Synthesis of band-limited friction textures from a three-knob parameter
space, tooling for the three-round similarity grouping protocol, and the
analysis chain that embeds grouping data with nonmetric MDS and maps the
engineering parameters back into the perceptual space.
"""

from texturespace.grouping import (
    DissimilarityMatrix,
    GroupingSession,
    RoundRecord,
    SimilarityMatrix,
    aggregate,
    session_points,
    simulate_participant,
    to_dissimilarity,
)
from texturespace.mds import (
    MdsSolution,
    ScreeCurve,
    nonmetric_mds,
    procrustes_align,
    scree,
    stress1,
)
from texturespace.space import (
    CorrelationTable,
    LabelPlacement,
    ParameterColumn,
    ParameterVector,
    catalog_columns,
    dim_correlations,
    label_positions,
    pairwise_angles,
    parameter_vector,
    vector_angle,
)
from texturespace.synthesis import (
    TextureParams,
    TextureSignal,
    TextureSet,
    build_texture_set,
    synthesize_texture,
    to_current,
)

__all__ = [
    "CorrelationTable",
    "DissimilarityMatrix",
    "GroupingSession",
    "LabelPlacement",
    "MdsSolution",
    "ParameterColumn",
    "ParameterVector",
    "RoundRecord",
    "ScreeCurve",
    "SimilarityMatrix",
    "TextureParams",
    "TextureSignal",
    "TextureSet",
    "aggregate",
    "build_texture_set",
    "catalog_columns",
    "dim_correlations",
    "label_positions",
    "nonmetric_mds",
    "pairwise_angles",
    "parameter_vector",
    "procrustes_align",
    "scree",
    "session_points",
    "simulate_participant",
    "stress1",
    "synthesize_texture",
    "to_current",
    "to_dissimilarity",
    "vector_angle",
]

__version__ = "0.1.0"
