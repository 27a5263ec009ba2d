"""Robust composite indicators over criteria hierarchies.

Aggregation uses the Choquet integral with respect to a 2-additive
capacity, elicited from linear preference statements and explored by
uniform sampling of all compatible capacities; rankings are reported as
rank acceptability and pairwise winning frequencies at any node of the
hierarchy.
"""

__version__ = "0.1.0"

from .capacity import (
    ConstraintSet,
    MobiusVector,
    base_constraints,
    capacity_of,
    choquet,
    interaction,
    mobius_dim,
    monotonicity_slack,
    shapley,
    subset_labels,
)
from .dataset import NormalizedTable, PerformanceTable, column_stats, load_table, normalize
from .hierarchy import CriterionId, Hierarchy, Node, build_hierarchy, load_hierarchy
from .lp import LpSolution, chebyshev_center, diagnose, solve_epsilon_max
from .preferences import PreferenceProfile, PreferenceStatement, parse_profile
from .preferences import compile as compile_preferences
from .sampler import SampleSet, SamplerOptions, sample
from .smaa import (
    RankMatrix,
    RankSummary,
    WinMatrix,
    pairwise_winning,
    rank_acceptability,
    rank_of,
    summarize,
)

__all__ = [
    "CriterionId",
    "Node",
    "Hierarchy",
    "build_hierarchy",
    "load_hierarchy",
    "PerformanceTable",
    "NormalizedTable",
    "load_table",
    "column_stats",
    "normalize",
    "MobiusVector",
    "ConstraintSet",
    "mobius_dim",
    "base_constraints",
    "monotonicity_slack",
    "capacity_of",
    "choquet",
    "shapley",
    "interaction",
    "subset_labels",
    "PreferenceStatement",
    "PreferenceProfile",
    "parse_profile",
    "compile_preferences",
    "LpSolution",
    "solve_epsilon_max",
    "diagnose",
    "chebyshev_center",
    "SamplerOptions",
    "SampleSet",
    "sample",
    "RankMatrix",
    "WinMatrix",
    "RankSummary",
    "rank_of",
    "rank_acceptability",
    "pairwise_winning",
    "summarize",
    "__version__",
]
