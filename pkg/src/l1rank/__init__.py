"""Column-sum low-rank approximation of binary matrices over GF(2).

The matrix problems are encoded as constrained k-center instances over
binary vectors and solved by a randomized pipeline; small instances can be
checked against exhaustive oracles.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BudgetError,
    ContractViolation,
    DimensionError,
    EncodingError,
    InfeasibleInstanceError,
    L1RankError,
    ParameterError,
    ParseError,
)
from .gf2core import (  # noqa: E402
    BitMatrix,
    BitVec,
    PositionSet,
    column_sum_norm,
    gf2_rank,
    hamming,
    parse_matrix,
    read_matrix,
)
from .model import (  # noqa: E402
    CenterTuple,
    KCenterInstance,
    PartitionInstance,
    PartitionStarInstance,
    Relation,
    cost_kcenter,
    cost_partition,
    cost_partition_star,
    satisfies,
)
from .pipeline import (  # noqa: E402
    solve_boolean_rank,
    solve_closest_string,
    solve_kcenter,
    solve_projective,
    solve_rank,
)
from .partition_solver import solve_partition  # noqa: E402
from .lp_round import solve_star  # noqa: E402
from .report import Budgets, SolveReport  # noqa: E402

__all__ = [
    "BitMatrix", "BitVec", "BudgetError", "Budgets", "CenterTuple", "ContractViolation",
    "DimensionError", "EncodingError", "InfeasibleInstanceError", "KCenterInstance", "L1RankError",
    "ParameterError", "ParseError", "PartitionInstance", "PartitionStarInstance", "PositionSet",
    "Relation", "SolveReport", "column_sum_norm", "cost_kcenter", "cost_partition",
    "cost_partition_star", "gf2_rank", "hamming", "parse_matrix", "read_matrix", "satisfies", "solve_boolean_rank",
    "solve_closest_string", "solve_kcenter", "solve_partition", "solve_projective", "solve_rank",
    "solve_star",
]
