"""Learn a sparse connected graph from few observations.

The solver greedily weakens edges of a starting graph to minimize a
smoothness + log-determinant + algebraic-connectivity + sparsity
objective, either by a full scan or by a recursive spectral-cut search
over partitioned edge sets.
"""

from .bench import BenchReport, initial_graph, relative_error, run_benchmark
from .datagen import GroundTruth, gen_ground_truth, sample_gmm, sample_mvt
from .errors import (
    ConvergenceFailure,
    Disconnected,
    FsglError,
    InsufficientEigenpairs,
    InvalidBudget,
    InvalidDof,
    MissingEdge,
    StepTooLarge,
    TooLarge,
    ZeroReference,
)
from .graph import (
    LaplacianView,
    ObservationSet,
    WeightedGraph,
    build_laplacian,
    complete_graph,
    gram,
    is_connected,
    weaken_edge,
)
from .init_graph import init_sparse_graph, max_similarity_tree
from .io import load_graph, load_observations, save_graph, save_observations
from .objective import (
    EdgeDelta,
    edge_gradient,
    fiedler_delta,
    logdet_delta,
    objective_value,
    sparsity_delta,
    trace_delta,
)
from .partition import (
    CheegerCut,
    approx_cheeger_cut,
    brute_force_cheeger,
    partition_select,
)
from .solver import SolverConfig, SolveTrace, greedy_step, run_greedy, run_solver
from .spectral import (
    SpectralState,
    eigen_gap2,
    majorizer_quadform,
    smallest_eigenpairs,
)

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "CheegerCut",
    "ConvergenceFailure",
    "Disconnected",
    "EdgeDelta",
    "FsglError",
    "GroundTruth",
    "InsufficientEigenpairs",
    "InvalidBudget",
    "InvalidDof",
    "LaplacianView",
    "MissingEdge",
    "ObservationSet",
    "SolveTrace",
    "SolverConfig",
    "SpectralState",
    "StepTooLarge",
    "TooLarge",
    "WeightedGraph",
    "ZeroReference",
    "approx_cheeger_cut",
    "brute_force_cheeger",
    "build_laplacian",
    "complete_graph",
    "edge_gradient",
    "eigen_gap2",
    "fiedler_delta",
    "gen_ground_truth",
    "gram",
    "greedy_step",
    "init_sparse_graph",
    "initial_graph",
    "is_connected",
    "load_graph",
    "load_observations",
    "logdet_delta",
    "majorizer_quadform",
    "max_similarity_tree",
    "objective_value",
    "partition_select",
    "relative_error",
    "run_benchmark",
    "run_greedy",
    "run_solver",
    "sample_gmm",
    "sample_mvt",
    "save_graph",
    "save_observations",
    "smallest_eigenpairs",
    "sparsity_delta",
    "trace_delta",
    "weaken_edge",
]
