"""Randomized affine dynamics over networks with ergodic time-averaging.

Three applications -- relative localization, PageRank and
Friedkin-Johnsen opinions -- share one skeleton: a well-behaved
synchronous iteration ``x <- P x + u`` and a gossip counterpart whose
random updates match the synchronous map *in expectation*.  The gossip
runs oscillate forever; their Cesaro time-averages converge to the
synchronous fixed point, and this package provides the solvers,
simulators, averagers and diagnostics to compute and verify all of it.
"""

from . import errors
from .affine import (
    AffineSystem,
    SyncTrajectory,
    fixed_point,
    iterate_sync,
    stability_verdict,
    substochastic_schur_check,
)
from .harness import (
    ScenarioConfig,
    emit_plot_data,
    load_graph,
    load_matrix_csv,
    load_vector_csv,
    parse_config_file,
    read_run_log,
    run_scenario,
    scenario_kernels,
    verify_expectation_cmd,
)
from .localization import (
    LocalizationGossipState,
    MeasurementSet,
    OrientedGraph,
    complete_graph,
    gossip_localization_step,
    grad_descent,
    gradient_system,
    graph_laplacian,
    incidence_matrix,
    localization_kernels,
    ls_oracle,
    path_graph,
    run_gossip_localization,
    synth_measurements,
)
from .numerics import (
    DEFAULT_POLICY,
    NumericPolicy,
    StabilityVerdict,
    laplacian_pseudo_solve,
    linear_solve,
    spectral_radius_estimate,
)
from .opinions import (
    GossipCoefficients,
    InfluenceNetwork,
    OpinionGossipState,
    build_network,
    fj_fixed_point,
    fj_sync_step,
    fj_system,
    gossip_coefficients,
    gossip_opinion_step,
    opinion_kernels,
    random_influence_network,
    run_gossip_opinions,
    stubborn_reachability_check,
)
from .pagerank import (
    PageRankGossipState,
    WebGraph,
    gossip_pagerank_step,
    link_matrix,
    pagerank_kernels,
    pagerank_system,
    power_method,
    r_from_m,
    random_web_graph,
    run_gossip_pagerank,
    three_cycle,
)
from .random_engine import (
    BackwardProcess,
    CesaroAverager,
    ExpectationReport,
    ForwardProcess,
    KernelDistribution,
    LyapunovEstimate,
    WeightedAverager,
    backward_ensemble,
    backward_path,
    ecdf_distance,
    expected_system,
    forward_ensemble,
    lyapunov_diagnostic,
    make_stream,
    run_ergodic,
    verify_expectation,
)
from .trajectory import TrajectoryLog

__version__ = "0.1.0"

__all__ = [
    "AffineSystem",
    "BackwardProcess",
    "CesaroAverager",
    "DEFAULT_POLICY",
    "ExpectationReport",
    "ForwardProcess",
    "GossipCoefficients",
    "InfluenceNetwork",
    "KernelDistribution",
    "LocalizationGossipState",
    "LyapunovEstimate",
    "MeasurementSet",
    "NumericPolicy",
    "OpinionGossipState",
    "OrientedGraph",
    "PageRankGossipState",
    "ScenarioConfig",
    "StabilityVerdict",
    "SyncTrajectory",
    "TrajectoryLog",
    "WebGraph",
    "WeightedAverager",
    "backward_ensemble",
    "backward_path",
    "build_network",
    "complete_graph",
    "ecdf_distance",
    "emit_plot_data",
    "errors",
    "expected_system",
    "fixed_point",
    "fj_fixed_point",
    "fj_sync_step",
    "fj_system",
    "forward_ensemble",
    "gossip_coefficients",
    "gossip_localization_step",
    "gossip_opinion_step",
    "gossip_pagerank_step",
    "grad_descent",
    "gradient_system",
    "graph_laplacian",
    "incidence_matrix",
    "iterate_sync",
    "laplacian_pseudo_solve",
    "linear_solve",
    "link_matrix",
    "load_graph",
    "load_matrix_csv",
    "load_vector_csv",
    "localization_kernels",
    "ls_oracle",
    "lyapunov_diagnostic",
    "make_stream",
    "opinion_kernels",
    "pagerank_kernels",
    "pagerank_system",
    "parse_config_file",
    "path_graph",
    "power_method",
    "r_from_m",
    "random_influence_network",
    "random_web_graph",
    "read_run_log",
    "run_ergodic",
    "run_gossip_localization",
    "run_gossip_opinions",
    "run_gossip_pagerank",
    "run_scenario",
    "scenario_kernels",
    "spectral_radius_estimate",
    "stability_verdict",
    "stubborn_reachability_check",
    "substochastic_schur_check",
    "synth_measurements",
    "three_cycle",
    "verify_expectation",
    "verify_expectation_cmd",
]
