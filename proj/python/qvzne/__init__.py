"""Quantum Volume benchmarking with zero-noise extrapolation."""

from ._core import (  # noqa: F401
    BenchmarkReport,
    Circuit,
    CouplingGraph,
    DensityState,
    FoldPlan,
    FoldedCircuit,
    Gate,
    GateKind,
    HeavySet,
    NoiseModel,
    QvCircuit,
    RoutedCircuit,
    SubgraphClass,
    ZneEstimate,
    bootstrap_sigma,
    calibrate_p2,
    combine_local_ensemble,
    compose_unitary,
    decompose_su4,
    enumerate_subgraph_classes,
    evaluate_pass,
    exact_heavy_prob,
    extrapolate,
    fold_count,
    fold_global,
    fold_local_ensemble,
    fold_local_random,
    gate_counts,
    generate_qv_circuit,
    haar_random_su4,
    heavy_mass,
    heavy_set,
    hop_from_counts,
    ideal_distribution,
    ideal_distribution_of,
    rebase_only,
    route,
    run_experiment,
    sample_counts,
    simulate,
)

__version__ = "0.1.0"
