"""Oscillation dynamics on directed networks.

Laplacian construction and symmetrizable decomposition, wave-equation mode
solutions and numeric integration, oscillation-energy node centrality,
critical-perturbation detection, and the spectral-analysis pipeline for
low-frequency-mode dominance in activity time series.
"""

from .dynamics import (
    EnergyReport,
    InitialCondition,
    ModalSolution,
    SweepRecord,
    Trajectory,
    betweenness_weights,
    epsilon_sweep,
    evaluate_state,
    evaluate_states,
    fit_growth_rate,
    integrate_numeric,
    modal_solve,
    node_energies,
    oscillation_centrality,
    state_amplitude_bound,
    total_energy_series,
)
from .graph import (
    GershgorinDisk,
    LaplacianMatrix,
    NotSymmetrizable,
    OneWaySplit,
    SymmetrizableDecomposition,
    WeightedDigraph,
    canonical_split,
    check_symmetrizable,
    compose_epsilon,
    gershgorin_disk,
    graph_from_edge_csv,
    graph_from_json,
    laplacian_of,
    left_null_vector,
    scaled_laplacian,
    undirected_graph,
)
from .ingest import (
    EventLog,
    TrendSegment,
    bin_counts,
    fuse_trends,
    load_event_log,
    load_trend_csv,
    slice_period,
)
from .signal import (
    BeatDemo,
    Spectrum,
    TimeSeries,
    analyze_period,
    beat_demo,
    dft_spectrum,
    estimate_beat_frequency,
    low_freq_share,
    normalize_spectrum,
    smooth_series,
    smooth_spectrum,
    square_series,
)
from .spectral import (
    EigenFrequencies,
    EigenSystem,
    critical_epsilon,
    eigen_gap,
    eigendecompose,
    mode_frequencies,
    spectrum_is_real,
)

__version__ = "0.1.0"
