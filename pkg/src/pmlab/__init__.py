"""Prepare-and-measure polarization toolkit.

Exact qubit joint probabilities, classical-ensemble bound checking and
feasibility fitting, witness-landscape scanning and minimization, and a
seeded virtual photon-counting bench.
"""

from .bench import (
    ConfigError,
    CountRecord,
    EstimatedProbability,
    ExperimentConfig,
    FullScanResult,
    InsufficientStatisticsError,
    SEstimate,
    Setting,
    accidental_estimate,
    estimate_S,
    estimate_joint,
    run_full_scan,
    simulate_setting,
)
from .classical import (
    ALL_STATES,
    ClassicalEnsemble,
    GeneralizedState,
    JointTriple,
    Property,
    atom_joint,
    classical_bound_holds,
    ensemble_joint,
    enumerate_vertices,
    fit_classical,
    joint_triple,
    random_ensemble,
    s_classical,
)
from .landscape import (
    AngleTriple,
    Optimum,
    ScanGrid,
    SLandscape,
    export_surface,
    grid_scan,
    minimize_s,
    parse_surface,
    s_quantum,
)
from .qubit import (
    H,
    V,
    Angle,
    Outcome,
    PropertySetting,
    PureState,
    canonical_degrees,
    conditional_probability,
    eigenstate,
    joint_probability,
    marginal_probability,
    transition_probability,
)

__all__ = [
    "ALL_STATES",
    "Angle",
    "AngleTriple",
    "ClassicalEnsemble",
    "ConfigError",
    "CountRecord",
    "EstimatedProbability",
    "ExperimentConfig",
    "FullScanResult",
    "GeneralizedState",
    "H",
    "InsufficientStatisticsError",
    "JointTriple",
    "Optimum",
    "Outcome",
    "Property",
    "PropertySetting",
    "PureState",
    "ScanGrid",
    "SEstimate",
    "SLandscape",
    "Setting",
    "V",
    "accidental_estimate",
    "atom_joint",
    "canonical_degrees",
    "classical_bound_holds",
    "conditional_probability",
    "eigenstate",
    "ensemble_joint",
    "enumerate_vertices",
    "estimate_S",
    "estimate_joint",
    "export_surface",
    "fit_classical",
    "grid_scan",
    "joint_probability",
    "joint_triple",
    "marginal_probability",
    "minimize_s",
    "parse_surface",
    "random_ensemble",
    "run_full_scan",
    "s_classical",
    "s_quantum",
    "simulate_setting",
    "transition_probability",
]

__version__ = "0.1.0"
