"""Belief-space coverage circuit planning for a UAV/UGV team."""

from ._core import (  # noqa: F401
    Attitude,
    BeliefState,
    Circuit,
    EnvironmentMap,
    Error,
    ErrorCategory,
    NoiseConfig,
    RoadmapGraph,
    RunConfig,
    altimeter_update,
    camera_update,
    connect_knn,
    eulerize,
    filter_by_flight_time,
    generate_candidates,
    initial_belief,
    lidar_update,
    load_config,
    load_map,
    parse_map,
    pec,
    plan,
    predict,
    random_euler_circuit,
    report,
    sample_nodes,
    simulate,
    uwb_update,
    validate_circuit,
)

__version__ = "0.1.0"
