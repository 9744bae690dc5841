"""Grid-cell arena simulator with a vibration/color avoidance circuit.

The package splits into five layers: ``spatialcells`` (lattice geometry and
firing), ``arena`` (walks and sensors), ``learning`` (the one-synapse rule),
``controller`` (closed-loop episodes), and ``analysis`` (rate maps, spatial
autocorrelograms, gridness).  ``cli`` ties them together behind the
``mazecells`` command.
"""

from .analysis import (
    AnalysisError,
    Autocorrelogram,
    RateMap,
    connected_components,
    coverage,
    gridness,
    halfmax_area_bins,
    largest_component_fraction,
    nearest_peak_angles,
    peak_to_mean,
    rate_map,
    spatial_autocorrelogram,
)
from .arena import (
    Arena,
    CameraParams,
    Pose,
    SensorSample,
    WalkParams,
    WallArc,
    ZoneDisc,
    color_sample,
    random_walk_step,
    vibration_magnitude,
    vibration_sample,
    walk_trajectory,
)
from .config import (
    RunConfig,
    apply_sweep_point,
    build_ini,
    config_hash,
    default_ini,
    default_sections,
    episode_config,
    load_config,
    parse_config,
    sweep_points,
)
from .controller import EpisodeConfig, EpisodeLog, avoidance_maneuver, run_episode
from .learning import CircuitParams, SynapseState, TickIO, motion_output, oja_update
from .spatialcells import (
    ConfigurationError,
    FiringParams,
    FrameTransform,
    GridCellParams,
    LandmarkObservation,
    LandmarkParams,
    PlaceCellParams,
    Position2,
    anchored_ensemble,
    change_frame,
    change_frame_inverse,
    firing_rate,
    grid_frame_coords,
    landmark_response,
    lattice_basis,
    lattice_nodes,
    nearest_center,
    nearest_center_bruteforce,
    normalized_rate,
    phase_offset,
    place_activity,
    place_activity_at,
    rates_at,
    raw_firing,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "Arena",
    "Autocorrelogram",
    "CameraParams",
    "CircuitParams",
    "ConfigurationError",
    "EpisodeConfig",
    "EpisodeLog",
    "FiringParams",
    "FrameTransform",
    "GridCellParams",
    "LandmarkObservation",
    "LandmarkParams",
    "PlaceCellParams",
    "Pose",
    "Position2",
    "RateMap",
    "RunConfig",
    "SensorSample",
    "SynapseState",
    "TickIO",
    "WalkParams",
    "WallArc",
    "ZoneDisc",
    "anchored_ensemble",
    "apply_sweep_point",
    "avoidance_maneuver",
    "build_ini",
    "change_frame",
    "change_frame_inverse",
    "color_sample",
    "config_hash",
    "connected_components",
    "coverage",
    "default_ini",
    "default_sections",
    "episode_config",
    "firing_rate",
    "grid_frame_coords",
    "gridness",
    "halfmax_area_bins",
    "landmark_response",
    "largest_component_fraction",
    "lattice_basis",
    "lattice_nodes",
    "load_config",
    "motion_output",
    "nearest_center",
    "nearest_center_bruteforce",
    "nearest_peak_angles",
    "normalized_rate",
    "oja_update",
    "parse_config",
    "peak_to_mean",
    "phase_offset",
    "place_activity",
    "place_activity_at",
    "random_walk_step",
    "rate_map",
    "rates_at",
    "raw_firing",
    "run_episode",
    "spatial_autocorrelogram",
    "sweep_points",
    "vibration_magnitude",
    "vibration_sample",
    "walk_trajectory",
]
