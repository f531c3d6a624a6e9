"""Aerial reflecting-surface backhaul setup simulator."""

from .channel import (
    AntennaPattern,
    RisConfig,
    SourceConfig,
    array_response,
    beamforming_gain,
    build_channels,
    hpbw,
    noise_power,
    path_loss_ris_uav,
    path_loss_source_ris,
    received_snr_closed,
    received_snr_matrix,
    reference_path_loss,
)
from .geometry import Vec2, Vec3, sin_aoa_source, sin_aod_deviation, sin_aod_ris
from .partition import (
    PartitionPlan,
    align_point_full,
    bound_coefficients,
    divide_sets,
    partition_sizes,
    round_sizes,
    search_L,
    structure_decision,
    subarray_align_points,
)
from .placement import (
    ConvergenceError,
    CubicGeometry,
    WeiszfeldProblem,
    aggregate_q,
    per_uav_point,
    weiszfeld,
    xi_solve,
)
from .power import FronthaulDemand, PowerSolution, assign_powers, throughput
from .precoding import PhaseProfile, mrt_vector, phase_profile
from .scenario import (
    RisSetup,
    Scenario,
    ScenarioConfig,
    SweepSpec,
    UavBs,
    antenna_gain,
    exhaustive_oracle,
    generate_scenario,
    monte_carlo,
    run_benchmark,
    run_proposed,
)

__version__ = "0.1.0"
