"""Resource model for remote blind qubit preparation with decoy states.

Compares a weak coherent pulse source with a heralded single photon source
read out by a time-multiplexed detector, and ships a small state-vector
simulator of the interlaced 1-D cluster computation used to check the
phase reconstruction rule.
"""

from .channel import (
    ChannelParams,
    ErrorModel,
    GainMode,
    dark_count_floor,
    error_rate_hsps,
    gain,
    gain_decoys,
    gain_hsps,
    gain_wcp,
    transmittance,
    yield_n,
)
from .decoy import (
    BoundsResult,
    DecoyProtocol,
    estimate_bounds,
    hsps_p1_lower,
    hsps_y0_lower,
    hsps_y1_lower,
    validate_protocol,
    wcp_p1_lower,
    wcp_y0_lower,
    wcp_y1_lower,
)
from .errors import (
    BranchError,
    DegenerateProtocolError,
    DomainError,
    RBSPError,
    UndefinedRateError,
    VariantError,
)
from .i1dc import Phase, fidelity, i1dc_run, i1dc_step, prepare_plus, theta_from_outcomes, verify_i1dc
from .planner import (
    MuGrid,
    PlanResult,
    SweepRow,
    efficiency,
    group_fail_prob,
    group_size,
    group_size_min,
    n_for_epsilon,
    optimize_mu,
    original_rbsp_bound,
    overall_fail_bound,
    plan,
    plateau_onset,
    pulse_count_min,
    sweep_distance,
    sweep_mu,
)
from .sources import (
    HeraldingDetector,
    HSPSSource,
    WCPSource,
    heralded_pnd,
    heralded_single_mean,
    poisson_pmf,
    poisson_pmf_array,
    thermal_pmf,
    thermal_pmf_array,
    tmd_response,
)

__version__ = "0.1.0"
