"""Analytical reception-probability benchmarks for LTE-V2V beaconing.

The package computes the packet reception probability of two reference
resource-allocation schemes (uniform random and maximum reuse distance)
analytically, and validates them with a Monte Carlo highway simulator
that also runs three allocation algorithms from practice.
"""

from .allocators import (
    BLOCKED,
    Allocation,
    CrrConfig,
    Mode4Config,
    Mode4State,
    allocate_crr,
    allocate_lgc,
    allocate_md,
    allocate_rr,
    mode4_init,
    mode4_step,
)
from .analysis import (
    MdParams,
    PrpCurve,
    StableParams,
    d09,
    d09_from_curve,
    gammainc_upper_reg,
    levy_cdf_rr,
    md_interference_cdf,
    nth_neighbor_ccdf,
    nth_neighbor_pdf,
    p_hd_md,
    p_hd_rr,
    prp,
    prp_curve,
    rr_stable_params,
    stable_cdf,
)
from .errors import ConfigurationError, ModelDomainError, NumericError, TraceFormatError
from .radio import DualSlope, RadioConfig, ShadowField, decode_ok, pr0, rx_power, sinr, thermal_noise_dbm
from .resources import CamConfig, ResourceGrid, freq_slot, grid_from_cam, same_subframe, time_slot
from .scenario import Scenario, ScenarioConfig, TraceFormat, empirical_density, generate_ppp, load_trace
from .simulator import (
    DEFAULT_ALGORITHMS,
    EmpiricalCdf,
    PrpStats,
    SimConfig,
    interference_oracle,
    make_allocator,
    run_drop,
    run_experiment,
)

__version__ = "0.1.0"
