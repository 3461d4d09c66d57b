"""Max-min throughput optimization for a two-user wireless powered network
with backscatter-assisted relaying.

A hybrid access point powers two devices over the air; the near device can
relay the far device's data, receiving it either passively (backscatter
during energy transfer) or actively.  The library computes the throughput-
fair time and power allocation, verifies it against a brute-force grid
oracle, and simulates the backscatter detector at bit level.
"""
from ._backend import backend_name
from .link import backscatter_ber, backscatter_rate, bsc_capacity, erfc
from .mcsim import BerCurvePoint, DetectorRun, ber_curve, simulate_ber
from .model import (
    ChannelGains,
    EnergySplit,
    Geometry,
    PowerAllocation,
    SystemParams,
    TimeAllocation,
    active_power_p3,
    channel_gain,
    gains_from_geometry,
    harvest_phase1,
    harvest_phase2,
)
from .oracle import CrossValidationReport, cross_validate, grid_solve
from .rates import (
    ConstantsRho,
    FeasibilityError,
    FeasibilityReport,
    RateReport,
    Scheme,
    evaluate,
    evaluate_physical,
    feasible,
)
from .solver import (
    Solution,
    SolverOptions,
    objective_upper_bound,
    recover_powers,
    solve,
    solve_all_schemes,
)

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "erfc",
    "backscatter_ber",
    "bsc_capacity",
    "backscatter_rate",
    "SystemParams",
    "Geometry",
    "ChannelGains",
    "TimeAllocation",
    "EnergySplit",
    "PowerAllocation",
    "channel_gain",
    "gains_from_geometry",
    "harvest_phase1",
    "harvest_phase2",
    "active_power_p3",
    "Scheme",
    "ConstantsRho",
    "RateReport",
    "FeasibilityReport",
    "FeasibilityError",
    "feasible",
    "evaluate",
    "evaluate_physical",
    "SolverOptions",
    "Solution",
    "objective_upper_bound",
    "solve",
    "recover_powers",
    "solve_all_schemes",
    "grid_solve",
    "cross_validate",
    "CrossValidationReport",
    "DetectorRun",
    "BerCurvePoint",
    "simulate_ber",
    "ber_curve",
    "__version__",
]
