"""SIR epidemic model, its exactly solvable relatives, and their analytics."""

from .analysis import (
    FinalSizeMethod,
    FinalSizeReport,
    PeakReport,
    fastest_new_infections,
    final_size,
    final_size_sweep,
    i_rate_extrema,
    peak_values,
    r_star_extremum_check,
    tau_of_s,
)
from .closed_forms import (
    LogisticSolution,
    ModifiedClosedForm,
    calibrate_tau_star,
    compare_models,
    modified_final_values,
    modified_solution,
    si_solution,
    si_time_of_i,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    EpikitError,
    EventNotFound,
    NoEpidemicError,
    QuadratureError,
)
from .integrator import (
    IFallsBelow,
    IntegratorConfig,
    PeakOfI,
    SCrossesValue,
    Termination,
    Trajectory,
    integrate,
    locate_event,
)
from .model import (
    ModelKind,
    ModelParams,
    State,
    effective_r,
    i_of_s,
    modified_rhs,
    modified_s_of_r,
    r_of_s,
    s_of_r,
    si_rhs,
    sir_rhs,
)

__version__ = "0.1.0"
