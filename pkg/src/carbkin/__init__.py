"""Carbonate mineral dissolution kinetics toolkit.

Speciation of the CO2-H2O-CaCO3 system, the Plummer-Wigley-Parkhurst and
Palandri-Kharaka rate laws with an explicit carbonate-mechanism activity
basis, a batch-reactor integrator, experiment comparison utilities, and a
kinetics-database linter.
"""

from .batch import (
    AreaModel,
    BatchConfig,
    RateModelKind,
    SystemMode,
    TimeSeries,
    integrate_batch,
    load_batch_config,
    step_rhs,
    surface_area,
    time_to_saturation,
)
from .chem import (
    AqueousModel,
    SpeciationState,
    activity_coefficient,
    calcite_equilibrium_open,
    ionic_strength,
    load_model,
    saturation_index,
    speciate_closed,
    speciate_open,
)
from .errors import (
    CarbkinError,
    ConvergenceError,
    FileFormatError,
    IntegrationError,
    SaturationNotReached,
)
from .kinetics import (
    ConventionFlag,
    LogKLine,
    MechanismParams,
    PWPParameters,
    RateParameterSet,
    RateUnit,
    convert_log_rate_units,
    derive_k4,
    forward_rate,
    palandri_rate,
    pwp_log_rate_constant,
    pwp_net_rate,
    pwp_rate_constants,
    rate_params_from_pwp,
)
from .ratedb import (
    Finding,
    KineticsDatabase,
    MineralEntry,
    lint_db,
    parse_db,
    rewrite_entry,
    serialize_db,
    write_db,
)
from .validate import (
    ComparisonReport,
    ExperimentSeries,
    aligned_rmse,
    compare_conventions,
    experiment_saturation_time,
    load_experiment_csv,
)

__version__ = "0.1.0"
