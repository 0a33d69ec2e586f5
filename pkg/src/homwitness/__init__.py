"""Phase-sensitive two-photon interference: simulation and witness analysis.

Simulates joint homodyne quadrature records for two single photons
interfering on a beam splitter, evaluates the conditional-squeezing
witness (noncentral second moment below the vacuum level 1/2) with
post-selection windows and Monte Carlo confidence bands, and models
broadband coincidence statistics for the bunching dip.
"""

from .analysis import (
    ConditionWindow,
    CoincidenceTable,
    EmptyWindowError,
    WindowSweepResult,
    WitnessReport,
    apd_probabilities,
    bootstrap_band,
    confidence_band,
    estimate_windowed_moment,
    exact_conditional_second_moment,
    exact_window_probability,
    exact_windowed_moment,
    optimize_window,
    visibility,
    windowed_moment_vs_angle,
    witness_report,
)
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .fock import (
    DEFAULT_CUTOFF,
    DensityMatrix,
    FockCutoff,
    PureState,
    expect,
    fock_ket,
    fock_ket2,
    partial_trace,
    superposition,
    tensor,
    x_squared_matrix,
)
from .homodyne import (
    HomodyneSetting,
    QuadratureSample,
    QuadratureSampler,
    conditional_state,
    joint_density,
    marginal_density,
    psi_n,
    sample,
)
from .optics import (
    InterferenceState,
    SourceModel,
    beamsplitter_matrix,
    dephase,
    interfere,
    interfere_arm_states,
    make_arm_state,
    poisson_distribution,
    transfer_matrix,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
