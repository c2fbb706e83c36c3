"""Complex quantum trajectories of coherent states and eigenstates.

Trajectories follow the log-derivative velocity field
v = -i (hbar/m) psi'/psi of a prescribed wavefunction, integrated in the
complex position plane, alongside the complex classical dynamics of the
same potentials for quantitative comparison.
"""

from .analysis import (
    ABS_POSITION,
    COMPLEX_ENERGY,
    EllipseFit,
    Orientation,
    PeriodEstimate,
    congruence_metric,
    conserved_drift,
    curve_diameter,
    cycle_extrema,
    detect_period,
    fit_ellipse,
)
from .errors import (
    ComplexTrajError,
    ConfigError,
    DegenerateFitError,
    InputDomainError,
    OutsidePhysicalDomainError,
    PoleProximityError,
    PotentialSingularityError,
    PrecisionError,
)
from .fields import (
    ClassicalSystem,
    DBBField,
    EnergySpec,
    HOCoherentClosedField,
    QuantumVelocityField,
    SystemKind,
    classical_force,
    classical_ho_solution,
    classical_potential,
    dbb_velocity,
    free_particle_solution,
    ho_coherent_velocity,
    initial_momentum,
    quantum_velocity,
)
from .integrate import (
    IntegratorConfig,
    Method,
    StopKind,
    StopReason,
    Trajectory,
    integrate_field,
    integrate_hamiltonian,
)
from .scenarios import (
    FieldKind,
    PRESETS,
    RunReport,
    ScenarioConfig,
    load_config,
    preset,
    preset_names,
    run_scenario,
)
from .specfun import PolynomialEval, gauss_2f1_terminating, hermite_phys, pt_norm_constant
from .states import (
    AmplitudePair,
    CoefficientSet,
    Family,
    ModelParams,
    StateSpec,
    coherent_coefficients,
    eval_coherent_series,
    eval_eigenstate,
    eval_state,
    ho_coherent_closed,
    ho_coherent_closed_state,
    ho_coherent_series_state,
    ho_eigen,
    pt_coherent,
    pt_eigen,
    physical_domain,
    well_coherent,
    well_eigen,
)

__version__ = "0.1.0"
