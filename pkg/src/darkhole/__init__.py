"""Coherent population trapping in a two-electron three-level ortho system.

The package builds the rotating-frame master equation for the one-electron V
scheme and the two-electron Lambda scheme (optionally with electron-electron
exchange), solves it by null-space or time integration, scans absorption
spectra and compares the trapping of a hole against single-electron decay.
"""

from .analysis import (
    HoleDistribution,
    SuperpositionState,
    TrappingReport,
    compare_v_lambda,
    dark_bright_basis,
    dressed_energies,
    exchange_splitting,
    hole_population,
    predicted_satellites,
)
from .crosscheck import DiscrepancyReport, crosscheck_published_equations, crosscheck_samples, printed_rhs
from .dynamics import (
    RK4_FIXED,
    RK45_ADAPTIVE,
    AveragedObservables,
    IntegrationPolicy,
    Trajectory,
    integrate,
    periodic_average,
    quasi_steady_average,
)
from .errors import DarkholeError, NotConvergedError
from .liouvillian import (
    HamiltonianRWA,
    Liouvillian,
    RelaxationSpec,
    assemble_liouvillian,
    build_hamiltonian_rwa,
    build_liouvillian,
    build_relaxation,
    rhs,
)
from .model import (
    ModelKind,
    ScenarioPreset,
    SystemParams,
    ValidatedParams,
    format_params,
    load_params,
    mixed_state,
    parse_params,
    scenario_preset,
    validate_params,
)
from .spectra import DipFeature, SpectrumScan, export_csv, find_dips, scan_detuning
from .steadystate import SteadyStateResult, steady_state_nullspace

__version__ = "0.1.0"
