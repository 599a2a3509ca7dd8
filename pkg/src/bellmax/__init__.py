"""Maximum quantum violation of bipartite two-outcome Bell inequalities."""
from .analysis import SchmidtReport, analyze, detect_effective_degeneracy, flag_maximal_entanglement, schmidt
from .belloperator import BellOperator, assemble, quantum_value
from .embedding import embed_scenario, lift_qubit_solution, map_matrix, map_state, verify_expectation
from .inequality import BellInequality, bundled, classical_bound, violation_of
from .measurements import (
    ONE,
    ZERO,
    Field,
    ScenarioShape,
    SettingKind,
    build_projector,
    build_scenario,
    enumerate_kind_combinations,
    parameter_count,
    projective,
)
from .optimizer import (
    OptimizerConfig,
    ViolationResult,
    cross_dimension_sweep,
    maximize_violation,
    nelder_mead_maximize,
)

__version__ = "0.1.0"
