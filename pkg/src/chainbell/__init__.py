"""Detection-efficiency thresholds and local models for the chained Bell inequalities."""

from .bounds import (
    beta_max_lhv,
    bound_report,
    delta_lower_bound,
    eta_a_crit_asymmetric,
    eta_bound_from_beta,
    eta_crit_from_violation,
    eta_crit_symmetric,
)
from .constructions import (
    asymmetric_model,
    lambda0_states,
    lambda01_states,
    lambda1_states,
    lambda10_states,
    symmetric_model,
)
from .lhv import LhvModel, LhvState, check_qm_constraints, evaluate, load_model, save_model
from .montecarlo import SimConfig, simulate
from .oracle import OracleProblem, solve
from .quantum import critical_visibility, quantum_beta, quantum_correlation, violation_ratio

__version__ = "0.1.0"
