"""Fixed point toolkit for hybrid pairs (f, T) on subsets of the real line.

Closed bounded sets, the Hausdorff-Pompeiu metric, a small piecewise map
language, sampled contraction certificates, pair properties, and solvers
for the Picard, Jungck, Bellman and Volterra inclusion iterations.
"""

from .sets import ClosedSet, hausdorff, hausdorff_pow, point_set_distance
from .dsl import (
    DSLError, DSLSyntaxError, CoverageError, OverlapError, EvaluationError, DomainError,
    Expression, PiecewiseMap, PiecewiseSetMap, parse_expr, parse_single, parse_multi,
    eval_single, eval_multi, one_sided_limits,
)
from .contraction import (
    FFunction, PhiFunction, ConditionSpec, CertificateReport, GridSpec, certify,
    certify_log_form, kadelburg_comparison, generalized_terms, hardy_rogers_rhs_arg, sgroi_M,
)
from .pairs import (
    HybridPair, coincidence_points, common_fixed_points, check_idempotency, check_commuting,
    detect_ea_clr, pair_report,
)
from .solvers import picard_multivalued, jungck_hybrid, IterationStuck
from .dp import DPInstance, bellman_apply, solve_successive, theta, verify_hypothesis1, check_solution
from .volterra import (
    InclusionInstance, apply_inclusion_operator, solve_inclusion, check_bracket, kernel_tau, delta,
)

__version__ = "0.1.0"
