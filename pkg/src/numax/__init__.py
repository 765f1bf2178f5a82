"""numax: solvers and bounds for budgeted max-min utility maximization.

Solves conditional eigenvalue problems T(x) = lambda*x, ||x|| = 1 for concave
interference mappings and monotone norms by normalized fixed-point iteration,
derives utility and energy-efficiency bound envelopes with their low/high
power regimes, classifies networks as interference- or noise-limited, and
applies the machinery to joint uplink power control and base-station
assignment.
"""

from .analysis import (
    BoundsReport,
    LowerBoundingMatrix,
    RecessionVector,
    asymptotic_report,
    bounds_report,
    classify,
    ee_bounds,
    lower_bounding_matrix,
    recession_vector,
    regime,
    spectral_radius,
    utility_bounds,
)
from .eigensolver import (
    EigSolution,
    SolverConfig,
    conditional_eig,
    energy_efficiency,
    solve_canonical,
    sweep,
)
from .mappings import (
    InterferenceMapping,
    affine_majorant,
    affine_mapping,
    check_concavity,
    check_monotonicity,
    check_scalability,
    constant_mapping,
)
from .norms import (
    GaugeSetError,
    MonotoneNormSpec,
    equiv_constants,
    gauge,
    gauge_eval,
    infnorm_beta,
    l1,
    l2,
    linf,
    norm_eval,
    scaled,
    validate_gauge_set,
    weighted_lp,
)
from .wireless import (
    Assignment,
    Scenario,
    ScenarioError,
    generate_scenario,
    load_scenario,
    recover_assignment,
    save_scenario,
    sinr,
    weights_interference_free,
    wireless_lbm,
    wireless_mapping,
)

__version__ = "0.1.0"
