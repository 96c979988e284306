"""QMetric - quantum metrics on finite-dimensional noncommutative spaces."""

from .algebra import (
    AlgebraElement,
    AlgebraShape,
    BiElement,
    TriElement,
    diag_projector,
    flip,
    identity,
    mid_embed,
    min_eig,
    mult_map,
    op_norm,
    tensor2,
)
from .axioms import (
    check_alg_diag,
    check_alg_nondegenerate_sampled,
    check_diag_vanish,
    check_flip_symmetric,
    check_nondegenerate,
    check_positive,
    check_triangle,
    diameter,
    m2_admissible,
    triangle_defect,
    verify,
)
from .construct import (
    conic_combine,
    direct_sum,
    embed_classical,
    from_finite_metric,
    tensor_product,
)
from .lipschitz import (
    check_leibniz,
    lip_seminorm,
    metric_pseudo_inverse,
    mk_distance,
    pure_decomposition,
    pure_state_bound,
)
from .models import (
    AxiomReport,
    FiniteMetricSpace,
    MetricCandidate,
    PureState,
    SearchConfig,
    SearchOutcome,
    State,
    ToleranceConfig,
)
from .modes import (
    axiom_statement,
    get_available_mode_names,
    get_available_modes,
    get_mode,
    split_axioms,
)
from .nogo import run_nogo_m2
from .search import certify, feasibility_search, project_psd, project_structure

__version__ = "1.0.0"

__all__ = [
    "AlgebraElement",
    "AlgebraShape",
    "AxiomReport",
    "BiElement",
    "FiniteMetricSpace",
    "MetricCandidate",
    "PureState",
    "SearchConfig",
    "SearchOutcome",
    "State",
    "ToleranceConfig",
    "TriElement",
    "axiom_statement",
    "certify",
    "check_alg_diag",
    "check_alg_nondegenerate_sampled",
    "check_diag_vanish",
    "check_flip_symmetric",
    "check_leibniz",
    "check_nondegenerate",
    "check_positive",
    "check_triangle",
    "conic_combine",
    "diag_projector",
    "diameter",
    "direct_sum",
    "embed_classical",
    "feasibility_search",
    "flip",
    "from_finite_metric",
    "get_available_mode_names",
    "get_available_modes",
    "get_mode",
    "identity",
    "lip_seminorm",
    "m2_admissible",
    "metric_pseudo_inverse",
    "mid_embed",
    "min_eig",
    "mk_distance",
    "mult_map",
    "op_norm",
    "project_psd",
    "project_structure",
    "pure_decomposition",
    "pure_state_bound",
    "run_nogo_m2",
    "split_axioms",
    "tensor2",
    "tensor_product",
    "triangle_defect",
    "verify",
]
