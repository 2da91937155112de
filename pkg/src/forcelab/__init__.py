"""forcelab: finite-scale workbench for forcing posets, Boolean-valued
semantics, name principles and Boolean ultrapowers."""

__version__ = "0.1.0"

from .order import (  # noqa: F401
    CH2,
    FIXTURES,
    FORK3,
    NSEP4,
    NWM5,
    CondSet,
    Filter,
    Poset,
    classify,
    compatible,
    cone,
    enumerate_filters,
    generated_filter,
    generic_filters,
    is_well_met,
    make_poset,
    parse_poset,
    separative_quotient,
)
from .boolcomp import BoolAlg, complete, ultrafilters  # noqa: F401
from .names import (  # noqa: F401
    EMPTY,
    PName,
    check_leaf,
    check_name,
    enumerate_names,
    interpret,
    is_kappa_small,
    is_lambda_bounded,
    make_name,
    parse_hf,
    parse_names,
    quasi_interpret,
    rank,
    restrict_to_cone,
    split_bounded,
)
from .semantics import (  # noqa: F401
    boolean_value,
    eval_ground,
    forces,
    parse_formula,
    strongly_forces,
)
from .synth import (  # noqa: F401
    DenseFamily,
    encode_family_as_name,
    family_check_equality,
    family_for_formula,
    family_for_formula_bounded,
    family_interp_agreement,
)
from .principles import (  # noqa: F401
    ALL,
    AT_LEAST,
    CONTAINS,
    NONEMPTY,
    LargenessPredicate,
    check_FA,
    check_N,
    check_phi_N,
    check_simultaneous_N,
    hamkins_pipeline,
    trace,
)
from .ultrapower import (  # noqa: F401
    UniverseSpec,
    build_quotient,
    check_elementarity,
    check_los,
    check_trace_identity,
    embedding_j,
)
from .harness import InstanceSpace, enumerate_posets, replay, run_suite  # noqa: F401
