"""Induced norms from conditional expectations on direct sums of
complex matrix algebras: projections onto standard subalgebras, the
norms they induce, equivalence constants against the operator norm, and
the continued-fraction tower instantiation."""

from .algebra import (
    AlgebraElement,
    AlgebraShape,
    TracialWeight,
    element_norm,
    inner_product,
    matrix_unit,
    trace_state,
)
from .constants import (
    SearchReport,
    StructuralConstants,
    Table1Row,
    empirical_sharp_constant,
    structural_constants,
    table1,
    theoretical_bound,
)
from .effros_shen import (
    ContinuedFraction,
    EffrosShenLevel,
    baire_distance,
    cf_expand,
    continuity_probe,
    convergent_table,
    convergents,
    es_constant,
    es_level,
    es_weight_t,
    eventually_periodic_theta,
    periodic_theta,
)
from .errors import (
    ConvergenceError,
    FrnormsError,
    InputError,
    RationalityError,
)
from .expectation import (
    apply_pipeline,
    cond_expect,
    cond_expect_gram,
    fr_norm,
    fr_norm_squared,
    pipeline_for,
    quotient_seminorm,
)
from .subalgebra import (
    CanonicalBasisElement,
    ConjugatedSubalgebra,
    RefinedPartition,
    StandardSubalgebra,
    canonical_basis,
    conjugated_subalgebra,
    contains,
    embed,
    make_standard_subalgebra,
    single_summand_subalgebra,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "AlgebraShape",
    "CanonicalBasisElement",
    "ConjugatedSubalgebra",
    "ContinuedFraction",
    "ConvergenceError",
    "EffrosShenLevel",
    "FrnormsError",
    "InputError",
    "RationalityError",
    "RefinedPartition",
    "SearchReport",
    "StandardSubalgebra",
    "StructuralConstants",
    "Table1Row",
    "TracialWeight",
    "apply_pipeline",
    "baire_distance",
    "canonical_basis",
    "cf_expand",
    "cond_expect",
    "cond_expect_gram",
    "conjugated_subalgebra",
    "contains",
    "continuity_probe",
    "convergent_table",
    "convergents",
    "element_norm",
    "embed",
    "empirical_sharp_constant",
    "es_constant",
    "es_level",
    "es_weight_t",
    "eventually_periodic_theta",
    "fr_norm",
    "fr_norm_squared",
    "inner_product",
    "make_standard_subalgebra",
    "matrix_unit",
    "periodic_theta",
    "pipeline_for",
    "quotient_seminorm",
    "single_summand_subalgebra",
    "structural_constants",
    "table1",
    "theoretical_bound",
    "trace_state",
]
