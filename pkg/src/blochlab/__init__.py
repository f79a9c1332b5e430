"""blochlab: Bloch groups of embedded number fields.

Exact mu-map evaluation over constructed multiplicative bases, Borel
regulator matrices and eigenspace rank formulas, and volume/Chern-Simons
classes of hyperbolic 3-manifold shape data with rationality verdicts.
"""

__version__ = "0.1.0"

from .precision import DEFAULT_CONTEXT, PrecisionContext
from .dilog import bloch_wigner_d2, clausen_cl2, li2, rho_scalar
from .numberfield import (
    EmbeddedField,
    FieldElement,
    NumberField,
    classify_embedding,
    commuting_pairs,
    compositum_with_conjugate,
    conjugate_intersection,
    embeddings,
    is_conjugation_stable,
    make_field,
    real_subfield,
)
from .blochgroup import (
    NONZERO_MODULO_SEARCH,
    ZERO_EXACT,
    FormalSum,
    MultiplicativeBasis,
    WedgeElement,
    build_multiplicative_basis,
    eigenspace_split,
    five_term,
    involution,
    mu,
)
from .regulator import (
    CsClass,
    RankReport,
    borel_matrix,
    cs_rationality_report,
    embedding_representatives,
    predicted_ranks,
    rho_class,
    theorem_b_samples,
    verify_theorem_b,
)
from .manifold import (
    CONJECTURED_IRRATIONAL,
    INFINITY,
    RATIONAL_BY_THEOREM_A,
    UNKNOWN,
    ManifoldRecord,
    analyze,
    bloch_invariant,
    cross_ratio,
    validate,
)
from .milnor import CyclotomicScan, cyclotomic_basis, milnor_scan
from .relations import Relation, find_integer_relation, qrank, rational_recognize
from .lattice import lll_reduce, lll_reduce_with_transform, smith_normal_form
