"""Conjugacy decision procedures for the group generated by a, b, c, d
acting on the binary rooted tree, plus a finite wreath-product
centralizer lab, exposed as a library, a FastAPI service, and a CLI."""

from .errors import GrigError, InputError, InternalError, ResourceLimitError
from .words import (
    Word,
    act,
    equal,
    first_level,
    in_stab,
    invert,
    is_trivial,
    length,
    multiply,
    order,
    parse,
    reduce,
    section,
)
from .quotient import (
    FiniteQuotient,
    LevelPermutation,
    brute_Q,
    brute_conjugate,
    enumerate_quotient,
    project,
    subgroup_closure,
)
from .cosets import (
    KmCoset,
    coset_of,
    kcoset_inv,
    kcoset_mul,
    km_coset_of,
    km_inv,
    km_mul,
    lift,
    schreier_dot,
    verify_lift_table,
)
from .conjugacy import (
    ConjugacyEngine,
    QSet,
    build_splitting_tree,
    export_dot,
    is_conjugate,
    is_conjugate_in_subgroup,
    q_exact,
    q_exact_km,
    q_fin,
    stabilization_depth,
)

__version__ = "0.1.0"
