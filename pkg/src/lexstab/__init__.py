"""Exact-arithmetic stability machinery: charge polynomials, HN and
lexicographic filtrations, torsion pairs, and tilted-heart positivity audits
over two finite backends (quiver representations and split sheaves)."""

from .charge import (
    ChargePolynomial,
    GaussianRational,
    INFINITY,
    NestedChargeSpec,
    Slope,
    finite_slope,
    lex_compare,
    nested_charge,
    positivity_audit,
    slope_of_charge,
)
from .category import (
    Filtration,
    LexFiltration,
    ObjectHandle,
    ShortExactSequence,
    Subobject,
)
from .hn import (
    NestedPlane,
    SigmaTPlane,
    hn_filtration,
    hull_vertices,
    is_semistable,
    level_plane,
    max_zero_charge_subobject,
    phase_closure_check,
    quasi_semistable_decompose,
    switch_decomposition,
)
from .lex import (
    LexEngine,
    TorsionSplit,
    degree_filtration,
    is_lth_level_semistable,
    lex_filtration,
    sigma_t_quadratic_audit,
    tilted_charge,
    tilted_positivity_audit,
    torsion_split,
    virtual_class,
)
from .p1 import P1Backend, SplitSheaf, is_gieseker_semistable, is_slope_semistable
from .quiver import ChargePreset, Quiver, QuiverBackend, QuiverRep

__version__ = "0.1.0"
