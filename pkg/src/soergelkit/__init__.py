"""soergelkit: exact Coxeter/Hecke/Soergel-bimodule computations with a
machine check of the Koszul-duality regrading predictions at desk scale."""

from .coxeter import (
    GeneralizedCartanMatrix,
    InvalidCartanMatrix,
    NotFiniteType,
    ParabolicSubset,
    Realization,
    WeylElement,
    WeylGroup,
    coset_representatives,
    factor_parabolic,
    load_realization,
    longest_element,
    weyl_group,
)
from .polyring import DivisionFailure, GradedPoly, PolyRing
from .hecke import (
    HeckeAlgebra,
    HeckeElement,
    KLTable,
    LaurentPoly,
    ParabolicModule,
    bs_character,
    hom_pairing,
)
from .bimod import (
    Bimodule,
    Decomposition,
    DegreeBoundExceeded,
    GradedHomSpace,
    NotDecomposable,
    SideMismatch,
    bott_samelson,
    decompose,
    dualize_side,
    elementary_bimodule,
    hom_graded,
    specialize,
    standard_bimodule,
    tensor,
)
from .duality import (
    BigradedDim,
    baby_case_roundtrip,
    em_check,
    regrade,
    regrade_inverse,
    shift,
    twist,
)
from .parabolic import (
    ParabolicCharacter,
    average_standard,
    kill_nonminimal,
    parabolic_decomp_multiplicities,
    push_standard,
    pw_match,
    whittaker_cover_multiset,
)

__version__ = "0.1.0"
