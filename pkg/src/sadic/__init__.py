"""Invariant measures of substitution and S-adic subshifts.

Ergodic measures of a substitution subshift are read off the distinguished
non-negative eigenvectors of its incidence matrix; cylinder values follow
from occurrence vectors and the augmented incidence matrix.  The S-adic
module extends this to directive sequences and their vector towers.

>>> from sadic import load_fixture, ergodic_measures, cylinder_measure
>>> tm = load_fixture("thue_morse")
>>> cylinder_measure(tm, "baabab", ergodic_measures(tm)[0], exact=True)
Fraction(1, 12)
"""
__version__ = "0.1.0"

from .errors import (
    AlphabetMismatch,
    BudgetExceeded,
    CompatibilityViolation,
    DegenerateSpectrum,
    EmptyImage,
    EmptyPattern,
    EverywhereGrowingRequired,
    HorizonExceeded,
    InputError,
    InvalidLetter,
    LevelTooSmall,
    NonConvergence,
    ParseError,
    ResourceError,
    SadicError,
    SingularSystem,
    WordTooLong,
)
from .words import (
    Alphabet,
    Substitution,
    apply,
    compose,
    count_occurrences,
    incidence_matrix,
    is_everywhere_growing,
    is_primitive,
    iterate_array,
    power,
    strong_components,
)
from .matrices import (
    AugmentedMatrix,
    Cone,
    augmented_matrix,
    cone_intersection,
    distinguished_eigenvectors,
    extend_to_augmented,
    pf_eigenpair,
    strata,
)
from .measures import (
    ErgodicMeasure,
    MeasureCombination,
    cylinder_measure,
    cylinder_table,
    ergodic_measures,
    occurrence_vector,
    select_measure,
)
from .directive import (
    DirectiveSequence,
    VectorTowerPrefix,
    approx_measure_sum,
    cone_sequence_dim,
    is_weakly_primitive,
    local_weights,
    sadic_cylinder_measure,
    telescope,
    weight_transition_check,
)
from .constructions import (
    approx_rational_23,
    build_construction_A,
    build_construction_B,
    build_epsilon_schedule,
    inclusion_check,
)
from .oracle import consistency_suite, letter_frequency, oracle_vs_formula
from .io import load_directive, load_fixture, load_input, load_substitution

__all__ = [name for name in dir() if not name.startswith("_")]
