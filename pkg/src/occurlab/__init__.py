"""A laboratory for unification with and without the occur check.

Four engines over one term language: disagreement-pair unification
(:mod:`occurlab.robinson`), the equation-rewriting transition system
with enumerable nondeterminism (:mod:`occurlab.mma`), its
occur-check-free variant with partial replacement
(:mod:`occurlab.mma_minus`), and unification over rational trees
(:mod:`occurlab.iterms`); plus SLD-resolution with pluggable selection
rules and engines (:mod:`occurlab.sld`), an embedded program corpus
(:mod:`occurlab.corpus`), and differential test drivers
(:mod:`occurlab.difftest`).
"""

from .iterms import (
    ISubstitution,
    RationalTerm,
    bisimilar,
    equal_to_depth,
    has_i_solution,
    i_equivalent,
    solve_rational,
    unfold,
)
from .mma import (
    DEFAULT_ENUM_BOUND,
    DEFAULT_RUN_FUEL,
    MmaAction,
    MmaState,
    MmaTrace,
    Strategy,
    applicable_actions,
    enumerate_runs,
    exists_ocf_run,
    extract_mgu,
    is_nsto,
    is_solved,
    mgu_of,
    run,
    step,
    strategy,
)
from .mma_minus import (
    MinusTrace,
    MmaMinusAction,
    MmaMinusState,
    applicable_actions_minus,
    classify_result,
    is_semi_solved,
    replay_as_minus,
    replay_as_mma,
    run_minus,
    step_minus,
)
from .parser import (
    ArityConflictError,
    ParseError,
    parse_equations,
    parse_program,
    parse_query,
    render,
)
from .robinson import disagreement_pairs, enumerate_robinson, unify_robinson
from .sld import (
    AvailableUnification,
    DerivationTree,
    EngineError,
    SelectionRule,
    available_unifications,
    check_derivation_invariants,
    derive,
    resolution_step,
    selection_rule,
    structure_signature,
)
from .terms import (
    Atom,
    Clause,
    Compound,
    Equation,
    EquationSet,
    Program,
    Query,
    Substitution,
    Term,
    Var,
    apply,
    compose,
    equal_up_to_renaming,
    is_ground,
    is_linear,
    rename_apart,
    term_depth,
    term_size,
    vars_of,
)

__version__ = "0.1.0"
