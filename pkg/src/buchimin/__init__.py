"""Exact state minimization of nondeterministic Buchi automata.

A SAT-backed candidate finder learns automata consistent with growing
sets of accepted/rejected ultimately periodic words; complementation via
deterministic parity automata supplies counterexamples until the smallest
language-equal automaton is found and certified.
"""

from .automata import (
    DPA,
    NBA,
    SccPartition,
    dpa_member,
    empty_nba,
    find_accepted_word,
    has_accepting_lasso,
    intersect,
    member,
    random_nba,
    reduce_nba,
    sccs,
    universal_nba,
    word_automaton,
)
from .complement import (
    DeterminizationLimitExceeded,
    complement_dpa,
    complement_nba,
    determinize,
    dpa_to_nba,
    nba_to_dpa,
)
from .encoding import (
    CandidateQuery,
    EncodingStats,
    SampleConflict,
    SampleSets,
    VarCatalog,
    build_encoding,
    decode_model,
    solve_candidate,
)
from .minimize import (
    Certificate,
    CheckResult,
    MinimizationConfig,
    MinimizationIncomplete,
    MinimizationResult,
    Trace,
    check_candidate,
    minimize,
    seed_words,
    verify_certificate,
)
from .sat import (
    CNF,
    Budget,
    CdclSolver,
    ExternalModelError,
    ExternalOutputError,
    ExternalProcessError,
    ExternalSolverError,
    SolverTimeout,
    check_model,
    external_solve,
    read_dimacs,
    solve,
    write_dimacs,
)
from .words import UPWord, canonicalize, enumerate_words, format_word, parse_word, upword

__version__ = "0.1.0"
