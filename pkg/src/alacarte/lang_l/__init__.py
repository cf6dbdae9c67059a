"""The case-study language: patterns, closures, first-class environments.

``syntax`` defines types, patterns, environments, the mutually recursive
declaration/expression grammar, value classification and pattern matching.
``step`` gives the deterministic small-step semantics as indexed
bi-derivations, ``typing`` the syntax-directed type system, and
``preservation`` subject reduction as the fold of one indexed Mendler
bi-algebra.
"""

from .syntax import (
    Arrow,
    Dec,
    DuplicateBindingError,
    Env,
    EMPTY_ENV,
    Exp,
    LANG,
    NonValueError,
    PApp,
    PCon,
    PVar,
    Ty,
    TypeEnv,
    apply_,
    bindings,
    closure,
    cn,
    dec_to_sexpr,
    env_,
    env_union,
    exp_to_sexpr,
    is_data_value,
    is_value,
    join_,
    match_,
    parse_dec,
    parse_env,
    parse_exp,
    parse_pat,
    parse_typ,
    pat_to_sexpr,
    patmatch,
    print_dec,
    print_env,
    print_exp,
    print_pat,
    print_typ,
    scope,
    typ_to_sexpr,
    vr,
)
from .step import STEP_SIG, step_dec, step_exp, step_derivation_json
from .typing import (
    TYPING_SIG,
    TYPOPAT_SIG,
    TYPOENV_SIG,
    build_typopat,
    env_typing,
    pat_type,
    typecheck_dec,
    typecheck_env,
    typecheck_exp,
    typing_derivation_json,
    typoenv_derivation_json,
    typopat_derivation_json,
    untypable_reason,
    weaken,
)
from .preservation import CounterexampleError, TP_ALG, subject_reduction

__all__ = [name for name in dir() if not name.startswith("_")]
