"""Typing rules, determinism, and the transport lemmas."""

import pytest

from alacarte import testkit
from alacarte.lang_l import (
    Arrow,
    EMPTY_ENV,
    Env,
    NonValueError,
    PApp,
    PCon,
    PVar,
    Ty,
    TypeEnv,
    apply_,
    build_typopat,
    closure,
    cn,
    env_,
    env_union,
    join_,
    match_,
    pat_type,
    scope,
    typecheck_dec,
    typecheck_env,
    typecheck_exp,
    untypable_reason,
    vr,
    weaken,
)
from alacarte.lang_l.typing import retype_value
from alacarte.indexed import validate
from alacarte.mutual import validate_bi

TY_A, TY_B = Ty("a"), Ty("b")
AB = Arrow(TY_A, TY_B)


# ---------------------------------------------------------------------------
# pattern typing


def test_pat_type_and_derivations():
    assert pat_type(PVar("x", TY_A)) == TY_A
    assert pat_type(PCon("c", AB)) == AB
    p = PApp(PCon("c", AB), PVar("x", TY_A))
    assert pat_type(p) == TY_B
    d = build_typopat(p)
    assert validate(d)
    assert d.root.conclusion == (p, TY_B)


def test_pat_type_domain_mismatch():
    assert pat_type(PApp(PCon("c", AB), PVar("x", TY_B))) is None
    assert build_typopat(PApp(PCon("c", AB), PVar("x", TY_B))) is None


# ---------------------------------------------------------------------------
# typecheck_exp


def test_t_var():
    res = typecheck_exp(Env([("x", TY_A)]), vr("x"))
    assert res[0] == TY_A
    assert res[1].root.rule == "T-VAR"
    assert validate_bi(res[1])


def test_t_con_reads_annotation():
    res = typecheck_exp(EMPTY_ENV, cn("c", Arrow(TY_A, TY_B)))
    assert res[0] == Arrow(TY_A, TY_B)


def test_unbound_is_untypable():
    assert typecheck_exp(EMPTY_ENV, vr("x")) is None
    assert "unbound" in untypable_reason(EMPTY_ENV, vr("x"))


def test_t_clos_and_t_app():
    f = closure(EMPTY_ENV, PVar("x", TY_A), vr("x"))
    res = typecheck_exp(EMPTY_ENV, f)
    assert res[0] == Arrow(TY_A, TY_A)
    app = apply_(f, cn("c", TY_A))
    res2 = typecheck_exp(EMPTY_ENV, app)
    assert res2[0] == TY_A
    assert validate_bi(res2[1])


def test_t_app_argument_mismatch():
    f = closure(EMPTY_ENV, PVar("x", TY_A), vr("x"))
    assert typecheck_exp(EMPTY_ENV, apply_(f, cn("c", TY_B))) is None
    reason = untypable_reason(EMPTY_ENV, apply_(f, cn("c", TY_B)))
    assert "app.arg" in reason


def test_t_scope():
    e = scope(match_(PVar("x", TY_A), cn("c", TY_A)), vr("x"))
    res = typecheck_exp(EMPTY_ENV, e)
    assert res[0] == TY_A
    assert validate_bi(res[1])


def test_closure_env_must_hold_values():
    f = closure(Env([("y", vr("z"))]), PVar("x", TY_A), vr("x"))
    assert typecheck_exp(EMPTY_ENV, f) is None


# ---------------------------------------------------------------------------
# typecheck_dec


def test_td_env():
    rho = Env([("x", cn("c", TY_A))])
    res = typecheck_dec(EMPTY_ENV, env_(rho))
    assert res[0] == TypeEnv(Env([("x", TY_A)]))


def test_td_match():
    d = match_(PVar("x", TY_A), cn("c", TY_A))
    res = typecheck_dec(EMPTY_ENV, d)
    assert res[0] == TypeEnv(Env([("x", TY_A)]))


def test_td_join_sequential():
    d1 = match_(PVar("x", TY_A), cn("c", TY_A))
    d2 = match_(PVar("y", TY_A), vr("x"))  # sees x from d1
    res = typecheck_dec(EMPTY_ENV, join_(d1, d2))
    assert res[0] == TypeEnv(Env([("x", TY_A), ("y", TY_A)]))
    assert typecheck_dec(EMPTY_ENV, join_(d2, d1)) is None


# ---------------------------------------------------------------------------
# typecheck_env


def test_typecheck_env_empty():
    gamma, d = typecheck_env(EMPTY_ENV)
    assert gamma == EMPTY_ENV
    assert validate(d)


def test_typecheck_env_pointwise():
    gamma, d = typecheck_env(Env([("x", cn("c", TY_A))]))
    assert gamma == Env([("x", TY_A)])
    assert d.root.conclusion == (Env([("x", cn("c", TY_A))]), gamma)


def test_typecheck_env_rejects_nonvalue():
    with pytest.raises(NonValueError):
        typecheck_env(Env([("x", vr("y"))]))


# ---------------------------------------------------------------------------
# determinism and lemmas


def test_typing_deterministic_on_corpus():
    corpus = testkit.gen_well_typed_config(testkit.GenConfig(seed=9, count=50))
    for config in corpus:
        tc = typecheck_dec if config.sort == "dec" else typecheck_exp
        r1 = tc(config.gamma, config.term)
        r2 = tc(config.gamma, config.term)
        assert r1[0] == r2[0] and r1[1] == r2[1]
        assert validate_bi(r1[1])


def test_weaken_transport():
    gamma = Env([("x", TY_A)])
    prefix = Env([("x", TY_B), ("w", TY_B)])  # x is shadowed by gamma, w is new
    e = scope(match_(PVar("y", TY_A), vr("x")), vr("y"))
    t, td = typecheck_exp(gamma, e)
    moved = weaken(prefix, td)
    assert validate_bi(moved)
    assert moved.root.conclusion == (env_union(prefix, gamma), e, t)


def test_retype_value_context_free():
    v = apply_(cn("c", AB), cn("d", TY_A))
    t, td = typecheck_exp(Env([("q", TY_A)]), v)
    moved = retype_value(Env([("z", TY_B)]), td)
    assert validate_bi(moved)
    assert moved.root.conclusion == (Env([("z", TY_B)]), v, t)


def test_value_typing_is_context_free_on_corpus():
    corpus = testkit.gen_well_typed_config(testkit.GenConfig(seed=10, count=40))
    for config in corpus:
        for _, v in config.rho.items():
            r0 = typecheck_exp(EMPTY_ENV, v)
            r1 = typecheck_exp(config.gamma, v)
            assert r0[0] == r1[0]
