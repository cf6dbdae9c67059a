"""Evaluation, relations, and the two preservation routes."""

import pytest

from alacarte import testkit
from alacarte.arith import (
    EVAL_SIG,
    N,
    Val,
    add,
    build_eval_derivation,
    build_istrm,
    build_typof_derivation,
    eval_,
    eval_of_derivation,
    lit,
    parse_term,
    preservation,
    preservation_via_istrm,
    print_term,
    print_val,
)
from alacarte.indexed import (
    Derivation,
    InvalidDerivationError,
    WrongIndexError,
    validate,
)


def enum_terms(depth=4):
    return list(testkit.enumerate_terms(testkit.arith_enum(depth)))


# ---------------------------------------------------------------------------
# eval


def test_eval_lit():
    assert eval_(lit(3)) == Val(3)


def test_eval_add():
    assert eval_(add(lit(2), lit(3))) == Val(5)


def test_eval_nested():
    assert eval_(add(add(lit(1), lit(1)), lit(2))) == Val(4)


def test_eval_equals_oracle_on_enumeration():
    for t in enum_terms(4):
        assert eval_(t) == testkit.oracle_eval(t)


# ---------------------------------------------------------------------------
# Eval derivations


def test_build_eval_derivation_lit():
    d = build_eval_derivation(lit(3))
    assert d.root.rule == "ev1"
    assert d.root.conclusion == (lit(3), Val(3))


def test_build_eval_derivation_add():
    d = build_eval_derivation(add(lit(1), lit(2)))
    assert d.root.rule == "ev2"
    assert [w.root.rule for _, w in d.root.premises] == ["ev1", "ev1"]
    assert validate(d)


def test_build_eval_derivation_sweep():
    for t in enum_terms(4):
        d = build_eval_derivation(t)
        assert validate(d)
        assert d.root.conclusion == (t, eval_(t))


# ---------------------------------------------------------------------------
# agreement


def test_agreement_ev1():
    assert eval_of_derivation(build_eval_derivation(lit(5))).ok


def test_agreement_built_ev2():
    assert eval_of_derivation(build_eval_derivation(add(lit(1), lit(2)))).ok


def test_forged_ev2_rejected_by_validate():
    d1, d2 = build_eval_derivation(lit(1)), build_eval_derivation(lit(2))
    forged = Derivation(
        EVAL_SIG,
        EVAL_SIG.dnode(
            "ev2",
            {"e1": lit(1), "e2": lit(2), "x1": Val(1), "x2": Val(2), "v": Val(9)},
            (d1, d2),
        ),
    )
    with pytest.raises(InvalidDerivationError):
        eval_of_derivation(forged)


def test_every_validating_eval_derivation_agrees():
    for t in enum_terms(3):
        assert eval_of_derivation(build_eval_derivation(t)).ok


# ---------------------------------------------------------------------------
# TypOf and IsTrm


def test_typof_lit():
    d = build_typof_derivation(lit(0))
    assert d.root.rule == "tof1"
    assert d.root.conclusion == (lit(0), N)


def test_typof_add():
    d = build_typof_derivation(add(lit(1), lit(2)))
    assert d.root.rule == "tof2"
    assert [w.root.rule for _, w in d.root.premises] == ["tof1", "tof1"]
    assert validate(d)


def test_typof_sweep():
    for t in enum_terms(4):
        d = build_typof_derivation(t)
        assert validate(d)
        assert d.root.conclusion == (t, N)


def test_istrm_lit():
    d = build_istrm(lit(1))
    assert d.root.rule == "isLit"
    assert d.root.conclusion == lit(1)


def test_istrm_add():
    d = build_istrm(add(lit(1), lit(2)))
    assert d.root.rule == "isAdd"
    assert len(d.root.premises) == 2


def test_istrm_sweep():
    for t in enum_terms(4):
        assert validate(build_istrm(t))


# ---------------------------------------------------------------------------
# preservation


def test_preservation_axiom_case():
    e = lit(3)
    out = preservation(build_eval_derivation(e), build_typof_derivation(e))
    assert out.root.rule == "tof1"
    assert out.root.conclusion == (lit(3), N)
    assert validate(out)


def test_preservation_add_case():
    e = add(lit(1), lit(2))
    out = preservation(build_eval_derivation(e), build_typof_derivation(e))
    assert out.root.conclusion == (lit(3), N)
    assert validate(out)


def test_preservation_sweep():
    for t in enum_terms(3):
        out = preservation(build_eval_derivation(t), build_typof_derivation(t))
        assert validate(out)
        assert out.root.conclusion == (lit(eval_(t).vv), N)


def test_preservation_index_mismatch():
    with pytest.raises(WrongIndexError):
        preservation(build_eval_derivation(lit(1)), build_typof_derivation(lit(2)))


def test_preservation_via_istrm_mirrors():
    for e in (lit(3), add(lit(1), lit(2)), add(add(lit(-1), lit(2)), lit(0))):
        td = build_typof_derivation(e)
        a = preservation(build_eval_derivation(e), td)
        b = preservation_via_istrm(build_istrm(e), td)
        assert a.root.conclusion == b.root.conclusion
        assert validate(b)


def test_preservation_routes_coincide_sweep():
    for t in enum_terms(3):
        td = build_typof_derivation(t)
        a = preservation(build_eval_derivation(t), td)
        b = preservation_via_istrm(build_istrm(t), td)
        assert a.root.conclusion == b.root.conclusion


# ---------------------------------------------------------------------------
# surface syntax


def test_parse_print_roundtrip():
    for t in enum_terms(3):
        assert parse_term(print_term(t)) == t


def test_print_val():
    assert print_val(Val(5)) == "(val 5)"


def test_parse_rejects_garbage():
    from alacarte.sexpr import SexprError

    with pytest.raises(SexprError):
        parse_term("(mul (lit 1) (lit 2))")
