"""Bi-functor laws on the Dec/Exp signature and a tiny standalone instance."""

import pytest

from alacarte import testkit
from alacarte.lang_l import LANG, EMPTY_ENV, Env, Ty, cn, env_, join_, scope, vr
from alacarte.mutual import (
    BiMendlerAlgebra,
    BiDerivation,
    IndexedBiMendlerAlgebra,
    MalformedNodeError,
    WrongComponentError,
    bifmap,
    bifold_1,
    bifold_2,
    bistep_once,
    biterm_to_json,
    din_bi,
    dout_bi,
    hfold_2,
    hstep_once,
    in_bi,
    out_bi,
    validate_bi,
)
from alacarte.indexed import InvalidDerivationError


def lang_layers(depth=3):
    spec = testkit.BiEnumSpec(LANG, depth, testkit._lang_pools())
    return testkit.biterm_layers(spec)


def all_biterms(depth=3):
    out = []
    for decs, exps in lang_layers(depth):
        out.extend(decs)
        out.extend(exps)
    return out


SIZE = BiMendlerAlgebra(
    step1=lambda r1, r2, n: 1 + sum(r1(h) for h in n.rec1) + sum(r2(h) for h in n.rec2),
    step2=lambda r1, r2, n: 1 + sum(r1(h) for h in n.rec1) + sum(r2(h) for h in n.rec2),
)

REBUILD = BiMendlerAlgebra(
    step1=lambda r1, r2, n: in_bi(bifmap(r1, r2, n)),
    step2=lambda r1, r2, n: in_bi(bifmap(r1, r2, n)),
)


# ---------------------------------------------------------------------------
# bifmap


def test_bifmap_identity_scope_node():
    t = scope(env_(EMPTY_ENV), vr("x"))
    n = out_bi(t)
    ident = lambda x: x
    assert bifmap(ident, ident, n) == n


def test_bifmap_composition_sampled():
    tag = lambda x: ("t", x)
    untag = lambda x: x[1]
    for t in all_biterms(2):
        n = out_bi(t)
        lhs = bifmap(untag, untag, bifmap(tag, tag, n))
        rhs = bifmap(lambda x: untag(tag(x)), lambda x: untag(tag(x)), n)
        assert lhs == rhs == n


def test_bifmap_join_maps_both_rec1_slots():
    d = env_(EMPTY_ENV)
    dp = env_(Env([("x", cn("c", Ty("a")))]))
    n = out_bi(join_(d, dp))
    mapped = bifmap(lambda x: ("seen", x), lambda x: x, n)
    assert mapped.rec1 == (("seen", d), ("seen", dp))


# ---------------------------------------------------------------------------
# in/out per component


def test_in_out_roundtrip_per_component():
    for t in all_biterms(3):
        assert in_bi(out_bi(t)) == t
        assert out_bi(in_bi(out_bi(t))) == out_bi(t)


def test_in_bi_rejects_component_mixups():
    d = env_(EMPTY_ENV)
    with pytest.raises(MalformedNodeError):
        in_bi(LANG.node(1, "join", (d, vr("x"))))


# ---------------------------------------------------------------------------
# bifolds


def test_bifold2_size_of_variable():
    assert bifold_2(SIZE, vr("x")) == 1


def test_bifold1_computation_rule_on_join():
    t = join_(env_(EMPTY_ENV), env_(EMPTY_ENV))
    lhs = bifold_1(SIZE, t)
    rhs = bistep_once(
        SIZE,
        out_bi(t),
        lambda s: bifold_1(SIZE, s),
        lambda s: bifold_2(SIZE, s),
    )
    assert lhs == rhs == 3


def test_bifold_component_mismatch():
    with pytest.raises(WrongComponentError):
        bifold_1(SIZE, vr("x"))
    with pytest.raises(WrongComponentError):
        bifold_2(SIZE, env_(EMPTY_ENV))


def test_rebuild_identity_sweep():
    for t in all_biterms(3):
        fold = bifold_1 if t.component == 1 else bifold_2
        assert fold(REBUILD, t) == t


def test_mutual_computation_rules_sweep():
    for t in all_biterms(3):
        fold = bifold_1 if t.component == 1 else bifold_2
        lhs = fold(SIZE, t)
        rhs = bistep_once(
            SIZE,
            out_bi(t),
            lambda s: bifold_1(SIZE, s),
            lambda s: bifold_2(SIZE, s),
        )
        assert lhs == rhs


# ---------------------------------------------------------------------------
# indexed bi-derivations (via the step relation)


def _step_derivation(e):
    from alacarte.lang_l import step_exp

    sub = step_exp(EMPTY_ENV, e)
    assert sub is not None
    return sub[1]


def _axiom_step():
    from alacarte.lang_l import PVar, apply_, closure

    ty = Ty("a")
    redex = apply_(closure(EMPTY_ENV, PVar("x", ty), vr("x")), cn("c", ty))
    return _step_derivation(redex)


HDEPTH = IndexedBiMendlerAlgebra(
    step1=lambda r1, r2, w, n: 1
    + max((r1(wi, h) if f == 1 else r2(wi, h) for f, wi, h in n.premises), default=0),
    step2=lambda r1, r2, w, n: 1
    + max((r1(wi, h) if f == 1 else r2(wi, h) for f, wi, h in n.premises), default=0),
)


def test_hfold_depth_on_axiom_step():
    d = _axiom_step()
    assert d.root.rule == "E-BETA"
    assert hfold_2(HDEPTH, d.root.conclusion, d) == 1


def test_hfold_preserves_conclusion_index():
    extract = IndexedBiMendlerAlgebra(
        step1=lambda r1, r2, w, n: w, step2=lambda r1, r2, w, n: w
    )
    d = _axiom_step()
    w = d.root.conclusion
    assert hfold_2(extract, w, d) == w


def test_hfold_computation_rule_nested():
    from alacarte.lang_l import apply_, closure, PVar, step_exp

    ty = Ty("a")
    inner = apply_(closure(EMPTY_ENV, PVar("x", ty), vr("x")), cn("c", ty))
    outer = apply_(closure(EMPTY_ENV, PVar("y", ty), vr("y")), inner)
    sub = step_exp(EMPTY_ENV, outer)
    d = sub[1]
    assert d.root.rule == "E-APP2"
    w = d.root.conclusion
    lhs = hfold_2(HDEPTH, w, d)
    rhs = hstep_once(
        HDEPTH,
        w,
        d.root,
        lambda wi, di: hfold_2(HDEPTH, wi, di) if di.family == 2 else None,
        lambda wi, di: hfold_2(HDEPTH, wi, di),
    )
    assert lhs == rhs == 2


def test_din_bi_validates():
    d = _axiom_step()
    assert din_bi(dout_bi(d)) == d
    assert validate_bi(d)


def test_din_bi_rejects_forged_family():
    d = _axiom_step()
    node = dout_bi(d)
    forged = BiDerivation(node.sig, 1, node)
    verdict = validate_bi(forged)
    assert verdict  # root node itself is fine...
    from alacarte.mutual import BiDNode

    bad = BiDNode(node.sig, 1, node.rule, node.params, node.premises, node.conclusion)
    with pytest.raises(InvalidDerivationError, match="family"):
        din_bi(bad)


def test_biterm_json_has_component_discriminator():
    js = biterm_to_json(scope(env_(EMPTY_ENV), vr("x")))
    assert js["component"] == 2
    assert js["rec1"][0]["component"] == 1
