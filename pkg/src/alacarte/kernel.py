"""Signature functors, coproducts, fixpoints, and folds.

A :class:`Signature` is one layer of a recursive grammar: named constructors
whose slots are either recursive positions or payloads drawn from a closed
registry of payload kinds.  :class:`Term` is the recursive closure of a
signature, a materialized immutable tree with an ``in_``/``out_`` bijection.

Two algebra styles interpret terms:

- a conventional algebra is any callable ``Node[C] -> C``, run by ``fold_c``;
- a Mendler algebra is a callable ``(rec, Node[Handle]) -> C`` that receives
  recursive positions as opaque handles usable only through ``rec``, run by
  ``mfold``.  ``lift`` turns a conventional algebra into the canonical
  Mendler one, and ``mfold(lift(alg), t) == fold_c(alg, t)``.

Handles are branded with a per-fold nonce; consuming a handle under a
different fold (or inspecting it at all) is a contract violation and fails
fast.  A second, fold-carrying term representation (:class:`FoldTerm`, a term
is whatever can run any Mendler algebra) lives behind the same in/out/fold
interface with ``reflect``/``reify`` conversions.

All values are immutable after construction and all operations are pure, so
everything here is safe for concurrent use without synchronization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Optional


class MalformedNodeError(Exception):
    pass


class ForeignHandleError(Exception):
    pass


class UnsupportedCarrierError(Exception):
    pass


# ---------------------------------------------------------------------------
# payload registry
#
# Payload slot kinds form a closed registry so signatures stay serializable
# and enumerable.  Other modules register their own kinds at import time.

REC = "rec"


@dataclass(frozen=True)
class PayloadKind:
    name: str
    check: Callable[[Any], bool]
    encode: Callable[[Any], Any]
    decode: Callable[[Any], Any]


_PAYLOAD_KINDS: dict[str, PayloadKind] = {}


def register_payload_kind(name, check, encode=None, decode=None):
    if name == REC:
        raise ValueError("'rec' is reserved for recursive slots")
    ident = lambda v: v
    _PAYLOAD_KINDS[name] = PayloadKind(name, check, encode or ident, decode or ident)


def payload_kind(name: str) -> PayloadKind:
    return _PAYLOAD_KINDS[name]


register_payload_kind("int", lambda v: isinstance(v, int) and not isinstance(v, bool))
register_payload_kind("id", lambda v: isinstance(v, str) and v != "")
register_payload_kind("tid", lambda v: isinstance(v, str) and v != "")


# ---------------------------------------------------------------------------
# signatures, nodes, terms


class Signature:
    """A one-layer grammar shape: constructor name -> tuple of slot kinds.

    Slot kinds are ``"rec"`` or a registered payload kind.  Signatures
    compare by identity; all nodes of a term share one signature object.
    """

    def __init__(self, name: str, ctors: Mapping[str, Iterable[str]]):
        self.name = name
        self.ctors: dict[str, tuple[str, ...]] = {}
        for ctor, kinds in ctors.items():
            kinds = tuple(kinds)
            for k in kinds:
                if k != REC and k not in _PAYLOAD_KINDS:
                    raise ValueError(f"unknown slot kind {k!r} in {name}.{ctor}")
            if ctor in self.ctors:
                raise ValueError(f"duplicate constructor {ctor!r} in {name}")
            self.ctors[ctor] = kinds

    def node(self, ctor: str, slots: Iterable[Any] = ()) -> "Node":
        """Build a node, validating slot counts and payload kinds.

        ``slots`` are given in declaration order; recursive and payload
        slots are split out according to the constructor's arity.
        """
        kinds = self.ctors.get(ctor)
        if kinds is None:
            raise MalformedNodeError(f"{self.name} has no constructor {ctor!r}")
        slots = tuple(slots)
        if len(slots) != len(kinds):
            raise MalformedNodeError(
                f"{self.name}.{ctor} expects {len(kinds)} slots, got {len(slots)}"
            )
        rec, payload = [], []
        for kind, value in zip(kinds, slots):
            if kind == REC:
                rec.append(value)
            else:
                if not _PAYLOAD_KINDS[kind].check(value):
                    raise MalformedNodeError(
                        f"{self.name}.{ctor}: {value!r} is not a valid {kind!r} payload"
                    )
                payload.append(value)
        return Node(self, ctor, tuple(rec), tuple(payload))

    def slots_of(self, node: "Node") -> tuple[Any, ...]:
        """The node's slots back in declaration order."""
        rec, payload = iter(node.rec), iter(node.payload)
        return tuple(
            next(rec) if k == REC else next(payload) for k in self.ctors[node.ctor]
        )

    def __repr__(self):
        return f"<Signature {self.name}>"


@dataclass(frozen=True, slots=True)
class Node:
    """One constructor application over an arbitrary carrier.

    ``rec`` holds the values sitting in recursive slots, ``payload`` the
    payload values, each in declaration order.
    """

    sig: Signature
    ctor: str
    rec: tuple
    payload: tuple


@dataclass(frozen=True, slots=True)
class Term:
    """The recursive closure of a signature: a finite immutable tree."""

    sig: Signature
    root: Node


def fmap(f: Callable[[Any], Any], n: Node) -> Node:
    """Apply ``f`` to every recursive slot; constructor and payloads unchanged."""
    return Node(n.sig, n.ctor, tuple(f(x) for x in n.rec), n.payload)


def in_(n: Node) -> Term:
    """Wrap a node whose recursive slots are terms; inverse of ``out_``."""
    for child in n.rec:
        if not isinstance(child, Term) or child.sig is not n.sig:
            raise MalformedNodeError(
                f"{n.sig.name}.{n.ctor}: recursive slot {child!r} is not a term "
                f"of this signature"
            )
    return Term(n.sig, n)


def out_(t: Term) -> Node:
    return t.root


def fold_c(alg: Callable[[Node], Any], t: Term):
    """Conventional fold: ``fold_c(alg, in_(n)) == alg(fmap(fold_c(alg, .), n))``."""
    return alg(fmap(lambda c: fold_c(alg, c), out_(t)))


# ---------------------------------------------------------------------------
# Mendler algebras


class Handle:
    """An opaque recursive position.

    Exposes no observers; the only legal consumption is passing it to the
    ``rec`` procedure supplied to the same fold invocation.
    """

    __slots__ = ("_value", "_brand")

    def __init__(self, value, brand):
        self._value = value
        self._brand = brand


def step_once(malg, node: Node, recurse):
    """Run one Mendler step on ``node`` with freshly branded handles.

    ``recurse`` is invoked on the value a handle wraps; ``mfold`` is the
    knot-tied instance.  Exposed so the Mendler computation rule is directly
    checkable: ``mfold(m, in_(n)) == step_once(m, n, lambda s: mfold(m, s))``.
    """
    brand = object()
    wrapped = Node(node.sig, node.ctor, tuple(Handle(v, brand) for v in node.rec), node.payload)

    def rec(h):
        if not isinstance(h, Handle) or h._brand is not brand:
            raise ForeignHandleError("handle consumed outside the fold that issued it")
        return recurse(h._value)

    return malg(rec, wrapped)


def mfold(malg, t: Term):
    """Mendler fold: the step sees subterms only as handles."""
    return step_once(malg, out_(t), lambda s: mfold(malg, s))


def lift(alg):
    """The canonical Mendler algebra of a conventional one.

    ``mfold(lift(alg), t) == fold_c(alg, t)`` for every term.
    """
    return lambda rec, node: alg(fmap(rec, node))


def pre_in(m: Callable[[Any], Term], n: Node) -> Term:
    """``in_`` precomposed with mapping carrier values to terms."""
    return in_(fmap(m, n))


@dataclass(frozen=True)
class UniquenessVerdict:
    ok: bool
    kind: str  # "ok" | "hypothesis-violation" | "uniqueness-violation"
    witness: Any = None

    def __bool__(self):
        return self.ok


def check_uniqueness(malg, h, samples) -> UniquenessVerdict:
    """Sample-level rendering of fold uniqueness.

    First verifies the hypothesis ``h(in_(n)) == step(h, n)`` at each
    sample's root; a failure there is a hypothesis violation, not a
    uniqueness violation.  Then checks ``h == mfold(malg, .)`` on the
    samples.  Carriers must support structural equality.
    """
    samples = list(samples)
    first = True
    for t in samples:
        got = h(t)
        if first:
            if type(got).__eq__ is object.__eq__:
                raise UnsupportedCarrierError(
                    f"carrier {type(got).__name__} has no structural equality"
                )
            first = False
        node = out_(t)
        lhs = h(in_(node))
        rhs = step_once(malg, node, h)
        if lhs != rhs:
            return UniquenessVerdict(False, "hypothesis-violation", (t, lhs, rhs))
    for t in samples:
        if h(t) != mfold(malg, t):
            return UniquenessVerdict(False, "uniqueness-violation", t)
    return UniquenessVerdict(True, "ok")


# ---------------------------------------------------------------------------
# coproducts

_LEFT = "inl:"
_RIGHT = "inr:"


class CoproductSignature(Signature):
    """Tagged union of two signatures' constructor sets.

    Constructors keep their slot structure and are tagged with the summand
    they came from, so injections are injective and disjoint even when the
    summands share constructor names.
    """

    def __init__(self, left: Signature, right: Signature):
        ctors = {}
        for name, kinds in left.ctors.items():
            ctors[_LEFT + name] = kinds
        for name, kinds in right.ctors.items():
            ctors[_RIGHT + name] = kinds
        super().__init__(f"({left.name}+{right.name})", ctors)
        self.left = left
        self.right = right


def coproduct(left: Signature, right: Signature) -> CoproductSignature:
    return CoproductSignature(left, right)


def inject_left(csig: CoproductSignature, n: Node) -> Node:
    if n.sig is not csig.left:
        raise MalformedNodeError(f"{n.ctor!r} does not belong to the left summand")
    return Node(csig, _LEFT + n.ctor, n.rec, n.payload)


def inject_right(csig: CoproductSignature, n: Node) -> Node:
    if n.sig is not csig.right:
        raise MalformedNodeError(f"{n.ctor!r} does not belong to the right summand")
    return Node(csig, _RIGHT + n.ctor, n.rec, n.payload)


def project_left(csig: CoproductSignature, n: Node) -> Optional[Node]:
    if n.sig is csig and n.ctor.startswith(_LEFT):
        return Node(csig.left, n.ctor[len(_LEFT):], n.rec, n.payload)
    return None


def project_right(csig: CoproductSignature, n: Node) -> Optional[Node]:
    if n.sig is csig and n.ctor.startswith(_RIGHT):
        return Node(csig.right, n.ctor[len(_RIGHT):], n.rec, n.payload)
    return None


def project(csig: CoproductSignature, n: Node) -> tuple[str, Node]:
    """Total projection: every coproduct node is a left or a right node."""
    inner = project_left(csig, n)
    if inner is not None:
        return ("left", inner)
    inner = project_right(csig, n)
    if inner is not None:
        return ("right", inner)
    raise MalformedNodeError(f"{n.ctor!r} is not a coproduct node of {csig.name}")


# ---------------------------------------------------------------------------
# fold-carrying representation
#
# A term as "whatever can run any Mendler algebra".  Isomorphic to the tree
# representation via reflect/reify; the in/out/fold interface is replayed on
# top of `run`.


class FoldTerm:
    __slots__ = ("_run",)

    def __init__(self, run):
        self._run = run

    def run(self, malg):
        return self._run(malg)


def reflect(t: Term) -> FoldTerm:
    return FoldTerm(lambda malg: mfold(malg, t))


def reify(ft: FoldTerm) -> Term:
    return ft.run(lambda rec, node: in_(fmap(rec, node)))


def ft_fold(malg, ft: FoldTerm):
    return ft.run(malg)


def ft_in(n: Node) -> FoldTerm:
    """Wrap a node whose recursive slots are fold-carrying terms."""
    for child in n.rec:
        if not isinstance(child, FoldTerm):
            raise MalformedNodeError(f"{n.ctor}: recursive slot is not a FoldTerm")
    return FoldTerm(lambda malg: step_once(malg, n, lambda ft: ft.run(malg)))


def ft_out(ft: FoldTerm) -> Node:
    """One-layer unfolding; children are re-wrapped fold-carrying terms."""
    return ft.run(lambda rec, node: fmap(lambda h: ft_in(rec(h)), node))


# ---------------------------------------------------------------------------
# canonical JSON


def term_to_json(t: Term) -> dict:
    return _node_to_json(t.root)


def _node_to_json(n: Node) -> dict:
    kinds = [k for k in n.sig.ctors[n.ctor] if k != REC]
    return {
        "ctor": n.ctor,
        "rec": [_node_to_json(c.root) for c in n.rec],
        "payload": [payload_kind(k).encode(v) for k, v in zip(kinds, n.payload)],
    }


def term_from_json(sig: Signature, obj: dict) -> Term:
    kinds = sig.ctors.get(obj["ctor"])
    if kinds is None:
        raise MalformedNodeError(f"{sig.name} has no constructor {obj['ctor']!r}")
    rec = iter(term_from_json(sig, c) for c in obj["rec"])
    payload = iter(obj["payload"])
    slots = [
        next(rec) if k == REC else payload_kind(k).decode(next(payload)) for k in kinds
    ]
    return in_(sig.node(obj["ctor"], slots))


def signature_to_json(sig: Signature) -> dict:
    return {
        "signature": sig.name,
        "constructors": [
            {"name": name, "slots": list(kinds)} for name, kinds in sig.ctors.items()
        ],
    }
