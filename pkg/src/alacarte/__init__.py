"""Modular recursive datatypes, Mendler-style folds, and derivation trees.

Subpackages:

- ``kernel``: signature functors, coproducts, fixpoints, conventional and
  Mendler algebras/folds, plus the law-check surface.
- ``indexed``: inductively defined relations as self-validating derivation
  trees with indexed Mendler folds.
- ``mutual``: bi-functor machinery for mutually recursive datatypes and
  mutually defined relations.
- ``arith``: a literals-and-addition language with evaluation, typing and a
  preservation transformer built as an indexed fold.
- ``lang_l``: a small language with patterns, closures and first-class
  environments; small-step semantics, typing and subject reduction.
- ``testkit``: enumerators, generators and independent oracles.
- ``cli``: the command-line front door (the only module doing I/O).

Everything is immutable after construction and safe for concurrent reads.
"""

__version__ = "0.1.0"
