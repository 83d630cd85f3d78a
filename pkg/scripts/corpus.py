"""
Bundled example algebras.

These six algebras are the fixed corpus used by the tests, the
``examples --emit`` command and the acceptance runs:

    semilattice      2-element meet semilattice ({0,1}, min)
    z2_maltsev       {0,1} with m(x,y,z) = x + y + z mod 2
    majority         {0,1} with the majority operation
    chain3_meet      3-element chain ({0,1,2}, min)
    meet_const1      {0,1} with min and the constant 1 (not idempotent)
    guarded_meet     {0,1} with p(x,y,z) = x ∧ (y ∨ ¬z): a blocker and an omit-{1,5}
                     chain, so inherently non-dualizable
"""

from __future__ import annotations

import itertools
from pathlib import Path

from scripts.kernel.algebra import FiniteAlgebra, dump_algebra, make_algebra


def _table(size: int, arity: int, rule) -> list[int]:
    return [rule(*args) for args in itertools.product(range(size), repeat=arity)]


def semilattice() -> FiniteAlgebra:
    return make_algebra(2, [("meet", 2, _table(2, 2, min))], name="semilattice")


def z2_maltsev() -> FiniteAlgebra:
    return make_algebra(2, [("m", 3, _table(2, 3, lambda x, y, z: x ^ y ^ z))], name="z2_maltsev")


def majority() -> FiniteAlgebra:
    return make_algebra(
        2,
        [("maj", 3, _table(2, 3, lambda x, y, z: (x & y) | (y & z) | (x & z)))],
        name="majority",
    )


def chain3_meet() -> FiniteAlgebra:
    return make_algebra(3, [("meet", 2, _table(3, 2, min))], name="chain3_meet")


def meet_const1() -> FiniteAlgebra:
    return make_algebra(
        2,
        [("meet", 2, _table(2, 2, min)), ("one", 0, [1])],
        name="meet_const1",
    )


def guarded_meet() -> FiniteAlgebra:
    return make_algebra(
        2,
        [("p", 3, _table(2, 3, lambda x, y, z: x & (y | (1 - z))))],
        name="guarded_meet",
    )


BUNDLED = {
    "semilattice": semilattice,
    "z2_maltsev": z2_maltsev,
    "majority": majority,
    "chain3_meet": chain3_meet,
    "meet_const1": meet_const1,
    "guarded_meet": guarded_meet,
}


def bundled_algebras() -> dict[str, FiniteAlgebra]:
    return {name: build() for name, build in BUNDLED.items()}


def emit_corpus(out_dir: str | Path) -> list[Path]:
    """
    Write every bundled algebra as ``<name>.json``.  Output is byte-stable.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    written = []
    for name, alg in bundled_algebras().items():
        path = out_dir / f"{name}.json"
        path.write_text(dump_algebra(alg), encoding="utf-8")
        written.append(path)
    return written
