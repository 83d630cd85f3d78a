"""
Shared fixtures: the bundled corpus and small helpers for writing algebra
files into a temporary directory.
"""

from __future__ import annotations

import itertools
from pathlib import Path

import pytest

from scripts import corpus
from scripts.kernel.algebra import FiniteAlgebra, dump_algebra, make_algebra


@pytest.fixture
def semilattice() -> FiniteAlgebra:
    return corpus.semilattice()


@pytest.fixture
def z2() -> FiniteAlgebra:
    return corpus.z2_maltsev()


@pytest.fixture
def majority() -> FiniteAlgebra:
    return corpus.majority()


@pytest.fixture
def chain3() -> FiniteAlgebra:
    return corpus.chain3_meet()


@pytest.fixture
def meet_const1() -> FiniteAlgebra:
    return corpus.meet_const1()


@pytest.fixture
def guarded_meet() -> FiniteAlgebra:
    return corpus.guarded_meet()


@pytest.fixture
def trivial() -> FiniteAlgebra:
    """One element, one binary operation."""
    return make_algebra(1, [("f", 2, [0])], name="trivial")


@pytest.fixture
def z2_const0() -> FiniteAlgebra:
    """Z2 Maltsev operation plus the constant 0: not an idempotent presentation."""
    table = [x ^ y ^ z for x, y, z in itertools.product(range(2), repeat=3)]
    return make_algebra(2, [("m", 3, table), ("zero", 0, [0])], name="z2_const0")


@pytest.fixture
def write_algebra(tmp_path: Path):
    """Write an algebra to ``tmp_path/<name>.json`` and return the path."""

    def write(alg: FiniteAlgebra, directory: Path | None = None) -> Path:
        target = (directory or tmp_path) / f"{alg.name}.json"
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(dump_algebra(alg), encoding="utf-8")
        return target

    return write
