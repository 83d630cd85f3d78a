from __future__ import annotations

import itertools

import numpy as np
import pytest

from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.closure import Limits, ResourceLimitError, idempotent_image_closure, sg_power
from scripts.kernel.subuniverses import (
    enumerate_idempotent_subuniverses,
    idempotent_closure_of_set,
    is_idempotent_subuniverse,
)
from scripts.kernel.terms import Var, evaluate_term, render_term
from scripts.kernel.tuples import encode_tuple


def test_semilattice_pair_closure(semilattice):
    closure = sg_power(semilattice, 2, [(0, 1), (1, 0)], record_parents=True)

    assert closure.complete
    assert sorted(closure.members.tuples()) == [(0, 0), (0, 1), (1, 0)]
    assert render_term(closure.term_for(encode_tuple((0, 0), 2))) == "meet(x1,x2)"


def test_generators_are_their_own_witnesses(semilattice):
    closure = sg_power(semilattice, 2, [(0, 1), (1, 0)], record_parents=True)
    assert closure.term_for(encode_tuple((1, 0), 2)) == Var(1)


def test_z2_witness_term(z2):
    generators = [(1, 1), (1, 0), (0, 1)]
    closure = sg_power(z2, 2, generators, record_parents=True)
    term = closure.term_for(encode_tuple((0, 0), 2))

    assert render_term(term) == "m(x1,x2,x3)"


def test_empty_generators_without_constants(semilattice):
    closure = sg_power(semilattice, 2, [])
    assert len(closure) == 0


def test_constants_enter_an_empty_closure(meet_const1):
    closure = sg_power(meet_const1, 2, [])
    assert closure.members.tuples() == [(1, 1)]


def test_idempotent_singleton(z2):
    assert sg_power(z2, 1, [(0,)]).members.tuples() == [(0,)]


def test_term_for_rejects_non_members(semilattice):
    closure = sg_power(semilattice, 2, [(0, 1)], record_parents=True)
    with pytest.raises(KeyError):
        closure.term_for(encode_tuple((0, 0), 2))


def test_term_for_needs_parents(semilattice):
    closure = sg_power(semilattice, 2, [(0, 1)])
    with pytest.raises(ValueError):
        closure.term_for(encode_tuple((0, 1), 2))


def test_targets_stop_expansion_early(chain3):
    full = sg_power(chain3, 2, [(2, 1), (1, 2), (0, 2)])
    early = sg_power(chain3, 2, [(2, 1), (1, 2), (0, 2)], targets=[encode_tuple((1, 1), 3)])

    assert full.complete
    assert not early.complete
    assert encode_tuple((1, 1), 3) in early
    assert len(early) <= len(full)


def test_closure_cap_raises(chain3):
    generators = list(itertools.product(range(3), repeat=2))
    with pytest.raises(ResourceLimitError) as info:
        sg_power(chain3, 2, generators, limits=Limits(max_closure=4))
    assert info.value.limit == 4
    assert info.value.count > 4


def test_work_cap_raises(chain3):
    with pytest.raises(ResourceLimitError, match="work"):
        sg_power(chain3, 2, [(2, 1), (1, 2), (0, 2)], limits=Limits(max_work=5))


def test_sparse_and_dense_modes_agree(z2):
    generators = [(1, 0, 0, 1), (0, 1, 1, 1), (1, 1, 0, 0)]
    dense = sg_power(z2, 4, generators)
    sparse = sg_power(z2, 4, generators, limits=Limits(dense_code_cap=1))
    assert dense.members.codes() == sparse.members.codes()


def test_closure_is_idempotent(chain3):
    first = sg_power(chain3, 2, [(2, 0), (0, 2), (1, 2)])
    again = sg_power(chain3, 2, first.members)
    assert again.members == first.members


def test_closure_is_monotone(majority):
    small = sg_power(majority, 3, [(0, 0, 1), (0, 1, 0)])
    large = sg_power(majority, 3, [(0, 0, 1), (0, 1, 0), (1, 0, 0)])
    assert small.members.issubset(large.members)


def test_image_closure_equals_plain_closure_for_idempotent_algebras(z2):
    rng = np.random.default_rng(7)
    for k in (1, 2, 3):
        generators = rng.integers(0, 2, size=(3, k))
        plain = sg_power(z2, k, generators)
        image = idempotent_image_closure(z2, k, generators)
        assert image.members.codes() == plain.members.codes()


def test_image_closure_filters_constants(meet_const1):
    assert idempotent_image_closure(meet_const1, 1, [(0,)]).members.tuples() == [(0,)]
    assert sg_power(meet_const1, 1, [(0,)]).members.tuples() == [(0,), (1,)]


def test_image_closure_of_the_full_power(meet_const1):
    everything = list(itertools.product(range(2), repeat=2))
    image = idempotent_image_closure(meet_const1, 2, everything)
    assert image.members.tuples() == everything


def test_image_closure_terms_are_idempotent(meet_const1):
    image = idempotent_image_closure(meet_const1, 2, [(0, 1), (1, 1)], record_parents=True)
    target = encode_tuple((0, 1), 2)
    term = image.term_for(target)

    assert evaluate_term(meet_const1, term, [np.array([0, 1]), np.array([1, 1])]).tolist() == [0, 1]
    universe = np.arange(2)
    assert evaluate_term(meet_const1, term, [universe, universe]).tolist() == [0, 1]


def test_subuniverse_examples(semilattice, meet_const1):
    assert is_idempotent_subuniverse(semilattice, [0, 1])
    assert is_idempotent_subuniverse(semilattice, [0])
    assert is_idempotent_subuniverse(meet_const1, [0])
    assert idempotent_closure_of_set(meet_const1, [0]) == (0,)


def test_subuniverse_test_needs_elements(semilattice):
    with pytest.raises(ValueError):
        is_idempotent_subuniverse(semilattice, [])


@pytest.mark.parametrize("name", ["semilattice", "z2"])
def test_two_element_subuniverses(request, name):
    alg: FiniteAlgebra = request.getfixturevalue(name)
    assert enumerate_idempotent_subuniverses(alg) == [(0,), (1,), (0, 1)]


def test_one_element_subuniverses(trivial):
    assert enumerate_idempotent_subuniverses(trivial) == [(0,)]


def test_subuniverse_scan_bound(chain3):
    with pytest.raises(ResourceLimitError):
        enumerate_idempotent_subuniverses(chain3, bound=2)
