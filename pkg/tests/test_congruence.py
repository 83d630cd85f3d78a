from __future__ import annotations

import itertools

import numpy as np
import pytest

from scripts.congruence.carrier import CarrierAlgebra, CarrierError
from scripts.congruence.generation import (
    all_congruences,
    congruence_join,
    generated_congruence,
    is_compatible,
    kernel_of_projection,
    sample_congruences,
)
from scripts.congruence.partition import Partition, UnionFind, block_profile, restrict
from scripts.kernel.closure import ResourceLimitError, sg_power


def _carrier(alg, k, generators) -> CarrierAlgebra:
    return CarrierAlgebra.from_closure(sg_power(alg, k, generators))


def _all_partitions(elements):
    """Every set partition of ``elements`` (small inputs only)."""
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for partial in _all_partitions(rest):
        yield [[first]] + partial
        for i in range(len(partial)):
            yield partial[:i] + [[first] + partial[i]] + partial[i + 1:]


# -----------------------------------------------------------------------------
# PARTITIONS
# -----------------------------------------------------------------------------

def test_union_find_counts_classes():
    uf = UnionFind(4)
    assert uf.union(0, 1)
    assert not uf.union(1, 0)
    assert uf.union(2, 3)
    assert uf.classes == 2


def test_partition_is_canonical():
    p = Partition.from_blocks([[3, 1], [2], [0]])
    q = Partition.from_labels([0, 1, 2, 3], ["a", "b", "c", "b"])
    assert p == q
    assert p.blocks == ((0,), (1, 3), (2,))
    assert p.related(1, 3) and not p.related(0, 1)
    assert p.index == 3


def test_partition_must_cover_its_elements():
    with pytest.raises(ValueError):
        Partition(elements=(0, 1, 2), blocks=((0, 1),))


def test_restrict_and_profile():
    full = Partition.full(range(4))
    identity = Partition.identity(range(4))

    assert restrict(identity, [1, 2]) == Partition.identity([1, 2])
    assert restrict(full, [1, 2]) == Partition.full([1, 2])
    assert block_profile(identity, 1) == (0, [])
    assert block_profile(full, 1) == (1, [(0, 1, 2, 3)])
    assert identity.refines(full) and not full.refines(identity)


# -----------------------------------------------------------------------------
# CARRIERS
# -----------------------------------------------------------------------------

def test_carrier_orders_elements_by_code(semilattice):
    carrier = _carrier(semilattice, 2, [(0, 1), (1, 0)])
    assert carrier.size == 3
    assert [tuple(r) for r in carrier.rows.tolist()] == [(0, 0), (0, 1), (1, 0)]
    assert carrier.index_of([1, 0]) == 2
    assert [0, 1] in carrier and [1, 1] not in carrier


def test_carrier_must_be_closed(semilattice):
    with pytest.raises(CarrierError):
        CarrierAlgebra(semilattice, np.array([[0, 1], [1, 0]]))


def test_carrier_needs_a_complete_closure(semilattice):
    early = sg_power(semilattice, 2, [(0, 1), (1, 0)], targets=[0])
    with pytest.raises(CarrierError):
        CarrierAlgebra.from_closure(early)


def test_operation_tables_resolve_to_indices(chain3):
    carrier = _carrier(chain3, 1, [(0,), (1,), (2,)])
    table = carrier.table(0)
    assert table.tolist() == [[0, 0, 0], [0, 1, 1], [0, 1, 2]]
    assert carrier.translation_images(0, 1, 1).tolist() == [0, 1, 1]


# -----------------------------------------------------------------------------
# CONGRUENCES
# -----------------------------------------------------------------------------

def test_chain_congruence_generation(chain3):
    carrier = _carrier(chain3, 1, [(0,), (1,), (2,)])
    assert generated_congruence(carrier, [(1, 2)]).to_list() == [[0], [1, 2]]
    assert generated_congruence(carrier, []) == Partition.identity(range(3))


def test_two_element_congruence(semilattice):
    carrier = _carrier(semilattice, 1, [(0,), (1,)])
    assert generated_congruence(carrier, [(0, 1)]) == Partition.full(range(2))


def test_pairs_must_reference_elements(semilattice):
    carrier = _carrier(semilattice, 1, [(0,), (1,)])
    with pytest.raises(ValueError):
        generated_congruence(carrier, [(0, 5)])


def test_kernel_of_projection(z2):
    carrier = _carrier(z2, 2, [(0, 0), (0, 1), (1, 0)])
    kernel = kernel_of_projection(carrier, 0)
    assert kernel.to_list() == [[0, 1], [2, 3]]
    assert is_compatible(carrier, kernel)


def test_all_congruences_examples(semilattice, chain3, trivial, z2):
    assert all_congruences(_carrier(semilattice, 1, [(0,), (1,)])) == [
        Partition.identity(range(2)),
        Partition.full(range(2)),
    ]

    chain = all_congruences(_carrier(chain3, 1, [(0,), (1,), (2,)]))
    assert [p.to_list() for p in chain] == [[[0], [1], [2]], [[0], [1, 2]], [[0, 1], [2]], [[0, 1, 2]]]

    assert all_congruences(_carrier(trivial, 1, [(0,)])) == [Partition.identity([0])]

    # congruences of Z2 x Z2 correspond to its five subgroups
    assert len(all_congruences(_carrier(z2, 2, [(0, 0), (0, 1), (1, 0)]))) == 5


def test_all_congruences_caps(chain3):
    carrier = _carrier(chain3, 1, [(0,), (1,), (2,)])
    with pytest.raises(ResourceLimitError):
        all_congruences(carrier, cap=2)
    with pytest.raises(ResourceLimitError):
        all_congruences(carrier, max_congruences=2)


def test_generated_congruences_are_least_compatible(chain3):
    """Brute force: the intersection of all compatible partitions above the pair."""
    carrier = _carrier(chain3, 2, [(2, 0), (0, 2), (1, 2), (2, 1)])
    assert carrier.size <= 9

    candidates = (Partition.from_blocks(blocks) for blocks in _all_partitions(list(range(carrier.size))))
    compatible = [p for p in candidates if is_compatible(carrier, p)]
    for x, y in itertools.combinations(range(carrier.size), 2):
        generated = generated_congruence(carrier, [(x, y)])
        assert is_compatible(carrier, generated)
        above = [p for p in compatible if p.related(x, y)]
        assert all(generated.refines(p) for p in above)
        assert generated in above


def test_sampled_congruences_are_reproducible(chain3):
    carrier = _carrier(chain3, 2, [(2, 0), (0, 2), (1, 2)])
    first = sample_congruences(carrier, 10, np.random.default_rng(3))
    second = sample_congruences(carrier, 10, np.random.default_rng(3))
    assert first == second
    assert all(is_compatible(carrier, p) for p in first)


def test_congruence_blocks_survive_relabelling(chain3):
    carrier = _carrier(chain3, 1, [(0,), (1,), (2,)])
    theta = generated_congruence(carrier, [(1, 2)])
    relabel = {0: 2, 1: 0, 2: 1}
    moved = Partition.from_blocks([[relabel[e] for e in block] for block in theta.blocks])
    assert block_profile(restrict(moved, [0, 1]), 1)[0] == block_profile(restrict(theta, [1, 2]), 1)[0]


def test_join_matches_regeneration(chain3):
    carrier = _carrier(chain3, 2, [(2, 0), (0, 2), (1, 2), (2, 1)])
    principal = [generated_congruence(carrier, [pair]) for pair in itertools.combinations(range(carrier.size), 2)]
    for p, q in itertools.combinations(principal[:12], 2):
        joined = congruence_join(carrier, p, q)
        assert joined == generated_congruence(carrier, p.spanning_pairs() + q.spanning_pairs())
        assert is_compatible(carrier, joined)
