from __future__ import annotations

import numpy as np
import pytest

from scripts.kernel.closure import Limits
from scripts.kernel.terms import Var, parse_term
from scripts.maltsev.free import ABSENT, FOUND, INCONCLUSIVE, all_assignments, free_restriction_closure, verify_term_identities
from scripts.maltsev.omit15 import (
    CHAIN_VARIABLES,
    Omit15Chain,
    chain_points,
    find_omit15_chain,
    verify_omit15_chain,
)
from scripts.maltsev.sections import QUOTIENT, SUBALGEBRA, decide_omit15, proper_sections
from scripts.maltsev.wnu import find_wnu, verify_wnu, wnu_points


def test_semilattice_free_restriction(semilattice):
    free = free_restriction_closure(semilattice, 2, all_assignments(2, 2))
    vectors = sorted(tuple(int(v) for v in row) for row in free.rows)
    assert vectors == [(0, 0, 0, 1), (0, 0, 1, 1), (0, 1, 0, 1)]


def test_z2_free_restriction_has_four_ternary_operations(z2):
    free = free_restriction_closure(z2, 3, all_assignments(2, 3))
    assert len(free) == 4


def test_diagonal_schema_collapses_projections(majority):
    free = free_restriction_closure(majority, 3, [(0, 0, 0), (1, 1, 1)])
    assert len(free) == 1


def test_schema_values_must_be_elements(semilattice):
    with pytest.raises(ValueError):
        free_restriction_closure(semilattice, 2, [(0, 2)])


def test_evaluation_vector_lines_up_with_points(semilattice):
    free = free_restriction_closure(semilattice, 2, all_assignments(2, 2))
    vector = free.vector(free.projection_index(1))
    assert vector.values == tuple(p[1] for p in vector.points)


def test_identity_oracle(semilattice, z2):
    assignments = all_assignments(2, 2)
    assert verify_term_identities(semilattice, parse_term("meet(x1,x2)"), parse_term("meet(x2,x1)"), assignments)
    assert not verify_term_identities(semilattice, parse_term("x1"), parse_term("x2"), assignments)
    assert verify_term_identities(z2, parse_term("m(x1,x2,x2)"), parse_term("x1"), assignments)


# -----------------------------------------------------------------------------
# WNU
# -----------------------------------------------------------------------------

def test_wnu_schema_shape():
    points = wnu_points(2, 3)
    # two ordered pairs x != y, three positions each, then two diagonals
    assert points.shape == (8, 3)
    assert points[0].tolist() == [1, 0, 0]
    assert points[-1].tolist() == [1, 1, 1]


def test_semilattice_binary_wnu(semilattice):
    result = find_wnu(semilattice, 2)
    assert result.status == FOUND
    assert verify_wnu(semilattice, result.term, 2)
    assert verify_term_identities(semilattice, result.term, parse_term("meet(x1,x2)"), all_assignments(2, 2))


def test_z2_wnu_arities(z2):
    assert find_wnu(z2, 2).status == ABSENT
    result = find_wnu(z2, 3)
    assert result.status == FOUND
    assert verify_term_identities(z2, result.term, parse_term("m(x1,x2,x3)"), all_assignments(2, 3))


def test_majority_has_ternary_wnu(majority):
    assert find_wnu(majority, 2).status == ABSENT
    assert find_wnu(majority, 3).status == FOUND


def test_wnu_skips_constants(meet_const1):
    result = find_wnu(meet_const1, 2)
    assert result.status == FOUND
    assert verify_wnu(meet_const1, result.term, 2)


def test_wnu_needs_arity_two(semilattice):
    with pytest.raises(ValueError):
        find_wnu(semilattice, 1)


def test_wnu_budget_is_inconclusive(chain3):
    result = find_wnu(chain3, 3, limits=Limits(max_closure=2))
    assert result.status == INCONCLUSIVE
    assert result.notes


def test_projection_is_not_a_wnu(z2):
    assert not verify_wnu(z2, parse_term("x1"), 3)


# -----------------------------------------------------------------------------
# OMIT-{1,5} CHAIN
# -----------------------------------------------------------------------------

def test_z2_chain(z2):
    result = find_omit15_chain(z2)
    assert result.status == FOUND
    assert result.chain.m == 1
    assert verify_omit15_chain(z2, result.chain)
    assert result.to_dict()["terms"][0] == "x"
    assert result.to_dict()["terms"][-1] == "v"


def test_majority_chain(majority):
    result = find_omit15_chain(majority)
    assert result.present
    assert verify_omit15_chain(majority, result.chain)


@pytest.mark.parametrize("name", ["semilattice", "chain3", "meet_const1"])
def test_semilattices_have_no_chain(request, name):
    result = find_omit15_chain(request.getfixturevalue(name))
    assert result.status == ABSENT
    assert result.chain is None


def test_one_element_chain_is_degenerate(trivial):
    result = find_omit15_chain(trivial)
    assert result.status == FOUND
    assert result.chain.m == 0
    assert result.chain.terms == (Var(0), Var(3))


def test_chain_budget_is_inconclusive(z2):
    result = find_omit15_chain(z2, limits=Limits(max_closure=3))
    assert result.status == INCONCLUSIVE


def test_documented_z2_chain_verifies(z2):
    terms = tuple(parse_term(t, CHAIN_VARIABLES) for t in ("x", "m(x,y,u)", "v", "v"))
    assert verify_omit15_chain(z2, Omit15Chain(m=1, terms=terms))


def test_broken_chain_is_rejected(z2):
    terms = tuple(parse_term(t, CHAIN_VARIABLES) for t in ("x", "y", "v", "v"))
    assert not verify_omit15_chain(z2, Omit15Chain(m=1, terms=terms))


@pytest.mark.parametrize("name", ["semilattice", "z2", "majority", "chain3"])
def test_larger_schema_does_not_change_outcomes(request, name):
    alg = request.getfixturevalue(name)
    extra = all_assignments(alg.size, 4)[: 2 * alg.size]
    assert find_omit15_chain(alg, extra_points=extra).status == find_omit15_chain(alg).status
    extra_wnu = np.asarray(all_assignments(alg.size, 3)[:3])
    assert find_wnu(alg, 3, extra_points=extra_wnu).status == find_wnu(alg, 3).status


@pytest.mark.parametrize("name", ["semilattice", "z2", "majority", "chain3", "meet_const1"])
def test_chain_implies_some_wnu(request, name):
    alg = request.getfixturevalue(name)
    if find_omit15_chain(alg).present:
        assert any(find_wnu(alg, n).status == FOUND for n in (2, 3, 4))


def test_guarded_meet_chain(guarded_meet):
    result = find_omit15_chain(guarded_meet)
    assert result.status == FOUND
    assert result.chain.m == 1
    assert verify_omit15_chain(guarded_meet, result.chain)


def test_documented_guarded_meet_chain_verifies(guarded_meet):
    terms = tuple(
        parse_term(t, CHAIN_VARIABLES)
        for t in ("x", "p(p(x,y,u),u,y)", "p(p(v,y,v),u,p(v,y,v))", "v")
    )
    assert verify_omit15_chain(guarded_meet, Omit15Chain(m=1, terms=terms))


def test_chain_found_before_the_cap(z2):
    # the first round already holds m(x,y,u); the cap stops the closure after it
    result = find_omit15_chain(z2, limits=Limits(max_closure=5))
    assert result.status == FOUND
    assert result.chain.m == 1
    assert result.notes[0].startswith("found before the cap")
    assert verify_omit15_chain(z2, result.chain)


@pytest.mark.parametrize("name", ["z2", "majority", "guarded_meet"])
def test_first_found_stops_early(request, name):
    alg = request.getfixturevalue(name)
    early = find_omit15_chain(alg, first_found=True)
    full = find_omit15_chain(alg)
    assert early.status == FOUND
    assert early.closure_size <= full.closure_size
    assert verify_omit15_chain(alg, early.chain)


def test_first_found_still_proves_absence(semilattice):
    assert find_omit15_chain(semilattice, first_found=True).status == ABSENT


# -----------------------------------------------------------------------------
# SECTIONS
# -----------------------------------------------------------------------------

def test_proper_sections_of_chain3(chain3):
    sections = proper_sections(chain3, first=(1, 2))
    assert [(s.kind, s.label) for s in sections] == [
        (SUBALGEBRA, "{1,2}"),
        (SUBALGEBRA, "{0,1}"),
        (SUBALGEBRA, "{0,2}"),
        (QUOTIENT, "0|12"),
        (QUOTIENT, "01|2"),
    ]
    assert all(s.algebra.size == 2 for s in sections)


def test_two_element_algebras_have_no_proper_sections(semilattice, guarded_meet):
    assert proper_sections(semilattice) == []
    assert proper_sections(guarded_meet, first=(0, 1)) == []


def test_absence_decided_on_a_section(chain3):
    result = decide_omit15(chain3, first=(1, 2))
    assert result.status == ABSENT
    assert result.notes == ["no chain on the subalgebra {1,2}"]


@pytest.mark.parametrize("name", ["z2", "majority", "guarded_meet"])
def test_decide_agrees_with_direct_search(request, name):
    alg = request.getfixturevalue(name)
    result = decide_omit15(alg)
    assert result.status == find_omit15_chain(alg).status
    assert verify_omit15_chain(alg, result.chain)


def test_section_screen_skipped_over_the_cap(chain3):
    result = decide_omit15(chain3, subuniverse_bound=2, congruence_cap=2)
    assert result.status == ABSENT
    assert result.notes == []
