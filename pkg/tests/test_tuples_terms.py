from __future__ import annotations

import numpy as np
import pytest

from scripts.kernel.terms import Apply, Var, check_term, evaluate_term, parse_term, render_term, substitute, term_arity
from scripts.kernel.tuples import TupleSet, decode_tuple, encode_rows, encode_tuple


def test_codes_are_radix_with_leftmost_most_significant():
    assert encode_tuple((1, 0, 2), 3) == 1 * 9 + 0 * 3 + 2
    assert decode_tuple(11, 3, 3) == (1, 0, 2)
    assert encode_rows(np.array([[1, 0, 2], [0, 0, 1]]), 3).tolist() == [11, 1]


@pytest.mark.parametrize("dense_cap", [1 << 20, 1])
def test_tuple_set_modes_agree(dense_cap):
    members = TupleSet(2, 3, dense_cap=dense_cap)
    fresh = members.add_codes([5, 1, 5, 7])

    assert fresh.tolist() == [0, 1, 3]
    assert len(members) == 3
    assert members.codes() == [1, 5, 7]
    assert 5 in members and 4 not in members and -1 not in members and 99 not in members
    assert members.tuples() == [(0, 0, 1), (1, 0, 1), (1, 1, 1)]


def test_tuple_set_rejects_out_of_range_codes():
    with pytest.raises(ValueError):
        TupleSet(2, 2).add_codes([4])


def test_tuple_set_subset_and_equality():
    small = TupleSet.from_tuples(2, 2, [(0, 1)])
    big = TupleSet.from_tuples(2, 2, [(0, 1), (1, 1)])
    assert small.issubset(big)
    assert not big.issubset(small)
    assert TupleSet.from_codes(2, 2, [3, 1]) == big


def test_render_and_parse(semilattice):
    term = Apply("meet", (Var(1), Apply("meet", (Var(0), Var(2)))))
    text = render_term(term)

    assert text == "meet(x2,meet(x1,x3))"
    assert parse_term(text) == term
    assert parse_term("meet(y, x)", ["x", "y"]) == Apply("meet", (Var(1), Var(0)))
    assert term_arity(term) == 3
    check_term(semilattice, term)


def test_constants_render_with_parentheses():
    term = Apply("one", ())
    assert render_term(term) == "one()"
    assert parse_term("one()") == term


@pytest.mark.parametrize("text", ["meet(x1,", "meet(x1 x2)", "x0", "y", "meet(x1,x2))"])
def test_parse_rejects_malformed_terms(text):
    with pytest.raises(ValueError):
        parse_term(text)


def test_check_term_rejects_wrong_arity(semilattice):
    with pytest.raises(ValueError, match="arity 2"):
        check_term(semilattice, Apply("meet", (Var(0),)))


def test_evaluate_is_coordinatewise(z2):
    m = parse_term("m(x1,x2,x3)")
    value = evaluate_term(z2, m, [np.array([1, 1]), np.array([1, 0]), np.array([0, 1])])
    assert value.tolist() == [0, 0]
    assert evaluate_term(z2, m, [1, 0, 0]).shape == ()


def test_evaluate_constant_broadcasts(meet_const1):
    value = evaluate_term(meet_const1, parse_term("meet(x1,one())"), [np.array([0, 1, 1])])
    assert value.tolist() == [0, 1, 1]


def test_substitute():
    term = parse_term("meet(x1,x2)")
    swapped = substitute(term, [Var(1), Var(0)])
    assert render_term(swapped) == "meet(x2,x1)"
