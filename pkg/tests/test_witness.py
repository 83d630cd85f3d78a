from __future__ import annotations

import numpy as np
import pytest

from scripts.congruence.generation import kernel_of_projection
from scripts.congruence.partition import Partition, block_profile, restrict
from scripts.cubeterm.analysis import has_cube_term
from scripts.kernel.terms import Var
from scripts.maltsev.omit15 import Omit15Chain, find_omit15_chain
from scripts.witness.claims import (
    ALTERNATE_INDICES,
    check_unique_large_block,
    claim1_elements,
    claim_congruence,
    replay_claim1,
    replay_claim2,
)
from scripts.witness.instance import (
    MissingBlockerError,
    alpha_vector,
    build_instance,
    check_g_not_in_c,
    recover_g,
    window_restriction,
)
from scripts.witness.records import FAIL, FAIL_OUTSIDE, PASS, SKIPPED, CheckResult, TranscriptStep, WitnessReport


def _instance(alg, window=4):
    return build_instance(alg, has_cube_term(alg), window)


# -----------------------------------------------------------------------------
# CONSTRUCTION
# -----------------------------------------------------------------------------

def test_semilattice_window(semilattice):
    instance = _instance(semilattice)

    assert instance.coordinates == [-1, 0, 1, 2, 3, 4]
    assert (instance.a, instance.b) == (1, 0)
    assert instance.alpha([1]).tolist() == [1, 0, 0, 1, 1, 1]
    assert instance.g.tolist() == [1, 0, 1, 1, 1, 1]
    # every nonempty set of indices gives one meet of generators
    assert instance.carrier.size == 15
    assert instance.summary()["D"] == [0]


def test_chain3_window(chain3):
    instance = _instance(chain3)
    assert instance.coordinates[:3] == [-2, -1, 0]
    assert instance.alpha([2]).tolist() == [2, 1, 0, 1, 0, 1, 1]
    assert instance.g.tolist() == [2, 1, 0, 1, 1, 1, 1]


def test_alpha_vector_with_values():
    row = alpha_vector(2, 4, 1, 0, [1, 3], [0, 1])
    assert row.tolist() == [1, 0, 0, 1, 1, 1]
    with pytest.raises(ValueError):
        alpha_vector(2, 4, 1, 0, [5])
    with pytest.raises(ValueError):
        alpha_vector(2, 4, 1, 0, [1, 2], [0])


def test_position_bounds(semilattice):
    instance = _instance(semilattice)
    assert instance.position(-1) == 0
    assert instance.position(4) == 5
    with pytest.raises(ValueError):
        instance.position(5)


def test_small_window_is_rejected(semilattice):
    with pytest.raises(ValueError):
        build_instance(semilattice, has_cube_term(semilattice), 3)


def test_algebra_without_blocker_has_no_instance(z2):
    with pytest.raises(MissingBlockerError):
        build_instance(z2, has_cube_term(z2), 4)


@pytest.mark.parametrize("name", ["semilattice", "chain3", "meet_const1"])
@pytest.mark.parametrize("window", [4, 5, 6])
def test_g_is_outside_the_carrier(request, name, window):
    instance = _instance(request.getfixturevalue(name), window)
    assert check_g_not_in_c(instance) is False


@pytest.mark.parametrize("name", ["semilattice", "chain3"])
def test_g_is_recovered_from_projection_kernels(request, name):
    instance = _instance(request.getfixturevalue(name))
    result = recover_g(instance)
    assert result.status == PASS
    assert result.data["g"] == instance.g.tolist()


def test_projection_kernel_blocks_on_generators(semilattice):
    instance = _instance(semilattice)
    c0 = instance.c0

    kernel = restrict(kernel_of_projection(instance.carrier, instance.position(2)), c0)
    count, large = block_profile(kernel, 1)
    assert count == 1
    assert large == [tuple(sorted(c0[i] for i in (0, 2, 3)))]
    assert kernel.block_of(c0[1]) == (c0[1],)

    enumeration = restrict(kernel_of_projection(instance.carrier, instance.position(0)), c0)
    assert enumeration.index == 1


def test_window_restriction(semilattice):
    small = _instance(semilattice, 4)
    big = _instance(semilattice, 5)
    result = window_restriction(big, small)
    assert result.status == PASS
    assert result.data["image_size"] == result.data["small_size"] == 15
    with pytest.raises(ValueError):
        window_restriction(small, big)


# -----------------------------------------------------------------------------
# CLAIMS
# -----------------------------------------------------------------------------

def test_claim1_elements(semilattice):
    elements = claim1_elements(_instance(semilattice))
    assert len(elements) == 4 + 16
    assert np.array_equal(elements["α121"], elements["α12"])
    assert elements["α12"].tolist() == [1, 0, 0, 0, 1, 1]
    assert elements["α123"].tolist() == [1, 0, 0, 0, 0, 1]


@pytest.mark.parametrize("name", ["semilattice", "chain3"])
def test_claim1_replay(request, name):
    instance = _instance(request.getfixturevalue(name))
    report = replay_claim1(instance)

    assert report.check("wnu").status == PASS
    assert report.check("single_block").status == PASS
    assert report.check("transcript").status == PASS
    assert len(report.transcript) == 6
    assert all(step.verified for step in report.transcript)
    assert report.ok

    values = report.check("transcript").data
    assert {values["c"], values["d"], values["e"]} <= set(instance.blocker.D)


def test_claim1_with_alternate_indices(semilattice):
    report = replay_claim1(_instance(semilattice), indices=ALTERNATE_INDICES)
    assert report.status == PASS


def test_claim1_skips_without_wnu(semilattice):
    report = replay_claim1(_instance(semilattice), wnu_arities=())
    assert report.status == SKIPPED
    assert report.transcript == []


def test_claim_indices_must_be_a_permutation(semilattice):
    with pytest.raises(ValueError):
        replay_claim1(_instance(semilattice), indices=(1, 2, 3, 3))


def test_claim2_skips_without_chain(semilattice):
    report = replay_claim2(_instance(semilattice), None)
    assert report.status == SKIPPED
    assert report.ok


def test_semilattice_claim_congruence_separates_the_pairs(semilattice):
    """The semilattice lies outside the hypothesis class: two large blocks."""
    instance = _instance(semilattice)
    theta = claim_congruence(instance)
    c0 = instance.c0

    assert theta.related(c0[0], c0[2]) and theta.related(c0[1], c0[3])
    assert not theta.related(c0[0], c0[1])
    assert block_profile(restrict(theta, c0), 1)[0] == 2


def test_claim2_reports_a_broken_replay(semilattice):
    report = replay_claim2(_instance(semilattice), Omit15Chain(m=0, terms=(Var(0), Var(3))))
    assert report.check("alpha1_theta_alpha2").status == FAIL
    assert report.check("transcript").status == FAIL
    assert not report.ok


def test_claim2_passes_on_a_hit(guarded_meet):
    instance = _instance(guarded_meet)
    chain = find_omit15_chain(guarded_meet).chain
    report = replay_claim2(instance, chain)
    assert report.check("chain").status == PASS
    assert report.check("alpha1_theta_alpha2").status == PASS
    assert report.check("transcript").status == PASS
    assert len(report.transcript) == 2 * chain.m + 1
    assert report.status == PASS


def test_claim2_passes_with_alternate_indices(guarded_meet):
    report = replay_claim2(_instance(guarded_meet), find_omit15_chain(guarded_meet).chain, indices=ALTERNATE_INDICES)
    assert report.status == PASS


def test_unique_large_block_on_semilattice(semilattice):
    report = check_unique_large_block(_instance(semilattice), in_hypothesis_class=False)
    assert report.check("projection_kernels").status == PASS
    enumerated = report.check("all_congruences")
    assert enumerated.status == FAIL_OUTSIDE
    assert enumerated.detail == "2 large blocks"
    assert report.status == FAIL_OUTSIDE
    assert report.ok


def test_unique_large_block_samples_over_the_cap(chain3):
    report = check_unique_large_block(_instance(chain3), congruence_cap=4, sample_budget=5, seed=1)
    assert report.check("all_congruences").status == SKIPPED
    assert report.check("sampled_congruences").data["checked"] == 5


def test_unique_large_block_is_deterministic(chain3):
    instance = _instance(chain3)
    first = check_unique_large_block(instance, congruence_cap=4, sample_budget=5, seed=9)
    second = check_unique_large_block(instance, congruence_cap=4, sample_budget=5, seed=9)
    assert first.to_dict(include_volatile=False) == second.to_dict(include_volatile=False)


# -----------------------------------------------------------------------------
# REPORT OBJECTS
# -----------------------------------------------------------------------------

def test_report_status_precedence():
    report = WitnessReport(name="r")
    assert report.status == SKIPPED
    report.add("a", PASS)
    report.add("b", FAIL_OUTSIDE)
    assert report.status == FAIL_OUTSIDE
    assert report.ok
    report.checks.append(CheckResult("c", FAIL))
    assert report.status == FAIL
    assert not report.ok


def test_transcript_render_marks_mismatches():
    step = TranscriptStep(
        label="w(α1,α2)",
        term="w = meet(x1,x2)",
        arguments=[("α1", [0, 1]), ("α2", [1, 0])],
        expected_name="α12",
        expected=[0, 1],
        actual=[0, 0],
    )
    text = step.render([1, 2])
    assert not step.verified
    assert "(expected 1)" in text
    assert text.endswith("NOT VERIFIED")


def test_identity_and_full_partitions_on_generators(semilattice):
    instance = _instance(semilattice)
    identity = Partition.identity(range(instance.carrier.size))
    full = Partition.full(range(instance.carrier.size))
    assert block_profile(restrict(identity, instance.c0), 1)[0] == 0
    assert block_profile(restrict(full, instance.c0), 1)[0] == 1
    assert np.array_equal(instance.carrier.rows[instance.c0[0]], instance.alpha([1]))
