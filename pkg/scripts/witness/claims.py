"""
Congruence replays on the finite window.

Throughout, θ is Cg((α_1, α_3), (α_2, α_4)): the least congruence of C whose
restriction to C_0 puts 1, 3 in one index class and 2, 4 in another.  Any
larger θ inherits every relation derived for it.

``replay_claim1``  the α_mn and α_mnk with m ∈ {1,3}, n ∈ {2,4} share a block,
                   plus a transcript of the term applications that put them
                   there, each re-evaluated on the window.
``replay_claim2``  α_1 θ α_2 from a chain of omit-{1,5} terms.
``check_unique_large_block``  θ restricted to C_0 has at most one block with
                   more than one element, for projection kernels and for all
                   (or sampled) congruences.

``indices`` relabels 1, 2, 3, 4; (2, 1, 4, 3) swaps the roles of the two
index classes.
"""

from __future__ import annotations

import logging
import time
from typing import Optional, Sequence

import numpy as np

from scripts.congruence.generation import (
    DEFAULT_CONGRUENCE_CAP,
    DEFAULT_MAX_CONGRUENCES,
    all_congruences,
    generated_congruence,
    kernel_of_projection,
    sample_congruences,
)
from scripts.congruence.partition import Partition, block_profile, restrict
from scripts.kernel.closure import Limits, ResourceLimitError, idempotent_image_closure
from scripts.kernel.terms import Term, evaluate_term, render_term
from scripts.maltsev.free import FOUND
from scripts.maltsev.omit15 import CHAIN_VARIABLES, Omit15Chain
from scripts.maltsev.wnu import DEFAULT_WNU_ARITIES, find_wnu
from scripts.witness.instance import WitnessInstance
from scripts.witness.records import (
    FAIL,
    FAIL_OUTSIDE,
    PASS,
    SKIPPED,
    CheckResult,
    TranscriptStep,
    WitnessReport,
)

logger = logging.getLogger(__name__)


DEFAULT_INDICES = (1, 2, 3, 4)
ALTERNATE_INDICES = (2, 1, 4, 3)
DEFAULT_SAMPLE_BUDGET = 200


# -----------------------------------------------------------------------------
# HELPERS
# -----------------------------------------------------------------------------

def _name(indices: Sequence[int], letters: str = "") -> str:
    label = "α" + "".join(str(i) for i in indices)
    return f"{label}^{{{letters}}}" if letters else label


def claim_congruence(instance: WitnessInstance, indices: Sequence[int] = DEFAULT_INDICES) -> Partition:
    i1, i2, i3, i4 = indices
    c0 = instance.c0
    return generated_congruence(
        instance.carrier,
        [(c0[i1 - 1], c0[i3 - 1]), (c0[i2 - 1], c0[i4 - 1])],
    )


def _two_variable_term(instance: WitnessInstance, first: int, target: int, limits: Limits) -> Optional[Term]:
    """An idempotent t with t(first, a) = target, or None."""
    alg = instance.algebra
    closure = idempotent_image_closure(
        alg, 1, [(first,), (instance.a,)], limits=limits, record_parents=True, targets=[target]
    )
    if target not in closure:
        return None
    return closure.term_for(target)


def _apply(
    instance: WitnessInstance,
    label: str,
    term: Term,
    term_name: str,
    arguments: list[tuple[str, np.ndarray]],
    expected_name: str,
    expected: np.ndarray,
    values: dict[str, int],
    variables: Optional[Sequence[str]] = None,
) -> tuple[TranscriptStep, np.ndarray]:
    actual = evaluate_term(instance.algebra, term, [v for _, v in arguments])
    step = TranscriptStep(
        label=label,
        term=f"{term_name} = {render_term(term, variables)}",
        arguments=[(n, [int(x) for x in v]) for n, v in arguments],
        expected_name=expected_name,
        expected=[int(x) for x in expected],
        actual=[int(x) for x in actual],
        values=values,
    )
    return step, actual


def _check_indices(instance: WitnessInstance, indices: Sequence[int]) -> None:
    if sorted(indices) != [1, 2, 3, 4]:
        raise ValueError(f"Claim indices must be a permutation of 1..4, got {tuple(indices)}.")
    if instance.window < 4:
        raise ValueError("Claim replay needs a window of at least 4.")


# -----------------------------------------------------------------------------
# FIRST CLAIM
# -----------------------------------------------------------------------------

def claim1_elements(instance: WitnessInstance, indices: Sequence[int] = DEFAULT_INDICES) -> dict[str, np.ndarray]:
    i1, i2, i3, i4 = indices
    out: dict[str, np.ndarray] = {}
    for m in (i1, i3):
        for n in (i2, i4):
            out[_name((m, n))] = instance.alpha([m, n])
    for m in (i1, i3):
        for n in (i2, i4):
            for k in indices:
                positions = sorted({m, n, k})
                out.setdefault(_name((m, n, k)), instance.alpha(positions))
    return out


def replay_claim1(
    instance: WitnessInstance,
    *,
    wnu_arities: Sequence[int] = DEFAULT_WNU_ARITIES,
    indices: Sequence[int] = DEFAULT_INDICES,
    limits: Limits = Limits(),
) -> WitnessReport:
    _check_indices(instance, indices)
    report = WitnessReport(name="claim1")
    started = time.perf_counter()

    w = None
    for arity in wnu_arities:
        result = find_wnu(instance.algebra, arity, limits=limits)
        if result.status == FOUND:
            w = result.term
            wnu_arity = arity
            break
    if w is None:
        report.add("wnu", SKIPPED, f"no WNU term of arity in {list(wnu_arities)}; the algebra may realise type 1")
        return report
    report.add("wnu", PASS, f"arity {wnu_arity}: {render_term(w)}")

    # Semantic layer.
    theta = claim_congruence(instance, indices)
    elements = claim1_elements(instance, indices)
    missing = [name for name, row in elements.items() if not instance.contains(row)]
    if missing:
        report.add("single_block", FAIL, f"not in C: {', '.join(missing)}")
    else:
        blocks = {theta.block_of(instance.element_index(row)) for row in elements.values()}
        if len(blocks) == 1:
            report.add("single_block", PASS, f"{len(elements)} element(s) in one block", block_size=len(next(iter(blocks))))
        else:
            report.add("single_block", FAIL, f"elements spread over {len(blocks)} blocks")
    report.sizes.update({"carrier": instance.carrier.size, "theta_index": theta.index})

    # Transcript layer.
    i1, i2, i3, _ = indices
    a, b = instance.a, instance.b
    D = set(instance.blocker.D)
    alpha = instance.alpha
    rest = wnu_arity - 1

    w_args = [(_name([i1]), alpha([i1]))] + [(_name([i2]), alpha([i2]))] * rest
    probe = evaluate_term(instance.algebra, w, [v for _, v in w_args])
    c = int(probe[instance.position(i1)])
    d = int(probe[instance.position(i2)])
    step, _ = _apply(
        instance, f"w({_name([i1])},{_name([i2])},…,{_name([i2])})", w, "w", w_args,
        _name((i1, i2), "cd"), alpha([i1, i2], [c, d]), {"c": c, "d": d},
    )
    report.transcript.append(step)

    t = _two_variable_term(instance, c, b, limits)
    if t is None:
        report.add("transcript", FAIL, f"no idempotent t with t({c}, {a}) = {b}; {{c, a}} does not generate B")
        return report
    e = int(evaluate_term(instance.algebra, t, [d, b])[()])
    s = _two_variable_term(instance, e, b, limits)
    if s is None:
        report.add("transcript", FAIL, f"no idempotent s with s({e}, {a}) = {b}; {{e, a}} does not generate B")
        return report

    values = {"a": a, "b": b, "c": c, "d": d, "e": e}
    steps = [
        (f"t({_name((i1, i2), 'cd')},{_name([i2])})", t, "t",
         [(_name((i1, i2), "cd"), alpha([i1, i2], [c, d])), (_name([i2]), alpha([i2]))],
         _name((i1, i2), "be"), alpha([i1, i2], [b, e])),
        (f"s({_name((i1, i2), 'be')},{_name([i1])})", s, "s",
         [(_name((i1, i2), "be"), alpha([i1, i2], [b, e])), (_name([i1]), alpha([i1]))],
         _name((i1, i2)), alpha([i1, i2])),
        (f"w({_name((i1, i2))},{_name([i3])},…,{_name([i3])})", w, "w",
         [(_name((i1, i2)), alpha([i1, i2]))] + [(_name([i3]), alpha([i3]))] * rest,
         _name((i1, i2, i3), "ccd"), alpha([i1, i2, i3], [c, c, d])),
        (f"t({_name((i1, i2, i3), 'ccd')},{_name([i3])})", t, "t",
         [(_name((i1, i2, i3), "ccd"), alpha([i1, i2, i3], [c, c, d])), (_name([i3]), alpha([i3]))],
         _name((i1, i2, i3), "bbe"), alpha([i1, i2, i3], [b, b, e])),
        (f"s({_name((i1, i2, i3), 'bbe')},{_name((i1, i2))})", s, "s",
         [(_name((i1, i2, i3), "bbe"), alpha([i1, i2, i3], [b, b, e])), (_name((i1, i2)), alpha([i1, i2]))],
         _name((i1, i2, i3)), alpha([i1, i2, i3])),
    ]
    for label, term, term_name, arguments, expected_name, expected in steps:
        step, _ = _apply(instance, label, term, term_name, arguments, expected_name, expected, values)
        report.transcript.append(step)

    verified = all(step.verified for step in report.transcript)
    in_d = all(v in D for v in (c, d, e))
    if verified and in_d:
        report.add("transcript", PASS, f"{len(report.transcript)} step(s) re-evaluated", **values)
    elif not in_d:
        report.add("transcript", FAIL, "c, d, e are not all in D", **values)
    else:
        report.add("transcript", FAIL, "a displayed equality does not re-evaluate", **values)

    report.timings["claim1"] = time.perf_counter() - started
    return report


# -----------------------------------------------------------------------------
# SECOND CLAIM
# -----------------------------------------------------------------------------

def replay_claim2(
    instance: WitnessInstance,
    chain: Optional[Omit15Chain],
    *,
    indices: Sequence[int] = DEFAULT_INDICES,
) -> WitnessReport:
    _check_indices(instance, indices)
    report = WitnessReport(name="claim2")
    if chain is None:
        report.add("chain", SKIPPED, "no omit-{1,5} chain; outside the hypothesis class")
        return report
    started = time.perf_counter()
    report.add("chain", PASS, f"m = {chain.m}")

    i1, i2, i3, i4 = indices
    theta = claim_congruence(instance, indices)
    x = instance.element_index(instance.alpha([i1]))
    y = instance.element_index(instance.alpha([i2]))
    report.sizes.update({"carrier": instance.carrier.size, "theta_index": theta.index})
    if theta.related(x, y):
        report.add("alpha1_theta_alpha2", PASS, f"{_name([i1])} θ {_name([i2])}")
    else:
        report.add("alpha1_theta_alpha2", FAIL, f"{_name([i1])} and {_name([i2])} are in different blocks")

    alpha = instance.alpha
    even_args = [(_name([i1]), alpha([i1]))] + [(_name((i1, i2)), alpha([i1, i2]))] * 3
    odd_args = [
        (_name([i1]), alpha([i1])),
        (_name((i1, i2)), alpha([i1, i2])),
        (_name((i3, i4)), alpha([i3, i4])),
        (_name((i2, i3, i4)), alpha([i2, i3, i4])),
    ]
    terms = chain.terms
    for i in range(len(terms) - 1):
        arguments = even_args if i % 2 == 0 else odd_args
        args = ",".join(n for n, _ in arguments)
        expected = evaluate_term(instance.algebra, terms[i + 1], [v for _, v in arguments])
        step, _ = _apply(
            instance,
            f"f{i}({args}) = f{i + 1}({args})",
            terms[i],
            f"f{i}",
            arguments,
            f"f{i + 1}(…)",
            expected,
            {},
            CHAIN_VARIABLES,
        )
        report.transcript.append(step)

    if all(step.verified for step in report.transcript):
        report.add("transcript", PASS, f"{len(report.transcript)} step(s) re-evaluated")
    else:
        report.add("transcript", FAIL, "a chain equality does not re-evaluate")
    report.timings["claim2"] = time.perf_counter() - started
    return report


# -----------------------------------------------------------------------------
# UNIQUE LARGE BLOCK
# -----------------------------------------------------------------------------

def _large_blocks(instance: WitnessInstance, theta: Partition) -> list[list[str]]:
    _, large = block_profile(restrict(theta, instance.c0), 1)
    return [[instance.c0_label(e) for e in block] for block in large]


def check_unique_large_block(
    instance: WitnessInstance,
    *,
    sample_budget: int = DEFAULT_SAMPLE_BUDGET,
    congruence_cap: int = DEFAULT_CONGRUENCE_CAP,
    max_congruences: int = DEFAULT_MAX_CONGRUENCES,
    seed: int = 0,
    in_hypothesis_class: Optional[bool] = None,
) -> WitnessReport:
    """
    Check that θ restricted to C_0 has at most one block with more than one
    element.  This samples the theorem's hypothesis; it does not quantify
    over every finite-index congruence of a large carrier.

    ``in_hypothesis_class=False`` marks failures as expected for an algebra
    without an omit-{1,5} chain.
    """
    report = WitnessReport(name="unique_large_block")
    started = time.perf_counter()
    failure = FAIL_OUTSIDE if in_hypothesis_class is False else FAIL

    def layer(name: str, thetas: list[Partition], detail: str) -> CheckResult:
        for theta in thetas:
            large = _large_blocks(instance, theta)
            if len(large) > 1:
                return report.add(name, failure, f"{len(large)} large blocks", blocks=large, checked=len(thetas))
        return report.add(name, PASS, detail, checked=len(thetas))

    kernels = [kernel_of_projection(instance.carrier, z) for z in range(instance.k)]
    layer("projection_kernels", kernels, f"{len(kernels)} kernel(s)")

    carrier = instance.carrier
    if carrier.size <= congruence_cap:
        try:
            congruences = all_congruences(carrier, cap=congruence_cap, max_congruences=max_congruences)
        except ResourceLimitError as exc:
            report.add("all_congruences", SKIPPED, str(exc).splitlines()[0])
            congruences = None
        if congruences is not None:
            layer("all_congruences", congruences, f"{len(congruences)} congruence(s)")
    else:
        report.add("all_congruences", SKIPPED, f"carrier of {carrier.size} exceeds cap {congruence_cap}")

    if carrier.size > congruence_cap or report.check("all_congruences").status == SKIPPED:
        rng = np.random.default_rng(seed)
        sampled = sample_congruences(carrier, sample_budget, rng)
        layer("sampled_congruences", sampled, f"{len(sampled)} sampled congruence(s)")

    report.sizes["carrier"] = carrier.size
    report.timings["unique_large_block"] = time.perf_counter() - started
    return report
