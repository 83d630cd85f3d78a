"""
The finite window of the non-dualizability construction.

Coordinates are J = [-n, 0] ∪ [1, N] in that order, n = |A| - 1, so index j
sits at position j + n.  The universe is enumerated as a_0 = 0, a_-1 = 1,
..., a_-n = n, which puts the values n, n-1, ..., 0 on the enumeration block.

For positive indices i_1, ..., i_r and values y_1, ..., y_r

    α_{i_1..i_r}^{y_1..y_r}(j) = a_j   for j ∈ [-n, 0]
                               = y_k   for j = i_k
                               = a     otherwise

with y_k = b when the values are omitted.  The generators are α_1..α_N,
C is the subpower they generate and g is the all-a vector on [1, N].

g ∉ C over the window
---------------------
Suppose a term t sends α_1..α_N to g.  On the enumeration block every
argument column is constant and every element of A occurs, so t is
idempotent.  On [1, N] the argument columns are the unit columns of
{a, b}^N (b at the diagonal, a elsewhere) and the result is a^N, so t
witnesses a ≺ b.  The blocker rules that out, so ``check_g_not_in_c`` must
return False for a genuine blocker, at every window size.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from scripts.congruence.carrier import CarrierAlgebra
from scripts.congruence.generation import kernel_of_projection
from scripts.congruence.partition import block_profile, restrict
from scripts.cubeterm.analysis import (
    DEFAULT_PROBE_LENGTH,
    BlockerWitness,
    minimal_no_cube_subuniverse,
    pick_blocker_witness,
)
from scripts.cubeterm.records import CubeAnalysis
from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.closure import Limits, sg_power
from scripts.kernel.subuniverses import DEFAULT_SUBUNIVERSE_BOUND
from scripts.kernel.tuples import encode_rows
from scripts.witness.records import FAIL, PASS, CheckResult

logger = logging.getLogger(__name__)


MIN_WINDOW = 4
DEFAULT_WINDOW = 4


class MissingBlockerError(RuntimeError):
    """
    The analysis has no blocker, so there is nothing to build a window from.
    """

    def __init__(self, algebra: str, status: str) -> None:
        super().__init__(
            f"Algebra {algebra!r} has analysis status {status}; the witness window needs a blocker.\n"
            f"Only BlockerCertified and BlockerCandidate analyses can be replayed."
        )
        self.algebra = algebra
        self.status = status


@dataclass
class WitnessInstance:
    algebra: FiniteAlgebra
    blocker: BlockerWitness
    window: int
    generators: np.ndarray
    carrier: CarrierAlgebra
    g: np.ndarray
    c0: tuple[int, ...]
    notes: list[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.algebra.size - 1

    @property
    def a(self) -> int:
        return self.blocker.a

    @property
    def b(self) -> int:
        return self.blocker.b

    @property
    def k(self) -> int:
        return self.n + 1 + self.window

    @property
    def coordinates(self) -> list[int]:
        return list(range(-self.n, self.window + 1))

    def position(self, j: int) -> int:
        if not -self.n <= j <= self.window:
            raise ValueError(f"Index {j} outside the window [-{self.n}, {self.window}].")
        return j + self.n

    def enumeration_block(self) -> np.ndarray:
        return np.arange(self.n, -1, -1, dtype=np.int64)

    def alpha(self, indices: Sequence[int], values: Optional[Sequence[int]] = None) -> np.ndarray:
        return alpha_vector(self.algebra.size, self.window, self.a, self.b, indices, values)

    def contains(self, row: np.ndarray) -> bool:
        return [int(v) for v in row] in self.carrier

    def element_index(self, row: np.ndarray) -> int:
        return self.carrier.index_of([int(v) for v in row])

    def c0_label(self, element: int) -> str:
        return f"α{self.c0.index(element) + 1}"

    def summary(self) -> dict:
        return {
            "window": self.window,
            "coordinates": self.coordinates,
            "D": list(self.blocker.D),
            "B": list(self.blocker.B),
            "a": self.a,
            "b": self.b,
            "carrier_size": self.carrier.size,
            "g": [int(v) for v in self.g],
        }


def alpha_vector(
    size: int,
    window: int,
    a: int,
    b: int,
    indices: Sequence[int],
    values: Optional[Sequence[int]] = None,
) -> np.ndarray:
    n = size - 1
    row = np.concatenate([np.arange(n, -1, -1), np.full(window, a)]).astype(np.int64)
    if values is None:
        values = [b] * len(indices)
    if len(values) != len(indices):
        raise ValueError("alpha needs one value per index.")
    for i, y in zip(indices, values):
        if not 1 <= i <= window:
            raise ValueError(f"Index {i} outside 1..{window}.")
        row[n + i] = y
    return row


def build_instance(
    alg: FiniteAlgebra,
    analysis: CubeAnalysis,
    window: int = DEFAULT_WINDOW,
    *,
    limits: Limits = Limits(),
    subuniverse_bound: int = DEFAULT_SUBUNIVERSE_BOUND,
    probe_length: int = DEFAULT_PROBE_LENGTH,
) -> WitnessInstance:
    """
    Choose (D, B, a, b), build α_1..α_N, close them to the carrier C and
    form g.

    Raises
    ------
    MissingBlockerError
        The analysis has no blocker.
    ResourceLimitError
        The carrier outgrew ``limits``.
    """
    if not analysis.has_blocker:
        raise MissingBlockerError(alg.name, analysis.status)
    if window < MIN_WINDOW:
        raise ValueError(f"Window must be at least {MIN_WINDOW} so indices 1..4 exist, got {window}.")

    b_min = minimal_no_cube_subuniverse(alg, analysis, limits=limits, subuniverse_bound=subuniverse_bound)
    chosen = pick_blocker_witness(
        alg,
        b_min,
        analysis=analysis,
        probe_length=probe_length,
        limits=limits,
        subuniverse_bound=subuniverse_bound,
    )

    generators = np.stack([
        alpha_vector(alg.size, window, chosen.a, chosen.b, [i]) for i in range(1, window + 1)
    ])
    closure = sg_power(alg, generators.shape[1], generators, limits=limits)
    carrier = CarrierAlgebra.from_closure(closure, limits=limits)
    c0 = tuple(carrier.index_of([int(v) for v in row]) for row in generators)
    g = alpha_vector(alg.size, window, chosen.a, chosen.b, [])

    logger.info(
        "%s window %d: D=%s B=%s a=%d b=%d, carrier of %d element(s)",
        alg.name, window, list(chosen.D), list(chosen.B), chosen.a, chosen.b, carrier.size,
    )
    return WitnessInstance(
        algebra=alg,
        blocker=chosen,
        window=window,
        generators=generators,
        carrier=carrier,
        g=g,
        c0=c0,
        notes=[f"subuniverse without cube term: {list(b_min)}"],
    )


def check_g_not_in_c(instance: WitnessInstance) -> bool:
    """
    Membership of g in C.  False is the expected answer for a genuine
    blocker; the caller decides what to assert.
    """
    return instance.contains(instance.g)


def recover_g(instance: WitnessInstance) -> CheckResult:
    """
    Rebuild g coordinate by coordinate: the value at z of the unique block
    with more than one element of ker(π_z) restricted to C_0.
    """
    recovered = []
    for z, j in enumerate(instance.coordinates):
        theta = restrict(kernel_of_projection(instance.carrier, z), instance.c0)
        count, large = block_profile(theta, 1)
        if count != 1:
            return CheckResult(
                name="recover_g",
                status=FAIL,
                detail=f"ker π_{j} on C_0 has {count} large block(s)",
            )
        recovered.append(int(instance.carrier.rows[large[0][0], z]))

    expected = [int(v) for v in instance.g]
    if recovered != expected:
        return CheckResult(
            name="recover_g",
            status=FAIL,
            detail="recovered g differs from the constructed g",
            data={"recovered": recovered, "constructed": expected},
        )
    return CheckResult(name="recover_g", status=PASS, data={"g": expected})


def window_restriction(big: WitnessInstance, small: WitnessInstance) -> CheckResult:
    """
    Dropping the coordinates N_small+1..N_big sends the subalgebra of the
    larger carrier generated by α_1..α_{N_small} onto the smaller carrier,
    and the whole larger carrier onto a superset of it.
    """
    if big.algebra != small.algebra or big.blocker != small.blocker or big.window <= small.window:
        raise ValueError("Window restriction needs two windows over the same blocker, larger first.")

    size = big.algebra.size
    keep = small.k
    small_codes = set(small.carrier.codes)

    matching = sg_power(big.algebra, big.k, big.generators[: small.window], limits=big.carrier.limits)
    image = set(int(c) for c in encode_rows(matching.rows[:, :keep], size))
    whole = set(int(c) for c in encode_rows(big.carrier.rows[:, :keep], size))

    data = {
        "big_window": big.window,
        "small_window": small.window,
        "image_size": len(image),
        "small_size": len(small_codes),
    }
    if image != small_codes:
        return CheckResult("window_restriction", FAIL, "image of the matching generators differs", data)
    if not small_codes <= whole:
        return CheckResult("window_restriction", FAIL, "larger carrier does not cover the smaller one", data)
    return CheckResult("window_restriction", PASS, data=data)
