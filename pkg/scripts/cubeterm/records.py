"""
Record objects for the cube-term analysis.

No search logic lives here; these are the containers passed between the
blocker scan, the witness search and the report layer, each with a
``to_dict()`` for JSON output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.terms import Term, render_term


# -----------------------------------------------------------------------------
# STATUS VALUES
# -----------------------------------------------------------------------------

HAS_CUBE_TERM = "HasCubeTerm"
BLOCKER_CERTIFIED = "BlockerCertified"
BLOCKER_CANDIDATE = "BlockerCandidate"
BUDGET_EXHAUSTED = "BudgetExhausted"

# Statuses that are proofs rather than evidence.
PROOF_STATUSES = {HAS_CUBE_TERM, BLOCKER_CERTIFIED}


# -----------------------------------------------------------------------------
# BLOCKER PAIR
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockerPair:
    """
    A pair D ⊊ B of subuniverses with, for each recorded operation, a
    coordinate that absorbs D: f(B, ..., D, ..., B) ⊆ D.
    """

    D: tuple[int, ...]
    B: tuple[int, ...]
    absorbing: dict[str, int] = field(default_factory=dict, compare=False)

    def sort_key(self) -> tuple:
        return (len(self.B), self.B, len(self.D), self.D)

    def to_dict(self) -> dict[str, Any]:
        return {
            "D": list(self.D),
            "B": list(self.B),
            "absorbing": dict(sorted(self.absorbing.items())),
        }


# -----------------------------------------------------------------------------
# CUBE PATTERNS
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class CubePattern:
    """
    A family of cube identities.

    Column j is a 0/1 vector over the d rows; row r is the identity
    t(u_1, ..., u_n) ≈ x with u_j = y exactly when column j has a 1 in row r.
    """

    dimension: int
    columns: tuple[tuple[int, ...], ...]
    label: str = ""

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError("Pattern dimension must be positive.")
        for j, column in enumerate(self.columns):
            if len(column) != self.dimension or any(v not in (0, 1) for v in column):
                raise ValueError(f"Column {j} is not a 0/1 vector of length {self.dimension}.")
            if not any(column):
                raise ValueError(f"Column {j} is zero; every column must contain a 1.")
        for r in range(self.dimension):
            if not any(column[r] for column in self.columns):
                raise ValueError(f"Row {r + 1} has no column with a 1 in it.")

    @property
    def arity(self) -> int:
        return len(self.columns)

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "dimension": self.dimension,
            "columns": [list(c) for c in self.columns],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CubePattern":
        return cls(
            dimension=int(data["dimension"]),
            columns=tuple(tuple(int(v) for v in c) for c in data["columns"]),
            label=str(data.get("label", "")),
        )


def nu_pattern(d: int) -> CubePattern:
    """Unit columns: the near-unanimity identities of arity d."""
    columns = tuple(tuple(1 if r == j else 0 for r in range(d)) for j in range(d))
    return CubePattern(dimension=d, columns=columns, label=f"nu{d}")


def full_cube_pattern(d: int) -> CubePattern:
    """
    All 2**d - 1 nonzero columns, ordered by the integer whose bit r-1 is the
    entry of row r.
    """
    columns = tuple(
        tuple((mask >> r) & 1 for r in range(d))
        for mask in range(1, 2 ** d)
    )
    return CubePattern(dimension=d, columns=columns, label=f"cube{d}")


def canonical_patterns(d_max: int) -> list[CubePattern]:
    """
    NU patterns for d = 3..d_max, then full cubes for d = 2..d_max.
    """
    patterns = [nu_pattern(d) for d in range(3, d_max + 1)]
    patterns += [full_cube_pattern(d) for d in range(2, d_max + 1)]
    return patterns


def pattern_rows(pattern: CubePattern) -> list[tuple[int, ...]]:
    """The rows of the pattern as 0/1 tuples over the columns."""
    return [tuple(column[r] for column in pattern.columns) for r in range(pattern.dimension)]


# -----------------------------------------------------------------------------
# ANALYSIS RESULT
# -----------------------------------------------------------------------------

@dataclass
class CubeAnalysis:
    """
    Outcome of ``has_cube_term``.

    ``basis`` is the idempotent algebra the blocker scan ran on (the input
    itself for idempotent presentations, otherwise the level-m approximation);
    it is kept for the follow-up blocker selection and is not serialised.
    """

    status: str
    blocker: Optional[BlockerPair] = None
    blockers_found: int = 0
    witness_pattern: Optional[CubePattern] = None
    witness_term: Optional[Term] = None
    level: int = 0
    cross_check_depth: int = 0
    notes: list[str] = field(default_factory=list)
    basis: Optional[FiniteAlgebra] = field(default=None, repr=False)

    @property
    def is_proof(self) -> bool:
        return self.status in PROOF_STATUSES

    @property
    def has_blocker(self) -> bool:
        return self.status in (BLOCKER_CERTIFIED, BLOCKER_CANDIDATE) and self.blocker is not None

    def to_dict(self) -> dict[str, Any]:
        witness = None
        if self.witness_term is not None and self.witness_pattern is not None:
            witness = {
                "pattern": self.witness_pattern.to_dict(),
                "term": render_term(self.witness_term, _pattern_names(self.witness_pattern)),
            }
        return {
            "status": self.status,
            "proof": self.is_proof,
            "blocker": self.blocker.to_dict() if self.blocker else None,
            "blockers_found": self.blockers_found,
            "witness": witness,
            "level": self.level,
            "cross_check_depth": self.cross_check_depth,
            "notes": list(self.notes),
        }


def _pattern_names(pattern: CubePattern) -> list[str]:
    return [f"x{j + 1}" for j in range(pattern.arity)]

