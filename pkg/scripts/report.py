"""
Analysis reports and the verdict logic.

The verdict never claims dualizability.  It reads the certificates the
engines produced:

    has-cube-term               a cube-term witness that re-evaluates
    inherently-non-dualizable   a certified blocker (no cube term) and an
                                omit-{1,5} chain
    outside-scope               no cube term found and the chain is proven
                                absent, so the non-dualizability theorem
                                does not apply
    inconclusive                anything else (candidate blockers, budgets)

``verify_report`` re-checks every certificate in a serialised report against
the algebra, so a report can be trusted after a round trip through JSON.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Optional

from scripts.cubeterm.analysis import has_cube_term
from scripts.cubeterm.blockers import verify_blocker
from scripts.cubeterm.identities import verify_cube_identities
from scripts.cubeterm.records import BLOCKER_CERTIFIED, HAS_CUBE_TERM, BlockerPair, CubeAnalysis, CubePattern
from scripts.kernel.algebra import FiniteAlgebra
from scripts.kernel.closure import InconsistencyError
from scripts.kernel.terms import parse_term
from scripts.maltsev.free import ABSENT, FOUND
from scripts.maltsev.omit15 import CHAIN_VARIABLES, Omit15Chain, Omit15Result, verify_omit15_chain
from scripts.maltsev.sections import decide_omit15
from scripts.maltsev.wnu import WnuResult, find_wnu, verify_wnu
from scripts.report_utils import fingerprint_document, utc_now_iso
from scripts.settings import ResolvedSettings

logger = logging.getLogger(__name__)


VERDICT_NON_DUALIZABLE = "inherently-non-dualizable"
VERDICT_CUBE_TERM = "has-cube-term"
VERDICT_OUTSIDE = "outside-scope"
VERDICT_INCONCLUSIVE = "inconclusive"

VERDICTS = (VERDICT_NON_DUALIZABLE, VERDICT_CUBE_TERM, VERDICT_OUTSIDE, VERDICT_INCONCLUSIVE)


def decide_verdict(cube_status: str, chain_status: str) -> str:
    if cube_status == HAS_CUBE_TERM:
        return VERDICT_CUBE_TERM
    if cube_status == BLOCKER_CERTIFIED and chain_status == FOUND:
        return VERDICT_NON_DUALIZABLE
    if chain_status == ABSENT:
        return VERDICT_OUTSIDE
    return VERDICT_INCONCLUSIVE


def algebra_fingerprint(alg: FiniteAlgebra) -> str:
    """Fingerprint of size and tables; the algebra's name does not enter."""
    document = alg.to_document()
    document.pop("name", None)
    return fingerprint_document(document)


def algebra_header(alg: FiniteAlgebra, source: Optional[str] = None) -> dict[str, Any]:
    return {
        "name": alg.name,
        "size": alg.size,
        "operations": [{"name": op.name, "arity": op.arity} for op in alg.operations],
        "fingerprint": algebra_fingerprint(alg),
        "source": source,
    }


@dataclass
class AnalysisReport:
    algebra: FiniteAlgebra
    cube: CubeAnalysis
    wnu: list[WnuResult]
    omit15: Omit15Result
    budgets: dict[str, Any]
    source: Optional[str] = None
    witness: Optional[dict[str, Any]] = None
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return decide_verdict(self.cube.status, self.omit15.status)

    def to_dict(self, *, include_volatile: bool = True) -> dict[str, Any]:
        out: dict[str, Any] = {
            "algebra": algebra_header(self.algebra, self.source),
            "cube_term": self.cube.to_dict(),
            "wnu": [w.to_dict() for w in self.wnu],
            "omit15": self.omit15.to_dict(),
            "verdict": self.verdict,
            "budgets": dict(sorted(self.budgets.items())),
            "witness": self.witness,
        }
        if include_volatile:
            out["volatile"] = {
                "generated_utc": utc_now_iso(),
                "timings": {k: round(v, 6) for k, v in sorted(self.timings.items())},
            }
        return out


def analyze_algebra(
    alg: FiniteAlgebra,
    settings: ResolvedSettings,
    *,
    source: Optional[str] = None,
) -> AnalysisReport:
    """Run the cube-term pipeline, the WNU searches and the chain search."""
    limits = settings.to_limits()
    timings: dict[str, float] = {}

    started = time.perf_counter()
    cube = has_cube_term(
        alg,
        m_max=settings.m_max,
        k_max=settings.k_max,
        d_max=settings.d_max,
        limits=limits,
        subuniverse_bound=settings.subuniverse_bound,
    )
    timings["cube_term"] = time.perf_counter() - started

    started = time.perf_counter()
    wnu = [find_wnu(alg, n, limits=limits) for n in settings.wnu_arities]
    timings["wnu"] = time.perf_counter() - started

    started = time.perf_counter()
    omit15 = decide_omit15(
        alg,
        first=cube.blocker.B if cube.status == BLOCKER_CERTIFIED and cube.blocker else (),
        limits=limits,
        subuniverse_bound=settings.subuniverse_bound,
        congruence_cap=settings.congruence_cap,
    )
    timings["omit15"] = time.perf_counter() - started

    report = AnalysisReport(
        algebra=alg,
        cube=cube,
        wnu=wnu,
        omit15=omit15,
        budgets=settings.budgets(),
        source=source,
        timings=timings,
    )
    logger.info("%s: %s (cube %s, chain %s)", alg.name, report.verdict, cube.status, omit15.status)
    return report


# -----------------------------------------------------------------------------
# RE-VERIFICATION
# -----------------------------------------------------------------------------

def report_problems(document: dict[str, Any], alg: FiniteAlgebra) -> list[str]:
    """
    Re-check the certificates in a serialised report.  Returns the list of
    problems found (empty when everything re-verifies).
    """
    problems: list[str] = []

    if document["algebra"]["fingerprint"] != algebra_fingerprint(alg):
        problems.append("algebra fingerprint does not match the tables")

    cube = document["cube_term"]
    if cube["status"] == HAS_CUBE_TERM:
        witness = cube.get("witness")
        if not witness:
            problems.append("HasCubeTerm without a witness")
        else:
            pattern = CubePattern.from_dict(witness["pattern"])
            term = parse_term(witness["term"])
            if not verify_cube_identities(alg, pattern, term):
                problems.append(f"cube witness {witness['term']} fails pattern {pattern.label}")
    if cube["status"] == BLOCKER_CERTIFIED:
        data = cube["blocker"]
        blocker = BlockerPair(
            D=tuple(data["D"]),
            B=tuple(data["B"]),
            absorbing={k: int(v) for k, v in data["absorbing"].items()},
        )
        if not verify_blocker(alg, blocker):
            problems.append(f"blocker D={data['D']} B={data['B']} does not re-verify")

    for entry in document["wnu"]:
        if entry["status"] == FOUND and not verify_wnu(alg, parse_term(entry["term"]), entry["arity"]):
            problems.append(f"WNU term of arity {entry['arity']} does not re-verify")

    chain = document["omit15"]
    if chain["status"] == FOUND:
        terms = tuple(parse_term(t, CHAIN_VARIABLES) for t in chain["terms"])
        if not verify_omit15_chain(alg, Omit15Chain(m=chain["m"], terms=terms)):
            problems.append("omit-{1,5} chain does not re-verify")

    expected = decide_verdict(cube["status"], chain["status"])
    if document["verdict"] != expected:
        problems.append(f"verdict {document['verdict']!r} does not follow from the certificates ({expected!r})")
    return problems


def verify_report(document: dict[str, Any], alg: FiniteAlgebra) -> None:
    """
    Raises
    ------
    InconsistencyError
        A certificate in ``document`` does not re-verify.
    """
    problems = report_problems(document, alg)
    if problems:
        raise InconsistencyError(
            f"Report for {alg.name!r} does not re-verify:\n  - " + "\n  - ".join(problems)
        )
