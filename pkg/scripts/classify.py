"""
Batch classification of algebra populations into a JSONL stream.

A source is either a directory of algebra files (``*.json``, sorted by file
name) or a generator spec:

    all-idempotent:size=2,max_arity=3
        every idempotent algebra on {0,..,size-1} with a single operation of
        arity 1..max_arity (``arity=3`` for one arity only)

    all-idempotent:size=2,arities=2+3
        every idempotent algebra with one operation per listed arity

    random-idempotent:size=3,arities=2+3,count=10000,seed=20240607
        ``count`` algebras with uniformly random idempotent tables

One line is written per algebra, in source order, whatever the worker count.
Completed names go to ``<out>.manifest`` so an interrupted run resumes where
it stopped.  Lines never carry the volatile report section.

Hit screen
----------
With ``hits_only`` an idempotent presentation gets the blocker scan alone,
and the chain search only when a blocker exists.  A screen line has no
``cube_term`` or ``wnu`` section; ``blocker`` is null when the scan found
none (the algebra has a cube term) and ``hit`` tells whether the algebra is
in the hypothesis class.  Other presentations get the full report.

Every run ends by rewriting ``<out>.run.json`` from the whole output file:
the source and its generator options, the budgets, the counts, the hits and
the claim-2 outcome (``pass``, ``fail``, ``vacuous-pass`` with no hits, or
``not-replayed``) with a log of how the chain searches ended.
"""

from __future__ import annotations

import itertools
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Iterable, Iterator, Optional

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from scripts.cubeterm.blockers import find_blockers_basic
from scripts.cubeterm.records import BLOCKER_CANDIDATE, BLOCKER_CERTIFIED, CubeAnalysis
from scripts.kernel.algebra import (
    AlgebraFormatError,
    FiniteAlgebra,
    is_idempotent_presentation,
    make_algebra,
    parse_algebra,
)
from scripts.kernel.closure import InconsistencyError, ResourceLimitError
from scripts.maltsev.free import ABSENT, INCONCLUSIVE
from scripts.maltsev.omit15 import Omit15Chain
from scripts.maltsev.sections import decide_omit15
from scripts.report import VERDICT_NON_DUALIZABLE, algebra_header, analyze_algebra, decide_verdict
from scripts.report_utils import canonical_json, compute_source_id, utc_now_iso
from scripts.run_lock import acquire_lock, release_lock
from scripts.settings import ResolvedSettings
from scripts.witness.claims import replay_claim2
from scripts.witness.instance import build_instance
from scripts.witness.records import PASS

logger = logging.getLogger(__name__)


# Generated populations above this many algebras are refused.
MAX_GENERATED = 5_000_000

MODE_FULL = "full"
MODE_HITS = "hits"

# summary label of a screen line without a blocker
NO_BLOCKER = "no-blocker"

CLAIM2_PASS = "pass"
CLAIM2_FAIL = "fail"
CLAIM2_VACUOUS = "vacuous-pass"
CLAIM2_NOT_REPLAYED = "not-replayed"


@dataclass(frozen=True)
class ClassifyItem:
    name: str
    source: str
    algebra: Optional[FiniteAlgebra] = None
    text: Optional[str] = None


@dataclass
class ClassifySummary:
    written: int = 0
    skipped: int = 0
    errors: int = 0
    verdicts: dict[str, int] = field(default_factory=dict)
    hits: list[str] = field(default_factory=list)
    claim2_failures: list[str] = field(default_factory=list)
    record_path: Optional[Path] = None
    claim2_outcome: str = CLAIM2_NOT_REPLAYED


# -----------------------------------------------------------------------------
# SOURCES
# -----------------------------------------------------------------------------

def _parse_spec_options(body: str) -> dict[str, str]:
    options = {}
    for part in body.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise ValueError(f"Generator option {part!r} is not of the form key=value.")
        key, value = part.split("=", 1)
        options[key.strip()] = value.strip()
    return options


def _arities(options: dict[str, str]) -> list[tuple[int, ...]]:
    """Signatures to generate, each a tuple of arities (one operation each)."""
    signatures = _signatures(options)
    if any(arity < 1 for signature in signatures for arity in signature):
        raise ValueError("Generated operations need arity >= 1.")
    return signatures


def _signatures(options: dict[str, str]) -> list[tuple[int, ...]]:
    if "max_arity" in options:
        return [(r,) for r in range(1, int(options["max_arity"]) + 1)]
    if "arity" in options:
        return [(int(options["arity"]),)]
    if "arities" in options:
        return [tuple(int(r) for r in options["arities"].split("+"))]
    raise ValueError("Generator spec needs one of arity=, arities= or max_arity=.")


def _idempotent_cells(size: int, arity: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal cell indices of a table and the remaining (free) indices."""
    weights = sum(size ** r for r in range(arity))
    diagonal = np.arange(size) * weights
    free = np.setdiff1d(np.arange(size ** arity), diagonal)
    return diagonal, free


def _idempotent_table(size: int, arity: int, free_values: Iterable[int]) -> list[int]:
    diagonal, free = _idempotent_cells(size, arity)
    table = np.zeros(size ** arity, dtype=np.int64)
    table[diagonal] = np.arange(size)
    table[free] = list(free_values)
    return table.tolist()


def _op_name(arity: int) -> str:
    return {0: "c", 1: "u", 2: "b", 3: "t"}.get(arity, f"f{arity}")


def _op_names(signature: tuple[int, ...]) -> list[str]:
    names = [_op_name(arity) for arity in signature]
    if len(set(names)) < len(names):
        names = [f"{name}{i}" for i, name in enumerate(names)]
    return names


def _all_idempotent_count(size: int, signatures: list[tuple[int, ...]]) -> int:
    total = 0
    for signature in signatures:
        count = 1
        for arity in signature:
            count *= size ** (size ** arity - size)
        total += count
    return total


def _all_idempotent(size: int, signatures: list[tuple[int, ...]]) -> Iterator[ClassifyItem]:
    for signature in signatures:
        per_op = [
            itertools.product(range(size), repeat=size ** arity - size) for arity in signature
        ]
        label = "+".join(str(r) for r in signature)
        for number, choice in enumerate(itertools.product(*per_op)):
            ops = [
                (op_name, arity, _idempotent_table(size, arity, values))
                for op_name, arity, values in zip(_op_names(signature), signature, choice)
            ]
            name = f"idem{size}_a{label}_{number:06d}"
            yield ClassifyItem(name=name, source="generated", algebra=make_algebra(size, ops, name=name))


def _random_idempotent(size: int, signature: tuple[int, ...], count: int, seed: int) -> Iterator[ClassifyItem]:
    rng = np.random.default_rng(seed)
    label = "+".join(str(r) for r in signature)
    for number in range(count):
        ops = []
        for op_name, arity in zip(_op_names(signature), signature):
            _, free = _idempotent_cells(size, arity)
            values = rng.integers(0, size, size=len(free))
            ops.append((op_name, arity, _idempotent_table(size, arity, values.tolist())))
        name = f"rand{size}_a{label}_s{seed}_{number:06d}"
        yield ClassifyItem(name=name, source="generated", algebra=make_algebra(size, ops, name=name))


def _directory(path: Path) -> Iterator[ClassifyItem]:
    for file in sorted(path.glob("*.json")):
        try:
            text = file.read_text(encoding="utf-8")
        except OSError as exc:
            logger.warning("cannot read %s: %s", file, exc)
            yield ClassifyItem(name=file.stem, source=str(file), text=None)
            continue
        yield ClassifyItem(name=file.stem, source=str(file), text=text)


def iter_source(source: str) -> tuple[Iterator[ClassifyItem], Optional[int]]:
    """
    Items of ``source`` and their number when it is known up front.

    Raises
    ------
    ValueError
        Unknown generator kind or malformed options.
    FileNotFoundError
        ``source`` is neither a generator spec nor an existing directory.
    """
    kind, sep, body = source.partition(":")
    if sep and kind in ("all-idempotent", "random-idempotent"):
        options = _parse_spec_options(body)
        size = int(options.get("size", 2))
        if size < 1:
            raise ValueError(f"Generator size must be positive, got {size}.")
        signatures = _arities(options)
        if kind == "all-idempotent":
            total = _all_idempotent_count(size, signatures)
            if total > MAX_GENERATED:
                raise ValueError(
                    f"all-idempotent would generate {total:,} algebras (limit {MAX_GENERATED:,}).\n"
                    f"Use random-idempotent with a count instead."
                )
            return _all_idempotent(size, signatures), total
        if len(signatures) != 1:
            raise ValueError("random-idempotent needs arity= or arities=, not max_arity=.")
        count = int(options.get("count", 1000))
        seed = int(options.get("seed", 0))
        return _random_idempotent(size, signatures[0], count, seed), count

    path = Path(source)
    if not path.is_dir():
        raise FileNotFoundError(
            f"Classify source not found: {source}\n\n"
            f"Pass a directory of algebra files or a generator spec such as\n"
            f"  all-idempotent:size=2,max_arity=3"
        )
    files = sorted(path.glob("*.json"))
    return _directory(path), len(files)


def describe_source(source: str) -> dict[str, Any]:
    """Generator kind and options (defaults filled in), or the directory."""
    kind, sep, body = source.partition(":")
    if sep and kind in ("all-idempotent", "random-idempotent"):
        options = _parse_spec_options(body)
        if kind == "random-idempotent":
            options.setdefault("count", "1000")
            options.setdefault("seed", "0")
        return {"kind": kind, "options": dict(sorted(options.items()))}
    return {"kind": "directory", "path": source}


# -----------------------------------------------------------------------------
# WORKER
# -----------------------------------------------------------------------------

def _error_line(item: ClassifyItem, kind: str, exc: BaseException) -> dict[str, Any]:
    return {
        "name": item.name,
        "source": item.source,
        "error": {"kind": kind, "message": str(exc).splitlines()[0] if str(exc) else type(exc).__name__},
    }


def _replay_claim2(
    alg: FiniteAlgebra,
    cube: CubeAnalysis,
    chain: Optional[Omit15Chain],
    settings: ResolvedSettings,
) -> dict[str, Any]:
    instance = build_instance(
        alg,
        cube,
        settings.window,
        limits=settings.to_limits(),
        subuniverse_bound=settings.subuniverse_bound,
        probe_length=settings.prec_probe_length,
    )
    return {"claim2": replay_claim2(instance, chain).to_dict(include_volatile=False)}


def screen_hit(
    alg: FiniteAlgebra,
    settings: ResolvedSettings,
    *,
    source: Optional[str] = None,
    replay_claims: bool = False,
) -> dict[str, Any]:
    """
    Screen line of an idempotent presentation: blocker scan, then the chain
    search from the smallest blocker's B when there is a blocker.

    Raises
    ------
    ResourceLimitError
        The blocker scan outgrew its budget.
    """
    limits = settings.to_limits()
    found = find_blockers_basic(alg, bound=settings.subuniverse_bound, limits=limits)
    line: dict[str, Any] = {
        "algebra": algebra_header(alg, source),
        "screen": MODE_HITS,
        "blocker": None,
        "blockers_found": len(found),
        "omit15": None,
        "hit": False,
        "verdict": None,
        "budgets": dict(sorted(settings.budgets().items())),
        "witness": None,
    }
    if not found:
        logger.debug("%s: no blocker", alg.name)
        return line

    blocker = found[0]
    chain = decide_omit15(
        alg,
        first=blocker.B,
        limits=limits,
        subuniverse_bound=settings.subuniverse_bound,
        congruence_cap=settings.congruence_cap,
        first_found=True,
    )
    line["blocker"] = blocker.to_dict()
    line["omit15"] = chain.to_dict()
    line["verdict"] = decide_verdict(BLOCKER_CERTIFIED, chain.status)
    line["hit"] = chain.present
    logger.info("%s: blocker D=%s B=%s, chain %s", alg.name, list(blocker.D), list(blocker.B), chain.status)

    if chain.present and replay_claims:
        cube = CubeAnalysis(
            status=BLOCKER_CERTIFIED,
            blocker=blocker,
            blockers_found=len(found),
            level=alg.max_arity,
            basis=alg,
        )
        line["witness"] = _replay_claim2(alg, cube, chain.chain, settings)
    return line


def classify_one(
    item: ClassifyItem,
    settings: ResolvedSettings,
    replay_claims: bool = False,
    hits_only: bool = False,
) -> dict[str, Any]:
    """One JSONL record.  Errors are recorded inline instead of raised."""
    try:
        if item.algebra is not None:
            alg = item.algebra
        elif item.text is None:
            raise OSError(f"{item.source} could not be read")
        else:
            alg = parse_algebra(item.text, source=item.source)
    except (AlgebraFormatError, OSError) as exc:
        return _error_line(item, "format", exc)

    try:
        if hits_only and is_idempotent_presentation(alg):
            line = screen_hit(alg, settings, source=item.source, replay_claims=replay_claims)
        else:
            report = analyze_algebra(alg, settings, source=item.source)
            if replay_claims and report.verdict == VERDICT_NON_DUALIZABLE:
                report.witness = _replay_claim2(alg, report.cube, report.omit15.chain, settings)
            line = report.to_dict(include_volatile=False)
    except ResourceLimitError as exc:
        return _error_line(item, "budget", exc)
    except InconsistencyError as exc:
        return _error_line(item, "inconsistency", exc)

    line["name"] = item.name
    if item.source != "generated":
        line["algebra"]["source_id"] = compute_source_id(Path(item.source))
    return line


# -----------------------------------------------------------------------------
# RUN
# -----------------------------------------------------------------------------

def manifest_path(out_path: Path) -> Path:
    return out_path.with_name(out_path.name + ".manifest")


def read_manifest(out_path: Path) -> set[str]:
    path = manifest_path(out_path)
    if not path.exists():
        return set()
    return {line.strip() for line in path.read_text(encoding="utf-8").splitlines() if line.strip()}
def run_record_path(out_path: Path) -> Path:
    return out_path.with_name(out_path.name + ".run.json")


def run_classify(
    source: str,
    out_path: str | Path,
    settings: ResolvedSettings,
    *,
    replay_claims: bool = False,
    hits_only: bool = False,
    progress: bool = True,
) -> ClassifySummary:
    """
    Classify every algebra of ``source`` into ``out_path`` under a run lock,
    then rewrite the run record next to it.

    Raises
    ------
    RunLockedError
        Another run holds the lock on ``out_path``.
    """
    out_path = Path(out_path)
    items, total = iter_source(source)
    summary = ClassifySummary()

    lock_file = acquire_lock(out_path, purpose=f"classify {source}")
    try:
        done = read_manifest(out_path)
        if done:
            logger.info("resuming: %d algebra(s) already in %s", len(done), out_path)

        def pending() -> Iterator[ClassifyItem]:
            for item in items:
                if item.name in done:
                    summary.skipped += 1
                    continue
                yield item

        worker = partial(classify_one, settings=settings, replay_claims=replay_claims, hits_only=hits_only)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with out_path.open("a", encoding="utf-8") as out, \
                manifest_path(out_path).open("a", encoding="utf-8") as manifest:
            if settings.workers > 1:
                executor = ProcessPoolExecutor(max_workers=settings.workers)
                results = executor.map(worker, pending(), chunksize=16)
            else:
                executor = None
                results = map(worker, pending())
            try:
                remaining = None if total is None else max(total - len(done), 0)
                for line in tqdm(results, total=remaining, disable=not progress, desc="classify", unit="alg"):
                    out.write(canonical_json(line, indent=None) + "\n")
                    out.flush()
                    manifest.write(line["name"] + "\n")
                    manifest.flush()
                    _tally(summary, line)
            finally:
                if executor is not None:
                    executor.shutdown(cancel_futures=True)

        record = run_record(
            read_lines(out_path),
            source=source,
            settings=settings,
            mode=MODE_HITS if hits_only else MODE_FULL,
            replay_claims=replay_claims,
        )
        summary.record_path = run_record_path(out_path)
        summary.record_path.write_text(canonical_json(record), encoding="utf-8")
        summary.claim2_outcome = record["claim2"]["outcome"]
    finally:
        release_lock(lock_file)

    logger.info("classified %d algebra(s) into %s (%d skipped)", summary.written, out_path, summary.skipped)
    return summary


def _summary_label(line: dict[str, Any]) -> str:
    if "error" in line:
        return "error"
    return line["verdict"] or NO_BLOCKER


def _has_blocker(line: dict[str, Any]) -> bool:
    if "screen" in line:
        return line["blocker"] is not None
    return line["cube_term"]["status"] in (BLOCKER_CERTIFIED, BLOCKER_CANDIDATE)


def _claim2_status(line: dict[str, Any]) -> Optional[str]:
    claim2 = (line.get("witness") or {}).get("claim2")
    return None if claim2 is None else claim2["status"]


def _tally(summary: ClassifySummary, line: dict[str, Any]) -> None:
    summary.written += 1
    if "error" in line:
        summary.errors += 1
        return
    label = _summary_label(line)
    summary.verdicts[label] = summary.verdicts.get(label, 0) + 1
    if label == VERDICT_NON_DUALIZABLE:
        summary.hits.append(line["name"])
        status = _claim2_status(line)
        if status is not None and status != PASS:
            summary.claim2_failures.append(line["name"])


# -----------------------------------------------------------------------------
# SUMMARY
# -----------------------------------------------------------------------------

def read_lines(out_path: str | Path) -> list[dict[str, Any]]:
    with Path(out_path).open(encoding="utf-8") as handle:
        return [json.loads(raw) for raw in handle if raw.strip()]


def run_record(
    lines: list[dict[str, Any]],
    *,
    source: str,
    settings: ResolvedSettings,
    mode: str,
    replay_claims: bool,
) -> dict[str, Any]:
    """
    Run record over every line of an output file.

    The claim-2 outcome is ``vacuous-pass`` when there are no hits, ``fail``
    when a replay failed, ``pass`` when every hit replayed and passed and
    ``not-replayed`` otherwise.
    """
    statuses: dict[str, int] = {}
    errors: dict[str, int] = {}
    hits: list[str] = []
    failures: list[str] = []
    replayed = 0
    with_blocker = 0
    absent = 0
    absent_on_section = 0
    inconclusive: list[str] = []

    for line in lines:
        label = _summary_label(line)
        statuses[label] = statuses.get(label, 0) + 1
        if "error" in line:
            kind = line["error"]["kind"]
            errors[kind] = errors.get(kind, 0) + 1
            continue
        if _has_blocker(line):
            with_blocker += 1
            chain = line.get("omit15") or {}
            if chain.get("status") == ABSENT:
                absent += 1
                if any(note.startswith("no chain on the") for note in chain.get("notes", [])):
                    absent_on_section += 1
            elif chain.get("status") == INCONCLUSIVE:
                inconclusive.append(line["name"])
        if label == VERDICT_NON_DUALIZABLE:
            hits.append(line["name"])
            status = _claim2_status(line)
            if status is not None:
                replayed += 1
                if status != PASS:
                    failures.append(line["name"])

    if failures:
        outcome = CLAIM2_FAIL
    elif not hits:
        outcome = CLAIM2_VACUOUS
    elif replayed == len(hits):
        outcome = CLAIM2_PASS
    else:
        outcome = CLAIM2_NOT_REPLAYED

    return {
        "source": describe_source(source),
        "mode": mode,
        "replay_claims": replay_claims,
        "profile": settings.profile,
        "budgets": dict(sorted(settings.budgets().items())),
        "lines": len(lines),
        "statuses": dict(sorted(statuses.items())),
        "errors": dict(sorted(errors.items())),
        "hit_count": len(hits),
        "hits": hits,
        "claim2": {"outcome": outcome, "replayed": replayed, "failures": failures},
        "search_log": {
            "with_blocker": with_blocker,
            "chain_absent": absent,
            "chain_absent_on_section": absent_on_section,
            "chain_inconclusive": inconclusive,
        },
        "written_utc": utc_now_iso(),
    }


def load_results(out_path: str | Path) -> pd.DataFrame:
    """
    One row per JSONL line: name, verdict, cube status, chain status, error
    kind.  Screen lines show ``no-blocker`` or ``BlockerCertified`` as the
    cube status.
    """
    rows = []
    for line in read_lines(out_path):
        error = line.get("error")
        if error:
            cube_status = chain_status = None
        elif "screen" in line:
            cube_status = BLOCKER_CERTIFIED if line["blocker"] is not None else NO_BLOCKER
            chain_status = (line["omit15"] or {}).get("status")
        else:
            cube_status = line["cube_term"]["status"]
            chain_status = line["omit15"]["status"]
        rows.append({
            "name": line["name"],
            "verdict": None if error else _summary_label(line),
            "cube_status": cube_status,
            "chain_status": chain_status,
            "error": error["kind"] if error else None,
        })
    return pd.DataFrame(rows, columns=["name", "verdict", "cube_status", "chain_status", "error"])


def verdict_counts(results: pd.DataFrame) -> pd.DataFrame:
    """Counts per (verdict, cube status, chain status), errors grouped as 'error'."""
    if results.empty:
        return pd.DataFrame(columns=["verdict", "cube_status", "chain_status", "count"])
    frame = results.assign(verdict=results["verdict"].fillna("error"))
    frame = frame.fillna({"cube_status": "-", "chain_status": "-"})
    return (
        frame.groupby(["verdict", "cube_status", "chain_status"], sort=True)
        .size()
        .reset_index(name="count")
    )
