from __future__ import annotations

import copy
import json

import pytest

from scripts.cubeterm.records import BLOCKER_CANDIDATE, BLOCKER_CERTIFIED, BUDGET_EXHAUSTED, HAS_CUBE_TERM
from scripts.kernel.algebra import parse_algebra
from scripts.kernel.closure import InconsistencyError
from scripts.maltsev.free import ABSENT, FOUND, INCONCLUSIVE
from scripts.report import (
    VERDICT_CUBE_TERM,
    VERDICT_INCONCLUSIVE,
    VERDICT_NON_DUALIZABLE,
    VERDICT_OUTSIDE,
    algebra_fingerprint,
    analyze_algebra,
    decide_verdict,
    report_problems,
    verify_report,
)
from scripts.report_utils import canonical_json, compute_source_id, fingerprint_document
from scripts.run_lock import RunLockedError, acquire_lock, release_lock
from scripts.settings import ResolvedSettings


@pytest.fixture
def settings() -> ResolvedSettings:
    return ResolvedSettings(profile="test")


@pytest.mark.parametrize(
    "cube, chain, verdict",
    [
        (HAS_CUBE_TERM, ABSENT, VERDICT_CUBE_TERM),
        (HAS_CUBE_TERM, FOUND, VERDICT_CUBE_TERM),
        (BLOCKER_CERTIFIED, FOUND, VERDICT_NON_DUALIZABLE),
        (BLOCKER_CERTIFIED, ABSENT, VERDICT_OUTSIDE),
        (BLOCKER_CANDIDATE, ABSENT, VERDICT_OUTSIDE),
        (BLOCKER_CANDIDATE, FOUND, VERDICT_INCONCLUSIVE),
        (BLOCKER_CERTIFIED, INCONCLUSIVE, VERDICT_INCONCLUSIVE),
        (BUDGET_EXHAUSTED, INCONCLUSIVE, VERDICT_INCONCLUSIVE),
    ],
)
def test_verdict_table(cube, chain, verdict):
    assert decide_verdict(cube, chain) == verdict


@pytest.mark.parametrize(
    "name, verdict",
    [
        ("semilattice", VERDICT_OUTSIDE),
        ("z2", VERDICT_CUBE_TERM),
        ("majority", VERDICT_CUBE_TERM),
        ("chain3", VERDICT_OUTSIDE),
    ],
)
def test_corpus_verdicts(request, settings, name, verdict):
    report = analyze_algebra(request.getfixturevalue(name), settings)
    assert report.verdict == verdict


def test_report_document(semilattice, settings):
    document = analyze_algebra(semilattice, settings, source="semilattice.json").to_dict()

    assert set(document) == {
        "algebra", "cube_term", "wnu", "omit15", "verdict", "budgets", "witness", "volatile",
    }
    assert document["algebra"]["operations"] == [{"name": "meet", "arity": 2}]
    assert document["algebra"]["source"] == "semilattice.json"
    assert document["cube_term"]["status"] == BLOCKER_CERTIFIED
    assert document["cube_term"]["blocker"] == {"D": [0], "B": [0, 1], "absorbing": {"meet": 0}}
    assert [w["arity"] for w in document["wnu"]] == [2, 3, 4]
    assert document["omit15"]["status"] == ABSENT
    assert document["budgets"]["max_closure"] == 200_000
    assert set(document["volatile"]) == {"generated_utc", "timings"}


def test_non_volatile_output_is_deterministic(z2, settings):
    first = analyze_algebra(z2, settings).to_dict(include_volatile=False)
    second = analyze_algebra(z2, settings).to_dict(include_volatile=False)
    assert "volatile" not in first
    assert canonical_json(first) == canonical_json(second)


@pytest.mark.parametrize("name", ["semilattice", "z2", "majority", "meet_const1", "guarded_meet"])
def test_reports_reverify_after_json_round_trip(request, settings, name):
    alg = request.getfixturevalue(name)
    document = json.loads(canonical_json(analyze_algebra(alg, settings).to_dict()))
    assert report_problems(document, alg) == []
    verify_report(document, alg)


def test_guarded_meet_is_inherently_non_dualizable(guarded_meet, settings):
    report = analyze_algebra(guarded_meet, settings)
    assert report.cube.status == BLOCKER_CERTIFIED
    assert report.cube.blocker.D == (0,)
    assert report.cube.blocker.B == (0, 1)
    assert report.omit15.status == FOUND
    assert report.omit15.chain.m == 1
    assert report.verdict == VERDICT_NON_DUALIZABLE


def test_tampered_verdict_is_caught(semilattice, settings):
    document = analyze_algebra(semilattice, settings).to_dict()
    document["verdict"] = VERDICT_NON_DUALIZABLE
    with pytest.raises(InconsistencyError, match="does not follow from the certificates"):
        verify_report(document, semilattice)


def test_tampered_cube_witness_is_caught(z2, settings):
    document = analyze_algebra(z2, settings).to_dict()
    broken = copy.deepcopy(document)
    broken["cube_term"]["witness"]["term"] = "x1"
    problems = report_problems(broken, z2)
    assert len(problems) == 1
    assert problems[0].startswith("cube witness x1 fails pattern")


def test_tampered_blocker_is_caught(semilattice, settings):
    document = analyze_algebra(semilattice, settings).to_dict()
    document["cube_term"]["blocker"]["D"] = [1]
    assert any("does not re-verify" in p for p in report_problems(document, semilattice))


def test_report_against_other_tables(semilattice, chain3, settings):
    document = analyze_algebra(semilattice, settings).to_dict()
    assert "algebra fingerprint does not match the tables" in report_problems(document, chain3)


def test_fingerprint_ignores_name(semilattice):
    renamed = parse_algebra(
        '{"name": "other", "size": 2, "operations": [{"name": "meet", "arity": 2, "table": [0, 0, 0, 1]}]}'
    )
    assert algebra_fingerprint(renamed) == algebra_fingerprint(semilattice)


def test_canonical_json():
    document = {"b": [1, 2], "a": "α"}
    assert canonical_json(document) == '{\n  "a": "α",\n  "b": [\n    1,\n    2\n  ]\n}\n'
    assert canonical_json(document, indent=None) == '{"a":"α","b":[1,2]}'
    assert fingerprint_document(document) == fingerprint_document({"a": "α", "b": [1, 2]})


def test_source_id_follows_content(tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    first.write_text("{}", encoding="utf-8")
    second.write_text("{}", encoding="utf-8")
    assert compute_source_id(first) == compute_source_id(second)
    second.write_text("{ }", encoding="utf-8")
    assert compute_source_id(first) != compute_source_id(second)
    assert len(compute_source_id(first)) == 64


def test_run_lock(tmp_path):
    out = tmp_path / "runs" / "results.jsonl"
    lock = acquire_lock(out, purpose="classify test")

    assert lock.name == "results.jsonl.lock"
    text = lock.read_text(encoding="utf-8")
    assert "Purpose: classify test" in text
    assert "Time (UTC): " in text

    with pytest.raises(RunLockedError, match="delete the lock file"):
        acquire_lock(out)

    release_lock(lock)
    assert not lock.exists()
    release_lock(lock)
    release_lock(acquire_lock(out))
