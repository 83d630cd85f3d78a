from __future__ import annotations

import argparse  # command-line argument parsing
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional

import yaml

from scripts.classify import load_results, run_classify, verdict_counts
from scripts.corpus import emit_corpus
from scripts.congruence.carrier import CarrierError
from scripts.cubeterm.analysis import has_cube_term
from scripts.kernel.algebra import AlgebraFormatError, FiniteAlgebra, parse_algebra
from scripts.kernel.closure import InconsistencyError, ResourceLimitError
from scripts.maltsev.free import ABSENT, FOUND
from scripts.maltsev.sections import decide_omit15
from scripts.report import analyze_algebra, verify_report
from scripts.report_utils import canonical_json
from scripts.run_lock import RunLockedError
from scripts.settings import DEFAULT_PROFILE, ResolvedSettings, load_settings_config, resolve_settings
from scripts.witness.claims import (
    ALTERNATE_INDICES,
    DEFAULT_INDICES,
    check_unique_large_block,
    replay_claim1,
    replay_claim2,
)
from scripts.witness.instance import (
    MIN_WINDOW,
    MissingBlockerError,
    build_instance,
    check_g_not_in_c,
    recover_g,
    window_restriction,
)
from scripts.witness.records import FAIL, PASS, WitnessReport

logger = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_BUDGET = 3
EXIT_INCONSISTENT = 4

DEFAULT_CONFIG = Path(__file__).resolve().parents[1] / "config" / "cubewright.yaml"


class _UsageError(Exception):
    pass


class CubewrightParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -----------------------------------------------------------------------------
# HELPERS
# -----------------------------------------------------------------------------

def _read_algebra(path: str) -> FiniteAlgebra:
    text = Path(path).read_text(encoding="utf-8")
    return parse_algebra(text, source=path)


def _settings(args: argparse.Namespace, overrides: dict[str, Any]) -> ResolvedSettings:
    config_path = Path(args.config) if args.config else DEFAULT_CONFIG
    config = load_settings_config(config_path)
    return resolve_settings(args.profile, config, overrides)


def _print_settings(settings: ResolvedSettings, keys: list[str]) -> None:
    budgets = settings.budgets()
    print("Resolved budgets:")
    print(f"  PROFILE: {settings.profile}")
    width = max(len(k) for k in keys)
    for key in keys:
        print(f"  {key.upper().ljust(width)}: {budgets[key]}")


def _parse_budget_spec(spec: Optional[str]) -> dict[str, Any]:
    """``key=value,key=value`` budget overrides for classify."""
    if not spec:
        return {}
    overrides: dict[str, Any] = {}
    for part in spec.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise ValueError(f"Budget override {part!r} is not of the form key=value.")
        key, value = part.split("=", 1)
        overrides[key.strip()] = value.strip().replace("+", ",")
    return overrides


# -----------------------------------------------------------------------------
# COMMANDS
# -----------------------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    alg = _read_algebra(args.file)
    ops = ", ".join(f"{op.name}/{op.arity}" for op in alg.operations) or "(none)"
    print(f"OK {args.file}: {alg.name!r}, size {alg.size}, operations {ops}")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    settings = _settings(args, {
        "m_max": args.m_max,
        "k_max": args.k_max,
        "d_max": args.d_max,
        "wnu_arities": args.wnu_arities,
    })
    alg = _read_algebra(args.file)
    report = analyze_algebra(alg, settings, source=args.file)

    document = report.to_dict()
    # Re-verify what was serialised, not the in-memory objects.
    verify_report(json.loads(canonical_json(document)), alg)

    if args.json:
        sys.stdout.write(canonical_json(document))
        return EXIT_OK

    _print_settings(settings, ["m_max", "k_max", "d_max", "wnu_arities", "max_closure"])
    cube = report.cube
    print(f"\nAlgebra {alg.name!r} (size {alg.size})")
    print(f"  Cube term:   {cube.status}" + (" (proof)" if cube.is_proof else " (evidence only)"))
    if cube.blocker is not None:
        print(f"  Blocker:     D={list(cube.blocker.D)} B={list(cube.blocker.B)}")
    witness = document["cube_term"]["witness"]
    if witness:
        print(f"  Witness:     {witness['term']} for pattern {witness['pattern']['label']}")
    for note in cube.notes:
        print(f"  Note:        {note}")
    for w, entry in zip(report.wnu, document["wnu"]):
        term = entry["term"]
        print(f"  WNU({w.arity}):      {w.status}" + (f"  {term}" if term else ""))
    print(f"  Omit-{{1,5}}:  {report.omit15.status}"
          + (f"  (m = {report.omit15.chain.m})" if report.omit15.chain else ""))
    print(f"\nVerdict: {report.verdict}")
    return EXIT_OK


def _chain_flag(status: str) -> Optional[bool]:
    if status == FOUND:
        return True
    if status == ABSENT:
        return False
    return None


def cmd_witness(args: argparse.Namespace) -> int:
    if args.window is not None and args.window < MIN_WINDOW:
        raise _UsageError(f"--window must be at least {MIN_WINDOW}, got {args.window}.")
    settings = _settings(args, {"window": args.window})
    limits = settings.to_limits()
    alg = _read_algebra(args.file)

    analysis = has_cube_term(
        alg,
        m_max=settings.m_max,
        k_max=settings.k_max,
        d_max=settings.d_max,
        limits=limits,
        subuniverse_bound=settings.subuniverse_bound,
    )

    def build(window: int):
        return build_instance(
            alg,
            analysis,
            window,
            limits=limits,
            subuniverse_bound=settings.subuniverse_bound,
            probe_length=settings.prec_probe_length,
        )

    instance = build(settings.window)
    chain = decide_omit15(
        alg,
        first=instance.blocker.B,
        limits=limits,
        subuniverse_bound=settings.subuniverse_bound,
        congruence_cap=settings.congruence_cap,
    )
    indices = ALTERNATE_INDICES if args.alt_indices else DEFAULT_INDICES

    construction = WitnessReport(name="construction")
    if check_g_not_in_c(instance):
        construction.add("g_not_in_c", FAIL, "g is in C; the blocker data is not genuine")
    else:
        construction.add("g_not_in_c", PASS, f"g ∉ C over a carrier of {instance.carrier.size}")
    construction.checks.append(recover_g(instance))
    reports = [construction]

    reports.append(check_unique_large_block(
        instance,
        sample_budget=settings.sample_budget,
        congruence_cap=settings.congruence_cap,
        max_congruences=settings.max_congruences,
        seed=settings.seed,
        in_hypothesis_class=_chain_flag(chain.status),
    ))
    if args.claims:
        reports.append(replay_claim1(instance, wnu_arities=settings.wnu_arities, indices=indices, limits=limits))
        reports.append(replay_claim2(instance, chain.chain, indices=indices))
        bigger = build(settings.window + 1)
        restriction = WitnessReport(name="window_restriction")
        restriction.checks.append(window_restriction(bigger, instance))
        reports.append(restriction)

    ok = all(r.ok for r in reports)
    if args.json:
        document = {
            "algebra": alg.name,
            "instance": instance.summary(),
            "blocker": instance.blocker.to_dict(),
            "omit15": chain.status,
            "indices": list(indices),
            "reports": [r.to_dict() for r in reports],
            "ok": ok,
        }
        sys.stdout.write(canonical_json(document))
    else:
        _print_settings(settings, ["window", "sample_budget", "congruence_cap", "seed"])
        summary = instance.summary()
        print(f"\nWindow {summary['coordinates']}")
        print(f"  D={summary['D']} B={summary['B']} a={summary['a']} b={summary['b']}")
        print(f"  Carrier C: {summary['carrier_size']} element(s)")
        print(f"  g = {summary['g']}")
        for r in reports:
            print()
            print(r.render(instance.coordinates))
    return EXIT_OK if ok else EXIT_INCONSISTENT


def cmd_classify(args: argparse.Namespace) -> int:
    overrides = _parse_budget_spec(args.budget)
    if args.workers is not None:
        overrides["workers"] = args.workers
    settings = _settings(args, overrides)

    _print_settings(settings, ["m_max", "k_max", "d_max", "max_closure", "workers"])
    print(f"  SOURCE: {args.source}")
    print(f"  OUT:    {args.out}")

    summary = run_classify(
        args.source,
        args.out,
        settings,
        replay_claims=args.replay_claims,
        hits_only=args.hits_only,
        progress=not args.no_progress,
    )

    print(f"\nWritten: {summary.written}  Skipped (manifest): {summary.skipped}  Errors: {summary.errors}")
    for verdict, count in sorted(summary.verdicts.items()):
        print(f"  {verdict}: {count}")
    if summary.hits:
        print(f"\nHypothesis-class hits: {len(summary.hits)}")
        for name in summary.hits[:20]:
            print(f"  {name}")
        if len(summary.hits) > 20:
            print(f"  ... ({len(summary.hits) - 20} more)")
    if summary.record_path is not None:
        print(f"\nRun record: {summary.record_path}  (claim 2: {summary.claim2_outcome})")
    if args.summary:
        counts = verdict_counts(load_results(args.out))
        print("\nSummary over the whole output file:")
        print(counts.to_string(index=False) if not counts.empty else "  (empty)")
    if summary.claim2_failures:
        print(f"\nERROR: claim-2 replay failed for {len(summary.claim2_failures)} hit(s).", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_examples(args: argparse.Namespace) -> int:
    for path in emit_corpus(args.emit):
        print(f"  wrote {path}")
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "witness": cmd_witness,
    "classify": cmd_classify,
    "examples": cmd_examples,
}


# -----------------------------------------------------------------------------
# ENTRY POINT
# -----------------------------------------------------------------------------

def build_parser() -> CubewrightParser:
    parser = CubewrightParser(
        prog="cubewright",
        description="Decide and witness cube terms, blockers and omit-type conditions of finite algebras.",
    )
    parser.add_argument(
        "--config",
        help="Budget config file (default: config/cubewright.yaml in the repository).",
    )
    parser.add_argument(
        "--profile",
        default=DEFAULT_PROFILE,
        help=f"Budget profile from the config file (default: {DEFAULT_PROFILE}).",
    )
    parser.add_argument("--verbose", action="store_true", help="Log engine progress at DEBUG level.")

    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("validate", help="Parse and validate an algebra file.")
    p.add_argument("file")

    p = commands.add_parser("analyze", help="Cube term, WNU and omit-{1,5} analysis with a verdict.")
    p.add_argument("file")
    p.add_argument("--m-max", type=int, help="Level bound for non-idempotent presentations.")
    p.add_argument("--k-max", type=int, help="Cross-check bound for blocker candidates.")
    p.add_argument("--d-max", type=int, help="Largest cube pattern dimension tried.")
    p.add_argument("--wnu-arities", help="Comma-separated WNU arities (e.g. 2,3,4).")
    p.add_argument("--json", action="store_true", help="Print the JSON report.")

    p = commands.add_parser("witness", help="Finite-window replay of the non-dualizability construction.")
    p.add_argument("file")
    p.add_argument("--window", type=int, help=f"Window size N (at least {MIN_WINDOW}).")
    p.add_argument("--claims", action="store_true", help="Also replay both claims and the window restriction.")
    p.add_argument("--alt-indices", action="store_true", help="Swap the roles of the index pairs {1,3} and {2,4}.")
    p.add_argument("--json", action="store_true", help="Print the JSON report.")

    p = commands.add_parser("classify", help="Classify a directory or generated population into JSONL.")
    p.add_argument("source", help="Directory of algebra files or a generator spec.")
    p.add_argument("--out", required=True, help="JSONL output file (appended; resumable).")
    p.add_argument("--budget", help="Budget overrides, e.g. m_max=2,max_closure=50000.")
    p.add_argument("--workers", type=int, help="Worker processes (output order is unaffected).")
    p.add_argument("--replay-claims", action="store_true",
                   help="Replay the second claim on every inherently-non-dualizable hit.")
    p.add_argument("--hits-only", action="store_true",
                   help="Blocker scan first; chain search only when a blocker exists (idempotent presentations).")
    p.add_argument("--summary", action="store_true", help="Print verdict counts for the whole output file.")
    p.add_argument("--no-progress", action="store_true", help="Disable the progress bar.")

    p = commands.add_parser("examples", help="Write the bundled example algebras.")
    p.add_argument("--emit", required=True, help="Output directory.")
    return parser


def main(argv: list[str] | None = None) -> int:
    """
    Command-line entry point.  Maps failures to exit codes:
    1 usage, 2 format or I/O, 3 budget, 4 internal inconsistency.
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"\nERROR: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InconsistencyError as exc:
        print(f"\nERROR: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except MissingBlockerError as exc:
        print(f"\nERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (AlgebraFormatError, CarrierError, RunLockedError, OSError, yaml.YAMLError) as exc:
        print(f"\nERROR: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (KeyError, ValueError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"\nERROR: {message}", file=sys.stderr)
        return EXIT_USAGE


# Runs main() when file executed directly,
# but does nothing if imported as module
if __name__ == "__main__":
    raise SystemExit(main())
