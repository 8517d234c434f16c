"""Re-derive the count claimed by an artifact with every verifier that fits the budgets.

Family documents are checked by their build trace (given with --trace or a
trace.json next to the family), by inclusion-exclusion and by brute force
over the equivalent DNF. Formula files (JSON or DIMACS with an exact-count
line) are checked by inclusion-exclusion and by brute force.
"""

import argparse
import logging
from pathlib import Path
from typing import Callable, Optional

from idealforge.clients.artifact_store import TRACE_FILE, ArtifactStore
from idealforge.commands.common import (
    EXIT_MISMATCH,
    EXIT_NO_VERIFIER,
    EXIT_OK,
    Services,
    add_budget_flags,
    fail,
    get_services,
    run_config,
)
from idealforge.core.errors import BudgetExceededError, CertificateError, IdealForgeError
from idealforge.models.family import SetFamily
from idealforge.models.schemas import Command, VerifierResult, VerifyReport

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", help="re-verify the exact count of a family or formula file")
    parser.add_argument("path", type=Path)
    parser.add_argument("--trace", type=Path, default=None, help="build trace for a family document")
    add_budget_flags(parser)
    parser.set_defaults(handler=run)


def _attempt(name: str, claimed: int, counter: Callable[[], int]) -> VerifierResult:
    try:
        count = counter()
    except BudgetExceededError as exc:
        return VerifierResult(name=name, status="skipped", detail=str(exc))
    except CertificateError as exc:
        return VerifierResult(name=name, status="mismatch", detail=str(exc))
    status = "agree" if count == claimed else "mismatch"
    return VerifierResult(name=name, count=count, status=status)


def _trace_verifier(services: Services, family: SetFamily, trace_path: Path) -> Callable[[], int]:
    def check() -> int:
        trace = ArtifactStore.read_trace(trace_path)
        count = services.combinators.recount(trace)
        if services.combinators.trace_family(trace).canonical_members() != family.canonical_members():
            raise CertificateError("family differs from the family the trace builds", node="root", condition="family")
        return count

    return check


def verify_family(services: Services, path: Path, trace: Optional[Path]) -> VerifyReport:
    family, claimed = ArtifactStore.read_family(path)
    results = []
    trace_path = trace if trace is not None else path.with_name(TRACE_FILE)
    if trace_path.exists():
        results.append(_attempt("trace", claimed, _trace_verifier(services, family, trace_path)))
    else:
        results.append(VerifierResult(name="trace", status="skipped", detail="no trace"))
    results.append(_attempt("inclusion-exclusion", claimed, lambda: services.families.ideal_count_ie(family)))
    dnf = services.formulas.family_to_dnf(family)
    results.append(_attempt("brute-force", claimed, lambda: services.formulas.dnf_brute_count(dnf)))
    return _report(path, claimed, results)


def verify_formula(services: Services, path: Path) -> VerifyReport:
    formula, claimed = ArtifactStore.read_formula(path)
    results = [
        _attempt("inclusion-exclusion", claimed, lambda: services.formulas.exact_count(formula)),
        _attempt("brute-force", claimed, lambda: services.formulas.brute_exact_count(formula)),
    ]
    return _report(path, claimed, results)


def _report(path: Path, claimed: int, results: list[VerifierResult]) -> VerifyReport:
    ran = [r for r in results if r.status != "skipped"]
    if not ran:
        status = "no-verifier"
    elif all(r.status == "agree" for r in ran):
        status = "ok"
    else:
        status = "mismatch"
    for result in results:
        logger.info("%s: %s %s", result.name, result.status, result.detail)
    return VerifyReport(path=str(path), claimed=claimed, verifiers=results, status=status)


def _is_family_document(path: Path) -> bool:
    try:
        head = path.read_text(encoding="utf-8").lstrip()[:1]
    except OSError:
        return False
    return head == "{" and "members" in ArtifactStore.read_json(path)


def run(args: argparse.Namespace) -> int:
    try:
        cfg = run_config(Command.verify, args)
        services = get_services(cfg.ie_budget, cfg.brute_vars)
        if _is_family_document(args.path):
            report = verify_family(services, args.path, args.trace)
        else:
            report = verify_formula(services, args.path)
    except IdealForgeError as exc:
        return fail(exc)

    print(report.line())
    for result in report.verifiers:
        if result.status == "mismatch":
            logger.warning("%s disagrees with the claimed count %d: %s", result.name, report.claimed, result.detail)
    if report.status == "no-verifier":
        return EXIT_NO_VERIFIER
    return EXIT_OK if report.status == "ok" else EXIT_MISMATCH
