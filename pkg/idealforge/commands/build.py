import argparse
import logging

from idealforge.clients.artifact_store import SUMMARY_FILE, ArtifactStore
from idealforge.commands.common import (
    EXIT_MISMATCH,
    EXIT_OK,
    add_budget_flags,
    add_output_flag,
    fail,
    get_services,
    parse_k,
    run_config,
)
from idealforge.core.errors import CertificateError, IdealForgeError
from idealforge.models.schemas import BuildSummary, Command, Strategy
from idealforge.models.trace import CertifiedFamily
from idealforge.services.numeric_service import block_count, lower_bound_terms, upper_bound_terms

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("build", help="construct a family whose ideal has exactly k sets")
    parser.add_argument("--k", required=True, help="decimal, 0xHEX, 2^a, 2^a+b or 2^a-b")
    parser.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.best.value)
    add_output_flag(parser)
    add_budget_flags(parser)
    parser.set_defaults(handler=run)


def summarize(certified: CertifiedFamily, strategy: Strategy, recount: int, status: str) -> BuildSummary:
    k = certified.count
    block_bound, sqrt_bound = upper_bound_terms(k)
    return BuildSummary(
        k=k,
        strategy=strategy,
        members=certified.size,
        universe=len(certified.family.universe),
        block_count=block_count(k),
        lower_bound=lower_bound_terms(k),
        block_bound=block_bound,
        sqrt_bound=sqrt_bound,
        active_bound="sqrt" if sqrt_bound is not None and sqrt_bound < block_bound else "block",
        recount=recount,
        status=status,
    )


def run(args: argparse.Namespace) -> int:
    try:
        cfg = run_config(Command.build, args, k=parse_k(args.k), strategy=args.strategy)
        services = get_services(cfg.ie_budget, cfg.brute_vars)
        certified = services.constructions.build(cfg.k, cfg.strategy)
    except IdealForgeError as exc:
        return fail(exc)

    store = ArtifactStore(cfg.output)
    try:
        recount = services.combinators.certify(certified)
        status = "ok"
    except CertificateError as exc:
        logger.error("certificate check failed: %s", exc)
        recount, status = 0, "certificate-invalid"

    summary = summarize(certified, cfg.strategy, recount, status)
    store.write_certified(certified)
    store.write_model(SUMMARY_FILE, summary)
    logger.info("built k with %d sets over %d elements", summary.members, summary.universe)
    print(summary.line())
    return EXIT_OK if status == "ok" else EXIT_MISMATCH
