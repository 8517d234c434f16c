import argparse
import logging

from idealforge.commands.common import EXIT_OK, fail, flag_or, parse_k, run_config
from idealforge.core.config import settings
from idealforge.core.errors import IdealForgeError, NotFoundWithinBudgetError
from idealforge.models.schemas import BoundsReport, Command
from idealforge.services.numeric_service import (
    block_count,
    lower_bound_terms,
    simple_block_ceiling,
    upper_bound_terms,
)
from idealforge.services.oracle_service import OracleService

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("bounds", help="report the lower and upper bounds on the set count for k")
    parser.add_argument("--k", required=True, help="decimal, 0xHEX, 2^a, 2^a+b or 2^a-b")
    parser.add_argument("--max-universe", type=int, default=None, help="oracle universe size limit")
    parser.set_defaults(handler=run)


def bounds_report(k: int, oracle: OracleService) -> BoundsReport:
    block_bound, sqrt_bound = upper_bound_terms(k)
    alpha = None
    if k <= oracle.k_limit:
        try:
            alpha = oracle.alpha_exhaustive(k).alpha
        except NotFoundWithinBudgetError as exc:
            logger.info("oracle: %s", exc)
    return BoundsReport(
        k=k,
        block_count=block_count(k),
        lower_bound=lower_bound_terms(k),
        block_bound=block_bound,
        sqrt_bound=sqrt_bound,
        simple_ceiling=simple_block_ceiling(k),
        alpha=alpha,
    )


def run(args: argparse.Namespace) -> int:
    try:
        cfg = run_config(Command.bounds, args, k=parse_k(args.k))
        oracle = OracleService(max_universe=flag_or(args, "max_universe", settings.oracle_max_universe))
        report = bounds_report(cfg.k, oracle)
    except IdealForgeError as exc:
        return fail(exc)
    print(report.line())
    return EXIT_OK
