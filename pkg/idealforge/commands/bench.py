import argparse
import logging
import time
from typing import Optional

from idealforge.clients.artifact_store import ArtifactStore
from idealforge.commands.common import EXIT_OK, add_budget_flags, add_output_flag, fail, get_services, parse_k
from idealforge.core.errors import IdealForgeError
from idealforge.models.schemas import BenchReport, BenchRow, Strategy
from idealforge.services.numeric_service import upper_bound_terms

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("bench", help="time each construction and compare set counts with the bounds")
    parser.add_argument("--k", nargs="+", required=True, help="one or more k expressions")
    parser.add_argument(
        "--strategies", nargs="+", choices=[s.value for s in Strategy], default=[s.value for s in Strategy]
    )
    add_output_flag(parser)
    add_budget_flags(parser)
    parser.set_defaults(handler=run)


def bench(ks: list[int], strategies: list[Strategy], ie_budget: Optional[int] = None) -> BenchReport:
    rows = []
    for k in ks:
        block_bound, sqrt_bound = upper_bound_terms(k)
        for strategy in strategies:
            services = get_services(ie_budget)
            started = time.perf_counter()
            certified = services.constructions.build(k, strategy)
            elapsed = time.perf_counter() - started
            rows.append(
                BenchRow(
                    k=k,
                    strategy=strategy,
                    members=certified.size,
                    block_bound=block_bound,
                    sqrt_bound=sqrt_bound,
                    seconds=elapsed,
                )
            )
            logger.info("k=%d %s: %d sets in %.3fs", k, strategy.value, certified.size, elapsed)
    return BenchReport(rows=rows)


def run(args: argparse.Namespace) -> int:
    try:
        ks = [parse_k(expression) for expression in args.k]
        report = bench(ks, [Strategy(s) for s in args.strategies], args.ie_budget)
        ArtifactStore(args.output).write_model("bench.json", report)
    except IdealForgeError as exc:
        return fail(exc)
    for row in report.rows:
        print(row.line())
    return EXIT_OK
