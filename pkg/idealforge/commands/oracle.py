import argparse
import logging

from idealforge.clients.artifact_store import BOUNDS_FILE, ArtifactStore
from idealforge.commands.common import EXIT_OK, add_output_flag, fail, flag_or
from idealforge.core.config import settings
from idealforge.core.errors import IdealForgeError
from idealforge.models.schemas import OracleSummary
from idealforge.services.numeric_service import block_count, lower_bound_terms
from idealforge.services.oracle_service import OracleService

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("oracle", help="write exact minima for small k next to both bounds (CSV)")
    parser.add_argument("--k-max", type=int, default=32)
    parser.add_argument("--max-universe", type=int, default=None)
    parser.add_argument("--max-members", type=int, default=None)
    add_output_flag(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    try:
        oracle = OracleService(
            max_universe=flag_or(args, "max_universe", settings.oracle_max_universe),
            max_members=flag_or(args, "max_members", settings.oracle_max_members),
        )
        records = oracle.bounds_table(args.k_max)
        rows = [(r, lower_bound_terms(r.k), block_count(r.k) + 1) for r in records]
        path = ArtifactStore(args.output).write_bounds_csv(rows, BOUNDS_FILE)
    except IdealForgeError as exc:
        return fail(exc)

    found = {r.k for r in records}
    summary = OracleSummary(
        k_max=args.k_max,
        rows=len(records),
        missing=[k for k in range(1, args.k_max + 1) if k not in found],
        path=str(path),
    )
    print(summary.line())
    return EXIT_OK
