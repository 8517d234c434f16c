import argparse
import logging

from idealforge.clients.artifact_store import ArtifactStore
from idealforge.commands.common import (
    EXIT_OK,
    add_budget_flags,
    add_output_flag,
    fail,
    get_services,
    parse_k,
    run_config,
)
from idealforge.core.errors import IdealForgeError
from idealforge.models.schemas import Command, EmitSummary, OutputFormat, Strategy

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("emit", help="write a monotone DNF or CNF whose count is exactly k")
    parser.add_argument("--k", required=True, help="decimal, 0xHEX, 2^a, 2^a+b or 2^a-b")
    parser.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.best.value)
    parser.add_argument("--form", choices=["dnf", "cnf"], default="dnf")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.json.value)
    parser.add_argument("--pad", action="store_true", help="add a dummy variable to every term or clause")
    add_output_flag(parser)
    add_budget_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    try:
        cfg = run_config(
            Command.emit,
            args,
            k=parse_k(args.k),
            strategy=args.strategy,
            form=args.form,
            format=args.format,
            pad=args.pad,
        )
        services = get_services(cfg.ie_budget, cfg.brute_vars)
        certified = services.constructions.build(cfg.k, cfg.strategy)
        services.combinators.certify(certified)

        formulas = services.formulas
        if cfg.form == "dnf":
            formula = formulas.family_to_dnf(certified.family)
        else:
            formula = formulas.family_to_cnf(certified.family)
        if cfg.pad:
            formula = formulas.pad(formula)
        path = ArtifactStore(cfg.output).write_formula(formula, certified.count, cfg.format)
    except IdealForgeError as exc:
        return fail(exc)

    summary = EmitSummary(
        k=certified.count,
        form=cfg.form,
        format=cfg.format,
        num_vars=formula.num_vars,
        lines=len(formula.terms if cfg.form == "dnf" else formula.clauses),
        padded=cfg.pad,
        path=str(path),
    )
    print(summary.line())
    return EXIT_OK
