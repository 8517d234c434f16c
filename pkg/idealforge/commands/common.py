import argparse
import logging
import re
import sys
from pathlib import Path
from typing import Any, NamedTuple, Optional

from pydantic import ValidationError

from idealforge.clients.allocator import get_allocator
from idealforge.core.config import settings
from idealforge.core.errors import BoundViolationError, CertificateError, IdealForgeError, InvalidInputError
from idealforge.models.schemas import Command, RunConfig
from idealforge.services.combinator_service import CombinatorService
from idealforge.services.construction_service import ConstructionService
from idealforge.services.family_service import FamilyService
from idealforge.services.formula_service import FormulaService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
EXIT_NO_VERIFIER = 3

_K_EXPRESSION = re.compile(
    r"^(?:(?P<hex>0[xX][0-9a-fA-F]+)"
    r"|2\^(?P<exp>\d+)(?:(?P<op>[+-])(?P<offset>\d+))?"
    r"|(?P<dec>\d+))$"
)


def parse_k(expression: str) -> int:
    """decimal | 0xHEX | 2^a | 2^a+b | 2^a-b"""
    match = _K_EXPRESSION.match(re.sub(r"\s+", "", expression))
    if match is None:
        raise InvalidInputError(f"cannot read k from {expression!r}; use decimal, 0xHEX, 2^a, 2^a+b or 2^a-b")
    if match["hex"]:
        return int(match["hex"], 16)
    if match["dec"]:
        return int(match["dec"])
    value = 1 << int(match["exp"])
    if match["op"] == "+":
        value += int(match["offset"])
    elif match["op"] == "-":
        value -= int(match["offset"])
    return value


class Services(NamedTuple):
    families: FamilyService
    combinators: CombinatorService
    constructions: ConstructionService
    formulas: FormulaService


def get_services(ie_budget: Optional[int] = None, brute_vars: Optional[int] = None) -> Services:
    # A fresh allocator per command keeps group numbering, and so every artifact, deterministic.
    families = FamilyService(ie_budget=ie_budget)
    combinators = CombinatorService(allocator=get_allocator(), families=families)
    return Services(
        families=families,
        combinators=combinators,
        constructions=ConstructionService(combinators),
        formulas=FormulaService(ie_budget=ie_budget, brute_vars=brute_vars),
    )


def add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ie-budget", type=int, default=None, help="max members/terms for inclusion-exclusion")
    parser.add_argument("--brute-vars", type=int, default=None, help="max variables for brute-force counting")


def add_output_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", "-o", type=Path, default=Path("."), help="directory for artifacts")


def flag_or(args: argparse.Namespace, name: str, default: int) -> int:
    value = getattr(args, name, None)
    return default if value is None else value


def run_config(command: Command, args: argparse.Namespace, **fields: Any) -> RunConfig:
    """Validate the parsed flags once; invalid combinations become usage errors."""
    values = {
        "command": command,
        "ie_budget": flag_or(args, "ie_budget", settings.ie_budget),
        "brute_vars": flag_or(args, "brute_vars", settings.brute_vars),
        "output": getattr(args, "output", None),
    }
    values.update(fields)
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        messages = "; ".join(error["msg"].removeprefix("Value error, ") for error in exc.errors())
        raise InvalidInputError(messages) from exc


def exit_code_for(exc: IdealForgeError) -> int:
    if isinstance(exc, (CertificateError, BoundViolationError)):
        return EXIT_MISMATCH
    return EXIT_USAGE


def fail(exc: IdealForgeError) -> int:
    logger.debug("command failed", exc_info=exc)
    print(f"error: [{exc.code}] {exc}", file=sys.stderr)
    return exit_code_for(exc)
