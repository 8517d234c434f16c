"""Reading and writing artifacts. Nothing else in the package touches the filesystem."""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Union

from pydantic import BaseModel, ValidationError

from idealforge.core.errors import InvalidInputError
from idealforge.models.documents import FamilyDocument, FormulaDocument
from idealforge.models.family import Element, SetFamily
from idealforge.models.formula import Cnf, Dnf
from idealforge.models.schemas import AlphaRecord, OutputFormat
from idealforge.models.trace import BuildTrace, CertifiedFamily, TraceDocument, flatten, unflatten

logger = logging.getLogger(__name__)

Formula = Union[Dnf, Cnf]

FAMILY_FILE = "family.json"
TRACE_FILE = "trace.json"
SUMMARY_FILE = "summary.json"
BOUNDS_FILE = "bounds.csv"


# -------------------------------------------------------------------
# DIMACS
# -------------------------------------------------------------------


def render_dimacs(formula: Formula, count: int) -> str:
    """``p dnf`` (a nonstandard extension) or standard ``p cnf``, ending with the exact count."""
    groups = formula.canonical_terms() if isinstance(formula, Dnf) else formula.canonical_clauses()
    if formula.num_vars == 0 or any(not lits for lits in groups):
        raise InvalidInputError(
            "DIMACS cannot carry an empty term, clause or variable set; use --pad or the json format"
        )
    lines = [f"c idealforge {formula.kind}"]
    for v, element in enumerate(formula.variables or (), start=1):
        lines.append(f"c var {v} {element.group} {element.index}")
    if formula.padded:
        lines.append(f"c pad {formula.num_vars}")
    lines.append(f"p {formula.kind} {formula.num_vars} {len(groups)}")
    for lits in groups:
        lines.append(" ".join(str(lit) for lit in sorted(lits, key=lambda lit: (abs(lit), lit))) + " 0")
    lines.append(f"c exact-count {count}")
    return "\n".join(lines) + "\n"


def _integer(token: str, number: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise InvalidInputError(f"line {number}: {what} is not an integer: {token!r}") from None


def parse_dimacs(text: str) -> tuple[Formula, int]:
    kind = None
    num_vars = declared = 0
    count = None
    padded = False
    variables: dict[int, Element] = {}
    groups: list[frozenset[int]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 3 and parts[1] == "exact-count":
                count = _integer(parts[2], number, "exact count")
            elif len(parts) == 5 and parts[1] == "var":
                v, group, index = (_integer(token, number, "variable mapping") for token in parts[2:])
                try:
                    variables[v] = Element(group=group, index=index)
                except ValidationError as exc:
                    raise InvalidInputError(f"line {number}: invalid variable mapping: {line}") from exc
            elif len(parts) == 3 and parts[1] == "pad":
                padded = True
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] not in ("dnf", "cnf"):
                raise InvalidInputError(f"line {number}: invalid problem line: {line}")
            kind = parts[1]
            num_vars = _integer(parts[2], number, "variable count")
            declared = _integer(parts[3], number, "line count")
            continue
        if kind is None:
            raise InvalidInputError(f"line {number}: literals before the problem line")
        literals = [_integer(token, number, "literal") for token in line.split()]
        if literals[-1] != 0:
            raise InvalidInputError(f"line {number}: a term or clause must end with 0")
        groups.append(frozenset(literals[:-1]))
    if kind is None:
        raise InvalidInputError("missing problem line")
    if len(groups) != declared:
        raise InvalidInputError(f"problem line declares {declared} lines, found {len(groups)}")
    if count is None:
        raise InvalidInputError("missing 'c exact-count' line")
    mapped = None
    if variables:
        mapped = tuple(variables[v] for v in sorted(variables))
    try:
        if kind == "dnf":
            formula: Formula = Dnf(num_vars=num_vars, variables=mapped, padded=padded, terms=tuple(groups))
        else:
            formula = Cnf(num_vars=num_vars, variables=mapped, padded=padded, clauses=tuple(groups))
    except ValidationError as exc:
        raise InvalidInputError(f"invalid {kind}: {exc}") from exc
    return formula, count


def render_text(formula: Formula, count: int) -> str:
    if isinstance(formula, Dnf):
        joiner, outer, empty = " & ", "  |", "TRUE"
        groups = formula.canonical_terms()
    else:
        joiner, outer, empty = " | ", "  &", "FALSE"
        groups = formula.canonical_clauses()
    label = "satisfying" if isinstance(formula, Dnf) else "falsifying"
    lines = [f"# {formula.kind} over {formula.num_vars} variables, {len(groups)} lines, {count} {label} assignments"]
    for position, lits in enumerate(groups):
        body = joiner.join(
            (f"x{lit}" if lit > 0 else f"~x{-lit}") for lit in sorted(lits, key=lambda lit: (abs(lit), lit))
        )
        lines.append(f"({body or empty})" + (outer if position < len(groups) - 1 else ""))
    return "\n".join(lines) + "\n"


class ArtifactStore:
    def __init__(self, root: Path | str) -> None:
        self.root = Path(root)

    def path(self, name: str) -> Path:
        return self.root / name

    def _write(self, name: str, text: str) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        target = self.path(name)
        target.write_text(text, encoding="utf-8")
        logger.info("wrote %s", target)
        return target

    def write_model(self, name: str, model: BaseModel) -> Path:
        return self._write(name, model.model_dump_json(indent=2, exclude_none=True) + "\n")

    # -------------------------------------------------------------------
    # Families and traces
    # -------------------------------------------------------------------

    def write_family(self, certified: CertifiedFamily, name: str = FAMILY_FILE) -> Path:
        return self.write_model(name, FamilyDocument.of(certified.family, certified.count))

    def write_trace(self, trace: BuildTrace, name: str = TRACE_FILE) -> Path:
        return self.write_model(name, flatten(trace))

    def write_certified(self, certified: CertifiedFamily) -> tuple[Path, Path]:
        return self.write_family(certified), self.write_trace(certified.trace)

    @staticmethod
    def read_json(path: Path) -> Any:
        try:
            return json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"cannot read JSON from {path}: {exc}") from exc

    @staticmethod
    def read_family(path: Path) -> tuple[SetFamily, int]:
        try:
            document = FamilyDocument.model_validate(ArtifactStore.read_json(path))
        except ValidationError as exc:
            raise InvalidInputError(f"{path} is not a family document: {exc}") from exc
        return document.family, document.exact_count

    @staticmethod
    def read_trace(path: Path) -> BuildTrace:
        try:
            document = TraceDocument.model_validate(ArtifactStore.read_json(path))
            return unflatten(document)
        except (ValidationError, ValueError) as exc:
            raise InvalidInputError(f"{path} is not a trace document: {exc}") from exc

    # -------------------------------------------------------------------
    # Formulas
    # -------------------------------------------------------------------

    def write_formula(self, formula: Formula, count: int, fmt: OutputFormat, stem: str = "formula") -> Path:
        if fmt == OutputFormat.json:
            return self.write_model(f"{stem}.json", FormulaDocument.of(formula, count))
        if fmt == OutputFormat.dimacs:
            return self._write(f"{stem}.{formula.kind}", render_dimacs(formula, count))
        return self._write(f"{stem}.txt", render_text(formula, count))

    @staticmethod
    def read_formula(path: Path) -> tuple[Formula, int]:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InvalidInputError(f"cannot read {path}: {exc}") from exc
        if text.lstrip().startswith("{"):
            try:
                document = FormulaDocument.model_validate_json(text)
                return document.formula(), document.exact_count
            except ValidationError as exc:
                raise InvalidInputError(f"{path} is not a formula document: {exc}") from exc
        return parse_dimacs(text)

    # -------------------------------------------------------------------
    # Tables
    # -------------------------------------------------------------------

    def write_bounds_csv(self, rows: Iterable[tuple[AlphaRecord, int, int]], name: str = BOUNDS_FILE) -> Path:
        """One row per k: the exact minimum, both bounds and the witness."""
        self.root.mkdir(parents=True, exist_ok=True)
        target = self.path(name)
        with target.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["k", "alpha", "lower_bound", "block_bound", "universe_size", "witness"])
            for record, lower, block in rows:
                writer.writerow(
                    [
                        record.k,
                        record.alpha,
                        lower,
                        block,
                        record.universe_size,
                        record.witness.model_dump_json(),
                    ]
                )
        logger.info("wrote %s", target)
        return target
