from enum import Enum
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from idealforge.models.family import SetFamily
from idealforge.models.numeric import Nat

# -------------------------------------------------------------------
# Command surface models
# -------------------------------------------------------------------
# RunConfig is validated once per invocation; summaries and reports are what
# commands write to disk and echo as a single key=value line on stdout.


class Command(str, Enum):
    build = "build"
    verify = "verify"
    bounds = "bounds"
    emit = "emit"
    oracle = "oracle"
    bench = "bench"


class Strategy(str, Enum):
    block = "block"
    sqrt = "sqrt"
    best = "best"


class OutputFormat(str, Enum):
    json = "json"
    dimacs = "dimacs"
    text = "text"


class RunConfig(BaseModel):
    command: Command
    # Required by build, emit and bounds.
    k: Optional[Nat] = None
    strategy: Strategy = Strategy.best
    format: OutputFormat = OutputFormat.json
    form: Literal["dnf", "cnf"] = "dnf"
    pad: bool = False
    ie_budget: int = Field(30, gt=0)
    brute_vars: int = Field(24, gt=0)
    output: Optional[Path] = None

    @model_validator(mode="after")
    def _k_for_constructions(self) -> "RunConfig":
        if self.command in (Command.build, Command.emit, Command.bounds):
            if self.k is None:
                raise ValueError(f"{self.command.value} needs --k")
            if self.k < 1:
                raise ValueError(
                    "k must be at least 1: no formula has exactly 0 satisfying assignments "
                    "over 0 constraints in this framework"
                )
        return self


def summary_line(fields: dict[str, object]) -> str:
    return " ".join(f"{key}={'-' if value is None else value}" for key, value in fields.items())


class BuildSummary(BaseModel):
    k: Nat
    strategy: Strategy
    members: int
    universe: int
    block_count: int
    lower_bound: int
    block_bound: int
    sqrt_bound: Optional[int] = None
    # Which upper bound is the smaller one for this k.
    active_bound: Literal["block", "sqrt"]
    recount: Nat
    status: Literal["ok", "certificate-invalid"]

    def line(self) -> str:
        return summary_line(self.model_dump(mode="json"))


class VerifierResult(BaseModel):
    name: str
    count: Optional[Nat] = None
    status: Literal["agree", "mismatch", "skipped", "error"]
    detail: str = ""


class VerifyReport(BaseModel):
    path: str
    claimed: Nat
    verifiers: list[VerifierResult]
    status: Literal["ok", "mismatch", "no-verifier"]

    @property
    def ran(self) -> list[VerifierResult]:
        return [v for v in self.verifiers if v.status in ("agree", "mismatch")]

    def line(self) -> str:
        fields: dict[str, object] = {
            "status": self.status,
            "claimed": self.claimed,
            "verifiers": ",".join(v.name for v in self.ran) or None,
        }
        # Every verifier that ran reports its own count, so a mismatch shows both numbers.
        fields.update({v.name: v.count for v in self.ran})
        return summary_line(fields)


class AlphaRecord(BaseModel):
    k: Nat = Field(ge=1)
    alpha: int = Field(ge=1)
    witness: SetFamily
    universe_size: int = Field(ge=0)

    @model_validator(mode="after")
    def _witness_size(self) -> "AlphaRecord":
        if self.witness.size != self.alpha:
            raise ValueError("witness must have exactly alpha members")
        return self


class BoundsReport(BaseModel):
    k: Nat
    block_count: int
    lower_bound: int
    block_bound: int
    sqrt_bound: Optional[int] = None
    # ceil(0.5 log2 k) + 1, the simple ceiling on bl(k) + 1.
    simple_ceiling: int
    # Exact minimum from the exhaustive oracle, when k is small enough and a witness was found.
    alpha: Optional[int] = None

    def line(self) -> str:
        return summary_line(self.model_dump(mode="json"))


class EmitSummary(BaseModel):
    k: Nat
    form: Literal["dnf", "cnf"]
    format: OutputFormat
    num_vars: int
    lines: int
    padded: bool
    path: str

    def line(self) -> str:
        return summary_line(self.model_dump(mode="json"))


class OracleSummary(BaseModel):
    k_max: int
    rows: int
    missing: list[int] = Field(default_factory=list)
    path: str

    def line(self) -> str:
        fields = self.model_dump(mode="json")
        fields["missing"] = ",".join(str(k) for k in self.missing) or None
        return summary_line(fields)


class BenchRow(BaseModel):
    k: Nat
    strategy: Strategy
    members: int
    block_bound: int
    sqrt_bound: Optional[int] = None
    seconds: float

    def line(self) -> str:
        fields = self.model_dump(mode="json")
        fields["seconds"] = f"{self.seconds:.4f}"
        return summary_line(fields)


class BenchReport(BaseModel):
    rows: list[BenchRow]
