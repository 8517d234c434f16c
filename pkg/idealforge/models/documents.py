from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from idealforge.models.family import Element, FiniteSet, SetFamily
from idealforge.models.formula import Cnf, Dnf, Literals
from idealforge.models.numeric import Nat

# -------------------------------------------------------------------
# Artifact documents
# -------------------------------------------------------------------
# What build/emit write and verify reads back. Every document carries the
# certified count as a decimal string so verifiers can compare against it.


class FamilyDocument(BaseModel):
    members: list[FiniteSet]
    exact_count: Nat

    @classmethod
    def of(cls, family: SetFamily, count: int) -> "FamilyDocument":
        return cls(members=family.canonical_members(), exact_count=count)

    @property
    def family(self) -> SetFamily:
        return SetFamily(members=tuple(self.members))


class FormulaDocument(BaseModel):
    kind: Literal["dnf", "cnf"]
    vars: int = Field(ge=0)
    monotone: bool
    terms: Optional[list[Literals]] = None
    clauses: Optional[list[Literals]] = None
    variables: Optional[list[Element]] = None
    padded: bool = False
    exact_count: Nat

    @model_validator(mode="after")
    def _one_body(self) -> "FormulaDocument":
        body = self.terms if self.kind == "dnf" else self.clauses
        other = self.clauses if self.kind == "dnf" else self.terms
        if body is None or other is not None:
            raise ValueError(f"a {self.kind} document lists {'terms' if self.kind == 'dnf' else 'clauses'} only")
        return self

    @classmethod
    def of(cls, formula: Dnf | Cnf, count: int) -> "FormulaDocument":
        variables = list(formula.variables) if formula.variables is not None else None
        if isinstance(formula, Dnf):
            return cls(
                kind="dnf",
                vars=formula.num_vars,
                monotone=formula.monotone,
                terms=formula.canonical_terms(),
                variables=variables,
                padded=formula.padded,
                exact_count=count,
            )
        return cls(
            kind="cnf",
            vars=formula.num_vars,
            monotone=formula.monotone,
            clauses=formula.canonical_clauses(),
            variables=variables,
            padded=formula.padded,
            exact_count=count,
        )

    def formula(self) -> Dnf | Cnf:
        variables = tuple(self.variables) if self.variables is not None else None
        if self.kind == "dnf":
            return Dnf(num_vars=self.vars, variables=variables, padded=self.padded, terms=tuple(self.terms or ()))
        return Cnf(num_vars=self.vars, variables=variables, padded=self.padded, clauses=tuple(self.clauses or ()))
