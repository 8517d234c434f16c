from typing import Annotated, Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, model_validator

from idealforge.models.family import Element

# A term (DNF) or clause (CNF): signed variable indices, negative = negated.
Literals = Annotated[
    frozenset[int],
    PlainSerializer(lambda lits: sorted(lits, key=lambda lit: (abs(lit), lit)), return_type=list),
]


def literal_key(lits: frozenset[int]) -> tuple[int, list[tuple[int, int]]]:
    return (len(lits), sorted((abs(lit), lit) for lit in lits))


def _check_literals(num_vars: int, groups: tuple[frozenset[int], ...], what: str) -> None:
    for position, lits in enumerate(groups):
        for lit in lits:
            if lit == 0 or abs(lit) > num_vars:
                raise ValueError(f"{what} {position}: literal {lit} outside [1, {num_vars}]")
            if -lit in lits:
                raise ValueError(f"{what} {position}: variable {abs(lit)} appears with both polarities")


class _NormalForm(BaseModel):
    model_config = ConfigDict(frozen=True)

    num_vars: int = Field(ge=0)
    # Element behind each variable (variable i is variables[i-1]) when the formula came from a family.
    variables: Optional[tuple[Element, ...]] = None
    # The last variable is a dummy added to every term or clause.
    padded: bool = False

    @model_validator(mode="after")
    def _variables_match(self) -> Any:
        if self.padded and self.num_vars < 1:
            raise ValueError("a padded formula has at least the dummy variable")
        if self.variables is not None and len(self.variables) != self.num_vars - self.padded:
            raise ValueError("variable map must list every non-dummy variable")
        return self

    def _groups(self) -> tuple[frozenset[int], ...]:
        raise NotImplementedError

    @property
    def monotone(self) -> bool:
        return all(lit > 0 for lits in self._groups() for lit in lits)

    @property
    def has_empty(self) -> bool:
        return any(not lits for lits in self._groups())


class Dnf(_NormalForm):
    """Disjunction of terms; a term is a conjunction of literals. An empty term is a tautology."""

    kind: Literal["dnf"] = "dnf"
    terms: tuple[Literals, ...] = ()

    @model_validator(mode="after")
    def _valid_terms(self) -> "Dnf":
        _check_literals(self.num_vars, self.terms, "term")
        return self

    def _groups(self) -> tuple[frozenset[int], ...]:
        return self.terms

    def canonical_terms(self) -> list[frozenset[int]]:
        return sorted(self.terms, key=literal_key)


class Cnf(_NormalForm):
    """Conjunction of clauses; a clause is a disjunction of literals. An empty clause is unsatisfiable."""

    kind: Literal["cnf"] = "cnf"
    clauses: tuple[Literals, ...] = ()

    @model_validator(mode="after")
    def _valid_clauses(self) -> "Cnf":
        _check_literals(self.num_vars, self.clauses, "clause")
        return self

    def _groups(self) -> tuple[frozenset[int], ...]:
        return self.clauses

    def canonical_clauses(self) -> list[frozenset[int]]:
        return sorted(self.clauses, key=literal_key)
