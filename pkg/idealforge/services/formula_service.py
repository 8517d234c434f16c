"""Bridge between set families and monotone normal forms, plus exact model counters.

A family over universe U becomes a DNF with one term per member S, made of
the positive literals of U - S. An assignment satisfies that term exactly
when its false variables fit inside S, so satisfying assignments correspond
to ideal members. The CNF with the same literal sets is falsified by the
same count.
"""

import logging
from typing import Iterator, Optional

from idealforge.core.config import settings
from idealforge.core.errors import BudgetExceededError
from idealforge.models.family import Element, SetFamily
from idealforge.models.formula import Cnf, Dnf
from idealforge.models.numeric import SignedPower

logger = logging.getLogger(__name__)


def _masks(groups: tuple[frozenset[int], ...]) -> list[tuple[int, int]]:
    """(positive mask, negative mask) per term, variable v at bit v - 1."""
    encoded = []
    for lits in groups:
        pos = neg = 0
        for lit in lits:
            if lit > 0:
                pos |= 1 << (lit - 1)
            else:
                neg |= 1 << (-lit - 1)
        encoded.append((pos, neg))
    return encoded


def _negated(groups: tuple[frozenset[int], ...]) -> tuple[frozenset[int], ...]:
    return tuple(frozenset(-lit for lit in lits) for lits in groups)


def _contributions(terms: list[tuple[int, int]], num_vars: int) -> Iterator[tuple[int, int]]:
    """Yield (sign, exponent) for the non-zero inclusion-exclusion terms of a DNF.

    A contradictory conjunction contributes nothing and neither does any
    extension of it. A conjunction that fixes every variable contributes +-1
    per consistent extension; those cancel unless no later term is consistent.
    """
    full = (1 << num_vars) - 1
    n = len(terms)
    stack = [(i, terms[i][0], terms[i][1], 1) for i in range(n)]
    while stack:
        last, pos, neg, picked = stack.pop()
        if pos & neg:
            continue
        sign = 1 if picked % 2 else -1
        fixed = pos | neg
        if fixed == full:
            if not any(not p & neg and not m & pos for p, m in terms[last + 1 :]):
                yield sign, 0
            continue
        yield sign, num_vars - fixed.bit_count()
        for nxt in range(last + 1, n):
            p, m = terms[nxt]
            stack.append((nxt, pos | p, neg | m, picked + 1))


class FormulaService:
    def __init__(self, ie_budget: Optional[int] = None, brute_vars: Optional[int] = None) -> None:
        self.ie_budget = ie_budget if ie_budget is not None else settings.ie_budget
        self.brute_vars = brute_vars if brute_vars is not None else settings.brute_vars

    # -------------------------------------------------------------------
    # Families to formulas
    # -------------------------------------------------------------------

    def _literal_sets(self, family: SetFamily) -> tuple[list[Element], tuple[frozenset[int], ...]]:
        elements = sorted(family.universe)
        position = {e: v for v, e in enumerate(elements, start=1)}
        groups = tuple(frozenset(position[e] for e in elements if e not in member) for member in family.members)
        return elements, groups

    def family_to_dnf(self, family: SetFamily) -> Dnf:
        elements, terms = self._literal_sets(family)
        return Dnf(num_vars=len(elements), variables=tuple(elements), terms=terms)

    def family_to_cnf(self, family: SetFamily) -> Cnf:
        elements, clauses = self._literal_sets(family)
        return Cnf(num_vars=len(elements), variables=tuple(elements), clauses=clauses)

    def pad(self, formula: Dnf | Cnf) -> Dnf | Cnf:
        # Add one dummy variable positively to every term or clause; the count is unchanged.
        dummy = formula.num_vars + 1
        if isinstance(formula, Dnf):
            groups = {"terms": tuple(term | {dummy} for term in formula.terms)}
        else:
            groups = {"clauses": tuple(clause | {dummy} for clause in formula.clauses)}
        return formula.model_copy(update={"num_vars": dummy, "padded": True, **groups})

    # -------------------------------------------------------------------
    # Counting
    # -------------------------------------------------------------------

    def _check_terms(self, size: int, budget: Optional[int]) -> int:
        budget = budget if budget is not None else self.ie_budget
        if size > budget:
            raise BudgetExceededError(
                f"inclusion-exclusion over {size} terms exceeds the budget of {budget}", size=size, budget=budget
            )
        return budget

    def dnf_signed_powers(self, formula: Dnf, budget: Optional[int] = None) -> list[SignedPower]:
        self._check_terms(len(formula.terms), budget)
        return [
            SignedPower(sign=sign, exponent=exponent)
            for sign, exponent in _contributions(_masks(formula.terms), formula.num_vars)
        ]

    def dnf_count(self, formula: Dnf, budget: Optional[int] = None) -> int:
        self._check_terms(len(formula.terms), budget)
        total = sum(sign << exponent for sign, exponent in _contributions(_masks(formula.terms), formula.num_vars))
        logger.debug("dnf count over %d terms: %d", len(formula.terms), total)
        return total

    def dnf_brute_count(self, formula: Dnf, max_vars: Optional[int] = None) -> int:
        max_vars = max_vars if max_vars is not None else self.brute_vars
        terms = _masks(formula.terms)
        mentioned = 0
        for pos, neg in terms:
            mentioned |= pos | neg
        width = mentioned.bit_count()
        if width > max_vars:
            raise BudgetExceededError(
                f"brute force over {width} variables exceeds the limit of {max_vars}", size=width, budget=max_vars
            )
        # Only mentioned variables are enumerated; each unmentioned one doubles the count.
        satisfied = 0
        assignment = 0
        while True:
            if any(assignment & pos == pos and not assignment & neg for pos, neg in terms):
                satisfied += 1
            if assignment == mentioned:
                break
            assignment = (assignment - mentioned) & mentioned
        return satisfied << (formula.num_vars - width)

    def _falsifier_dnf(self, formula: Cnf) -> Dnf:
        # A clause is false exactly when the conjunction of its negated literals holds.
        return Dnf(num_vars=formula.num_vars, terms=_negated(formula.clauses))

    def cnf_falsifying_count(self, formula: Cnf, budget: Optional[int] = None) -> int:
        return self.dnf_count(self._falsifier_dnf(formula), budget)

    def cnf_count(self, formula: Cnf, budget: Optional[int] = None) -> int:
        return (1 << formula.num_vars) - self.cnf_falsifying_count(formula, budget)

    def cnf_brute_falsifying_count(self, formula: Cnf, max_vars: Optional[int] = None) -> int:
        return self.dnf_brute_count(self._falsifier_dnf(formula), max_vars)

    def exact_count(self, formula: Dnf | Cnf, budget: Optional[int] = None) -> int:
        # Satisfying count of a DNF, falsifying count of a CNF: the ideal size either way.
        if isinstance(formula, Dnf):
            return self.dnf_count(formula, budget)
        return self.cnf_falsifying_count(formula, budget)

    def brute_exact_count(self, formula: Dnf | Cnf, max_vars: Optional[int] = None) -> int:
        if isinstance(formula, Dnf):
            return self.dnf_brute_count(formula, max_vars)
        return self.cnf_brute_falsifying_count(formula, max_vars)
