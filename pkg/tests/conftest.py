from typing import Iterable

import pytest

from idealforge.clients.allocator import GroupAllocator
from idealforge.models.family import Element, SetFamily
from idealforge.services.combinator_service import CombinatorService
from idealforge.services.construction_service import ConstructionService
from idealforge.services.family_service import FamilyService
from idealforge.services.formula_service import FormulaService
from idealforge.services.oracle_service import OracleService


def el(group: int, index: int) -> Element:
    return Element(group=group, index=index)


def family_of(*members: Iterable[tuple[int, int]]) -> SetFamily:
    return SetFamily.of([el(g, i) for g, i in member] for member in members)


def make_constructions(ie_budget: int = 30) -> ConstructionService:
    """Fresh services for tests that cannot take fixtures (hypothesis bodies)."""
    families = FamilyService(ie_budget=ie_budget, enumerate_cap=1 << 20)
    return ConstructionService(CombinatorService(GroupAllocator(), families))


@pytest.fixture
def allocator() -> GroupAllocator:
    return GroupAllocator()


@pytest.fixture
def families() -> FamilyService:
    return FamilyService(ie_budget=30, enumerate_cap=1 << 20)


@pytest.fixture
def combinators(allocator: GroupAllocator, families: FamilyService) -> CombinatorService:
    return CombinatorService(allocator, families)


@pytest.fixture
def constructions(combinators: CombinatorService) -> ConstructionService:
    return ConstructionService(combinators)


@pytest.fixture
def formulas() -> FormulaService:
    return FormulaService(ie_budget=30, brute_vars=24)


@pytest.fixture
def oracle() -> OracleService:
    return OracleService(max_universe=8, max_members=4, k_limit=64)
