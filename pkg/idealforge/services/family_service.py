import logging
from typing import Optional

from idealforge.core.config import settings
from idealforge.core.errors import BudgetExceededError
from idealforge.models.family import Element, SetFamily, set_key

logger = logging.getLogger(__name__)


def member_masks(family: SetFamily) -> tuple[list[Element], list[int]]:
    """Index the universe in canonical (group, index) order and encode each member as a bitmask."""
    elements = sorted(family.universe)
    position = {element: bit for bit, element in enumerate(elements)}
    masks = [sum(1 << position[e] for e in member) for member in family.members]
    return elements, masks


def decode_mask(elements: list[Element], mask: int) -> frozenset[Element]:
    return frozenset(e for bit, e in enumerate(elements) if mask >> bit & 1)


def signed_intersection_sum(masks: list[int]) -> int:
    """Sum over nonempty sub-collections J of (-1)^(|J|+1) * 2^|intersection of J|.

    Once a running intersection is empty every extension of it contributes
    +-1, and those contributions cancel unless no member is left to add.
    """
    n = len(masks)
    total = 0
    stack = [(i, masks[i], 1) for i in range(n)]
    while stack:
        last, common, picked = stack.pop()
        sign = 1 if picked % 2 else -1
        if common == 0:
            if last == n - 1:
                total += sign
            continue
        total += sign << common.bit_count()
        for nxt in range(last + 1, n):
            stack.append((nxt, common & masks[nxt], picked + 1))
    return total


class FamilyService:
    """Normalization and the two exact ideal counters.

    Budgets default to the process settings; callers (the CLI, tests) inject
    their own the same way route handlers hand clients to services.
    """

    def __init__(self, ie_budget: Optional[int] = None, enumerate_cap: Optional[int] = None) -> None:
        self.ie_budget = ie_budget if ie_budget is not None else settings.ie_budget
        self.enumerate_cap = enumerate_cap if enumerate_cap is not None else settings.enumerate_cap

    def normalize(self, family: SetFamily) -> SetFamily:
        # Drop duplicates and members contained in another member; the ideal is unchanged.
        kept: list[frozenset[Element]] = []
        for member in sorted(set(family.members), key=len, reverse=True):
            if not any(member <= other for other in kept):
                kept.append(member)
        return SetFamily(members=tuple(sorted(kept, key=set_key)))

    def merge_disjoint(self, *parts: SetFamily) -> SetFamily:
        """normalize() for antichains over pairwise disjoint groups.

        Only the empty set can be contained in a member of another part, so
        this skips the quadratic subset scan.
        """
        members = [m for part in parts for m in part.members]
        if len(members) > 1:
            members = [m for m in members if m] or [frozenset()]
        return SetFamily(members=tuple(sorted(members, key=set_key)))

    def within_budget(self, family: SetFamily) -> bool:
        return family.size <= self.ie_budget

    def ideal_count_ie(self, family: SetFamily, budget: Optional[int] = None) -> int:
        budget = budget if budget is not None else self.ie_budget
        if family.size > budget:
            raise BudgetExceededError(
                f"inclusion-exclusion over {family.size} members exceeds the budget of {budget}",
                size=family.size,
                budget=budget,
            )
        if family.size == 0:
            return 0
        _, masks = member_masks(family)
        count = signed_intersection_sum(masks)
        logger.debug("inclusion-exclusion over %d members: %d", family.size, count)
        return count

    def ideal_enumerate(self, family: SetFamily, cap: Optional[int] = None) -> list[frozenset[Element]]:
        cap = cap if cap is not None else self.enumerate_cap
        elements, masks = member_masks(family)
        for mask in masks:
            if mask.bit_count() >= cap.bit_length():
                raise BudgetExceededError(
                    f"a member with {mask.bit_count()} elements has more subsets than the cap of {cap}",
                    size=1 << mask.bit_count(),
                    budget=cap,
                )
        seen: set[int] = set()
        for mask in masks:
            sub = mask
            while True:
                seen.add(sub)
                if len(seen) > cap:
                    raise BudgetExceededError(
                        f"ideal has more than {cap} sets", size=len(seen), budget=cap
                    )
                if sub == 0:
                    break
                sub = (sub - 1) & mask
        return sorted((decode_mask(elements, sub) for sub in seen), key=set_key)
