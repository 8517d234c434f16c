"""Exhaustive search for the fewest sets whose ideal has exactly k members.

Subsets of an n-element universe are bitmasks ``s`` in [0, 2^n); an ideal is
a bitmask over those 2^n subsets, so a family's ideal is the OR of its
members' downsets and its size is a popcount.
"""

import logging
from functools import lru_cache
from typing import Optional

from idealforge.core.config import settings
from idealforge.core.errors import InvalidInputError, NotFoundWithinBudgetError
from idealforge.models.family import Element, SetFamily
from idealforge.models.schemas import AlphaRecord
from idealforge.services.numeric_service import ceil_log2

logger = logging.getLogger(__name__)

WITNESS_GROUP = 1


@lru_cache(maxsize=16)
def _downsets(n: int) -> tuple[int, ...]:
    down = [0] * (1 << n)
    for s in range(1 << n):
        mask = 1 << s
        rest = s
        while rest:
            low = rest & -rest
            mask |= down[s ^ low]
            rest ^= low
        down[s] = mask
    return tuple(down)


def _incomparable(a: int, b: int) -> bool:
    return bool(a & ~b) and bool(b & ~a)


def _extend(
    k: int, down: tuple[int, ...], candidates: list[int], chosen: list[int], ideal: int, start: int, remaining: int
) -> Optional[list[int]]:
    for position in range(start, len(candidates)):
        s = candidates[position]
        if not all(_incomparable(s, c) for c in chosen):
            continue
        grown = ideal | down[s]
        size = grown.bit_count()
        if size > k:
            continue
        if remaining == 1:
            if size == k:
                return chosen + [s]
            continue
        found = _extend(k, down, candidates, chosen + [s], grown, position + 1, remaining - 1)
        if found is not None:
            return found
    return None


def _search(k: int, n: int, m: int) -> Optional[list[int]]:
    """First m-member antichain over n elements with ideal size k, or None.

    Up to relabeling, a largest member is the first ``top`` elements and no
    other member is larger; the rest are chosen in increasing mask order.
    """
    down = _downsets(n)
    for top in range(n + 1):
        first = (1 << top) - 1
        if (1 << top) > k:
            break
        if m == 1:
            if 1 << top == k:
                return [first]
            continue
        candidates = [s for s in range(1 << n) if s.bit_count() <= top and s & ~first]
        found = _extend(k, down, candidates, [first], down[first], 0, m - 1)
        if found is not None:
            return found
    return None


def _as_family(masks: list[int], n: int) -> SetFamily:
    return SetFamily.of(
        [Element(group=WITNESS_GROUP, index=b + 1) for b in range(n) if s >> b & 1] for s in masks
    )


class OracleService:
    def __init__(
        self,
        max_universe: Optional[int] = None,
        max_members: Optional[int] = None,
        k_limit: Optional[int] = None,
    ) -> None:
        self.max_universe = max_universe if max_universe is not None else settings.oracle_max_universe
        self.max_members = max_members if max_members is not None else settings.oracle_max_members
        self.k_limit = k_limit if k_limit is not None else settings.oracle_k_limit

    def alpha_exhaustive(
        self, k: int, max_universe: Optional[int] = None, max_members: Optional[int] = None
    ) -> AlphaRecord:
        max_universe = max_universe if max_universe is not None else self.max_universe
        max_members = max_members if max_members is not None else self.max_members
        if k < 1 or k > self.k_limit:
            raise InvalidInputError(f"exhaustive search covers 1 <= k <= {self.k_limit}, got {k}")
        smallest = ceil_log2(k)
        for m in range(1, max_members + 1):
            for n in range(smallest, max_universe + 1):
                found = _search(k, n, m)
                if found is not None:
                    logger.debug("alpha(%d) = %d over %d elements", k, m, n)
                    return AlphaRecord(k=k, alpha=m, witness=_as_family(found, n), universe_size=n)
        raise NotFoundWithinBudgetError(
            f"no family of at most {max_members} sets over at most {max_universe} elements has an ideal of size {k}",
            size=k,
            budget=max_universe,
        )

    def bounds_table(
        self, k_max: int, max_universe: Optional[int] = None, max_members: Optional[int] = None
    ) -> list[AlphaRecord]:
        records = []
        for k in range(1, k_max + 1):
            try:
                records.append(self.alpha_exhaustive(k, max_universe, max_members))
            except NotFoundWithinBudgetError as exc:
                logger.warning("k=%d: %s", k, exc)
        return records
