"""Constructions that reach an exact ideal size k.

``build_block`` uses bl(k) + 1 sets. ``basecase_sqrt`` handles
2^(3q^2) + beta with O(q log q) sets, and ``build_sqrt`` recurses on the
middle digits of k through it.
"""

import logging
from math import isqrt

from idealforge.clients.allocator import GroupAllocator
from idealforge.core.errors import BoundViolationError, BudgetExceededError, InvalidInputError
from idealforge.models.construction import BaseCasePlan, SqrtDecomposition
from idealforge.models.family import Element, copies
from idealforge.models.schemas import Strategy
from idealforge.models.trace import CertifiedFamily
from idealforge.services.combinator_service import CombinatorService
from idealforge.services.numeric_service import (
    basecase_member_bound,
    block_count,
    block_rep,
    ceil_log2,
    sqrt_bound,
)

logger = logging.getLogger(__name__)

# Smallest k with q >= 2 in its decomposition.
SQRT_MIN_K = 1 << 12


def decompose_sqrt(k: int) -> SqrtDecomposition:
    """Write k = 2^(3q^2) + gamma * 2^(q^2) + beta with 2^(3q^2) <= k < 2^(3(q+1)^2)."""
    if k < 8:
        raise InvalidInputError(f"k must be at least 8 to decompose, got {k}")
    q = isqrt((k.bit_length() - 1) // 3)
    q2 = q * q
    gamma, beta = divmod(k - (1 << (3 * q2)), 1 << q2)
    return SqrtDecomposition(q=q, gamma=gamma, beta=beta)


def check_basecase_args(q: int, beta: int) -> None:
    if q < 2:
        raise InvalidInputError(f"the base case needs q >= 2, got {q}")
    if not 0 <= beta < 1 << (q * q):
        raise InvalidInputError(f"beta must lie in [0, 2^{q * q}), got {beta}")


def plan_basecase(q: int, beta: int, base: int = 0) -> BaseCasePlan:
    """Lay out the S/T grid for 2^(3q^2) + beta using groups base .. base + q^2 - 1.

    Group ``base`` holds [q^2] and every prefix [jq]; cell F_ij lives alone in
    group base + jq + i. The (jq+i)-th bit of beta, counting from 0, empties F_ij.
    """
    check_basecase_args(q, beta)
    q2 = q * q

    full = copies(q2, base)
    bit_set = [[bool(beta >> (j * q + i) & 1) for j in range(q)] for i in range(q)]
    f_grid = tuple(
        tuple(frozenset() if bit_set[i][j] else copies(i, base + j * q + i) for j in range(q))
        for i in range(q)
    )
    s_sets = tuple(full.union(*f_grid[i]) for i in range(q))
    t_sets = tuple(copies(j * q, base).union(*(f_grid[i][j] for i in range(q))) for j in range(q))

    powers_s = sum(1 << len(s) for s in s_sets)
    powers_t = sum(1 << len(t) for t in t_sets)
    prefixes = sum(1 << (j * q) for j in range(q))
    cells = sum(1 << (j * q + len(f_grid[i][j])) for i in range(q) for j in range(q))
    system_count = powers_s + powers_t - cells + (q - 1) * (prefixes - (1 << q2))

    top = 1 << (3 * q2 - 1)
    correction = top - powers_s - powers_t + (1 << q2)
    t1 = system_count + correction - 1

    emptied = [sum(bit_set[i][j] for i in range(q)) for j in range(q)]
    a = tuple(q - 1 - b for b in emptied) + (-(q - 1),)
    t2 = top - sum(a_j << (j * q) for j, a_j in enumerate(a))

    return BaseCasePlan(
        q=q,
        beta=beta,
        f_grid=f_grid,
        s_sets=s_sets,
        t_sets=t_sets,
        a=a,
        system_count=system_count,
        correction=correction,
        t1=t1,
        t2=t2,
    )


class ConstructionService:
    def __init__(self, combinators: CombinatorService) -> None:
        self.combinators = combinators

    @property
    def allocator(self) -> GroupAllocator:
        return self.combinators.allocator

    def build_power(self, q: int) -> CertifiedFamily:
        if q < 0:
            raise InvalidInputError(f"q must be non-negative, got {q}")
        member = copies(q, self.allocator.next_group()) if q else frozenset()
        return self.combinators.leaf([member], 1 << q, "power")

    def build_block_base(self, q: int, l: int) -> CertifiedFamily:
        # 1_q 0_l = 2^(q+l) - 2^l from S1 = [q+l-1]_g1 and S2 = [q-1]_g2 + [l]_g1.
        if q < 1 or l < 0:
            raise InvalidInputError(f"block base needs q >= 1 and l >= 0, got q={q} l={l}")
        g1 = self.allocator.next_group()
        g2 = self.allocator.next_group() if q > 1 else g1
        first = copies(q + l - 1, g1)
        second = copies(q - 1, g2) | copies(l, g1)
        return self.combinators.leaf([first, second], (1 << (q + l)) - (1 << l), "block-base")

    def build_block(self, k: int) -> CertifiedFamily:
        # At most bl(k) + 1 sets, assembled block by block from the most significant end.
        blocks = block_rep(k).blocks
        ones_below = blocks[1].q if len(blocks) > 1 else 0
        family = self.build_block_base(blocks[0].q, blocks[0].l + ones_below)
        for position in range(1, len(blocks)):
            block = blocks[position]
            family = self.combinators.split(family, self.build_power(block.q))
            ones_below = blocks[position + 1].q if position + 1 < len(blocks) else 0
            if block.l + ones_below:
                family = self.combinators.lift(family, block.l + ones_below)
            logger.debug("block %d of %d: count %d", position + 1, len(blocks), family.count)
        return family

    def build_trivial(self, k: int) -> CertifiedFamily:
        # {empty, {1}, ..., {k-1}}: k sets with an ideal of size k.
        if k < 1:
            raise InvalidInputError(f"k must be at least 1, got {k}")
        budget = self.combinators.families.ie_budget
        if k > budget:
            raise BudgetExceededError(f"trivial family for {k} exceeds the budget of {budget}", size=k, budget=budget)
        group = self.allocator.next_group()
        members = [frozenset()] + [frozenset({Element(group=group, index=i)}) for i in range(1, k)]
        return self.combinators.leaf(members, k, "inclusion-exclusion")

    def basecase_sqrt(self, q: int, beta: int) -> CertifiedFamily:
        check_basecase_args(q, beta)
        base = self.allocator.reserve(q * q)
        plan = plan_basecase(q, beta, base)
        if block_count(plan.correction) > 2 * q + 2:
            raise BoundViolationError(
                "correction has too many blocks", value=block_count(plan.correction), bound=2 * q + 2
            )
        t2_blocks = block_count(plan.t2 + 1)
        if t2_blocks > (q + 1) * ceil_log2(q) + 2:
            raise BoundViolationError("t2 + 1 has too many blocks", value=t2_blocks, bound=(q + 1) * ceil_log2(q) + 2)
        if any(abs(a_j) > q - 1 for a_j in plan.a):
            raise BoundViolationError("a coefficient is out of range", value=max(map(abs, plan.a)), bound=q - 1)
        if plan.t1 + plan.t2 != plan.target:
            raise BoundViolationError("t1 + t2 misses the target", value=plan.t1 + plan.t2, bound=plan.target)
        logger.debug(
            "base case q=%d beta=%d: system=%d correction=%d t2=%d", q, beta, plan.system_count, plan.correction, plan.t2
        )

        system = self.combinators.leaf(plan.s_sets + plan.t_sets, plan.system_count, "sqrt-system")
        t1 = self.combinators.split(system, self.build_block(plan.correction))
        final = self.combinators.split(t1, self.build_block(plan.t2 + 1))

        bound = basecase_member_bound(q)
        if final.size > bound:
            raise BoundViolationError("base case uses too many sets", value=final.size, bound=bound)
        return self.combinators.sqrt_base(q, beta, final)

    def delegates_to_block(self, k: int) -> bool:
        return block_count(k) + 1 <= sqrt_bound(k)

    def build_sqrt(self, k: int, delegate: bool = True) -> CertifiedFamily:
        if k < 3:
            raise InvalidInputError(f"the recursive construction needs k >= 3, got {k}")
        if (delegate and self.delegates_to_block(k)) or k < SQRT_MIN_K:
            return self.build_block(k)
        parts = decompose_sqrt(k)
        base = self.basecase_sqrt(parts.q, parts.beta)
        if parts.gamma == 0:
            return base
        logger.debug("k=%d: q=%d gamma=%d beta=%d", k, parts.q, parts.gamma, parts.beta)
        q2 = parts.q * parts.q
        middle = self.combinators.split(self.combinators.lift(self.build_best(parts.gamma), q2), self.build_power(1))
        return self.combinators.split(base, middle)

    def build_best(self, k: int) -> CertifiedFamily:
        # Fewest sets among the block and recursive constructions; ties go to block.
        best = self.build_block(k)
        if k >= SQRT_MIN_K:
            candidate = self.build_sqrt(k, delegate=False)
            if candidate.size < best.size:
                best = candidate
        return best

    def build(self, k: int, strategy: Strategy = Strategy.best) -> CertifiedFamily:
        if k < 1:
            raise InvalidInputError(f"k must be at least 1, got {k}")
        if strategy == Strategy.block:
            return self.build_block(k)
        if strategy == Strategy.sqrt:
            return self.build_sqrt(k) if k >= 3 else self.build_block(k)
        return self.build_best(k)
