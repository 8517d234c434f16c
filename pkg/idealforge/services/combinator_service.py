"""Splitting and lifting on certified families, and the trace checker.

Every combinator returns a new ``CertifiedFamily`` whose trace records the
construction before normalization, so ``recount`` can re-derive the count
and re-check the disjointness side conditions without trusting the builder.
"""

import logging
from typing import Iterable, Optional

from idealforge.clients.allocator import GroupAllocator
from idealforge.core.errors import CertificateError, InvalidInputError
from idealforge.models.family import Element, FiniteSet, SetFamily, copies, set_key
from idealforge.models.trace import (
    BuildTrace,
    CertifiedFamily,
    LeafMethod,
    LeafNode,
    LiftNode,
    SplitNode,
    SqrtBaseNode,
    children,
    iter_postorder,
)
from idealforge.services.family_service import FamilyService, member_masks, signed_intersection_sum

logger = logging.getLogger(__name__)


def _groups_of(members: Iterable[frozenset[Element]]) -> frozenset[int]:
    return frozenset(e.group for member in members for e in member)


def trace_groups(trace: BuildTrace) -> frozenset[int]:
    """Every element group used anywhere in a trace: leaf sets and lift groups."""
    groups: set[int] = set()
    for node in iter_postorder(trace):
        if isinstance(node, LeafNode):
            groups.update(_groups_of(node.members))
        elif isinstance(node, LiftNode) and node.group is not None:
            groups.add(node.group)
    return frozenset(groups)


def sqrt_system_count(members: tuple[FiniteSet, ...]) -> int:
    """Closed-form ideal size of an S/T grid system, after checking its shape.

    ``members`` lists S_0..S_{q-1} then T_0..T_{q-1}. With C the common part
    of the S sets, D_j = S_0 & T_j and F_ij = (S_i & T_j) - D_j, the shape is:
    S sets meet pairwise in exactly C, D_j is an increasing chain inside C,
    the F cells are pairwise disjoint and miss C, S_i = C + row i of F and
    T_j = D_j + column j of F.
    """
    if len(members) < 4 or len(members) % 2:
        raise ValueError(f"expected 2q sets with q >= 2, got {len(members)}")
    q = len(members) // 2
    s_sets, t_sets = members[:q], members[q:]

    common = frozenset.intersection(*s_sets)
    for i in range(q):
        for other in range(i + 1, q):
            if s_sets[i] & s_sets[other] != common:
                raise ValueError(f"S_{i} and S_{other} meet outside their common part")

    chain = [s_sets[0] & t for t in t_sets]
    for j, d in enumerate(chain):
        if not d <= common:
            raise ValueError(f"D_{j} leaves the common part")
        if j and not chain[j - 1] <= d:
            raise ValueError(f"D_{j - 1} is not contained in D_{j}")

    cells = [[(s & t) - chain[j] for j, t in enumerate(t_sets)] for s in s_sets]
    flat = [cell for row in cells for cell in row]
    covered = frozenset().union(*flat)
    if sum(len(cell) for cell in flat) != len(covered) or covered & common:
        raise ValueError("grid cells overlap each other or the common part")
    for i, s in enumerate(s_sets):
        if s != common.union(*cells[i]):
            raise ValueError(f"S_{i} is not the common part plus row {i}")
    for j, t in enumerate(t_sets):
        if t != chain[j].union(*(row[j] for row in cells)):
            raise ValueError(f"T_{j} is not D_{j} plus column {j}")

    total = sum(1 << len(s) for s in s_sets) + sum(1 << len(t) for t in t_sets)
    total -= sum(1 << len(s & t) for s in s_sets for t in t_sets)
    total += (q - 1) * (sum(1 << len(d) for d in chain) - (1 << len(common)))
    return total


class CombinatorService:
    def __init__(self, allocator: GroupAllocator, families: Optional[FamilyService] = None) -> None:
        self.allocator = allocator
        self.families = families or FamilyService()

    # -------------------------------------------------------------------
    # Leaves
    # -------------------------------------------------------------------

    def leaf(self, members: Iterable[Iterable[Element]], count: int, method: LeafMethod) -> CertifiedFamily:
        node = LeafNode(count=count, method=method, members=tuple(frozenset(m) for m in members))
        verified = self._leaf_count(node, "leaf")
        if verified != count:
            raise CertificateError(f"computed {verified}, claimed {count}", node="leaf", condition="count")
        self.allocator.advance_past(_groups_of(node.members))
        family = self.families.normalize(SetFamily(members=node.members))
        return CertifiedFamily(family=family, count=count, trace=node)

    def _leaf_count(self, node: LeafNode, label: str) -> int:
        if node.method == "power":
            if len(node.members) != 1:
                raise CertificateError(
                    f"has {len(node.members)} sets", node=label, condition="power leaf has one set"
                )
            return 1 << len(node.members[0])
        if node.method == "block-base":
            if len(node.members) != 2:
                raise CertificateError(
                    f"has {len(node.members)} sets", node=label, condition="block-base leaf has two sets"
                )
            first, second = node.members
            return (1 << len(first)) + (1 << len(second)) - (1 << len(first & second))
        if node.method == "sqrt-system":
            try:
                return sqrt_system_count(node.members)
            except ValueError as exc:
                raise CertificateError(str(exc), node=label, condition="grid system shape") from exc
        # Inclusion-exclusion leaves are counted directly under the configured budget.
        family = SetFamily(members=node.members)
        if not self.families.within_budget(family):
            raise CertificateError(
                f"{family.size} sets exceed the inclusion-exclusion budget of {self.families.ie_budget}",
                node=label,
                condition="leaf within budget",
            )
        _, masks = member_masks(family)
        return signed_intersection_sum(masks)

    # -------------------------------------------------------------------
    # Combinators
    # -------------------------------------------------------------------

    def split(self, a: CertifiedFamily, b: CertifiedFamily) -> CertifiedFamily:
        # Union of families over disjoint groups: count a + b - 1.
        if b.count < 2:
            raise InvalidInputError("the second family of a split must have an ideal of at least 2 sets")
        rehomed = False
        if trace_groups(a.trace) & trace_groups(b.trace):
            b = self.rehome(b, {g: self.allocator.next_group() for g in sorted(trace_groups(b.trace))})
            rehomed = True
        count = a.count + b.count - 1
        family = self.families.merge_disjoint(a.family, b.family)
        logger.debug("split %d + %d - 1 = %d (rehomed=%s)", a.count, b.count, count, rehomed)
        return CertifiedFamily(
            family=family,
            count=count,
            trace=SplitNode(count=count, left=a.trace, right=b.trace, rehomed=rehomed),
        )

    def lift(self, child: CertifiedFamily, t: int) -> CertifiedFamily:
        # Add `t` fresh elements to every member: count times 2^t.
        if t < 0:
            raise InvalidInputError(f"cannot lift by a negative amount ({t})")
        count = child.count << t
        group = None
        family = child.family
        if t > 0:
            group = self.allocator.next_group()
            fresh = copies(t, group)
            # A lifted antichain is still an antichain.
            family = SetFamily(members=tuple(sorted((m | fresh for m in family.members), key=set_key)))
        logger.debug("lift %d by 2^%d into group %s", child.count, t, group)
        return CertifiedFamily(
            family=family, count=count, trace=LiftNode(count=count, t=t, group=group, child=child.trace)
        )

    def sqrt_base(self, q: int, beta: int, body: CertifiedFamily) -> CertifiedFamily:
        # Mark a finished base-case family so the checker can confirm its target.
        return CertifiedFamily(
            family=body.family,
            count=body.count,
            trace=SqrtBaseNode(count=body.count, q=q, beta=beta, body=body.trace),
        )

    def rehome(self, certified: CertifiedFamily, mapping: dict[int, int]) -> CertifiedFamily:
        # Rename element groups in both the family and its trace.

        def rename(member: frozenset[Element]) -> frozenset[Element]:
            return frozenset(Element(group=mapping.get(e.group, e.group), index=e.index) for e in member)

        rebuilt: dict[int, BuildTrace] = {}
        for node in iter_postorder(certified.trace):
            if isinstance(node, LeafNode):
                new: BuildTrace = node.model_copy(update={"members": tuple(rename(m) for m in node.members)})
            elif isinstance(node, SplitNode):
                new = node.model_copy(update={"left": rebuilt[id(node.left)], "right": rebuilt[id(node.right)]})
            elif isinstance(node, LiftNode):
                group = None if node.group is None else mapping.get(node.group, node.group)
                new = node.model_copy(update={"group": group, "child": rebuilt[id(node.child)]})
            else:
                new = node.model_copy(update={"body": rebuilt[id(node.body)]})
            rebuilt[id(node)] = new
        self.allocator.advance_past(frozenset(mapping.values()))
        logger.debug("rehomed %d groups", len(mapping))
        return CertifiedFamily(
            family=SetFamily(members=tuple(rename(m) for m in certified.family.members)),
            count=certified.count,
            trace=rebuilt[id(certified.trace)],
        )

    # -------------------------------------------------------------------
    # Certificate checking
    # -------------------------------------------------------------------

    def recount(self, trace: BuildTrace) -> int:
        # Recompute a trace's count bottom-up, checking every side condition.
        counts: dict[int, int] = {}
        groups: dict[int, frozenset[int]] = {}
        for position, node in enumerate(iter_postorder(trace)):
            label = f"node {position} ({node.kind})"
            if isinstance(node, LeafNode):
                value = self._leaf_count(node, label)
                used = _groups_of(node.members)
            elif isinstance(node, SplitNode):
                left, right = groups[id(node.left)], groups[id(node.right)]
                if left & right:
                    raise CertificateError(
                        f"groups {sorted(left & right)} appear on both sides",
                        node=label,
                        condition="disjoint groups",
                    )
                if counts[id(node.right)] < 2:
                    raise CertificateError("right side has count below 2", node=label, condition="right count >= 2")
                value = counts[id(node.left)] + counts[id(node.right)] - 1
                used = left | right
            elif isinstance(node, LiftNode):
                below = groups[id(node.child)]
                if node.t == 0:
                    if node.group is not None:
                        raise CertificateError("zero lift names a group", node=label, condition="fresh group")
                    used = below
                else:
                    if node.group is None or node.group in below:
                        raise CertificateError(
                            f"group {node.group} is not fresh", node=label, condition="fresh group"
                        )
                    used = below | {node.group}
                value = counts[id(node.child)] << node.t
            else:
                value = counts[id(node.body)]
                if node.beta >= 1 << (node.q * node.q):
                    raise CertificateError("beta is not below 2^(q^2)", node=label, condition="beta range")
                target = (1 << (3 * node.q * node.q)) + node.beta
                if value != target:
                    raise CertificateError(
                        f"body counts {value}, expected {target}", node=label, condition="base-case target"
                    )
                used = groups[id(node.body)]
            if value != node.count:
                raise CertificateError(f"recounted {value}, recorded {node.count}", node=label, condition="count")
            counts[id(node)] = value
            groups[id(node)] = used
        return counts[id(trace)]

    def trace_family(self, trace: BuildTrace) -> SetFamily:
        # Rebuild the normalized family a trace describes.
        built: dict[int, tuple[frozenset[Element], ...]] = {}
        for node in iter_postorder(trace):
            if isinstance(node, LeafNode):
                members = node.members
            elif isinstance(node, SplitNode):
                members = built[id(node.left)] + built[id(node.right)]
            elif isinstance(node, LiftNode):
                below = built[id(node.child)]
                if node.t == 0 or node.group is None:
                    members = below
                else:
                    fresh = copies(node.t, node.group)
                    members = tuple(m | fresh for m in below)
            else:
                (only,) = children(node)
                members = built[id(only)]
            built[id(node)] = members
        # All generators of one ideal normalize to the same antichain.
        return self.families.normalize(SetFamily(members=built[id(trace)]))

    def certify(self, certified: CertifiedFamily) -> int:
        # Recount the trace and confirm it describes exactly this family.
        value = self.recount(certified.trace)
        if value != certified.count:
            raise CertificateError(
                f"trace recounts {value}, family claims {certified.count}", node="root", condition="count"
            )
        if self.trace_family(certified.trace).canonical_members() != certified.family.canonical_members():
            raise CertificateError("family differs from the family the trace builds", node="root", condition="family")
        return value
