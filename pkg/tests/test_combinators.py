import pytest
from hypothesis import given, settings, strategies as st

from idealforge.clients.allocator import GroupAllocator
from idealforge.core.errors import CertificateError, InvalidInputError
from idealforge.models.family import Element, SetFamily
from idealforge.models.trace import (
    CertifiedFamily,
    LeafNode,
    LiftNode,
    SplitNode,
    TraceDocument,
    flatten,
    unflatten,
)
from idealforge.services.combinator_service import CombinatorService, sqrt_system_count
from idealforge.services.construction_service import plan_basecase
from idealforge.services.family_service import FamilyService
from tests.conftest import el, make_constructions


@pytest.fixture
def pair(combinators):
    # {{1_1}, {2_1}}: ideal {}, {1_1}, {2_1}.
    return combinators.leaf([[el(1, 1)], [el(1, 2)]], 3, "inclusion-exclusion")


def test_split_adds_counts_minus_one(constructions, combinators, families):
    six = constructions.build_block(6)
    seven = combinators.split(six, constructions.build_power(1))
    assert seven.count == 7
    assert seven.size == 3
    assert families.ideal_count_ie(seven.family) == 7
    assert combinators.recount(seven.trace) == 7


def test_split_of_empty_set_family(constructions, combinators):
    one = constructions.build_power(0)
    two = combinators.split(one, constructions.build_power(1))
    assert two.count == 2
    assert two.family.size == 1


def test_split_requires_right_count_of_two(constructions, combinators):
    with pytest.raises(InvalidInputError):
        combinators.split(constructions.build_block(6), constructions.build_power(0))


@pytest.mark.property_based
@settings(max_examples=200, deadline=None)
@given(a=st.integers(min_value=2, max_value=1 << 12), b=st.integers(min_value=2, max_value=1 << 12))
def test_split_is_symmetric_and_keeps_the_member_ledger(a, b):
    constructions = make_constructions()
    combinators = constructions.combinators
    left, right = constructions.build_block(a), constructions.build_block(b)
    forward, backward = combinators.split(left, right), combinators.split(right, left)
    assert forward.count == backward.count == a + b - 1
    assert forward.size <= left.size + right.size
    assert backward.size <= left.size + right.size
    assert combinators.families.ideal_count_ie(forward.family) == a + b - 1


def test_split_rehomes_overlapping_groups(constructions, combinators, families):
    six = constructions.build_block(6)
    doubled = combinators.split(six, six)
    assert doubled.trace.rehomed
    assert doubled.count == 11
    assert families.ideal_count_ie(doubled.family) == 11
    assert combinators.certify(doubled) == 11


def test_lift_multiplies_by_power_of_two(pair, combinators, families):
    lifted = combinators.lift(pair, 2)
    assert lifted.count == 12
    assert families.ideal_count_ie(lifted.family) == 12
    assert lifted.trace.group not in {1}
    assert combinators.recount(lifted.trace) == 12


def test_lift_by_zero_is_identity(pair, combinators):
    same = combinators.lift(pair, 0)
    assert same.count == pair.count
    assert same.family == pair.family
    assert same.trace.group is None


def test_lift_of_empty_set(constructions, combinators):
    lifted = combinators.lift(constructions.build_power(0), 5)
    assert lifted.count == 32
    assert [len(m) for m in lifted.family.members] == [5]


def test_lifts_compose(pair, combinators):
    assert combinators.lift(combinators.lift(pair, 2), 3).count == combinators.lift(pair, 5).count


def test_leaf_rejects_wrong_count(combinators):
    with pytest.raises(CertificateError):
        combinators.leaf([[el(1, 1)], [el(1, 2)]], 4, "inclusion-exclusion")


def test_recount_of_empty_set_power_leaf(combinators):
    assert combinators.recount(LeafNode(count=1, method="power", members=(frozenset(),))) == 1


def test_recount_rejects_tampered_count(pair, combinators):
    lifted = combinators.lift(pair, 2)
    with pytest.raises(CertificateError) as info:
        combinators.recount(lifted.trace.model_copy(update={"count": 13}))
    assert info.value.condition == "count"


def test_recount_rejects_reused_lift_group(pair, combinators):
    bad = LiftNode(count=12, t=2, group=1, child=pair.trace)
    with pytest.raises(CertificateError) as info:
        combinators.recount(bad)
    assert info.value.condition == "fresh group"


def test_recount_rejects_zero_lift_with_group(pair, combinators):
    with pytest.raises(CertificateError):
        combinators.recount(LiftNode(count=3, t=0, group=9, child=pair.trace))


def test_recount_rejects_small_right_side(pair, combinators):
    empty = LeafNode(count=1, method="power", members=(frozenset(),))
    with pytest.raises(CertificateError) as info:
        combinators.recount(SplitNode(count=3, left=pair.trace, right=empty))
    assert info.value.condition == "right count >= 2"


def test_recount_rejects_shared_groups(pair, combinators):
    with pytest.raises(CertificateError) as info:
        combinators.recount(SplitNode(count=5, left=pair.trace, right=pair.trace))
    assert info.value.condition == "disjoint groups"


def test_certify_rejects_swapped_family(pair, combinators):
    swapped = CertifiedFamily(
        family=SetFamily.of([[el(1, 1), el(1, 2)]]), count=pair.count, trace=pair.trace
    )
    with pytest.raises(CertificateError) as info:
        combinators.certify(swapped)
    assert info.value.condition == "family"


def test_rehome_renames_family_and_trace(constructions, combinators, families):
    six = constructions.build_block(6)
    moved = combinators.rehome(six, {1: 10, 2: 11})
    assert moved.family.groups == frozenset({10, 11})
    assert families.ideal_count_ie(moved.family) == 6
    assert combinators.certify(moved) == 6
    assert combinators.allocator.peek >= 12


def test_trace_survives_json_round_trip(constructions, combinators):
    built = constructions.build_sqrt(4101, delegate=False)
    text = flatten(built.trace).model_dump_json()
    trace = unflatten(TraceDocument.model_validate_json(text))
    assert combinators.recount(trace) == 4101
    assert combinators.trace_family(trace).canonical_members() == built.family.canonical_members()


def test_unflatten_rejects_forward_references(pair, combinators):
    document = flatten(combinators.lift(pair, 1).trace)
    reordered = document.model_copy(update={"nodes": list(reversed(document.nodes))})
    with pytest.raises(ValueError):
        unflatten(reordered)


def test_sqrt_system_count_matches_inclusion_exclusion(families):
    for beta in (0, 5, 9, 15):
        plan = plan_basecase(2, beta)
        members = plan.s_sets + plan.t_sets
        assert sqrt_system_count(members) == plan.system_count
        assert families.ideal_count_ie(SetFamily(members=members)) == plan.system_count


def test_sqrt_system_leaf_rejects_malformed_grid(combinators):
    plan = plan_basecase(2, 0, base=1)
    broken = plan.s_sets[:1] + plan.t_sets + plan.s_sets[1:]
    with pytest.raises(CertificateError) as info:
        combinators.leaf(broken, plan.system_count, "sqrt-system")
    assert info.value.condition == "grid system shape"


def _check_random_trace(data):
    families = FamilyService(ie_budget=30, enumerate_cap=1 << 20)
    combinators = CombinatorService(GroupAllocator(), families)

    def random_leaf() -> CertifiedFamily:
        group = combinators.allocator.next_group()
        raw = data.draw(
            st.lists(st.frozensets(st.integers(min_value=1, max_value=4), max_size=4), min_size=1, max_size=3)
        )
        members = [[Element(group=group, index=i) for i in member] for member in raw]
        count = families.ideal_count_ie(SetFamily.of(members))
        return combinators.leaf(members, count, "inclusion-exclusion")

    built = random_leaf()
    for _ in range(data.draw(st.integers(min_value=0, max_value=3))):
        if data.draw(st.booleans()):
            right = random_leaf()
            if right.count >= 2:
                built = combinators.split(built, right)
                continue
        built = combinators.lift(built, data.draw(st.integers(min_value=0, max_value=2)))

    assert combinators.recount(built.trace) == built.count
    assert families.ideal_count_ie(built.family) == built.count
    assert len(families.ideal_enumerate(built.family)) == built.count
    assert combinators.certify(built) == built.count


@pytest.mark.property_based
@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_random_traces_recount_to_the_true_ideal_size(data):
    _check_random_trace(data)


@pytest.mark.slow
@pytest.mark.property_based
@settings(max_examples=1000, deadline=None)
@given(data=st.data())
def test_random_traces_recount_many(data):
    _check_random_trace(data)


def test_block_base_leaf_is_counted_without_the_budget():
    combinators = CombinatorService(GroupAllocator(), FamilyService(ie_budget=1))
    leaf = combinators.leaf([[el(1, 1), el(1, 2)], [el(1, 1), el(2, 1)]], 6, "block-base")
    assert combinators.recount(leaf.trace) == 6


def test_block_base_leaf_needs_two_sets(combinators):
    with pytest.raises(CertificateError) as info:
        combinators.leaf([[el(1, 1)], [el(1, 2)], [el(1, 3)]], 4, "block-base")
    assert info.value.condition == "block-base leaf has two sets"
