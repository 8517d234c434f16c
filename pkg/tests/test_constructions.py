import random

import pytest
from hypothesis import given, settings, strategies as st

from idealforge.core.errors import BudgetExceededError, InvalidInputError
from idealforge.models.family import SetFamily
from idealforge.models.schemas import Strategy
from idealforge.services.construction_service import SQRT_MIN_K, decompose_sqrt, plan_basecase
from idealforge.services.family_service import FamilyService
from idealforge.services.numeric_service import (
    basecase_member_bound,
    block_count,
    ceil_log2,
    is_power_of_two,
    sqrt_bound,
)
from tests.conftest import el, make_constructions


@pytest.mark.parametrize("q", [0, 1, 3, 10])
def test_build_power(constructions, q):
    built = constructions.build_power(q)
    assert built.count == 1 << q
    assert built.size == 1
    assert len(built.family.members[0]) == q


def test_build_block_six(constructions):
    built = constructions.build_block(6)
    assert built.count == 6
    assert set(built.family.members) == {
        frozenset({el(1, 1), el(1, 2)}),
        frozenset({el(1, 1), el(2, 1)}),
    }


@pytest.mark.parametrize("k", [1, 2, 8, 1 << 20])
def test_powers_of_two_use_one_set(constructions, k):
    assert constructions.build_block(k).size == 1


def test_build_block_49(constructions, families):
    built = constructions.build_block(49)
    assert built.size <= 3
    assert families.ideal_count_ie(built.family) == 49


def test_build_block_small_k_is_exact_and_within_bound():
    families = FamilyService(ie_budget=30)
    for k in range(1, 301):
        built = make_constructions().build_block(k)
        assert built.count == k
        assert families.ideal_count_ie(built.family) == k
        assert built.size <= block_count(k) + 1
        if not is_power_of_two(k):
            assert built.size >= 2


@pytest.mark.slow
def test_build_block_sweep():
    families = FamilyService(ie_budget=30)
    for k in range(1, 5001):
        constructions = make_constructions()
        built = constructions.build_block(k)
        assert families.ideal_count_ie(built.family) == k
        assert constructions.combinators.certify(built) == k
        assert built.size <= block_count(k) + 1


def test_build_trivial(constructions, families):
    built = constructions.build_trivial(5)
    assert built.count == 5
    assert built.size == 4
    assert families.ideal_count_ie(built.family) == 5
    assert constructions.build_trivial(1).family.members == (frozenset(),)


def test_build_trivial_respects_budget(constructions):
    with pytest.raises(BudgetExceededError):
        constructions.build_trivial(31)


@pytest.mark.parametrize(
    "k, parts",
    [
        (8, (1, 0, 0)),
        ((1 << 12) + 37, (2, 2, 5)),
        ((1 << 27) - 1, (2, ((1 << 27) - 1 - (1 << 12)) // 16, 15)),
        (1 << 27, (3, 0, 0)),
    ],
)
def test_decompose_sqrt(k, parts):
    decomposition = decompose_sqrt(k)
    assert (decomposition.q, decomposition.gamma, decomposition.beta) == parts
    assert decomposition.value == k


def test_decompose_sqrt_rejects_small_k():
    with pytest.raises(InvalidInputError):
        decompose_sqrt(7)


def test_plan_basecase_grid_example():
    plan = plan_basecase(2, 0)
    assert plan.f_grid[0] == (frozenset(), frozenset())
    assert plan.f_grid[1][0] == frozenset({el(1, 1)})
    assert plan.f_grid[1][1] == frozenset({el(3, 1)})
    # Bit 1 of beta empties F_10.
    assert plan_basecase(2, 0b0010).f_grid[1] == (frozenset(), frozenset({el(3, 1)}))


def test_plan_basecase_beta_zero_values():
    plan = plan_basecase(2, 0)
    assert plan.system_count == 64
    assert plan.correction == 1974
    assert plan.t1 + plan.t2 == 4096


@pytest.mark.parametrize("q", [2, 3])
def test_plan_basecase_invariants(q):
    q2 = q * q
    for beta in range(1 << q2):
        plan = plan_basecase(q, beta)
        assert plan.t1 + plan.t2 == (1 << 3 * q2) + beta
        assert plan.a[-1] == -(q - 1)
        assert all(abs(a_j) <= q - 1 for a_j in plan.a)
        assert block_count(plan.correction) <= 2 * q + 2
        assert block_count(plan.t2 + 1) <= (q + 1) * ceil_log2(q) + 2
        for i, s in enumerate(plan.s_sets):
            for j, t in enumerate(plan.t_sets):
                prefix = frozenset(e for e in plan.s_sets[0] if e.group == 0 and e.index <= j * q)
                assert s & t == prefix | plan.f_grid[i][j]


def test_plan_basecase_rejects_out_of_range():
    with pytest.raises(InvalidInputError):
        plan_basecase(1, 0)
    with pytest.raises(InvalidInputError):
        plan_basecase(2, 16)


@pytest.mark.parametrize("q, beta", [(0, 0), (1, 0), (2, 16), (2, -1)])
def test_basecase_sqrt_rejects_before_reserving_groups(constructions, q, beta):
    before = constructions.allocator.peek
    with pytest.raises(InvalidInputError):
        constructions.basecase_sqrt(q, beta)
    assert constructions.allocator.peek == before


@pytest.mark.parametrize("beta", range(16))
def test_basecase_q2_every_beta(beta):
    constructions = make_constructions()
    families = constructions.combinators.families
    plan = plan_basecase(2, beta)
    assert families.ideal_count_ie(SetFamily(members=plan.s_sets + plan.t_sets)) == plan.system_count
    assert families.ideal_count_ie(constructions.build_block(plan.correction).family) == plan.correction
    assert families.ideal_count_ie(constructions.build_block(plan.t2 + 1).family) == plan.t2 + 1

    built = constructions.basecase_sqrt(2, beta)
    assert built.count == 4096 + beta
    t1 = built.trace.body.left
    assert t1.count == plan.t1
    assert families.ideal_count_ie(constructions.combinators.trace_family(t1)) == plan.t1
    assert built.size <= basecase_member_bound(2)
    assert constructions.combinators.certify(built) == 4096 + beta
    assert constructions.combinators.families.ideal_count_ie(built.family) == 4096 + beta


def test_basecase_q3_sample():
    families = FamilyService(ie_budget=30)
    for beta in random.Random(7).sample(range(1 << 9), 4):
        constructions = make_constructions()
        built = constructions.basecase_sqrt(3, beta)
        assert built.size <= basecase_member_bound(3)
        assert constructions.combinators.certify(built) == (1 << 27) + beta
        t1 = built.trace.body.left
        assert t1.count == plan_basecase(3, beta).t1
        assert families.ideal_count_ie(constructions.combinators.trace_family(t1)) == t1.count
        assert families.ideal_count_ie(built.family) == (1 << 27) + beta


@pytest.mark.slow
def test_basecase_q3_every_beta():
    families = FamilyService(ie_budget=30)
    cross_checked = set(random.Random(3).sample(range(1 << 9), 32))
    for beta in range(1 << 9):
        constructions = make_constructions()
        built = constructions.basecase_sqrt(3, beta)
        assert built.size <= basecase_member_bound(3)
        assert constructions.combinators.recount(built.trace) == (1 << 27) + beta
        if beta in cross_checked:
            assert families.ideal_count_ie(built.family) == (1 << 27) + beta


def test_build_sqrt_base_case_without_delegation(constructions, families):
    built = constructions.build_sqrt(4101, delegate=False)
    assert built.trace.kind == "sqrt-base"
    assert built.count == 4101
    assert families.ideal_count_ie(built.family) == 4101


def test_build_sqrt_delegates_to_block_when_cheaper(constructions):
    built = constructions.build_sqrt(4101)
    assert built.trace.kind != "sqrt-base"
    assert built.size <= block_count(4101) + 1


def test_build_sqrt_recursive_step(constructions):
    k = (1 << 12) + 37
    built = constructions.build_sqrt(k, delegate=False)
    assert built.count == k
    assert built.trace.kind == "split"
    assert constructions.combinators.certify(built) == k


@pytest.mark.parametrize("k", [0, 1, 2])
def test_build_sqrt_rejects_small_k(constructions, k):
    with pytest.raises(InvalidInputError):
        constructions.build_sqrt(k)


def test_build_best_picks_fewer_sets(constructions):
    assert constructions.build_best(1 << 64).size == 1
    assert constructions.build_best(49).size == make_constructions().build_block(49).size


@pytest.mark.parametrize("strategy", list(Strategy))
def test_build_dispatches_every_strategy(strategy):
    constructions = make_constructions()
    for k in (1, 2, 3, 49, 4101):
        assert constructions.combinators.certify(constructions.build(k, strategy)) == k


def test_build_rejects_zero(constructions):
    with pytest.raises(InvalidInputError):
        constructions.build(0)


@pytest.mark.property_based
@settings(max_examples=100, deadline=None)
@given(k=st.integers(min_value=1, max_value=5000))
def test_build_best_recounts_small_k(k):
    constructions = make_constructions()
    built = constructions.build_best(k)
    assert constructions.combinators.certify(built) == k
    assert built.size <= block_count(k) + 1


def _check_large(k: int) -> None:
    constructions = make_constructions()
    built = constructions.build_best(k)
    assert constructions.combinators.recount(built.trace) == k
    assert built.size <= min(block_count(k) + 1, sqrt_bound(k))


@pytest.mark.property_based
@settings(max_examples=10, deadline=None)
@given(k=st.integers(min_value=1 << 255, max_value=(1 << 256) - 1))
def test_build_best_on_256_bit_k(k):
    _check_large(k)


@pytest.mark.slow
def test_build_best_on_many_256_bit_k():
    rng = random.Random(2024)
    for _ in range(100):
        _check_large(rng.getrandbits(256) | 1 << 255)


@pytest.mark.slow
def test_sqrt_construction_fits_its_bound_on_large_k():
    rng = random.Random(11)
    for bits in (64, 128, 256, 512):
        k = rng.getrandbits(bits) | 1 << (bits - 1)
        assert k >= SQRT_MIN_K
        constructions = make_constructions()
        built = constructions.build_sqrt(k, delegate=False)
        assert constructions.combinators.recount(built.trace) == k
        assert built.size <= sqrt_bound(k)
