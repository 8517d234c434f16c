"""Block-binary arithmetic and the term-count bounds.

Everything here is a pure function of Python ints. Quantities that feed a
comparison are computed exactly from bit lengths; the one real-valued bound,
20*sqrt(log k)*log log k, is evaluated in 60-digit decimal arithmetic with a
guard for values that land on an integer.
"""

from decimal import ROUND_FLOOR, ROUND_HALF_EVEN, Decimal, localcontext
from itertools import groupby
from typing import Iterable, Optional

from idealforge.core.errors import BoundViolationError, InvalidInputError
from idealforge.models.numeric import Block, BlockRep, SignedPower

DECIMAL_PRECISION = 60
# Mantissa bits kept when taking log2 of a huge integer.
_MANTISSA_BITS = 256


def _require_nat(k: int, minimum: int, name: str = "k") -> int:
    if isinstance(k, bool) or not isinstance(k, int):
        raise InvalidInputError(f"{name} must be an integer, got {type(k).__name__}")
    if k < minimum:
        raise InvalidInputError(f"{name} must be at least {minimum}, got {k}")
    return k


def is_power_of_two(k: int) -> bool:
    return k > 0 and k & (k - 1) == 0


def ceil_log2(n: int) -> int:
    """Smallest c with 2^c >= n, for n >= 1."""
    _require_nat(n, 1, "n")
    return (n - 1).bit_length()


def block_rep(k: int) -> BlockRep:
    _require_nat(k, 1)
    runs = [(digit, sum(1 for _ in run)) for digit, run in groupby(format(k, "b"))]
    # The binary string starts with '1', so runs alternate ones, zeros, ones, ...
    blocks = []
    for pos in range(0, len(runs), 2):
        zeros = runs[pos + 1][1] if pos + 1 < len(runs) else 0
        blocks.append(Block(q=runs[pos][1], l=zeros))
    return BlockRep(blocks=tuple(blocks))


def block_count(k: int) -> int:
    """bl(k): the number of maximal runs of ones in binary k."""
    _require_nat(k, 1)
    # A bit tops a run exactly when the bit above it is 0.
    return (k & ~(k >> 1)).bit_count()


def lower_bound_terms(k: int) -> int:
    """ceil(log2(bl(k) + 1)), the least integer the term count can be."""
    return block_count(k).bit_length()


def log2_decimal(k: int) -> Decimal:
    _require_nat(k, 1)
    shift = max(0, k.bit_length() - _MANTISSA_BITS)
    mantissa = k >> shift
    with localcontext() as ctx:
        ctx.prec = DECIMAL_PRECISION
        return Decimal(mantissa).ln() / Decimal(2).ln() + shift


def sqrt_bound_value(x: Decimal | int) -> Decimal:
    """20 * sqrt(x) * log2(x) with x = log2 k."""
    with localcontext() as ctx:
        ctx.prec = DECIMAL_PRECISION
        x = Decimal(x)
        if x <= 0:
            raise InvalidInputError("log2 k must be positive")
        return 20 * x.sqrt() * (x.ln() / Decimal(2).ln())


def _floor_guarded(value: Decimal) -> int:
    with localcontext() as ctx:
        ctx.prec = DECIMAL_PRECISION
        nearest = value.to_integral_value(rounding=ROUND_HALF_EVEN)
        # Within the working precision of an integer means the true value is that integer.
        if abs(value - nearest) < Decimal(10) ** -(DECIMAL_PRECISION - 10):
            return int(nearest)
        return int(value.to_integral_value(rounding=ROUND_FLOOR))


def sqrt_bound(k: int) -> int:
    _require_nat(k, 3)
    return _floor_guarded(sqrt_bound_value(log2_decimal(k)))


def upper_bound_terms(k: int) -> tuple[int, Optional[int]]:
    """(bl(k) + 1, floor(20 sqrt(log k) log log k)); the second is None below k = 3."""
    block_bound = block_count(k) + 1
    return block_bound, (sqrt_bound(k) if k >= 3 else None)


def simple_block_ceiling(k: int) -> int:
    """ceil(0.5 * log2 k) + 1, computed exactly from ceil(log2 k)."""
    return (ceil_log2(k) + 1) // 2 + 1


def basecase_member_bound(q: int) -> int:
    """(q+1)*ceil(log2 q) + 4q + 6."""
    _require_nat(q, 2, "q")
    return (q + 1) * ceil_log2(q) + 4 * q + 6


def signed_sum(terms: Iterable[SignedPower]) -> int:
    return sum(term.value for term in terms)


def bl_of_signed_sum(terms: list[SignedPower]) -> tuple[int, int]:
    """Evaluate a sum of signed powers of two and check bl(value) <= number of terms."""
    value = signed_sum(terms)
    if value < 1:
        raise InvalidInputError(f"signed sum evaluates to {value}; it must be at least 1")
    bound = len(terms)
    if block_count(value) > bound:
        raise BoundViolationError("block count exceeds term count", value=value, bound=bound)
    return value, bound
