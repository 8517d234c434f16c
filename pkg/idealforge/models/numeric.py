from typing import Annotated, Literal

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, model_validator


def _coerce_nat(value: object) -> object:
    # JSON documents carry naturals as decimal strings; ints pass through.
    if isinstance(value, str):
        return int(value.strip())
    return value


# Arbitrary-precision natural number. Serialized as a decimal string in JSON
# so that counts far beyond 64 bits survive every JSON consumer.
Nat = Annotated[
    int,
    BeforeValidator(_coerce_nat),
    Field(ge=0),
    PlainSerializer(str, return_type=str, when_used="json"),
]


class Block(BaseModel):
    model_config = ConfigDict(frozen=True)

    # q ones followed by l zeros.
    q: int = Field(ge=1)
    l: int = Field(ge=0)


class BlockRep(BaseModel):
    """Block binary representation 1_{q_b}0_{l_b} ... 1_{q_1}0_{l_1}.

    ``blocks`` is ordered most-significant first; only the last block may have
    ``l == 0``.
    """

    model_config = ConfigDict(frozen=True)

    blocks: tuple[Block, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def _inner_blocks_have_zeros(self) -> "BlockRep":
        for block in self.blocks[:-1]:
            if block.l < 1:
                raise ValueError("only the least significant block may end without zeros")
        return self

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def reassemble(self) -> str:
        return "".join("1" * b.q + "0" * b.l for b in self.blocks)

    @property
    def value(self) -> int:
        return int(self.reassemble(), 2)

    def least_significant_first(self) -> list[Block]:
        return list(reversed(self.blocks))


class SignedPower(BaseModel):
    model_config = ConfigDict(frozen=True)

    sign: Literal[1, -1]
    exponent: int = Field(ge=0)

    @property
    def value(self) -> int:
        return self.sign * (1 << self.exponent)
