from typing import Annotated, Any, Iterable

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, model_serializer, model_validator


class Element(BaseModel):
    """One copy ``w_i`` of the number ``w``: ``group`` is the copy subscript.

    Distinct groups never share elements, which is how the constructions keep
    their building blocks disjoint.
    """

    model_config = ConfigDict(frozen=True)

    group: int = Field(ge=0)
    index: int = Field(ge=1)

    @model_validator(mode="before")
    @classmethod
    def _from_pair(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            if len(data) != 2:
                raise ValueError("an element is a [group, index] pair")
            return {"group": data[0], "index": data[1]}
        return data

    @model_serializer
    def _as_pair(self) -> list[int]:
        return [self.group, self.index]

    @property
    def key(self) -> tuple[int, int]:
        return (self.group, self.index)

    def __lt__(self, other: "Element") -> bool:
        return self.key < other.key


def _dump_set(members: frozenset[Element]) -> list[list[int]]:
    return [[e.group, e.index] for e in sorted(members)]


FiniteSet = Annotated[frozenset[Element], PlainSerializer(_dump_set, return_type=list)]


def copies(width: int, group: int) -> frozenset[Element]:
    """The set ``[width]_group`` = {1_group, ..., width_group}."""
    return frozenset(Element(group=group, index=i) for i in range(1, width + 1))


def set_key(members: frozenset[Element]) -> tuple[int, list[tuple[int, int]]]:
    return (len(members), [e.key for e in sorted(members)])


class SetFamily(BaseModel):
    """A finite family of finite sets; its ideal is the union of the members' power sets."""

    model_config = ConfigDict(frozen=True)

    members: tuple[FiniteSet, ...] = ()

    @classmethod
    def of(cls, members: Iterable[Iterable[Element]]) -> "SetFamily":
        return cls(members=tuple(frozenset(m) for m in members))

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def universe(self) -> frozenset[Element]:
        return frozenset().union(*self.members)

    @property
    def groups(self) -> frozenset[int]:
        return frozenset(e.group for e in self.universe)

    def canonical_members(self) -> list[frozenset[Element]]:
        return sorted(self.members, key=set_key)

    def canonical(self) -> "SetFamily":
        return SetFamily(members=tuple(self.canonical_members()))

    @model_serializer
    def _canonical_payload(self) -> dict[str, Any]:
        # Bit-exact canonical form: members by (size, element order), elements by (group, index).
        return {"members": [_dump_set(m) for m in self.canonical_members()]}
