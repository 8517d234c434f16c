"""Build traces: derivation trees that certify a constructed family's ideal size.

In memory a trace is a tree of frozen nodes. On disk it is a flat node table
(children listed before parents, referenced by id) so arbitrarily deep traces
never hit JSON or validator recursion limits.
"""

from typing import Annotated, Iterator, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from idealforge.models.family import FiniteSet, SetFamily
from idealforge.models.numeric import Nat

LeafMethod = Literal["power", "block-base", "sqrt-system", "inclusion-exclusion"]

TRACE_FORMAT = "idealforge-trace/1"


class LeafNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["leaf"] = "leaf"
    count: Nat
    method: LeafMethod
    # Construction order, before normalization; sqrt-system leaves list S_0..S_{q-1} then T_0..T_{q-1}.
    members: tuple[FiniteSet, ...]


class SplitNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["split"] = "split"
    count: Nat
    left: "BuildTrace"
    right: "BuildTrace"
    rehomed: bool = False


class LiftNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["lift"] = "lift"
    count: Nat
    t: int = Field(ge=0)
    group: Optional[int] = None
    child: "BuildTrace"


class SqrtBaseNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["sqrt-base"] = "sqrt-base"
    count: Nat
    q: int = Field(ge=2)
    beta: Nat
    body: "BuildTrace"


BuildTrace = Annotated[
    Union[LeafNode, SplitNode, LiftNode, SqrtBaseNode], Field(discriminator="kind")
]

SplitNode.model_rebuild()
LiftNode.model_rebuild()
SqrtBaseNode.model_rebuild()


class CertifiedFamily(BaseModel):
    """A family together with its claimed ideal size and the trace that certifies it."""

    model_config = ConfigDict(frozen=True)

    family: SetFamily
    count: Nat = Field(ge=1)
    trace: BuildTrace

    @property
    def size(self) -> int:
        return self.family.size


def children(node: BuildTrace) -> tuple[BuildTrace, ...]:
    if isinstance(node, SplitNode):
        return (node.left, node.right)
    if isinstance(node, LiftNode):
        return (node.child,)
    if isinstance(node, SqrtBaseNode):
        return (node.body,)
    return ()


def iter_postorder(root: BuildTrace) -> Iterator[BuildTrace]:
    """Yield every node once, children before parents, without recursion."""
    seen: set[int] = set()
    stack: list[tuple[BuildTrace, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in seen:
            continue
        if expanded:
            seen.add(id(node))
            yield node
            continue
        stack.append((node, True))
        for child in reversed(children(node)):
            if id(child) not in seen:
                stack.append((child, False))


# -------------------------------------------------------------------
# Flat node table (JSON export)
# -------------------------------------------------------------------


class LeafRecord(BaseModel):
    id: int = Field(ge=0)
    kind: Literal["leaf"] = "leaf"
    count: Nat
    method: LeafMethod
    members: list[FiniteSet]


class SplitRecord(BaseModel):
    id: int = Field(ge=0)
    kind: Literal["split"] = "split"
    count: Nat
    left: int = Field(ge=0)
    right: int = Field(ge=0)
    rehomed: bool = False


class LiftRecord(BaseModel):
    id: int = Field(ge=0)
    kind: Literal["lift"] = "lift"
    count: Nat
    t: int = Field(ge=0)
    group: Optional[int] = None
    child: int = Field(ge=0)


class SqrtBaseRecord(BaseModel):
    id: int = Field(ge=0)
    kind: Literal["sqrt-base"] = "sqrt-base"
    count: Nat
    q: int = Field(ge=2)
    beta: Nat
    body: int = Field(ge=0)


TraceRecord = Annotated[
    Union[LeafRecord, SplitRecord, LiftRecord, SqrtBaseRecord], Field(discriminator="kind")
]


class TraceDocument(BaseModel):
    format: Literal["idealforge-trace/1"] = TRACE_FORMAT
    root: int = Field(ge=0)
    nodes: list[TraceRecord]


def flatten(root: BuildTrace) -> TraceDocument:
    ids: dict[int, int] = {}
    records: list[TraceRecord] = []
    for node in iter_postorder(root):
        node_id = len(records)
        ids[id(node)] = node_id
        if isinstance(node, LeafNode):
            record = LeafRecord(id=node_id, count=node.count, method=node.method, members=list(node.members))
        elif isinstance(node, SplitNode):
            record = SplitRecord(
                id=node_id,
                count=node.count,
                left=ids[id(node.left)],
                right=ids[id(node.right)],
                rehomed=node.rehomed,
            )
        elif isinstance(node, LiftNode):
            record = LiftRecord(id=node_id, count=node.count, t=node.t, group=node.group, child=ids[id(node.child)])
        else:
            record = SqrtBaseRecord(id=node_id, count=node.count, q=node.q, beta=node.beta, body=ids[id(node.body)])
        records.append(record)
    return TraceDocument(root=ids[id(root)], nodes=records)


def unflatten(document: TraceDocument) -> BuildTrace:
    built: dict[int, BuildTrace] = {}

    def ref(record_id: int, child_id: int) -> BuildTrace:
        if child_id not in built:
            raise ValueError(f"node {record_id} references node {child_id} before it is defined")
        return built[child_id]

    for record in document.nodes:
        if record.id in built:
            raise ValueError(f"duplicate node id {record.id}")
        if isinstance(record, LeafRecord):
            node: BuildTrace = LeafNode(count=record.count, method=record.method, members=tuple(record.members))
        elif isinstance(record, SplitRecord):
            node = SplitNode(
                count=record.count,
                left=ref(record.id, record.left),
                right=ref(record.id, record.right),
                rehomed=record.rehomed,
            )
        elif isinstance(record, LiftRecord):
            node = LiftNode(count=record.count, t=record.t, group=record.group, child=ref(record.id, record.child))
        else:
            node = SqrtBaseNode(count=record.count, q=record.q, beta=record.beta, body=ref(record.id, record.body))
        built[record.id] = node
    if document.root not in built:
        raise ValueError(f"root {document.root} is not a defined node")
    return built[document.root]
