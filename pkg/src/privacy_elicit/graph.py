"""Multi-layer privacy representation: data-flow graph, stakeholder
interactions, and per-node design decisions.

The graph is event-sourced: every mutation is a GraphEvent, and replaying
the full event log from an empty graph reproduces the current state exactly.
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable, Optional

EVENT_SCHEMA = "privacy-graph-events/1"
SNAPSHOT_SCHEMA = "privacy-graph-snapshot/1"

_KEY_RE = re.compile(r"^[a-z0-9]+(?:_[a-z0-9]+)*$")


class GraphError(Exception):
    """Base class for representation errors."""


class UnknownNode(GraphError):
    pass


class UnknownDecision(GraphError):
    pass


class KindMismatch(GraphError):
    pass


class DuplicateNode(GraphError):
    pass


class SequenceGap(GraphError):
    pass


class InvalidValue(GraphError):
    pass


class NodeKind(str, Enum):
    # data actions
    COLLECT = "collect"
    PROCESS = "process"
    STORE = "store"
    SHARE = "share"
    # stakeholder interactions
    CONSENT = "consent"
    NOTICE = "notice"
    CONTROL = "control"
    ACCESS = "access"
    REQUEST = "request"
    AUDIT = "audit"
    INFLUENCE = "influence"

    @property
    def is_data_action(self) -> bool:
        return self in DATA_ACTIONS

    @property
    def is_interaction(self) -> bool:
        return self in INTERACTIONS


DATA_ACTIONS = frozenset(
    {NodeKind.COLLECT, NodeKind.PROCESS, NodeKind.STORE, NodeKind.SHARE}
)
INTERACTIONS = frozenset(
    {
        NodeKind.CONSENT,
        NodeKind.NOTICE,
        NodeKind.CONTROL,
        NodeKind.ACCESS,
        NodeKind.REQUEST,
        NodeKind.AUDIT,
        NodeKind.INFLUENCE,
    }
)


def is_canonical_key(key: str) -> bool:
    return bool(_KEY_RE.match(key))


@dataclass(frozen=True)
class DecisionValue:
    """One answered design decision: selected options and/or a custom text."""

    selected: tuple[str, ...] = ()
    custom: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.selected and not (self.custom and self.custom.strip()):
            raise InvalidValue("decision value needs options or a custom response")

    def to_dict(self) -> dict:
        return {"selected": list(self.selected), "custom": self.custom}

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionValue":
        return cls(selected=tuple(d.get("selected") or ()), custom=d.get("custom"))


@dataclass
class Node:
    id: str
    kind: NodeKind
    label: str
    decisions: dict[str, DecisionValue] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "label": self.label,
            "decisions": {k: v.to_dict() for k, v in self.decisions.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Node":
        return cls(
            id=d["id"],
            kind=NodeKind(d["kind"]),
            label=d["label"],
            decisions={
                k: DecisionValue.from_dict(v) for k, v in d.get("decisions", {}).items()
            },
        )


class EventType(str, Enum):
    ADD_DATA_ACTION = "add_data_action"
    ADD_INTERACTION = "add_interaction"
    SET_DECISION = "set_decision"
    REVISE_DECISION = "revise_decision"
    REMOVE_NODE = "remove_node"


@dataclass(frozen=True)
class GraphEvent:
    seq: int
    type: EventType
    data: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "type": self.type.value, "data": self.data}

    @classmethod
    def from_dict(cls, d: dict) -> "GraphEvent":
        return cls(seq=d["seq"], type=EventType(d["type"]), data=d["data"])


def add_data_action(seq: int, node_id: str, kind: NodeKind, label: str) -> GraphEvent:
    return GraphEvent(
        seq, EventType.ADD_DATA_ACTION, {"node_id": node_id, "kind": kind.value, "label": label}
    )


def add_interaction(
    seq: int, node_id: str, kind: NodeKind, label: str, target: str
) -> GraphEvent:
    return GraphEvent(
        seq,
        EventType.ADD_INTERACTION,
        {"node_id": node_id, "kind": kind.value, "label": label, "target": target},
    )


def set_decision(seq: int, node_id: str, key: str, value: DecisionValue) -> GraphEvent:
    return GraphEvent(
        seq,
        EventType.SET_DECISION,
        {"node_id": node_id, "key": key, "value": value.to_dict()},
    )


def revise_decision(seq: int, node_id: str, key: str, value: DecisionValue) -> GraphEvent:
    return GraphEvent(
        seq,
        EventType.REVISE_DECISION,
        {"node_id": node_id, "key": key, "value": value.to_dict()},
    )


def remove_node(seq: int, node_id: str) -> GraphEvent:
    return GraphEvent(seq, EventType.REMOVE_NODE, {"node_id": node_id})


@dataclass
class PrivacyGraph:
    """Three layers: ordered data-action flow, interactions attached to data
    actions, and per-node decisions. Treat instances as values; mutate only
    through apply_event, which returns a new graph."""

    nodes: dict[str, Node] = field(default_factory=dict)
    data_flow: list[str] = field(default_factory=list)
    attachments: dict[str, str] = field(default_factory=dict)  # interaction -> data action
    events: list[GraphEvent] = field(default_factory=list)

    @property
    def interactions(self) -> list[str]:
        return list(self.attachments)

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node id {node_id!r}") from None

    def has_labeled(self, kind: NodeKind, label: str) -> bool:
        return any(n.kind == kind and n.label == label for n in self.nodes.values())

    def data_action_nodes(self) -> list[Node]:
        return [self.nodes[i] for i in self.data_flow]

    def interactions_of(self, node_id: str) -> list[Node]:
        return [self.nodes[i] for i, t in self.attachments.items() if t == node_id]

    def to_dict(self) -> dict:
        return {
            "schema": SNAPSHOT_SCHEMA,
            "nodes": {i: n.to_dict() for i, n in self.nodes.items()},
            "data_flow": list(self.data_flow),
            "attachments": dict(self.attachments),
            "events": [e.to_dict() for e in self.events],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PrivacyGraph":
        return cls(
            nodes={i: Node.from_dict(n) for i, n in d.get("nodes", {}).items()},
            data_flow=list(d.get("data_flow", [])),
            attachments=dict(d.get("attachments", {})),
            events=[GraphEvent.from_dict(e) for e in d.get("events", [])],
        )


def apply_event(graph: PrivacyGraph, event: GraphEvent) -> PrivacyGraph:
    """Apply one event, returning a new graph. Rejected events raise and
    leave the input untouched."""
    expected = len(graph.events) + 1
    if event.seq != expected:
        raise SequenceGap(f"expected sequence {expected}, got {event.seq}")
    _validate(graph, event)

    g = copy.deepcopy(graph)
    d = event.data
    if event.type is EventType.ADD_DATA_ACTION:
        node = Node(d["node_id"], NodeKind(d["kind"]), d["label"])
        g.nodes[node.id] = node
        g.data_flow.append(node.id)
    elif event.type is EventType.ADD_INTERACTION:
        node = Node(d["node_id"], NodeKind(d["kind"]), d["label"])
        g.nodes[node.id] = node
        g.attachments[node.id] = d["target"]
    elif event.type in (EventType.SET_DECISION, EventType.REVISE_DECISION):
        g.nodes[d["node_id"]].decisions[d["key"]] = DecisionValue.from_dict(d["value"])
    elif event.type is EventType.REMOVE_NODE:
        node_id = d["node_id"]
        node = g.nodes.pop(node_id)
        if node.kind.is_data_action:
            g.data_flow.remove(node_id)
            # removing a data action takes its attached interactions with it
            for iid in [i for i, t in g.attachments.items() if t == node_id]:
                del g.attachments[iid]
                del g.nodes[iid]
        else:
            del g.attachments[node_id]
    g.events.append(event)
    return g


def _validate(graph: PrivacyGraph, event: GraphEvent) -> None:
    d = event.data
    if event.type is EventType.ADD_DATA_ACTION:
        kind = NodeKind(d["kind"])
        if not kind.is_data_action:
            raise KindMismatch(f"{kind.value} is not a data action")
        _check_new_node(graph, d["node_id"], kind, d["label"])
    elif event.type is EventType.ADD_INTERACTION:
        kind = NodeKind(d["kind"])
        if not kind.is_interaction:
            raise KindMismatch(f"{kind.value} is not a stakeholder interaction")
        _check_new_node(graph, d["node_id"], kind, d["label"])
        target = d["target"]
        if target not in graph.nodes:
            raise UnknownNode(f"attachment target {target!r} does not exist")
        if not graph.nodes[target].kind.is_data_action:
            raise KindMismatch("interactions attach to data-action nodes only")
    elif event.type in (EventType.SET_DECISION, EventType.REVISE_DECISION):
        if d["node_id"] not in graph.nodes:
            raise UnknownNode(f"unknown node id {d['node_id']!r}")
        if not is_canonical_key(d["key"]):
            raise InvalidValue(f"decision key {d['key']!r} is not canonical")
        DecisionValue.from_dict(d["value"])  # raises InvalidValue when empty
        if (
            event.type is EventType.REVISE_DECISION
            and d["key"] not in graph.nodes[d["node_id"]].decisions
        ):
            raise UnknownDecision(f"cannot revise unanswered key {d['key']!r}")
    elif event.type is EventType.REMOVE_NODE:
        if d["node_id"] not in graph.nodes:
            raise UnknownNode(f"unknown node id {d['node_id']!r}")


def _check_new_node(graph: PrivacyGraph, node_id: str, kind: NodeKind, label: str) -> None:
    if not label or not label.strip():
        raise InvalidValue("node label must be non-empty")
    if node_id in graph.nodes:
        raise DuplicateNode(f"node id {node_id!r} already exists")
    if graph.has_labeled(kind, label):
        raise DuplicateNode(f"({kind.value}, {label!r}) already present")


def replay(events: Iterable[GraphEvent]) -> PrivacyGraph:
    """Fold apply_event over a gap-free event log starting at sequence 1."""
    graph = PrivacyGraph()
    for event in events:
        graph = apply_event(graph, event)
    return graph


def missing_kinds(graph: PrivacyGraph) -> set[NodeKind]:
    present = {n.kind for n in graph.nodes.values()}
    return set(NodeKind) - present


def check_invariants(graph: PrivacyGraph) -> list[str]:
    """Return every invariant violation (empty list means a valid graph)."""
    problems: list[str] = []
    for node_id in graph.data_flow:
        if node_id not in graph.nodes:
            problems.append(f"data_flow references missing node {node_id}")
        elif not graph.nodes[node_id].kind.is_data_action:
            problems.append(f"data_flow node {node_id} is not a data action")
    for iid, target in graph.attachments.items():
        if iid not in graph.nodes:
            problems.append(f"attachment references missing interaction {iid}")
        elif not graph.nodes[iid].kind.is_interaction:
            problems.append(f"attached node {iid} is not an interaction")
        if target not in graph.nodes:
            problems.append(f"interaction {iid} attached to missing node {target}")
        elif target not in graph.data_flow:
            problems.append(f"interaction {iid} attached outside the data flow")
    referenced = set(graph.data_flow) | set(graph.attachments)
    for node_id in graph.nodes:
        if node_id not in referenced:
            problems.append(f"orphan node {node_id}")
    seen_pairs = set()
    for node in graph.nodes.values():
        pair = (node.kind, node.label)
        if pair in seen_pairs:
            problems.append(f"duplicate (kind, label) pair {pair}")
        seen_pairs.add(pair)
        if not node.label.strip():
            problems.append(f"node {node.id} has an empty label")
        for key, value in node.decisions.items():
            if not is_canonical_key(key):
                problems.append(f"node {node.id} key {key!r} not canonical")
            if not value.selected and not (value.custom and value.custom.strip()):
                problems.append(f"node {node.id} key {key!r} has an empty value")
    for i, event in enumerate(graph.events, start=1):
        if event.seq != i:
            problems.append(f"event log gap at position {i} (seq {event.seq})")
            break
    return problems


def write_event_log(events: Iterable[GraphEvent], fp: IO[str]) -> None:
    fp.write(json.dumps({"schema": EVENT_SCHEMA}) + "\n")
    for event in events:
        fp.write(json.dumps(event.to_dict(), sort_keys=True) + "\n")


def read_event_log(fp: IO[str]) -> list[GraphEvent]:
    header = json.loads(fp.readline())
    if header.get("schema") != EVENT_SCHEMA:
        raise GraphError(f"unsupported event log schema {header.get('schema')!r}")
    return [GraphEvent.from_dict(json.loads(line)) for line in fp if line.strip()]
