"""Language-model capabilities behind one contract.

Two backends: a deterministic stub (templates + lexicon lookup, fully
reproducible given a seed) and an external chat-completion client with
structured-output schemas, retries, and schema enforcement. The question
engine never sees provider output that fails the contract invariants.
"""

from __future__ import annotations

import json
import logging
import os
import random
import re
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

from .design_space import DecisionDef
from .graph import DATA_ACTIONS, INTERACTIONS, NodeKind, Node, PrivacyGraph

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).parent / "data" / "templates"
LEXICON_PATH = Path(__file__).parent / "data" / "domain_lexicon.json"


class ProviderError(Exception):
    pass


class ProviderFailure(ProviderError):
    def __init__(self, message: str, raw_payload: Optional[str] = None):
        super().__init__(message)
        self.raw_payload = raw_payload


class ProviderTimeout(ProviderFailure):
    pass


class SchemaViolation(ProviderFailure):
    pass


@dataclass(frozen=True)
class NodeProposal:
    """An exploratory candidate: a new node plus its yes/no question."""

    kind: NodeKind
    label: str
    question: str
    target: Optional[str] = None  # attachment target; required for interactions


@dataclass(frozen=True)
class RequirementsExpansion:
    requirements: tuple[str, ...]
    proposals: tuple[NodeProposal, ...]


@dataclass(frozen=True)
class RenderedQuestion:
    text: str
    options: tuple[str, ...]


@dataclass
class ProviderConfig:
    backend: str = "stub"  # stub | external
    endpoint: str = ""
    credential_env: str = "PRIVACY_ELICIT_API_KEY"
    model: str = ""
    temperature: float = 0.0
    top_p: float = 0.95
    max_tokens: int = 2000
    timeout_s: float = 30.0
    max_retries: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")


class ProviderContract(ABC):
    """Every language-model-dependent capability the engine relies on."""

    @abstractmethod
    def expand_requirements(self, design_goal: str) -> RequirementsExpansion: ...

    @abstractmethod
    def annotate_session_domains(
        self, design_goal: str, requirements: Sequence[str]
    ) -> set[str]: ...

    @abstractmethod
    def propose_exploratory(
        self, graph: PrivacyGraph, history: Sequence[Any]
    ) -> list[NodeProposal]: ...

    @abstractmethod
    def contextualize_question(
        self,
        definition: DecisionDef,
        value_set: Sequence[str],
        graph: PrivacyGraph,
        history: Sequence[Any],
    ) -> RenderedQuestion: ...

    @abstractmethod
    def follow_up(
        self, question: Any, answer: Any, graph: PrivacyGraph
    ) -> Optional[str]: ...

    @abstractmethod
    def is_duplicate(
        self, candidate: Any, history: Sequence[Any], graph: PrivacyGraph
    ) -> bool: ...

    @abstractmethod
    def summarize_issues(self, node: Node) -> list[str]: ...


# ---------------------------------------------------------------------------
# deterministic stub
# ---------------------------------------------------------------------------

_KIND_ORDER = [
    NodeKind.COLLECT,
    NodeKind.PROCESS,
    NodeKind.STORE,
    NodeKind.SHARE,
    NodeKind.CONSENT,
    NodeKind.NOTICE,
    NodeKind.CONTROL,
    NodeKind.ACCESS,
    NodeKind.REQUEST,
    NodeKind.AUDIT,
    # influence is representable but never proposed: no seed decision keys target it
]

_KIND_TEMPLATES = {
    NodeKind.COLLECT: ("Collect data for {topic}", "Would this feature collect user data for {topic}?"),
    NodeKind.PROCESS: ("Process collected data for {topic}", "Would this feature process the collected data to derive new information?"),
    NodeKind.STORE: ("Store data for {topic}", "Would this feature keep the data in persistent storage?"),
    NodeKind.SHARE: ("Share data with other parties", "Would this feature share the data with other parties?"),
    NodeKind.CONSENT: ("Obtain consent for data collection", "Would users give permission before this data action happens?"),
    NodeKind.NOTICE: ("Notify users about the data action", "Would users be informed about this data action or its results?"),
    NodeKind.CONTROL: ("Let users control this data action", "Would users have settings that control how their data is handled?"),
    NodeKind.ACCESS: ("Access the data for a specific purpose", "Would anyone access or use the data or derived results?"),
    NodeKind.REQUEST: ("Handle user data-rights requests", "Would users be able to ask to exercise their data rights?"),
    NodeKind.AUDIT: ("Audit this data action for compliance", "Would the data actions be examined for compliance with policies?"),
}


def _load_lexicon() -> dict[str, list[str]]:
    with open(LEXICON_PATH, encoding="utf-8") as fp:
        return json.load(fp)


@dataclass
class StubProvider(ProviderContract):
    """Deterministic given the seed; the engine's whole test suite runs
    against this backend with zero network access."""

    seed: int = 0
    lexicon: dict[str, list[str]] = field(default_factory=_load_lexicon)

    def expand_requirements(self, design_goal: str) -> RequirementsExpansion:
        topic = _topic(design_goal)
        requirements = (
            f"The system provides {topic}.",
            f"The system collects the data needed for {topic}.",
            f"The system processes collected data to support {topic}.",
            "Users interact with the feature through the existing application interface.",
        )
        proposals = (
            NodeProposal(
                NodeKind.COLLECT,
                _KIND_TEMPLATES[NodeKind.COLLECT][0].format(topic=topic),
                _KIND_TEMPLATES[NodeKind.COLLECT][1].format(topic=topic),
            ),
            NodeProposal(
                NodeKind.PROCESS,
                _KIND_TEMPLATES[NodeKind.PROCESS][0].format(topic=topic),
                _KIND_TEMPLATES[NodeKind.PROCESS][1].format(topic=topic),
            ),
        )
        return RequirementsExpansion(requirements, proposals)

    def annotate_session_domains(self, design_goal, requirements) -> set[str]:
        text = " ".join([design_goal, *requirements]).lower()
        labels: set[str] = set()
        for term, mapped in self.lexicon.items():
            if term in text:
                labels.update(mapped)
        return labels

    def propose_exploratory(self, graph, history) -> list[NodeProposal]:
        present = {n.kind for n in graph.nodes.values()}
        topic = "this feature"
        target = graph.data_flow[0] if graph.data_flow else None
        proposals = []
        for kind in _KIND_ORDER:
            if kind in present:
                continue
            if kind in INTERACTIONS and target is None:
                continue
            label_t, question_t = _KIND_TEMPLATES[kind]
            proposals.append(
                NodeProposal(
                    kind,
                    label_t.format(topic=topic),
                    question_t.format(topic=topic),
                    target=target if kind in INTERACTIONS else None,
                )
            )
        return proposals

    def contextualize_question(self, definition, value_set, graph, history):
        node_label = _target_label(definition, graph)
        text = f"For {node_label}, which applies to {definition.key}?"
        return RenderedQuestion(text, tuple(value_set))

    def follow_up(self, question, answer, graph) -> Optional[str]:
        return None

    def is_duplicate(self, candidate, history, graph) -> bool:
        key = getattr(candidate, "decision_key", None)
        target = getattr(candidate, "target_node", None)
        return any(
            getattr(q, "decision_key", None) == key
            and getattr(q, "target_node", None) == target
            for q in history
        )

    def summarize_issues(self, node: Node) -> list[str]:
        issues = []
        for key, value in node.decisions.items():
            chosen = ", ".join(value.selected) or (value.custom or "")
            issues.append(
                f"'{node.label}' sets {key} to {chosen}; review whether this "
                "choice could be problematic for the individuals involved."
            )
        return issues


def stub_provider(seed: int = 0) -> StubProvider:
    return StubProvider(seed=seed)


def _topic(goal: str) -> str:
    words = re.sub(r"\s+", " ", goal.strip()).strip(".")
    return words[0].lower() + words[1:] if words else "the feature"


def _target_label(definition: DecisionDef, graph: PrivacyGraph) -> str:
    for node in graph.nodes.values():
        if node.kind is definition.node_kind:
            return node.label
    return f"the {definition.node_kind.value} step"


# ---------------------------------------------------------------------------
# external chat-completion client
# ---------------------------------------------------------------------------

_SCHEMAS: dict[str, dict] = {
    "expand_requirements": {
        "type": "object",
        "required": ["requirements", "proposals"],
        "properties": {
            "requirements": {"type": "array", "items": {"type": "string"}},
            "proposals": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["kind", "label", "question"],
                    "properties": {
                        "kind": {"type": "string"},
                        "label": {"type": "string"},
                        "question": {"type": "string"},
                        "target": {"type": ["string", "null"]},
                    },
                },
            },
        },
    },
    "annotate_domains": {
        "type": "object",
        "required": ["labels"],
        "properties": {"labels": {"type": "array", "items": {"type": "string"}}},
    },
    "propose_exploratory": {
        "type": "object",
        "required": ["proposals"],
        "properties": {
            "proposals": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["kind", "label", "question"],
                    "properties": {
                        "kind": {"type": "string"},
                        "label": {"type": "string"},
                        "question": {"type": "string"},
                        "target": {"type": ["string", "null"]},
                    },
                },
            }
        },
    },
    "contextualize": {
        "type": "object",
        "required": ["question", "options"],
        "properties": {
            "question": {"type": "string"},
            "options": {"type": "array", "items": {"type": "string"}},
        },
    },
    "follow_up": {
        "type": "object",
        "required": ["follow_up"],
        "properties": {"follow_up": {"type": ["string", "null"]}},
    },
    "is_duplicate": {
        "type": "object",
        "required": ["duplicate"],
        "properties": {"duplicate": {"type": "boolean"}},
    },
    "summarize_issues": {
        "type": "object",
        "required": ["issues"],
        "properties": {"issues": {"type": "array", "items": {"type": "string"}}},
    },
    "mine_relevance": {
        "type": "object",
        "required": ["relevant", "confidence"],
        "properties": {
            "relevant": {"type": "boolean"},
            "confidence": {"type": "number", "minimum": 0, "maximum": 1},
        },
    },
    "mine_segment": {
        "type": "object",
        "required": ["segments"],
        "properties": {"segments": {"type": "array", "items": {"type": "string"}}},
    },
    "mine_labels": {
        "type": "object",
        "required": ["labels"],
        "properties": {"labels": {"type": "array", "items": {"type": "string"}}},
    },
    "mine_extract": {
        "type": "object",
        "required": ["decisions"],
        "properties": {
            "decisions": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["key", "value"],
                    "properties": {
                        "key": {"type": "string"},
                        "value": {"type": "string"},
                    },
                },
            }
        },
    },
    "mine_discover": {
        "type": "object",
        "required": ["keys"],
        "properties": {
            "keys": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["key", "kind", "values"],
                    "properties": {
                        "key": {"type": "string"},
                        "kind": {"type": "string"},
                        "values": {"type": "array", "items": {"type": "string"}},
                    },
                },
            }
        },
    },
}


def load_template(name: str) -> str:
    return (TEMPLATE_DIR / f"{name}.txt").read_text(encoding="utf-8")


def parse_structured(raw: str, schema_name: str) -> dict:
    """Parse + validate one model response body against its output schema."""
    import jsonschema

    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"response is not valid JSON: {exc}", raw_payload=raw)
    try:
        jsonschema.validate(payload, _SCHEMAS[schema_name])
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(f"schema check failed: {exc.message}", raw_payload=raw)
    return payload


def parse_contextualize(raw: str, value_set: Sequence[str]) -> RenderedQuestion:
    """Contextualized questions must keep option count and order; options are
    rephrasings, never additions or removals."""
    payload = parse_structured(raw, "contextualize")
    options = payload["options"]
    if len(options) != len(value_set):
        raise SchemaViolation(
            f"expected {len(value_set)} options, got {len(options)}", raw_payload=raw
        )
    return RenderedQuestion(payload["question"], tuple(options))


def parse_proposals(raw: str, graph: PrivacyGraph, schema_name: str = "propose_exploratory") -> list[NodeProposal]:
    payload = parse_structured(raw, schema_name)
    proposals = []
    for item in payload["proposals"]:
        try:
            kind = NodeKind(item["kind"])
        except ValueError:
            raise SchemaViolation(f"invalid node kind {item['kind']!r}", raw_payload=raw)
        target = item.get("target")
        if kind in INTERACTIONS:
            if not target or target not in graph.nodes:
                raise SchemaViolation(
                    f"interaction proposal needs an existing target, got {target!r}",
                    raw_payload=raw,
                )
        proposals.append(NodeProposal(kind, item["label"], item["question"], target))
    return proposals


class ExternalProvider(ProviderContract):
    """Chat-completion wire client. One request per contract call; schema
    failures retry then surface as ProviderFailure with the raw payload."""

    def __init__(self, config: ProviderConfig):
        self.config = config
        self._rng = random.Random(config.seed)

    # -- transport -----------------------------------------------------------

    def _complete(self, template_name: str, variables: dict[str, str]) -> str:
        import httpx

        prompt = load_template(template_name)
        for k, v in variables.items():
            prompt = prompt.replace("{{" + k + "}}", v)
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "top_p": self.config.top_p,
            "max_tokens": self.config.max_tokens,
        }
        headers = {}
        credential = os.environ.get(self.config.credential_env)
        if credential:
            headers["Authorization"] = f"Bearer {credential}"
        try:
            resp = httpx.post(
                self.config.endpoint,
                json=body,
                headers=headers,
                timeout=self.config.timeout_s,
            )
            resp.raise_for_status()
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(str(exc))
        except httpx.HTTPError as exc:
            raise ProviderFailure(str(exc))
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderFailure(f"malformed completion envelope: {exc}", resp.text)

    def _call(self, template_name: str, variables: dict[str, str], parse) -> Any:
        last: Optional[ProviderFailure] = None
        for attempt in range(self.config.max_retries + 1):
            try:
                raw = self._complete(template_name, variables)
                return parse(raw)
            except ProviderFailure as exc:
                last = exc
                if attempt < self.config.max_retries:
                    time.sleep(self._rng.uniform(0.1, 0.5) * (attempt + 1))
        assert last is not None
        raise last

    # -- contract ------------------------------------------------------------

    def expand_requirements(self, design_goal):
        def parse(raw: str) -> RequirementsExpansion:
            payload = parse_structured(raw, "expand_requirements")
            proposals = []
            for item in payload["proposals"]:
                try:
                    kind = NodeKind(item["kind"])
                except ValueError:
                    raise SchemaViolation(f"invalid node kind {item['kind']!r}", raw)
                if kind not in DATA_ACTIONS:
                    raise SchemaViolation("initial proposals must be data actions", raw)
                proposals.append(NodeProposal(kind, item["label"], item["question"]))
            return RequirementsExpansion(tuple(payload["requirements"]), tuple(proposals))

        return self._call("expand_requirements", {"goal": design_goal}, parse)

    def annotate_session_domains(self, design_goal, requirements):
        def parse(raw: str) -> set[str]:
            return set(parse_structured(raw, "annotate_domains")["labels"])

        return self._call(
            "annotate_domains",
            {"goal": design_goal, "requirements": "\n".join(requirements)},
            parse,
        )

    def propose_exploratory(self, graph, history):
        return self._call(
            "propose_exploratory",
            {
                "graph": json.dumps(_graph_summary(graph)),
                "history": json.dumps([getattr(q, "text", str(q)) for q in history]),
            },
            lambda raw: parse_proposals(raw, graph),
        )

    def contextualize_question(self, definition, value_set, graph, history):
        return self._call(
            "contextualize",
            {
                "key": definition.key,
                "description": definition.description,
                "options": json.dumps(list(value_set)),
                "graph": json.dumps(_graph_summary(graph)),
                "history": json.dumps([getattr(q, "text", str(q)) for q in history]),
            },
            lambda raw: parse_contextualize(raw, value_set),
        )

    def follow_up(self, question, answer, graph):
        def parse(raw: str) -> Optional[str]:
            return parse_structured(raw, "follow_up")["follow_up"]

        return self._call(
            "follow_up",
            {
                "question": getattr(question, "text", str(question)),
                "answer": json.dumps(getattr(answer, "to_dict", lambda: str(answer))()),
                "graph": json.dumps(_graph_summary(graph)),
            },
            parse,
        )

    def is_duplicate(self, candidate, history, graph):
        def parse(raw: str) -> bool:
            return bool(parse_structured(raw, "is_duplicate")["duplicate"])

        return self._call(
            "duplicate_check",
            {
                "question": getattr(candidate, "text", str(candidate)),
                "history": json.dumps([getattr(q, "text", str(q)) for q in history]),
                "graph": json.dumps(_graph_summary(graph)),
            },
            parse,
        )

    def summarize_issues(self, node):
        def parse(raw: str) -> list[str]:
            return list(parse_structured(raw, "summarize_issues")["issues"])

        return self._call(
            "summarize_issues",
            {"node": json.dumps(node.to_dict())},
            parse,
        )


def _graph_summary(graph: PrivacyGraph) -> dict:
    return {
        "data_flow": [graph.nodes[i].label for i in graph.data_flow],
        "interactions": [
            {"label": graph.nodes[i].label, "attached_to": graph.nodes[t].label}
            for i, t in graph.attachments.items()
        ],
    }


def external_provider(config: ProviderConfig) -> ExternalProvider:
    return ExternalProvider(config)


def make_provider(config: ProviderConfig) -> ProviderContract:
    if config.backend == "stub":
        return stub_provider(config.seed)
    if config.backend == "external":
        return external_provider(config)
    raise ValueError(f"unknown provider backend {config.backend!r}")
