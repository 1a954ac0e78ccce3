"""Session state machine: generates, prioritizes, deduplicates, serves, and
records questions; applies answers as graph events; enforces termination.

Sessions are deterministic under the stub provider: the full served-question
sequence is a pure function of the seed and the answer sequence, which is
what makes crash recovery a straight replay of recorded user inputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Sequence

from . import graph as g
from .design_space import (
    DEFAULT_SENTINEL_FLOOR,
    DEFAULT_SIMILARITY_THRESHOLD,
    DataPractice,
    DecisionDef,
    DesignSpace,
    candidate_decisions,
    rank_by_prior_choices,
    relevant_practices,
)
from .graph import DecisionValue, NodeKind, PrivacyGraph
from .provider import NodeProposal, ProviderContract, ProviderFailure

HARD_QUESTION_LIMIT = 25
TOP_K = 3


class EngineError(Exception):
    pass


class EmptyGoal(EngineError):
    pass


class StaleQuestion(EngineError):
    pass


class OptionOutOfRange(EngineError):
    pass


class BudgetExhausted(EngineError):
    pass


class StageError(EngineError):
    pass


class Stage(str, Enum):
    GOAL_ENTRY = "goal_entry"
    REQUIREMENTS = "requirements"
    QUESTION_LOOP = "question_loop"
    ASSESSMENT = "assessment"
    EXPORTED = "exported"


class Mode(str, Enum):
    AUTO = "auto"
    FORCED_EXPLORE = "explore"
    FORCED_EXPLOIT = "exploit"


class QuestionKind(str, Enum):
    EXPLORATORY = "exploratory"
    EXPLOITATIVE = "exploitative"
    FOLLOW_UP = "follow_up"


class TerminationReason(str, Enum):
    HARD_LIMIT = "hard_limit"
    EARLY_STOP = "early_stop_heuristic"
    USER_STOP = "user_stop"


@dataclass
class EngineConfig:
    hard_limit: int = HARD_QUESTION_LIMIT
    top_k: int = TOP_K
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
    sentinel_floor: float = DEFAULT_SENTINEL_FLOOR
    # explore probability: max(floor, base - decay * questions_asked)
    explore_base: float = 0.7
    explore_decay: float = 0.05
    explore_floor: float = 0.1
    required_kinds: frozenset[NodeKind] = frozenset(
        {NodeKind.STORE, NodeKind.SHARE, NodeKind.CONSENT, NodeKind.NOTICE}
    )


@dataclass
class Question:
    id: str
    kind: QuestionKind
    text: str
    options: tuple[str, ...]
    target_node: Optional[str] = None  # node id for exploitative/follow-up
    decision_key: Optional[str] = None
    proposal: Optional[NodeProposal] = None  # exploratory only
    value_set: tuple[str, ...] = ()  # underlying values, 1:1 with options
    origin: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "text": self.text,
            "options": list(self.options),
            "target_node": self.target_node,
            "decision_key": self.decision_key,
            "proposed_kind": self.proposal.kind.value if self.proposal else None,
            "origin": self.origin,
        }


@dataclass
class Answer:
    question_id: str
    variant: str  # selected | custom | skip | revise
    selected: tuple[int, ...] = ()
    custom: Optional[str] = None
    revised: Optional["Answer"] = None  # for revise: the replacement answer

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "variant": self.variant,
            "selected": list(self.selected),
            "custom": self.custom,
            "revised": self.revised.to_dict() if self.revised else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Answer":
        return cls(
            question_id=d["question_id"],
            variant=d["variant"],
            selected=tuple(d.get("selected") or ()),
            custom=d.get("custom"),
            revised=cls.from_dict(d["revised"]) if d.get("revised") else None,
        )


@dataclass
class LogEntry:
    question: Question
    answer: Optional[Answer] = None


@dataclass
class Terminated:
    reason: TerminationReason


@dataclass
class Session:
    id: str
    seed: int
    space: DesignSpace
    provider: ProviderContract
    config: EngineConfig
    stage: Stage = Stage.GOAL_ENTRY
    design_goal: str = ""
    requirements: list[str] = field(default_factory=list)
    domain_labels: set[str] = field(default_factory=set)
    graph: PrivacyGraph = field(default_factory=PrivacyGraph)
    relevant: list[DataPractice] = field(default_factory=list)
    question_log: list[LogEntry] = field(default_factory=list)
    mode: Mode = Mode.AUTO
    terminated: Optional[TerminationReason] = None
    transitions: list[str] = field(default_factory=list)
    rng: random.Random = field(default_factory=random.Random)
    current: Optional[Question] = None
    followup_queue: list[Question] = field(default_factory=list)
    retired_proposals: set[tuple[NodeKind, str]] = field(default_factory=set)
    served_pairs: set[tuple[str, str]] = field(default_factory=set)
    assessment_edits: list[dict] = field(default_factory=list)
    _node_seq: int = 0
    _question_seq: int = 0

    @property
    def questions_asked(self) -> int:
        return len(self.question_log)

    def answered_keys(self) -> list[str]:
        """Decision keys answered so far, in answer order, without duplicates."""
        keys: list[str] = []
        for entry in self.question_log:
            k = entry.question.decision_key
            if (
                k
                and entry.answer
                and entry.answer.variant in ("selected", "custom")
                and k not in keys
            ):
                keys.append(k)
        return keys

    def history(self) -> list[Question]:
        return [entry.question for entry in self.question_log]

    def next_node_id(self) -> str:
        self._node_seq += 1
        return f"n{self._node_seq}"

    def next_question_id(self) -> str:
        self._question_seq += 1
        return f"q{self._question_seq}"

    def apply(self, event: g.GraphEvent) -> None:
        self.graph = g.apply_event(self.graph, event)

    def next_seq(self) -> int:
        return len(self.graph.events) + 1


def start_session(
    goal: str,
    space: DesignSpace,
    provider: ProviderContract,
    seed: int = 0,
    session_id: str = "session",
    config: Optional[EngineConfig] = None,
) -> Session:
    """Expand the goal into requirements, seed the graph with the proposed
    data actions, and compute the relevant corpus."""
    if not goal or not goal.strip():
        raise EmptyGoal("design goal must be non-empty")
    session = Session(
        id=session_id,
        seed=seed,
        space=space,
        provider=provider,
        config=config or EngineConfig(),
        design_goal=goal,
        rng=random.Random(seed),
    )
    expansion = provider.expand_requirements(goal)
    session.requirements = list(expansion.requirements)
    for proposal in expansion.proposals:
        node_id = session.next_node_id()
        if proposal.kind.is_data_action:
            session.apply(
                g.add_data_action(session.next_seq(), node_id, proposal.kind, proposal.label)
            )
        else:
            session.apply(
                g.add_interaction(
                    session.next_seq(), node_id, proposal.kind, proposal.label,
                    proposal.target or session.graph.data_flow[0],
                )
            )
    session.domain_labels = provider.annotate_session_domains(goal, session.requirements)
    session.relevant = relevant_practices(
        space, session.domain_labels, session.config.similarity_threshold
    )
    session.stage = Stage.REQUIREMENTS
    session.transitions.append("requirements")
    return session


def set_requirements(session: Session, requirements: Sequence[str]) -> None:
    if session.stage is not Stage.REQUIREMENTS:
        raise StageError(f"cannot edit requirements in stage {session.stage.value}")
    session.requirements = list(requirements)
    session.stage = Stage.QUESTION_LOOP
    session.transitions.append("question_loop")


def next_question(session: Session):
    """Serve the next question, or a Terminated marker. Serving a question
    spends one unit of the budget; the question stays current until answered."""
    if session.stage is not Stage.QUESTION_LOOP:
        raise StageError(f"not in the question loop (stage {session.stage.value})")
    if session.terminated:
        return Terminated(session.terminated)
    if session.current:
        return session.current
    if session.questions_asked >= session.config.hard_limit:
        session.terminated = TerminationReason.HARD_LIMIT
        session.transitions.append("terminated:hard_limit")
        return Terminated(session.terminated)

    question = _generate(session)
    if question is None:
        session.terminated = TerminationReason.EARLY_STOP
        session.transitions.append("terminated:early_stop")
        return Terminated(session.terminated)
    session.current = question
    session.question_log.append(LogEntry(question))
    if question.decision_key and question.target_node:
        session.served_pairs.add((question.target_node, question.decision_key))
    return question


def _generate(session: Session) -> Optional[Question]:
    explore = _choose_explore(session)
    if explore:
        question = _exploratory_question(session)
        if question is not None:
            return question
        # no exploratory candidates left; fall through to exploit
        if session.mode is Mode.FORCED_EXPLORE:
            return None
    return _exploitative_question(session)


def _choose_explore(session: Session) -> bool:
    if session.mode is Mode.FORCED_EXPLORE:
        return True
    if session.mode is Mode.FORCED_EXPLOIT:
        return False
    missing = g.missing_kinds(session.graph)
    if missing & session.config.required_kinds:
        return True
    last = session.question_log[-1] if session.question_log else None
    if (
        last
        and last.question.kind is QuestionKind.EXPLORATORY
        and last.answer
        and last.answer.variant == "skip"
    ):
        # a skipped exploratory question signals the topic is exhausted
        return False
    cfg = session.config
    p = max(cfg.explore_floor, cfg.explore_base - cfg.explore_decay * session.questions_asked)
    return session.rng.random() < p


def _exploratory_question(session: Session) -> Optional[Question]:
    try:
        proposals = session.provider.propose_exploratory(session.graph, session.history())
    except ProviderFailure:
        return None
    for proposal in proposals:
        if (proposal.kind, proposal.label) in session.retired_proposals:
            continue
        if session.graph.has_labeled(proposal.kind, proposal.label):
            continue
        if proposal.kind.is_interaction:
            target = proposal.target
            if not target or target not in session.graph.nodes:
                continue
            if not session.graph.nodes[target].kind.is_data_action:
                continue
        return Question(
            id=session.next_question_id(),
            kind=QuestionKind.EXPLORATORY,
            text=proposal.question,
            options=("yes", "no"),
            proposal=proposal,
            origin={"source": "exploratory"},
        )
    return None


def _exploitative_candidates(session: Session) -> list[tuple[str, DecisionDef, float]]:
    """(node id, definition, score) for every unanswered, unserved decision,
    best first. Node order follows the data flow, then attachment order."""
    prior = session.answered_keys()
    node_order = list(session.graph.data_flow) + list(session.graph.attachments)
    per_node: list[tuple[str, DecisionDef]] = []
    for node_id in node_order:
        node = session.graph.nodes[node_id]
        answered = set(node.decisions) | {
            key for (nid, key) in session.served_pairs if nid == node_id
        }
        for d in candidate_decisions(session.space, session.relevant, node.kind, answered):
            per_node.append((node_id, d))
    if not per_node:
        return []
    defs = []
    seen = set()
    for _, d in per_node:
        if (d.key, d.node_kind) not in seen:
            seen.add((d.key, d.node_kind))
            defs.append(d)
    ranked = rank_by_prior_choices(
        session.space, session.relevant, defs, prior, session.config.sentinel_floor
    )
    score_of = {(d.key, d.node_kind): s for d, s in ranked}
    rank_of = {(d.key, d.node_kind): i for i, (d, _) in enumerate(ranked)}
    out = [
        (node_id, d, score_of[(d.key, d.node_kind)]) for node_id, d in per_node
    ]
    out.sort(
        key=lambda t: (rank_of[(t[1].key, t[1].node_kind)], node_order.index(t[0]))
    )
    return out


def _exploitative_question(session: Session) -> Optional[Question]:
    if session.followup_queue:
        return session.followup_queue.pop(0)
    candidates = _exploitative_candidates(session)
    if not candidates:
        return None
    prior = session.answered_keys()
    if prior and all(s == session.config.sentinel_floor for _, _, s in candidates):
        # nothing left with any co-occurrence evidence
        return None
    top = candidates[: session.config.top_k]
    for node_id, definition, score in top + candidates[session.config.top_k :]:
        values = tuple(definition.values_for(session.domain_labels))
        try:
            rendered = session.provider.contextualize_question(
                definition, values, session.graph, session.history()
            )
        except ProviderFailure:
            continue
        question = Question(
            id=session.next_question_id(),
            kind=QuestionKind.EXPLOITATIVE,
            text=rendered.text,
            options=rendered.options,
            target_node=node_id,
            decision_key=definition.key,
            value_set=values,
            origin={"source": "exploitative", "score": score},
        )
        if (node_id, definition.key) in session.served_pairs:
            continue
        if session.provider.is_duplicate(question, session.history(), session.graph):
            session.served_pairs.add((node_id, definition.key))
            continue
        return question
    return None


def submit_answer(session: Session, answer: Answer) -> None:
    """Record an answer for the current question, or revise an earlier one."""
    if session.stage is not Stage.QUESTION_LOOP:
        raise StageError(f"not in the question loop (stage {session.stage.value})")
    if answer.variant == "revise":
        _revise(session, answer)
        return
    if not session.current or answer.question_id != session.current.id:
        raise StaleQuestion(f"{answer.question_id!r} is not the current question")
    question = session.current
    entry = session.question_log[-1]

    if answer.variant == "selected":
        if not answer.selected:
            raise OptionOutOfRange("at least one option index required")
        for i in answer.selected:
            if not 0 <= i < len(question.options):
                raise OptionOutOfRange(f"index {i} out of range")
    elif answer.variant == "custom":
        if not (answer.custom and answer.custom.strip()):
            raise OptionOutOfRange("custom response must be non-empty")
    elif answer.variant != "skip":
        raise EngineError(f"unknown answer variant {answer.variant!r}")

    if question.kind is QuestionKind.EXPLORATORY:
        _apply_exploratory(session, question, answer)
    else:
        _apply_exploitative(session, question, answer)

    entry.answer = answer
    session.current = None


def _apply_exploratory(session: Session, question: Question, answer: Answer) -> None:
    proposal = question.proposal
    assert proposal is not None
    said_yes = answer.variant == "selected" and 0 in answer.selected
    if said_yes:
        node_id = session.next_node_id()
        if proposal.kind.is_data_action:
            session.apply(
                g.add_data_action(session.next_seq(), node_id, proposal.kind, proposal.label)
            )
        else:
            session.apply(
                g.add_interaction(
                    session.next_seq(), node_id, proposal.kind, proposal.label,
                    proposal.target,
                )
            )
    else:
        # "no" (or skip) permanently retires the proposal for this session
        session.retired_proposals.add((proposal.kind, proposal.label))


def _apply_exploitative(session: Session, question: Question, answer: Answer) -> None:
    if answer.variant == "skip":
        return
    if answer.variant == "selected":
        value = DecisionValue(
            selected=tuple(question.value_set[i] for i in answer.selected)
        )
    else:
        value = DecisionValue(custom=answer.custom)
    session.apply(
        g.set_decision(session.next_seq(), question.target_node, question.decision_key, value)
    )
    if question.kind is QuestionKind.EXPLOITATIVE:
        # one probing level only; unbounded chains would eat the budget
        try:
            text = session.provider.follow_up(question, answer, session.graph)
        except ProviderFailure:
            text = None
        if text:
            session.followup_queue.insert(
                0,
                Question(
                    id=session.next_question_id(),
                    kind=QuestionKind.FOLLOW_UP,
                    text=text,
                    options=(),
                    target_node=question.target_node,
                    decision_key=f"{question.decision_key}_detail",
                    origin={"source": "follow_up", "parent": question.id},
                ),
            )


def _revise(session: Session, answer: Answer) -> None:
    if not answer.revised:
        raise EngineError("revise answers need a replacement answer")
    entry = next(
        (e for e in session.question_log if e.question.id == answer.question_id), None
    )
    if entry is None or entry.answer is None:
        raise StaleQuestion(f"cannot revise unanswered question {answer.question_id!r}")
    question = entry.question
    if question.decision_key is None or question.target_node is None:
        raise StaleQuestion("only decision questions can be revised")
    replacement = answer.revised
    if replacement.variant == "selected":
        for i in replacement.selected:
            if not 0 <= i < len(question.options):
                raise OptionOutOfRange(f"index {i} out of range")
        value = DecisionValue(
            selected=tuple(question.value_set[i] for i in replacement.selected)
        )
    elif replacement.variant == "custom":
        value = DecisionValue(custom=replacement.custom)
    else:
        raise EngineError("revision must select options or give a custom response")
    session.apply(
        g.revise_decision(session.next_seq(), question.target_node, question.decision_key, value)
    )
    entry.answer = replacement


def set_mode(session: Session, mode: Mode) -> None:
    session.mode = mode
    session.transitions.append(f"mode:{mode.value}")


def stop(session: Session) -> None:
    if session.stage is not Stage.QUESTION_LOOP:
        raise StageError("can only stop inside the question loop")
    session.terminated = TerminationReason.USER_STOP
    session.transitions.append("terminated:user_stop")


def begin_assessment(session: Session) -> None:
    if session.stage not in (Stage.QUESTION_LOOP, Stage.ASSESSMENT):
        raise StageError(f"cannot assess from stage {session.stage.value}")
    session.stage = Stage.ASSESSMENT
    session.transitions.append("assessment")


def resume_questions(session: Session) -> None:
    if session.stage is not Stage.ASSESSMENT:
        raise StageError("resume applies to the assessment stage")
    if session.questions_asked >= session.config.hard_limit:
        raise BudgetExhausted(f"question budget of {session.config.hard_limit} spent")
    session.stage = Stage.QUESTION_LOOP
    session.terminated = None
    session.current = None
    session.transitions.append("question_loop")
