"""Domain-aware taxonomy of privacy design decisions plus the mined corpus
of data practices; retrieval and ranking queries for the question engine."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Union

from .graph import NodeKind, is_canonical_key

SPACE_SCHEMA = "privacy-design-space/1"

#: Sentinel for pairs with no co-occurrence evidence; ranks below any finite score.
NEGATIVE_EVIDENCE = float("-inf")

#: Contribution of a NEGATIVE_EVIDENCE term when averaging scores.
DEFAULT_SENTINEL_FLOOR = -10.0

DEFAULT_SIMILARITY_THRESHOLD = 0.4


class DesignSpaceError(Exception):
    pass


class ParseError(DesignSpaceError):
    pass


class SchemaVersionMismatch(DesignSpaceError):
    pass


class InvariantViolation(DesignSpaceError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class SameKey(DesignSpaceError):
    pass


class DecisionCategory(str, Enum):
    UNIVERSAL_KEY_UNIVERSAL_VALUE = "universal_key_universal_value"
    UNIVERSAL_KEY_DOMAIN_VALUE = "universal_key_domain_value"
    DOMAIN_KEY_DOMAIN_VALUE = "domain_key_domain_value"


@dataclass
class DecisionDef:
    """One decision type: key, the node kind it applies to, and its value
    sets keyed by sorted domain-label tuples (universal values live under
    the empty tuple)."""

    key: str
    category: DecisionCategory
    node_kind: NodeKind
    value_sets: dict[tuple[str, ...], list[str]]
    description: str = ""

    def values_for(self, labels: Iterable[str]) -> list[str]:
        """Union of the universal value set and every domain set whose labels
        intersect the given ones, preserving definition order."""
        label_set = set(labels)
        out: list[str] = []
        for key_labels, values in self.value_sets.items():
            if not key_labels or label_set & set(key_labels):
                for v in values:
                    if v not in out:
                        out.append(v)
        if not out:
            # fall back to everything rather than serve an empty choice list
            for values in self.value_sets.values():
                for v in values:
                    if v not in out:
                        out.append(v)
        return out

    def to_dict(self) -> dict:
        return {
            "key": self.key,
            "category": self.category.value,
            "node_kind": self.node_kind.value,
            "value_sets": [
                {"labels": list(labels), "values": values}
                for labels, values in self.value_sets.items()
            ],
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionDef":
        return cls(
            key=d["key"],
            category=DecisionCategory(d["category"]),
            node_kind=NodeKind(d["node_kind"]),
            value_sets={
                tuple(sorted(vs.get("labels", []))): list(vs["values"])
                for vs in d["value_sets"]
            },
            description=d.get("description", ""),
        )


@dataclass
class DataPractice:
    """One mined real-world scenario: its domain labels and the decisions
    observed in it."""

    id: str
    domain_labels: frozenset[str]
    decisions: frozenset[tuple[str, str]]  # (key, chosen value)
    source_ref: str = ""

    @property
    def keys(self) -> frozenset[str]:
        return frozenset(k for k, _ in self.decisions)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "domain_labels": sorted(self.domain_labels),
            "decisions": [
                {"key": k, "value": v} for k, v in sorted(self.decisions)
            ],
            "source_ref": self.source_ref,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DataPractice":
        return cls(
            id=d["id"],
            domain_labels=frozenset(d["domain_labels"]),
            decisions=frozenset((x["key"], x["value"]) for x in d["decisions"]),
            source_ref=d.get("source_ref", ""),
        )


@dataclass
class DesignSpace:
    """Immutable after load; share freely across sessions."""

    version: str
    label_vocabulary: frozenset[str]
    definitions: list[DecisionDef]
    corpus: list[DataPractice]
    _by_key_kind: dict[tuple[str, NodeKind], DecisionDef] = field(
        default_factory=dict, repr=False
    )

    def __post_init__(self) -> None:
        if not self._by_key_kind:
            self._by_key_kind = {(d.key, d.node_kind): d for d in self.definitions}

    @property
    def total_practices(self) -> int:
        return len(self.corpus)

    def definition(self, key: str, node_kind: NodeKind) -> Optional[DecisionDef]:
        return self._by_key_kind.get((key, node_kind))

    def defined_keys(self) -> frozenset[str]:
        return frozenset(d.key for d in self.definitions)

    def to_dict(self) -> dict:
        return {
            "schema": SPACE_SCHEMA,
            "version": self.version,
            "labels": sorted(self.label_vocabulary),
            "definitions": [d.to_dict() for d in self.definitions],
            "corpus": [p.to_dict() for p in self.corpus],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DesignSpace":
        if d.get("schema") != SPACE_SCHEMA:
            raise SchemaVersionMismatch(
                f"expected {SPACE_SCHEMA!r}, got {d.get('schema')!r}"
            )
        return cls(
            version=d["version"],
            label_vocabulary=frozenset(d["labels"]),
            definitions=[DecisionDef.from_dict(x) for x in d["definitions"]],
            corpus=[DataPractice.from_dict(x) for x in d.get("corpus", [])],
        )


def jaccard(a: Iterable[str], b: Iterable[str]) -> float:
    """|a ∩ b| / |a ∪ b|; two empty sets are defined to match nothing (0.0)."""
    sa, sb = set(a), set(b)
    union = sa | sb
    if not union:
        return 0.0
    return len(sa & sb) / len(union)


def relevant_practices(
    space: DesignSpace,
    session_labels: Iterable[str],
    threshold: float = DEFAULT_SIMILARITY_THRESHOLD,
) -> list[DataPractice]:
    """Practices whose domain-label similarity is strictly above the
    threshold, in stable corpus order."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    labels = set(session_labels)
    return [
        p for p in space.corpus if jaccard(labels, p.domain_labels) > threshold
    ]


def candidate_decisions(
    space: DesignSpace,
    relevant: list[DataPractice],
    node_kind: NodeKind,
    already_answered: Iterable[str] = (),
) -> list[DecisionDef]:
    """Definitions for the node kind that occur in at least one relevant
    practice and have not been answered yet."""
    answered = set(already_answered)
    seen_keys = set()
    for p in relevant:
        seen_keys |= p.keys
    out = []
    for d in space.definitions:
        if d.node_kind is node_kind and d.key in seen_keys and d.key not in answered:
            out.append(d)
    return out


def mutual_information(
    space: DesignSpace, relevant: list[DataPractice], d1: str, d2: str
) -> float:
    """Counts-based PMI over the filtered practice list:
    log(c12 * N / (c1 * c2)). Returns NEGATIVE_EVIDENCE when any count is 0."""
    if d1 == d2:
        raise SameKey(f"mutual information of {d1!r} with itself is undefined")
    if not relevant:
        raise ValueError("relevant practice list must be non-empty")
    c1 = sum(1 for p in relevant if d1 in p.keys)
    c2 = sum(1 for p in relevant if d2 in p.keys)
    c12 = sum(1 for p in relevant if d1 in p.keys and d2 in p.keys)
    if c12 == 0 or c1 == 0 or c2 == 0:
        return NEGATIVE_EVIDENCE
    return math.log(c12 * len(relevant) / (c1 * c2))


def marginal_frequency(relevant: list[DataPractice], key: str) -> int:
    return sum(1 for p in relevant if key in p.keys)


def rank_by_prior_choices(
    space: DesignSpace,
    relevant: list[DataPractice],
    candidates: list[DecisionDef],
    prior: Iterable[str] = (),
    sentinel_floor: float = DEFAULT_SENTINEL_FLOOR,
) -> list[tuple[DecisionDef, float]]:
    """Total order over candidates. With prior choices, score by the mean
    PMI against all prior keys (sentinels contribute the floor); cold start
    scores by marginal frequency. Ties break by descending marginal
    frequency, then ascending key."""
    prior_keys = [k for k in prior]

    def score(d: DecisionDef) -> float:
        if not prior_keys:
            return float(marginal_frequency(relevant, d.key))
        total = 0.0
        for p in prior_keys:
            if p == d.key:
                continue
            mi = mutual_information(space, relevant, d.key, p) if relevant else NEGATIVE_EVIDENCE
            total += sentinel_floor if mi == NEGATIVE_EVIDENCE else mi
        denom = len([k for k in prior_keys if k != d.key])
        return total / denom if denom else float(marginal_frequency(relevant, d.key))

    scored = [(d, score(d)) for d in candidates]
    scored.sort(key=lambda t: (-t[1], -marginal_frequency(relevant, t[0].key), t[0].key))
    return scored


def validate_design_space(space: DesignSpace) -> list[str]:
    """Every invariant violation with a locator; empty means valid."""
    problems: list[str] = []
    seen: set[tuple[str, NodeKind]] = set()
    for i, d in enumerate(space.definitions):
        loc = f"definitions[{i}] ({d.key})"
        if not is_canonical_key(d.key):
            problems.append(f"{loc}: key not canonical")
        if (d.key, d.node_kind) in seen:
            problems.append(f"{loc}: duplicate (key, node_kind)")
        seen.add((d.key, d.node_kind))
        if not d.value_sets:
            problems.append(f"{loc}: no value sets")
        if d.category is DecisionCategory.UNIVERSAL_KEY_UNIVERSAL_VALUE:
            if set(d.value_sets) != {()}:
                problems.append(f"{loc}: universal/universal needs exactly the empty label set")
        for labels, values in d.value_sets.items():
            unknown = set(labels) - space.label_vocabulary
            if unknown:
                problems.append(f"{loc}: labels outside vocabulary: {sorted(unknown)}")
            if not values:
                problems.append(f"{loc}: empty value list for labels {labels}")
            if len(values) != len(set(values)):
                problems.append(f"{loc}: duplicate values for labels {labels}")
    defined = space.defined_keys()
    for i, p in enumerate(space.corpus):
        loc = f"corpus[{i}] ({p.id})"
        if not p.domain_labels:
            problems.append(f"{loc}: no domain labels")
        unknown = p.domain_labels - space.label_vocabulary
        if unknown:
            problems.append(f"{loc}: labels outside vocabulary: {sorted(unknown)}")
        if not p.decisions:
            problems.append(f"{loc}: no decisions")
        for key, _ in p.decisions:
            if not is_canonical_key(key):
                problems.append(f"{loc}: key {key!r} not canonical")
            elif key not in defined:
                problems.append(f"{loc}: undefined key {key!r}")
    ids = Counter(p.id for p in space.corpus)
    for pid, n in ids.items():
        if n > 1:
            problems.append(f"corpus: duplicate practice id {pid!r}")
    return problems


def load_design_space(path: Union[str, Path]) -> DesignSpace:
    try:
        with open(path, encoding="utf-8") as fp:
            raw = json.load(fp)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(str(exc)) from exc
    space = DesignSpace.from_dict(raw)
    problems = validate_design_space(space)
    if problems:
        raise InvariantViolation(problems)
    return space


def save_design_space(space: DesignSpace, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(space.to_dict(), fp, indent=2, sort_keys=False)
        fp.write("\n")


def default_space_path() -> Path:
    return Path(__file__).parent / "data" / "seed_design_space.json"


def load_default_space() -> DesignSpace:
    return load_design_space(default_space_path())
