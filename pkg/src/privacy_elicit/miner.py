"""Builds and expands a design space from a directory of pre-fetched
privacy-related documents via an iterative two-step extraction loop.

Step one extracts values for decision keys the space already knows; step two
asks the annotator to discover new keys (4W1H-style prompting for the LLM
backend). The loop runs until additions fall below the saturation thresholds
or the iteration cap is hit.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol, Union

from .design_space import (
    DataPractice,
    DecisionCategory,
    DecisionDef,
    DesignSpace,
    validate_design_space,
)
from .graph import NodeKind

logger = logging.getLogger(__name__)

REPORT_SCHEMA = "mining-report/1"

DEFAULT_RELEVANCE_TERMS = ("privacy", "data protection")


class MinerError(Exception):
    pass


class EmptyAfterCanonicalization(MinerError):
    pass


class AnnotatorFailure(MinerError):
    """Per-document failure; logged and skipped, never aborts a batch."""


def canonicalize_key(raw: str) -> str:
    """Lowercase, collapse non-alphanumeric runs to single underscores, trim.
    Idempotent."""
    if not raw:
        raise EmptyAfterCanonicalization("empty key")
    key = re.sub(r"[^a-z0-9]+", "_", raw.lower()).strip("_")
    if not key:
        raise EmptyAfterCanonicalization(f"{raw!r} canonicalizes to nothing")
    return key


@dataclass
class Document:
    id: str
    title: str
    body: str
    source: str = ""

    def __post_init__(self) -> None:
        if not self.body.strip():
            raise MinerError(f"document {self.id!r} has an empty body")


class Annotator(Protocol):
    """Pluggable per-document annotation capability. Two backends ship: the
    external language-model client and a deterministic rule backend for tests."""

    def is_privacy_design_relevant(self, doc: Document) -> tuple[bool, float]: ...

    def segment_practices(self, doc: Document) -> list[str]: ...

    def label_domains(self, segment: str) -> set[str]: ...

    def extract_known_values(
        self, segment: str, known_keys: dict[str, NodeKind]
    ) -> list[tuple[str, str]]:
        """(key, value) pairs found in the segment for already-known keys."""
        ...

    def discover_new_keys(
        self, segment: str, excluded: set[str]
    ) -> list[tuple[str, NodeKind, list[str]]]:
        """(key, node kind, example values) triples for keys not yet known."""
        ...


@dataclass
class RuleBasedAnnotator:
    """Deterministic lexicon/pattern backend.

    Documents written for this backend mark practices as blank-line separated
    segments; decisions use ``decision: key = value`` lines, new keys use
    ``new: key (kind) = v1 | v2`` lines, and domain labels are matched from
    the vocabulary by word lookup.
    """

    vocabulary: frozenset[str]
    relevance_terms: tuple[str, ...] = DEFAULT_RELEVANCE_TERMS
    label_synonyms: dict[str, str] = field(default_factory=dict)

    _decision_re = re.compile(r"^decision:\s*(?P<key>[^=]+)=\s*(?P<value>.+)$")
    _new_key_re = re.compile(
        r"^new:\s*(?P<key>[^(]+)\((?P<kind>[a-z_]+)\)\s*=\s*(?P<values>.+)$"
    )

    def is_privacy_design_relevant(self, doc: Document) -> tuple[bool, float]:
        text = f"{doc.title}\n{doc.body}".lower()
        hits = sum(1 for term in self.relevance_terms if term in text)
        return hits > 0, min(1.0, hits / 2)

    def segment_practices(self, doc: Document) -> list[str]:
        segments = [s.strip() for s in re.split(r"\n\s*\n", doc.body) if s.strip()]
        return segments

    def label_domains(self, segment: str) -> set[str]:
        words = set(re.findall(r"[a-z_]+", segment.lower()))
        labels = {w for w in words if w in self.vocabulary}
        labels |= {
            self.label_synonyms[w] for w in words if w in self.label_synonyms
        }
        return labels

    def extract_known_values(self, segment, known_keys):
        out = []
        for line in segment.splitlines():
            m = self._decision_re.match(line.strip())
            if not m:
                continue
            try:
                key = canonicalize_key(m.group("key"))
            except EmptyAfterCanonicalization:
                continue
            if key in known_keys:
                out.append((key, m.group("value").strip()))
        return out

    def discover_new_keys(self, segment, excluded):
        out = []
        for line in segment.splitlines():
            m = self._new_key_re.match(line.strip())
            if not m:
                continue
            try:
                key = canonicalize_key(m.group("key"))
            except EmptyAfterCanonicalization:
                continue
            if key in excluded:
                continue
            try:
                kind = NodeKind(m.group("kind"))
            except ValueError:
                continue
            values = [v.strip() for v in m.group("values").split("|") if v.strip()]
            out.append((key, kind, values))
        return out


class ExternalAnnotator:
    """Language-model-backed annotation over the same chat-completion
    transport the question engine uses. Follows a discovery prompting style
    that asks who/what/when/where/how about each described practice."""

    def __init__(self, config, vocabulary: frozenset[str]):
        from .provider import ExternalProvider, parse_structured

        self._client = ExternalProvider(config)
        self._parse = parse_structured
        self.vocabulary = vocabulary

    def _call(self, template: str, variables: dict, schema: str) -> dict:
        return self._client._call(
            template, variables, lambda raw: self._parse(raw, schema)
        )

    def is_privacy_design_relevant(self, doc: Document) -> tuple[bool, float]:
        payload = self._call(
            "mine_relevance",
            {"title": doc.title, "body": doc.body},
            "mine_relevance",
        )
        return payload["relevant"], payload["confidence"]

    def segment_practices(self, doc: Document) -> list[str]:
        payload = self._call("mine_segment", {"body": doc.body}, "mine_segment")
        return payload["segments"]

    def label_domains(self, segment: str) -> set[str]:
        payload = self._call(
            "mine_labels",
            {"segment": segment, "vocabulary": ", ".join(sorted(self.vocabulary))},
            "mine_labels",
        )
        return set(payload["labels"])

    def extract_known_values(self, segment, known_keys):
        payload = self._call(
            "mine_extract",
            {
                "segment": segment,
                "keys": json.dumps({k: v.value for k, v in known_keys.items()}),
            },
            "mine_extract",
        )
        out = []
        for item in payload["decisions"]:
            try:
                key = canonicalize_key(item["key"])
            except EmptyAfterCanonicalization:
                continue
            if key in known_keys:
                out.append((key, item["value"]))
        return out

    def discover_new_keys(self, segment, excluded):
        payload = self._call(
            "mine_discover",
            {"segment": segment, "excluded": ", ".join(sorted(excluded))},
            "mine_discover",
        )
        out = []
        for item in payload["keys"]:
            try:
                key = canonicalize_key(item["key"])
                kind = NodeKind(item["kind"])
            except (EmptyAfterCanonicalization, ValueError):
                continue
            if key not in excluded:
                out.append((key, kind, list(item["values"])))
        return out


@dataclass
class MiningConfig:
    max_iterations: int = 10
    # saturation: stop when an iteration adds less than these fractions of
    # the running totals
    new_key_fraction: float = 0.02
    new_value_fraction: float = 0.05
    # a discovered key must appear in this many distinct practices before
    # it is promoted out of quarantine
    min_key_support: int = 2


@dataclass
class IterationStats:
    iteration: int
    new_keys: int
    new_values: int
    practices_added: int


@dataclass
class MiningReport:
    iterations: list[IterationStats] = field(default_factory=list)
    additions: list[dict] = field(default_factory=list)  # traceability records
    quarantined: list[dict] = field(default_factory=list)
    dropped_labels: list[dict] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    saturated: bool = True
    practice_count: int = 0

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "iterations": [vars(s) for s in self.iterations],
            "additions": self.additions,
            "quarantined": self.quarantined,
            "dropped_labels": self.dropped_labels,
            "failures": self.failures,
            "saturated": self.saturated,
            "practice_count": self.practice_count,
        }

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "w", encoding="utf-8") as fp:
            json.dump(self.to_dict(), fp, indent=2)
            fp.write("\n")


def recompute_cooccurrence(
    space: DesignSpace,
) -> tuple[dict[str, int], dict[tuple[str, str], int]]:
    """Per-key marginals and per-pair co-occurrence counts over the corpus.
    Pairs are keyed by sorted (key, key) tuples."""
    marginals: dict[str, int] = {}
    pairs: dict[tuple[str, str], int] = {}
    for practice in space.corpus:
        keys = sorted(practice.keys)
        for k in keys:
            marginals[k] = marginals.get(k, 0) + 1
        for i, k1 in enumerate(keys):
            for k2 in keys[i + 1 :]:
                pairs[(k1, k2)] = pairs.get((k1, k2), 0) + 1
    return marginals, pairs


def mine(
    docs: list[Document],
    seed: DesignSpace,
    annotator: Annotator,
    config: Optional[MiningConfig] = None,
) -> tuple[DesignSpace, MiningReport]:
    """Expand the seed space from the documents. Deterministic for the
    rule-based annotator; identical inputs give identical outputs."""
    config = config or MiningConfig()
    report = MiningReport()
    problems = validate_design_space(seed)
    if problems:
        raise MinerError(f"seed space invalid: {problems}")

    definitions = [DecisionDef(**_def_fields(d)) for d in seed.definitions]
    corpus = list(seed.corpus)
    by_key: dict[str, DecisionDef] = {}
    for d in definitions:
        by_key.setdefault(d.key, d)

    # discovered keys waiting for enough support
    pending: dict[str, dict] = {}

    if not docs:
        report.practice_count = len(corpus)
        return DesignSpace(seed.version, seed.label_vocabulary, definitions, corpus), report

    segments = _annotate_documents(docs, annotator, seed, report)

    total_keys = len({d.key for d in definitions})
    total_values = sum(len(v) for d in definitions for v in d.value_sets.values())
    practice_seq = 0

    for iteration in range(1, config.max_iterations + 1):
        new_keys = 0
        new_values = 0
        practices_added = 0

        for seg in segments:
            known = {d.key: d.node_kind for d in definitions}
            extracted = annotator.extract_known_values(seg["text"], known)
            discovered = annotator.discover_new_keys(seg["text"], set(known))

            decisions: set[tuple[str, str]] = set()
            for key, value in extracted:
                decisions.add((key, value))
                d = by_key[key]
                added = _admit_value(d, seg["labels"], value)
                if added:
                    new_values += 1
                    report.additions.append(
                        {
                            "iteration": iteration,
                            "document": seg["doc_id"],
                            "kind": "value",
                            "key": key,
                            "value": value,
                        }
                    )

            for key, kind, values in discovered:
                if not values:
                    report.quarantined.append(
                        {
                            "iteration": iteration,
                            "document": seg["doc_id"],
                            "key": key,
                            "reason": "no example values",
                        }
                    )
                    continue
                entry = pending.setdefault(
                    key, {"kind": kind, "values": [], "support": set()}
                )
                entry["support"].add(seg["id"])
                for v in values:
                    if v not in entry["values"]:
                        entry["values"].append(v)
                    decisions.add((key, v))

            # promote pending keys with enough support
            for key in sorted(pending):
                entry = pending[key]
                if key in by_key or len(entry["support"]) < config.min_key_support:
                    continue
                d = DecisionDef(
                    key=key,
                    category=DecisionCategory.DOMAIN_KEY_DOMAIN_VALUE,
                    node_kind=entry["kind"],
                    value_sets={tuple(sorted(seg["labels"])): list(entry["values"])},
                )
                definitions.append(d)
                by_key[key] = d
                new_keys += 1
                new_values += len(entry["values"])
                report.additions.append(
                    {
                        "iteration": iteration,
                        "document": seg["doc_id"],
                        "kind": "key",
                        "key": key,
                        "values": list(entry["values"]),
                    }
                )

            # record the practice once, on the first iteration
            if iteration == 1:
                valid_decisions = {
                    (k, v) for k, v in decisions if k in by_key or k in pending
                }
                if valid_decisions and seg["labels"]:
                    practice_seq += 1
                    corpus.append(
                        DataPractice(
                            id=f"mined-{practice_seq}",
                            domain_labels=frozenset(seg["labels"]),
                            decisions=frozenset(valid_decisions),
                            source_ref=seg["doc_id"],
                        )
                    )
                    practices_added += 1

        report.iterations.append(
            IterationStats(iteration, new_keys, new_values, practices_added)
        )
        total_keys += new_keys
        total_values += new_values
        if (
            new_keys < config.new_key_fraction * max(total_keys, 1)
            and new_values < config.new_value_fraction * max(total_values, 1)
        ):
            break
    else:
        report.saturated = False

    for key, entry in sorted(pending.items()):
        if key not in by_key:
            report.quarantined.append(
                {
                    "key": key,
                    "reason": f"support {len(entry['support'])} below "
                    f"minimum {config.min_key_support}",
                }
            )

    # drop quarantined keys from recorded practices so the space validates
    defined = set(by_key)
    clean_corpus = []
    for p in corpus:
        kept = frozenset((k, v) for k, v in p.decisions if k in defined)
        if kept:
            clean_corpus.append(
                DataPractice(p.id, p.domain_labels, kept, p.source_ref)
            )
    report.practice_count = len(clean_corpus)

    space = DesignSpace(seed.version, seed.label_vocabulary, definitions, clean_corpus)
    problems = validate_design_space(space)
    if problems:
        raise MinerError(f"mined space invalid: {problems}")
    return space, report


def _annotate_documents(docs, annotator, seed, report) -> list[dict]:
    segments = []
    seg_seq = 0
    for doc in docs:
        try:
            relevant, _conf = annotator.is_privacy_design_relevant(doc)
            if not relevant:
                continue
            texts = annotator.segment_practices(doc) or [doc.body]
            for text in texts:
                labels = annotator.label_domains(text)
                dropped = labels - seed.label_vocabulary
                if dropped:
                    report.dropped_labels.append(
                        {"document": doc.id, "labels": sorted(dropped)}
                    )
                seg_seq += 1
                segments.append(
                    {
                        "id": f"seg-{seg_seq}",
                        "doc_id": doc.id,
                        "text": text,
                        "labels": labels & seed.label_vocabulary,
                    }
                )
        except Exception as exc:  # per-document isolation
            logger.warning("annotator failed on %s: %s", doc.id, exc)
            report.failures.append({"document": doc.id, "error": str(exc)})
    return segments


def _admit_value(d: DecisionDef, labels: set[str], value: str) -> bool:
    """Add a mined value to the right value set; returns True when new."""
    for existing in d.value_sets.values():
        if value in existing:
            return False
    if d.category is DecisionCategory.UNIVERSAL_KEY_UNIVERSAL_VALUE:
        d.value_sets[()].append(value)
    else:
        key_labels = tuple(sorted(labels))
        d.value_sets.setdefault(key_labels, [])
        d.value_sets[key_labels].append(value)
    return True


def _def_fields(d: DecisionDef) -> dict:
    return {
        "key": d.key,
        "category": d.category,
        "node_kind": d.node_kind,
        "value_sets": {k: list(v) for k, v in d.value_sets.items()},
        "description": d.description,
    }


def load_documents(directory: Union[str, Path]) -> list[Document]:
    """Read front-matter + body text files (``---`` delimited header with
    ``key: value`` lines) from a directory, sorted by filename."""
    docs = []
    for path in sorted(Path(directory).glob("*.txt")):
        text = path.read_text(encoding="utf-8")
        meta: dict[str, str] = {}
        body = text
        if text.startswith("---"):
            parts = text.split("---", 2)
            if len(parts) >= 3:
                for line in parts[1].splitlines():
                    if ":" in line:
                        k, v = line.split(":", 1)
                        meta[k.strip()] = v.strip()
                body = parts[2].strip()
        docs.append(
            Document(
                id=meta.get("id", path.stem),
                title=meta.get("title", path.stem),
                body=body,
                source=meta.get("source", str(path)),
            )
        )
    return docs
