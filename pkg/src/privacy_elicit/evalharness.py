"""Coverage metrics for generated decision sets against ground-truth files:
did the output include the right keys (decision coverage), and did the
recorded values reflect the actual choices (choice coverage)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .engine import Session
from .graph import NodeKind, is_canonical_key

TRUTH_SCHEMA = "ground-truth/1"


class EvalError(Exception):
    pass


@dataclass(frozen=True)
class TruthEntry:
    category: NodeKind
    key: str
    values: frozenset[str]


@dataclass
class GroundTruth:
    scenario: str
    entries: list[TruthEntry]

    @classmethod
    def from_dict(cls, d: dict) -> "GroundTruth":
        if d.get("schema") != TRUTH_SCHEMA:
            raise EvalError(f"unsupported ground truth schema {d.get('schema')!r}")
        entries = []
        for e in d["entries"]:
            key = e["key"]
            if not is_canonical_key(key):
                raise EvalError(f"truth key {key!r} not canonical")
            entries.append(
                TruthEntry(NodeKind(e["category"]), key, frozenset(e["values"]))
            )
        return cls(scenario=d["scenario"], entries=entries)


def load_ground_truth(path: Union[str, Path]) -> GroundTruth:
    with open(path, encoding="utf-8") as fp:
        return GroundTruth.from_dict(json.load(fp))


@dataclass(frozen=True)
class OutputDecision:
    category: NodeKind
    key: str
    values: frozenset[str]


def session_decisions(session: Session) -> list[OutputDecision]:
    out = []
    for node in session.graph.nodes.values():
        for key, value in node.decisions.items():
            values = set(value.selected)
            if value.custom:
                values.add(value.custom)
            out.append(OutputDecision(node.kind, key, frozenset(values)))
    return out


def load_output_decisions(path: Union[str, Path]) -> list[OutputDecision]:
    """Decision files reuse the ground-truth schema."""
    truth = load_ground_truth(path)
    return [OutputDecision(e.category, e.key, e.values) for e in truth.entries]


@dataclass
class CoverageResult:
    per_category: dict[NodeKind, float]
    overall: float


def _match(
    output: list[OutputDecision],
    entry: TruthEntry,
    aliases: dict[str, str],
) -> Optional[OutputDecision]:
    def canon(key: str) -> str:
        return aliases.get(key, key)

    for d in output:
        if d.category is entry.category and canon(d.key) == canon(entry.key):
            return d
    return None


def decision_coverage(
    output: list[OutputDecision],
    truth: GroundTruth,
    aliases: Optional[dict[str, str]] = None,
) -> CoverageResult:
    """Per category: matched truth keys / truth keys. Overall: micro-average."""
    aliases = aliases or {}
    per_cat_hits: dict[NodeKind, int] = {}
    per_cat_total: dict[NodeKind, int] = {}
    hits = 0
    for entry in truth.entries:
        per_cat_total[entry.category] = per_cat_total.get(entry.category, 0) + 1
        if _match(output, entry, aliases) is not None:
            per_cat_hits[entry.category] = per_cat_hits.get(entry.category, 0) + 1
            hits += 1
    per_category = {
        cat: per_cat_hits.get(cat, 0) / total for cat, total in per_cat_total.items()
    }
    overall = hits / len(truth.entries) if truth.entries else 0.0
    return CoverageResult(per_category, overall)


def choice_coverage(
    output: list[OutputDecision],
    truth: GroundTruth,
    aliases: Optional[dict[str, str]] = None,
) -> CoverageResult:
    """Among truth entries, the fraction whose matched output value intersects
    the expected set; unmatched keys count as misses, so choice coverage never
    exceeds decision coverage."""
    aliases = aliases or {}
    per_cat_hits: dict[NodeKind, int] = {}
    per_cat_total: dict[NodeKind, int] = {}
    hits = 0
    for entry in truth.entries:
        per_cat_total[entry.category] = per_cat_total.get(entry.category, 0) + 1
        matched = _match(output, entry, aliases)
        if matched is not None and matched.values & entry.values:
            per_cat_hits[entry.category] = per_cat_hits.get(entry.category, 0) + 1
            hits += 1
    per_category = {
        cat: per_cat_hits.get(cat, 0) / total for cat, total in per_cat_total.items()
    }
    overall = hits / len(truth.entries) if truth.entries else 0.0
    return CoverageResult(per_category, overall)


_CATEGORY_ORDER = [
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
]


def report(decision: CoverageResult, choice: CoverageResult) -> tuple[str, dict]:
    """Human table (categories as rows, decision/choice columns) plus a
    machine-readable companion."""
    lines = [f"{'Category':<12} {'Decision':>10} {'Choice':>10}"]
    machine: dict = {"categories": {}, "overall": {}}
    categories = [
        c for c in _CATEGORY_ORDER
        if c in decision.per_category or c in choice.per_category
    ]
    for cat in categories:
        d = decision.per_category.get(cat, 0.0)
        c = choice.per_category.get(cat, 0.0)
        lines.append(f"{cat.value:<12} {d * 100:>9.2f}% {c * 100:>9.2f}%")
        machine["categories"][cat.value] = {
            "decision": round(d * 100, 2),
            "choice": round(c * 100, 2),
        }
    lines.append(
        f"{'overall':<12} {decision.overall * 100:>9.2f}% {choice.overall * 100:>9.2f}%"
    )
    machine["overall"] = {
        "decision": round(decision.overall * 100, 2),
        "choice": round(choice.overall * 100, 2),
    }
    return "\n".join(lines), machine
