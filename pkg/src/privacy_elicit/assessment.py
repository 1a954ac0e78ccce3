"""Turns a finished session into the worksheet-shaped assessment table
(Data Action Analysis) and writes csv/xlsx files."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .engine import Session, Stage
from .graph import Node
from .provider import ProviderContract, ProviderFailure

logger = logging.getLogger(__name__)

SHEET_NAME = "Data Action Analysis"
HEADER = ("Data Action", "Data", "Specific Context", "Summary Issues")

CELL_SEPARATOR = "; "


class AssessmentError(Exception):
    pass


class InvalidEdit(AssessmentError):
    pass


class IssueFlag(str, Enum):
    PROVIDER_SUGGESTED = "provider-suggested"
    USER_WRITTEN = "user-written"
    USER_VALIDATED = "user-validated"
    USER_DISCARDED = "user-discarded"


@dataclass
class Issue:
    text: str
    flag: IssueFlag = IssueFlag.PROVIDER_SUGGESTED

    def to_dict(self) -> dict:
        return {"text": self.text, "flag": self.flag.value}

    @classmethod
    def from_dict(cls, d: dict) -> "Issue":
        return cls(d["text"], IssueFlag(d["flag"]))


@dataclass
class AssessmentRow:
    node_id: str
    data_action: str
    data: str
    specific_context: str
    issues: list[Issue] = field(default_factory=list)
    provider_warning: bool = False

    @property
    def summary_issues(self) -> str:
        # discarded issues stay out of the rendered cell but are never deleted
        return CELL_SEPARATOR.join(
            i.text for i in self.issues if i.flag is not IssueFlag.USER_DISCARDED
        )

    def cells(self) -> tuple[str, str, str, str]:
        return (self.data_action, self.data, self.specific_context, self.summary_issues)

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "data_action": self.data_action,
            "data": self.data,
            "specific_context": self.specific_context,
            "issues": [i.to_dict() for i in self.issues],
            "provider_warning": self.provider_warning,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AssessmentRow":
        return cls(
            node_id=d["node_id"],
            data_action=d["data_action"],
            data=d["data"],
            specific_context=d["specific_context"],
            issues=[Issue.from_dict(i) for i in d.get("issues", [])],
            provider_warning=d.get("provider_warning", False),
        )


def _decision_text(node: Node) -> str:
    parts = []
    for key in sorted(node.decisions):
        value = node.decisions[key]
        chosen = ", ".join(value.selected)
        if value.custom:
            chosen = f"{chosen}, {value.custom}" if chosen else value.custom
        parts.append(f"{key}: {chosen}")
    return CELL_SEPARATOR.join(parts)


def _data_types(node: Node, upstream: list[Node]) -> list[str]:
    """data_type values on the node plus everything flowing in from upstream
    data actions."""
    out: list[str] = []
    for n in [*upstream, node]:
        for key in sorted(n.decisions):
            if key == "data_type" or key.startswith("data_type_"):
                value = n.decisions[key]
                for v in value.selected:
                    if v not in out:
                        out.append(v)
                if value.custom and value.custom not in out:
                    out.append(value.custom)
    return out


def build_assessment(
    session: Session, provider: Optional[ProviderContract] = None
) -> list[AssessmentRow]:
    """One row per data-action node, in flow order. Never blocks on the
    provider: issue suggestions degrade to an empty list with a warning."""
    if session.stage is not Stage.ASSESSMENT:
        raise AssessmentError(f"session is in stage {session.stage.value}, not assessment")
    provider = provider or session.provider
    rows: list[AssessmentRow] = []
    upstream: list[Node] = []
    for node_id in session.graph.data_flow:
        node = session.graph.nodes[node_id]
        context_parts = []
        for interaction in sorted(
            session.graph.interactions_of(node_id), key=lambda n: n.id
        ):
            detail = _decision_text(interaction)
            context_parts.append(
                f"{interaction.label} ({detail})" if detail else interaction.label
            )
        warning = False
        try:
            issues = [Issue(t) for t in provider.summarize_issues(node)]
        except ProviderFailure as exc:
            logger.warning("issue summarization failed for %s: %s", node_id, exc)
            issues = []
            warning = True
        rows.append(
            AssessmentRow(
                node_id=node_id,
                data_action=node.label,
                data=CELL_SEPARATOR.join(_data_types(node, upstream)),
                specific_context=CELL_SEPARATOR.join(context_parts),
                issues=issues,
                provider_warning=warning,
            )
        )
        upstream.append(node)
    return rows


_EDITABLE_COLUMNS = {"data_action", "data", "specific_context"}


def edit_assessment(rows: list[AssessmentRow], edit: dict) -> list[AssessmentRow]:
    """Apply one edit and return the new row list. Edits:

    - {"row": i, "column": name, "value": text}
    - {"row": i, "add_issue": text}
    - {"row": i, "issue": j, "flag": "user-validated" | "user-discarded"}
    """
    i = edit.get("row")
    if not isinstance(i, int) or not 0 <= i < len(rows):
        raise InvalidEdit(f"unknown row {i!r}")
    row = rows[i]
    if "column" in edit:
        column = edit["column"]
        if column not in _EDITABLE_COLUMNS:
            raise InvalidEdit(f"unknown column {column!r}")
        row = replace(row, **{column: str(edit.get("value", ""))})
    elif "add_issue" in edit:
        row = replace(
            row,
            issues=row.issues + [Issue(str(edit["add_issue"]), IssueFlag.USER_WRITTEN)],
        )
    elif "issue" in edit:
        j = edit["issue"]
        if not isinstance(j, int) or not 0 <= j < len(row.issues):
            raise InvalidEdit(f"unknown issue index {j!r}")
        try:
            flag = IssueFlag(edit.get("flag"))
        except ValueError:
            raise InvalidEdit(f"unknown issue flag {edit.get('flag')!r}")
        issues = list(row.issues)
        issues[j] = Issue(issues[j].text, flag)
        row = replace(row, issues=issues)
    else:
        raise InvalidEdit("edit must set a column, add an issue, or flag an issue")
    out = list(rows)
    out[i] = row
    return out


def export_csv(rows: list[AssessmentRow]) -> bytes:
    """UTF-8, comma-delimited, RFC-4180-style quoting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(HEADER)
    for row in rows:
        writer.writerow(row.cells())
    return buf.getvalue().encode("utf-8")


def parse_csv(data: bytes) -> list[tuple[str, str, str, str]]:
    """Cell-level inverse of export_csv (header row excluded)."""
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    records = [tuple(r) for r in reader]
    if not records or records[0] != HEADER:
        raise AssessmentError("missing or wrong header row")
    return records[1:]


def export_xlsx(rows: list[AssessmentRow]) -> bytes:
    from .xlsx import write_workbook

    return write_workbook(SHEET_NAME, [list(HEADER)] + [list(r.cells()) for r in rows])


def export_worksheet(rows: list[AssessmentRow], fmt: str) -> bytes:
    if fmt == "csv":
        return export_csv(rows)
    if fmt == "xlsx":
        return export_xlsx(rows)
    raise AssessmentError(f"unsupported format {fmt!r}")
