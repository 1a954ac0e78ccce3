import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privacy_elicit import engine as eng
from privacy_elicit.assessment import (
    CELL_SEPARATOR,
    HEADER,
    SHEET_NAME,
    AssessmentError,
    AssessmentRow,
    InvalidEdit,
    Issue,
    IssueFlag,
    build_assessment,
    edit_assessment,
    export_csv,
    export_worksheet,
    export_xlsx,
    parse_csv,
)
from privacy_elicit.provider import ProviderFailure
from privacy_elicit.xlsx import read_workbook

from conftest import first_option_policy, run_scripted


@pytest.fixture
def finished(vc_session):
    run_scripted(vc_session, first_option_policy)
    eng.begin_assessment(vc_session)
    return vc_session


class TestBuild:
    def test_requires_assessment_stage(self, vc_session):
        with pytest.raises(AssessmentError):
            build_assessment(vc_session)

    def test_rows_follow_flow_order(self, finished):
        rows = build_assessment(finished)
        assert [r.node_id for r in rows] == finished.graph.data_flow
        assert all(r.data_action for r in rows)

    def test_data_column_includes_upstream_types(self, finished):
        rows = build_assessment(finished)
        collect_row = rows[0]
        assert "application focus status" in collect_row.data
        # downstream actions inherit what flows into them
        for row in rows[1:]:
            assert "application focus status" in row.data

    def test_context_from_attached_interactions(self, finished):
        rows = build_assessment(finished)
        by_node = {r.node_id: r for r in rows}
        target = finished.graph.attachments[
            next(iter(finished.graph.attachments))
        ]
        assert by_node[target].specific_context

    def test_issue_suggestions_flagged_provider_suggested(self, finished):
        rows = build_assessment(finished)
        flagged = [i for r in rows for i in r.issues]
        assert flagged
        assert all(i.flag is IssueFlag.PROVIDER_SUGGESTED for i in flagged)

    def test_provider_failure_degrades_to_warning(self, finished):
        class Failing:
            def summarize_issues(self, node):
                raise ProviderFailure("nope")

        rows = build_assessment(finished, provider=Failing())
        assert all(r.issues == [] and r.provider_warning for r in rows)


class TestEdits:
    def make_rows(self):
        return [
            AssessmentRow("n1", "Collect focus", "focus status", "consent (opt-in)",
                          [Issue("suggested issue")]),
            AssessmentRow("n2", "Process score", "attention score", ""),
        ]

    def test_cell_edit(self):
        rows = edit_assessment(self.make_rows(), {"row": 0, "column": "data", "value": "edited"})
        assert rows[0].data == "edited"

    def test_add_issue_user_written(self):
        rows = edit_assessment(self.make_rows(), {"row": 1, "add_issue": "my concern"})
        assert rows[1].issues[-1] == Issue("my concern", IssueFlag.USER_WRITTEN)

    def test_validate_and_discard(self):
        rows = self.make_rows()
        rows = edit_assessment(rows, {"row": 0, "issue": 0, "flag": "user-validated"})
        assert rows[0].issues[0].flag is IssueFlag.USER_VALIDATED
        rows = edit_assessment(rows, {"row": 0, "issue": 0, "flag": "user-discarded"})
        # discarded issues are retained but never rendered
        assert rows[0].issues[0].flag is IssueFlag.USER_DISCARDED
        assert rows[0].summary_issues == ""

    def test_invalid_edits(self):
        rows = self.make_rows()
        with pytest.raises(InvalidEdit):
            edit_assessment(rows, {"row": 99, "column": "data", "value": "x"})
        with pytest.raises(InvalidEdit):
            edit_assessment(rows, {"row": 0, "column": "node_id", "value": "x"})
        with pytest.raises(InvalidEdit):
            edit_assessment(rows, {"row": 0, "issue": 9, "flag": "user-validated"})
        with pytest.raises(InvalidEdit):
            edit_assessment(rows, {"row": 0, "issue": 0, "flag": "nonsense"})
        with pytest.raises(InvalidEdit):
            edit_assessment(rows, {"row": 0})

    def test_edits_do_not_mutate_input(self):
        rows = self.make_rows()
        edit_assessment(rows, {"row": 0, "column": "data", "value": "edited"})
        assert rows[0].data == "focus status"


class TestExport:
    def test_csv_header_and_crlf(self):
        data = export_csv([])
        assert data == b"Data Action,Data,Specific Context,Summary Issues\r\n"

    def test_csv_round_trip_adversarial(self):
        row = AssessmentRow(
            "n1",
            'Collect, "quoted"',
            "line\nbreak",
            "semi; colon",
            [Issue('issue with, comma'), Issue("dropped", IssueFlag.USER_DISCARDED)],
        )
        parsed = parse_csv(export_csv([row]))
        assert parsed == [('Collect, "quoted"', "line\nbreak", "semi; colon", "issue with, comma")]

    def test_parse_rejects_wrong_header(self):
        with pytest.raises(AssessmentError):
            parse_csv(b"A,B,C,D\r\n")

    def test_xlsx_sheet_and_header(self):
        rows = [AssessmentRow("n1", "Collect", "focus", "ctx", [Issue("i1"), Issue("i2")])]
        names, cells = read_workbook(export_xlsx(rows))
        assert names == [SHEET_NAME]
        assert cells[0] == list(HEADER)
        assert cells[1] == ["Collect", "focus", "ctx", f"i1{CELL_SEPARATOR}i2"]

    def test_worksheet_format_dispatch(self):
        assert export_worksheet([], "csv").startswith(b"Data Action")
        assert export_worksheet([], "xlsx")[:2] == b"PK"
        with pytest.raises(AssessmentError):
            export_worksheet([], "pdf")


# commas, quotes, newlines, unicode — but no control characters, which
# neither csv-with-CRLF nor XML 1.0 can represent
cell_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc"), whitelist_characters="\n\t"),
    max_size=40,
)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(cell_text, cell_text, cell_text, cell_text), max_size=6))
def test_property_csv_round_trip(cells):
    rows = [
        AssessmentRow(f"n{i}", a, b, c, [Issue(d)] if d else [])
        for i, (a, b, c, d) in enumerate(cells)
    ]
    parsed = parse_csv(export_csv(rows))
    assert parsed == [r.cells() for r in rows]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(cell_text, cell_text, cell_text, cell_text), max_size=5))
def test_property_xlsx_round_trip(cells):
    rows = [
        AssessmentRow(f"n{i}", a, b, c, [Issue(d)] if d else [])
        for i, (a, b, c, d) in enumerate(cells)
    ]
    names, parsed = read_workbook(export_xlsx(rows))
    assert names == [SHEET_NAME]
    assert parsed[0] == list(HEADER)
    assert [tuple(r) for r in parsed[1:]] == [r.cells() for r in rows]
