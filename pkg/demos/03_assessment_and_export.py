"""Produce the worksheet-style assessment from a finished session and export
it: one row per data action with the data involved, the interaction context,
and flagged issues, written out as csv and as a spreadsheet workbook.

Run with: python3 demos/03_assessment_and_export.py
"""

import tempfile
from pathlib import Path

from privacy_elicit import (
    Answer,
    Terminated,
    begin_assessment,
    build_assessment,
    edit_assessment,
    export_csv,
    export_xlsx,
    load_default_space,
    next_question,
    set_requirements,
    start_session,
    stub_provider,
    submit_answer,
)

GOAL = (
    "Design an attendee attention tracking feature for a video conferencing "
    "application"
)


def main() -> None:
    space = load_default_space()
    provider = stub_provider(0)
    session = start_session(GOAL, space, provider, seed=7)
    set_requirements(session, session.requirements)
    while not isinstance(q := next_question(session), Terminated):
        submit_answer(session, Answer(q.id, "selected", (0,)))

    begin_assessment(session)
    rows = build_assessment(session, provider)
    print(f"assessment: {len(rows)} data-action rows")
    for row in rows:
        print(f"\n  {row.data_action}")
        print(f"    data: {row.data or '(none recorded)'}")
        print(f"    context: {row.specific_context[:90]}...")
        print(f"    issues: {row.summary_issues[:90]}...")

    # reviewers can annotate rows; discarded issues are kept but not rendered
    rows = edit_assessment(
        rows, {"row": 0, "add_issue": "Attention scores could pressure attendees"}
    )
    rows = edit_assessment(rows, {"row": 0, "issue": 0, "flag": "user-discarded"})

    out_dir = Path(tempfile.mkdtemp(prefix="privacy-elicit-demo-"))
    (out_dir / "assessment.csv").write_bytes(export_csv(rows))
    (out_dir / "assessment.xlsx").write_bytes(export_xlsx(rows))
    print(f"\nwrote {out_dir / 'assessment.csv'}")
    print(f"wrote {out_dir / 'assessment.xlsx'}")


if __name__ == "__main__":
    main()
