"""Score a finished session against a bundled ground-truth scenario: run the
elicitation with a first-option policy, extract the recorded decisions, and
print the per-category coverage report.

Run with: python3 demos/04_coverage_eval.py
"""

from privacy_elicit import (
    Answer,
    Terminated,
    choice_coverage,
    decision_coverage,
    default_space_path,
    load_default_space,
    load_ground_truth,
    next_question,
    report,
    session_decisions,
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
    session = start_session(GOAL, space, stub_provider(0), seed=7)
    set_requirements(session, session.requirements)
    while not isinstance(q := next_question(session), Terminated):
        submit_answer(session, Answer(q.id, "selected", (0,)))
    print(f"session finished after {session.questions_asked} questions "
          f"({session.terminated.value})")

    truth_path = (
        default_space_path().parent / "ground_truth" / "attention_tracking.json"
    )
    truth = load_ground_truth(truth_path)
    output = session_decisions(session)
    table, machine = report(
        decision_coverage(output, truth), choice_coverage(output, truth)
    )
    print(f"\nscoring against: {truth.scenario} ({len(truth.entries)} entries)\n")
    print(table)
    print(f"\nmachine-readable overall: {machine['overall']}")


if __name__ == "__main__":
    main()
