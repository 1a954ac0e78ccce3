"""Walk through a complete elicitation session with the deterministic stub
provider: state a design goal, confirm requirements, answer questions with a
simple policy, and watch the privacy graph grow.

Run with: python3 demos/01_guided_session.py
"""

from privacy_elicit import (
    Answer,
    Terminated,
    begin_assessment,
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
    session = start_session(GOAL, space, stub_provider(0), seed=7)

    print(f"goal: {GOAL}")
    print(f"domain labels inferred: {sorted(session.domain_labels)}")
    print("expanded requirements:")
    for line in session.requirements:
        print(f"  - {line}")
    set_requirements(session, session.requirements)

    print("\ninitial data-action flow:")
    for node_id in session.graph.data_flow:
        node = session.graph.nodes[node_id]
        print(f"  {node.kind.value}: {node.label}")

    print("\nquestion loop (always pick the first option):")
    while True:
        question = next_question(session)
        if isinstance(question, Terminated):
            print(f"\nterminated: {question.reason.value}")
            break
        print(f"  [{question.kind.value}] {question.text}")
        print(f"    -> {question.options[0]}")
        submit_answer(session, Answer(question.id, "selected", (0,)))

    begin_assessment(session)
    graph = session.graph
    print(f"\nfinal graph: {len(graph.nodes)} nodes, {len(graph.events)} events")
    print("data-action flow:", " -> ".join(
        graph.nodes[n].kind.value for n in graph.data_flow
    ))
    decided = sum(len(n.decisions) for n in graph.nodes.values())
    print(f"decisions recorded: {decided}")


if __name__ == "__main__":
    main()
