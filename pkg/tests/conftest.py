import pytest

from privacy_elicit import (
    Answer,
    Terminated,
    engine,
    load_default_space,
    start_session,
    stub_provider,
)

VC_GOAL = (
    "Design an attendee attention tracking feature for a video conferencing "
    "application"
)


@pytest.fixture(scope="session")
def space():
    return load_default_space()


@pytest.fixture
def vc_session(space):
    session = start_session(VC_GOAL, space, stub_provider(0), seed=7, session_id="vc")
    engine.set_requirements(session, session.requirements)
    return session


def run_scripted(session, policy):
    """Drive a session to termination; policy(question) -> Answer."""
    while True:
        q = engine.next_question(session)
        if isinstance(q, Terminated):
            return q.reason
        engine.submit_answer(session, policy(q))


def first_option_policy(question):
    return Answer(question.id, "selected", (0,))
