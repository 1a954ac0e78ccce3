import pytest

from privacy_elicit import engine as eng
from privacy_elicit.engine import (
    Answer,
    BudgetExhausted,
    EmptyGoal,
    EngineConfig,
    Mode,
    OptionOutOfRange,
    QuestionKind,
    Stage,
    StageError,
    StaleQuestion,
    Terminated,
    TerminationReason,
)
from privacy_elicit.graph import NodeKind
from privacy_elicit.provider import stub_provider

from conftest import VC_GOAL, first_option_policy, run_scripted


def make_session(space, seed=7):
    s = eng.start_session(VC_GOAL, space, stub_provider(0), seed=seed, session_id="t")
    eng.set_requirements(s, s.requirements)
    return s


class TestLifecycle:
    def test_empty_goal_rejected(self, space):
        with pytest.raises(EmptyGoal):
            eng.start_session("   ", space, stub_provider(0))

    def test_goal_seeds_graph_and_requirements(self, space):
        s = eng.start_session(VC_GOAL, space, stub_provider(0), seed=1)
        assert s.stage is Stage.REQUIREMENTS
        assert len(s.requirements) >= 1
        kinds = [n.kind for n in s.graph.data_action_nodes()]
        assert NodeKind.COLLECT in kinds
        assert s.relevant, "fixture scenario must have relevant practices"

    def test_requirements_gate(self, space):
        s = eng.start_session(VC_GOAL, space, stub_provider(0), seed=1)
        with pytest.raises(StageError):
            eng.next_question(s)
        eng.set_requirements(s, ["edited requirement"])
        assert s.requirements == ["edited requirement"]
        assert s.stage is Stage.QUESTION_LOOP
        with pytest.raises(StageError):
            eng.set_requirements(s, ["again"])


class TestQuestionFlow:
    def test_required_kinds_asked_first(self, space):
        s = make_session(space)
        kinds = []
        for _ in range(4):
            q = eng.next_question(s)
            assert q.kind is QuestionKind.EXPLORATORY
            kinds.append(q.proposal.kind)
            eng.submit_answer(s, Answer(q.id, "selected", (0,)))
        assert set(kinds) == {NodeKind.STORE, NodeKind.SHARE, NodeKind.CONSENT, NodeKind.NOTICE}

    def test_current_question_stable_until_answered(self, space):
        s = make_session(space)
        q1 = eng.next_question(s)
        q2 = eng.next_question(s)
        assert q1.id == q2.id
        assert s.questions_asked == 1

    def test_yes_adds_node_no_retires(self, space):
        s = make_session(space)
        q = eng.next_question(s)
        nodes_before = len(s.graph.nodes)
        eng.submit_answer(s, Answer(q.id, "selected", (0,)))  # yes
        assert len(s.graph.nodes) == nodes_before + 1
        q = eng.next_question(s)
        proposal = q.proposal
        eng.submit_answer(s, Answer(q.id, "selected", (1,)))  # no
        assert (proposal.kind, proposal.label) in s.retired_proposals
        # the retired proposal is never served again
        reason = run_scripted(s, first_option_policy)
        assert all(
            p.label != proposal.label
            for e in s.question_log[2:]
            if (p := e.question.proposal)
        )
        assert reason in set(TerminationReason)

    def test_skip_spends_budget_without_graph_change(self, space):
        s = make_session(space)
        q = eng.next_question(s)
        snapshot = s.graph.to_dict()
        eng.submit_answer(s, Answer(q.id, "skip"))
        assert s.graph.to_dict() == snapshot
        assert s.questions_asked == 1

    def test_skip_on_exploratory_forces_exploit_next(self, space):
        s = make_session(space)
        s.mode = Mode.AUTO
        # drive past the required-kind gap first
        for _ in range(4):
            q = eng.next_question(s)
            eng.submit_answer(s, Answer(q.id, "selected", (0,)))
        # force an exploratory question, then skip it
        eng.set_mode(s, Mode.FORCED_EXPLORE)
        q = eng.next_question(s)
        assert q.kind is QuestionKind.EXPLORATORY
        eng.set_mode(s, Mode.AUTO)
        eng.submit_answer(s, Answer(q.id, "skip"))
        q = eng.next_question(s)
        assert q.kind is not QuestionKind.EXPLORATORY

    def test_stale_and_out_of_range_answers(self, space):
        s = make_session(space)
        q = eng.next_question(s)
        with pytest.raises(StaleQuestion):
            eng.submit_answer(s, Answer("q999", "selected", (0,)))
        with pytest.raises(OptionOutOfRange):
            eng.submit_answer(s, Answer(q.id, "selected", (5,)))
        with pytest.raises(OptionOutOfRange):
            eng.submit_answer(s, Answer(q.id, "selected", ()))
        with pytest.raises(OptionOutOfRange):
            eng.submit_answer(s, Answer(q.id, "custom", custom="  "))
        # the question is still answerable after rejected submissions
        eng.submit_answer(s, Answer(q.id, "selected", (0,)))

    def test_exploitative_questions_record_decisions(self, space):
        s = make_session(space)
        run_scripted(s, first_option_policy)
        decided = {
            (s.graph.nodes[e.question.target_node].kind, e.question.decision_key)
            for e in s.question_log
            if e.question.decision_key
        }
        assert (NodeKind.COLLECT, "data_type") in decided
        node = next(n for n in s.graph.nodes.values() if "data_type" in n.decisions)
        assert node.decisions["data_type"].selected == ("application focus status",)

    def test_no_duplicate_decision_pairs(self, space):
        s = make_session(space)
        run_scripted(s, first_option_policy)
        pairs = [
            (e.question.target_node, e.question.decision_key)
            for e in s.question_log
            if e.question.decision_key
        ]
        assert len(pairs) == len(set(pairs))

    def test_custom_answer_recorded(self, space):
        s = make_session(space)
        # answer exploratory questions until an exploitative one arrives
        while True:
            q = eng.next_question(s)
            if q.kind is QuestionKind.EXPLOITATIVE:
                break
            eng.submit_answer(s, Answer(q.id, "selected", (0,)))
        eng.submit_answer(s, Answer(q.id, "custom", custom="something bespoke"))
        node = s.graph.nodes[q.target_node]
        assert node.decisions[q.decision_key].custom == "something bespoke"


class TestModesAndExploreChoice:
    def test_forced_modes(self, space):
        s = make_session(space)
        eng.set_mode(s, Mode.FORCED_EXPLOIT)
        q = eng.next_question(s)
        assert q.kind is QuestionKind.EXPLOITATIVE
        eng.submit_answer(s, Answer(q.id, "selected", (0,)))
        eng.set_mode(s, Mode.FORCED_EXPLORE)
        q = eng.next_question(s)
        assert q.kind is QuestionKind.EXPLORATORY

    def test_explore_probability_formula(self, space):
        cfg = EngineConfig()
        for asked, expected in [(0, 0.7), (4, 0.5), (12, 0.1), (20, 0.1)]:
            p = max(cfg.explore_floor, cfg.explore_base - cfg.explore_decay * asked)
            assert p == pytest.approx(expected)

    def test_explore_choice_consumes_seeded_rng(self, space):
        # same seed → same question sequence
        a = make_session(space, seed=11)
        b = make_session(space, seed=11)
        run_scripted(a, first_option_policy)
        run_scripted(b, first_option_policy)
        assert [e.question.text for e in a.question_log] == [
            e.question.text for e in b.question_log
        ]


class TestRevision:
    def test_revise_decision(self, space):
        s = make_session(space)
        while True:
            q = eng.next_question(s)
            if q.kind is QuestionKind.EXPLOITATIVE:
                break
            eng.submit_answer(s, Answer(q.id, "selected", (0,)))
        eng.submit_answer(s, Answer(q.id, "selected", (0,)))
        asked = s.questions_asked
        revision = Answer(q.id, "revise", revised=Answer(q.id, "selected", (1,)))
        eng.submit_answer(s, revision)
        node = s.graph.nodes[q.target_node]
        assert node.decisions[q.decision_key].selected == (q.value_set[1],)
        assert s.questions_asked == asked  # revision is free

    def test_revise_unanswered_rejected(self, space):
        s = make_session(space)
        with pytest.raises(StaleQuestion):
            eng.submit_answer(
                s, Answer("q404", "revise", revised=Answer("q404", "selected", (0,)))
            )


class TestTermination:
    def test_hard_limit(self, space):
        s = make_session(space)
        s.config = EngineConfig(hard_limit=3)
        reason = run_scripted(s, lambda q: Answer(q.id, "selected", (0,)))
        assert reason is TerminationReason.HARD_LIMIT
        assert s.questions_asked == 3
        assert isinstance(eng.next_question(s), Terminated)

    def test_early_stop_when_space_exhausted(self, space):
        s = make_session(space)
        reason = run_scripted(s, first_option_policy)
        assert reason is TerminationReason.EARLY_STOP
        assert s.questions_asked < s.config.hard_limit

    def test_user_stop_and_resume(self, space):
        s = make_session(space)
        q = eng.next_question(s)
        eng.submit_answer(s, Answer(q.id, "selected", (0,)))
        eng.stop(s)
        assert s.terminated is TerminationReason.USER_STOP
        eng.begin_assessment(s)
        assert s.stage is Stage.ASSESSMENT
        eng.resume_questions(s)
        assert s.stage is Stage.QUESTION_LOOP
        assert s.terminated is None
        assert not isinstance(eng.next_question(s), Terminated)

    def test_resume_past_cap_fails(self, space):
        s = make_session(space)
        s.config = EngineConfig(hard_limit=2)
        run_scripted(s, first_option_policy)
        eng.begin_assessment(s)
        with pytest.raises(BudgetExhausted):
            eng.resume_questions(s)


class TestFollowUps:
    def test_follow_up_served_next_with_detail_key(self, space):
        class FollowUpProvider(type(stub_provider(0))):
            def follow_up(self, question, answer, graph):
                if question.decision_key == "data_type":
                    return "What resolution is captured?"
                return None

        s = eng.start_session(VC_GOAL, space, FollowUpProvider(), seed=7, session_id="f")
        eng.set_requirements(s, s.requirements)
        parent = None
        while True:
            q = eng.next_question(s)
            if isinstance(q, Terminated):
                pytest.fail("never reached the data_type question")
            if q.kind is QuestionKind.FOLLOW_UP:
                assert q.decision_key == "data_type_detail"
                assert q.origin["parent"] == parent.id
                eng.submit_answer(s, Answer(q.id, "custom", custom="720p"))
                node = s.graph.nodes[q.target_node]
                assert node.decisions["data_type_detail"].custom == "720p"
                break
            if q.decision_key == "data_type":
                parent = q
            eng.submit_answer(s, Answer(q.id, "selected", (0,)))
        # depth one: the follow-up answer spawned no further follow-up
        assert not s.followup_queue
