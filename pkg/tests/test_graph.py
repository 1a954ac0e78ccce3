import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privacy_elicit.graph import (
    DecisionValue,
    DuplicateNode,
    GraphError,
    InvalidValue,
    KindMismatch,
    NodeKind,
    PrivacyGraph,
    SequenceGap,
    UnknownDecision,
    UnknownNode,
    add_data_action,
    add_interaction,
    apply_event,
    check_invariants,
    is_canonical_key,
    read_event_log,
    remove_node,
    replay,
    revise_decision,
    set_decision,
    write_event_log,
)


def small_graph():
    g = PrivacyGraph()
    g = apply_event(g, add_data_action(1, "n1", NodeKind.COLLECT, "Collect focus status"))
    g = apply_event(g, add_data_action(2, "n2", NodeKind.PROCESS, "Compute attention score"))
    g = apply_event(g, add_interaction(3, "n3", NodeKind.CONSENT, "Ask permission", "n1"))
    return g


class TestKinds:
    def test_partition(self):
        for kind in NodeKind:
            assert kind.is_data_action != kind.is_interaction

    def test_canonical_keys(self):
        assert is_canonical_key("consent_mode")
        assert is_canonical_key("a1_b2")
        assert not is_canonical_key("Consent-Mode")
        assert not is_canonical_key("_leading")
        assert not is_canonical_key("")


class TestDecisionValue:
    def test_empty_rejected(self):
        with pytest.raises(InvalidValue):
            DecisionValue()
        with pytest.raises(InvalidValue):
            DecisionValue(custom="   ")

    def test_round_trip(self):
        v = DecisionValue(selected=("opt-in",), custom="also ask annually")
        assert DecisionValue.from_dict(v.to_dict()) == v


class TestApplyEvent:
    def test_flow_and_attachment(self):
        g = small_graph()
        assert g.data_flow == ["n1", "n2"]
        assert g.attachments == {"n3": "n1"}
        assert [n.id for n in g.interactions_of("n1")] == ["n3"]

    def test_input_graph_untouched(self):
        g = small_graph()
        before = g.to_dict()
        apply_event(g, set_decision(4, "n1", "data_type", DecisionValue(("audio stream",))))
        assert g.to_dict() == before

    def test_sequence_gap(self):
        g = small_graph()
        with pytest.raises(SequenceGap):
            apply_event(g, add_data_action(9, "n9", NodeKind.STORE, "Store"))

    def test_kind_mismatch(self):
        g = small_graph()
        with pytest.raises(KindMismatch):
            apply_event(g, add_data_action(4, "n4", NodeKind.CONSENT, "Ask"))
        with pytest.raises(KindMismatch):
            apply_event(g, add_interaction(4, "n4", NodeKind.STORE, "Store", "n1"))
        # interactions attach to data actions only
        with pytest.raises(KindMismatch):
            apply_event(g, add_interaction(4, "n4", NodeKind.NOTICE, "Tell", "n3"))

    def test_duplicates(self):
        g = small_graph()
        with pytest.raises(DuplicateNode):
            apply_event(g, add_data_action(4, "n1", NodeKind.STORE, "Store"))
        with pytest.raises(DuplicateNode):
            apply_event(
                g, add_data_action(4, "n9", NodeKind.COLLECT, "Collect focus status")
            )

    def test_unknown_targets(self):
        g = small_graph()
        with pytest.raises(UnknownNode):
            apply_event(g, add_interaction(4, "n4", NodeKind.NOTICE, "Tell", "missing"))
        with pytest.raises(UnknownNode):
            apply_event(g, set_decision(4, "missing", "k", DecisionValue(("v",))))
        with pytest.raises(UnknownNode):
            apply_event(g, remove_node(4, "missing"))

    def test_revise_requires_prior_decision(self):
        g = small_graph()
        with pytest.raises(UnknownDecision):
            apply_event(g, revise_decision(4, "n1", "data_type", DecisionValue(("x",))))

    def test_set_then_revise(self):
        g = small_graph()
        g = apply_event(g, set_decision(4, "n1", "data_type", DecisionValue(("audio stream",))))
        g = apply_event(g, revise_decision(5, "n1", "data_type", DecisionValue(("video stream",))))
        assert g.nodes["n1"].decisions["data_type"].selected == ("video stream",)

    def test_non_canonical_key_rejected(self):
        g = small_graph()
        with pytest.raises(InvalidValue):
            apply_event(g, set_decision(4, "n1", "Data Type", DecisionValue(("x",))))

    def test_remove_data_action_cascades(self):
        g = small_graph()
        g = apply_event(g, remove_node(4, "n1"))
        assert "n1" not in g.nodes and "n3" not in g.nodes
        assert g.data_flow == ["n2"] and g.attachments == {}
        assert check_invariants(g) == []

    def test_remove_interaction_only(self):
        g = small_graph()
        g = apply_event(g, remove_node(4, "n3"))
        assert g.data_flow == ["n1", "n2"] and g.attachments == {}


class TestReplay:
    def test_replay_reproduces_state(self):
        g = small_graph()
        g = apply_event(g, set_decision(4, "n1", "data_type", DecisionValue(("audio stream",))))
        replayed = replay(g.events)
        assert replayed.to_dict() == g.to_dict()

    def test_event_log_round_trip(self):
        g = small_graph()
        buf = io.StringIO()
        write_event_log(g.events, buf)
        buf.seek(0)
        events = read_event_log(buf)
        assert replay(events).to_dict() == g.to_dict()

    def test_bad_log_schema(self):
        with pytest.raises(GraphError):
            read_event_log(io.StringIO('{"schema": "nope"}\n'))


class TestInvariants:
    def test_valid_graph_clean(self):
        assert check_invariants(small_graph()) == []

    def test_detects_orphans_and_dangles(self):
        g = small_graph()
        g.attachments["n3"] = "gone"
        assert any("missing node" in p or "attached" in p for p in check_invariants(g))


# hypothesis: event-sequence fuzzing at unit scale (the acceptance suite runs
# the large campaign)
@st.composite
def event_programs(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    ops = []
    for i in range(n):
        ops.append(
            draw(
                st.tuples(
                    st.sampled_from(["action", "interaction", "decision", "remove"]),
                    st.integers(min_value=0, max_value=6),
                )
            )
        )
    return ops


@settings(max_examples=200, deadline=None)
@given(event_programs())
def test_fuzzed_sequences_preserve_invariants(program):
    g = PrivacyGraph()
    counter = 0
    for op, pick in program:
        counter += 1
        seq = len(g.events) + 1
        node_ids = sorted(g.nodes)
        try:
            if op == "action":
                event = add_data_action(seq, f"n{counter}", NodeKind.COLLECT if pick % 2 else NodeKind.STORE, f"label {pick}")
            elif op == "interaction":
                target = node_ids[pick % len(node_ids)] if node_ids else "missing"
                event = add_interaction(seq, f"n{counter}", NodeKind.CONSENT, f"ask {pick}", target)
            elif op == "decision":
                target = node_ids[pick % len(node_ids)] if node_ids else "missing"
                event = set_decision(seq, target, "consent_mode", DecisionValue(("opt-in",)))
            else:
                target = node_ids[pick % len(node_ids)] if node_ids else "missing"
                event = remove_node(seq, target)
            before = g.to_dict()
            try:
                g = apply_event(g, event)
            except GraphError:
                assert g.to_dict() == before
        except GraphError:
            pass
        assert check_invariants(g) == []
