import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privacy_elicit.design_space import (
    DEFAULT_SENTINEL_FLOOR,
    NEGATIVE_EVIDENCE,
    DataPractice,
    DecisionCategory,
    DecisionDef,
    DesignSpace,
    InvariantViolation,
    ParseError,
    SameKey,
    SchemaVersionMismatch,
    candidate_decisions,
    jaccard,
    load_design_space,
    marginal_frequency,
    mutual_information,
    rank_by_prior_choices,
    relevant_practices,
    save_design_space,
    validate_design_space,
)
from privacy_elicit.graph import NodeKind


def practice(pid, labels, keys):
    return DataPractice(
        id=pid,
        domain_labels=frozenset(labels),
        decisions=frozenset((k, f"{k}-value") for k in keys),
    )


def tiny_space(practices, keys=("a", "b", "c", "x", "y")):
    defs = [
        DecisionDef(k, DecisionCategory.UNIVERSAL_KEY_UNIVERSAL_VALUE, NodeKind.COLLECT, {(): ["v1", "v2"]})
        for k in keys
    ]
    return DesignSpace("t", frozenset(["l1", "l2", "l3", "l4", "l5"]), defs, practices)


class TestJaccard:
    def test_known_values(self):
        assert jaccard({"a", "b"}, {"b", "c"}) == pytest.approx(1 / 3)
        assert jaccard({"a"}, {"a"}) == 1.0
        assert jaccard({"a"}, {"b"}) == 0.0

    def test_both_empty_is_zero(self):
        assert jaccard(set(), set()) == 0.0

    @given(st.sets(st.integers(0, 10)), st.sets(st.integers(0, 10)))
    def test_bounds_and_symmetry(self, a, b):
        sa = {str(x) for x in a}
        sb = {str(x) for x in b}
        v = jaccard(sa, sb)
        assert 0.0 <= v <= 1.0
        assert v == jaccard(sb, sa)


class TestRelevance:
    def test_strict_threshold_boundary(self):
        # |∩|=2, |∪|=5 → exactly 0.4, which the strict filter must exclude
        p = practice("p", ["l1", "l2", "l3"], ["a"])
        space = tiny_space([p])
        session = {"l1", "l2", "l4", "l5"}
        assert jaccard(session, p.domain_labels) == pytest.approx(0.4)
        assert relevant_practices(space, session, 0.4) == []

    def test_above_threshold_included_in_order(self):
        p1 = practice("p1", ["l1", "l2"], ["a"])
        p2 = practice("p2", ["l1", "l2", "l3"], ["b"])
        space = tiny_space([p1, p2])
        out = relevant_practices(space, {"l1", "l2", "l3"}, 0.4)
        assert [p.id for p in out] == ["p1", "p2"]

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            relevant_practices(tiny_space([]), {"l1"}, 1.5)


class TestMutualInformation:
    def test_frozen_hand_computed(self):
        relevant = [
            practice("p1", ["l1"], ["a", "b"]),
            practice("p2", ["l1"], ["a", "b", "c"]),
            practice("p3", ["l1"], ["b", "c"]),
            practice("p4", ["l1"], ["a"]),
        ]
        space = tiny_space(relevant)
        # N=4; c_a=3, c_b=3, c_ab=2 → ln(2·4 / 9)
        assert mutual_information(space, relevant, "a", "b") == pytest.approx(math.log(8 / 9))
        # c_c=2, c_ac=1 → ln(4/6)
        assert mutual_information(space, relevant, "a", "c") == pytest.approx(math.log(2 / 3))
        # c_bc=2 → ln(8/6)
        assert mutual_information(space, relevant, "b", "c") == pytest.approx(math.log(4 / 3))

    def test_independence_scores_zero(self):
        # x in half, y in half, together in a quarter → PMI exactly 0
        relevant = [
            practice("p1", ["l1"], ["x", "y"]),
            practice("p2", ["l1"], ["x"]),
            practice("p3", ["l1"], ["y"]),
            practice("p4", ["l1"], ["a"]),
        ]
        space = tiny_space(relevant)
        assert abs(mutual_information(space, relevant, "x", "y")) <= 1e-12

    def test_negative_evidence_sentinel(self):
        relevant = [practice("p1", ["l1"], ["a"]), practice("p2", ["l1"], ["b"])]
        space = tiny_space(relevant)
        assert mutual_information(space, relevant, "a", "b") == NEGATIVE_EVIDENCE
        assert mutual_information(space, relevant, "a", "c") == NEGATIVE_EVIDENCE

    def test_same_key_rejected(self):
        space = tiny_space([practice("p", ["l1"], ["a"])])
        with pytest.raises(SameKey):
            mutual_information(space, space.corpus, "a", "a")

    def test_empty_relevant_rejected(self):
        with pytest.raises(ValueError):
            mutual_information(tiny_space([]), [], "a", "b")


class TestRanking:
    def test_cold_start_by_marginal_then_key(self):
        relevant = [
            practice("p1", ["l1"], ["a", "b"]),
            practice("p2", ["l1"], ["a"]),
            practice("p3", ["l1"], ["b", "c"]),
        ]
        space = tiny_space(relevant)
        defs = [d for d in space.definitions if d.key in ("a", "b", "c")]
        ranked = rank_by_prior_choices(space, relevant, defs, prior=[])
        # marginals a=2 b=2 c=1; tie a/b broken by ascending key
        assert [d.key for d, _ in ranked] == ["a", "b", "c"]
        assert [s for _, s in ranked] == [2.0, 2.0, 1.0]

    def test_prior_scoring_uses_floor_for_sentinels(self):
        relevant = [
            practice("p1", ["l1"], ["a", "b"]),
            practice("p2", ["l1"], ["c"]),
        ]
        space = tiny_space(relevant)
        defs = [d for d in space.definitions if d.key in ("b", "c")]
        ranked = rank_by_prior_choices(space, relevant, defs, prior=["a"])
        scores = dict((d.key, s) for d, s in ranked)
        assert scores["b"] == pytest.approx(math.log(1 * 2 / (1 * 1)))
        assert scores["c"] == DEFAULT_SENTINEL_FLOOR
        assert [d.key for d, _ in ranked] == ["b", "c"]

    def test_candidate_filtering(self):
        relevant = [practice("p1", ["l1"], ["a", "b"])]
        space = tiny_space(relevant)
        out = candidate_decisions(space, relevant, NodeKind.COLLECT, already_answered=["a"])
        assert [d.key for d in out] == ["b"]
        assert candidate_decisions(space, relevant, NodeKind.STORE) == []


class TestValuesFor:
    def test_domain_union_preserves_order(self):
        d = DecisionDef(
            "data_type",
            DecisionCategory.UNIVERSAL_KEY_DOMAIN_VALUE,
            NodeKind.COLLECT,
            {
                ("video_conferencing",): ["focus status", "audio"],
                ("smart_home",): ["commands"],
                (): ["usage logs"],
            },
        )
        assert d.values_for({"video_conferencing"}) == ["focus status", "audio", "usage logs"]
        assert d.values_for({"smart_home"}) == ["commands", "usage logs"]

    def test_fallback_when_nothing_matches(self):
        d = DecisionDef(
            "k", DecisionCategory.DOMAIN_KEY_DOMAIN_VALUE, NodeKind.PROCESS,
            {("retail",): ["v1", "v2"]},
        )
        assert d.values_for({"health"}) == ["v1", "v2"]


class TestPersistence:
    def test_round_trip(self, space, tmp_path):
        path = tmp_path / "space.json"
        save_design_space(space, path)
        loaded = load_design_space(path)
        assert loaded.to_dict() == space.to_dict()

    def test_schema_mismatch(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"schema": "other/9", "version": "x", "labels": [], "definitions": []}')
        with pytest.raises(SchemaVersionMismatch):
            load_design_space(path)

    def test_parse_error(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_design_space(path)

    def test_invalid_space_rejected_with_locators(self, space, tmp_path):
        raw = space.to_dict()
        raw["corpus"][0]["decisions"].append({"key": "undefined_key", "value": "v"})
        path = tmp_path / "invalid.json"
        path.write_text(json.dumps(raw))
        with pytest.raises(InvariantViolation) as exc:
            load_design_space(path)
        assert any("undefined_key" in v for v in exc.value.violations)


class TestBundledSpace:
    def test_meets_size_requirements(self, space):
        assert len(space.label_vocabulary) == 20
        assert len(space.definitions) >= 60
        kinds = {d.node_kind for d in space.definitions}
        assert kinds == {k for k in NodeKind if k is not NodeKind.INFLUENCE}
        assert {d.category for d in space.definitions} == set(DecisionCategory)
        assert validate_design_space(space) == []


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_marginal_frequency_matches_count(data):
    n = data.draw(st.integers(1, 20))
    practices = [
        practice(f"p{i}", ["l1"], data.draw(st.sets(st.sampled_from("abcxy"), min_size=1)))
        for i in range(n)
    ]
    key = data.draw(st.sampled_from("abcxy"))
    expected = sum(1 for p in practices if key in p.keys)
    assert marginal_frequency(practices, key) == expected
