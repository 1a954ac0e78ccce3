"""Grow a design space from a small document corpus with the rule-based
annotator: extract known decisions, discover new decision types, and stop at
saturation. Prints the iteration ledger and what was promoted vs quarantined.

Run with: python3 demos/02_mine_design_space.py
"""

from privacy_elicit import (
    Document,
    MiningConfig,
    RuleBasedAnnotator,
    load_default_space,
    mine,
)

DOCS = [
    Document(
        id="press-release",
        title="Attention tracking privacy press release",
        body=(
            "Our video conferencing product takes privacy seriously.\n"
            "decision: data_type = application focus status\n"
            "decision: retention_period = 30 days\n"
            "new: attention_alerts (notice) = host only | everyone\n"
            "\n"
            "The meetings team also published a data protection update.\n"
            "decision: consent_mode = opt-in\n"
            "new: attention_alerts (notice) = host only\n"
        ),
    ),
    Document(
        id="sports-recap",
        title="Weekend sports recap",
        body="The match ended three to two. No privacy content here.\n",
    ),
    Document(
        id="speaker-review",
        title="Smart speaker privacy review",
        body=(
            "This smart speaker privacy review covers recordings.\n"
            "decision: data_source = device sensors\n"
            "new: one_shot_listening (collect) = enabled\n"
        ),
    ),
]


def main() -> None:
    seed = load_default_space()
    annotator = RuleBasedAnnotator(
        vocabulary=seed.label_vocabulary,
        label_synonyms={
            "conferencing": "video_conferencing",
            "meetings": "video_conferencing",
            "speaker": "smart_home",
            "recordings": "surveillance",
        },
    )
    space, report = mine(DOCS, seed, annotator, MiningConfig())

    print(f"seed: {len(seed.definitions)} decision types, "
          f"{len(seed.corpus)} practices")
    print(f"mined: {len(space.definitions)} decision types, "
          f"{len(space.corpus)} practices\n")

    print("iterations:")
    for stats in report.iterations:
        print(f"  #{stats.iteration}: {stats.new_keys} new keys, "
              f"{stats.new_values} new values, "
              f"{stats.practices_added} practices added")
    print(f"saturated: {report.saturated}")

    promoted = sorted(set(space.defined_keys()) - set(seed.defined_keys()))
    print(f"\npromoted decision types: {promoted}")
    print("quarantined (below support threshold):")
    for item in report.quarantined:
        print(f"  {item}")
    print("\nfailures:", report.failures or "none")


if __name__ == "__main__":
    main()
