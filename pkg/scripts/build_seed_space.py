"""Regenerates the bundled seed design space, domain lexicon, and ground-truth
fixtures. Run from the repository root:

    python scripts/build_seed_space.py
"""

from __future__ import annotations

import json
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "src" / "privacy_elicit" / "data"

LABELS = [
    "behavior", "biometric", "communication", "demographic", "education",
    "employment", "financial", "government", "health", "identity",
    "location", "media", "mobile_apps", "retail", "smart_home",
    "social_media", "surveillance", "transportation", "video_conferencing",
    "web_browsing",
]

UKUV = "universal_key_universal_value"
UKDV = "universal_key_domain_value"
DKDV = "domain_key_domain_value"

# (key, kind, category, [(labels, values), ...], description)
DEFS = [
    # -- collect ------------------------------------------------------------
    ("data_type", "collect", UKDV, [
        (["video_conferencing"], ["application focus status", "audio stream", "video stream", "meeting metadata"]),
        (["smart_home"], ["audio commands", "device usage logs", "presence events"]),
        (["retail"], ["purchase history", "loyalty card activity", "browsing sessions"]),
        (["health"], ["medical records", "fitness metrics"]),
        (["location", "transportation"], ["gps coordinates", "trip history"]),
        ([], ["account profile", "usage logs", "contact details"]),
    ], "What kind of data the action collects."),
    ("collection_frequency", "collect", UKUV, [
        ([], ["continuously", "on user action", "periodically", "one time"]),
    ], "How often collection happens."),
    ("data_source", "collect", UKUV, [
        ([], ["user device", "third party", "public records", "user input"]),
    ], "Where the collected data originates."),
    ("collection_scope", "collect", UKUV, [
        ([], ["all users", "active participants only", "opted-in users only"]),
    ], "Whose data is in scope for collection."),
    ("device_type", "collect", UKDV, [
        (["video_conferencing"], ["desktop client", "mobile client", "room system"]),
        (["smart_home"], ["smart speaker", "camera", "thermostat"]),
        ([], ["web browser", "mobile device"]),
    ], "The device class the data comes from."),
    ("collection_trigger", "collect", UKUV, [
        ([], ["feature enabled", "meeting started", "app launch", "background schedule"]),
    ], "The event that starts collection."),
    ("data_minimization", "collect", UKUV, [
        ([], ["only what the feature needs", "everything available", "configurable subset"]),
    ], "How narrowly the collected fields are scoped."),
    ("sensitive_data_handling", "collect", UKUV, [
        ([], ["excluded", "collected with extra safeguards", "collected as ordinary data"]),
    ], "Treatment of specially protected data categories."),
    # -- process ------------------------------------------------------------
    ("processing_purpose", "process", UKDV, [
        (["video_conferencing"], ["attention analysis", "meeting analytics"]),
        (["retail"], ["purchase prediction", "inventory planning"]),
        (["smart_home"], ["voice command interpretation", "automation rules"]),
        ([], ["personalization", "service improvement", "advertising"]),
    ], "Why the data is processed."),
    ("derived_data", "process", UKDV, [
        (["video_conferencing"], ["attention score", "engagement level"]),
        (["retail"], ["pregnancy prediction score", "customer segments"]),
        ([], ["behavioral profile", "aggregate statistics"]),
    ], "New information produced by processing."),
    ("processing_technique", "process", UKUV, [
        ([], ["rule-based analysis", "machine learning model", "manual review", "statistical aggregation"]),
    ], "How the processing is performed."),
    ("automated_decision", "process", UKUV, [
        ([], ["no automated decisions", "automated with human review", "fully automated"]),
    ], "Whether outcomes are decided automatically."),
    ("model_training_use", "process", UKUV, [
        ([], ["not used for training", "used with consent", "used by default"]),
    ], "Whether the data trains models."),
    ("aggregation_level", "process", UKUV, [
        ([], ["individual level", "group level", "population level"]),
    ], "Granularity of processed results."),
    ("voice_masking", "process", DKDV, [
        (["smart_home"], ["enabled", "disabled", "user configurable"]),
    ], "Whether recorded voices are disguised before analysis."),
    ("purchase_prediction_scope", "process", DKDV, [
        (["retail"], ["opted-in shoppers", "all shoppers", "loyalty members only"]),
    ], "Which shoppers are subject to predictive modeling."),
    # -- store --------------------------------------------------------------
    ("retention_period", "store", UKUV, [
        ([], ["indefinitely", "one year", "90 days", "30 days", "session only"]),
    ], "How long stored data is kept."),
    ("storage_location", "store", UKUV, [
        ([], ["cloud server", "on device", "hybrid"]),
    ], "Where the data physically lives."),
    ("encryption_at_rest", "store", UKUV, [
        ([], ["enabled", "disabled"]),
    ], "Whether stored data is encrypted."),
    ("access_restriction", "store", UKUV, [
        ([], ["role-based", "team-wide", "unrestricted"]),
    ], "Who inside the organization can read the store."),
    ("backup_policy", "store", UKUV, [
        ([], ["encrypted backups", "plain backups", "no backups"]),
    ], "How backups are handled."),
    ("deletion_method", "store", UKUV, [
        ([], ["hard delete", "soft delete", "anonymize in place"]),
    ], "What deletion actually does."),
    ("storage_format", "store", UKUV, [
        ([], ["raw records", "aggregated summaries", "pseudonymized records"]),
    ], "The form the data is stored in."),
    # -- share --------------------------------------------------------------
    ("recipient_type", "share", UKDV, [
        (["video_conferencing"], ["meeting host", "employer", "other participants"]),
        (["retail"], ["marketing partners", "data brokers"]),
        ([], ["service provider", "advertisers", "law enforcement"]),
    ], "Who receives the shared data."),
    ("sharing_purpose", "share", UKUV, [
        ([], ["analytics reporting", "advertising", "legal compliance", "research"]),
    ], "Why the data is shared."),
    ("data_anonymization", "share", UKUV, [
        ([], ["none", "aggregated", "pseudonymized", "fully anonymized"]),
    ], "Transformation applied before sharing."),
    ("third_party_agreement", "share", UKUV, [
        ([], ["contractual limits", "standard terms", "no agreement"]),
    ], "Constraints binding the recipient."),
    ("cross_border_transfer", "share", UKUV, [
        ([], ["domestic only", "adequacy regions only", "worldwide"]),
    ], "Where shared data may travel."),
    ("sale_of_data", "share", UKUV, [
        ([], ["never sold", "sold with opt-out", "sold by default"]),
    ], "Whether the data is monetized by sale."),
    ("sharing_frequency", "share", UKUV, [
        ([], ["real time", "batch daily", "on request"]),
    ], "Cadence of sharing."),
    # -- consent ------------------------------------------------------------
    ("consent_mode", "consent", UKUV, [
        ([], ["opt-in", "opt-out", "implied"]),
    ], "How permission is obtained."),
    ("consent_timing", "consent", UKUV, [
        ([], ["at feature first use", "at account creation", "at each session"]),
    ], "When permission is requested."),
    ("consent_granularity", "consent", UKUV, [
        ([], ["per data type", "per feature", "all or nothing"]),
    ], "How fine-grained the permission choices are."),
    ("consent_withdrawal", "consent", UKUV, [
        ([], ["anytime in settings", "by support request", "not supported"]),
    ], "How permission can be revoked."),
    ("consent_renewal", "consent", UKUV, [
        ([], ["on policy change", "annually", "never"]),
    ], "Whether and when consent is re-asked."),
    ("parental_consent", "consent", UKUV, [
        ([], ["required under 13", "required under 16", "not applicable"]),
    ], "Handling of minors' permission."),
    # -- notice -------------------------------------------------------------
    ("notice_channel", "notice", UKUV, [
        ([], ["in-app banner", "email", "privacy policy", "push notification"]),
    ], "How users are informed."),
    ("focus_status_visibility", "notice", DKDV, [
        (["video_conferencing"], ["visible to host only", "visible to all participants", "hidden"]),
    ], "Who can see a participant's attention state."),
    ("notice_timing", "notice", UKUV, [
        ([], ["before collection", "at collection", "after the fact"]),
    ], "When the notice is delivered."),
    ("notice_detail_level", "notice", UKUV, [
        ([], ["layered summary", "full policy text", "icon only"]),
    ], "Depth of the notice content."),
    ("breach_notification", "notice", UKUV, [
        ([], ["within 72 hours", "within 30 days", "not committed"]),
    ], "Commitment on breach disclosure."),
    ("policy_update_notice", "notice", UKUV, [
        ([], ["active notification", "passive page update"]),
    ], "How policy changes are announced."),
    # -- control ------------------------------------------------------------
    ("control_type", "control", UKDV, [
        (["video_conferencing"], ["disable attention tracking", "pause during meeting"]),
        ([], ["toggle in settings", "dashboard controls", "no controls"]),
    ], "The control surface offered to users."),
    ("opt_out_scope", "control", UKUV, [
        ([], ["whole feature", "specific data types", "sharing only"]),
    ], "What an opt-out actually covers."),
    ("settings_default", "control", UKUV, [
        ([], ["privacy-protective default", "permissive default"]),
    ], "The state before the user touches anything."),
    ("data_portability_support", "control", UKUV, [
        ([], ["machine-readable export", "pdf export", "none"]),
    ], "How users can take their data elsewhere."),
    ("visibility_control", "control", UKUV, [
        ([], ["per audience", "public or private only", "none"]),
    ], "User control over who sees their data."),
    ("control_granularity", "control", UKUV, [
        ([], ["per data type", "per feature", "account-wide"]),
    ], "How fine-grained the controls are."),
    # -- access -------------------------------------------------------------
    ("access_purpose", "access", UKUV, [
        ([], ["service operation", "analytics", "debugging", "sales"]),
    ], "Why the data is accessed."),
    ("accessor_role", "access", UKDV, [
        (["video_conferencing"], ["meeting host", "account administrator"]),
        ([], ["support staff", "data analysts", "third-party processor"]),
    ], "Who does the accessing."),
    ("access_logging", "access", UKUV, [
        ([], ["every access logged", "privileged access logged", "not logged"]),
    ], "Whether accesses leave a trail."),
    ("access_review_frequency", "access", UKUV, [
        ([], ["quarterly", "annually", "never"]),
    ], "How often access rights are reviewed."),
    ("data_subject_access", "access", UKUV, [
        ([], ["self-service download", "on request", "not offered"]),
    ], "How individuals see their own data."),
    ("access_authentication", "access", UKUV, [
        ([], ["multi-factor", "single-factor", "shared credentials"]),
    ], "Authentication required for access."),
    # -- request ------------------------------------------------------------
    ("request_type", "request", UKUV, [
        ([], ["data deletion", "data export", "correction", "access copy"]),
    ], "Data-rights requests the system handles."),
    ("request_channel", "request", UKUV, [
        ([], ["in-app form", "email", "postal mail"]),
    ], "How requests are submitted."),
    ("request_response_time", "request", UKUV, [
        ([], ["30 days", "45 days", "no commitment"]),
    ], "Promised turnaround for requests."),
    ("request_verification", "request", UKUV, [
        ([], ["account login", "identity documents", "none"]),
    ], "How requesters are verified."),
    ("request_fee", "request", UKUV, [
        ([], ["free", "fee for repeats", "always charged"]),
    ], "Whether requests cost the user anything."),
    # -- audit --------------------------------------------------------------
    ("audit_frequency", "audit", UKUV, [
        ([], ["continuous monitoring", "annual audit", "ad hoc"]),
    ], "How often the data action is examined."),
    ("audit_scope", "audit", UKUV, [
        ([], ["full data lifecycle", "storage and sharing only", "access logs only"]),
    ], "What the audit looks at."),
    ("auditor_type", "audit", UKUV, [
        ([], ["external auditor", "internal team", "automated checks"]),
    ], "Who performs the audit."),
    ("audit_trail_retention", "audit", UKUV, [
        ([], ["seven years", "one year", "90 days"]),
    ], "How long audit evidence is kept."),
    ("compliance_framework", "audit", UKUV, [
        ([], ["gdpr", "ccpa", "internal policy only"]),
    ], "The yardstick the audit measures against."),
]

# The 15 decision keys exercised by the video-conferencing fixture scenario,
# with the value the first-option answer policy lands on.
VC_TRUTH = [
    ("collect", "data_type", ["application focus status", "audio stream"]),
    ("collect", "collection_frequency", ["continuously"]),
    ("collect", "data_source", ["user device"]),
    ("process", "processing_purpose", ["attention analysis"]),
    ("process", "derived_data", ["attention score"]),
    ("store", "retention_period", ["indefinitely", "one year"]),
    ("store", "storage_location", ["cloud server"]),
    ("store", "encryption_at_rest", ["enabled"]),
    ("share", "recipient_type", ["meeting host", "employer"]),
    ("share", "sharing_purpose", ["analytics reporting"]),
    ("share", "data_anonymization", ["none", "aggregated"]),
    ("consent", "consent_mode", ["opt-in", "opt-out"]),
    ("consent", "consent_timing", ["at feature first use"]),
    ("notice", "notice_channel", ["in-app banner"]),
    ("notice", "focus_status_visibility", ["visible to host only"]),
]

VC_KEYS = [(k, v[0]) for _, k, v in VC_TRUTH]


def _vc_practice(pid, labels, key_indices):
    return {
        "id": pid,
        "domain_labels": labels,
        "decisions": [
            {"key": VC_KEYS[i][0], "value": VC_KEYS[i][1]} for i in key_indices
        ],
        "source_ref": f"fixture:{pid}",
    }


def build_corpus():
    corpus = []
    # video-conferencing practices: dense co-occurrence over the 15 fixture keys
    vc_labels_a = ["video_conferencing", "communication", "behavior"]
    vc_labels_b = ["video_conferencing", "behavior", "surveillance"]
    vc_labels_c = ["video_conferencing", "communication", "behavior", "surveillance"]
    corpus.append(_vc_practice("vc-1", vc_labels_c, range(15)))
    corpus.append(_vc_practice("vc-2", vc_labels_a, [0, 1, 2, 3, 4, 5, 6, 8, 9, 11, 13]))
    corpus.append(_vc_practice("vc-3", vc_labels_a, [0, 1, 3, 4, 6, 7, 8, 10, 11, 12, 14]))
    corpus.append(_vc_practice("vc-4", vc_labels_b, [0, 2, 3, 5, 7, 8, 9, 10, 12, 13, 14]))
    corpus.append(_vc_practice("vc-5", vc_labels_b, [0, 1, 2, 4, 5, 6, 9, 10, 11, 12, 13, 14]))
    corpus.append(_vc_practice("vc-6", vc_labels_c, [1, 2, 3, 5, 6, 7, 9, 10, 12, 13, 14]))

    def practice(pid, labels, pairs):
        return {
            "id": pid,
            "domain_labels": labels,
            "decisions": [{"key": k, "value": v} for k, v in pairs],
            "source_ref": f"fixture:{pid}",
        }

    sh = ["smart_home", "behavior"]
    corpus += [
        practice("sh-1", sh + ["surveillance"], [
            ("data_type", "audio commands"), ("voice_masking", "enabled"),
            ("consent_mode", "opt-in"), ("retention_period", "90 days"),
            ("storage_location", "cloud server"), ("notice_channel", "privacy policy"),
        ]),
        practice("sh-2", sh, [
            ("data_type", "device usage logs"), ("collection_frequency", "continuously"),
            ("processing_purpose", "automation rules"), ("voice_masking", "disabled"),
            ("recipient_type", "service provider"), ("consent_mode", "opt-out"),
        ]),
        practice("sh-3", sh + ["communication"], [
            ("data_type", "presence events"), ("derived_data", "behavioral profile"),
            ("retention_period", "one year"), ("data_anonymization", "aggregated"),
            ("control_type", "toggle in settings"), ("audit_frequency", "annual audit"),
        ]),
        practice("sh-4", sh, [
            ("voice_masking", "user configurable"), ("consent_granularity", "per feature"),
            ("settings_default", "permissive default"), ("access_logging", "privileged access logged"),
        ]),
    ]

    rt = ["retail", "financial", "behavior"]
    corpus += [
        practice("rt-1", rt, [
            ("data_type", "purchase history"), ("processing_purpose", "purchase prediction"),
            ("derived_data", "pregnancy prediction score"), ("purchase_prediction_scope", "all shoppers"),
            ("notice_timing", "after the fact"), ("consent_mode", "implied"),
        ]),
        practice("rt-2", rt, [
            ("data_type", "loyalty card activity"), ("recipient_type", "marketing partners"),
            ("sale_of_data", "sold with opt-out"), ("retention_period", "indefinitely"),
            ("purchase_prediction_scope", "loyalty members only"),
        ]),
        practice("rt-3", ["retail", "web_browsing", "behavior"], [
            ("data_type", "browsing sessions"), ("sharing_purpose", "advertising"),
            ("data_anonymization", "pseudonymized"), ("opt_out_scope", "sharing only"),
            ("request_type", "data deletion"),
        ]),
        practice("rt-4", rt, [
            ("processing_purpose", "inventory planning"), ("aggregation_level", "group level"),
            ("storage_format", "aggregated summaries"), ("audit_scope", "storage and sharing only"),
        ]),
    ]

    corpus += [
        practice("hl-1", ["health", "mobile_apps"], [
            ("data_type", "fitness metrics"), ("sensitive_data_handling", "collected with extra safeguards"),
            ("consent_mode", "opt-in"), ("encryption_at_rest", "enabled"),
            ("compliance_framework", "gdpr"),
        ]),
        practice("hl-2", ["health", "identity"], [
            ("data_type", "medical records"), ("access_restriction", "role-based"),
            ("access_logging", "every access logged"), ("breach_notification", "within 72 hours"),
            ("retention_period", "one year"),
        ]),
        practice("lc-1", ["location", "transportation", "mobile_apps"], [
            ("data_type", "gps coordinates"), ("collection_frequency", "continuously"),
            ("recipient_type", "advertisers"), ("cross_border_transfer", "worldwide"),
            ("consent_withdrawal", "anytime in settings"),
        ]),
        practice("lc-2", ["location", "government", "surveillance"], [
            ("data_type", "trip history"), ("recipient_type", "law enforcement"),
            ("third_party_agreement", "no agreement"), ("audit_trail_retention", "seven years"),
        ]),
        practice("sm-1", ["social_media", "media", "behavior"], [
            ("data_type", "usage logs"), ("visibility_control", "per audience"),
            ("model_training_use", "used by default"), ("derived_data", "behavioral profile"),
            ("policy_update_notice", "passive page update"),
        ]),
        practice("sm-2", ["social_media", "demographic"], [
            ("data_type", "account profile"), ("parental_consent", "required under 13"),
            ("data_portability_support", "machine-readable export"),
            ("request_response_time", "30 days"),
        ]),
        practice("wb-1", ["web_browsing", "behavior"], [
            ("data_type", "usage logs"), ("processing_technique", "machine learning model"),
            ("automated_decision", "fully automated"), ("sharing_frequency", "real time"),
        ]),
        practice("em-1", ["employment", "surveillance", "behavior"], [
            ("data_type", "usage logs"), ("collection_trigger", "background schedule"),
            ("accessor_role", "account administrator"), ("notice_detail_level", "icon only"),
            ("access_review_frequency", "never"),
        ]),
        practice("ed-1", ["education", "demographic"], [
            ("data_type", "account profile"), ("parental_consent", "required under 16"),
            ("data_minimization", "only what the feature needs"),
            ("request_verification", "account login"),
        ]),
        practice("fi-1", ["financial", "identity"], [
            ("data_type", "account profile"), ("access_authentication", "multi-factor"),
            ("auditor_type", "external auditor"), ("backup_policy", "encrypted backups"),
            ("deletion_method", "hard delete"),
        ]),
        practice("bi-1", ["biometric", "identity", "surveillance"], [
            ("data_type", "usage logs"), ("sensitive_data_handling", "collected with extra safeguards"),
            ("consent_renewal", "on policy change"), ("access_purpose", "service operation"),
        ]),
        practice("mb-1", ["mobile_apps", "behavior", "media"], [
            ("data_type", "usage logs"), ("device_type", "mobile device"),
            ("collection_scope", "all users"), ("request_channel", "in-app form"),
            ("request_fee", "free"), ("control_granularity", "per feature"),
        ]),
    ]
    return corpus


def build_space():
    definitions = []
    for key, kind, category, value_sets, description in DEFS:
        definitions.append({
            "key": key,
            "category": category,
            "node_kind": kind,
            "value_sets": [
                {"labels": labels, "values": values} for labels, values in value_sets
            ],
            "description": description,
        })
    return {
        "schema": "privacy-design-space/1",
        "version": "seed-1",
        "labels": LABELS,
        "definitions": definitions,
        "corpus": build_corpus(),
    }


LEXICON = {
    "video conferencing": ["video_conferencing", "communication"],
    "video call": ["video_conferencing", "communication"],
    "attention": ["behavior"],
    "tracking": ["surveillance"],
    "smart speaker": ["smart_home"],
    "smart home": ["smart_home"],
    "voice assistant": ["smart_home", "communication"],
    "shopping": ["retail"],
    "purchase": ["retail", "financial"],
    "coupon": ["retail"],
    "health": ["health"],
    "fitness": ["health", "behavior"],
    "medical": ["health"],
    "navigation": ["location", "transportation"],
    "gps": ["location"],
    "social network": ["social_media"],
    "messaging": ["communication"],
    "browser": ["web_browsing"],
    "payment": ["financial"],
    "workplace": ["employment"],
    "classroom": ["education"],
    "face recognition": ["biometric", "surveillance"],
}


TRUTHS = {
    "attention_tracking.json": {
        "schema": "ground-truth/1",
        "scenario": "attention-tracking",
        "entries": [
            {"category": cat, "key": key, "values": values}
            for cat, key, values in VC_TRUTH
        ],
    },
    "smart_speaker.json": {
        "schema": "ground-truth/1",
        "scenario": "smart-speaker",
        "entries": [
            {"category": "collect", "key": "data_type", "values": ["audio commands"]},
            {"category": "collect", "key": "collection_trigger", "values": ["feature enabled"]},
            {"category": "process", "key": "voice_masking", "values": ["enabled"]},
            {"category": "process", "key": "processing_purpose", "values": ["voice command interpretation"]},
            {"category": "store", "key": "retention_period", "values": ["90 days"]},
            {"category": "store", "key": "storage_location", "values": ["cloud server"]},
            {"category": "share", "key": "recipient_type", "values": ["service provider"]},
            {"category": "consent", "key": "consent_mode", "values": ["opt-in"]},
            {"category": "notice", "key": "notice_channel", "values": ["privacy policy"]},
            {"category": "control", "key": "control_type", "values": ["toggle in settings"]},
            {"category": "audit", "key": "audit_frequency", "values": ["annual audit"]},
        ],
    },
    "retail_prediction.json": {
        "schema": "ground-truth/1",
        "scenario": "retail-prediction",
        "entries": [
            {"category": "collect", "key": "data_type", "values": ["purchase history"]},
            {"category": "process", "key": "processing_purpose", "values": ["purchase prediction"]},
            {"category": "process", "key": "derived_data", "values": ["pregnancy prediction score"]},
            {"category": "process", "key": "purchase_prediction_scope", "values": ["all shoppers"]},
            {"category": "share", "key": "recipient_type", "values": ["marketing partners"]},
            {"category": "share", "key": "sale_of_data", "values": ["sold with opt-out"]},
            {"category": "consent", "key": "consent_mode", "values": ["implied"]},
            {"category": "notice", "key": "notice_timing", "values": ["after the fact"]},
            {"category": "request", "key": "request_type", "values": ["data deletion"]},
        ],
    },
}


def main() -> None:
    space = build_space()
    with open(DATA / "seed_design_space.json", "w", encoding="utf-8") as fp:
        json.dump(space, fp, indent=2)
        fp.write("\n")
    with open(DATA / "domain_lexicon.json", "w", encoding="utf-8") as fp:
        json.dump(LEXICON, fp, indent=2)
        fp.write("\n")
    for name, truth in TRUTHS.items():
        with open(DATA / "ground_truth" / name, "w", encoding="utf-8") as fp:
            json.dump(truth, fp, indent=2)
            fp.write("\n")
    print(f"definitions: {len(space['definitions'])}, practices: {len(space['corpus'])}")


if __name__ == "__main__":
    main()
