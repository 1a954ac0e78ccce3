"""Interactive elicitation of privacy design decisions.

A question engine walks a designer from a one-sentence feature goal to a
multi-layer privacy representation (data-flow actions, stakeholder
interactions, per-node design decisions), prioritizing questions with
co-occurrence statistics mined from real-world data practices, and exports
the result as a privacy-assessment worksheet.
"""

from .design_space import (
    DEFAULT_SENTINEL_FLOOR,
    DEFAULT_SIMILARITY_THRESHOLD,
    NEGATIVE_EVIDENCE,
    DataPractice,
    DecisionCategory,
    DecisionDef,
    DesignSpace,
    candidate_decisions,
    default_space_path,
    jaccard,
    load_default_space,
    load_design_space,
    marginal_frequency,
    mutual_information,
    rank_by_prior_choices,
    relevant_practices,
    save_design_space,
    validate_design_space,
)
from .engine import (
    HARD_QUESTION_LIMIT,
    TOP_K,
    Answer,
    EngineConfig,
    Mode,
    Question,
    QuestionKind,
    Session,
    Stage,
    Terminated,
    TerminationReason,
    begin_assessment,
    next_question,
    resume_questions,
    set_mode,
    set_requirements,
    start_session,
    stop,
    submit_answer,
)
from .graph import (
    DATA_ACTIONS,
    INTERACTIONS,
    DecisionValue,
    GraphEvent,
    Node,
    NodeKind,
    PrivacyGraph,
    apply_event,
    check_invariants,
    replay,
)
from .provider import (
    ExternalProvider,
    NodeProposal,
    ProviderConfig,
    ProviderContract,
    ProviderFailure,
    SchemaViolation,
    StubProvider,
    make_provider,
    stub_provider,
)
from .assessment import (
    AssessmentRow,
    Issue,
    IssueFlag,
    build_assessment,
    edit_assessment,
    export_csv,
    export_worksheet,
    export_xlsx,
)
from .miner import (
    Document,
    MiningConfig,
    MiningReport,
    RuleBasedAnnotator,
    canonicalize_key,
    load_documents,
    mine,
)
from .evalharness import (
    GroundTruth,
    choice_coverage,
    decision_coverage,
    load_ground_truth,
    report,
    session_decisions,
)
from .service import ServiceConfig, SessionStore, create_app

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
