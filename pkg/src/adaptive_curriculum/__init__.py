"""Adaptive curriculum engine: profile fusion, pathway search, analytics,
cohort simulation, and a live session service."""

from .analytics import (
    AnalyticsState,
    RetentionModel,
    TrainerConfig,
    TrainingReport,
    composite_performance,
    integrate_feedback,
    krr,
    les,
    train_weights,
    update_weights,
    write_training_report,
)
from .catalog import demo_catalog_path, load_catalog, load_demo_catalog, parse_catalog
from .curriculum import (
    DEFAULT_MASTERY_THRESHOLD,
    Curriculum,
    CurriculumUnit,
    LearnerContext,
    generate_curriculum,
    refresh_curriculum,
    static_item_order,
)
from .errors import (
    CatalogError,
    ConfigurationError,
    DomainError,
    EngineError,
    IntegrityError,
    OrderingError,
    ProviderError,
    ValidationError,
)
from .fusion import compute_signals, fuse_assessment, record_interaction, windowed_metrics
from .model import (
    AssessmentResult,
    Catalog,
    ContentItem,
    FusionConfig,
    InteractionRecord,
    LearnerProfile,
    Modality,
    RollingMetrics,
    validate_profile,
)
from .pathways import (
    Pathway,
    RewardConfig,
    ScoredPathway,
    difficulty_fit,
    enumerate_candidates,
    estimate_engagement,
    pathway_quality,
    recommend,
    reward,
    select_optimal,
)
from .provider import (
    Explanation,
    ProviderConfig,
    ProviderKind,
    explain_recommendation,
    explain_with_fallback,
    load_provider_config,
)
from .simulate import (
    AblationStrategy,
    SessionReport,
    SimConfig,
    ablation_ranking,
    run_ablation_matrix,
    run_session,
    write_ablation_report,
    write_session_report,
)

__version__ = "0.1.0"

__all__ = [
    "AblationStrategy",
    "AnalyticsState",
    "AssessmentResult",
    "Catalog",
    "CatalogError",
    "ConfigurationError",
    "ContentItem",
    "Curriculum",
    "CurriculumUnit",
    "DEFAULT_MASTERY_THRESHOLD",
    "DomainError",
    "EngineError",
    "Explanation",
    "FusionConfig",
    "IntegrityError",
    "InteractionRecord",
    "LearnerContext",
    "LearnerProfile",
    "Modality",
    "OrderingError",
    "Pathway",
    "ProviderConfig",
    "ProviderError",
    "ProviderKind",
    "RetentionModel",
    "RewardConfig",
    "RollingMetrics",
    "ScoredPathway",
    "SessionReport",
    "SimConfig",
    "TrainerConfig",
    "TrainingReport",
    "ValidationError",
    "ablation_ranking",
    "composite_performance",
    "compute_signals",
    "demo_catalog_path",
    "difficulty_fit",
    "enumerate_candidates",
    "estimate_engagement",
    "explain_recommendation",
    "explain_with_fallback",
    "fuse_assessment",
    "generate_curriculum",
    "integrate_feedback",
    "krr",
    "les",
    "load_catalog",
    "load_demo_catalog",
    "load_provider_config",
    "parse_catalog",
    "pathway_quality",
    "recommend",
    "record_interaction",
    "refresh_curriculum",
    "reward",
    "run_ablation_matrix",
    "run_session",
    "select_optimal",
    "static_item_order",
    "train_weights",
    "update_weights",
    "validate_profile",
    "windowed_metrics",
    "write_ablation_report",
    "write_session_report",
    "write_training_report",
]
