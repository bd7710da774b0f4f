"""Schemas."""

from .geoentity import (
    Dataset,  # noqa: F401
    Geoentity,  # noqa: F401
    GeoentityRecord,  # noqa: F401
    Geometry,  # noqa: F401
    GeometryKind,  # noqa: F401
)

from .config import (
    CityParams,  # noqa: F401
    ExperimentConfig,  # noqa: F401
    LossConfig,  # noqa: F401
    ModelConfig,  # noqa: F401
    ProbeConfig,  # noqa: F401
    TrainConfig,  # noqa: F401
    WindowConfig,  # noqa: F401
)

from .report import (
    ClassificationMetrics,  # noqa: F401
    ContextualEmbedding,  # noqa: F401
    EvaluationRecord,  # noqa: F401
    GradcheckReport,  # noqa: F401
    LabelRecord,  # noqa: F401
    LossReport,  # noqa: F401
    RegressionMetrics,  # noqa: F401
    RelcheckReport,  # noqa: F401
    TrainingLogRecord,  # noqa: F401
)
