"""
Exception hierarchy for the engine.

Everything derives from ValueError so callers that only care about
"bad input" (the HTTP routers, the CLI) can catch one type.
"""

from __future__ import annotations


class IsicEngineError(ValueError):
    """Root of all domain errors."""


class TaxonomyError(IsicEngineError):
    pass


class DatasetError(IsicEngineError):
    pass


class EmbeddingError(IsicEngineError):
    pass


class ProviderError(EmbeddingError):
    """An embedding provider could not produce vectors."""

    def __init__(self, provider_id: str, message: str) -> None:
        super().__init__(f"provider {provider_id!r}: {message}")
        self.provider_id = provider_id


class SelectionError(IsicEngineError):
    pass


class TrainingError(IsicEngineError):
    pass


class MetricsError(IsicEngineError):
    pass


class BundleError(IsicEngineError):
    pass


class PipelineError(IsicEngineError):
    """A pipeline stage failed; `stage` names it."""

    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause


class BundleNotLoaded(BundleError):
    """The service has no bundle to answer from."""
