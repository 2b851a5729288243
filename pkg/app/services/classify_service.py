from __future__ import annotations

from collections import defaultdict
from typing import Any, Dict, List, Optional, Tuple

from app.adapters.embedding_providers.base import EmbeddingProvider, embed
from app.core.errors import BundleError, BundleNotLoaded
from app.models.classify import ClassifyResponse, DivisionShare, RankedCode
from app.models.head import HeadWeights
from app.models.taxonomy import IsicCode, Level, level_of
from app.repositories.memory.bundle_store import BundleStore, Loaded
from app.services.taxonomy_service import ancestors, describe, division_of
from app.training.softmax_head import forward, rank


def predict(weights: HeadWeights, provider: EmbeddingProvider, text: str, top_n: int) -> List[Tuple[IsicCode, float]]:
    if provider.provider_id != weights.provider_id:
        raise BundleError(f"provider mismatch: {provider.provider_id!r} vs head {weights.provider_id!r}")
    return rank(weights, forward(weights, embed(provider, text)), top_n)


def _division_key(code: IsicCode) -> IsicCode:
    if level_of(code) in (Level.SECTION, Level.DIVISION):
        return code
    return division_of(code)


def division_rollup(ranking: List[Tuple[IsicCode, float]]) -> List[DivisionShare]:
    totals: Dict[IsicCode, float] = defaultdict(float)
    for code, p in ranking:
        totals[_division_key(code)] += p
    ordered = sorted(totals.items(), key=lambda t: (-t[1], t[0]))
    return [DivisionShare(division=d, probability=p) for d, p in ordered]


class ClassifyService:
    """
    Answers classification, health and taxonomy lookups from whatever
    bundle the store currently holds. Each call reads the (bundle, provider)
    pair once, so a concurrent swap never mixes two bundles in one answer.
    """

    def __init__(self, store: Optional[BundleStore] = None) -> None:
        self.store = store or BundleStore.instance()

    def _loaded(self) -> Loaded:
        loaded = self.store.get()
        if loaded is None:
            raise BundleNotLoaded("no bundle loaded")
        return loaded

    def classify(self, text: str, top_n: int = 5) -> ClassifyResponse:
        bundle, provider = self._loaded()
        full = predict(bundle.weights, provider, text, len(bundle.weights.labels))
        return ClassifyResponse(
            predictions=[
                RankedCode(code=code, description=describe(bundle.taxonomy, code), probability=p)
                for code, p in full[:top_n]
            ],
            division_rollup=division_rollup(full),
            provider_id=bundle.weights.provider_id,
            bundle_version=bundle.version,
        )

    def health(self) -> Dict[str, Any]:
        bundle, _ = self._loaded()
        return {
            "status": "ok",
            "bundle_version": bundle.version,
            "provider_id": bundle.weights.provider_id,
            "labels": len(bundle.weights.labels),
        }

    def lookup(self, code: IsicCode) -> Optional[Dict[str, Any]]:
        """A taxonomy node with its ancestor chain, or None for an unknown code."""
        bundle, _ = self._loaded()
        node = bundle.taxonomy.nodes.get(code)
        if node is None:
            return None
        return {
            "node": node.model_dump(mode="json"),
            "ancestors": [bundle.taxonomy.nodes[c].model_dump(mode="json") for c in ancestors(bundle.taxonomy, code)],
        }
