from __future__ import annotations

import logging
import threading
from typing import List, Optional, Sequence

import httpx
import numpy as np

from app.adapters.embedding_providers.base import check_vectors
from app.core.config import settings
from app.core.errors import ProviderError
from app.models.embedding import EmbeddingVector

logger = logging.getLogger(__name__)

_SAMPLE_TEXT = "dimension check"


class HttpEmbeddingProvider:
    """
    Client for a remote encoder behind the engine's embedding wire protocol:
      POST {endpoint}/v1/embed  {"texts": [...]}
      -> {"provider_id": "...", "dim": d, "vectors": [[...], ...]}
    The remote provider_id must match the configured one; pooling and model
    details are the remote side's business and are encoded in that id.
    """
    def __init__(
        self,
        provider_id: str,
        endpoint: str,
        *,
        dim: Optional[int] = None,
        api_key: Optional[str] = None,
        timeout: Optional[float] = None,
        transport: Optional[httpx.BaseTransport] = None,
    ) -> None:
        self._provider_id = provider_id
        self._url = endpoint.rstrip("/") + "/v1/embed"
        self._dim = dim
        self._dim_lock = threading.Lock()
        self.api_key = api_key or settings.ISIC_ENGINE_PROVIDER_API_KEY
        self._client = httpx.Client(
            timeout=timeout or settings.ISIC_ENGINE_PROVIDER_TIMEOUT,
            transport=transport,
        )

    @property
    def provider_id(self) -> str:
        return self._provider_id

    @property
    def dimension(self) -> int:
        if self._dim is None:
            self.embed_batch([_SAMPLE_TEXT])
        assert self._dim is not None
        return self._dim

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def embed_batch(self, texts: Sequence[str]) -> List[EmbeddingVector]:
        if not texts:
            return []
        logger.debug("POST %s (%d texts)", self._url, len(texts))
        try:
            r = self._client.post(self._url, headers=self._headers(), json={"texts": list(texts)})
            r.raise_for_status()
            body = r.json()
        except httpx.HTTPStatusError as e:
            raise ProviderError(self._provider_id, f"HTTP {e.response.status_code} from {self._url}") from e
        except (httpx.HTTPError, ValueError) as e:
            raise ProviderError(self._provider_id, f"transport failure: {e}") from e

        if not isinstance(body, dict):
            raise ProviderError(
                self._provider_id, f"malformed response: expected a JSON object, got {type(body).__name__}"
            )
        if body.get("provider_id") != self._provider_id:
            raise ProviderError(
                self._provider_id, f"remote reports provider_id {body.get('provider_id')!r}"
            )
        try:
            dim = int(body["dim"])
            vectors = [np.asarray(v, dtype=np.float64) for v in body["vectors"]]
        except (KeyError, TypeError, ValueError) as e:
            raise ProviderError(self._provider_id, f"malformed response: {e}") from e
        with self._dim_lock:
            if self._dim is None:
                self._dim = dim
        if dim != self._dim:
            raise ProviderError(self._provider_id, f"dimension changed from {self._dim} to {dim}")
        check_vectors(self._provider_id, dim, vectors, len(texts))
        return vectors

    def close(self) -> None:
        self._client.close()
