from __future__ import annotations

import logging
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Optional

import uvicorn
from fastapi import FastAPI, Request
from fastapi import status as http
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from app.adapters.embedding_providers.base import EmbeddingProvider
from app.api.routers.classify import router as classify_router
from app.api.routers.health import router as health_router
from app.api.routers.taxonomy import router as taxonomy_router
from app.core.config import settings
from app.models.pipeline import ModelBundle
from app.repositories.bundle_repo import load_bundle
from app.repositories.memory.bundle_store import BundleStore
from app.services.pipeline_service import provider_for_bundle

logger = logging.getLogger(__name__)


def load_into_store(bundle_dir: str | Path, provider: Optional[EmbeddingProvider] = None) -> ModelBundle:
    """Load and validate a bundle, then make it the one the service answers from."""
    bundle = load_bundle(bundle_dir)
    BundleStore.instance().swap(bundle, provider or provider_for_bundle(bundle))
    logger.info("serving bundle %s (provider=%s, %d labels)", bundle.version, bundle.weights.provider_id, len(bundle.weights.labels))
    return bundle


@asynccontextmanager
async def _lifespan(app: FastAPI):
    if settings.ISIC_ENGINE_BUNDLE and BundleStore.instance().get() is None:
        load_into_store(settings.ISIC_ENGINE_BUNDLE)
    yield


def create_app(bundle: Optional[ModelBundle] = None, provider: Optional[EmbeddingProvider] = None) -> FastAPI:
    """
    Build the HTTP app. Passing a bundle serves it directly; otherwise the
    store is filled from ISIC_ENGINE_BUNDLE at startup.
    """
    if bundle is not None:
        BundleStore.instance().swap(bundle, provider or provider_for_bundle(bundle))
    app = FastAPI(title="ISIC classification engine", lifespan=_lifespan)

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        return JSONResponse(status_code=exc.status_code, content={"error": exc.detail})

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=http.HTTP_400_BAD_REQUEST, content={"error": str(exc.errors())})

    app.include_router(classify_router, prefix="/v1", tags=["classify"])
    app.include_router(health_router, prefix="/v1", tags=["health"])
    app.include_router(taxonomy_router, prefix="/v1", tags=["taxonomy"])
    return app


app = create_app()


def serve(bundle_dir: str | Path, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Refuses to start when the bundle does not validate."""
    load_into_store(bundle_dir)
    uvicorn.run(app, host=host, port=port)
