from __future__ import annotations

from typing import Any, Dict

from fastapi import APIRouter, HTTPException
from fastapi import status as http

from app.core.errors import BundleNotLoaded
from app.services.classify_service import ClassifyService

router = APIRouter()
svc = ClassifyService()


@router.get("/health")
def health() -> Dict[str, Any]:
    try:
        return svc.health()
    except BundleNotLoaded as e:
        raise HTTPException(http.HTTP_503_SERVICE_UNAVAILABLE, detail=str(e))
