from __future__ import annotations

from typing import Any, Dict

from fastapi import APIRouter, HTTPException
from fastapi import status as http

from app.core.errors import BundleNotLoaded
from app.services.classify_service import ClassifyService

router = APIRouter()
svc = ClassifyService()


@router.get("/taxonomy/{code}")
def get_node(code: str) -> Dict[str, Any]:
    try:
        found = svc.lookup(code)
    except BundleNotLoaded as e:
        raise HTTPException(http.HTTP_503_SERVICE_UNAVAILABLE, detail=str(e))
    if found is None:
        raise HTTPException(http.HTTP_404_NOT_FOUND, detail=f"unknown code {code!r}")
    return found
