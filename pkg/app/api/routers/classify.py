from __future__ import annotations

from fastapi import APIRouter, HTTPException
from fastapi import status as http

from app.core.errors import BundleNotLoaded, ProviderError
from app.models.classify import ClassifyRequest, ClassifyResponse
from app.services.classify_service import ClassifyService

router = APIRouter()
svc = ClassifyService()


@router.post("/classify", response_model=ClassifyResponse)
def classify_text(body: ClassifyRequest):
    """
    Rank ISIC classes for one activity description.

    Request JSON:
    {
      "text": "demolition of buildings",
      "top_n": 5
    }
    """
    if not body.text.strip():
        raise HTTPException(http.HTTP_400_BAD_REQUEST, detail="text must be non-empty")
    try:
        return svc.classify(body.text, body.top_n)
    except (BundleNotLoaded, ProviderError) as e:
        raise HTTPException(http.HTTP_503_SERVICE_UNAVAILABLE, detail=str(e))
    except ValueError as e:
        raise HTTPException(http.HTTP_400_BAD_REQUEST, detail=str(e))
