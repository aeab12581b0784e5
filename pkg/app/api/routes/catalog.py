from typing import List

from fastapi import APIRouter, Query, Request
from starlette.concurrency import run_in_threadpool

from app.core.catalog import MODEL_BUILDERS, build, parse_params
from app.middleware import limiter
from app.models.schemas import ModelBundleSchema, ModelSummary

router = APIRouter(
    prefix="/api/catalog",
    tags=["catalog"]
)


@router.get("/models", response_model=List[ModelSummary])
@limiter.limit("60/minute")
async def list_models(request: Request):
    return [ModelSummary(name=name, params=list(spec.params), description=spec.description)
            for name, spec in MODEL_BUILDERS.items()]


@router.get("/models/{name}", response_model=ModelBundleSchema)
@limiter.limit("20/minute")
async def get_model(request: Request, name: str,
                    param: List[str] = Query([], description="Model parameters as k=v, repeatable")):
    """Build a catalog model and return its full tensor bundle."""
    params = parse_params(name, param)
    bundle = await run_in_threadpool(build, name, params)
    return ModelBundleSchema.from_bundle(bundle)
