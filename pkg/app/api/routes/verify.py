import time
from typing import List, Optional

from fastapi import APIRouter, Query, Request
from starlette.concurrency import run_in_threadpool

from app.config import settings
from app.middleware import limiter
from app.models.schemas import Mode, SuiteReportSchema, SuiteSummary
from app.services.cache import get_from_cache, get_report_cache_key, save_to_cache
from app.services.verify import checks_for, list_suites, run_suite

router = APIRouter(
    prefix="/api/verify",
    tags=["verify"]
)


@router.get("/suites", response_model=List[SuiteSummary])
@limiter.limit("60/minute")
async def suites(request: Request):
    """Suite names with their check counts."""
    return [SuiteSummary(name=name, checks=count) for name, count in list_suites().items()]


@router.get("/{suite}", response_model=SuiteReportSchema)
@limiter.limit("20/minute")
async def verify_suite(
    request: Request,
    suite: str,
    seed: Optional[int] = Query(None, description="Seed for randomized sampling"),
    mode: Optional[Mode] = Query(None, description="exact or float scalars"),
    tol: Optional[float] = Query(None, gt=0, description="Tolerance for float mode"),
):
    """
    Run a named check suite.
    Reports are deterministic, so they are cached by (suite, seed, mode, tol).
    """
    start_time = time.time()
    checks_for(suite)
    seed = settings.SEED if seed is None else seed
    mode = mode or settings.MODE
    tol = settings.TOL if tol is None else tol

    cache_key = get_report_cache_key(suite, seed, mode, tol)
    cached_data = await get_from_cache(cache_key)
    if cached_data:
        cached_data["processingTime"] = time.time() - start_time
        cached_data["cached"] = True
        return SuiteReportSchema(**cached_data)

    report = await run_in_threadpool(run_suite, suite, seed, tol, mode)
    response = SuiteReportSchema.from_report(report)
    await save_to_cache(cache_key, response.model_dump(mode="json"))
    response.processingTime = time.time() - start_time
    return response
