from collections import Counter

from fastapi import APIRouter, Request
from redis.exceptions import RedisError

from app.config import settings
from app.middleware import limiter
from app.services import cache
from app.services.verify import checks_for

router = APIRouter(
    prefix="/api/cache",
    tags=["cache"]
)


@router.get("/status")
@limiter.limit("20/minute")
async def cache_status(request: Request):
    """Cached report counts per suite"""
    if cache.redis_client is None:
        return {"status": "disabled"}
    try:
        keys = await cache.redis_client.keys("report:*")
        info = await cache.redis_client.info("memory")
    except RedisError as e:
        return {"status": "error", "message": str(e)}
    per_suite = Counter(k.decode().split(":")[1] if isinstance(k, bytes) else k.split(":")[1] for k in keys)
    return {
        "status": "connected",
        "reportKeys": len(keys),
        "bySuite": dict(sorted(per_suite.items())),
        "usedMemory": info.get("used_memory_human"),
        "ttl": settings.CACHE_TTL
    }


@router.post("/clear")
@limiter.limit("5/minute")
async def clear_cache(request: Request, suite: str = "all"):
    """
    Drop cached suite reports.

    suite: a suite name, or all
    """
    checks_for(suite)
    if cache.redis_client is None:
        return {"success": False, "message": "Cache is disabled"}
    removed = await cache.delete_reports(suite)
    if removed is None:
        return {"success": False, "message": "Redis unavailable, nothing removed"}
    return {"success": True, "removed": removed, "suite": suite}
