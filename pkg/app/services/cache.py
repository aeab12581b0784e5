import json
import logging
from typing import Optional

from redis.asyncio import Redis
from redis.exceptions import RedisError

from app.config import settings

logger = logging.getLogger(__name__)

redis_client: Optional[Redis] = None


async def init_redis():
    global redis_client
    if not settings.CACHE_ENABLED:
        logger.info("report cache disabled")
        return
    if settings.REDIS_URL:
        redis_client = Redis.from_url(settings.REDIS_URL, decode_responses=False)
        logger.info("Connected to Redis using REDIS_URL")
    else:
        redis_client = Redis(
            host=settings.REDIS_HOST,
            port=settings.REDIS_PORT,
            db=settings.REDIS_DB,
            password=settings.REDIS_PASSWORD if settings.REDIS_PASSWORD else None,
            decode_responses=False
        )
        logger.info("Connected to Redis at %s:%s", settings.REDIS_HOST, settings.REDIS_PORT)


def get_report_cache_key(suite: str, seed: int, mode: str, tol: Optional[float]) -> str:
    """Reports are deterministic in (suite, seed, mode, tol) for one release; exact mode ignores tol."""
    return f"report:{suite}:{seed}:{mode}:{tol if mode == 'float' else '-'}:{settings.API_VERSION}"


async def get_from_cache(cache_key: str):
    """Cached payload or None; a redis failure counts as a miss."""
    if redis_client is None:
        return None
    try:
        cached_data = await redis_client.get(cache_key)
    except RedisError as e:
        logger.warning("cache read for %s failed: %s", cache_key, e)
        return None
    if cached_data:
        return json.loads(cached_data)
    return None


async def save_to_cache(cache_key: str, data, ttl=settings.CACHE_TTL) -> bool:
    if redis_client is None:
        return False
    try:
        await redis_client.setex(cache_key, ttl, json.dumps(data))
    except RedisError as e:
        logger.warning("cache write for %s failed: %s", cache_key, e)
        return False
    return True


async def delete_reports(suite: str = "all") -> Optional[int]:
    """Remove cached reports of one suite (or all); None when redis is unreachable."""
    if redis_client is None:
        return None
    pattern = "report:*" if suite == "all" else f"report:{suite}:*"
    try:
        keys = await redis_client.keys(pattern)
        if keys:
            await redis_client.delete(*keys)
    except RedisError as e:
        logger.warning("clearing %s failed: %s", pattern, e)
        return None
    logger.info("removed %d cached reports for %s", len(keys), suite)
    return len(keys)


async def close_redis():
    global redis_client
    if redis_client is not None:
        await redis_client.aclose()
        redis_client = None
