import asyncio
import logging
import os
import time
from datetime import datetime

import uvloop
from fastapi import FastAPI, Request
from redis.exceptions import RedisError

from app.api.routes import algebra, cache, catalog, verify
from app.config import settings
from app.middleware import setup_middleware
from app.services import cache as report_cache
from app.services.verify import CHECKS, SUITES

asyncio.set_event_loop_policy(uvloop.EventLoopPolicy())

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

app = FastAPI(
    title=settings.API_TITLE,
    description=settings.API_DESCRIPTION,
    version=settings.API_VERSION
)

setup_middleware(app)

for module in (verify, algebra, catalog, cache):
    app.include_router(module.router)

ENDPOINTS = {
    "suites": "/api/verify/suites",
    "verify": "/api/verify/{suite}",
    "stabilizer": "/api/algebra/stabilizer",
    "decompose": "/api/algebra/decompose",
    "holonomy": "/api/algebra/holonomy",
    "models": "/api/catalog/models",
    "model": "/api/catalog/models/{name}",
    "cache_status": "/api/cache/status",
    "clear_cache": "/api/cache/clear",
    "health": "/health",
}


@app.on_event("startup")
async def startup_event():
    await report_cache.init_redis()
    logger.info("%d checks registered in %d suites (default mode %s)", len(CHECKS), len(SUITES), settings.MODE)


@app.on_event("shutdown")
async def shutdown_event():
    await report_cache.close_redis()


@app.get("/")
async def root():
    return {
        "message": settings.API_DESCRIPTION,
        "endpoints": ENDPOINTS,
        "documentation": "/docs"
    }


@app.get("/health")
async def health_check():
    redis_status = "disabled"
    if report_cache.redis_client is not None:
        try:
            await report_cache.redis_client.ping()
            redis_status = "connected"
        except (RedisError, OSError):
            redis_status = "disconnected"

    return {
        "status": "healthy",
        "timestamp": datetime.now().isoformat(),
        "version": settings.API_VERSION,
        "mode": settings.MODE,
        "checks": len(CHECKS),
        "redis": redis_status
    }


@app.middleware("http")
async def add_process_time_header(request: Request, call_next):
    start_time = time.time()
    response = await call_next(request)
    response.headers["X-Process-Time"] = f"{time.time() - start_time:.6f}"
    return response


if __name__ == "__main__":
    import uvicorn
    port = int(os.getenv("PORT", 8000))
    uvicorn.run("app.main:app", host="0.0.0.0", port=port, reload=False)
