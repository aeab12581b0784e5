import logging

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from slowapi import Limiter, _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded
from slowapi.util import get_remote_address

from app.config import settings
from app.core.errors import TorsionAlgebraError

logger = logging.getLogger(__name__)

# Setup rate limiter; every route sets its own limit
limiter = Limiter(key_func=get_remote_address)


def setup_middleware(app: FastAPI):
    app.state.limiter = limiter
    app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)

    app.add_middleware(
        CORSMiddleware,
        allow_origins=[o.strip() for o in settings.CORS_ORIGINS.split(",") if o.strip()],
        allow_credentials=False,
        allow_methods=["GET", "POST"],
        allow_headers=["*"],
        expose_headers=["X-Process-Time"],
    )

    @app.exception_handler(RateLimitExceeded)
    async def custom_rate_limit_exceeded_handler(request: Request, exc: RateLimitExceeded):
        logger.info("rate limit hit on %s from %s", request.url.path, get_remote_address(request))
        return JSONResponse(
            status_code=429,
            content={"error": "RateLimitExceeded", "detail": f"Too many requests ({exc.detail}), try again later"}
        )

    @app.exception_handler(TorsionAlgebraError)
    async def torsion_algebra_error_handler(request: Request, exc: TorsionAlgebraError):
        logger.info("%s %s rejected: %s", request.method, request.url.path, exc)
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "detail": str(exc)}
        )
