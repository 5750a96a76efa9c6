import time
from contextlib import asynccontextmanager

from fastapi import APIRouter, FastAPI, HTTPException, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.gzip import GZipMiddleware
from fastapi.responses import ORJSONResponse
from pydantic import ValidationError
from starlette.middleware.base import BaseHTTPMiddleware
from starlette.responses import Response

from santalo.ball.routes import ball_router
from santalo.bodies.routes import bodies_router
from santalo.errors import SantaloError
from santalo.harness.routes import experiments_router
from santalo.logger import logger
from santalo.measure.routes import measure_router
from santalo.polar.routes import polar_router
from santalo.settings import settings
from santalo.symfun.routes import symfun_router
from santalo.utils.responses import ResponseSchema


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.bind(seed=settings.DEFAULT_SEED, workers=settings.WORKERS).info(
        f"{settings.PROJECT_NAME} {settings.VERSION} starting"
    )
    yield


app = FastAPI(
    title=settings.PROJECT_NAME,
    description="Polar bodies, volume products and j-Santalo experiments",
    version=settings.VERSION,
    debug=settings.DEBUG,
    root_path=settings.ROOT_PATH,
    docs_url="/docs",
    openapi_url="/openapi.json",
    redoc_url="/redoc",
    lifespan=lifespan,
    default_response_class=ORJSONResponse,
)

# Reports can be large
app.add_middleware(GZipMiddleware, minimum_size=1000)


router = APIRouter()


@router.get("/healthz")
def healthz():
    return {"status": "ok", "version": settings.VERSION, "seed": settings.DEFAULT_SEED}


app.include_router(router, prefix="")
app.include_router(symfun_router, prefix=settings.API_V1_PREFIX)
app.include_router(bodies_router, prefix=settings.API_V1_PREFIX)
app.include_router(polar_router, prefix=settings.API_V1_PREFIX)
app.include_router(measure_router, prefix=settings.API_V1_PREFIX)
app.include_router(ball_router, prefix=settings.API_V1_PREFIX)
app.include_router(experiments_router, prefix=settings.API_V1_PREFIX)


# Structured error handling
@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    logger.warning(
        f"Validation error on {request.method} {request.url}: {exc.errors()}"
    )
    return ResponseSchema.unprocessable(
        message="Validation error",
        error="UnprocessableEntity",
        meta={"detail": jsonable_encoder(exc.errors())},
    )


@app.exception_handler(ValidationError)
async def model_validation_handler(request: Request, exc: ValidationError):
    logger.warning(f"Model validation failed on {request.url}: {exc.error_count()}")
    return ResponseSchema.unprocessable(
        message="Validation error",
        error="UnprocessableEntity",
        meta={"detail": jsonable_encoder(exc.errors(include_url=False))},
    )


@app.exception_handler(SantaloError)
async def santalo_exception_handler(request: Request, exc: SantaloError):
    logger.bind(code=exc.code).warning(
        f"{exc.__class__.__name__} on {request.method} {request.url}: {exc.message}"
    )
    return ResponseSchema.unprocessable(
        message=exc.message, error=exc.code, meta=exc.data or None
    )


@app.exception_handler(HTTPException)
async def http_exception_handler(request: Request, exc: HTTPException):
    logger.warning(f"HTTPException on {request.method} {request.url}: {exc.detail}")
    return ResponseSchema.error(
        message=exc.detail if isinstance(exc.detail, str) else "HTTP error",
        status_code=exc.status_code,
        error=exc.__class__.__name__,
    )


@app.exception_handler(Exception)
async def unhandled_exception_handler(request: Request, exc: Exception):
    logger.exception(f"Unhandled error on {request.method} {request.url}: {exc!s}")
    return ResponseSchema.internal_server_error(error=exc.__class__.__name__)


class RequestTimingMiddleware(BaseHTTPMiddleware):
    """Logs every request with its wall-clock time; campaigns run inline."""

    async def dispatch(self, request: Request, call_next):
        path = request.url.path
        started = time.perf_counter()
        response: Response = await call_next(request)
        elapsed_ms = round(1000.0 * (time.perf_counter() - started), 1)
        logger.bind(
            path=path,
            method=request.method,
            status_code=response.status_code,
            elapsed_ms=elapsed_ms,
        ).info("request served")
        response.headers["X-Elapsed-Ms"] = str(elapsed_ms)
        return response


app.add_middleware(RequestTimingMiddleware)
