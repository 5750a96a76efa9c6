from typing import Any, Generic, TypeVar

import numpy as np
from fastapi import status
from fastapi.responses import ORJSONResponse
from pydantic import BaseModel

T = TypeVar("T")


class BaseResponse(BaseModel, Generic[T]):
    status_code: int
    message: str
    data: T | None = None
    error: str | None = None
    meta: dict[str, Any] | None = None


def to_jsonable(value: Any) -> Any:
    """Convert numpy containers and pydantic models into plain JSON types."""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(mode="json"))
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [to_jsonable(v) for v in value]
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


class ResponseSchema:
    @staticmethod
    def success(
        data: Any = None, message: str = "Success", meta: dict[str, Any] | None = None
    ) -> ORJSONResponse:
        return ORJSONResponse(
            status_code=status.HTTP_200_OK,
            content=BaseResponse(
                status_code=status.HTTP_200_OK,
                message=message,
                data=to_jsonable(data),
                meta=meta,
            ).model_dump(exclude_none=True),
        )

    @staticmethod
    def error(
        message: str,
        status_code: int = status.HTTP_400_BAD_REQUEST,
        error: str | None = None,
        meta: dict[str, Any] | None = None,
    ) -> ORJSONResponse:
        return ORJSONResponse(
            status_code=status_code,
            content=BaseResponse(
                status_code=status_code,
                message=message,
                error=error,
                meta=to_jsonable(meta) if meta else None,
            ).model_dump(),
        )

    @staticmethod
    def unprocessable(
        message: str = "Unprocessable input",
        error: str | None = None,
        meta: dict[str, Any] | None = None,
    ) -> ORJSONResponse:
        return ResponseSchema.error(
            message=message,
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            error=error,
            meta=meta,
        )

    @staticmethod
    def internal_server_error(
        message: str = "Internal server error", error: str | None = None
    ) -> ORJSONResponse:
        return ResponseSchema.error(
            message=message,
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            error=error,
        )
