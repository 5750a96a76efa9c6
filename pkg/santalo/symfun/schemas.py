from pydantic import BaseModel, Field


class ElementaryRequest(BaseModel):
    r: list[float] = Field(min_length=1)
    j: int = Field(ge=1)


class BigSRequest(BaseModel):
    """A point tuple ``x_1..x_k`` (rows) and the degree of the form."""

    points: list[list[float]] = Field(min_length=2)
    j: int = Field(ge=1)
    p: float = Field(default=1.0, gt=0)
    absolute: bool = False
