from fastapi import APIRouter

from santalo.bodies.schemas import PolytopeOut, SteinerRequest, SupportRequest
from santalo.bodies.service import steiner_symmetrize, support, support_point
from santalo.utils.responses import ResponseSchema

bodies_router = APIRouter(prefix="/bodies", tags=["Bodies"])


@bodies_router.post("/support")
def support_value(body: SupportRequest):
    """Support function and a maximizing vertex in direction ``u``."""
    P = body.to_polytope()
    return ResponseSchema.success(
        data={"value": support(P, body.u), "point": support_point(P, body.u)}
    )


@bodies_router.post("/steiner")
def steiner(body: SteinerRequest):
    symmetral = steiner_symmetrize(body.to_polytope(), body.axis)
    return ResponseSchema.success(data=PolytopeOut.of(symmetral))
