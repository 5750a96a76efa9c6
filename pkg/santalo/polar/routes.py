from fastapi import APIRouter

from santalo.bodies.models import Boundedness
from santalo.bodies.schemas import PolytopeOut
from santalo.polar.schemas import HalfspaceOut, JPolarRequest, VerifyRequest
from santalo.polar.service import j_polar, verify_tuple_polarity
from santalo.schemas import PolarityParams
from santalo.utils.responses import ResponseSchema

polar_router = APIRouter(prefix="/polar", tags=["Polar bodies"])


@polar_router.post("/j-polar")
def generalized_polar(body: JPolarRequest):
    """H-representation of the completion; vertices too when it is a body."""
    H = j_polar(body.problem())
    polytope = None
    if H.bounded is Boundedness.BOUNDED and not H.degenerate:
        polytope = PolytopeOut.of(H.to_polytope(label="j-polar"))
    out = HalfspaceOut(
        A=H.A.tolist(),
        b=H.b.tolist(),
        bounded=H.bounded.value,
        degenerate=H.degenerate,
        polytope=polytope,
        diagnostics=list(H.diagnostics),
    )
    return ResponseSchema.success(data=out)


@polar_router.post("/verify")
def verify(body: VerifyRequest):
    params = PolarityParams(k=len(body.bodies), j=body.j)
    verdict = verify_tuple_polarity([b.to_polytope() for b in body.bodies], params)
    return ResponseSchema.success(data=verdict)
