from fastapi import APIRouter

from santalo.schemas import PolarityParams
from santalo.symfun.schemas import BigSRequest, ElementaryRequest
from santalo.symfun.service import big_S, elem_sym
from santalo.utils.responses import ResponseSchema

symfun_router = APIRouter(prefix="/symfun", tags=["Symmetric functions"])


@symfun_router.post("/elementary")
def elementary(body: ElementaryRequest):
    return ResponseSchema.success(data={"value": elem_sym(body.r, body.j)})


@symfun_router.post("/big-s")
def big_s(body: BigSRequest):
    params = PolarityParams(k=len(body.points), j=body.j, p=body.p)
    value = big_S(body.points, params, absolute=body.absolute)
    return ResponseSchema.success(
        data={"S": value, "E": value / params.binom, "binom": params.binom}
    )
