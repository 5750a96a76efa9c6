from fastapi import APIRouter

from santalo.ball.models import OrthoBasis
from santalo.ball.schemas import BallValueRequest
from santalo.ball.service import ball_value_at_basis, ball_value_min
from santalo.utils.responses import ResponseSchema

ball_router = APIRouter(prefix="/ball", tags=["Ball functional"])


@ball_router.post("/value")
def ball_value(body: BallValueRequest):
    """At the given basis, or minimized over bases when ``minimize`` is set."""
    bodies = [b.to_polytope() for b in body.bodies]
    n = bodies[0].n
    if body.minimize:
        result = ball_value_min(bodies, body.j, restarts=body.restarts, seed=body.seed)
    else:
        basis = (
            OrthoBasis.identity(n)
            if body.angles is None
            else OrthoBasis.from_angles(n, body.angles)
        )
        result = ball_value_at_basis(bodies, body.j, basis)
    return ResponseSchema.success(data=result)
