from fastapi import APIRouter, Query

from santalo.bodies.service import make_lp_ball
from santalo.measure.schemas import VolumeRequest
from santalo.measure.service import bound_constant, lp_ball_volume, volume
from santalo.schemas import McConfig
from santalo.settings import settings
from santalo.utils.responses import ResponseSchema

measure_router = APIRouter(prefix="/measure", tags=["Measure"])


def _mc(samples: int | None, seed: int | None) -> McConfig:
    samples = samples or settings.MC_SAMPLES
    batch = settings.MC_BATCH if samples % settings.MC_BATCH == 0 else samples
    return McConfig(
        samples=samples,
        seed=settings.DEFAULT_SEED if seed is None else seed,
        batch=batch,
    )


@measure_router.post("/volume")
def body_volume(body: VolumeRequest):
    """Exact for polytopes; l_p balls by Monte Carlo or closed form."""
    if body.polytope is not None:
        target = body.polytope.to_polytope()
    else:
        ball = body.lp_ball
        target = make_lp_ball(ball.n, ball.p, ball.scale)
    result = volume(target, _mc(body.samples, body.seed), oracle_method=body.method)
    return ResponseSchema.success(data=result)


@measure_router.get("/lp-ball-volume")
def lp_ball(n: int = Query(ge=1), p: float = Query(gt=0)):
    return ResponseSchema.success(data={"n": n, "p": p, "volume": lp_ball_volume(n, p)})


@measure_router.get("/bound-constant")
def bound(n: int = Query(ge=1), j: int = Query(ge=2), k: int = Query(ge=2)):
    return ResponseSchema.success(
        data={"n": n, "j": j, "k": k, "value": bound_constant(n, j, k)}
    )
