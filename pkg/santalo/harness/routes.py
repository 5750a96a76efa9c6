from fastapi import APIRouter

from santalo.harness.schemas import (
    ExperimentReport,
    FunctionalConfig,
    RadialConfig,
    SearchConfig,
    SymmetrizeConfig,
    VerifyConfig,
)
from santalo.harness.service import (
    cmd_functional_suite,
    cmd_radial_condition_check,
    cmd_search_counterexample,
    cmd_symmetrize_experiment,
    cmd_verify_santalo,
)
from santalo.utils.responses import ResponseSchema

experiments_router = APIRouter(prefix="/experiments", tags=["Experiments"])


def _respond(report: ExperimentReport):
    return ResponseSchema.success(
        data=report,
        message=f"{report.experiment} finished",
        meta={"exit_code": report.exit_code, "violations": report.violations},
    )


@experiments_router.post("/verify-santalo")
def verify_santalo(config: VerifyConfig):
    return _respond(cmd_verify_santalo(config))


@experiments_router.post("/symmetrize")
def symmetrize(config: SymmetrizeConfig):
    return _respond(cmd_symmetrize_experiment(config))


@experiments_router.post("/search")
def search(config: SearchConfig):
    """Runs synchronously; keep ``steps`` small over HTTP."""
    return _respond(cmd_search_counterexample(config))


@experiments_router.post("/radial-check")
def radial_check(config: RadialConfig):
    return _respond(cmd_radial_condition_check(config))


@experiments_router.post("/functional")
def functional(config: FunctionalConfig):
    return _respond(cmd_functional_suite(config))
