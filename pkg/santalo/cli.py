"""``santalo`` command line.

Campaign commands build their config from, in increasing precedence, the
model defaults, the ``[<command>]`` table of ``--config``, the command's own
options and the global ``--seed/--samples/--tol`` flags. They write
``<id>.json`` and ``<id>.csv`` under ``--out`` and exit with the report's
code: 0 when every asserted check passes, 2 on a theorem-case violation, 3 on
a candidate counterexample. Refused or invalid configurations exit 1.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Any

import orjson
import typer
from pydantic import BaseModel, ValidationError

from santalo.ball.models import OrthoBasis
from santalo.ball.service import ball_value_at_basis, ball_value_min
from santalo.bodies.models import Boundedness, SymmetricPolytope
from santalo.bodies.service import make_lp_ball
from santalo.errors import SantaloError
from santalo.harness.report import write_report
from santalo.harness.schemas import (
    CampaignCase,
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
from santalo.logger import logger
from santalo.measure.service import volume
from santalo.polar.schemas import PolarProblem
from santalo.polar.service import j_polar
from santalo.schemas import McConfig, PolarityParams
from santalo.settings import settings
from santalo.utils.formats import format_halfspaces
from santalo.utils.responses import to_jsonable

app = typer.Typer(
    name="santalo",
    help="Polar bodies, volume products and j-Santalo experiments.",
    no_args_is_help=True,
    add_completion=False,
)

BodyFiles = Annotated[
    list[Path],
    typer.Argument(exists=True, dir_okay=False, help="Vertex files (`n m` header)."),
]


@dataclass
class CliState:
    seed: int | None = None
    config: Path | None = None
    out: Path = Path(settings.OUTPUT_DIR)
    samples: int | None = None
    tol: float | None = None

    def section(self, name: str) -> dict[str, Any]:
        if self.config is None:
            return {}
        with self.config.open("rb") as fh:
            tables = tomllib.load(fh)
        values = tables.get(name, {})
        if not isinstance(values, dict):
            raise typer.BadParameter(f"[{name}] must be a table", param_hint="--config")
        return values

    def mc(self) -> McConfig:
        samples = self.samples or settings.MC_SAMPLES
        batch = settings.MC_BATCH if samples % settings.MC_BATCH == 0 else samples
        seed = settings.DEFAULT_SEED if self.seed is None else self.seed
        return McConfig(samples=samples, seed=seed, batch=batch)


@app.callback()
def main(
    ctx: typer.Context,
    seed: Annotated[int | None, typer.Option(min=0, max=2**64 - 1)] = None,
    config: Annotated[
        Path | None,
        typer.Option(exists=True, dir_okay=False, help="TOML file, one table per command."),
    ] = None,
    out: Annotated[Path, typer.Option(help="Report directory.")] = Path(
        settings.OUTPUT_DIR
    ),
    samples: Annotated[int | None, typer.Option(min=1_000)] = None,
    tol: Annotated[float | None, typer.Option(min=0.0)] = None,
):
    ctx.obj = CliState(seed=seed, config=config, out=out, samples=samples, tol=tol)


def _fail(message: str) -> typer.Exit:
    typer.secho(message, fg=typer.colors.RED, err=True)
    return typer.Exit(code=1)


def _build(
    state: CliState, section: str, model: type[BaseModel], options: dict[str, Any]
) -> Any:
    values = state.section(section)
    values.update({key: v for key, v in options.items() if v is not None})
    for key in ("seed", "samples", "tol"):
        if getattr(state, key) is not None:
            values[key] = getattr(state, key)
    try:
        return model.model_validate(values)
    except ValidationError as exc:
        raise _fail(f"invalid [{section}] configuration:\n{exc}") from exc


def _campaign(
    state: CliState, run: Callable[[Any], ExperimentReport], config: BaseModel
) -> None:
    try:
        report = run(config)
    except SantaloError as exc:
        logger.bind(code=exc.code).warning(exc.message)
        raise _fail(f"refused: {exc.message}") from exc
    json_path, csv_path = write_report(report, state.out)
    summary = report.summary
    typer.echo(
        f"{report.experiment_id}: {summary.get('cases', len(report.cases))} cases, "
        f"verdicts {summary.get('verdicts')}, max ratio {summary.get('max_ratio')}"
    )
    typer.echo(f"report: {json_path}")
    typer.echo(f"table:  {csv_path}")
    raise typer.Exit(code=report.exit_code)


def _echo_json(value: Any) -> None:
    typer.echo(orjson.dumps(to_jsonable(value), option=orjson.OPT_INDENT_2).decode())


def _load(paths: list[Path]) -> list[SymmetricPolytope]:
    try:
        return [SymmetricPolytope.load(p, label=p.stem) for p in paths]
    except SantaloError as exc:
        raise _fail(f"cannot read body: {exc.message}") from exc


@app.command("verify-santalo")
def verify_santalo(
    ctx: typer.Context,
    case: Annotated[CampaignCase | None, typer.Option()] = None,
    n: Annotated[int | None, typer.Option()] = None,
    k: Annotated[int | None, typer.Option()] = None,
    j: Annotated[int | None, typer.Option()] = None,
    tuples: Annotated[int | None, typer.Option()] = None,
    vertices: Annotated[int | None, typer.Option()] = None,
    workers: Annotated[int | None, typer.Option()] = None,
):
    """Close seeded tuples with the j-polar and check the volume-product bound."""
    state: CliState = ctx.obj
    config = _build(state, "verify-santalo", VerifyConfig, dict(
        case=case, n=n, k=k, j=j, tuples=tuples, vertices=vertices, workers=workers
    ))
    _campaign(state, cmd_verify_santalo, config)


@app.command()
def symmetrize(
    ctx: typer.Context,
    case: Annotated[CampaignCase | None, typer.Option()] = None,
    n: Annotated[int | None, typer.Option()] = None,
    k: Annotated[int | None, typer.Option()] = None,
    j: Annotated[int | None, typer.Option()] = None,
    tuples: Annotated[int | None, typer.Option()] = None,
    vertices: Annotated[int | None, typer.Option()] = None,
    heights: Annotated[int | None, typer.Option()] = None,
    sweeps: Annotated[int | None, typer.Option()] = None,
    workers: Annotated[int | None, typer.Option()] = None,
):
    """Steiner reduction chains: monotone products and fiber inclusion."""
    state: CliState = ctx.obj
    config = _build(state, "symmetrize", SymmetrizeConfig, dict(
        case=case, n=n, k=k, j=j, tuples=tuples, vertices=vertices,
        heights=heights, sweeps=sweeps, workers=workers,
    ))
    _campaign(state, cmd_symmetrize_experiment, config)


@app.command()
def search(
    ctx: typer.Context,
    n: Annotated[int | None, typer.Option()] = None,
    k: Annotated[int | None, typer.Option()] = None,
    j: Annotated[int | None, typer.Option()] = None,
    steps: Annotated[int | None, typer.Option()] = None,
    restarts: Annotated[int | None, typer.Option()] = None,
    step_size: Annotated[float | None, typer.Option()] = None,
    temperature: Annotated[float | None, typer.Option()] = None,
    cooling: Annotated[float | None, typer.Option()] = None,
    start: Annotated[str | None, typer.Option(help="random or lp-ball")] = None,
    vertices: Annotated[int | None, typer.Option()] = None,
    workers: Annotated[int | None, typer.Option()] = None,
):
    """Annealed search for tuples beating the l_j-ball product (open cases)."""
    state: CliState = ctx.obj
    config = _build(state, "search", SearchConfig, dict(
        n=n, k=k, j=j, steps=steps, restarts=restarts, step_size=step_size,
        temperature=temperature, cooling=cooling, start=start,
        vertices=vertices, workers=workers,
    ))
    _campaign(state, cmd_search_counterexample, config)


@app.command("radial-check")
def radial_check(
    ctx: typer.Context,
    corpus: Annotated[str | None, typer.Option(help="ball or polytopes")] = None,
    n: Annotated[int | None, typer.Option()] = None,
    k: Annotated[int | None, typer.Option()] = None,
    tuples: Annotated[int | None, typer.Option()] = None,
    scale: Annotated[float | None, typer.Option()] = None,
    directions: Annotated[int | None, typer.Option()] = None,
    workers: Annotated[int | None, typer.Option()] = None,
):
    """Radial-function condition and the Euclidean-ball volume bound."""
    state: CliState = ctx.obj
    config = _build(state, "radial-check", RadialConfig, dict(
        corpus=corpus, n=n, k=k, tuples=tuples, scale=scale,
        directions=directions, workers=workers,
    ))
    _campaign(state, cmd_radial_condition_check, config)


@app.command()
def functional(
    ctx: typer.Context,
    check: Annotated[
        list[str] | None,
        typer.Option(help="indicator, exponential, smooth or ball; repeatable"),
    ] = None,
    n: Annotated[int | None, typer.Option()] = None,
    k: Annotated[int | None, typer.Option()] = None,
    j: Annotated[int | None, typer.Option()] = None,
    tuples: Annotated[int | None, typer.Option()] = None,
    grid_steps: Annotated[int | None, typer.Option()] = None,
    workers: Annotated[int | None, typer.Option()] = None,
):
    """Functional inequality checks: lifts, exponential family, smooth, ball."""
    state: CliState = ctx.obj
    config = _build(state, "functional", FunctionalConfig, dict(
        checks=check or None, n=n, k=k, j=j, tuples=tuples,
        grid_steps=grid_steps, workers=workers,
    ))
    _campaign(state, cmd_functional_suite, config)


@app.command()
def polar(
    bodies: BodyFiles,
    j: Annotated[int, typer.Option(min=1)] = 2,
    write: Annotated[Path | None, typer.Option(help="Write the H-polytope here.")] = None,
):
    """Complete the given k - 1 bodies with their generalized j-polar."""
    given = _load(bodies)
    try:
        problem = PolarProblem(bodies=given, params=PolarityParams(k=len(given) + 1, j=j))
        H = j_polar(problem)
    except (SantaloError, ValidationError) as exc:
        raise _fail(str(exc)) from exc
    if write is not None:
        H.dump(write)
        typer.echo(f"written: {write}")
    else:
        typer.echo(format_halfspaces(H.A, H.b), nl=False)
    for diag in H.diagnostics:
        typer.secho(f"{diag.code}: {diag.message}", fg=typer.colors.YELLOW, err=True)
    if H.bounded is Boundedness.BOUNDED and not H.degenerate:
        typer.echo(f"volume: {H.to_polytope().volume!r}", err=True)


@app.command("volume")
def volume_cmd(
    ctx: typer.Context,
    body: Annotated[
        Path | None, typer.Argument(exists=True, dir_okay=False)
    ] = None,
    lp_n: Annotated[int | None, typer.Option(help="l_p ball dimension")] = None,
    lp_p: Annotated[float | None, typer.Option(help="l_p ball exponent")] = None,
    scale: Annotated[float, typer.Option()] = 1.0,
    method: Annotated[str, typer.Option(help="mc or analytic")] = "mc",
):
    """Volume of a vertex file, or of an l_p ball given ``--lp-n/--lp-p``."""
    state: CliState = ctx.obj
    if (body is None) == (lp_n is None or lp_p is None):
        raise _fail("give either a vertex file or both --lp-n and --lp-p")
    try:
        target = (
            _load([body])[0] if body is not None else make_lp_ball(lp_n, lp_p, scale)
        )
        result = volume(target, state.mc(), oracle_method=method)
    except SantaloError as exc:
        raise _fail(exc.message) from exc
    _echo_json(result)


@app.command()
def ball(
    ctx: typer.Context,
    bodies: BodyFiles,
    j: Annotated[int, typer.Option(min=1)] = 2,
    minimize: Annotated[bool, typer.Option(help="Nelder-Mead over bases")] = False,
    restarts: Annotated[int | None, typer.Option(min=1)] = None,
):
    """Ball functional at the standard basis, or minimized over bases."""
    state: CliState = ctx.obj
    given = _load(bodies)
    try:
        if minimize:
            result = ball_value_min(given, j, restarts=restarts, seed=state.seed)
        else:
            result = ball_value_at_basis(given, j, OrthoBasis.identity(given[0].n))
    except SantaloError as exc:
        raise _fail(exc.message) from exc
    _echo_json(result)


if __name__ == "__main__":
    app()
