"""Report assembly and emission (JSON tree + CSV table per campaign)."""

import csv
import hashlib
import platform
from datetime import datetime
from datetime import timezone as _tz
from pathlib import Path

import numpy as np
import orjson
import scipy

from santalo.harness.schemas import CaseRecord, ExperimentConfig, ExperimentReport
from santalo.logger import logger
from santalo.utils.responses import to_jsonable

UTC = _tz.utc  # datetime.UTC requires Python >= 3.11

VOLATILE_FIELDS = {"started_at", "wall_clock", "fingerprint"}
CSV_COLUMNS = ["index", "seed", "verdict", "asserted", "ratio", "stderr", "product"]


def _canonical(payload) -> bytes:
    return orjson.dumps(to_jsonable(payload), option=orjson.OPT_SORT_KEYS)


def environment() -> dict[str, str]:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "machine": platform.machine(),
    }


def experiment_id(experiment: str, config: ExperimentConfig) -> str:
    digest = hashlib.sha256(_canonical(config.model_dump(mode="json"))).hexdigest()
    return f"{experiment}-{digest[:12]}"


def fingerprint(report: ExperimentReport) -> str:
    """SHA-256 over the report without timestamps and timings."""
    payload = report.model_dump(mode="json", exclude=VOLATILE_FIELDS)
    return hashlib.sha256(_canonical(payload)).hexdigest()


def build_report(
    experiment: str,
    config: ExperimentConfig,
    cases: list[CaseRecord],
    summary: dict,
    started: datetime,
    wall_clock: float,
) -> ExperimentReport:
    report = ExperimentReport(
        experiment=experiment,
        experiment_id=experiment_id(experiment, config),
        config=config.model_dump(mode="json"),
        cases=cases,
        summary=to_jsonable(summary),
        environment=environment(),
        started_at=started.astimezone(UTC).isoformat(),
        wall_clock=wall_clock,
    )
    return report.model_copy(update={"fingerprint": fingerprint(report)})


def _metric_columns(cases: list[CaseRecord]) -> list[str]:
    return sorted({key for case in cases for key in case.metrics})


def write_report(report: ExperimentReport, out_dir: str | Path) -> tuple[Path, Path]:
    """``<id>.json`` with the full tree and ``<id>.csv`` with one row per case."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / f"{report.experiment_id}.json"
    json_path.write_bytes(
        orjson.dumps(
            to_jsonable(report.model_dump(mode="json")),
            option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS,
        )
    )

    metrics = _metric_columns(report.cases)
    csv_path = out / f"{report.experiment_id}.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS + metrics)
        for case in report.cases:
            row = [getattr(case, col) for col in CSV_COLUMNS]
            row[2] = case.verdict.value
            writer.writerow(row + [case.metrics.get(key, "") for key in metrics])
    logger.info(f"report {report.experiment_id} written to {out}")
    return json_path, csv_path


def load_report(path: str | Path) -> ExperimentReport:
    return ExperimentReport.model_validate(orjson.loads(Path(path).read_bytes()))
