"""Result files. Numbers are written with 9 significant digits so reruns are byte-identical."""

import csv
import json
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Union

from app.schemas.scenario import FeasibilityRow, PaprRow, RunMetadata, SeRow

logger = logging.getLogger(__name__)

SE_FILE = "se_vs_mt.csv"
PAPR_FILE = "papr_ccdf.csv"
FEASIBILITY_FILE = "feasibility.csv"
META_FILE = "run_meta.json"


def fmt(value: Union[int, float]) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    return f"{value:.9g}"


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (int, float)) else v for v in row])
            count += 1
    logger.info("wrote %d rows to %s", count, path)
    return path


def write_se_csv(rows: List[SeRow], out_dir: Path) -> Path:
    return _write_csv(
        Path(out_dir) / SE_FILE,
        ["scheme", "mt", "mean_se", "ci95"],
        ([r.scheme, r.mt, r.mean_se, r.ci95] for r in rows),
    )


def write_papr_csv(rows: List[PaprRow], out_dir: Path) -> Path:
    def expand():
        for row in rows:
            for threshold, p in zip(row.curve.thresholds_db, row.curve.ccdf):
                yield [row.scheme, row.n_slots, threshold, p]

    return _write_csv(Path(out_dir) / PAPR_FILE, ["scheme", "n_slots", "threshold_db", "ccdf"], expand())


def write_feasibility_csv(rows: List[FeasibilityRow], out_dir: Path) -> Path:
    return _write_csv(
        Path(out_dir) / FEASIBILITY_FILE,
        [
            "label",
            "delay_spread_s",
            "doppler_spread_hz",
            "delay_spread_bound_s",
            "cp_overhead_bound_s",
            "papr_slots_bound_s",
            "upper_bound_s",
            "feasible",
            "binding_constraint",
            "min_slots_for_doppler",
        ],
        (
            [
                r.label or "",
                r.delay_spread_s,
                r.doppler_spread_hz,
                r.result.delay_spread_bound_s,
                r.result.cp_overhead_bound_s,
                r.result.papr_slots_bound_s,
                r.result.upper_bound_s,
                r.result.feasible,
                r.result.binding_constraint.value,
                r.min_slots_for_doppler if r.min_slots_for_doppler is not None else "",
            ]
            for r in rows
        ),
    )


def write_run_meta(metadata: RunMetadata, out_dir: Path) -> Path:
    path = Path(out_dir) / META_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    document = json.dumps(metadata.model_dump(mode="json"), indent=2, sort_keys=True)
    path.write_text(document + "\n", encoding="utf-8")
    return path
