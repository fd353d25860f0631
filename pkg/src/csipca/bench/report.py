"""CSV and markdown emission for benchmark results.

CSV floats use a fixed shortest-ish format and '\n' line endings so that a
repeated run of the same config produces byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import ConfigError, DataError
from .runner import ResultRow, SpectrumRow

RESULT_COLUMNS = (
    "pipeline", "k", "q_bits", "mean_gcs", "gcs_p5", "gcs_p50", "gcs_p95",
    "mean_gcs_domain", "or_exact", "or_pct_round", "or_pct_floor",
    "mean_bits", "bits_ceil", "sample_count", "dataset_id",
)

SPECTRUM_COLUMNS = ("k", "mean_pct", "cum_pct", "frac_samples_covered")

REFERENCE_LABEL = "published reference, not reproduced"


def _fmt(value) -> str:
    if value is None:
        return ""
    # floats use the shortest round-trip repr: deterministic and lossless
    return str(value)


def write_results_csv(rows: list[ResultRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow([
                row.pipeline, row.k, "off" if row.q_bits is None else row.q_bits,
                _fmt(row.mean_gcs), _fmt(row.gcs_p5), _fmt(row.gcs_p50), _fmt(row.gcs_p95),
                _fmt(row.mean_gcs_domain), _fmt(row.or_exact),
                row.or_pct_round, row.or_pct_floor,
                _fmt(row.mean_bits), _fmt(row.bits_ceil),
                row.sample_count, row.dataset_id,
            ])


def read_results_csv(path) -> list[ResultRow]:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"results file not found: {path}")
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != RESULT_COLUMNS:
            raise DataError(f"{path}: unexpected results header {reader.fieldnames}")
        for record in reader:
            try:
                rows.append(ResultRow(
                    pipeline=record["pipeline"],
                    k=int(record["k"]),
                    q_bits=None if record["q_bits"] == "off" else int(record["q_bits"]),
                    mean_gcs=float(record["mean_gcs"]),
                    gcs_p5=float(record["gcs_p5"]),
                    gcs_p50=float(record["gcs_p50"]),
                    gcs_p95=float(record["gcs_p95"]),
                    mean_gcs_domain=float(record["mean_gcs_domain"]),
                    or_exact=float(record["or_exact"]),
                    or_pct_round=int(record["or_pct_round"]),
                    or_pct_floor=int(record["or_pct_floor"]),
                    mean_bits=float(record["mean_bits"]) if record["mean_bits"] else None,
                    bits_ceil=int(record["bits_ceil"]) if record["bits_ceil"] else None,
                    sample_count=int(record["sample_count"]),
                    dataset_id=record["dataset_id"],
                ))
            except (KeyError, ValueError) as exc:
                raise DataError(f"{path}: bad results row {record!r}: {exc}") from exc
    return rows


def write_spectrum_csv(rows: list[SpectrumRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SPECTRUM_COLUMNS)
        for row in rows:
            writer.writerow([row.k, _fmt(row.mean_pct), _fmt(row.cum_pct),
                             _fmt(row.frac_samples_covered)])


@dataclass(frozen=True)
class ReferenceRow:
    """A published neural-network result quoted for context, never recomputed."""

    model: str
    scenario: str
    gcs: float
    overhead_pct: int


def load_reference_constants(path=None) -> list[ReferenceRow]:
    """Read reference rows from a CSV; None loads the packaged constants."""
    if path is None:
        text = resources.files("csipca").joinpath("refs/published_reference.csv").read_text()
        source = "<packaged refs>"
    else:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"reference constants file not found: {path}")
        text = path.read_text()
        source = str(path)
    rows = []
    reader = csv.DictReader(text.splitlines())
    expected = {"model", "scenario", "gcs", "overhead_pct"}
    if reader.fieldnames is None:
        return []
    if set(reader.fieldnames) != expected:
        raise ConfigError(f"{source}: reference header must be {sorted(expected)}")
    for record in reader:
        try:
            rows.append(ReferenceRow(
                model=record["model"],
                scenario=record["scenario"],
                gcs=float(record["gcs"]),
                overhead_pct=int(record["overhead_pct"]),
            ))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"{source}: bad reference row {record!r}: {exc}") from exc
    return rows


def emit_comparison_table(rows: list[ResultRow], refs: list[ReferenceRow]) -> str:
    """Markdown table: live PCA rows first, then quoted reference rows."""
    lines = []
    if rows:
        ids = sorted({r.dataset_id for r in rows})
        counts = sorted({r.sample_count for r in rows})
        lines.append(f"Dataset: {', '.join(ids)} "
                     f"({', '.join(str(c) for c in counts)} samples per row)")
        lines.append("")
    header = ("| Model | k | Q | Mean GCS | GCS p5 | GCS p50 | GCS p95 "
              "| OR exact | OR % (round) | OR % (floor) | Bits/report |")
    lines.append(header)
    lines.append("|" + "---|" * 11)
    for r in rows:
        q = "off" if r.q_bits is None else str(r.q_bits)
        bits = "" if r.bits_ceil is None else str(r.bits_ceil)
        lines.append(
            f"| PCA ({r.pipeline}) | {r.k} | {q} | {r.mean_gcs:.4f} | {r.gcs_p5:.4f} "
            f"| {r.gcs_p50:.4f} | {r.gcs_p95:.4f} | {_fmt(r.or_exact)} "
            f"| {r.or_pct_round} | {r.or_pct_floor} | {bits} |")
    for ref in refs:
        lines.append(
            f"| {ref.model}, {ref.scenario} [{REFERENCE_LABEL}] |  |  | {ref.gcs:.4f} "
            f"|  |  |  |  | {ref.overhead_pct} |  |  |")
    lines.append("")
    lines.append("Quantized rows exclude the per-payload float64 scale from the bit column;")
    lines.append("it travels beside the codes as a fixed framing cost.")
    return "\n".join(lines) + "\n"
