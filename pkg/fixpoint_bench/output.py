"""Writers of the benchmark result files."""

from __future__ import annotations

import csv
import io
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import orjson
from lxml import etree

from .const import (
    AGGREGATED_CSV_HEADER,
    AGGREGATED_CSV_NAME,
    BOUNDS_NAME,
    RAW_CSV_HEADER,
    RAW_CSV_NAME,
    SUMMARY_NAME,
    SVG_LOG_FLOOR,
    SVG_NAMES,
)
from .exceptions import OutputError
from .fixpoint_solver.models import RunRecord


_LOGGER = logging.getLogger(__name__)

SVG_NS = "http://www.w3.org/2000/svg"
SVG_WIDTH = 640
SVG_HEIGHT = 400
SVG_MARGIN = 40
SVG_COLORS = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
)


def _write_bytes(path: Path, data: bytes) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as err:
        raise OutputError(f"Cannot write {path}: {err}", path) from err
    _LOGGER.debug(f"Wrote {len(data)} bytes to {path}")
    return path


def _csv_bytes(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue().encode()


def raw_rows(records: Iterable[RunRecord]) -> Iterable[tuple]:
    """Yield one CSV row per recorded iterate."""
    for record in records:
        for row in record.rows:
            yield (
                record.algorithm,
                record.sampling,
                record.seed,
                row.n,
                row.d_contrib,
                row.f_value,
                row.clamps,
            )


def emit_csv(records: Sequence[RunRecord], path: Path) -> Path:
    """Write the per-iterate rows of every run."""
    return _write_bytes(Path(path), _csv_bytes(RAW_CSV_HEADER, raw_rows(records)))


def emit_aggregated_csv(
        series: dict[str, list[tuple[int, float, float]]],
        path: Path
) -> Path:
    """Write D_n and F_n per algorithm and iteration."""
    rows = (
        (key, n, d_n, f_n)
        for key, points in series.items()
        for n, d_n, f_n in points
    )
    return _write_bytes(Path(path), _csv_bytes(AGGREGATED_CSV_HEADER, rows))


def emit_json(data: dict[str, Any], path: Path) -> Path:
    """Write a JSON document with sorted keys."""
    try:
        payload = orjson.dumps(
            data,
            option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS
            | orjson.OPT_SERIALIZE_NUMPY,
        )
    except TypeError as err:
        raise OutputError(f"Cannot serialize {path}: {err}", path) from err
    return _write_bytes(Path(path), payload)


def _scale(values: list[float], log_scale: bool) -> list[float]:
    if log_scale:
        return [math.log10(max(v, SVG_LOG_FLOOR)) for v in values]
    return values


def render_svg(
        series: dict[str, list[tuple[int, float, float]]],
        measure: str
) -> bytes:
    """Return an SVG line chart of D_n (log scale) or F_n (linear)."""
    if measure not in SVG_NAMES:
        raise ValueError(f"Unknown measure {measure!r}")
    column = 1 if measure == "D_n" else 2
    log_scale = measure == "D_n"

    curves = {
        key: _scale([point[column] for point in points], log_scale)
        for key, points in series.items()
    }
    values = [v for curve in curves.values() for v in curve if math.isfinite(v)]
    low, high = (min(values), max(values)) if values else (0.0, 1.0)
    if high == low:
        high = low + 1.0
    n_max = max((len(curve) - 1 for curve in curves.values()), default=1) or 1

    width = SVG_WIDTH - 2 * SVG_MARGIN
    height = SVG_HEIGHT - 2 * SVG_MARGIN

    root = etree.Element(
        f"{{{SVG_NS}}}svg",
        nsmap={None: SVG_NS},
        version="1.1",
        width=str(SVG_WIDTH),
        height=str(SVG_HEIGHT),
    )
    title = etree.SubElement(root, f"{{{SVG_NS}}}title")
    title.text = f"{measure} ({'log10' if log_scale else 'linear'})"

    for index, (key, curve) in enumerate(curves.items()):
        points = " ".join(
            f"{SVG_MARGIN + width * n / n_max:.2f},"
            f"{SVG_MARGIN + height * (high - v) / (high - low):.2f}"
            for n, v in enumerate(curve)
            if math.isfinite(v)
        )
        etree.SubElement(
            root,
            f"{{{SVG_NS}}}polyline",
            points=points,
            fill="none",
            stroke=SVG_COLORS[index % len(SVG_COLORS)],
            attrib={"data-algorithm": key},
        )
        label = etree.SubElement(
            root,
            f"{{{SVG_NS}}}text",
            x=str(SVG_WIDTH - SVG_MARGIN),
            y=str(SVG_MARGIN + 14 * index),
            fill=SVG_COLORS[index % len(SVG_COLORS)],
        )
        label.text = key

    return etree.tostring(root, xml_declaration=True, encoding="utf-8")


def emit_svg(
        series: dict[str, list[tuple[int, float, float]]],
        path: Path,
        measure: str
) -> Path:
    """Write the chart of one measure."""
    return _write_bytes(Path(path), render_svg(series, measure))


def write_outputs(
        result,
        out_dir: Path,
        emit_svgs: bool = False,
        bounds: dict[str, Any] | None = None
) -> list[Path]:
    """Write every result file of an experiment and return their paths."""
    out_dir = Path(out_dir)
    written = [
        emit_csv(result.records, out_dir / RAW_CSV_NAME),
        emit_aggregated_csv(result.series, out_dir / AGGREGATED_CSV_NAME),
        emit_json(result.summary, out_dir / SUMMARY_NAME),
    ]
    if bounds is not None:
        written.append(emit_json(bounds, out_dir / BOUNDS_NAME))
    if emit_svgs:
        for measure, name in SVG_NAMES.items():
            written.append(emit_svg(result.series, out_dir / name, measure))
    _LOGGER.info(f"Wrote {len(written)} files to {out_dir}")
    return written
