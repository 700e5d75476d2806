"""Dataset loading, attribute schema derivation and numeric binning.

A mapping config names the coordinate columns and the typed attribute columns
so arbitrary tabular exports can be loaded without hard-coding a source
schema. Numeric attributes are binned into equal-frequency intervals at load
time so every attribute has a finite facet domain; rows with missing or
out-of-range coordinates (or missing attribute values) are dropped and
counted rather than failing the load.
"""

from __future__ import annotations

import csv
import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import Any, List, Mapping, Sequence, Tuple, Union

from .errors import (
    MissingColumnError,
    NoValidRowsError,
    UnknownFacetError,
    UnreadableSourceError,
)
from .geometry import GeoPoint

DEFAULT_NUMERIC_BINS = 8

KIND_CATEGORICAL = "categorical"
KIND_ORDINAL = "ordinal"
KIND_NUMERIC = "numeric"
_KINDS = (KIND_CATEGORICAL, KIND_ORDINAL, KIND_NUMERIC)


@dataclass(frozen=True)
class PointRecord:
    """One dataset point: stable id, geo location, raw attribute values."""

    id: Any
    location: GeoPoint
    attributes: Mapping[str, Any]


@dataclass(frozen=True)
class Attribute:
    """One schema attribute with its finite facet domain.

    For categorical/ordinal attributes ``values`` is the value domain; for
    numeric attributes it is the tuple of bin labels and ``bin_edges`` holds
    the interior edges that separate the bins.
    """

    name: str
    kind: str
    values: Tuple[Any, ...]
    bin_edges: Tuple[float, ...] = ()

    def facet_value(self, raw: Any) -> Any:
        """Map a raw attribute value onto its facet label."""
        if self.kind == KIND_NUMERIC:
            v = float(raw)
            if not math.isfinite(v):
                raise UnknownFacetError(f"{self.name}: non-finite value {raw!r}")
            return self.values[bisect_left(self.bin_edges, v)]
        if raw not in self.values:
            raise UnknownFacetError(f"{self.name}: value {raw!r} not in domain {self.values!r}")
        return raw


class AttributeSchema:
    """The facet universe: every (attribute, value-or-bin) pair."""

    def __init__(self, attributes: Sequence[Attribute]):
        names = [a.name for a in attributes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate attribute names in schema: {names}")
        self.attributes: Tuple[Attribute, ...] = tuple(attributes)
        self._by_name = {a.name: a for a in self.attributes}

    def __iter__(self):
        return iter(self.attributes)

    def __len__(self) -> int:
        return len(self.attributes)

    def attribute(self, name: str) -> Attribute:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownFacetError(f"unknown attribute {name!r}") from None

    def facet_universe(self) -> List[Tuple[str, Any]]:
        return [(a.name, v) for a in self.attributes for v in a.values]

    def facets_of(self, point: PointRecord) -> List[Tuple[str, Any]]:
        """The point's facet per attribute; raises UnknownFacetError on bad values."""
        facets = []
        for a in self.attributes:
            if a.name not in point.attributes:
                raise UnknownFacetError(f"point {point.id!r} missing attribute {a.name!r}")
            facets.append((a.name, a.facet_value(point.attributes[a.name])))
        return facets


@dataclass(frozen=True)
class Dataset:
    """An immutable loaded point collection plus its schema and bounding box."""

    points: Tuple[PointRecord, ...]
    schema: AttributeSchema
    bbox: Tuple[float, float, float, float]  # min_lat, min_lon, max_lat, max_lon
    dropped_rows: int = 0
    source: str = ""

    def __len__(self) -> int:
        return len(self.points)

    def by_id(self) -> Mapping[Any, PointRecord]:
        return {p.id: p for p in self.points}


def bin_numeric(values: Sequence[float], bins: int) -> List[float]:
    """Equal-frequency interior bin edges for a numeric column.

    Edges are midpoints between consecutive sorted values at the rank cuts,
    so with all-distinct inputs every bin population is within one of
    ``n / bins``. When the column has fewer distinct values than requested
    bins, the edges collapse and fewer bins result; a constant column yields
    no edges (a single bin).
    """
    if bins < 1 or int(bins) != bins:
        raise ValueError(f"bins must be an integer >= 1, got {bins}")
    vals = sorted(float(v) for v in values if math.isfinite(float(v)))
    if not vals:
        raise ValueError("need at least one finite value to bin")
    n_distinct = len(set(vals))
    if n_distinct <= 1 or bins == 1:
        return []
    bins = min(bins, n_distinct)
    n = len(vals)
    edges = []
    for j in range(1, bins):
        pos = min(max(round(j * n / bins), 1), n - 1)
        edges.append((vals[pos - 1] + vals[pos]) / 2.0)
    return sorted(set(edges))


def _format_edge(v: float) -> str:
    return f"{v:.6g}"


def bin_labels(edges: Sequence[float]) -> Tuple[str, ...]:
    """Human-readable labels for the bins delimited by interior edges."""
    if not edges:
        return ("all",)
    labels = [f"<= {_format_edge(edges[0])}"]
    for lo, hi in zip(edges, edges[1:]):
        labels.append(f"({_format_edge(lo)}, {_format_edge(hi)}]")
    labels.append(f"> {_format_edge(edges[-1])}")
    return tuple(labels)


def load_mapping_config(config: Union[str, Path, Mapping]) -> dict:
    """Read and sanity-check a mapping config from a path or a dict."""
    if isinstance(config, (str, Path)):
        try:
            with open(config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except OSError as exc:
            raise UnreadableSourceError(f"cannot read mapping config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UnreadableSourceError(f"mapping config is not valid JSON: {exc}") from exc
    if not isinstance(config, Mapping):
        raise UnreadableSourceError("mapping config must be a JSON object")
    for key in ("lat_column", "lon_column"):
        if key not in config:
            raise MissingColumnError(f"mapping config lacks {key!r}")
    for spec in config.get("attributes", []):
        if "column" not in spec:
            raise MissingColumnError(f"attribute entry lacks 'column': {spec!r}")
        kind = spec.get("kind", KIND_CATEGORICAL)
        if kind not in _KINDS:
            raise UnreadableSourceError(f"unknown attribute kind {kind!r} (expected one of {_KINDS})")
    return dict(config)


def _iter_rows(path: Path):
    """Yield (line_number, dict) rows from a CSV or record-per-line JSON file."""
    suffix = path.suffix.lower()
    try:
        if suffix in (".jsonl", ".ndjson", ".json"):
            with open(path, "r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        row = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise UnreadableSourceError(f"{path}:{lineno}: invalid JSON record: {exc}") from exc
                    if not isinstance(row, dict):
                        raise UnreadableSourceError(f"{path}:{lineno}: record is not an object")
                    yield lineno, row
        else:
            with open(path, "r", encoding="utf-8", newline="") as fh:
                reader = csv.DictReader(fh)
                if reader.fieldnames is None:
                    raise UnreadableSourceError(f"{path}: empty file, no header row")
                for lineno, row in enumerate(reader, start=2):
                    yield lineno, row
    except OSError as exc:
        raise UnreadableSourceError(f"cannot read {path}: {exc}") from exc


def _parse_domain_value(raw: Any) -> Any:
    """Normalize an ordinal raw value: integers stay integers, numbery strings parse."""
    if isinstance(raw, bool):
        return raw
    if isinstance(raw, (int, float)):
        return int(raw) if float(raw).is_integer() else float(raw)
    text = str(raw).strip()
    try:
        num = float(text)
    except ValueError:
        return text
    return int(num) if num.is_integer() else num


def _missing(value: Any) -> bool:
    return value is None or (isinstance(value, str) and value.strip() == "")


def load_dataset(source: Union[str, Path], config: Union[str, Path, Mapping]) -> Dataset:
    """Load a tabular or record-per-line file into an immutable Dataset.

    Rows with missing or out-of-range coordinates, or with missing attribute
    values, are dropped and counted in ``dropped_rows``. A value outside an
    explicitly declared domain raises UnknownFacetError, since that points at
    a config bug rather than a dirty row.
    """
    cfg = load_mapping_config(config)
    path = Path(source)
    lat_col = cfg["lat_column"]
    lon_col = cfg["lon_column"]
    id_col = cfg.get("id_column")
    attr_specs = cfg.get("attributes", [])

    declared: dict[str, tuple] = {}
    for spec in attr_specs:
        kind = spec.get("kind", KIND_CATEGORICAL)
        if "domain" in spec and kind != KIND_NUMERIC:
            if kind == KIND_ORDINAL:
                declared[spec["column"]] = tuple(_parse_domain_value(v) for v in spec["domain"])
            else:
                declared[spec["column"]] = tuple(str(v).strip() for v in spec["domain"])

    rows = []
    dropped = 0
    header_checked = False
    for lineno, row in _iter_rows(path):
        if not header_checked:
            needed = [lat_col, lon_col] + [s["column"] for s in attr_specs]
            if id_col:
                needed.append(id_col)
            absent = [c for c in needed if c not in row]
            if absent and (lat_col in absent or lon_col in absent):
                raise MissingColumnError(f"{path}: missing coordinate column(s) {absent!r}")
            if absent:
                raise MissingColumnError(f"{path}: missing column(s) {absent!r}")
            header_checked = True

        try:
            lat = float(row[lat_col])
            lon = float(row[lon_col])
        except (TypeError, ValueError):
            dropped += 1
            continue
        if not (math.isfinite(lat) and math.isfinite(lon) and -90 <= lat <= 90 and -180 < lon <= 180):
            dropped += 1
            continue

        attrs = {}
        ok = True
        for spec in attr_specs:
            col = spec["column"]
            kind = spec.get("kind", KIND_CATEGORICAL)
            raw = row.get(col)
            if _missing(raw):
                ok = False
                break
            if kind == KIND_NUMERIC:
                try:
                    val = float(raw)
                except (TypeError, ValueError):
                    ok = False
                    break
                if not math.isfinite(val):
                    ok = False
                    break
            elif kind == KIND_ORDINAL:
                val = _parse_domain_value(raw)
            else:
                val = str(raw).strip()
            if col in declared and val not in declared[col]:
                raise UnknownFacetError(
                    f"{path}:{lineno}: value {val!r} for {col!r} outside declared domain {declared[col]!r}"
                )
            attrs[col] = val
        if not ok:
            dropped += 1
            continue
        rows.append((lineno, row.get(id_col) if id_col else None, lat, lon, attrs))

    if not rows:
        raise NoValidRowsError(f"{path}: no valid rows after dropping {dropped}")

    # stable ids: the id column when present (ints when they all parse), else row order
    if id_col:
        raw_ids = [r[1] for r in rows]
        try:
            ids = [int(str(v).strip()) for v in raw_ids]
        except (TypeError, ValueError):
            ids = [str(v).strip() for v in raw_ids]
        if len(set(ids)) != len(ids):
            raise UnreadableSourceError(f"{path}: duplicate ids in column {id_col!r}")
    else:
        ids = list(range(len(rows)))

    attributes: List[Attribute] = []
    for spec in attr_specs:
        col = spec["column"]
        kind = spec.get("kind", KIND_CATEGORICAL)
        if kind == KIND_NUMERIC:
            edges = bin_numeric([r[4][col] for r in rows], int(spec.get("bins", DEFAULT_NUMERIC_BINS)))
            attributes.append(Attribute(col, kind, bin_labels(edges), tuple(edges)))
        else:
            if col in declared:
                domain = declared[col]
            else:
                observed = {r[4][col] for r in rows}
                domain = tuple(sorted(observed, key=lambda v: (str(type(v)), v)))
            attributes.append(Attribute(col, kind, domain))
    schema = AttributeSchema(attributes)

    points = tuple(
        PointRecord(id=pid, location=GeoPoint(lat=lat, lon=lon), attributes=dict(attrs))
        for (lineno, _raw, lat, lon, attrs), pid in zip(rows, ids)
    )
    lats = [p.location.lat for p in points]
    lons = [p.location.lon for p in points]
    return Dataset(
        points=points,
        schema=schema,
        bbox=(min(lats), min(lons), max(lats), max(lons)),
        dropped_rows=dropped,
        source=str(path),
    )
