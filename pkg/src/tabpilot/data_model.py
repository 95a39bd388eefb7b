"""Dataset representation, CSV ingestion, per-column profiling, and preparation.

Datasets are immutable after construction: every operation returns a new
``Dataset`` and never touches its input. Missing cells are represented
explicitly as ``None``, never as sentinel values, so imputation stays
observable downstream.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import ColumnNotFound, EmptyDataset, InvalidPrepAction, ParseError

TOP_K_CATEGORIES = 20
OTHER_CATEGORY = "__other__"
NUMERIC_BINS = 10
# Share of present values that must parse for a dtype to be inferred.
INFER_THRESHOLD = 0.95


class DType(str, Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"
    TEMPORAL = "temporal"
    TEXT = "text"


class Granularity(str, Enum):
    """Time unit at which every timestamp in a column is exact."""

    YEAR = "year"
    MONTH = "month"
    DAY = "day"
    HOUR = "hour"
    MINUTE = "minute"


_GRANULARITY_ORDER = [
    Granularity.YEAR,
    Granularity.MONTH,
    Granularity.DAY,
    Granularity.HOUR,
    Granularity.MINUTE,
]


def granularity_index(g: Granularity) -> int:
    """Position in coarse-to-fine order (year=0 .. minute=4)."""
    return _GRANULARITY_ORDER.index(g)


def coarser(a: Granularity, b: Granularity) -> Granularity:
    return a if granularity_index(a) <= granularity_index(b) else b


_EPOCH = datetime(1970, 1, 1)


def epoch_seconds(ts: datetime) -> float:
    """Seconds since 1970-01-01 for a naive timestamp, timezone-free."""
    return (ts - _EPOCH).total_seconds()


def from_epoch_seconds(seconds: float) -> datetime:
    return _EPOCH + timedelta(seconds=seconds)


def truncate_timestamp(ts: datetime, g: Granularity) -> datetime:
    if g == Granularity.YEAR:
        return ts.replace(month=1, day=1, hour=0, minute=0, second=0, microsecond=0)
    if g == Granularity.MONTH:
        return ts.replace(day=1, hour=0, minute=0, second=0, microsecond=0)
    if g == Granularity.DAY:
        return ts.replace(hour=0, minute=0, second=0, microsecond=0)
    if g == Granularity.HOUR:
        return ts.replace(minute=0, second=0, microsecond=0)
    return ts.replace(second=0, microsecond=0)


def detect_granularity(values: Iterable[datetime]) -> Granularity:
    """Coarsest unit at which every timestamp lies on the grid.

    A column of plain dates detects as day; one with nonzero hours as hour,
    and so on. Sub-minute precision floors at minute.
    """
    best = Granularity.MINUTE
    for g in _GRANULARITY_ORDER:
        if all(truncate_timestamp(ts, g) == ts for ts in values):
            best = g
            break
    return best


@dataclass(frozen=True)
class Provenance:
    kind: str  # uploaded | corpus | prepared | augmented
    parents: tuple[str, ...] = ()
    operation: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "parents": list(self.parents), "operation": self.operation}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Provenance:
        return cls(kind=d["kind"], parents=tuple(d.get("parents", [])), operation=d.get("operation"))


UPLOADED = Provenance("uploaded")
CORPUS = Provenance("corpus")


@dataclass(frozen=True)
class Column:
    """A named, typed column; ``values[i] is None`` marks a missing cell."""

    name: str
    dtype: DType
    values: tuple
    granularity: Granularity | None = None  # temporal columns only

    def present(self) -> list:
        return [v for v in self.values if v is not None]

    def missing_count(self) -> int:
        return sum(1 for v in self.values if v is None)


@dataclass(frozen=True)
class Dataset:
    name: str
    columns: tuple[Column, ...]
    provenance: Provenance = UPLOADED

    def __post_init__(self):
        seen = set()
        for c in self.columns:
            if c.name in seen:
                raise ValueError(f"duplicate column name {c.name!r}")
            seen.add(c.name)
        lengths = {len(c.values) for c in self.columns}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths: {sorted(lengths)}")

    @property
    def row_count(self) -> int:
        return len(self.columns[0].values) if self.columns else 0

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise ColumnNotFound(name)

    def has_column(self, name: str) -> bool:
        return any(c.name == name for c in self.columns)


@dataclass(frozen=True)
class ColumnProfile:
    name: str
    dtype: DType
    missing_count: int
    distinct_count: int
    min: float | None = None
    max: float | None = None
    mean: float | None = None
    std: float | None = None
    # numeric/temporal: (lo, hi, count) bins; categorical/text: (category, count)
    histogram: tuple = ()
    temporal_range: tuple | None = None  # (earliest iso, latest iso, granularity)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "dtype": self.dtype.value,
            "missing_count": self.missing_count,
            "distinct_count": self.distinct_count,
            "min": self.min,
            "max": self.max,
            "mean": self.mean,
            "std": self.std,
            "histogram": [list(b) for b in self.histogram],
            "temporal_range": list(self.temporal_range) if self.temporal_range else None,
        }


# -- parsing helpers ---------------------------------------------------------


def _parse_number(raw: str) -> float | None:
    try:
        v = float(raw)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


_EXTRA_TS_FORMATS = ("%Y/%m/%d", "%Y-%m")


def _parse_timestamp(raw: str) -> datetime | None:
    s = raw.strip()
    if not s or s[0].isalpha():
        return None
    try:
        ts = datetime.fromisoformat(s)
    except ValueError:
        ts = None
    if ts is None:
        for fmt in _EXTRA_TS_FORMATS:
            try:
                ts = datetime.strptime(s, fmt)
                break
            except ValueError:
                continue
    if ts is None:
        return None
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc).replace(tzinfo=None)
    return ts


def infer_dtype(raw_values: Sequence[str], row_count: int) -> DType:
    """Apply the inference cascade: numeric, temporal, categorical, text."""
    present = [v for v in raw_values if v != ""]
    if not present:
        return DType.CATEGORICAL
    n = len(present)
    numeric_ok = sum(1 for v in present if _parse_number(v) is not None)
    if numeric_ok / n >= INFER_THRESHOLD:
        return DType.NUMERIC
    temporal_ok = sum(1 for v in present if _parse_timestamp(v) is not None)
    if temporal_ok / n >= INFER_THRESHOLD:
        return DType.TEMPORAL
    distinct = len(set(present))
    if distinct <= max(20, 0.05 * row_count):
        return DType.CATEGORICAL
    return DType.TEXT


def coerce_cell(raw: str, dtype: DType):
    """Convert one raw CSV field to a typed cell; unparseable becomes missing."""
    if raw == "":
        return None
    if dtype == DType.NUMERIC:
        return _parse_number(raw)
    if dtype == DType.TEMPORAL:
        return _parse_timestamp(raw)
    return raw


def _build_column(name: str, raw_values: Sequence[str], dtype: DType,
                  granularity: Granularity | None = None) -> Column:
    cells = tuple(coerce_cell(v, dtype) for v in raw_values)
    if dtype == DType.TEMPORAL and granularity is None:
        present = [v for v in cells if v is not None]
        granularity = detect_granularity(present) if present else Granularity.DAY
    if dtype != DType.TEMPORAL:
        granularity = None
    return Column(name=name, dtype=dtype, values=cells, granularity=granularity)


# -- operations ----------------------------------------------------------------


def ingest_csv(source, name: str, dtypes: dict[str, DType] | None = None,
               granularities: dict[str, Granularity] | None = None,
               provenance: Provenance = UPLOADED) -> Dataset:
    """Read an RFC-4180 CSV (UTF-8, header required) into a Dataset.

    Column dtypes are inferred unless ``dtypes`` pins them (as a persistence
    sidecar does). Empty fields become missing cells. Ragged records raise
    ParseError with the offending record index (header = record 0).
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDataset("CSV has no header row") from None
    if not header or all(h == "" for h in header):
        raise EmptyDataset("CSV header row is empty")
    seen: set[str] = set()
    for h in header:
        if h in seen:
            raise ParseError(f"duplicate header field {h!r}", row_index=0)
        seen.add(h)
    width = len(header)
    raw_cols: list[list[str]] = [[] for _ in header]
    for idx, record in enumerate(reader, start=1):
        if not record:
            continue  # skip blank lines
        if len(record) != width:
            raise ParseError(
                f"record {idx} has {len(record)} fields, expected {width}", row_index=idx)
        for j, field_value in enumerate(record):
            raw_cols[j].append(field_value)
    row_count = len(raw_cols[0]) if raw_cols else 0
    columns = []
    for col_name, raw in zip(header, raw_cols):
        dtype = (dtypes or {}).get(col_name) or infer_dtype(raw, row_count)
        gran = (granularities or {}).get(col_name)
        columns.append(_build_column(col_name, raw, dtype, gran))
    return Dataset(name=name, columns=tuple(columns), provenance=provenance)


def _numeric_histogram(values: list[float]) -> tuple:
    lo, hi = min(values), max(values)
    if lo == hi:
        return ((lo, hi, len(values)),)
    width = (hi - lo) / NUMERIC_BINS
    counts = [0] * NUMERIC_BINS
    for v in values:
        i = int((v - lo) / width)
        if i >= NUMERIC_BINS:  # hi itself lands in the last bin
            i = NUMERIC_BINS - 1
        counts[i] += 1
    return tuple((lo + i * width, lo + (i + 1) * width, counts[i]) for i in range(NUMERIC_BINS))


def _categorical_histogram(values: list[str]) -> tuple:
    counts: dict[str, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if len(ranked) <= TOP_K_CATEGORIES:
        return tuple(ranked)
    head = ranked[: TOP_K_CATEGORIES - 1]
    rest = sum(c for _, c in ranked[TOP_K_CATEGORIES - 1:])
    return tuple(head + [(OTHER_CATEGORY, rest)])


def profile_column(column: Column, row_count: int) -> ColumnProfile:
    present = column.present()
    missing = row_count - len(present)
    if not present:
        return ColumnProfile(column.name, column.dtype, missing, 0)
    distinct = len(set(present))
    if column.dtype == DType.NUMERIC:
        n = len(present)
        mean = sum(present) / n
        var = sum((v - mean) ** 2 for v in present) / n
        return ColumnProfile(
            column.name, column.dtype, missing, distinct,
            min=min(present), max=max(present), mean=mean, std=math.sqrt(var),
            histogram=_numeric_histogram(present))
    if column.dtype == DType.TEMPORAL:
        epochs = [epoch_seconds(ts) for ts in present]
        return ColumnProfile(
            column.name, column.dtype, missing, distinct,
            histogram=_numeric_histogram(epochs),
            temporal_range=(min(present).isoformat(), max(present).isoformat(),
                            column.granularity.value))
    return ColumnProfile(column.name, column.dtype, missing, distinct,
                         histogram=_categorical_histogram(present))


def profile(dataset: Dataset) -> list[ColumnProfile]:
    """One profile per column; stats over present values only. Pure."""
    if not dataset.columns:
        raise EmptyDataset(f"dataset {dataset.name!r} has no columns")
    return [profile_column(c, dataset.row_count) for c in dataset.columns]


# -- preparation ---------------------------------------------------------------


@dataclass(frozen=True)
class ExcludeColumn:
    name: str

    def describe(self) -> str:
        return f"exclude_column({self.name})"


@dataclass(frozen=True)
class FillMissing:
    name: str
    constant: Any

    def describe(self) -> str:
        return f"fill_missing({self.name}, {self.constant})"


@dataclass(frozen=True)
class DropRowsOutside:
    name: str
    low: float
    high: float

    def describe(self) -> str:
        return f"drop_rows_outside({self.name}, {self.low}, {self.high})"


PrepAction = ExcludeColumn | FillMissing | DropRowsOutside


def _coerce_constant(constant: Any, dtype: DType):
    if dtype == DType.NUMERIC:
        v = _parse_number(str(constant))
        if v is None:
            raise InvalidPrepAction(f"fill constant {constant!r} is not numeric")
        return v
    if dtype == DType.TEMPORAL:
        ts = constant if isinstance(constant, datetime) else _parse_timestamp(str(constant))
        if ts is None:
            raise InvalidPrepAction(f"fill constant {constant!r} is not a timestamp")
        return ts
    return str(constant)


def prepare(dataset: Dataset, actions: Sequence[PrepAction], name: str | None = None) -> Dataset:
    """Apply prep actions in order, returning a new dataset.

    Rows whose value is missing in a ``drop_rows_outside`` column are kept;
    the action removes out-of-range values, not unknown ones.
    """
    columns = list(dataset.columns)
    for action in actions:
        names = [c.name for c in columns]
        if action.name not in names:
            raise ColumnNotFound(action.name)
        idx = names.index(action.name)
        if isinstance(action, ExcludeColumn):
            columns.pop(idx)
        elif isinstance(action, FillMissing):
            col = columns[idx]
            fill = _coerce_constant(action.constant, col.dtype)
            values = tuple(fill if v is None else v for v in col.values)
            columns[idx] = Column(col.name, col.dtype, values, col.granularity)
        elif isinstance(action, DropRowsOutside):
            col = columns[idx]
            if col.dtype not in (DType.NUMERIC, DType.TEMPORAL):
                raise InvalidPrepAction(
                    f"drop_rows_outside needs a numeric or temporal column, "
                    f"{col.name!r} is {col.dtype.value}")
            low = _coerce_constant(action.low, col.dtype)
            high = _coerce_constant(action.high, col.dtype)
            keep = [i for i, v in enumerate(col.values) if v is None or low <= v <= high]
            columns = [Column(c.name, c.dtype, tuple(c.values[i] for i in keep), c.granularity)
                       for c in columns]
        else:
            raise InvalidPrepAction(f"unknown prep action {action!r}")
    op = "prepare: " + "; ".join(a.describe() for a in actions)
    return Dataset(
        name=name or f"{dataset.name}-prepared",
        columns=tuple(columns),
        provenance=Provenance("prepared", parents=(dataset.name,), operation=op))


def action_from_dict(d: dict[str, Any]) -> PrepAction:
    kind = d.get("action")
    if kind == "exclude_column":
        return ExcludeColumn(name=d["name"])
    if kind == "fill_missing":
        return FillMissing(name=d["name"], constant=d["constant"])
    if kind == "drop_rows_outside":
        return DropRowsOutside(name=d["name"], low=d["low"], high=d["high"])
    raise InvalidPrepAction(f"unknown prep action kind {kind!r}")


# -- persistence -----------------------------------------------------------------


def render_cell(value, dtype: DType) -> str:
    if value is None:
        return ""
    if dtype == DType.NUMERIC:
        return repr(float(value))
    if dtype == DType.TEMPORAL:
        return value.isoformat()
    return str(value)


def to_csv_text(dataset: Dataset) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(dataset.column_names)
    for i in range(dataset.row_count):
        writer.writerow([render_cell(c.values[i], c.dtype) for c in dataset.columns])
    return out.getvalue()


def sidecar_dict(dataset: Dataset) -> dict[str, Any]:
    return {
        "name": dataset.name,
        "dtypes": {c.name: c.dtype.value for c in dataset.columns},
        "granularities": {c.name: c.granularity.value for c in dataset.columns
                          if c.granularity is not None},
        "provenance": dataset.provenance.to_dict(),
    }


def save_dataset(dataset: Dataset, csv_path: str | Path) -> None:
    """Persist as CSV plus a JSON sidecar next to it (<stem>.meta.json)."""
    csv_path = Path(csv_path)
    csv_path.write_text(to_csv_text(dataset), encoding="utf-8")
    sidecar = csv_path.with_suffix("").with_suffix(".meta.json")
    sidecar.write_text(json.dumps(sidecar_dict(dataset), indent=2), encoding="utf-8")


def load_dataset(csv_path: str | Path) -> Dataset:
    csv_path = Path(csv_path)
    sidecar = csv_path.with_suffix("").with_suffix(".meta.json")
    meta = json.loads(sidecar.read_text(encoding="utf-8"))
    dtypes = {k: DType(v) for k, v in meta.get("dtypes", {}).items()}
    grans = {k: Granularity(v) for k, v in meta.get("granularities", {}).items()}
    prov = Provenance.from_dict(meta["provenance"]) if meta.get("provenance") else UPLOADED
    return ingest_csv(csv_path.read_bytes(), name=meta["name"],
                      dtypes=dtypes, granularities=grans, provenance=prov)
