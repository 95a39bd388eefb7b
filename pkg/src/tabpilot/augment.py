"""Dataset augmentation over a local corpus: keyword search, join/union
compatibility detection, and execution.

Joins are always left joins that preserve the query dataset's rows and
order. When key columns repeat (duplicate exact keys, or a finer-grained
temporal side), the candidate side is aggregated first: mean for numeric
columns, most-frequent value for everything else.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .data_model import (CORPUS, Column, Dataset, DType, Granularity,
                         Provenance, coarser, detect_granularity, ingest_csv,
                         profile, render_cell, to_csv_text, truncate_timestamp)
from .errors import NotFound, StaleCandidate

PREVIEW_ROWS = 5

# Term-frequency weights for relevance scoring, by metadata field.
WEIGHT_NAME = 3
WEIGHT_KEYWORDS = 2
WEIGHT_COLUMNS = 2
WEIGHT_DESCRIPTION = 1


def _tokens(text: str) -> list[str]:
    return re.findall(r"[a-z0-9]+", text.lower())


def dataset_fingerprint(dataset: Dataset) -> str:
    """Content hash over schema and cells; provenance and name excluded so
    renames do not invalidate candidates."""
    payload = {
        "dtypes": [c.dtype.value for c in dataset.columns],
        "granularities": [c.granularity.value if c.granularity else None
                          for c in dataset.columns],
        "csv": to_csv_text(dataset),
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    path: str
    description: str
    keywords: tuple[str, ...]
    dataset: Dataset

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "description": self.description,
                "keywords": list(self.keywords),
                "columns": [{"name": c.name, "dtype": c.dtype.value,
                             "granularity": c.granularity.value if c.granularity else None}
                            for c in self.dataset.columns]}


@dataclass(frozen=True)
class Corpus:
    directory: str
    entries: tuple[CorpusEntry, ...]
    warnings: tuple[str, ...] = ()

    def entry(self, name: str) -> CorpusEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise NotFound("corpus_entry", name)


def index_corpus(directory: str | Path) -> Corpus:
    """Load every <name>.csv + <name>.meta.json pair under the directory.

    Entries whose sidecar is missing, malformed, or out of step with the CSV
    schema are skipped with a warning instead of failing the whole index.
    """
    root = Path(directory)
    entries: list[CorpusEntry] = []
    warnings: list[str] = []
    for csv_path in sorted(root.glob("*.csv")):
        meta_path = csv_path.with_name(csv_path.stem + ".meta.json")
        if not meta_path.exists():
            warnings.append(f"{csv_path.name}: no metadata sidecar, skipped")
            continue
        try:
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            name = meta["name"]
            description = meta.get("description", "")
            keywords = tuple(str(k) for k in meta.get("keywords", []))
            declared = meta["columns"]
            dtypes = {c["name"]: DType(c["dtype"]) for c in declared}
            grans = {c["name"]: Granularity(c["granularity"]) for c in declared
                     if c.get("granularity")}
            ds = ingest_csv(csv_path.read_bytes(), name=name, dtypes=dtypes,
                            granularities=grans, provenance=CORPUS)
        except Exception as exc:
            warnings.append(f"{csv_path.name}: {exc}, skipped")
            continue
        if ds.column_names != [c["name"] for c in declared]:
            warnings.append(f"{csv_path.name}: sidecar columns do not match "
                            f"the CSV header, skipped")
            continue
        entries.append(CorpusEntry(name=name, path=str(csv_path),
                                   description=description, keywords=keywords,
                                   dataset=ds))
    return Corpus(directory=str(root), entries=tuple(entries),
                  warnings=tuple(warnings))


# -- compatibility detection ------------------------------------------------------


@dataclass(frozen=True)
class JoinPlan:
    key_pairs: tuple[tuple[str, str], ...]  # (query column, candidate column)
    kind: str  # exact | temporal
    target_granularity: Granularity | None = None
    aggregations: tuple[tuple[str, str], ...] = ()  # (candidate column, mean|mode)

    def to_dict(self) -> dict[str, Any]:
        return {"key_pairs": [list(p) for p in self.key_pairs], "kind": self.kind,
                "target_granularity": (self.target_granularity.value
                                       if self.target_granularity else None),
                "aggregations": [list(a) for a in self.aggregations]}


@dataclass(frozen=True)
class AugmentCandidate:
    entry: CorpusEntry
    operation: str  # join | union
    plan: JoinPlan | None
    column_mapping: tuple[tuple[str, str], ...] | None
    relevance: float
    key_overlap: int
    preview: dict[str, Any]
    query_fingerprint: str
    candidate_fingerprint: str

    @property
    def candidate_id(self) -> str:
        return f"{self.entry.name}:{self.operation}"

    def to_dict(self) -> dict[str, Any]:
        return {"candidate_id": self.candidate_id,
                "entry": self.entry.to_dict(),
                "operation": self.operation,
                "plan": self.plan.to_dict() if self.plan else None,
                "column_mapping": ([list(m) for m in self.column_mapping]
                                   if self.column_mapping else None),
                "relevance": self.relevance,
                "key_overlap": self.key_overlap,
                "preview": self.preview}


def _aggregation_for(dtype: DType) -> str:
    return "mean" if dtype == DType.NUMERIC else "mode"


def _union_mapping(query: Dataset, cand: Dataset):
    """Map every query column to a same-name same-dtype candidate column."""
    mapping = []
    for col in query.columns:
        if not cand.has_column(col.name) or cand.column(col.name).dtype != col.dtype:
            return None
        mapping.append((col.name, col.name))
    return tuple(mapping)


def _temporal_plan(query: Dataset, cand: Dataset):
    q_temporal = [c for c in query.columns if c.dtype == DType.TEMPORAL]
    c_temporal = [c for c in cand.columns if c.dtype == DType.TEMPORAL]
    if not q_temporal or not c_temporal:
        return None
    qk, ck = q_temporal[0], c_temporal[0]
    target = coarser(qk.granularity or Granularity.DAY,
                     ck.granularity or Granularity.DAY)
    aggs = tuple((c.name, _aggregation_for(c.dtype))
                 for c in cand.columns if c.name != ck.name)
    return JoinPlan(key_pairs=((qk.name, ck.name),), kind="temporal",
                    target_granularity=target, aggregations=aggs)


def _exact_plan(query: Dataset, cand: Dataset):
    pairs = tuple((c.name, c.name) for c in query.columns
                  if c.dtype != DType.TEMPORAL and cand.has_column(c.name)
                  and cand.column(c.name).dtype == c.dtype)
    if not pairs:
        return None
    keys = {p[1] for p in pairs}
    aggs = tuple((c.name, _aggregation_for(c.dtype))
                 for c in cand.columns if c.name not in keys)
    if not aggs:
        return None  # nothing to carry over
    return JoinPlan(key_pairs=pairs, kind="exact", aggregations=aggs)


def _relevance(entry: CorpusEntry, keywords: Sequence[str]) -> float:
    terms = []
    for kw in keywords:
        terms.extend(_tokens(kw))
    if not terms:
        return 0.0
    fields = ((WEIGHT_NAME, _tokens(entry.name)),
              (WEIGHT_KEYWORDS, _tokens(" ".join(entry.keywords))),
              (WEIGHT_DESCRIPTION, _tokens(entry.description)),
              (WEIGHT_COLUMNS, _tokens(" ".join(entry.dataset.column_names))))
    score = 0
    for term in terms:
        for weight, toks in fields:
            score += weight * sum(1 for t in toks if t == term)
    return float(score)


def _preview(dataset: Dataset) -> dict[str, Any]:
    head = min(PREVIEW_ROWS, dataset.row_count)
    rows = [[render_cell(c.values[i], c.dtype) for c in dataset.columns]
            for i in range(head)]
    return {"columns": dataset.column_names, "rows": rows,
            "profiles": [p.to_dict() for p in profile(dataset)]}


def search_augmentations(corpus: Corpus, query: Dataset,
                         keywords: Sequence[str] = ()) -> list[AugmentCandidate]:
    """Compatible corpus entries ranked by relevance.

    A union is offered when the full query schema maps onto the entry;
    otherwise a temporal join if both sides hold a temporal column, then an
    exact join on shared (name, dtype) keys. Incompatible entries are
    dropped. Ties rank by key overlap, then entry name.
    """
    q_fp = dataset_fingerprint(query)
    out = []
    for entry in corpus.entries:
        mapping = _union_mapping(query, entry.dataset)
        plan = None
        if mapping is not None:
            operation, key_overlap = "union", len(mapping)
        else:
            plan = _temporal_plan(query, entry.dataset) or _exact_plan(query, entry.dataset)
            if plan is None:
                continue
            operation, key_overlap = "join", len(plan.key_pairs)
        out.append(AugmentCandidate(
            entry=entry, operation=operation, plan=plan, column_mapping=mapping,
            relevance=_relevance(entry, keywords), key_overlap=key_overlap,
            preview=_preview(entry.dataset), query_fingerprint=q_fp,
            candidate_fingerprint=dataset_fingerprint(entry.dataset)))
    out.sort(key=lambda c: (-c.relevance, -c.key_overlap, c.entry.name))
    return out


# -- execution ------------------------------------------------------------


def _mode(values: list) -> Any:
    counts: dict[Any, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return min(counts, key=lambda v: (-counts[v], str(v)))


def _aggregate(values: list, how: str):
    present = [v for v in values if v is not None]
    if not present:
        return None
    if how == "mean":
        return sum(float(v) for v in present) / len(present)
    return _mode(present)


def _grouped_candidate(cand: Dataset, plan: JoinPlan) -> dict[tuple, dict[str, Any]]:
    """Aggregate candidate rows per key tuple; rows with a missing key drop."""
    cand_keys = [p[1] for p in plan.key_pairs]
    key_cols = [cand.column(k) for k in cand_keys]
    if plan.kind == "temporal":
        g = plan.target_granularity
        key_rows = [tuple(None if col.values[i] is None
                          else truncate_timestamp(col.values[i], g)
                          for col in key_cols)
                    for i in range(cand.row_count)]
    else:
        key_rows = [tuple(col.values[i] for col in key_cols)
                    for i in range(cand.row_count)]
    groups: dict[tuple, list[int]] = {}
    for i, key in enumerate(key_rows):
        if any(k is None for k in key):
            continue
        groups.setdefault(key, []).append(i)
    carried = {name: cand.column(name) for name, _ in plan.aggregations}
    out: dict[tuple, dict[str, Any]] = {}
    for key, members in groups.items():
        out[key] = {name: _aggregate([carried[name].values[i] for i in members], how)
                    for name, how in plan.aggregations}
    return out


def _free_name(name: str, taken: set[str]) -> str:
    while name in taken:
        name = f"{name}_aug"
    return name


def _join(query: Dataset, cand: Dataset, plan: JoinPlan, name: str) -> Dataset:
    groups = _grouped_candidate(cand, plan)
    q_key_cols = [query.column(q) for q, _ in plan.key_pairs]
    if plan.kind == "temporal":
        g = plan.target_granularity
        query_keys = [tuple(None if col.values[i] is None
                            else truncate_timestamp(col.values[i], g)
                            for col in q_key_cols)
                      for i in range(query.row_count)]
    else:
        query_keys = [tuple(col.values[i] for col in q_key_cols)
                      for i in range(query.row_count)]
    taken = set(query.column_names)
    new_columns = list(query.columns)
    for cand_name, how in plan.aggregations:
        source = cand.column(cand_name)
        values = []
        for key in query_keys:
            if any(k is None for k in key) or key not in groups:
                values.append(None)
            else:
                values.append(groups[key][cand_name])
        out_name = _free_name(cand_name, taken)
        taken.add(out_name)
        gran = source.granularity
        if source.dtype == DType.TEMPORAL:
            present = [v for v in values if v is not None]
            gran = detect_granularity(present) if present else source.granularity
        new_columns.append(Column(out_name, source.dtype, tuple(values), gran))
    prov = Provenance(kind="augmented", parents=(query.name, cand.name),
                      operation=f"join:{plan.kind}")
    return Dataset(name=name, columns=tuple(new_columns), provenance=prov)


def _union(query: Dataset, cand: Dataset,
           mapping: tuple[tuple[str, str], ...], name: str) -> Dataset:
    lookup = dict(mapping)
    new_columns = []
    for col in query.columns:
        extra = cand.column(lookup[col.name])
        values = col.values + extra.values
        gran = col.granularity
        if col.dtype == DType.TEMPORAL:
            present = [v for v in values if v is not None]
            gran = detect_granularity(present) if present else col.granularity
        new_columns.append(Column(col.name, col.dtype, values, gran))
    prov = Provenance(kind="augmented", parents=(query.name, cand.name),
                      operation="union")
    return Dataset(name=name, columns=tuple(new_columns), provenance=prov)


def apply_augmentation(query: Dataset, candidate: AugmentCandidate,
                       corpus: Corpus | None = None,
                       name: str | None = None) -> Dataset:
    """Execute a candidate found by search_augmentations.

    Raises StaleCandidate if either dataset's content changed since the
    search that produced the candidate.
    """
    entry = candidate.entry
    if corpus is not None:
        entry = corpus.entry(candidate.entry.name)  # NotFound if it vanished
    if dataset_fingerprint(query) != candidate.query_fingerprint:
        raise StaleCandidate("query dataset changed since this candidate was found")
    if dataset_fingerprint(entry.dataset) != candidate.candidate_fingerprint:
        raise StaleCandidate("corpus dataset changed since this candidate was found")
    result_name = name or f"{query.name}_x_{entry.name}"
    if candidate.operation == "union":
        return _union(query, entry.dataset, candidate.column_mapping, result_name)
    return _join(query, entry.dataset, candidate.plan, result_name)
