"""Corpus, query, and relevance-judgment I/O plus TREC run files.

File formats handled here:

- corpus TSV: ``doc_id<TAB>text``, UTF-8, LF line endings
- corpus JSONL: one object per line with ``id`` and ``contents`` fields
- queries TSV: ``query_id<TAB>text``
- qrels: whitespace-separated ``qid 0 docid rel``
- run: space-separated ``qid Q0 docid rank score tag``

Run scores are rendered with 6 significant digits, so write -> read -> write
reproduces a run file byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

SCORE_FORMAT = ".6g"


def format_score(score: float) -> str:
    """Render a run score to its 6-significant-digit file form."""
    return format(score, SCORE_FORMAT)


def _require_id(value: str, what: str, where: str = "") -> str:
    prefix = f"{where}: " if where else ""
    if not value:
        raise ValueError(f"{prefix}empty {what}")
    if any(ch.isspace() for ch in value):
        raise ValueError(f"{prefix}{what} contains whitespace: {value!r}")
    return value


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str

    def __post_init__(self) -> None:
        _require_id(self.doc_id, "doc_id")


@dataclass(frozen=True)
class Query:
    query_id: str
    text: str

    def __post_init__(self) -> None:
        _require_id(self.query_id, "query_id")


class RunEntry(NamedTuple):
    doc_id: str
    rank: int
    score: float


@dataclass
class RankedList:
    """One route's ordered retrieval output for a single query.

    Invariants enforced at construction: ranks are exactly 1..len in order,
    doc_ids are unique, scores are finite and non-increasing.
    """

    query_id: str
    entries: list[RunEntry]
    tag: str

    def __post_init__(self) -> None:
        _require_id(self.query_id, "query_id")
        _require_id(self.tag, "tag")
        self.entries = [
            entry if isinstance(entry, RunEntry) else RunEntry(*entry)
            for entry in self.entries
        ]
        seen: set[str] = set()
        prev_score = math.inf
        for position, entry in enumerate(self.entries, start=1):
            _require_id(entry.doc_id, "doc_id", f"query {self.query_id}")
            if entry.rank != position:
                raise ValueError(
                    f"query {self.query_id}: ranks must be exactly "
                    f"1..{len(self.entries)}, found {entry.rank} at position {position}"
                )
            if entry.doc_id in seen:
                raise ValueError(f"query {self.query_id}: duplicate doc_id {entry.doc_id!r}")
            seen.add(entry.doc_id)
            if not math.isfinite(entry.score):
                raise ValueError(f"query {self.query_id}: non-finite score for {entry.doc_id!r}")
            if entry.score > prev_score:
                raise ValueError(f"query {self.query_id}: scores increase at rank {entry.rank}")
            prev_score = entry.score

    def doc_ids(self) -> list[str]:
        return [entry.doc_id for entry in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class Qrels:
    """Graded relevance judgments: (query_id, doc_id) -> grade >= 0.

    Pairs not present are implicitly grade 0.
    """

    judgments: dict[str, dict[str, int]] = field(default_factory=dict)

    def set_grade(self, query_id: str, doc_id: str, grade: int) -> None:
        """Record a judgment; a repeated (query, doc) pair overwrites."""
        _require_id(query_id, "query_id")
        _require_id(doc_id, "doc_id")
        if grade < 0:
            raise ValueError(f"relevance grade must be >= 0, got {grade}")
        self.judgments.setdefault(query_id, {})[doc_id] = grade

    def grade(self, query_id: str, doc_id: str) -> int:
        return self.judgments.get(query_id, {}).get(doc_id, 0)

    def query_ids(self) -> list[str]:
        return list(self.judgments)

    def doc_grades(self, query_id: str) -> dict[str, int]:
        return dict(self.judgments.get(query_id, {}))

    def relevant_docs(self, query_id: str, threshold: int = 1) -> set[str]:
        return {
            doc_id
            for doc_id, grade in self.judgments.get(query_id, {}).items()
            if grade >= threshold
        }

    def __len__(self) -> int:
        return sum(len(docs) for docs in self.judgments.values())


def _numbered_lines(path: str | Path) -> Iterator[tuple[int, str]]:
    """Yield (line_no, line) for non-blank lines, newline stripped."""
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            yield line_no, line


def load_corpus(path: str | Path, format: str = "tsv") -> list[Document]:
    """Load documents from a TSV or JSONL file, preserving file order."""
    if format not in ("tsv", "jsonl"):
        raise ValueError(f"unknown corpus format {format!r}; expected 'tsv' or 'jsonl'")
    docs: list[Document] = []
    seen: set[str] = set()
    for line_no, line in _numbered_lines(path):
        if format == "tsv":
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{line_no}: expected 'doc_id<TAB>text', got {len(parts)} columns"
                )
            doc_id, text = parts
        else:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{line_no}: invalid JSON: {exc}") from None
            if not isinstance(obj, dict) or "id" not in obj or "contents" not in obj:
                raise ValueError(f"{path}:{line_no}: object must carry 'id' and 'contents'")
            doc_id, text = str(obj["id"]), str(obj["contents"])
        try:
            doc = Document(doc_id, text)
        except ValueError as exc:
            raise ValueError(f"{path}:{line_no}: {exc}") from None
        if doc.doc_id in seen:
            raise ValueError(f"{path}:{line_no}: duplicate doc_id {doc.doc_id!r}")
        seen.add(doc.doc_id)
        docs.append(doc)
    return docs


def load_queries(path: str | Path) -> list[Query]:
    """Load queries from a TSV file (``query_id<TAB>text``), in file order."""
    queries: list[Query] = []
    seen: set[str] = set()
    for line_no, line in _numbered_lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(
                f"{path}:{line_no}: expected 'query_id<TAB>text', got {len(parts)} columns"
            )
        query_id, text = parts
        try:
            query = Query(query_id, text)
        except ValueError as exc:
            raise ValueError(f"{path}:{line_no}: {exc}") from None
        if query.query_id in seen:
            raise ValueError(f"{path}:{line_no}: duplicate query_id {query.query_id!r}")
        seen.add(query.query_id)
        queries.append(query)
    return queries


def load_qrels(path: str | Path) -> Qrels:
    """Load TREC qrels; a later duplicate (qid, docid) row overwrites."""
    qrels = Qrels()
    for line_no, line in _numbered_lines(path):
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(
                f"{path}:{line_no}: expected 'qid 0 docid rel', got {len(parts)} columns"
            )
        query_id, _, doc_id, grade_str = parts
        try:
            grade = int(grade_str)
        except ValueError:
            raise ValueError(
                f"{path}:{line_no}: relevance grade must be an integer, got {grade_str!r}"
            ) from None
        try:
            qrels.set_grade(query_id, doc_id, grade)
        except ValueError as exc:
            raise ValueError(f"{path}:{line_no}: {exc}") from None
    return qrels


def write_qrels(qrels: Qrels, path: str | Path) -> None:
    """Write qrels sorted by (query_id, doc_id) so output is reproducible."""
    lines = []
    for query_id in sorted(qrels.judgments):
        for doc_id in sorted(qrels.judgments[query_id]):
            lines.append(f"{query_id} 0 {doc_id} {qrels.judgments[query_id][doc_id]}\n")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.writelines(lines)


def read_run(path: str | Path) -> list[RankedList]:
    """Read a TREC run file into RankedLists, grouped in first-seen order.

    Within each query the ranks must be exactly 1..n with unique documents
    and non-increasing scores; anything else is an error.
    """
    rows: dict[str, list[tuple[int, str, float]]] = {}
    tags: dict[str, str] = {}
    for line_no, line in _numbered_lines(path):
        parts = line.split()
        if len(parts) != 6:
            raise ValueError(
                f"{path}:{line_no}: expected 'qid Q0 docid rank score tag', "
                f"got {len(parts)} columns"
            )
        query_id, _, doc_id, rank_str, score_str, tag = parts
        try:
            rank = int(rank_str)
        except ValueError:
            raise ValueError(f"{path}:{line_no}: rank must be an integer, got {rank_str!r}") from None
        try:
            score = float(score_str)
        except ValueError:
            raise ValueError(f"{path}:{line_no}: score must be a number, got {score_str!r}") from None
        rows.setdefault(query_id, []).append((rank, doc_id, score))
        tags.setdefault(query_id, tag)
    lists: list[RankedList] = []
    for query_id, group in rows.items():
        group.sort(key=lambda row: row[0])
        ranks = [row[0] for row in group]
        if ranks != list(range(1, len(group) + 1)):
            raise ValueError(
                f"{path}: query {query_id}: ranks must be exactly 1..{len(group)} "
                "with no gaps or duplicates"
            )
        entries = [RunEntry(doc_id, rank, score) for rank, doc_id, score in group]
        try:
            lists.append(RankedList(query_id, entries, tags[query_id]))
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None
    return lists


def write_run(lists: Iterable[RankedList], path: str | Path) -> None:
    """Write RankedLists as a TREC run file, one query group after another."""
    lines = []
    seen: set[str] = set()
    for ranked in lists:
        if ranked.query_id in seen:
            raise ValueError(f"duplicate query_id {ranked.query_id!r} across ranked lists")
        seen.add(ranked.query_id)
        for entry in ranked.entries:
            lines.append(
                f"{ranked.query_id} Q0 {entry.doc_id} {entry.rank} "
                f"{format_score(entry.score)} {ranked.tag}\n"
            )
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.writelines(lines)
