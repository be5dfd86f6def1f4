"""Proximity-kernel trend mining over six-month corpus buckets.

For every mention of a target term, the nearest specific-term mentions on
each side (ranked over mentions, not raw tokens) receive kernel scores that
accumulate per (bucket, target, term).
"""

from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date

from .chunker import TermMention

DEFAULT_KERNEL = {1: 1.0, 2: 0.5, 3: 0.3}
DEFAULT_TOP_K = 5


class TrendsError(Exception):
    pass


@dataclass
class TimeBucket:
    label: str
    start: date
    end: date
    doc_ids: list[str] = field(default_factory=list)


@dataclass
class TargetSpec:
    canonical: str
    aliases: list[str] = field(default_factory=list)

    def terms(self) -> set[str]:
        return {self.canonical, *self.aliases}


@dataclass
class KernelSpec:
    scores: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_KERNEL))

    def __post_init__(self) -> None:
        ranks = sorted(self.scores)
        values = [self.scores[r] for r in ranks]
        if any(v < 0 for v in values):
            raise TrendsError("kernel scores must be >= 0")
        if any(a < b for a, b in zip(values, values[1:])):
            raise TrendsError("kernel scores must be nonincreasing in rank")

    def score(self, rank: int) -> float:
        return self.scores.get(rank, 0.0)

    @property
    def max_rank(self) -> int:
        return max(self.scores, default=0)


# (bucket label, target canonical) -> term -> accumulated score
AssociationTable = dict[tuple[str, str], dict[str, float]]


def _semester_start(d: date) -> date:
    return date(d.year, 1 if d.month < 7 else 7, 1)


def _next_semester(d: date) -> date:
    if d.month == 1:
        return date(d.year, 7, 1)
    return date(d.year + 1, 1, 1)


def _label(d: date) -> str:
    return f"{d.year} S{1 if d.month == 1 else 2}"


def bucket_by_semester(
    documents: list,
    start: date,
    end: date,
) -> list[TimeBucket]:
    """Partition [start, end) into semester buckets and assign documents.

    ``documents`` is any iterable of objects with ``id`` and ``date``
    attributes.  A start date not aligned to Jan 1 / Jul 1 is snapped down
    with a warning.
    """
    if start >= end:
        raise TrendsError("bucket_by_semester: empty date range")
    aligned = _semester_start(start)
    if aligned != start:
        warnings.warn(f"bucket start {start} snapped down to {aligned}")
    buckets: list[TimeBucket] = []
    cursor = aligned
    while cursor < end:
        nxt = _next_semester(cursor)
        buckets.append(TimeBucket(label=_label(cursor), start=cursor, end=min(nxt, end)))
        cursor = nxt
    for doc in documents:
        if aligned <= doc.date < end:
            idx = (doc.date.year - aligned.year) * 2 + (0 if doc.date.month < 7 else 1)
            offset = 0 if aligned.month == 1 else -1
            buckets[idx + offset].doc_ids.append(doc.id)
    return buckets


def find_target_mentions(mentions: list[TermMention], target: TargetSpec) -> list[int]:
    """Head-index positions of mentions matching the canonical term or an alias."""
    wanted = target.terms()
    return [m.head_index for m in mentions if m.term in wanted]


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def score_neighbors(
    mentions: list[TermMention],
    target: TargetSpec,
    specific: set[str],
    kernel: KernelSpec,
    sentence_spans: dict[int, tuple[int, int]] | None = None,
) -> dict[str, float]:
    """Kernel score contributions for one document.

    Specific-term mentions on each side of each target mention are ranked
    1, 2, 3, ... by mention proximity, independently per side, and receive
    the kernel score for their rank.  The target's own mentions and any
    mention overlapping a target mention never score.

    ``sentence_spans`` (mention span of each sentence) enables the optional
    sentence-bounded mode: only neighbors in the target's sentence count.
    """
    wanted = target.terms()
    target_mentions = [m for m in mentions if m.term in wanted]
    if not target_mentions:
        return {}
    candidates = [
        m
        for m in mentions
        if m.term in specific
        and m.term not in wanted
        and not any(_overlaps(m.span, t.span) for t in target_mentions)
    ]
    candidates.sort(key=lambda m: m.head_index)
    scores: dict[str, float] = defaultdict(float)
    for t in target_mentions:
        if sentence_spans is not None:
            bounds = next(
                (b for b in sentence_spans.values() if b[0] <= t.head_index < b[1]),
                None,
            )
        else:
            bounds = None
        left = [m for m in candidates if m.head_index < t.head_index]
        right = [m for m in candidates if m.head_index > t.head_index]
        if bounds is not None:
            left = [m for m in left if m.head_index >= bounds[0]]
            right = [m for m in right if m.head_index < bounds[1]]
        for side in (list(reversed(left)), right):
            for rank, m in enumerate(side[: kernel.max_rank], start=1):
                scores[m.term] += kernel.score(rank)
    return dict(scores)


def accumulate(
    buckets: list[TimeBucket],
    doc_mentions: dict[str, list[TermMention]],
    targets: list[TargetSpec],
    specific: set[str],
    kernel: KernelSpec | None = None,
) -> AssociationTable:
    """Sum per-document neighbor scores over each bucket and target."""
    kernel = kernel or KernelSpec()
    table: AssociationTable = {}
    for bucket in buckets:
        for target in targets:
            cell: dict[str, float] = defaultdict(float)
            for doc_id in bucket.doc_ids:
                for term, s in score_neighbors(
                    doc_mentions.get(doc_id, []), target, specific, kernel
                ).items():
                    cell[term] += s
            if cell:
                table[(bucket.label, target.canonical)] = dict(cell)
    return table


def top_k(
    table: AssociationTable,
    bucket_label: str,
    target_canonical: str,
    k: int = DEFAULT_TOP_K,
) -> list[tuple[str, float]]:
    """Top k (term, score) rows, score descending, ties lexicographic."""
    if k < 1:
        raise TrendsError("top_k: k must be >= 1")
    cell = table.get((bucket_label, target_canonical), {})
    ranked = sorted(cell.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]


def load_targets(path) -> list[TargetSpec]:
    """Read target list lines: ``canonical<TAB>alias1|alias2|...``."""
    from pathlib import Path

    targets = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        canonical, _, alias_s = line.partition("\t")
        aliases = [a for a in alias_s.split("|") if a] if alias_s else []
        targets.append(TargetSpec(canonical=canonical.strip(), aliases=aliases))
    return targets
