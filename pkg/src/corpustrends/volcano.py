"""Differential term-frequency statistics (volcano filter).

Per-partition counts of the target corpus give a weighted mean/std of
relative frequencies per term; the reference-corpus frequency standardized
by those moments yields a t statistic, and the Student-t survival function
(via the regularized incomplete beta function) gives the p-value.  Terms
with small p and large log2 fold change versus the reference corpus are
"specific".
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_P_MAX = 0.05
DEFAULT_FC_MIN = 1.0
DEFAULT_MIN_OCC = 3
DEFAULT_PSEUDOCOUNT = 1.0


class VolcanoError(Exception):
    pass


@dataclass
class WeightedStats:
    mean: float
    std: float
    n_min: int
    df: int


@dataclass
class VolcanoRecord:
    term: str
    log2_fc: float
    p_value: float
    stats: WeightedStats
    target_count: int
    reference_count: int


@dataclass
class FrequencyTable:
    partitions: list[str]
    totals: list[float]
    counts: dict[str, list[int]] = field(default_factory=dict)

    def total_count(self, term: str) -> int:
        return sum(self.counts.get(term, []))


@dataclass
class ReferenceTable:
    counts: dict[str, int]
    total_tokens: int


def build_frequency_table(
    partition_mentions: dict[str, list[str]],
    partition_totals: dict[str, float],
) -> FrequencyTable:
    """Count term occurrences per partition.

    ``partition_mentions`` maps partition label to the stream of normalized
    terms seen in it; ``partition_totals`` holds each partition's total token
    count (the weights).
    """
    partitions = sorted(partition_mentions)
    for p in partitions:
        if partition_totals.get(p, 0) <= 0:
            raise VolcanoError(f"partition {p!r} has zero weight")
    table = FrequencyTable(
        partitions=partitions,
        totals=[float(partition_totals[p]) for p in partitions],
    )
    for i, p in enumerate(partitions):
        for term, c in Counter(partition_mentions[p]).items():
            vec = table.counts.setdefault(term, [0] * len(partitions))
            vec[i] = c
    return table


def weighted_stats(counts: list[int], weights: list[float]) -> WeightedStats:
    """Weighted mean/std of per-partition relative frequencies.

    The weight is the partition's token total, so the mean equals the pooled
    relative frequency.  n is the minimal per-partition count; df = max(0, n-1).
    """
    if len(counts) != len(weights):
        raise VolcanoError("weighted_stats: dimension mismatch")
    if any(w <= 0 for w in weights):
        raise VolcanoError("weighted_stats: nonpositive weight")
    wsum = sum(weights)
    freqs = [x / w for x, w in zip(counts, weights)]
    mean = sum(w * f for w, f in zip(weights, freqs)) / wsum
    var = sum(w * (f - mean) ** 2 for w, f in zip(weights, freqs)) / wsum
    n_min = min(counts)
    return WeightedStats(mean=mean, std=math.sqrt(var), n_min=n_min, df=max(0, n_min - 1))


def t_statistic(freq: float, stats: WeightedStats) -> float:
    """(f - mean) / (std / sqrt(n)); signed infinity when std is zero and
    f differs from the mean, NaN when n is zero (caller assigns p = 1)."""
    if stats.n_min == 0:
        return math.nan
    if stats.std == 0.0:
        if freq == stats.mean:
            return 0.0
        return math.inf if freq > stats.mean else -math.inf
    return (freq - stats.mean) / (stats.std / math.sqrt(stats.n_min))


_BETACF_MAX_ITER = 500
_BETACF_EPS = 1e-16
_BETACF_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz's method)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETACF_TINY:
        d = _BETACF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_TINY:
            d = _BETACF_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETACF_TINY:
            c = _BETACF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_TINY:
            d = _BETACF_TINY
        c = 1.0 + aa / c
        if abs(c) < _BETACF_TINY:
            c = _BETACF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            return h
    raise VolcanoError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise VolcanoError("regularized_incomplete_beta: x outside [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf(x: float, df: int) -> float:
    """P(T > x) for Student's t with ``df`` degrees of freedom."""
    if df < 1:
        raise VolcanoError("student_t_sf: df must be >= 1")
    if math.isnan(x):
        return math.nan
    if math.isinf(x):
        return 0.0 if x > 0 else 1.0
    if x == 0.0:
        return 0.5
    tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + x * x))
    return tail if x > 0 else 1.0 - tail


def fold_change(
    target_count: int,
    target_total: float,
    ref_count: int,
    ref_total: float,
    pseudocount: float = DEFAULT_PSEUDOCOUNT,
) -> float:
    """log2 of the smoothed target/reference relative-frequency ratio."""
    if pseudocount <= 0:
        raise VolcanoError("fold_change: pseudocount must be > 0")
    target_f = (target_count + pseudocount) / (target_total + pseudocount)
    ref_f = (ref_count + pseudocount) / (ref_total + pseudocount)
    return math.log2(target_f / ref_f)


def volcano_records(
    table: FrequencyTable,
    ref: ReferenceTable,
    pseudocount: float = DEFAULT_PSEUDOCOUNT,
) -> list[VolcanoRecord]:
    """Compute (log2 fold change, p-value, df) for every term in the table."""
    records = []
    target_total = sum(table.totals)
    for term in sorted(table.counts):
        vec = table.counts[term]
        stats = weighted_stats(vec, table.totals)
        ref_count = ref.counts.get(term, 0)
        ref_freq = ref_count / ref.total_tokens
        if stats.df < 1:
            p = 1.0
        else:
            t = t_statistic(ref_freq, stats)
            p = student_t_sf(abs(t), stats.df)
        records.append(
            VolcanoRecord(
                term=term,
                log2_fc=fold_change(sum(vec), target_total, ref_count, ref.total_tokens, pseudocount),
                p_value=p,
                stats=stats,
                target_count=sum(vec),
                reference_count=ref_count,
            )
        )
    return records


def volcano_filter(
    records: list[VolcanoRecord],
    p_max: float = DEFAULT_P_MAX,
    fc_min: float = DEFAULT_FC_MIN,
    min_occ: int = DEFAULT_MIN_OCC,
) -> list[str]:
    """Specific terms: enough occurrences, small p, large positive fold change.

    Sorted by descending fold change, then term.
    """
    if min_occ < 1:
        raise VolcanoError("volcano_filter: min_occ must be >= 1")
    kept = [
        r
        for r in records
        if r.target_count >= min_occ and r.p_value <= p_max and r.log2_fc >= fc_min
    ]
    kept.sort(key=lambda r: (-r.log2_fc, r.term))
    return [r.term for r in kept]


def load_reference_table(path: str | Path) -> ReferenceTable:
    """Read ``TOTAL <int>`` header then ``term<TAB>count`` lines; duplicate
    term rows are summed."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("TOTAL "):
        raise VolcanoError("reference table: missing 'TOTAL <n>' header")
    total = int(lines[0].split()[1])
    if total <= 0:
        raise VolcanoError("reference table: total must be positive")
    counts: Counter = Counter()
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        term, _, count_s = line.partition("\t")
        count = int(count_s)
        if count < 0:
            raise VolcanoError(f"reference table line {lineno}: negative count")
        counts[term] += count
    return ReferenceTable(counts=dict(counts), total_tokens=total)
