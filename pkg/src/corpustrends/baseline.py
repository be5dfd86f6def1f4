"""Publication-count baseline series from the OpenAlex works API.

Yearly counts come from one grouped query; weekly counts iterate date
windows.  Responses are cached verbatim on disk, and all retrieval honors a
retry/backoff policy.  Tests run entirely from recorded fixtures.
"""

from __future__ import annotations

import hashlib
import json
import time
import urllib.parse
from dataclasses import dataclass
from datetime import date, timedelta
from pathlib import Path

OPENALEX_WORKS_URL = "https://api.openalex.org/works"
MAX_TRIES = 5
BACKOFF_BASE = 1.0
BACKOFF_FACTOR = 2.0


class BaselineError(Exception):
    pass


@dataclass
class CountSeries:
    key: str
    granularity: str  # "year" or "week"
    points: list[tuple[date, float]]


def _default_http_get(url: str) -> str:
    import requests

    resp = requests.get(url, timeout=30, headers={"User-Agent": "corpustrends/0.1"})
    resp.raise_for_status()
    return resp.text


class OpenAlexClient:
    """Disk-cached client; ``http_get`` is injectable for offline tests."""

    def __init__(self, cache_dir: str | Path, http_get=None, sleep=time.sleep):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.http_get = http_get or _default_http_get
        self.sleep = sleep
        self.cache_hits = 0
        self.network_calls = 0

    def _cached_fetch(self, url: str) -> str:
        key = hashlib.sha256(url.encode("utf-8")).hexdigest()
        cache_file = self.cache_dir / f"{key}.json"
        if cache_file.exists():
            self.cache_hits += 1
            return cache_file.read_text(encoding="utf-8")
        last_error = None
        for attempt in range(MAX_TRIES):
            try:
                self.network_calls += 1
                body = self.http_get(url)
                cache_file.write_text(body, encoding="utf-8")
                return body
            except Exception as exc:  # noqa: BLE001 - any transport failure retries
                last_error = exc
                if attempt < MAX_TRIES - 1:
                    self.sleep(BACKOFF_BASE * BACKOFF_FACTOR**attempt)
        raise BaselineError(f"request failed after {MAX_TRIES} tries: {last_error}")

    def _query_url(self, filters: list[str], group_by: str | None = None) -> str:
        params = {"filter": ",".join(filters)}
        if group_by:
            params["group_by"] = group_by
        params["per-page"] = "1"
        return OPENALEX_WORKS_URL + "?" + urllib.parse.urlencode(params)

    def fetch_counts(
        self,
        query: str,
        granularity: str,
        start: date,
        end: date,
    ) -> CountSeries:
        """Count series for a keyword search or ``concept:<id>`` query.

        Yearly granularity uses one publication_year group-by; weekly
        granularity iterates 7-day publication-date windows over [start, end).
        """
        if start >= end:
            raise BaselineError("fetch_counts: invalid date range")
        if granularity not in ("year", "week"):
            raise BaselineError(f"fetch_counts: unknown granularity {granularity!r}")
        if query.startswith("concept:"):
            base_filter = f"concepts.id:{query[len('concept:'):]}"
        else:
            base_filter = f"title_and_abstract.search:{query}"
        points: list[tuple[date, float]] = []
        if granularity == "year":
            url = self._query_url(
                [
                    base_filter,
                    f"from_publication_date:{start.isoformat()}",
                    f"to_publication_date:{(end - timedelta(days=1)).isoformat()}",
                ],
                group_by="publication_year",
            )
            data = self._parse(url)
            by_year = {
                int(g["key"]): float(g["count"]) for g in data.get("group_by", [])
            }
            for year in range(start.year, end.year + (0 if end == date(end.year, 1, 1) else 1)):
                points.append((date(year, 1, 1), by_year.get(year, 0.0)))
        else:
            cursor = start
            while cursor < end:
                window_end = min(cursor + timedelta(days=7), end)
                url = self._query_url(
                    [
                        base_filter,
                        f"from_publication_date:{cursor.isoformat()}",
                        f"to_publication_date:{(window_end - timedelta(days=1)).isoformat()}",
                    ]
                )
                data = self._parse(url)
                points.append((cursor, float(data.get("meta", {}).get("count", 0))))
                cursor = window_end
        return CountSeries(key=query, granularity=granularity, points=points)

    def _parse(self, url: str) -> dict:
        body = self._cached_fetch(url)
        try:
            return json.loads(body)
        except json.JSONDecodeError as exc:
            raise BaselineError(f"malformed response: {exc}") from exc


def normalize_series(series: CountSeries, window: int = 1) -> CountSeries:
    """Centered moving-average smoothing (edges shrink the window) followed by
    max-normalization to [0, 1].  All-zero series come back unchanged."""
    if window < 1:
        raise BaselineError("normalize_series: window must be >= 1")
    values = [v for _, v in series.points]
    if window > len(values):
        raise BaselineError("normalize_series: window longer than series")
    half = (window - 1) // 2
    half_up = window - 1 - half
    smoothed = []
    for i in range(len(values)):
        lo = max(0, i - half)
        hi = min(len(values), i + half_up + 1)
        smoothed.append(sum(values[lo:hi]) / (hi - lo))
    peak = max(smoothed, default=0.0)
    if peak == 0.0:
        normalized = smoothed
    else:
        normalized = [v / peak for v in smoothed]
    return CountSeries(
        key=series.key,
        granularity=series.granularity,
        points=[(d, v) for (d, _), v in zip(series.points, normalized)],
    )


def series_to_csv(raw: CountSeries, normalized: CountSeries) -> str:
    """Export CSV ``period,count,normalized``."""
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["period", "count", "normalized"])
    for (d, c), (_, nv) in zip(raw.points, normalized.points):
        writer.writerow([d.isoformat(), f"{c:g}", f"{nv:.6g}"])
    return buf.getvalue()
