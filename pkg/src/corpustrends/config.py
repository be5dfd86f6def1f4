"""Run configuration: a JSON file of per-stage settings plus CLI overrides.

Validation reports every violation at once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .trends import DEFAULT_KERNEL
from .volcano import DEFAULT_FC_MIN, DEFAULT_MIN_OCC, DEFAULT_P_MAX, DEFAULT_PSEUDOCOUNT


class ConfigError(Exception):
    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass
class RunConfig:
    manifest: Path | None = None
    base_dir: Path = Path(".")
    confidence_floor: float = 0.0
    min_len: int = 1
    max_len: int = 6
    entity_cap: int = 100
    pretagged_dir: Path | None = None
    reference: Path | None = None
    p_max: float = DEFAULT_P_MAX
    fc_min: float = DEFAULT_FC_MIN
    min_occ: int = DEFAULT_MIN_OCC
    pseudocount: float = DEFAULT_PSEUDOCOUNT
    targets: Path | None = None
    bucket_start: date = date(2017, 1, 1)
    bucket_end: date = date(2021, 10, 1)
    kernel: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_KERNEL))
    top_k: int = 5
    embeddings: Path | None = None
    entity_imports: list[Path] = field(default_factory=list)
    projection_imports: list[Path] = field(default_factory=list)
    subsample_k: int = 100
    seed: int = 0
    baseline_queries: list[str] = field(default_factory=list)
    baseline_granularity: str = "year"
    baseline_window: int = 1
    baseline_cache: Path = Path("openalex-cache")
    baseline_live: bool = False
    workers: int = 1
    out_dir: Path = Path("out")

    def validate(self, require: tuple[str, ...] = ()) -> None:
        """Collect every violation; ``require`` lists stages whose inputs must
        exist ("corpus", "volcano", "trends", "compare")."""
        problems: list[str] = []
        if "corpus" in require:
            if self.manifest is None:
                problems.append("corpus.manifest is required")
            elif not Path(self.manifest).exists():
                problems.append(f"corpus.manifest not found: {self.manifest}")
        if "volcano" in require:
            if self.reference is None:
                problems.append("volcano.reference is required")
            elif not Path(self.reference).exists():
                problems.append(f"volcano.reference not found: {self.reference}")
        if "trends" in require:
            if self.targets is None:
                problems.append("trends.targets is required")
            elif not Path(self.targets).exists():
                problems.append(f"trends.targets not found: {self.targets}")
        if "compare" in require:
            if self.embeddings is None:
                problems.append("compare.embeddings is required")
            elif not Path(self.embeddings).exists():
                problems.append(f"compare.embeddings not found: {self.embeddings}")
        for p in self.entity_imports + self.projection_imports:
            if not Path(p).exists():
                problems.append(f"import file not found: {p}")
        if not 0.0 <= self.confidence_floor <= 1.0:
            problems.append("corpus.confidence_floor must be in [0, 1]")
        if self.min_len < 1 or self.max_len < self.min_len:
            problems.append("chunker lengths must satisfy 1 <= min_len <= max_len")
        if self.entity_cap < 1:
            problems.append("chunker.entity_cap must be >= 1")
        if not 0.0 <= self.p_max <= 1.0:
            problems.append("volcano.p_max must be in [0, 1]")
        if self.min_occ < 1:
            problems.append("volcano.min_occ must be >= 1")
        if self.pseudocount <= 0:
            problems.append("volcano.pseudocount must be > 0")
        if self.bucket_start >= self.bucket_end:
            problems.append("trends bucket range is empty")
        if self.top_k < 1:
            problems.append("trends.top_k must be >= 1")
        if any(v < 0 for v in self.kernel.values()):
            problems.append("kernel scores must be >= 0")
        if self.subsample_k < 1:
            problems.append("compare.subsample_k must be >= 1")
        if self.workers < 1:
            problems.append("workers must be >= 1")
        if self.baseline_granularity not in ("year", "week"):
            problems.append("baseline.granularity must be 'year' or 'week'")
        if self.baseline_window < 1:
            problems.append("baseline.window must be >= 1")
        if problems:
            raise ConfigError(problems)


def _path(base: Path, value) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base / p


def load_config(path: str | Path) -> RunConfig:
    """Read the JSON config file; relative paths resolve against its directory."""
    path = Path(path)
    if not path.exists():
        raise ConfigError([f"config file not found: {path}"])
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"])
    base = path.parent
    cfg = RunConfig()
    corpus = data.get("corpus", {})
    if "manifest" in corpus:
        cfg.manifest = _path(base, corpus["manifest"])
    cfg.base_dir = _path(base, corpus.get("base_dir", "."))
    cfg.confidence_floor = float(corpus.get("confidence_floor", cfg.confidence_floor))
    chunker = data.get("chunker", {})
    cfg.min_len = int(chunker.get("min_len", cfg.min_len))
    cfg.max_len = int(chunker.get("max_len", cfg.max_len))
    cfg.entity_cap = int(chunker.get("entity_cap", cfg.entity_cap))
    if "pretagged_dir" in chunker:
        cfg.pretagged_dir = _path(base, chunker["pretagged_dir"])
    volcano = data.get("volcano", {})
    if "reference" in volcano:
        cfg.reference = _path(base, volcano["reference"])
    cfg.p_max = float(volcano.get("p_max", cfg.p_max))
    cfg.fc_min = float(volcano.get("fc_min", cfg.fc_min))
    cfg.min_occ = int(volcano.get("min_occ", cfg.min_occ))
    cfg.pseudocount = float(volcano.get("pseudocount", cfg.pseudocount))
    trends = data.get("trends", {})
    if "targets" in trends:
        cfg.targets = _path(base, trends["targets"])
    if "start" in trends:
        cfg.bucket_start = date.fromisoformat(trends["start"])
    if "end" in trends:
        cfg.bucket_end = date.fromisoformat(trends["end"])
    if "kernel" in trends:
        cfg.kernel = {int(k): float(v) for k, v in trends["kernel"].items()}
    cfg.top_k = int(trends.get("top_k", cfg.top_k))
    compare = data.get("compare", {})
    if "embeddings" in compare:
        cfg.embeddings = _path(base, compare["embeddings"])
    cfg.entity_imports = [_path(base, p) for p in compare.get("entities", [])]
    cfg.projection_imports = [_path(base, p) for p in compare.get("projections", [])]
    cfg.subsample_k = int(compare.get("subsample_k", cfg.subsample_k))
    cfg.seed = int(compare.get("seed", cfg.seed))
    baseline = data.get("baseline", {})
    cfg.baseline_queries = list(baseline.get("queries", []))
    cfg.baseline_granularity = baseline.get("granularity", cfg.baseline_granularity)
    cfg.baseline_window = int(baseline.get("window", cfg.baseline_window))
    if "cache_dir" in baseline:
        cfg.baseline_cache = _path(base, baseline["cache_dir"])
    cfg.baseline_live = bool(baseline.get("live", cfg.baseline_live))
    cfg.workers = int(data.get("workers", cfg.workers))
    if "out_dir" in data:
        cfg.out_dir = _path(base, data["out_dir"])
    return cfg
