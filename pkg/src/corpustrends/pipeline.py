"""Staged pipeline orchestration with deterministic run manifests.

Each stage reads plain-file artifacts from the previous one, writes its own,
and records {config hash, input checksums, output checksums} in
``run_manifest.json``.  Rerunning a stage with unchanged config and inputs is
a no-op (outputs are not rewritten).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from datetime import date
from pathlib import Path

import numpy as np

from . import __version__, chunker, compare, corpus, report, trends, volcano
from .config import RunConfig


class PipelineError(Exception):
    pass


class MissingArtifactError(PipelineError):
    """An upstream stage has not been run."""


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _config_hash(cfg: RunConfig) -> str:
    payload = json.dumps(
        dataclasses.asdict(cfg), default=str, sort_keys=True
    ).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


class RunManifest:
    def __init__(self, out_dir: Path):
        self.path = out_dir / "run_manifest.json"
        self.data = {}
        if self.path.exists():
            self.data = json.loads(self.path.read_text(encoding="utf-8"))

    def up_to_date(self, stage: str, config_hash: str, inputs: dict[str, str], out_dir: Path) -> bool:
        rec = self.data.get(stage)
        if not rec or rec.get("config") != config_hash or rec.get("inputs") != inputs:
            return False
        for rel, digest in rec.get("outputs", {}).items():
            p = out_dir / rel
            if not p.exists() or _sha256_file(p) != digest:
                return False
        return True

    def record(self, stage: str, config_hash: str, inputs: dict[str, str], outputs: dict[str, str]) -> None:
        self.data[stage] = {
            "config": config_hash,
            "inputs": inputs,
            "outputs": outputs,
            "version": __version__,
        }
        self.path.write_text(json.dumps(self.data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_outputs(out_dir: Path, files: dict[str, str | bytes]) -> dict[str, str]:
    digests = {}
    for rel, content in files.items():
        p = out_dir / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        data = content.encode("utf-8") if isinstance(content, str) else content
        p.write_bytes(data)
        digests[rel] = hashlib.sha256(data).hexdigest()
    return digests


def _require(out_dir: Path, rel: str, producer: str) -> Path:
    p = out_dir / rel
    if not p.exists():
        raise MissingArtifactError(
            f"missing artifact {rel}: requires {producer} output; run 'corpustrends {producer}' first"
        )
    return p


# ---------------------------------------------------------------- ingest


def _clean_one(entry_and_cfg):
    entry, cfg = entry_and_cfg
    raw = corpus.resolve_locator(entry.locator, cfg.base_dir)
    record, rep = corpus.build_document(
        entry,
        raw,
        tokenizer_count=lambda text: len(chunker.tokenize(text)),
        confidence_floor=cfg.confidence_floor,
    )
    return entry, record, rep


def cmd_ingest(cfg: RunConfig) -> str:
    cfg.validate(require=("corpus",))
    out_dir = cfg.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    chash = _config_hash(cfg)
    manifest = corpus.load_manifest(cfg.manifest)
    inputs = {"manifest": _sha256_file(Path(cfg.manifest))}
    run = RunManifest(out_dir)
    if run.up_to_date("ingest", chash, inputs, out_dir):
        return "skipped"
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(_clean_one, ((e, cfg) for e in manifest.entries)))
    files: dict[str, str] = {}
    index_lines = []
    reports = {}
    for entry, record, rep in results:
        reports[entry.id] = dataclasses.asdict(rep)
        if record is None:
            continue
        rel = f"corpus/{entry.id}.txt"
        files[rel] = record.clean_text
        index_lines.append(
            "\t".join((entry.id, entry.date.isoformat(), entry.category, rel, str(record.token_count)))
        )
    files["corpus/index.tsv"] = "\n".join(index_lines) + "\n" if index_lines else ""
    files["cleaning_report.json"] = json.dumps(
        {"documents": reports, "manifest_errors": manifest.errors}, indent=2, sort_keys=True
    ) + "\n"
    outputs = _write_outputs(out_dir, files)
    run.record("ingest", chash, inputs, outputs)
    return "ok"


# ---------------------------------------------------------------- extract


def _load_index(out_dir: Path) -> list[tuple[str, date, str, str, int]]:
    index_path = _require(out_dir, "corpus/index.tsv", "ingest")
    rows = []
    for line in index_path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc_id, date_s, category, rel, tokens_s = line.split("\t")
        rows.append((doc_id, date.fromisoformat(date_s), category, rel, int(tokens_s)))
    return rows


def _extract_one(args):
    doc_id, text, cfg = args
    if cfg.pretagged_dir is not None:
        pretagged = Path(cfg.pretagged_dir) / f"{doc_id}.tsv"
        if pretagged.exists():
            tokens = chunker.ingest_pretagged(pretagged)
        else:
            tokens = chunker.pos_tag(chunker.tokenize(text))
    else:
        tokens = chunker.pos_tag(chunker.tokenize(text))
    mentions = chunker.extract_compound_nouns(
        tokens, doc_id=doc_id, min_len=cfg.min_len, max_len=cfg.max_len
    )
    return doc_id, chunker.cap_entities(mentions, cfg.entity_cap)


def cmd_extract(cfg: RunConfig) -> str:
    out_dir = cfg.out_dir
    rows = _load_index(out_dir)
    chash = _config_hash(cfg)
    inputs = {"corpus/index.tsv": _sha256_file(out_dir / "corpus/index.tsv")}
    for doc_id, _, _, rel, _ in rows:
        inputs[rel] = _sha256_file(out_dir / rel)
    run = RunManifest(out_dir)
    if run.up_to_date("extract", chash, inputs, out_dir):
        return "skipped"
    tasks = [
        (doc_id, (out_dir / rel).read_text(encoding="utf-8"), cfg)
        for doc_id, _, _, rel, _ in rows
    ]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        results = list(pool.map(_extract_one, tasks))
    lexicon = chunker.TermLexicon()
    mention_lines = []
    for doc_id, mentions in results:
        lexicon.add_document(mentions)
        for m in mentions:
            mention_lines.append("\t".join((doc_id, m.term, str(m.span[0]), str(m.span[1]))))
    lex_lines = [
        f"{term}\t{lexicon.counts[term]}\t{lexicon.doc_freq[term]}"
        for term in sorted(lexicon.counts)
    ]
    outputs = _write_outputs(
        out_dir,
        {
            "mentions.tsv": "\n".join(mention_lines) + "\n" if mention_lines else "",
            "lexicon.tsv": "\n".join(lex_lines) + "\n" if lex_lines else "",
        },
    )
    run.record("extract", chash, inputs, outputs)
    return "ok"


def _load_mentions(out_dir: Path) -> dict[str, list[chunker.TermMention]]:
    path = _require(out_dir, "mentions.tsv", "extract")
    by_doc: dict[str, list[chunker.TermMention]] = defaultdict(list)
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc_id, term, start_s, end_s = line.split("\t")
        start, end = int(start_s), int(end_s)
        by_doc[doc_id].append(
            chunker.TermMention(term=term, doc_id=doc_id, span=(start, end), head_index=end - 1)
        )
    return by_doc


# ---------------------------------------------------------------- volcano


def cmd_volcano(cfg: RunConfig) -> str:
    cfg.validate(require=("volcano",))
    out_dir = cfg.out_dir
    rows = _load_index(out_dir)
    by_doc = _load_mentions(out_dir)
    chash = _config_hash(cfg)
    inputs = {
        "corpus/index.tsv": _sha256_file(out_dir / "corpus/index.tsv"),
        "mentions.tsv": _sha256_file(out_dir / "mentions.tsv"),
        "reference": _sha256_file(Path(cfg.reference)),
    }
    run = RunManifest(out_dir)
    if run.up_to_date("volcano", chash, inputs, out_dir):
        return "skipped"
    partition_mentions: dict[str, list[str]] = defaultdict(list)
    partition_totals: Counter = Counter()
    for doc_id, _, category, _, token_count in rows:
        partition_totals[category] += token_count
        partition_mentions[category].extend(m.term for m in by_doc.get(doc_id, []))
    table = volcano.build_frequency_table(dict(partition_mentions), dict(partition_totals))
    ref = volcano.load_reference_table(cfg.reference)
    records = volcano.volcano_records(table, ref, cfg.pseudocount)
    specific = volcano.volcano_filter(records, cfg.p_max, cfg.fc_min, cfg.min_occ)
    outputs = _write_outputs(
        out_dir,
        {
            "volcano.csv": report.render_volcano_csv(records, set(specific)),
            "specific_terms.txt": "\n".join(specific) + "\n" if specific else "",
            "volcano.svg": report.render_volcano_svg(
                records, set(specific), cfg.p_max, cfg.fc_min
            ),
        },
    )
    run.record("volcano", chash, inputs, outputs)
    return "ok"


# ---------------------------------------------------------------- trends


def _slug(term: str) -> str:
    return "".join(c if c.isalnum() else "-" for c in term)


class _Doc:
    __slots__ = ("id", "date")

    def __init__(self, doc_id: str, doc_date: date):
        self.id = doc_id
        self.date = doc_date


def cmd_trends(cfg: RunConfig) -> str:
    cfg.validate(require=("trends",))
    out_dir = cfg.out_dir
    rows = _load_index(out_dir)
    by_doc = _load_mentions(out_dir)
    specific_path = _require(out_dir, "specific_terms.txt", "volcano")
    chash = _config_hash(cfg)
    inputs = {
        "corpus/index.tsv": _sha256_file(out_dir / "corpus/index.tsv"),
        "mentions.tsv": _sha256_file(out_dir / "mentions.tsv"),
        "specific_terms.txt": _sha256_file(specific_path),
        "targets": _sha256_file(Path(cfg.targets)),
    }
    run = RunManifest(out_dir)
    if run.up_to_date("trends", chash, inputs, out_dir):
        return "skipped"
    specific = {
        t for t in specific_path.read_text(encoding="utf-8").splitlines() if t.strip()
    }
    targets = trends.load_targets(cfg.targets)
    docs = [_Doc(doc_id, d) for doc_id, d, _, _, _ in rows]
    buckets = trends.bucket_by_semester(docs, cfg.bucket_start, cfg.bucket_end)
    kernel = trends.KernelSpec(dict(cfg.kernel))
    table = trends.accumulate(buckets, dict(by_doc), targets, specific, kernel)
    files: dict[str, str] = {}
    csv_parts = ["bucket,target,term,score\n"]
    for target in targets:
        md, csv_text = report.render_trend_table(table, target, buckets, cfg.top_k)
        files[f"trends_{_slug(target.canonical)}.md"] = md
        csv_parts.append(csv_text.split("\n", 1)[1])
    files["associations.csv"] = "".join(csv_parts)
    outputs = _write_outputs(out_dir, files)
    run.record("trends", chash, inputs, outputs)
    return "ok"


# ---------------------------------------------------------------- compare


def cmd_compare(cfg: RunConfig) -> str:
    cfg.validate(require=("compare",))
    out_dir = cfg.out_dir
    rows = _load_index(out_dir)
    by_doc = _load_mentions(out_dir)
    chash = _config_hash(cfg)
    inputs = {
        "corpus/index.tsv": _sha256_file(out_dir / "corpus/index.tsv"),
        "mentions.tsv": _sha256_file(out_dir / "mentions.tsv"),
        "embeddings": _sha256_file(Path(cfg.embeddings)),
    }
    for p in cfg.entity_imports + cfg.projection_imports:
        inputs[str(p)] = _sha256_file(Path(p))
    run = RunManifest(out_dir)
    if run.up_to_date("compare", chash, inputs, out_dir):
        return "skipped"
    table = compare.load_embeddings(cfg.embeddings)
    files: dict[str, str] = {}

    # Entity sets: the pipeline's own extraction plus any imported extractors.
    sets = [
        compare.EntitySet(
            doc_id=doc_id,
            extractor_label="corpustrends",
            entities=[m.term for m in by_doc.get(doc_id, [])],
        )
        for doc_id, *_ in rows
    ]
    for p in cfg.entity_imports:
        sets.extend(compare.import_entities(p))
    extractor_labels = {s.extractor_label for s in sets}
    if len(extractor_labels) >= 2:
        sim = compare.extractor_similarity_matrix(sets, table)
        lines = ["extractor," + ",".join(sim.labels)]
        for i, label in enumerate(sim.labels):
            lines.append(label + "," + ",".join(f"{v:.6g}" for v in sim.values[i]))
        files["similarity.csv"] = "\n".join(lines) + "\n"
        tree = compare.single_linkage(sim.labels, 1.0 - sim.values)
        files["linkage.newick"] = tree.to_newick() + "\n"
        files["dendrogram.svg"] = report.render_dendrogram_svg(tree)

    # Per-listing term vectors: subsampled docs, embedded specific terms.
    docs_by_listing: dict[str, list[str]] = defaultdict(list)
    for doc_id, _, category, _, _ in rows:
        docs_by_listing[category].append(doc_id)
    sampled = compare.subsample(dict(docs_by_listing), cfg.subsample_k, cfg.seed)
    groups: dict[str, list] = {}
    term_listing: dict[str, str] = {}
    vectors: dict[str, np.ndarray] = {}
    for listing in sorted(sampled):
        vecs = []
        for doc_id in sampled[listing]:
            for m in by_doc.get(doc_id, []):
                v = compare.embed_term(m.term, table)
                if v is not None:
                    vecs.append(v)
                    vectors.setdefault(m.term, v)
                    term_listing.setdefault(m.term, listing)
        if len(vecs) >= 2:
            groups[listing] = np.array(vecs)
    if len(groups) >= 2:
        coeff = compare.clustering_coefficient(groups)
        files["clustering_coefficients.csv"] = (
            "embedding,coefficient\n" + f"{Path(cfg.embeddings).name},{coeff:.6g}\n"
        )
    if len(vectors) >= 3 and table.dim >= 2:
        proj = compare.pca_2d(vectors)
        files["projection_linear.tsv"] = (
            "\n".join(
                f"{t}\t{x:.6g}\t{y:.6g}" for t, (x, y) in sorted(proj.points.items())
            )
            + "\n"
        )
        files["scatter_linear.svg"] = report.render_scatter_svg(proj, term_listing)
    for p in cfg.projection_imports:
        imported = compare.import_projection(p)
        files[f"scatter_{_slug(Path(p).stem)}.svg"] = report.render_scatter_svg(
            imported, term_listing
        )
    files["oov_terms.txt"] = "\n".join(sorted(set(table.oov_log))) + "\n" if table.oov_log else ""
    outputs = _write_outputs(out_dir, files)
    run.record("compare", chash, inputs, outputs)
    return "ok"


# ---------------------------------------------------------------- baseline


def cmd_baseline(cfg: RunConfig, http_get=None) -> str:
    from . import baseline as bl

    cfg.validate()
    if not cfg.baseline_queries:
        raise PipelineError("baseline: no queries configured")
    out_dir = cfg.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    chash = _config_hash(cfg)
    run = RunManifest(out_dir)
    if http_get is None and not cfg.baseline_live:
        http_get = _offline_http_get
    client = bl.OpenAlexClient(cfg.baseline_cache, http_get=http_get)
    files = {}
    for query in cfg.baseline_queries:
        series = client.fetch_counts(
            query, cfg.baseline_granularity, cfg.bucket_start, cfg.bucket_end
        )
        normalized = bl.normalize_series(series, cfg.baseline_window)
        files[f"baseline_{_slug(query)}.csv"] = bl.series_to_csv(series, normalized)
    outputs = _write_outputs(out_dir, files)
    run.record("baseline", chash, {}, outputs)
    return "ok"


def _offline_http_get(url: str) -> str:
    raise PipelineError(
        "baseline is in offline mode (cache miss); pass baseline.live=true to allow network access"
    )


# ---------------------------------------------------------------- all


def cmd_all(cfg: RunConfig) -> dict[str, str]:
    """Full pipeline ingest -> extract -> volcano -> trends (+compare when
    embeddings are configured)."""
    statuses = {
        "ingest": cmd_ingest(cfg),
        "extract": cmd_extract(cfg),
        "volcano": cmd_volcano(cfg),
        "trends": cmd_trends(cfg),
    }
    if cfg.embeddings is not None:
        statuses["compare"] = cmd_compare(cfg)
    return statuses
