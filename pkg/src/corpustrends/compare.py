"""Embedding-based comparison of entity sets.

Loads word-vector tables, averages token vectors for multi-word terms,
builds mean-cosine similarity matrices between extractors, clusters with
single linkage, computes a centroid-dispersion clustering coefficient and a
deterministic 2D linear projection.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chunker import normalize_term

UNDEFINED = float("nan")


class CompareError(Exception):
    pass


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]
    oov_log: list[str] = field(default_factory=list)


@dataclass
class EntitySet:
    doc_id: str
    extractor_label: str
    entities: list[str]


@dataclass
class SimilarityMatrix:
    labels: list[str]
    values: np.ndarray


@dataclass
class LinkageTree:
    """Merge list in scipy-style ids: leaves are 0..L-1, merge m creates id L+m."""

    leaf_labels: list[str]
    merges: list[tuple[int, int, float]]

    def to_newick(self) -> str:
        nodes: dict[int, str] = {i: lbl for i, lbl in enumerate(self.leaf_labels)}
        heights: dict[int, float] = {i: 0.0 for i in range(len(self.leaf_labels))}
        nid = len(self.leaf_labels)
        for a, b, h in self.merges:
            la = h - heights[a]
            lb = h - heights[b]
            nodes[nid] = f"({nodes[a]}:{la:.6g},{nodes[b]}:{lb:.6g})"
            heights[nid] = h
            nid += 1
        return nodes[nid - 1] + ";"


@dataclass
class Projection2D:
    points: dict[str, tuple[float, float]]
    method: str


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Parse text word-vector format ``word v1 ... vd`` with an optional
    ``count dim`` header line."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    vectors: dict[str, np.ndarray] = {}
    dim = None
    start = 0
    if lines:
        head = lines[0].split()
        if len(head) == 2:
            try:
                int(head[0]), int(head[1])
                start = 1
            except ValueError:
                pass
    bad: list[str] = []
    for lineno, line in enumerate(lines[start:], start + 1):
        if not line.strip():
            continue
        parts = line.split()
        word, comps = parts[0], parts[1:]
        try:
            vec = np.array([float(c) for c in comps], dtype=float)
        except ValueError:
            bad.append(f"line {lineno}: non-numeric component")
            continue
        if not np.all(np.isfinite(vec)):
            bad.append(f"line {lineno}: non-finite component")
            continue
        if dim is None:
            dim = len(vec)
        if len(vec) != dim:
            bad.append(f"line {lineno}: expected {dim} components, got {len(vec)}")
            continue
        vectors[word] = vec
    if not vectors:
        raise CompareError("no valid vectors loaded" + (f" ({'; '.join(bad)})" if bad else ""))
    if bad:
        raise CompareError("embedding file errors: " + "; ".join(bad))
    return EmbeddingTable(dim=dim, vectors=vectors)


def embed_term(term: str, table: EmbeddingTable) -> np.ndarray | None:
    """Mean of component-token vectors; None (and logged) when fully OOV."""
    found = [table.vectors[t] for t in term.split() if t in table.vectors]
    if not found:
        table.oov_log.append(term)
        return None
    return np.mean(found, axis=0)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) != len(b):
        raise CompareError("cosine: dimension mismatch")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise CompareError("cosine: zero vector")
    return max(-1.0, min(1.0, float(np.dot(a, b)) / (na * nb)))


def mean_pairwise_similarity(a: EntitySet, b: EntitySet, table: EmbeddingTable) -> float:
    """Mean cosine over the full cross product of embeddable terms; NaN when
    either side is fully OOV."""
    va = [v for v in (embed_term(t, table) for t in a.entities) if v is not None]
    vb = [v for v in (embed_term(t, table) for t in b.entities) if v is not None]
    if not va or not vb:
        return UNDEFINED
    return sum(cosine(x, y) for x in va for y in vb) / (len(va) * len(vb))


def extractor_similarity_matrix(
    entity_sets: list[EntitySet], table: EmbeddingTable
) -> SimilarityMatrix:
    """Mean over shared documents of mean pairwise similarity, per extractor pair."""
    labels = sorted({s.extractor_label for s in entity_sets})
    if len(labels) < 2:
        raise CompareError("need at least two extractor labels")
    by_doc: dict[str, dict[str, EntitySet]] = {}
    for s in entity_sets:
        by_doc.setdefault(s.doc_id, {})[s.extractor_label] = s
    n = len(labels)
    values = np.full((n, n), UNDEFINED)
    for i, li in enumerate(labels):
        values[i, i] = 1.0
        for j in range(i + 1, n):
            lj = labels[j]
            sims = []
            for doc_id in sorted(by_doc):
                pair = by_doc[doc_id]
                if li in pair and lj in pair:
                    s = mean_pairwise_similarity(pair[li], pair[lj], table)
                    if not math.isnan(s):
                        sims.append(s)
            if sims:
                values[i, j] = values[j, i] = sum(sims) / len(sims)
    return SimilarityMatrix(labels=labels, values=values)


def single_linkage(labels: list[str], distances: np.ndarray) -> LinkageTree:
    """Agglomerate by minimal inter-cluster minimum distance.

    Tie-break: smallest (label_a, label_b) pair, where a cluster's label is
    its lexicographically smallest leaf.
    """
    n = len(labels)
    if n < 2:
        raise CompareError("single_linkage: need at least 2 leaves")
    distances = np.asarray(distances, dtype=float)
    if distances.shape != (n, n) or not np.allclose(distances, distances.T):
        raise CompareError("single_linkage: distances must be a symmetric n x n matrix")
    # Active clusters: id -> (leaf set, representative label)
    members: dict[int, set[int]] = {i: {i} for i in range(n)}
    reps: dict[int, str] = {i: labels[i] for i in range(n)}
    merges: list[tuple[int, int, float]] = []
    next_id = n
    while len(members) > 1:
        best = None
        for a in members:
            for b in members:
                if a >= b:
                    continue
                d = min(distances[x, y] for x in members[a] for y in members[b])
                la, lb = sorted((reps[a], reps[b]))
                key = (d, la, lb)
                if best is None or key < best[0]:
                    best = (key, a, b)
        (d, _, _), a, b = best
        a, b = sorted((a, b))
        merges.append((a, b, float(d)))
        members[next_id] = members.pop(a) | members.pop(b)
        reps[next_id] = min(reps[a], reps[b])
        next_id += 1
    return LinkageTree(leaf_labels=list(labels), merges=merges)


def clustering_coefficient(groups: dict[str, np.ndarray]) -> float:
    """Inter-group centroid dispersion over mean intra-group RMS dispersion."""
    if len(groups) < 2:
        raise CompareError("clustering_coefficient: need at least 2 groups")
    for label, pts in groups.items():
        if len(pts) < 2:
            raise CompareError(f"clustering_coefficient: group {label!r} has < 2 vectors")
    labels = sorted(groups)
    centroids = {g: np.mean(groups[g], axis=0) for g in labels}
    inter = [
        float(np.linalg.norm(centroids[a] - centroids[b]))
        for i, a in enumerate(labels)
        for b in labels[i + 1 :]
    ]
    numerator = sum(inter) / len(inter)
    intra = []
    for g in labels:
        diffs = groups[g] - centroids[g]
        intra.append(float(np.sqrt(np.mean(np.sum(diffs**2, axis=1)))))
    denominator = sum(intra) / len(intra)
    if numerator == 0.0:
        return 0.0
    if denominator == 0.0:
        return math.inf
    return numerator / denominator


def pca_2d(vectors: dict[str, np.ndarray]) -> Projection2D:
    """Project onto the top-2 principal axes; each axis is oriented so its
    largest-magnitude loading is positive.  Rank-deficient data zeroes the
    second axis with a warning."""
    import warnings

    terms = sorted(vectors)
    if len(terms) < 3:
        raise CompareError("pca_2d: need at least 3 vectors")
    X = np.array([vectors[t] for t in terms], dtype=float)
    if X.shape[1] < 2:
        raise CompareError("pca_2d: dim must be >= 2")
    X = X - X.mean(axis=0)
    _, s, vt = np.linalg.svd(X, full_matrices=False)
    axes = vt[:2].copy()
    tol = max(X.shape) * np.finfo(float).eps * (s[0] if len(s) else 0.0)
    if len(s) < 2 or s[1] <= tol:
        warnings.warn("pca_2d: data rank < 2; second axis zeroed")
        axes[1] = 0.0
    for k in range(2):
        if np.any(axes[k]):
            lead = axes[k][np.argmax(np.abs(axes[k]))]
            if lead < 0:
                axes[k] = -axes[k]
    coords = X @ axes.T
    return Projection2D(
        points={t: (float(coords[i, 0]), float(coords[i, 1])) for i, t in enumerate(terms)},
        method="linear",
    )


def import_entities(path: str | Path) -> list[EntitySet]:
    """Read entity sets: ``doc_id<TAB>extractor<TAB>entity1|entity2|...``.

    Entities pass through the chunker's term normalization.
    """
    sets: list[EntitySet] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise CompareError(f"entities line {lineno}: expected 3 fields")
        doc_id, extractor, ents = parts
        if not extractor:
            raise CompareError(f"entities line {lineno}: empty extractor label")
        entities = [normalize_term(e.split()) for e in ents.split("|") if e.strip()]
        sets.append(EntitySet(doc_id=doc_id, extractor_label=extractor, entities=entities))
    return sets


def export_entities(sets: list[EntitySet], path: str | Path) -> None:
    lines = [
        "\t".join((s.doc_id, s.extractor_label, "|".join(s.entities))) for s in sets
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def import_projection(path: str | Path) -> Projection2D:
    """Read a 2D projection: ``term<TAB>x<TAB>y`` per line."""
    points: dict[str, tuple[float, float]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise CompareError(f"projection line {lineno}: expected 3 fields")
        term, xs, ys = parts
        try:
            points[term] = (float(xs), float(ys))
        except ValueError:
            raise CompareError(f"projection line {lineno}: non-numeric coordinates")
    return Projection2D(points=points, method="imported")


def subsample(
    docs_by_listing: dict[str, list[str]], k: int = 100, seed: int = 0
) -> dict[str, list[str]]:
    """Uniform sample without replacement of k doc ids per listing; listings
    with fewer than k docs are taken whole."""
    if k < 1:
        raise CompareError("subsample: k must be >= 1")
    rng = random.Random(seed)
    out: dict[str, list[str]] = {}
    for listing in sorted(docs_by_listing):
        docs = sorted(docs_by_listing[listing])
        if len(docs) <= k:
            out[listing] = docs
        else:
            out[listing] = sorted(rng.sample(docs, k))
    return out
