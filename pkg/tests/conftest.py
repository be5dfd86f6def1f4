import json
import random
from datetime import date, timedelta
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# Vocabulary for the synthetic fixture corpus: ordinary English filler plus
# planted technical terms that should become "specific".
FILLER_SENTENCES = [
    "The results of the study were reported in the final section of the paper.",
    "We describe the method and the data used in this work.",
    "The authors present a simple approach to the problem.",
    "Each experiment was repeated several times to reduce noise.",
    "The table shows the performance of the system on the test set.",
    "This section explains the main idea behind the analysis.",
    "The model was trained on a large collection of documents.",
    "Further work is needed to understand the limitations of the approach.",
    "The evaluation used standard metrics from the literature.",
    "A detailed discussion of related work appears in the appendix.",
]

TECH_SENTENCES = [
    "Transformer is the technology that allows the development of the large language model and is the successor of long short term memory model.",
    "The attention mechanism improved the neural machine translation system.",
    "A deep neural network with an attention layer was used for the classification task.",
    "The large language model was fine tuned on the security corpus.",
    "Researchers used the transformer architecture for intrusion detection.",
    "The long short term memory model processed the network traffic sequence.",
    "Malware detection relies on the byte pair encoding of binary files.",
    "The security protocol uses an encryption key exchange scheme.",
]

CATEGORIES = ["cs.CR", "cs.NI", "cs.CL", "cs.AI"]


def make_fixture_corpus(root: Path, n_docs: int = 200, seed: int = 42) -> dict:
    """Write a deterministic synthetic corpus: manifest, reference table,
    targets and a small embedding file.  Returns the path map."""
    rng = random.Random(seed)
    root.mkdir(parents=True, exist_ok=True)
    start = date(2017, 1, 1)
    span_days = (date(2021, 9, 30) - start).days
    lines = []
    for i in range(n_docs):
        doc_id = f"doc{i:04d}"
        doc_date = start + timedelta(days=rng.randrange(span_days))
        category = rng.choice(CATEGORIES)
        n_sent = rng.randrange(4, 9)
        sents = [rng.choice(FILLER_SENTENCES) for _ in range(n_sent)]
        # Most documents carry technical content; that is the planted signal.
        for _ in range(rng.randrange(1, 4)):
            sents.insert(rng.randrange(len(sents) + 1), rng.choice(TECH_SENTENCES))
        text = " ".join(sents)
        lines.append(f"{doc_id}\t{doc_date.isoformat()}\t{category}\tinline:{text}")
    manifest = root / "manifest.tsv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")

    # Reference table: generic words frequent, technical terms absent.
    ref_lines = ["TOTAL 1000000"]
    for word, count in [
        ("the", 60000), ("of", 30000), ("result", 900), ("study", 800),
        ("paper", 700), ("approach", 400), ("section", 500), ("table", 600),
        ("model", 300), ("system", 450), ("problem", 350), ("work", 1200),
        ("final section", 40), ("test set", 30), ("main idea", 25),
        ("large collection", 20), ("related work", 35), ("appendix", 50),
    ]:
        ref_lines.append(f"{word}\t{count}")
    reference = root / "reference.tsv"
    reference.write_text("\n".join(ref_lines) + "\n", encoding="utf-8")

    targets = root / "targets.tsv"
    targets.write_text(
        "transformer\ttransformer architecture\n"
        "large language model\n"
        "attention\tattention mechanism|attention layer\n"
        "fine-tuning\n",
        encoding="utf-8",
    )

    vocab = [
        "transformer", "large", "language", "model", "attention", "neural",
        "network", "security", "encryption", "malware", "detection", "memory",
        "machine", "translation", "system", "corpus", "architecture",
    ]
    emb_rng = random.Random(7)
    emb_lines = [f"{len(vocab)} 8"]
    for w in vocab:
        emb_lines.append(w + " " + " ".join(f"{emb_rng.uniform(-1, 1):.4f}" for _ in range(8)))
    embeddings = root / "embeddings.txt"
    embeddings.write_text("\n".join(emb_lines) + "\n", encoding="utf-8")

    config = {
        "corpus": {"manifest": "manifest.tsv"},
        "volcano": {"reference": "reference.tsv"},
        "trends": {"targets": "targets.tsv", "start": "2017-01-01", "end": "2021-10-01"},
        "compare": {"embeddings": "embeddings.txt", "subsample_k": 100, "seed": 0},
        "workers": 1,
        "out_dir": "out",
    }
    config_path = root / "config.json"
    config_path.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    return {
        "manifest": manifest,
        "reference": reference,
        "targets": targets,
        "embeddings": embeddings,
        "config": config_path,
    }


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixture_corpus")
    return make_fixture_corpus(root)
