"""Tokenization, coarse POS tagging and compound-noun extraction.

The tagger is a deterministic lexicon + suffix-rule tagger over a 5-tag
scheme (NOUN, PROPN, ADJ, VERB, OTHER); a pretagged-import path exists for
users with a full NLP tagger.  Compound nouns are maximal
(ADJ|NOUN|PROPN)* (NOUN|PROPN) runs within a sentence.
"""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

TAGS = ("NOUN", "PROPN", "ADJ", "VERB", "OTHER")
NOUN_TAGS = {"NOUN", "PROPN"}
CHUNK_TAGS = {"ADJ", "NOUN", "PROPN"}

DEFAULT_MIN_LEN = 1
DEFAULT_MAX_LEN = 6
DEFAULT_ENTITY_CAP = 100


class ChunkerError(Exception):
    pass


@dataclass
class Token:
    surface: str
    lower: str
    tag: str
    index: int
    sentence_id: int


@dataclass
class TermMention:
    term: str
    doc_id: str
    span: tuple[int, int]
    head_index: int


@dataclass
class TermLexicon:
    """Corpus-wide term counts: total occurrences and document frequency."""

    counts: Counter = field(default_factory=Counter)
    doc_freq: Counter = field(default_factory=Counter)

    def add_document(self, mentions: list[TermMention]) -> None:
        terms = [m.term for m in mentions]
        self.counts.update(terms)
        self.doc_freq.update(set(terms))

    def merge(self, other: "TermLexicon") -> None:
        self.counts.update(other.counts)
        self.doc_freq.update(other.doc_freq)


_WORD_RE = re.compile(r"\w+(?:[-'’]\w+)*", re.UNICODE)

ABBREVIATIONS = {
    "e.g", "i.e", "et al", "etc", "cf", "fig", "figs", "eq", "eqs", "sec",
    "vs", "dr", "mr", "mrs", "ms", "prof", "no", "vol", "pp", "resp",
}


def _is_sentence_break(text: str, pos: int) -> bool:
    """True when the terminator at text[pos] ends a sentence: it must be
    followed by whitespace and an uppercase letter, and not close a known
    abbreviation."""
    after = text[pos + 1 :]
    m = re.match(r"[\"')\]]*\s+[\"'(\[]*([A-Z])", after)
    if m is None:
        return False
    before = text[:pos]
    wm = re.search(r"[\w.]+$", before)
    if wm:
        word = wm.group(0).lower().rstrip(".")
        if word in ABBREVIATIONS or word.replace(".", "") in {a.replace(".", "").replace(" ", "") for a in ABBREVIATIONS}:
            return False
        # Single-letter initials like "J." do not end sentences.
        if len(word) == 1:
            return False
    return True


def tokenize(text: str) -> list[Token]:
    """Split on word boundaries; punctuation is not emitted as tokens.

    Sentences break at {. ! ?} followed by space and a capital letter,
    guarded by an abbreviation list.
    """
    breaks = sorted(
        m.start() for m in re.finditer(r"[.!?]", text) if _is_sentence_break(text, m.start())
    )
    tokens: list[Token] = []
    sid = 0
    bi = 0
    for idx, m in enumerate(_WORD_RE.finditer(text)):
        while bi < len(breaks) and breaks[bi] < m.start():
            sid += 1
            bi += 1
        surface = m.group(0)
        tokens.append(Token(surface=surface, lower=surface.lower(), tag="", index=idx, sentence_id=sid))
    # Renumber sentences densely from zero.
    remap: dict[int, int] = {}
    for tok in tokens:
        if tok.sentence_id not in remap:
            remap[tok.sentence_id] = len(remap)
        tok.sentence_id = remap[tok.sentence_id]
    return tokens


# Closed-class and high-frequency words with fixed coarse tags.
_LEXICON: dict[str, str] = {}
_LEXICON.update({w: "OTHER" for w in """
the a an this that these those some any each every no all both few many much
i you he she it we they me him her us them my your his its our their mine
and or but nor so yet for of in on at by with from to into onto over under
between among through during before after above below up down out off about
against within without across along around is are was were be been being am
as if than then when while where how why what which who whom whose not only
also very too more most less least there here now then once again further
can could may might must shall should will would do does did done have had
has having
""".split()})
_LEXICON.update({w: "VERB" for w in """
attend use make take give show provide present propose describe introduce
apply develop evaluate compare analyze train test run build create improve
achieve obtain perform demonstrate consider require allow enable learn
predict generate extract compute measure observe report find increase
decrease reduce follow contain include represent define explain work go come
see say get know think want need become remain keep let put mean seem help
leave call try ask feel move play believe turn start write read study
""".split()})
_LEXICON.update({w: "ADJ" for w in """
high low large small long short new old good bad big great deep wide narrow
fast slow early late recent previous current future main key major minor
important significant relevant specific general common rare simple complex
different similar same other such first second third last next novel strong
weak full empty open closed public private local global neural artificial
statistical computational digital technical scientific final initial
effective efficient robust scalable lazy quick brown black white red blue
green young free real true false possible available several various multiple
single double
""".split()})
_LEXICON.update({w: "NOUN" for w in """
school model language data dataset system method approach result paper work
network analysis algorithm term word noun sentence document text corpus
time year number example task performance information knowledge research
technology science security attention transformer memory learning machine
level value score table figure state problem question answer process
function feature structure domain field area group set type form part case
study student teacher person people man woman child day week month world
house dog cat fox river city country name thing way life hand eye
""".split()})

_ADJ_SUFFIXES = ("ous", "ful", "ive", "al", "ic", "able", "ible", "ary", "less", "ish")
_NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ance", "ence", "ism", "ist", "ing")


def _tag_word(lower: str, surface: str, sentence_initial: bool) -> str:
    if lower in _LEXICON:
        return _LEXICON[lower]
    if lower.endswith("s") and not lower.endswith("ss"):
        stem = lower[:-1]
        if _LEXICON.get(stem) == "VERB":
            return "VERB"
        if _LEXICON.get(stem) == "NOUN":
            return "NOUN"
    if lower.endswith("ly"):
        return "OTHER"
    for suf in _NOUN_SUFFIXES:
        if lower.endswith(suf) and len(lower) > len(suf) + 2:
            return "NOUN"
    if lower.endswith("ed") and len(lower) > 4:
        return "VERB"
    for suf in _ADJ_SUFFIXES:
        if lower.endswith(suf) and len(lower) > len(suf) + 2:
            return "ADJ"
    if surface[:1].isupper() and not sentence_initial:
        return "PROPN"
    return "NOUN"


def pos_tag(tokens: list[Token]) -> list[Token]:
    """Assign one coarse tag per token (deterministic, rule-based)."""
    prev_sid = None
    for tok in tokens:
        sentence_initial = tok.sentence_id != prev_sid
        tok.tag = _tag_word(tok.lower, tok.surface, sentence_initial)
        prev_sid = tok.sentence_id
    return tokens


def ingest_pretagged(path: str | Path) -> list[Token]:
    """Read pretagged TSV ``index<TAB>surface<TAB>tag<TAB>sentence_id``."""
    tokens: list[Token] = []
    expected = 0
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ChunkerError(f"line {lineno}: expected 4 fields")
        idx_s, surface, tag, sid_s = parts
        if tag not in TAGS:
            raise ChunkerError(f"line {lineno}: unknown tag {tag!r}")
        idx = int(idx_s)
        if idx != expected:
            raise ChunkerError(f"line {lineno}: index gap (expected {expected}, got {idx})")
        expected += 1
        tokens.append(Token(surface=surface, lower=surface.lower(), tag=tag, index=idx, sentence_id=int(sid_s)))
    return tokens


_PLURAL_EXCEPTIONS = {
    "analysis", "basis", "thesis", "hypothesis", "news", "series", "species",
    "bus", "gas", "corpus", "focus", "status", "consensus", "axis", "bias",
    "crisis", "lens", "canvas", "alias", "atlas", "virus", "campus", "census",
    "chaos", "cosmos", "ethos", "iris", "pelvis", "tennis", "physics",
    "mathematics", "statistics", "semantics", "linguistics", "robotics",
    "this", "its", "is", "as", "was", "has", "his", "us", "thus", "always",
    "perhaps", "class", "glass", "process", "access", "loss", "cross",
}


def _singularize(word: str) -> str:
    if word in _PLURAL_EXCEPTIONS or len(word) <= 3:
        return word
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith(("ses", "xes", "zes", "ches", "shes")):
        return word[:-2]
    if word.endswith("ss") or word.endswith("us") or word.endswith("is"):
        return word
    if word.endswith("s"):
        return word[:-1]
    return word


def normalize_term(surfaces: list[str]) -> str:
    """Lowercase, strip plural suffixes per word, join with single spaces."""
    if not surfaces:
        raise ChunkerError("normalize_term: empty surface run")
    return " ".join(_singularize(s.lower()) for s in surfaces)


def _matching_spans(tags: list[str], min_len: int, max_len: int) -> list[tuple[int, int]]:
    """All maximal [start, end) spans matching (ADJ|NOUN|PROPN)*(NOUN|PROPN)
    with length bounds, where maximal means not strictly contained in another
    matching span."""
    n = len(tags)
    spans: list[tuple[int, int]] = []
    i = 0
    while i < n:
        if tags[i] not in CHUNK_TAGS:
            i += 1
            continue
        j = i
        while j < n and tags[j] in CHUNK_TAGS:
            j += 1
        # Run [i, j); matching spans end at a noun token, length <= max_len.
        noun_positions = [k for k in range(i, j) if tags[k] in NOUN_TAGS]
        for pi, k in enumerate(noun_positions):
            start = max(i, k + 1 - max_len)
            # A span not pinned to length max_len can grow right to the next
            # noun while staying within bounds; it is then not maximal.
            if pi + 1 < len(noun_positions):
                nxt = noun_positions[pi + 1]
                if nxt + 1 - start <= max_len:
                    continue
            if k + 1 - start >= min_len:
                spans.append((start, k + 1))
        i = j
    return spans


def extract_compound_nouns(
    tokens: list[Token],
    doc_id: str = "",
    min_len: int = DEFAULT_MIN_LEN,
    max_len: int = DEFAULT_MAX_LEN,
) -> list[TermMention]:
    """Emit maximal within-sentence compound-noun runs as normalized mentions."""
    mentions: list[TermMention] = []
    by_sentence: dict[int, list[Token]] = defaultdict(list)
    for tok in tokens:
        by_sentence[tok.sentence_id].append(tok)
    for sid in sorted(by_sentence):
        sent = by_sentence[sid]
        tags = [t.tag for t in sent]
        for s, e in _matching_spans(tags, min_len, max_len):
            run = sent[s:e]
            mentions.append(
                TermMention(
                    term=normalize_term([t.surface for t in run]),
                    doc_id=doc_id,
                    span=(run[0].index, run[-1].index + 1),
                    head_index=run[-1].index,
                )
            )
    mentions.sort(key=lambda m: m.span)
    return mentions


def cap_entities(mentions: list[TermMention], limit: int = DEFAULT_ENTITY_CAP) -> list[TermMention]:
    """Keep all mentions of the ``limit`` most frequent distinct terms.

    Ties break by earliest first occurrence, then lexicographically.
    """
    if limit < 1:
        raise ChunkerError("cap_entities: limit must be >= 1")
    counts: Counter = Counter(m.term for m in mentions)
    first_pos: dict[str, int] = {}
    for m in mentions:
        first_pos.setdefault(m.term, m.span[0])
    ranked = sorted(counts, key=lambda t: (-counts[t], first_pos[t], t))
    kept = set(ranked[:limit])
    return [m for m in mentions if m.term in kept]
