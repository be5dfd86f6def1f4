"""Character-trigram language identification.

Rank-weighted trigram profiles for a small set of languages, enough to keep or
drop documents in an English-only pipeline.  Texts shorter than 20 characters
are reported as undetermined.
"""

from __future__ import annotations

import re
from collections import Counter

PROFILE_SIZE = 400
MIN_TEXT_LEN = 20

_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)

# Short seed passages of ordinary prose, one per supported language.
_SEED_TEXTS = {
    "en": """
        The report describes how the system was built and why it matters for
        people who work with large collections of documents. Over the years
        the team has repeatedly found that the most useful results come from
        simple methods applied carefully. When the data are clean and the
        question is clear, even a quick analysis can show which of the many
        possible answers is likely to be right. The dog that guards the old
        house near the river is lazy in the summer and quick in the winter,
        and everyone in the village knows this story. We should always check
        the numbers twice before we publish them, because small mistakes have
        a way of growing into large problems that nobody wants to explain
        later. This is the reason that the authors of the study decided to
        keep their tools open and their records complete, so that other
        researchers could repeat each step and see the same results with
        their own eyes.
    """,
    "fr": """
        Le rapport décrit comment le système a été construit et pourquoi il
        est important pour les personnes qui travaillent avec de grandes
        collections de documents. Au fil des années, l'équipe a constaté que
        les résultats les plus utiles viennent de méthodes simples appliquées
        avec soin. Quand les données sont propres et que la question est
        claire, même une analyse rapide peut montrer laquelle des nombreuses
        réponses possibles est probablement la bonne. Le chat noir qui dort
        près de la fenêtre de la vieille maison connaît cette histoire. Nous
        devrions toujours vérifier les chiffres deux fois avant de les
        publier, parce que les petites erreurs deviennent de grands problèmes
        que personne ne veut expliquer plus tard. C'est la raison pour
        laquelle les auteurs de cette étude ont décidé de garder leurs outils
        ouverts et leurs archives complètes.
    """,
    "de": """
        Der Bericht beschreibt, wie das System gebaut wurde und warum es für
        Menschen wichtig ist, die mit großen Sammlungen von Dokumenten
        arbeiten. Im Laufe der Jahre hat das Team immer wieder festgestellt,
        dass die nützlichsten Ergebnisse aus einfachen Methoden stammen, die
        sorgfältig angewendet werden. Wenn die Daten sauber sind und die
        Frage klar ist, kann schon eine schnelle Analyse zeigen, welche der
        vielen möglichen Antworten wahrscheinlich richtig ist. Der alte Hund,
        der das Haus am Fluss bewacht, ist im Sommer faul und im Winter
        schnell, und jeder im Dorf kennt diese Geschichte. Wir sollten die
        Zahlen immer zweimal prüfen, bevor wir sie veröffentlichen, weil aus
        kleinen Fehlern große Probleme werden, die später niemand erklären
        möchte.
    """,
    "es": """
        El informe describe cómo se construyó el sistema y por qué es
        importante para las personas que trabajan con grandes colecciones de
        documentos. A lo largo de los años, el equipo ha comprobado una y
        otra vez que los resultados más útiles provienen de métodos sencillos
        aplicados con cuidado. Cuando los datos están limpios y la pregunta
        es clara, incluso un análisis rápido puede mostrar cuál de las muchas
        respuestas posibles es probablemente la correcta. El perro viejo que
        cuida la casa junto al río es perezoso en verano y rápido en
        invierno, y todos en el pueblo conocen esta historia. Siempre
        deberíamos comprobar los números dos veces antes de publicarlos,
        porque los errores pequeños se convierten en problemas grandes que
        nadie quiere explicar después.
    """,
}


def _trigrams(text: str) -> list[str]:
    grams: list[str] = []
    for word in _WORD_RE.findall(text.lower()):
        padded = f" {word} "
        grams.extend(padded[i : i + 3] for i in range(len(padded) - 2))
    return grams


def _build_profile(text: str) -> dict[str, float]:
    counts = Counter(_trigrams(text))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:PROFILE_SIZE]
    n = len(ranked)
    # Linearly decaying rank weight: the most frequent trigram counts most.
    return {gram: (n - rank) / n for rank, (gram, _) in enumerate(ranked)}


_PROFILES: dict[str, dict[str, float]] = {
    lang: _build_profile(text) for lang, text in _SEED_TEXTS.items()
}


def similarity(text: str, lang: str) -> float:
    """Rank-weighted fraction of the text's trigrams found in a language profile."""
    profile = _PROFILES[lang]
    grams = _trigrams(text)
    if not grams:
        return 0.0
    return sum(profile.get(g, 0.0) for g in grams) / len(grams)


def detect_language(text: str) -> tuple[str, float]:
    """Return (ISO-639-1 code, confidence in [0, 1]) for the given text.

    Confidence is the normalized margin between the best and second-best
    profile similarity.  Texts shorter than 20 characters after trimming are
    reported as ("und", 0.0).
    """
    stripped = text.strip()
    if not stripped:
        raise ValueError("detect_language: empty text")
    if len(stripped) < MIN_TEXT_LEN:
        return "und", 0.0
    scored = sorted(
        ((similarity(stripped, lang), lang) for lang in _PROFILES),
        reverse=True,
    )
    best_score, best_lang = scored[0]
    second_score = scored[1][0]
    if best_score <= 0.0:
        return "und", 0.0
    confidence = max(0.0, min(1.0, 1.0 - second_score / best_score))
    return best_lang, confidence
