"""Context vectors and moral loadings.

A text's context vector is the sum of its keywords' embedding vectors
(per occurrence). Moral loadings are cosine similarities against the
five foundation context vectors, reported in canonical order (Care,
Fairness, Ingroup, Authority, Purity).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import TokenizedTweet
from .errors import DataError
from .lexicon import FOUNDATIONS, VICE, CoverageResult, MFDictionary, coverage
from .linalg import EmbeddingSpace, cosine
from .vectorizer import SelectionResult

logger = logging.getLogger(__name__)

UNCLASSIFIED = "unclassified"


@dataclass
class ContextVector:
    """Sum of embedding vectors for a labeled set of contributing words."""

    label: str
    vector: np.ndarray
    contributing_words: tuple[tuple[str, int], ...]
    skipped: int = 0

    @property
    def degenerate(self) -> bool:
        return not self.contributing_words


@dataclass
class LoadingMatrix:
    """Rows x 5 cosine loadings in canonical foundation order."""

    row_labels: tuple[str, ...]
    values: np.ndarray
    degenerate: tuple[bool, ...]
    foundations: tuple[str, ...] = FOUNDATIONS

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass
class ExtendedDictionary:
    """Per-foundation ranked (word, similarity) lists."""

    per_foundation: dict[str, list[tuple[str, float]]]
    n: int

    @property
    def total_entries(self) -> int:
        return sum(len(v) for v in self.per_foundation.values())


@dataclass
class ViceFrequencyReport:
    """Word-level rows (word, foundations, corpus frequency) plus the coverage fraction."""

    rows: list[tuple[str, tuple[str, ...], int]]
    coverage_fraction: float
    coverage: CoverageResult | None = field(repr=False, default=None)


def tweet_vector(tweet: TokenizedTweet, embedding: EmbeddingSpace) -> ContextVector:
    """Sum the embeddings of the tweet's keyword tokens, once per occurrence.

    Non-keyword tokens are skipped and counted; a tweet with no keyword
    tokens yields the zero vector and is flagged degenerate.
    """
    counts: dict[str, int] = {}
    skipped = 0
    for token in tweet.tokens:
        if token in embedding.words.index:
            counts[token] = counts.get(token, 0) + 1
        else:
            skipped += 1
    vector = np.zeros(embedding.k, dtype=np.float64)
    if counts:
        idx = np.array([embedding.words.index[w] for w in counts], dtype=np.intp)
        weights = np.array(list(counts.values()), dtype=np.float64)
        vector = weights @ embedding.vectors[idx]
    return ContextVector(
        label=tweet.id,
        vector=vector,
        contributing_words=tuple(counts.items()),
        skipped=skipped,
    )


def mf_vectors(
    dictionary: MFDictionary, embedding: EmbeddingSpace, polarity: str = VICE
) -> dict[str, ContextVector]:
    """One context vector per foundation: the sum of all matching keywords' embeddings.

    A keyword matching several foundations contributes to each of them.
    A foundation matched by no keyword raises DataError (its vector
    would be undefined). MoralityGeneral never produces a vector.
    """
    matched: dict[str, list[str]] = {f: [] for f in FOUNDATIONS}
    for word in embedding.words.words:
        for foundation in dictionary.match_word(word, polarity):
            if foundation in matched:
                matched[foundation].append(word)
    vectors: dict[str, ContextVector] = {}
    for foundation in FOUNDATIONS:
        words = matched[foundation]
        if not words:
            raise DataError(
                f"no keywords match any {polarity} entry of foundation {foundation}; "
                "its context vector is undefined"
            )
        idx = np.array([embedding.words.index[w] for w in words], dtype=np.intp)
        vectors[foundation] = ContextVector(
            label=foundation,
            vector=embedding.vectors[idx].sum(axis=0),
            contributing_words=tuple((w, 1) for w in words),
        )
    return vectors


def topic_vector(
    topic_selection: SelectionResult,
    embedding: EmbeddingSpace,
    n: int,
    label: str,
) -> ContextVector:
    """Sum the first n topic words (in score order) that exist in the keyword space.

    Topic words absent from the embedding are skipped and counted; if
    fewer than n survive, all survivors are used with a warning.
    """
    survivors: list[str] = []
    skipped = 0
    for word in topic_selection.context_words:
        if word in embedding.words.index:
            survivors.append(word)
            if len(survivors) == n:
                break
        else:
            skipped += 1
    if len(survivors) < n:
        logger.warning(
            "topic %s: only %d of the requested %d words are in the keyword space",
            label, len(survivors), n,
        )
    vector = np.zeros(embedding.k, dtype=np.float64)
    if survivors:
        idx = np.array([embedding.words.index[w] for w in survivors], dtype=np.intp)
        vector = embedding.vectors[idx].sum(axis=0)
    return ContextVector(
        label=label,
        vector=vector,
        contributing_words=tuple((w, 1) for w in survivors),
        skipped=skipped,
    )


def loading_matrix(
    rows: Sequence[ContextVector], mf: Mapping[str, ContextVector]
) -> LoadingMatrix:
    """Cosine of every row vector against the five foundation vectors.

    Degenerate rows get an all-zero loading row and a flag. Values are
    clipped to [-1, 1] to absorb floating-point overshoot.
    """
    mf_vecs = [mf[f].vector for f in FOUNDATIONS]
    values = np.zeros((len(rows), len(FOUNDATIONS)), dtype=np.float64)
    flags: list[bool] = []
    for i, row in enumerate(rows):
        flags.append(row.degenerate)
        if row.degenerate:
            continue
        for j, mv in enumerate(mf_vecs):
            values[i, j] = cosine(row.vector, mv)
    np.clip(values, -1.0, 1.0, out=values)
    return LoadingMatrix(
        row_labels=tuple(r.label for r in rows),
        values=values,
        degenerate=tuple(flags),
    )


def dominant_foundation(row: np.ndarray | Sequence[float]) -> str:
    """Foundation with the maximum loading; canonical order breaks ties.

    An all-zero row carries no signal and returns the ``unclassified``
    sentinel.
    """
    values = np.asarray(row, dtype=np.float64)
    if values.shape != (len(FOUNDATIONS),):
        raise ValueError(f"expected {len(FOUNDATIONS)} loadings, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("loadings must be finite")
    if np.all(values == 0.0):
        return UNCLASSIFIED
    return FOUNDATIONS[int(np.argmax(values))]


def foundation_counts(matrix: LoadingMatrix) -> dict[str, int]:
    """Histogram of dominant foundations over non-degenerate rows."""
    counts = {f: 0 for f in FOUNDATIONS}
    for i in range(matrix.values.shape[0]):
        if matrix.degenerate[i]:
            continue
        dominant = dominant_foundation(matrix.values[i])
        if dominant != UNCLASSIFIED:
            counts[dominant] += 1
    return counts


def mf_similarity_matrix(mf: Mapping[str, ContextVector]) -> np.ndarray:
    """Symmetric 5x5 cosine matrix between foundation vectors, unit diagonal."""
    vecs = [mf[f].vector for f in FOUNDATIONS]
    n = len(vecs)
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i, n):
            value = cosine(vecs[i], vecs[j])
            out[i, j] = value
            out[j, i] = value
    return out


def extend_dictionary(
    embedding: EmbeddingSpace, mf: Mapping[str, ContextVector], n: int
) -> ExtendedDictionary:
    """Top-n keywords by cosine to each foundation vector (a word may repeat across foundations)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > len(embedding.words.words):
        logger.warning(
            "requested %d words per foundation but only %d keywords exist",
            n, len(embedding.words.words),
        )
    per_foundation: dict[str, list[tuple[str, float]]] = {}
    for foundation in FOUNDATIONS:
        mv = mf[foundation].vector
        sims = [(word, cosine(embedding.vectors[i], mv))
                for i, word in enumerate(embedding.words.words)]
        sims.sort(key=lambda item: (-item[1], item[0]))
        per_foundation[foundation] = sims[:n]
    return ExtendedDictionary(per_foundation=per_foundation, n=n)


def vice_frequency_report(
    dictionary: MFDictionary,
    vocabulary_frequencies: Mapping[str, int],
    polarity: str = VICE,
) -> ViceFrequencyReport:
    """Word-level frequency rows for matched dictionary words (word-cloud data).

    ``vocabulary_frequencies`` maps each vocabulary word to its corpus
    occurrence count. Unmatched dictionary entries contribute no rows.
    """
    cov = coverage(dictionary, vocabulary_frequencies, polarity)
    by_word: dict[str, set[str]] = {}
    for item in cov.entries:
        for word in item.matched_words:
            by_word.setdefault(word, set()).add(item.entry.foundation)
    rows = [
        (word, tuple(sorted(foundations)), int(vocabulary_frequencies.get(word, 0)))
        for word, foundations in by_word.items()
    ]
    rows.sort(key=lambda r: (-r[2], r[0]))
    return ViceFrequencyReport(rows=rows, coverage_fraction=cov.fraction, coverage=cov)


def save_loadings(
    matrix: LoadingMatrix, path: str | Path
) -> None:
    """CSV: id, care, fairness, ingroup, authority, purity, dominant, degenerate_flag."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        header = ",".join(f.lower() for f in matrix.foundations)
        handle.write(f"id,{header},dominant,degenerate\n")
        for i, label in enumerate(matrix.row_labels):
            values = ",".join(f"{x:.9g}" for x in matrix.values[i])
            dominant = UNCLASSIFIED if matrix.degenerate[i] else dominant_foundation(matrix.values[i])
            handle.write(f"{label},{values},{dominant},{int(matrix.degenerate[i])}\n")


def load_loadings(path: str | Path) -> LoadingMatrix:
    """Rebuild a LoadingMatrix from a CSV written by save_loadings."""
    path = Path(path)
    labels: list[str] = []
    rows: list[list[float]] = []
    flags: list[bool] = []
    try:
        handle = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read loadings {path}: {exc}") from exc
    with handle:
        header = handle.readline()
        if not header.startswith("id,"):
            raise DataError(f"{path}: unexpected header")
        for lineno, line in enumerate(handle, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != len(FOUNDATIONS) + 3:
                raise DataError(f"{path}:{lineno}: expected {len(FOUNDATIONS) + 3} columns")
            labels.append(fields[0])
            rows.append([float(x) for x in fields[1 : 1 + len(FOUNDATIONS)]])
            flags.append(fields[-1] == "1")
    values = (
        np.array(rows, dtype=np.float64)
        if rows
        else np.zeros((0, len(FOUNDATIONS)), dtype=np.float64)
    )
    return LoadingMatrix(row_labels=tuple(labels), values=values, degenerate=tuple(flags))


def save_topic_loadings(
    matrices: Mapping[int, LoadingMatrix], path: str | Path
) -> None:
    """CSV of topic loadings, one block per keyword-count setting n."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        header = ",".join(f.lower() for f in FOUNDATIONS)
        handle.write(f"topic,keywords_used,{header}\n")
        for n in sorted(matrices):
            matrix = matrices[n]
            for i, label in enumerate(matrix.row_labels):
                values = ",".join(f"{x:.9g}" for x in matrix.values[i])
                handle.write(f"{label},{n},{values}\n")


def save_extended_dictionary(extended: ExtendedDictionary, path: str | Path) -> None:
    """TSV: foundation, rank, word, similarity."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        handle.write("foundation\trank\tword\tsimilarity\n")
        for foundation in FOUNDATIONS:
            for rank, (word, sim) in enumerate(extended.per_foundation[foundation], start=1):
                handle.write(f"{foundation}\t{rank}\t{word}\t{sim:.9g}\n")


def save_similarity_matrix(matrix: np.ndarray, path: str | Path) -> None:
    """CSV 5x5 with foundation row/column labels."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        handle.write("foundation," + ",".join(f.lower() for f in FOUNDATIONS) + "\n")
        for i, foundation in enumerate(FOUNDATIONS):
            values = ",".join(f"{x:.9g}" for x in matrix[i])
            handle.write(f"{foundation},{values}\n")


def save_foundation_counts(counts: Mapping[str, int], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        handle.write("foundation,tweets\n")
        for foundation in FOUNDATIONS:
            handle.write(f"{foundation},{counts.get(foundation, 0)}\n")


def save_vice_report(report: ViceFrequencyReport, path: str | Path) -> None:
    """TSV rows (word, foundations, frequency) preceded by the coverage fraction."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        handle.write(f"# vice_coverage\t{report.coverage_fraction!r}\n")
        handle.write("word\tfoundations\tfrequency\n")
        for word, foundations, freq in report.rows:
            handle.write(f"{word}\t{'|'.join(foundations)}\t{freq}\n")


def context_vectors_for_corpus(
    corpus: Iterable[TokenizedTweet], embedding: EmbeddingSpace
) -> list[ContextVector]:
    """tweet_vector over a whole corpus, logging how many were degenerate."""
    vectors = [tweet_vector(tweet, embedding) for tweet in corpus]
    degenerate = sum(1 for v in vectors if v.degenerate)
    if degenerate:
        logger.info("%d of %d tweets have no keywords (degenerate)", degenerate, len(vectors))
    return vectors


def save_context_vectors(vectors: Sequence[ContextVector], path: str | Path) -> None:
    """TSV: label followed by the k vector values (9 significant digits)."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for cv in vectors:
            values = "\t".join(f"{x:.9g}" for x in cv.vector)
            handle.write(f"{cv.label}\t{values}\n")


def load_context_vectors(path: str | Path) -> list[ContextVector]:
    """Rebuild labeled vectors saved by save_context_vectors.

    Contributing-word detail is not persisted; loaded vectors are marked
    degenerate only if they are exactly zero.
    """
    path = Path(path)
    out: list[ContextVector] = []
    try:
        handle = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read context vectors {path}: {exc}") from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) < 2:
                raise DataError(f"{path}:{lineno}: expected label plus vector")
            vector = np.array([float(x) for x in fields[1:]], dtype=np.float64)
            placeholder = ((fields[0], 1),) if np.any(vector != 0.0) else ()
            out.append(ContextVector(label=fields[0], vector=vector, contributing_words=placeholder))
    return out
