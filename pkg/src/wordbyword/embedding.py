"""Skip-gram embedding spaces: training, perturbation, normalization, I/O.

The same trainer produces both sides of a translation experiment: the target
side is plain text, and the source side is a surrogate for spoken-word
embeddings, obtained by training on a segmentation-noised corpus and
optionally jittering the resulting vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _sgns
from .corpus import Corpus


@dataclass(frozen=True, eq=False)
class EmbeddingSpace:
    """A vocabulary (most frequent first) with one dense vector per token."""

    vocab: tuple[str, ...]
    vectors: np.ndarray
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vocab", tuple(self.vocab))
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.vocab):
            raise ValueError(
                f"vectors shape {self.vectors.shape} does not match vocab of {len(self.vocab)}"
            )
        if self.vectors.shape[1] < 1:
            raise ValueError("embedding dimension must be positive")
        self.vectors.setflags(write=False)  # spaces are immutable once built
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.vocab)})

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def index_of(self, token: str) -> int:
        return self._index[token]

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self._index[token]]


@dataclass(frozen=True)
class SkipGramConfig:
    dim: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    seed: int = 0
    jitter_sigma: float = 0.0
    subsample: float = 1e-4  # frequency subsampling threshold; 0 disables

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.negatives < 1:
            raise ValueError("negatives must be >= 1")
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be >= 0")


def _negative_table(counts: np.ndarray, size: int = 5_000_000) -> np.ndarray:
    p = counts.astype(np.float64) ** 0.75
    cum = np.cumsum(p / p.sum())
    return np.searchsorted(cum, (np.arange(size) + 0.5) / size).astype(np.int32)


def _keep_probs(counts: np.ndarray, subsample: float) -> np.ndarray:
    if subsample <= 0:
        return np.ones(len(counts))
    f = counts / counts.sum()
    keep = (np.sqrt(f / subsample) + 1.0) * (subsample / f)
    return np.minimum(keep, 1.0)


def _train_arrays(corpus: Corpus, cfg: SkipGramConfig, threads: int = 1):
    """Run SGNS and return (input vectors, context vectors, vocab)."""
    vocab = corpus.tokens_by_frequency()
    if len(vocab) < 2:
        raise ValueError("need a vocabulary of at least 2 tokens")
    if len(vocab) < cfg.negatives + 1:
        raise ValueError(
            f"vocabulary of {len(vocab)} is smaller than negatives+1={cfg.negatives + 1}"
        )
    counts = np.array([corpus.counts[t] for t in vocab], dtype=np.int64)
    ids = np.empty(corpus.num_tokens, dtype=np.int32)
    offsets = np.zeros(len(corpus.sentences) + 1, dtype=np.int64)
    pos = 0
    vmap = corpus.vocab
    for s, sent in enumerate(corpus.sentences):
        for tok in sent:
            ids[pos] = vmap[tok]
            pos += 1
        offsets[s + 1] = pos

    rng = np.random.default_rng(cfg.seed)
    syn0 = ((rng.random((len(vocab), cfg.dim)) - 0.5) / cfg.dim).astype(np.float32)
    syn1 = np.zeros((len(vocab), cfg.dim), dtype=np.float32)
    table = _negative_table(counts)
    keep = _keep_probs(counts, cfg.subsample)

    kernel = _sgns.train_serial if threads <= 1 else _sgns.train_parallel
    if threads > 1:
        import numba

        numba.set_num_threads(threads)
    kernel(
        ids, offsets, syn0, syn1, table, keep,
        cfg.window, cfg.negatives, cfg.epochs, cfg.learning_rate, cfg.seed,
    )
    return syn0, syn1, vocab


def train_skipgram(corpus: Corpus, cfg: SkipGramConfig, threads: int = 1) -> EmbeddingSpace:
    """Train skip-gram with negative sampling on ``corpus``.

    Negatives are drawn from the unigram^(3/4) distribution.  With
    ``threads=1`` training is exactly reproducible for a fixed seed; more
    threads trade reproducibility for speed.  If ``cfg.jitter_sigma`` is
    positive, Gaussian noise of that scale is added to the finished vectors
    (the per-instance variance surrogate for spoken-segment embeddings).
    """
    syn0, _, vocab = _train_arrays(corpus, cfg, threads)
    space = EmbeddingSpace(vocab=tuple(vocab), vectors=syn0)
    if cfg.jitter_sigma > 0:
        space = jitter(space, cfg.jitter_sigma, cfg.seed)
    return space


def jitter(space: EmbeddingSpace, sigma: float, seed: int) -> EmbeddingSpace:
    """Add i.i.d. zero-mean Gaussian noise with std ``sigma`` to every coordinate."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return space
    rng = np.random.default_rng(seed)
    noisy = space.vectors + sigma * rng.standard_normal(space.vectors.shape)
    return EmbeddingSpace(vocab=space.vocab, vectors=noisy.astype(space.vectors.dtype))


def normalize(space: EmbeddingSpace, steps: Sequence[str] = ("unit", "center", "unit")) -> EmbeddingSpace:
    """Apply ``unit`` (rescale rows to L2 norm 1) and ``center`` (subtract
    column means) steps in the given order.  Always returns float64 vectors.
    """
    vec = space.vectors.astype(np.float64)
    for step in steps:
        if step == "unit":
            norms = np.linalg.norm(vec, axis=1)
            bad = np.where(norms == 0)[0]
            if bad.size:
                raise ValueError(f"cannot unit-normalize zero vector for token {space.vocab[bad[0]]!r}")
            vec = vec / norms[:, None]
        elif step == "center":
            vec = vec - vec.mean(axis=0)
        else:
            raise ValueError(f"unknown normalization step {step!r}")
    return EmbeddingSpace(vocab=space.vocab, vectors=vec)


def save_embeddings(space: EmbeddingSpace, path: str | Path) -> None:
    """Write the text format: header ``|V| d``, then ``token v1 .. vd`` rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(space)} {space.dim}\n")
        for tok, row in zip(space.vocab, space.vectors):
            fh.write(tok + " " + " ".join(f"{v:.9g}" for v in row) + "\n")


def load_embeddings(path: str | Path) -> EmbeddingSpace:
    """Read the text format written by :func:`save_embeddings`.

    Raises ``ValueError`` on a malformed header or on any row whose value
    count disagrees with the header dimension.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"malformed embedding header in {path}")
        try:
            n, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ValueError(f"malformed embedding header in {path}") from None
        vocab: list[str] = []
        vectors = np.empty((n, dim), dtype=np.float64)
        for i in range(n):
            parts = fh.readline().split()
            if len(parts) != dim + 1:
                raise ValueError(
                    f"dimension mismatch at row {i + 1} of {path}: "
                    f"expected {dim} values, got {max(len(parts) - 1, 0)}"
                )
            vocab.append(parts[0])
            vectors[i] = [float(x) for x in parts[1:]]
    return EmbeddingSpace(vocab=tuple(vocab), vectors=vectors)
