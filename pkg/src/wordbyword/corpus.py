"""Corpus ingestion, cipher languages, and segmentation-noise channels.

A corpus here is a plain tokenized text: one sentence per line, whitespace
tokens.  On top of loading real files, this module can manufacture synthetic
"source languages" for controlled experiments: a deterministic token cipher
(which gives an exact ground-truth lexicon) and a split/merge noise channel
that imitates the damage done by an imperfect word segmenter.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"

#: tokens that keep their identity under ciphering
RESERVED_TOKENS = (UNK, BOS, EOS)


@dataclass(frozen=True)
class Corpus:
    """Tokenized sentences plus a dense, frequency-ranked vocabulary.

    ``vocab`` maps token -> id with ids dense in ``0..|V|-1``, assigned in
    order of decreasing count (ties broken alphabetically), so id 0 is the
    most frequent token.  ``counts`` holds occurrence counts for exactly the
    vocabulary tokens.
    """

    sentences: tuple[tuple[str, ...], ...]
    vocab: dict[str, int]
    counts: dict[str, int]

    @classmethod
    def from_sentences(cls, sentences: Iterable[Sequence[str]]) -> "Corpus":
        sents = tuple(tuple(s) for s in sentences)
        counts = Counter(tok for sent in sents for tok in sent)
        ordered = sorted(counts, key=lambda t: (-counts[t], t))
        vocab = {tok: i for i, tok in enumerate(ordered)}
        return cls(sentences=sents, vocab=vocab, counts=dict(counts))

    @property
    def num_tokens(self) -> int:
        return sum(self.counts.values())

    def tokens_by_frequency(self) -> list[str]:
        """Vocabulary tokens in id order (most frequent first)."""
        out = [""] * len(self.vocab)
        for tok, i in self.vocab.items():
            out[i] = tok
        return out

    def __len__(self) -> int:
        return len(self.sentences)


def load_corpus(path: str | Path, lowercase: bool = False, min_count: int = 5) -> Corpus:
    """Read a one-sentence-per-line UTF-8 text file into a :class:`Corpus`.

    Tokens occurring fewer than ``min_count`` times are replaced by ``<unk>``;
    the vocabulary then contains the surviving tokens plus ``<unk>`` (only if
    anything was actually replaced).  Blank lines are skipped.

    Raises
    ------
    OSError
        If the file cannot be read.
    ValueError
        If no sentences remain after filtering.
    """
    text = Path(path).read_text(encoding="utf-8")
    sentences = []
    for line in text.splitlines():
        toks = line.lower().split() if lowercase else line.split()
        if toks:
            sentences.append(toks)
    if not sentences:
        raise ValueError(f"empty corpus: {path}")
    raw_counts = Counter(tok for sent in sentences for tok in sent)
    kept = {tok for tok, c in raw_counts.items() if c >= min_count}
    if not kept:
        raise ValueError(f"no token reaches min_count={min_count}: {path}")
    if len(kept) < len(raw_counts):
        sentences = [
            [tok if tok in kept else UNK for tok in sent] for sent in sentences
        ]
    return Corpus.from_sentences(sentences)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write one sentence per line, whitespace-joined."""
    with open(path, "w", encoding="utf-8") as fh:
        for sent in corpus.sentences:
            fh.write(" ".join(sent) + "\n")


# ----------------------------------------------------------------------
# Cipher languages
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CipherSpec:
    """A deterministic token bijection acting as a synthetic language pair."""

    seed: int
    token_map: dict[str, str]

    def __post_init__(self):
        targets = set(self.token_map.values())
        if len(targets) != len(self.token_map):
            raise ValueError("token_map is not a bijection")

    @classmethod
    def random(cls, tokens: Iterable[str], seed: int) -> "CipherSpec":
        """Random permutation cipher over ``tokens``; reserved tokens are fixed points."""
        plain = sorted(t for t in set(tokens) if t not in RESERVED_TOKENS)
        shuffled = list(plain)
        random.Random(seed).shuffle(shuffled)
        token_map = dict(zip(plain, shuffled))
        for tok in RESERVED_TOKENS:
            token_map[tok] = tok
        return cls(seed=seed, token_map=token_map)

    @classmethod
    def identity(cls, tokens: Iterable[str]) -> "CipherSpec":
        return cls(seed=0, token_map={t: t for t in set(tokens)})


def make_cipher_corpus(
    corpus: Corpus, spec: CipherSpec
) -> tuple[Corpus, list[tuple[str, str]]]:
    """Rename every token of ``corpus`` through ``spec.token_map``.

    Returns the renamed corpus together with the full lexicon as
    ``(source_token, target_token)`` pairs, ordered by source frequency.
    Sentence lengths and per-position alignment are preserved exactly.
    """
    tm = spec.token_map
    sentences = [[tm.get(tok, tok) for tok in sent] for sent in corpus.sentences]
    ciphered = Corpus.from_sentences(sentences)
    lexicon = [(tok, tm.get(tok, tok)) for tok in corpus.tokens_by_frequency()]
    return ciphered, lexicon


def write_lexicon(pairs: Iterable[tuple[str, str]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for src, tgt in pairs:
            fh.write(f"{src}\t{tgt}\n")


def read_lexicon(path: str | Path) -> list[tuple[str, str]]:
    pairs = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ValueError(f"bad lexicon line: {line!r}")
        pairs.append((parts[0], parts[1]))
    return pairs


# ----------------------------------------------------------------------
# Segmentation noise
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SegmentationNoiseSpec:
    """Split/merge error channel imitating an imperfect word segmenter."""

    p_split: float = 0.0
    p_merge: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.p_split <= 1.0 and 0.0 <= self.p_merge <= 1.0):
            raise ValueError("p_split and p_merge must lie in [0, 1]")


def noise_sentence(
    sent: Sequence[str], spec: SegmentationNoiseSpec, rng: random.Random
) -> list[str]:
    """Apply split/merge noise to one sentence.

    Each token is split into ``tok#0 tok#1`` with probability ``p_split``;
    each adjacent pair of surviving whole tokens is merged into ``a+b`` with
    probability ``p_merge``.  A split token never merges, and a token joins
    at most one merge.
    """
    n = len(sent)
    split = [rng.random() < spec.p_split for _ in range(n)]
    merged_with_next = [False] * n
    taken = [False] * n
    for i in range(n - 1):
        if split[i] or split[i + 1] or taken[i] or taken[i + 1]:
            continue
        if rng.random() < spec.p_merge:
            merged_with_next[i] = True
            taken[i] = taken[i + 1] = True
    out: list[str] = []
    i = 0
    while i < n:
        if split[i]:
            out.append(f"{sent[i]}#0")
            out.append(f"{sent[i]}#1")
            i += 1
        elif merged_with_next[i]:
            out.append(f"{sent[i]}+{sent[i + 1]}")
            i += 2
        else:
            out.append(sent[i])
            i += 1
    return out


def apply_segmentation_noise(corpus: Corpus, spec: SegmentationNoiseSpec) -> Corpus:
    """Pass every sentence through the split/merge channel (one RNG stream)."""
    rng = random.Random(spec.seed)
    return Corpus.from_sentences(
        noise_sentence(sent, spec, rng) for sent in corpus.sentences
    )


# ----------------------------------------------------------------------
# Synthetic corpora
# ----------------------------------------------------------------------

_CONSONANTS = "bcdfghjklmnprstvz"
_VOWELS = "aeiou"
_SYLLABLES = [c + v for c in _CONSONANTS for v in _VOWELS]  # 85 syllables


def pseudo_word(i: int) -> str:
    """Deterministic pronounceable token for word id ``i`` (fixed-width base-85)."""
    n = len(_SYLLABLES)
    parts = [_SYLLABLES[(i // n) % n], _SYLLABLES[i % n]]
    if i >= n * n:
        parts.insert(0, _SYLLABLES[i // (n * n)])
    return "".join(parts)


def synthesize_corpus(
    vocab_size: int = 3000,
    n_sentences: int = 50_000,
    mean_length: int = 15,
    branching: int = 64,
    zipf_exponent: float = 1.05,
    concentration: float = 1.5,
    smoothing: float = 0.12,
    seed: int = 0,
) -> Corpus:
    """Sample a corpus from a random sparse first-order Markov chain.

    Every word gets its own set of ``branching`` preferred successors (drawn
    Zipf-biased so the marginals stay Zipf-like) with random concentrated
    weights; with probability ``smoothing`` a step ignores the chain and
    draws from the unigram distribution.  The result has the two properties
    the rest of the toolkit needs from "language-like" data: each word has a
    distinctive co-occurrence signature (so embedding spaces trained on two
    disjoint samples are near-isomorphic), and local context is predictive
    (so an n-gram model has something to say).

    Two corpora from different seeds share the word *inventory* but not the
    chain; pair disjoint slices of a single corpus to emulate comparable
    monolingual corpora.
    """
    if vocab_size < 2:
        raise ValueError("vocab_size must be >= 2")
    if not 2 <= branching <= vocab_size:
        raise ValueError("branching must lie in [2, vocab_size]")
    rng = np.random.default_rng(seed)
    V = vocab_size

    uni = np.arange(1, V + 1, dtype=np.float64) ** -zipf_exponent
    uni /= uni.sum()
    zipf_logits = np.log(uni)
    uni_cum = np.cumsum(uni)

    # Gumbel top-k: sample each word's successor set without replacement,
    # biased toward frequent words.
    gumbel = rng.gumbel(size=(V, V))
    keys = zipf_logits[None, :] + gumbel
    succ = np.argpartition(-keys, branching - 1, axis=1)[:, :branching]
    del gumbel, keys

    w = concentration * rng.standard_normal((V, branching)) + zipf_logits[succ]
    w = np.exp(w - w.max(axis=1, keepdims=True))
    w /= w.sum(axis=1, keepdims=True)
    succ_cum = np.cumsum(w, axis=1)

    lengths = rng.poisson(max(mean_length - 4, 1), size=n_sentences) + 4
    sentences: list[tuple[str, ...]] = []
    words = [pseudo_word(i) for i in range(V)]

    batch = 8192
    for start in range(0, n_sentences, batch):
        lens = lengths[start : start + batch]
        B, L = len(lens), int(lens.max())
        ids = np.empty((B, L), dtype=np.int64)
        cur = np.searchsorted(uni_cum, rng.random(B))
        ids[:, 0] = cur
        for t in range(1, L):
            u = rng.random(B)
            pick = succ[cur, (succ_cum[cur] < u[:, None]).sum(axis=1)]
            from_uni = rng.random(B) < smoothing
            if from_uni.any():
                pick[from_uni] = np.searchsorted(uni_cum, u[from_uni])
            ids[:, t] = pick
            cur = pick
        for row, ln in zip(ids, lens):
            sentences.append(tuple(words[i] for i in row[:ln]))
    return Corpus.from_sentences(sentences)
