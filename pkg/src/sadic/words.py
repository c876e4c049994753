"""Alphabets, words and substitutions.

Words are tuples of letter indices into an :class:`Alphabet`.  All counts and
matrices in this module are exact Python integers; integer matrices are numpy
arrays with ``dtype=object`` so that entries never overflow.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import _kernels as K
from .errors import (
    AlphabetMismatch,
    BudgetExceeded,
    EmptyImage,
    EmptyPattern,
    EverywhereGrowingRequired,
    InvalidLetter,
)

Word = tuple
WordLike = Union[str, Sequence[str], Sequence[int]]

#: default cap on the total number of letters materialized by one call
DEFAULT_BUDGET = 10 ** 7


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of symbols; index order is the canonical order."""

    letters: tuple

    def __post_init__(self):
        letters = tuple(str(x) for x in self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise InvalidLetter("alphabet must be non-empty")
        if len(set(letters)) != len(letters):
            raise InvalidLetter(f"duplicate symbols in alphabet {letters}")

    @property
    def d(self) -> int:
        return len(self.letters)

    def __len__(self):
        return len(self.letters)

    @cached_property
    def _index(self):
        return {x: i for i, x in enumerate(self.letters)}

    @cached_property
    def single_char(self) -> bool:
        return all(len(x) == 1 for x in self.letters)

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise InvalidLetter(f"{symbol!r} is not a letter of {self.letters}") from None

    def parse(self, word: WordLike) -> Word:
        """Convert a string, a list of symbols or a list of indices to a Word."""
        if isinstance(word, str):
            if self.single_char:
                return tuple(self.index(ch) for ch in word)
            return tuple(self.index(tok) for tok in word.split())
        out = []
        for x in word:
            if isinstance(x, str):
                out.append(self.index(x))
            else:
                i = int(x)
                if not 0 <= i < self.d:
                    raise InvalidLetter(f"letter index {i} out of range for d={self.d}")
                out.append(i)
        return tuple(out)

    def format(self, word: Iterable[int]) -> str:
        sep = "" if self.single_char else " "
        return sep.join(self.letters[i] for i in word)

    def words(self, length: int) -> list:
        """All words of the given length, lexicographic in index order."""
        return [tuple(int(c) for c in np.unravel_index(code, (self.d,) * length))
                for code in range(self.d ** length)] if length else [()]

    def pairs(self) -> list:
        return self.words(2)

    def augmented_labels(self) -> list:
        """Labels of the canonical index set A_2: letters, then pairs."""
        return list(self.letters) + [self.format(p) for p in self.pairs()]


def _check_indices(word, d):
    for x in word:
        if not 0 <= x < d:
            raise InvalidLetter(f"letter index {x} out of range for d={d}")


@dataclass(frozen=True)
class Substitution:
    """A non-erasing morphism from ``domain``-words to ``codomain``-words."""

    domain: Alphabet
    codomain: Alphabet
    images: tuple

    def __post_init__(self):
        images = tuple(tuple(int(x) for x in img) for img in self.images)
        object.__setattr__(self, "images", images)
        if len(images) != self.domain.d:
            raise AlphabetMismatch(
                f"{len(images)} images given for an alphabet of {self.domain.d} letters")
        for a, img in enumerate(images):
            if not img:
                raise EmptyImage(f"image of {self.domain.letters[a]!r} is empty")
            _check_indices(img, self.codomain.d)

    @classmethod
    def from_rules(cls, alphabet, rules: Mapping, codomain=None) -> "Substitution":
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        target = alphabet if codomain is None else (
            codomain if isinstance(codomain, Alphabet) else Alphabet(tuple(codomain)))
        missing = [x for x in alphabet.letters if x not in rules]
        if missing:
            raise InvalidLetter(f"no rule for letters {missing}")
        extra = [x for x in rules if x not in alphabet.letters]
        if extra:
            raise InvalidLetter(f"rules for unknown letters {extra}")
        images = tuple(target.parse(rules[x]) for x in alphabet.letters)
        return cls(alphabet, target, images)

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "Substitution":
        return cls(alphabet, alphabet, tuple((i,) for i in range(alphabet.d)))

    @property
    def is_endomorphism(self) -> bool:
        return self.domain == self.codomain

    def rules(self) -> dict:
        return {self.domain.letters[a]: self.codomain.format(img)
                for a, img in enumerate(self.images)}

    def __call__(self, word: WordLike) -> Word:
        return apply(self, word)

    def __str__(self):
        return ", ".join(f"{k}->{v}" for k, v in self.rules().items())

    # packed numpy form used by the kernels
    @cached_property
    def lengths(self) -> np.ndarray:
        return np.array([len(img) for img in self.images], dtype=np.int64)

    @cached_property
    def _starts(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.lengths)[:-1])).astype(np.int64)

    @cached_property
    def _flat(self) -> np.ndarray:
        return np.array([x for img in self.images for x in img], dtype=K.LETTER_DTYPE)


def apply_array(sigma: Substitution, word: np.ndarray, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Image of a letter array; raises BudgetExceeded above ``budget`` letters."""
    word = K.as_letters(word)
    if word.size and int(sigma.lengths[word].sum()) > budget:
        raise BudgetExceeded(f"image would exceed {budget} letters")
    return K.expand(word, sigma._starts, sigma.lengths, sigma._flat)


def iterate_array(sigma: Substitution, word, n: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """sigma^n(word) as a letter array."""
    out = K.as_letters(word)
    for _ in range(n):
        out = apply_array(sigma, out, budget)
    return out


def apply(sigma: Substitution, word: WordLike) -> Word:
    """Image of a word: concatenation of the images of its letters."""
    w = sigma.domain.parse(word) if isinstance(word, str) else tuple(word)
    _check_indices(w, sigma.domain.d)
    out = []
    for x in w:
        out.extend(sigma.images[x])
    return tuple(out)


def compose(sigma: Substitution, tau: Substitution) -> Substitution:
    """The substitution ``sigma o tau`` (first tau, then sigma)."""
    if tau.codomain != sigma.domain:
        raise AlphabetMismatch("codomain of the inner substitution must be the outer domain")
    return Substitution(tau.domain, sigma.codomain, tuple(apply(sigma, img) for img in tau.images))


def power(sigma: Substitution, n: int, budget: int = DEFAULT_BUDGET) -> Substitution:
    """n-fold composition; ``power(sigma, 0)`` is the identity."""
    if not sigma.is_endomorphism:
        raise AlphabetMismatch("power needs domain == codomain")
    if n < 0:
        raise ValueError("n must be non-negative")
    images = []
    for a in range(sigma.domain.d):
        images.append(tuple(iterate_array(sigma, [a], n, budget).tolist()))
    return Substitution(sigma.domain, sigma.domain, tuple(images))


def count_occurrences(word, pattern) -> int:
    """Number of (possibly overlapping) occurrences of ``pattern`` in ``word``."""
    p = K.as_letters(pattern)
    if p.size == 0:
        raise EmptyPattern("pattern must be non-empty")
    return int(K.count_pattern(K.as_letters(word), p))


def count_vector(word, d: int) -> np.ndarray:
    out = np.zeros(d, dtype=object)
    for x in word:
        out[x] += 1
    return out


def incidence_matrix(sigma: Substitution) -> np.ndarray:
    """Entry (a', a) is the number of a' in sigma(a)."""
    M = np.zeros((sigma.codomain.d, sigma.domain.d), dtype=object)
    for a, img in enumerate(sigma.images):
        for x in img:
            M[x, a] += 1
    return M


def prefix_matrix(sigma: Substitution) -> np.ndarray:
    """Entry (x, y) is 1 iff x is the first letter of sigma(y)."""
    P = np.zeros((sigma.codomain.d, sigma.domain.d), dtype=object)
    for y, img in enumerate(sigma.images):
        P[img[0], y] = 1
    return P


def suffix_matrix(sigma: Substitution) -> np.ndarray:
    """Entry (x, y) is 1 iff x is the last letter of sigma(y)."""
    S = np.zeros((sigma.codomain.d, sigma.domain.d), dtype=object)
    for y, img in enumerate(sigma.images):
        S[img[-1], y] = 1
    return S


# ---------------------------------------------------------------------------
# letter graph
# ---------------------------------------------------------------------------

def reachability(adj: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a boolean adjacency matrix, R[u, v] = u ->* v."""
    n = adj.shape[0]
    R = (np.asarray(adj, dtype=bool) | np.eye(n, dtype=bool)).astype(np.int64)
    steps = 1
    while steps < n:
        R = ((R @ R) > 0).astype(np.int64)
        steps *= 2
    return R.astype(bool)


def letter_graph(M: np.ndarray) -> np.ndarray:
    """adj[a, a'] is True iff M[a', a] > 0, i.e. a' occurs in the image of a."""
    return (np.asarray(M) > 0).T.astype(bool)


def strong_components(adj: np.ndarray):
    """(number of components, label per vertex) of a directed graph."""
    n, labels = connected_components(np.asarray(adj, dtype=np.int8), directed=True,
                                      connection="strong")
    return n, labels


def growing_letters(sigma: Substitution) -> np.ndarray:
    """Boolean mask of letters a with |sigma^n(a)| -> infinity.

    A letter grows iff it reaches a directed cycle of the letter graph that
    passes through some letter u with |sigma(u)| >= 2.
    """
    if not sigma.is_endomorphism:
        raise AlphabetMismatch("growth is defined for endomorphisms only")
    adj = letter_graph(incidence_matrix(sigma))
    d = adj.shape[0]
    _, labels = strong_components(adj)
    on_cycle = np.array([adj[u, u] or np.count_nonzero(labels == labels[u]) > 1
                         for u in range(d)])
    hot = on_cycle & (sigma.lengths >= 2)
    R = reachability(adj)
    return R[:, hot].any(axis=1) if hot.any() else np.zeros(d, dtype=bool)


def is_everywhere_growing(sigma: Substitution) -> bool:
    return bool(growing_letters(sigma).all())


def require_everywhere_growing(sigma: Substitution) -> None:
    if not sigma.is_endomorphism:
        raise AlphabetMismatch("substitution must have domain == codomain")
    if not is_everywhere_growing(sigma):
        bad = [sigma.domain.letters[i] for i, g in enumerate(growing_letters(sigma)) if not g]
        raise EverywhereGrowingRequired(f"letters with bounded images: {bad}")


def saturated_lengths(sigma: Substitution, n: int, cap: int = 10 ** 9) -> np.ndarray:
    """|sigma^n(a)| for each letter, saturating at ``cap`` (cross-check for growth)."""
    L = np.ones(sigma.domain.d, dtype=object)
    Mt = incidence_matrix(sigma).T
    for _ in range(n):
        L = np.minimum(Mt @ L, cap)
    return L


def is_primitive(M) -> bool:
    """Some power M^k with 1 <= k <= (d-1)^2 + 1 is entrywise positive (Wielandt)."""
    B = (np.asarray(M) > 0).astype(np.int64)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("square matrix required")
    d = B.shape[0]
    P = B.copy()
    for _ in range((d - 1) ** 2 + 1):
        if P.all():
            return True
        P = ((P @ B) > 0).astype(np.int64)
    return False


def image_lengths(sigma: Substitution, n: int) -> np.ndarray:
    """Exact |sigma^n(a)| for each letter."""
    L = np.ones(sigma.domain.d, dtype=object)
    Mt = incidence_matrix(sigma).T
    for _ in range(n):
        L = Mt @ L
    return L


def language_factors(sigma: Substitution, length: int, depth: int,
                     budget: int = DEFAULT_BUDGET) -> frozenset:
    """Length-``length`` factors of sigma^depth(a) over all letters a.

    Finite depth only approximates the language; choose ``depth`` so that all
    images have at least ``2 * length`` letters.
    """
    require_everywhere_growing(sigma)
    if length < 1:
        raise ValueError("length must be positive")
    found = set()
    for a in range(sigma.domain.d):
        text = iterate_array(sigma, [a], depth, budget)
        if text.size < length:
            continue
        windows = np.lib.stride_tricks.sliding_window_view(text, length)
        found.update(map(tuple, np.unique(windows, axis=0).tolist()))
    return frozenset(found)
