"""Ergodic probability measures of a substitution subshift and cylinder values.

For an everywhere growing substitution the ergodic invariant probability
measures correspond to the distinguished eigenvectors of the incidence
matrix.  The measure of a cylinder ``[w]`` is the scalar product of the
occurrence vector of ``w`` at any ``(sigma, w)``-large level ``n`` with
``lambda**-n`` times the augmented eigenvector.

Examples
--------
>>> from sadic.words import Alphabet, Substitution
>>> tm = Substitution.from_rules(Alphabet(("a", "b")), {"a": "ab", "b": "ba"})
>>> (mu,) = ergodic_measures(tm)
>>> cylinder_measure(tm, "baabab", mu, exact=True)
Fraction(1, 12)
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels as K
from .errors import LevelTooSmall, WordTooLong
from .matrices import (
    augmented_matrix,
    distinguished_eigenvectors,
    extend_to_augmented,
)
from .words import (
    DEFAULT_BUDGET,
    Substitution,
    count_occurrences,
    incidence_matrix,
    iterate_array,
    power,
    require_everywhere_growing,
)


@dataclass(frozen=True, eq=False)
class ErgodicMeasure:
    """An ergodic invariant probability measure of a substitution subshift.

    Attributes
    ----------
    substitution : Substitution
        The substitution the measure belongs to.
    base : Substitution
        The power ``substitution ** power`` whose eigen-data is stored; equal
        to ``substitution`` unless some stratum is imprimitive.
    eigenvalue : float
        Eigenvalue of the incidence matrix of ``base``.
    letter_vector, augmented_vector : ndarray
        ``mu([x])`` for letters x, then for pairs in lexicographic order.
    exact_letter_vector, exact_augmented_vector : tuple of Fraction or None
        Exact values, available when the eigenvalue is an integer.
    """

    substitution: Substitution
    base: Substitution
    power: int
    eigenvalue: float
    letter_vector: np.ndarray
    augmented_vector: np.ndarray
    support_letters: tuple
    stratum: tuple
    name: str
    exact_eigenvalue: Optional[int] = None
    exact_letter_vector: Optional[tuple] = None
    exact_augmented_vector: Optional[tuple] = None

    @property
    def is_exact(self) -> bool:
        return self.exact_augmented_vector is not None

    @property
    def d(self) -> int:
        return self.substitution.domain.d

    def letter(self, x) -> float:
        return float(self.letter_vector[self.substitution.domain.parse([x])[0]])


@dataclass(frozen=True, eq=False)
class MeasureCombination:
    """Non-negative combination ``sum c_i mu_i`` of ergodic measures."""

    measures: tuple
    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "measures", tuple(self.measures))
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if len(self.measures) != len(self.coefficients):
            raise ValueError("one coefficient per measure required")
        if any(c < 0 for c in self.coefficients):
            raise ValueError("coefficients must be non-negative")

    @classmethod
    def single(cls, mu: ErgodicMeasure) -> "MeasureCombination":
        return cls((mu,), (1,))

    def is_probability(self, tol: float = 1e-12) -> bool:
        return abs(float(sum(self.coefficients)) - 1.0) <= tol

    @property
    def is_exact(self) -> bool:
        return all(m.is_exact for m in self.measures) and all(
            isinstance(c, (int, Fraction)) for c in self.coefficients)


@dataclass(frozen=True)
class OccurrenceVector:
    """Occurrence counts of ``word`` at ``level``, indexed by letters then pairs."""

    word: tuple
    level: int
    coefficients: tuple

    def as_array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=object)

    def letters(self, d: int) -> tuple:
        return self.coefficients[:d]

    def pairs(self, d: int) -> tuple:
        return self.coefficients[d:]


MeasureLike = Union[ErgodicMeasure, MeasureCombination]


def _word(sigma: Substitution, w) -> tuple:
    return sigma.domain.parse(w)


def _measure_name(sigma: Substitution, support) -> str:
    if len(support) == sigma.domain.d:
        return "full"
    return sigma.domain.format(support) if sigma.domain.single_char else "_".join(
        sigma.domain.letters[i] for i in support)


def ergodic_measures(sigma: Substitution) -> list:
    """All ergodic invariant probability measures of the subshift of ``sigma``.

    Ordered by decreasing eigenvalue, then by support.

    Raises
    ------
    EverywhereGrowingRequired
        If some letter has bounded iterated images.
    DegenerateSpectrum
        If two eigenvalues on an accessibility chain cannot be separated.
    """
    require_everywhere_growing(sigma)
    out = []
    for dv in distinguished_eigenvectors(incidence_matrix(sigma)):
        base = sigma if dv.power == 1 else power(sigma, dv.power)
        vplus = extend_to_augmented(base, dv.eigenvalue, dv.vector)
        exact_plus = None
        if dv.exact_vector is not None:
            exact_plus = extend_to_augmented(base, dv.exact_eigenvalue, dv.exact_vector,
                                             exact=True)
            vplus = np.array([float(x) for x in exact_plus])
        out.append(ErgodicMeasure(
            substitution=sigma, base=base, power=dv.power, eigenvalue=dv.eigenvalue,
            letter_vector=np.asarray(dv.vector, dtype=float), augmented_vector=vplus,
            support_letters=dv.support, stratum=dv.stratum,
            name=_measure_name(sigma, dv.support),
            exact_eigenvalue=dv.exact_eigenvalue, exact_letter_vector=dv.exact_vector,
            exact_augmented_vector=exact_plus))
    out.sort(key=lambda m: (-m.eigenvalue, m.support_letters))
    return out


def select_measure(measures: Sequence[ErgodicMeasure], selector: str) -> ErgodicMeasure:
    """Pick a measure by name (``"full"``, support letters) or 1-based index."""
    for m in measures:
        if m.name == selector:
            return m
    if selector.isdigit() and 1 <= int(selector) <= len(measures):
        return measures[int(selector) - 1]
    names = [m.name for m in measures]
    raise KeyError(f"no measure {selector!r}; available: {names} or 1..{len(measures)}")


# ---------------------------------------------------------------------------
# occurrence vectors
# ---------------------------------------------------------------------------

def sigma_w_large(sigma: Substitution, w) -> int:
    """Smallest n with ``|sigma^n(a)| >= |w| - 1`` for every letter a."""
    require_everywhere_growing(sigma)
    k = len(_word(sigma, w))
    Mt = incidence_matrix(sigma).T
    L = np.ones(sigma.domain.d, dtype=object)
    n = 0
    while min(L) < k - 1:
        L = Mt @ L
        n += 1
    return n


@lru_cache(maxsize=64)
def _images(sigma: Substitution, n: int, budget: int) -> tuple:
    return tuple(iterate_array(sigma, [a], n, budget) for a in range(sigma.domain.d))


def _check_level(sigma: Substitution, w: tuple, n: int) -> None:
    nmin = sigma_w_large(sigma, w)
    if n < nmin:
        raise LevelTooSmall(f"level {n} is not large for a word of length {len(w)}; need >= {nmin}")


def occurrence_vector(sigma: Substitution, w, n: int,
                      budget: int = DEFAULT_BUDGET) -> OccurrenceVector:
    """Occurrence vector of ``w`` at level ``n``.

    Letter coordinate x counts ``w`` in ``sigma^n(x)``.  Pair coordinate
    ``x1 x2`` counts the occurrences of ``w`` in ``sigma^n(x1) sigma^n(x2)``
    that meet the boundary between the two blocks.
    """
    w = _word(sigma, w)
    _check_level(sigma, w, n)
    imgs = _images(sigma, n, budget)
    d = sigma.domain.d
    coeffs = [count_occurrences(img, w) for img in imgs]
    k = len(w) - 1
    for x1 in range(d):
        for x2 in range(d):
            if k == 0:
                coeffs.append(0)
                continue
            join = np.concatenate([imgs[x1][-k:], imgs[x2][:k]])
            coeffs.append(count_occurrences(join, w))
    return OccurrenceVector(w, n, tuple(int(c) for c in coeffs))


def occurrence_recursion_check(sigma: Substitution, w, m: int, n: int) -> bool:
    """Exact check of ``v(w)_n = v(w)_m (M+)^(n-m)`` as row vectors."""
    if n < m:
        raise ValueError("need n >= m")
    vm = occurrence_vector(sigma, w, m).as_array()
    vn = occurrence_vector(sigma, w, n).as_array()
    A = augmented_matrix(sigma).entries
    row = vm
    for _ in range(n - m):
        row = row @ A
    return bool(all(int(x) == int(y) for x, y in zip(row, vn)))


# ---------------------------------------------------------------------------
# cylinders
# ---------------------------------------------------------------------------

def _as_combination(combo: MeasureLike) -> MeasureCombination:
    if isinstance(combo, ErgodicMeasure):
        return MeasureCombination.single(combo)
    return combo


def _single_value(mu: ErgodicMeasure, w: tuple, n: Optional[int], exact: bool,
                  budget: int = DEFAULT_BUDGET):
    base = mu.base
    if n is None:
        n = sigma_w_large(base, w)
    ov = occurrence_vector(base, w, n, budget)
    if exact:
        lam = Fraction(mu.exact_eigenvalue)
        return sum((Fraction(c) * x for c, x in zip(ov.coefficients, mu.exact_augmented_vector)),
                   Fraction(0)) / lam ** n
    return float(np.dot(np.array(ov.coefficients, dtype=float), mu.augmented_vector)
                 / mu.eigenvalue ** n)


def cylinder_measure(sigma: Substitution, w, combo: MeasureLike, n: Optional[int] = None,
                     exact: bool = False, budget: int = DEFAULT_BUDGET):
    """Measure of the cylinder ``[w]``.

    Parameters
    ----------
    sigma : Substitution
    w : word
    combo : ErgodicMeasure or MeasureCombination
    n : int, optional
        Level; defaults to the smallest ``(sigma, w)``-large level.  For a
        measure stored for a power of ``sigma`` the level refers to that power.
    exact : bool
        Return a Fraction; needs exact eigen-data and rational coefficients.
    budget : int
        Longest iterate that may be materialized.

    Raises
    ------
    BudgetExceeded
        If the level-``n`` images are longer than ``budget``.
    """
    w = _word(sigma, w)
    c = _as_combination(combo)
    if exact and not c.is_exact:
        raise ValueError("exact evaluation needs rational eigen-data")
    total = Fraction(0) if exact else 0.0
    for coef, mu in zip(c.coefficients, c.measures):
        if coef == 0:
            continue
        if mu.substitution != sigma:
            raise ValueError("measure belongs to a different substitution")
        if n is not None:
            _check_level(mu.base, w, n)
        total += (Fraction(coef) if exact else float(coef)) * _single_value(mu, w, n, exact, budget)
    return total


def cylinder_measure_short(w, measure: ErgodicMeasure, exact: bool = False):
    """Read ``mu([w])`` for ``|w| <= 2`` directly off the augmented vector."""
    w = measure.substitution.domain.parse(w)
    d = measure.d
    if len(w) > 2:
        raise WordTooLong("only words of length 1 or 2")
    if len(w) == 0:
        return Fraction(1) if exact else 1.0
    idx = w[0] if len(w) == 1 else d + w[0] * d + w[1]
    if exact:
        if not measure.is_exact:
            raise ValueError("exact evaluation needs rational eigen-data")
        return measure.exact_augmented_vector[idx]
    return float(measure.augmented_vector[idx])


def occurrence_table(sigma: Substitution, length: int, n: int,
                     budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Occurrence vectors of all words of a given length, one row per word.

    Rows follow the lexicographic order of words; ``n`` must be large for
    words of this length.
    """
    d = sigma.domain.d
    if n < sigma_w_large(sigma, (0,) * length):
        raise LevelTooSmall(f"level {n} is too small for length {length}")
    imgs = _images(sigma, n, budget)
    rows = np.zeros((d ** length, d + d * d), dtype=np.int64)
    for a, img in enumerate(imgs):
        rows[:, a] = K.factor_histogram(img, length, d)
    k = length - 1
    if k:
        for x1 in range(d):
            for x2 in range(d):
                join = np.ascontiguousarray(np.concatenate([imgs[x1][-k:], imgs[x2][:k]]))
                rows[:, d + x1 * d + x2] = K.factor_histogram(join, length, d)
    return rows


def cylinder_table(sigma: Substitution, L: int, combo: MeasureLike, exact: bool = False) -> dict:
    """``mu([w])`` for every word with ``1 <= |w| <= L``, zero values included."""
    if L < 1:
        raise ValueError("L must be positive")
    c = _as_combination(combo)
    if exact and not c.is_exact:
        raise ValueError("exact evaluation needs rational eigen-data")
    out = {}
    for length in range(1, L + 1):
        words = sigma.domain.words(length)
        acc = [Fraction(0) if exact else 0.0] * len(words)
        for coef, mu in zip(c.coefficients, c.measures):
            if coef == 0:
                continue
            n = sigma_w_large(mu.base, (0,) * length)
            rows = occurrence_table(mu.base, length, n)
            if exact:
                vec = np.array(mu.exact_augmented_vector, dtype=object)
                vals = rows.astype(object) @ vec
                scale = Fraction(coef) / Fraction(mu.exact_eigenvalue) ** n
                acc = [a + scale * v for a, v in zip(acc, vals)]
            else:
                vals = rows.astype(float) @ mu.augmented_vector / mu.eigenvalue ** n
                acc = [a + float(coef) * float(v) for a, v in zip(acc, vals)]
        out.update(zip(words, acc))
    return out
