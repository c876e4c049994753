"""Brute-force checks that do not rely on the eigenvector formula.

Frequencies are read off a long materialized iterate ``sigma^N(a)``.  The
consistency suite checks the shift-invariance identities of the computed
cylinder values.  Both use only public functions of the package.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import _kernels as K
from .errors import LevelTooSmall
from .measures import cylinder_measure, cylinder_table, ergodic_measures
from .words import DEFAULT_BUDGET, Substitution, count_occurrences, iterate_array, require_everywhere_growing


@dataclass(frozen=True)
class FrequencyEstimate:
    """Sliding-window frequency of ``word`` in ``sigma^N(seed)``."""

    word: tuple
    seed: int
    N: int
    count: int
    positions: int

    @property
    def estimate(self) -> float:
        return self.count / self.positions


def letter_frequency(sigma: Substitution, a, w, N: int,
                     budget: int = DEFAULT_BUDGET) -> FrequencyEstimate:
    """Count ``w`` in ``sigma^N(a)``; the denominator is ``|sigma^N(a)| - |w| + 1``.

    Raises
    ------
    BudgetExceeded
        If the iterate is longer than ``budget``.
    LevelTooSmall
        If the iterate is shorter than ``w``.
    """
    seed = sigma.domain.parse([a])[0] if isinstance(a, str) else int(a)
    w = sigma.domain.parse(w)
    text = iterate_array(sigma, [seed], N, budget)
    positions = text.size - len(w) + 1
    if positions < 1:
        raise LevelTooSmall(f"sigma^{N}({sigma.domain.letters[seed]}) is shorter than the word")
    return FrequencyEstimate(w, seed, N, count_occurrences(text, w), positions)


def frequency_table(sigma: Substitution, a, L: int, N: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Frequencies of all words of length ``1..L`` in one pass per length."""
    seed = sigma.domain.parse([a])[0] if isinstance(a, str) else int(a)
    text = iterate_array(sigma, [seed], N, budget)
    d = sigma.domain.d
    out = {}
    for length in range(1, L + 1):
        positions = text.size - length + 1
        if positions < 1:
            raise LevelTooSmall("iterate shorter than the words")
        hist = K.factor_histogram(text, length, d)
        for word, c in zip(sigma.domain.words(length), hist):
            out[word] = FrequencyEstimate(word, seed, N, int(c), positions)
    return out


@dataclass
class ConsistencyReport:
    """Worst violations of ``sum_x mu[wx] = mu[w] = sum_x mu[xw]`` and of normalization."""

    L: int
    tol: float
    max_violation: float = 0.0
    normalization_error: float = 0.0
    per_measure: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol and self.normalization_error <= 1e-12

    def to_json(self) -> str:
        return json.dumps({"L": self.L, "tol": self.tol, "max_violation": self.max_violation,
                           "normalization_error": self.normalization_error,
                           "per_measure": self.per_measure, "passed": self.passed})


def consistency_suite(sigma: Substitution, L: int, tol: float = 1e-9,
                      measures: Optional[Sequence] = None) -> ConsistencyReport:
    """Kolmogorov consistency of every ergodic measure for words up to length ``L``."""
    require_everywhere_growing(sigma)
    measures = ergodic_measures(sigma) if measures is None else measures
    d = sigma.domain.d
    rep = ConsistencyReport(L, tol)
    for mu in measures:
        table = cylinder_table(sigma, L, mu)
        worst = 0.0
        for w, val in table.items():
            if len(w) > L - 1:
                continue
            right = sum(table[w + (x,)] for x in range(d))
            left = sum(table[(x,) + w] for x in range(d))
            worst = max(worst, abs(right - val), abs(left - val))
        norm = abs(sum(table[(x,)] for x in range(d)) - 1.0)
        rep.per_measure[mu.name] = {"max_violation": worst, "normalization_error": norm}
        rep.max_violation = max(rep.max_violation, worst)
        rep.normalization_error = max(rep.normalization_error, norm)
    return rep


@dataclass
class OracleReport:
    """Per-word comparison of a frequency estimate with the cylinder formula."""

    N: int
    tol: float
    measure: str
    seed: str
    rows: list = field(default_factory=list)

    @property
    def max_delta(self) -> float:
        return max((r["delta"] for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_delta <= self.tol

    def to_json(self) -> str:
        return json.dumps({"N": self.N, "tol": self.tol, "measure": self.measure,
                           "seed": self.seed, "rows": self.rows, "passed": self.passed})


def oracle_vs_formula(sigma: Substitution, words: Sequence, N: int, tol: float,
                      measure=None, seed=None, budget: int = DEFAULT_BUDGET) -> OracleReport:
    """Compare formula values with frequencies in ``sigma^N(seed)``.

    By default the measure with the largest eigenvalue is used and the seed
    is the first letter of its stratum, so that the frequencies are governed
    by that measure.
    """
    if measure is None:
        measure = ergodic_measures(sigma)[0]
    if seed is None:
        seed = measure.stratum[0]
    seed_idx = sigma.domain.parse([seed])[0] if isinstance(seed, str) else int(seed)
    text = iterate_array(sigma, [seed_idx], N, budget)
    rep = OracleReport(N, tol, measure.name, sigma.domain.letters[seed_idx])
    for w in words:
        w = sigma.domain.parse(w)
        positions = text.size - len(w) + 1
        if positions < 1:
            raise LevelTooSmall("iterate shorter than the word")
        est = count_occurrences(text, w) / positions
        val = float(cylinder_measure(sigma, w, measure))
        rep.rows.append({"word": sigma.domain.format(w), "formula": val, "estimate": est,
                         "delta": abs(est - val), "N": N})
    return rep
