"""Directive sequences, compatible vector towers and truncated limit formulas.

A directive sequence is a sequence of substitutions ``sigma_n`` from level
``n + 1`` words to level ``n`` words.  Terms are produced lazily by a rule and
cached.  Each term exposes its combinatorics at several levels of fidelity
(support pattern, projective matrix, exact incidence matrix, explicit
substitution) so that sequences whose words are astronomically long can still
be analysed through their matrices.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import nnls

from .errors import (
    AlphabetMismatch,
    CompatibilityViolation,
    HorizonExceeded,
    LevelTooSmall,
)
from .matrices import Cone, augmented_matrix, extremal_rays, unit_columns
from .words import (
    DEFAULT_BUDGET,
    Alphabet,
    BudgetExceeded,
    Substitution,
    apply_array,
    count_occurrences,
    incidence_matrix,
)


# ---------------------------------------------------------------------------
# terms
# ---------------------------------------------------------------------------

class Term:
    """One substitution of a directive sequence, possibly known only through matrices.

    Subclasses provide ``domain`` and ``codomain`` alphabets and override the
    accessors they can support.
    """

    domain: Alphabet
    codomain: Alphabet

    def substitution(self, budget: int = DEFAULT_BUDGET) -> Substitution:
        raise BudgetExceeded(f"{type(self).__name__} cannot be materialized")

    def incidence(self) -> np.ndarray:
        return incidence_matrix(self.substitution())

    def projective(self) -> np.ndarray:
        """Float matrix proportional to the incidence matrix, entries at most 1."""
        M = self.incidence()
        top = int(max(M.flat))
        return np.array([[float(Fraction(int(x), top)) for x in row] for row in M.tolist()])

    def support(self) -> np.ndarray:
        return np.asarray(self.incidence() > 0, dtype=bool)


class SubstitutionTerm(Term):
    def __init__(self, sigma: Substitution):
        self.sigma = sigma
        self.domain = sigma.domain
        self.codomain = sigma.codomain

    def substitution(self, budget: int = DEFAULT_BUDGET) -> Substitution:
        return self.sigma

    def incidence(self) -> np.ndarray:
        return incidence_matrix(self.sigma)

    def __repr__(self):
        return f"SubstitutionTerm({self.sigma})"


def _as_term(x) -> Term:
    return x if isinstance(x, Term) else SubstitutionTerm(x)


# ---------------------------------------------------------------------------
# directive sequences
# ---------------------------------------------------------------------------

class DirectiveSequence:
    """Lazily generated sequence of terms ``sigma_n : A_{n+1}* -> A_n*``.

    Parameters
    ----------
    rule : callable
        ``rule(n)`` returns the n-th term (a Term or a Substitution).
    horizon : int, optional
        Number of available terms; None means unbounded.
    description : dict, optional
        Finite description (kind and parameters) for reporting.
    """

    def __init__(self, rule: Callable[[int], object], horizon: Optional[int] = None,
                 description: Optional[dict] = None):
        self._rule = rule
        self.horizon = horizon
        self.description = dict(description or {})
        self._cache: list = []
        self._lock = threading.Lock()

    @classmethod
    def stationary(cls, sigma: Substitution, horizon: Optional[int] = None) -> "DirectiveSequence":
        if not sigma.is_endomorphism:
            raise AlphabetMismatch("a stationary sequence needs an endomorphism")
        term = SubstitutionTerm(sigma)
        return cls(lambda n: term, horizon, {"kind": "stationary", "substitution": sigma.rules()})

    @classmethod
    def explicit(cls, terms: Sequence) -> "DirectiveSequence":
        terms = [_as_term(t) for t in terms]
        for n in range(len(terms) - 1):
            if terms[n].domain != terms[n + 1].codomain:
                raise AlphabetMismatch(f"term {n} domain differs from term {n + 1} codomain")
        return cls(lambda n: terms[n], len(terms), {"kind": "explicit", "length": len(terms)})

    def _check(self, n: int) -> None:
        if n < 0:
            raise ValueError("levels are non-negative")
        if self.horizon is not None and n >= self.horizon:
            raise HorizonExceeded(f"term {n} beyond horizon {self.horizon}")

    def term(self, n: int) -> Term:
        self._check(n)
        if n < len(self._cache):
            return self._cache[n]
        with self._lock:
            while len(self._cache) <= n:
                self._cache.append(_as_term(self._rule(len(self._cache))))
        return self._cache[n]

    def substitution(self, n: int, budget: int = DEFAULT_BUDGET) -> Substitution:
        return self.term(n).substitution(budget)

    def alphabet(self, n: int) -> Alphabet:
        """Level alphabet ``A_n``."""
        if n == 0 or self.horizon is None or n < self.horizon:
            return self.term(n).codomain
        return self.term(n - 1).domain

    def incidence(self, n: int) -> np.ndarray:
        return self.term(n).incidence()


def _compose_fast(outer: Substitution, inner: Substitution, budget: int) -> Substitution:
    """``outer o inner`` computed on letter arrays."""
    if inner.codomain != outer.domain:
        raise AlphabetMismatch("codomain of the inner substitution must be the outer domain")
    total = 0
    images = []
    for img in inner.images:
        arr = apply_array(outer, np.array(img), budget - total)
        total += arr.size
        images.append(tuple(arr.tolist()))
    return Substitution(inner.domain, outer.codomain, tuple(images))


def telescope(seq: DirectiveSequence, m: int, n: int, budget: int = DEFAULT_BUDGET) -> Substitution:
    """The composition ``sigma_m o ... o sigma_{n-1}`` (identity when m == n)."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    if seq.horizon is not None and n > seq.horizon:
        raise HorizonExceeded(f"level {n} beyond horizon {seq.horizon}")
    out = Substitution.identity(seq.alphabet(m))
    for k in range(m, n):
        out = _compose_fast(out, seq.substitution(k, budget), budget)
    return out


def telescope_incidence(seq: DirectiveSequence, m: int, n: int) -> np.ndarray:
    """Exact ``M_m M_{m+1} ... M_{n-1}``."""
    d = seq.alphabet(m).d
    P = np.eye(d, dtype=int).astype(object)
    for k in range(m, n):
        P = P @ seq.incidence(k)
    return P


# ---------------------------------------------------------------------------
# weak primitivity and cones
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeakPrimitivityReport:
    """Witness level n for every start m, or None where none was found."""

    window: int
    horizon: int
    witnesses: dict

    @property
    def ok(self) -> bool:
        return all(v is not None for v in self.witnesses.values())

    def __bool__(self):
        return self.ok


def is_weakly_primitive(seq: DirectiveSequence, window: int, horizon: int) -> WeakPrimitivityReport:
    """Check that every ``M_[m, n)`` with ``n <= m + window`` is eventually positive.

    For each ``m <= horizon - window`` the smallest n in ``(m, m + window]``
    with a positive product is recorded.  Only support patterns are
    multiplied, so arbitrarily large entries are harmless.
    """
    if window < 1 or horizon < window:
        raise ValueError("need 1 <= window <= horizon")
    if seq.horizon is not None and horizon > seq.horizon:
        raise HorizonExceeded(f"horizon {horizon} beyond {seq.horizon}")
    supports = [seq.term(k).support().astype(np.int64) for k in range(horizon)]
    witnesses = {}
    for m in range(horizon - window + 1):
        P = np.eye(supports[m].shape[0], dtype=np.int64)
        found = None
        for n in range(m + 1, m + window + 1):
            P = ((P @ supports[n - 1]) > 0).astype(np.int64)
            if P.all():
                found = n
                break
        witnesses[m] = found
    return WeakPrimitivityReport(window, horizon, witnesses)


def _projective_product(seq: DirectiveSequence, m: int, n: int) -> np.ndarray:
    """Column-normalized float product ``M_m ... M_{n-1}``; same cone as the exact one."""
    d = seq.alphabet(n).d
    P = np.eye(d)
    for k in range(n - 1, m - 1, -1):
        P = seq.term(k).projective() @ P
        s = P.sum(axis=0)
        s[s == 0] = 1.0
        P = P / s
    return P


def cone_sequence_dim(seq: DirectiveSequence, depth: int, tol: float = 1e-6):
    """Cone ``M_[0, depth)`` of the standard cone and its numerical dimension.

    Returns
    -------
    (int, Cone)
        Number of rays independent at singular-value threshold
        ``tol * s_max``, and the reduced cone.
    """
    if seq.horizon is not None and depth > seq.horizon:
        raise HorizonExceeded(f"depth {depth} beyond horizon {seq.horizon}")
    sizes = {seq.alphabet(k).d for k in range(depth + 1)}
    if len(sizes) != 1:
        raise AlphabetMismatch("all level alphabets must have the same size")
    P = _projective_product(seq, 0, depth)
    cone = Cone(extremal_rays(unit_columns(P)))
    return cone.dimension(tol), cone


def nested_cone_check(seq: DirectiveSequence, depth: int, tol: float = 1e-8) -> list:
    """For n < depth: is ``M_[0, n+1)`` (cone) inside ``M_[0, n)`` (cone)?"""
    out = []
    prev = _projective_product(seq, 0, 0)
    for n in range(depth):
        cur = _projective_product(seq, 0, n + 1)
        ok = True
        for col in cur.T:
            nc = np.linalg.norm(col)
            if nc == 0:
                continue
            _, res = nnls(prev, col / nc)
            ok &= res <= tol
        out.append(bool(ok))
        prev = cur
    return out


# ---------------------------------------------------------------------------
# vector towers
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VectorTowerPrefix:
    """Vectors ``v_0, ..., v_K`` with ``v_n = M_n v_{n+1}``.

    ``rule == "stationary"`` extends beyond K by ``v_n = lam**-n * v``.
    """

    vectors: tuple
    rule: str = "explicit"
    eigenvalue: Optional[float] = None
    base: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def depth(self) -> int:
        return len(self.vectors) - 1

    @classmethod
    def stationary(cls, v, lam: float, depth: int) -> "VectorTowerPrefix":
        v = np.asarray(v, dtype=float)
        return cls(tuple(v * lam ** (-n) for n in range(depth + 1)), "stationary", float(lam), v)

    @classmethod
    def explicit(cls, vectors) -> "VectorTowerPrefix":
        return cls(tuple(np.asarray(x, dtype=float) for x in vectors), "explicit")

    @classmethod
    def from_top(cls, seq: DirectiveSequence, top, level: int) -> "VectorTowerPrefix":
        """Tower ending in ``top`` at ``level``, derived downward by ``v_n = M_n v_{n+1}``."""
        return tower_from_top(seq, top, level)

    def vector(self, n: int) -> np.ndarray:
        if n <= self.depth:
            return self.vectors[n]
        if self.rule == "stationary":
            return self.base * self.eigenvalue ** (-n)
        raise HorizonExceeded(f"tower known up to level {self.depth}")

    def scaled(self, c: float) -> "VectorTowerPrefix":
        base = None if self.base is None else self.base * c
        return VectorTowerPrefix(tuple(v * c for v in self.vectors), self.rule, self.eigenvalue, base)

    def check(self, seq: DirectiveSequence, upto: Optional[int] = None, tol: float = 1e-12) -> None:
        """Raise CompatibilityViolation unless ``v_n = M_n v_{n+1}`` up to ``upto``."""
        upto = self.depth if upto is None else upto
        for n in range(upto):
            v, w = self.vector(n), self.vector(n + 1)
            M = seq.term(n).incidence()
            Mf = np.array(M.tolist(), dtype=float)
            if Mf.shape[1] != w.size:
                raise CompatibilityViolation(f"vector {n + 1} has the wrong length")
            err = np.max(np.abs(Mf @ w - v))
            if err > tol * max(1.0, np.max(np.abs(v))):
                raise CompatibilityViolation(f"v_{n} != M_{n} v_{n + 1} (error {err:.3e})")


def tower_from_top(seq: DirectiveSequence, top, level: int) -> VectorTowerPrefix:
    """Explicit tower with ``v_level = top`` and ``v_n = M_n v_{n+1}`` below."""
    vecs = [np.asarray(top, dtype=float)]
    for n in range(level - 1, -1, -1):
        M = np.array(seq.term(n).incidence().tolist(), dtype=float)
        vecs.append(M @ vecs[-1])
    return VectorTowerPrefix.explicit(vecs[::-1])


# ---------------------------------------------------------------------------
# occurrence data along a directive sequence
# ---------------------------------------------------------------------------

def _occurrences_from_images(images, w, d) -> np.ndarray:
    """Letter counts and straddling pair counts of w in the given block images."""
    k = len(w) - 1
    row = [count_occurrences(img, w) for img in images]
    for x1 in range(d):
        for x2 in range(d):
            if k == 0:
                row.append(0)
            else:
                join = np.concatenate([images[x1][-k:], images[x2][:k]])
                row.append(count_occurrences(join, w))
    return np.array(row, dtype=object)


def telescoped_occurrences(seq: DirectiveSequence, w, start: int, stop: int,
                           budget: int = DEFAULT_BUDGET):
    """Yield ``(k, u_k)`` for ``k = start .. stop``.

    ``u_k`` holds ``|sigma_[start,k)(b)|_w`` for letters b of ``A_k`` and the
    straddling counts for pairs.  Words are materialized until every block has
    length ``|w| - 1``; from then on ``u_{k+1} = u_k M+_k``.
    """
    w = tuple(w)
    if not w:
        raise ValueError("empty word")
    images = [np.array([a]) for a in range(seq.alphabet(start).d)]
    large = False
    u = None
    for k in range(start, stop + 1):
        if not large:
            d = len(images)
            if min(img.size for img in images) >= len(w) - 1:
                large = True
            u = _occurrences_from_images(images, w, d)
        yield k, u
        if k == stop:
            break
        if large:
            u = u @ augmented_matrix(seq.substitution(k, budget)).entries
        else:
            sk = seq.substitution(k, budget)
            # images of sigma_[start,k+1)(b) = sigma_[start,k)(sigma_k(b))
            new = []
            total = 0
            for img in sk.images:
                parts = [images[x] for x in img]
                total += sum(p.size for p in parts)
                if total > budget:
                    raise BudgetExceeded(f"telescoped images exceed {budget} letters")
                new.append(np.concatenate(parts))
            images = new


@dataclass(frozen=True)
class PartialSums:
    """Truncations of a monotone limit; ``increment`` is the last step."""

    value: float
    partial_sums: tuple
    increment: float
    monotone: bool

    def __iter__(self):
        return iter((self.value, list(self.partial_sums)))


def _monotone(seq_vals, rel=1e-12) -> bool:
    return all(b >= a - rel * max(1.0, abs(a)) for a, b in zip(seq_vals, seq_vals[1:]))


def approx_measure_sum(seq: DirectiveSequence, tower: VectorTowerPrefix, w, depth: int,
                       budget: int = DEFAULT_BUDGET) -> PartialSums:
    """Partial sums ``sum_a v_n(a) |sigma_[0,n)(a)|_w`` for ``n = 0 .. depth``."""
    w = seq.alphabet(0).parse(w)
    tower.check(seq, upto=min(depth, tower.depth) if tower.rule == "explicit" else depth)
    sums = []
    for k, u in telescoped_occurrences(seq, w, 0, depth, budget):
        v = tower.vector(k)
        d = v.size
        sums.append(float(np.dot(np.array(u[:d], dtype=float), v)))
    inc = sums[-1] - sums[-2] if len(sums) > 1 else sums[-1]
    return PartialSums(sums[-1], tuple(sums), inc, _monotone(sums))


@dataclass(frozen=True, eq=False)
class WeightTable:
    """Truncated local weights at one level.

    ``weights[a, a']`` is the partial sum at ``depth``; ``previous`` holds the
    partial sums at ``depth - 1`` (a lower bound certificate).
    """

    level: int
    depth: int
    alphabet: Alphabet
    weights: np.ndarray
    previous: np.ndarray
    monotone: bool

    def weight(self, a, b) -> float:
        i, j = self.alphabet.parse([a, b])
        return float(self.weights[i, j])

    @property
    def gap(self) -> float:
        return float(np.max(self.weights - self.previous))


def _augmented_products(seq: DirectiveSequence, n: int, depth: int, budget: int):
    """Yield ``(k, M+_[n,k))`` for ``k = n .. depth`` as exact integer matrices."""
    d = seq.alphabet(n).d
    R = np.eye(d + d * d, dtype=int).astype(object)
    for k in range(n, depth + 1):
        yield k, R
        if k < depth:
            R = R @ augmented_matrix(seq.substitution(k, budget)).entries


def local_weights(seq: DirectiveSequence, tower: VectorTowerPrefix, n: int, depth: int,
                  budget: int = DEFAULT_BUDGET) -> WeightTable:
    """Weights ``omega^n[a, a'] ~ sum_b v_k(b) |sigma_[n,k)(b)|_{aa'}`` at ``k = depth``."""
    if depth <= n:
        raise ValueError("depth must exceed the level")
    A = seq.alphabet(n)
    d = A.d
    history = []
    for k, R in _augmented_products(seq, n, depth, budget):
        if k < depth - 1:
            continue
        v = tower.vector(k)
        dk = v.size
        block = np.array(R[d:, :dk].tolist(), dtype=float)
        history.append((block @ v).reshape(d, d))
    prev, cur = history[-2], history[-1]
    monotone = bool(np.all(cur >= prev - 1e-12 * max(1.0, float(np.max(np.abs(cur))))))
    return WeightTable(n, depth, A, cur, prev, monotone)


def weight_transition_check(seq: DirectiveSequence, tower: VectorTowerPrefix, n: int, depth: int,
                            tol: float = 1e-8, budget: int = DEFAULT_BUDGET) -> bool:
    """Check the transition identity between the weights at levels ``n - 1`` and ``n``.

    ``omega^{n-1}[c, c']`` must equal the sum of ``omega^n[a, a']`` over pairs
    whose image transition (last letter of the image of a, first letter of the
    image of a') is ``(c, c')``, plus ``sum_a v_n(a) |sigma_{n-1}(a)|_{cc'}``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    lower = local_weights(seq, tower, n - 1, depth, budget).weights
    upper = local_weights(seq, tower, n, depth, budget).weights
    sigma = seq.substitution(n - 1, budget)
    dc, da = sigma.codomain.d, sigma.domain.d
    rhs = np.zeros((dc, dc))
    for a in range(da):
        for b in range(da):
            rhs[sigma.images[a][-1], sigma.images[b][0]] += upper[a, b]
    v = tower.vector(n)
    for a, img in enumerate(sigma.images):
        for x, y in zip(img, img[1:]):
            rhs[x, y] += v[a]
    err = float(np.max(np.abs(lower - rhs)))
    return err <= tol * max(1.0, float(np.max(np.abs(lower))))


def sadic_cylinder_measure(seq: DirectiveSequence, tower: VectorTowerPrefix, w, n: int, depth: int,
                           budget: int = DEFAULT_BUDGET) -> float:
    """Cylinder value from level-n data: interior occurrences plus weighted straddles.

    Raises
    ------
    LevelTooSmall
        If some ``|sigma_[0,n)(a)|`` is shorter than ``|w| - 1``.
    """
    w = seq.alphabet(0).parse(w)
    T = telescope(seq, 0, n, budget)
    if min(len(img) for img in T.images) < len(w) - 1:
        raise LevelTooSmall(f"level {n} is too small for a word of length {len(w)}")
    d = T.domain.d
    u = _occurrences_from_images([np.array(img) for img in T.images], w, d)
    v = tower.vector(n)
    interior = float(np.dot(np.array(u[:d], dtype=float), v))
    if len(w) == 1:
        return interior
    omega = local_weights(seq, tower, n, depth, budget).weights.reshape(-1)
    return interior + float(np.dot(np.array(u[d:], dtype=float), omega))
