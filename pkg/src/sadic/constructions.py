"""Directive sequences over d letters with d distinct ergodic measures.

Construction A uses substitutions ``a_k -> a_k^l a_1 ... a_d`` with a growing
schedule ``l(n)``.  Construction B replaces them by products of the four
substitutions ``rho_1, theta_1, tau_1, pi`` whose incidence matrices are
close to the identity on the projective level.

Construction B exponents grow doubly exponentially (``3**q`` with q of order
``2**n``), so its terms carry their data symbolically: exact integers and
words are produced only while they fit in the budget, and the projective
matrix is always available as floating point.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional

import mpmath
import numpy as np
from scipy.optimize import nnls

from .directive import DirectiveSequence, SubstitutionTerm, Term, _compose_fast
from .errors import BudgetExceeded
from .words import DEFAULT_BUDGET, Alphabet, Substitution

#: q above which 3**q is not expanded into an integer
EXACT_Q_CAP = 20_000

GENERATORS = ("rho1", "theta1", "tau1", "pi")


def standard_alphabet(d: int) -> Alphabet:
    if d < 1:
        raise ValueError("d must be positive")
    if d <= 26:
        return Alphabet(tuple(string.ascii_lowercase[:d]))
    return Alphabet(tuple(f"a{i}" for i in range(1, d + 1)))


# ---------------------------------------------------------------------------
# construction A
# ---------------------------------------------------------------------------

def schedule_length(d: int, n: int) -> int:
    """Smallest l with ``(1 + d/l) < 2**(2**-n)`` and ``1/l < 2**-(n+1)``."""
    with mpmath.workdps(40 + n):
        t = d / (mpmath.power(2, mpmath.power(2, -n)) - 1)
        ell = int(mpmath.floor(t)) + 1
    return max(ell, 2 ** (n + 1) + 1)


def build_epsilon_schedule(d: int, N: int) -> list:
    """``[(eps_n, l(n)) for n = 1..N]`` with ``eps_n = 1 / l(n)`` as Fractions."""
    if d < 1 or N < 1:
        raise ValueError("need d >= 1 and N >= 1")
    return [(Fraction(1, ell), ell) for ell in (schedule_length(d, n) for n in range(1, N + 1))]


def accumulated_coefficients(eps, d: int) -> list:
    """``K_q = sum_{s<=q} L_s eps_s`` with ``L_s = prod_{t<s} (1 + d eps_t)``, for each q."""
    out = []
    K = 0
    L = 1
    for e in eps:
        K += L * e
        L *= 1 + d * e
        out.append(K)
    return out


class ConstructionATerm(Term):
    """``a_k -> a_k^l a_1 ... a_d`` with incidence ``l I + J``."""

    def __init__(self, alphabet: Alphabet, ell: int):
        self.domain = self.codomain = alphabet
        self.ell = ell

    @property
    def d(self) -> int:
        return self.domain.d

    def incidence(self) -> np.ndarray:
        d = self.d
        return (np.full((d, d), 1, dtype=object) + self.ell * np.eye(d, dtype=int).astype(object))

    def projective(self) -> np.ndarray:
        d = self.d
        return (np.eye(d) * self.ell + 1.0) / (self.ell + 1.0)

    def support(self) -> np.ndarray:
        return np.ones((self.d, self.d), dtype=bool)

    def substitution(self, budget: int = DEFAULT_BUDGET) -> Substitution:
        d = self.d
        if d * (self.ell + d) > budget:
            raise BudgetExceeded(f"construction A term with l={self.ell} exceeds {budget} letters")
        tail = tuple(range(d))
        images = tuple((k,) * self.ell + tail for k in range(d))
        return Substitution(self.domain, self.domain, images)

    def __repr__(self):
        return f"ConstructionATerm(d={self.d}, l={self.ell})"


def build_construction_A(d: int, N: int = 20) -> DirectiveSequence:
    """Terms ``sigma_0 = id`` and ``sigma_n``, n = 1..N, from the schedule."""
    A = standard_alphabet(d)
    sched = build_epsilon_schedule(d, N)
    ident = SubstitutionTerm(Substitution.identity(A))

    def rule(n):
        return ident if n == 0 else ConstructionATerm(A, sched[n - 1][1])

    return DirectiveSequence(rule, N + 1, {"kind": "construction_A", "d": d, "levels": N,
                                           "schedule": [e[1] for e in sched]})


# ---------------------------------------------------------------------------
# approximations 2^m / 3^q
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _log2_3_cf(dps: int) -> tuple:
    """Continued fraction terms of log2(3), trustworthy to about dps/2 digits of q."""
    with mpmath.workdps(dps):
        x = mpmath.log(3, 2)
        terms = []
        q_prev, q_cur = 0, 1
        while q_cur < mpmath.mpf(10) ** (dps // 2 - 5):
            a = int(mpmath.floor(x))
            terms.append(a)
            x = 1 / (x - a)
            if len(terms) > 1:
                q_prev, q_cur = q_cur, a * q_cur + q_prev
    return tuple(terms)


def lower_approximations(dps: int = 400) -> Iterator[tuple]:
    """Best lower approximations p/q of log2(3) in increasing q.

    These are the q at which ``frac(q log2 3)`` reaches a new minimum.
    """
    a = _log2_3_cf(dps)
    # convergents p_k / q_k; even k lie below
    p = [a[0], a[0] * a[1] + 1]
    q = [1, a[1]]
    for k in range(2, len(a)):
        p.append(a[k] * p[-1] + p[-2])
        q.append(a[k] * q[-1] + q[-2])
    yield p[0], q[0]
    for k in range(0, len(a) - 2, 2):
        for t in range(1, a[k + 2] + 1):
            yield p[k] + t * p[k + 1], q[k] + t * q[k + 1]


def _frac_ok(m: int, q: int, eps: Fraction) -> bool:
    """Exact or high-precision test of ``2^m / 3^q >= 1 - eps/2``."""
    if q <= 4000:
        return 2 ** (m + 1) * eps.denominator >= 3 ** q * (2 * eps.denominator - eps.numerator)
    with mpmath.workdps(len(str(q)) + 40):
        lhs = m - q * mpmath.log(3, 2)
        rhs = mpmath.log(1 - mpmath.mpf(eps.numerator) / (2 * eps.denominator), 2)
        return lhs >= rhs


@dataclass(frozen=True)
class Rational23:
    """Exponents with ``1 >= 2^m / 3^q >= 1 - eps/2``; ``h = 3^q - 2^m``."""

    m: int
    q: int

    @property
    def h(self) -> int:
        if self.q > EXACT_Q_CAP:
            raise BudgetExceeded(f"3**{self.q} is too large to expand")
        return 3 ** self.q - 2 ** self.m

    @property
    def ratio(self) -> float:
        """``h / 2^m = 3^q / 2^m - 1``."""
        if self.q <= EXACT_Q_CAP:
            return float(Fraction(self.h, 2 ** self.m))
        with mpmath.workdps(len(str(self.q)) + 30):
            return float(mpmath.power(2, self.q * mpmath.log(3, 2) - self.m) - 1)

    def __iter__(self):
        return iter((self.m, self.q, self.h))


def approx_rational_23(eps) -> Rational23:
    """Smallest q (with ``m = floor(q log2 3)``) such that ``2^m / 3^q >= 1 - eps/2``.

    Examples
    --------
    >>> tuple(approx_rational_23(1))
    (1, 1, 1)
    >>> tuple(approx_rational_23(Fraction(1, 2)))
    (3, 2, 1)
    """
    eps = Fraction(eps)
    if not 0 < eps <= 2:
        raise ValueError("eps must lie in (0, 2]")
    for p, q in lower_approximations():
        if _frac_ok(p, q, eps):
            return Rational23(p, q)
    raise BudgetExceeded("eps too small for the available continued fraction precision")


# ---------------------------------------------------------------------------
# construction B
# ---------------------------------------------------------------------------

def generator(name: str, d: int, exponent: int = 1) -> Substitution:
    """Closed form of ``g**exponent`` for a generator g of the finite set S."""
    A = standard_alphabet(d)
    e = exponent
    ident = [(k,) for k in range(d)]
    if name == "pi":
        images = [((k + e) % d,) for k in range(d)]
    elif name == "rho1":
        images = [(0,) * 3 ** e] + ident[1:]
    elif name == "theta1":
        images = [(0,) * 2 ** e] + ident[1:]
    elif name == "tau1":
        images = [(0,) + tuple(range(1, d)) * e] + ident[1:]
    else:
        raise KeyError(name)
    return Substitution(A, A, tuple(images))


class CyclicPowerTerm(Term):
    """``rho_j^q tau_j^h theta'_j^m``: ``a_j -> a_j^{3^q} (a_{j+1}..a_{j-1})^h``, ``a_k -> a_k^{2^m}``.

    ``j`` is 1-based.  The projective matrix is the incidence matrix divided
    by ``2^m``, that is ``I + r c e_j^T`` with ``r = h / 2^m``.
    """

    def __init__(self, alphabet: Alphabet, j: int, approx: Rational23):
        self.domain = self.codomain = alphabet
        if not 1 <= j <= alphabet.d:
            raise ValueError("j out of range")
        self.j = j
        self.approx = approx

    @property
    def d(self) -> int:
        return self.domain.d

    @property
    def m(self) -> int:
        return self.approx.m

    @property
    def q(self) -> int:
        return self.approx.q

    def support(self) -> np.ndarray:
        S = np.eye(self.d, dtype=bool)
        S[:, self.j - 1] = True
        return S

    def projective(self) -> np.ndarray:
        N = np.eye(self.d)
        N[:, self.j - 1] += self.approx.ratio
        return N

    def incidence(self) -> np.ndarray:
        d, j = self.d, self.j - 1
        h = self.approx.h
        M = np.zeros((d, d), dtype=object)
        for k in range(d):
            M[k, k] = 2 ** self.m
        M[:, j] = h
        M[j, j] = 3 ** self.q
        return M

    def substitution(self, budget: int = DEFAULT_BUDGET) -> Substitution:
        d, j = self.d, self.j - 1
        if self.q > 64:
            raise BudgetExceeded(f"images of length about 3**{self.q}")
        h = self.approx.h
        total = 3 ** self.q + h * (d - 1) + (d - 1) * 2 ** self.m
        if total > budget:
            raise BudgetExceeded(f"term needs {total} letters, budget {budget}")
        cycle = tuple((j + i) % d for i in range(1, d))
        images = [(k,) * 2 ** self.m for k in range(d)]
        images[j] = (j,) * 3 ** self.q + cycle * h
        return Substitution(self.domain, self.domain, tuple(images))

    def factors(self) -> list:
        """Run-length factors over S whose composition (left to right) is this term."""
        d, j = self.d, self.j
        seq = [("pi", j - 1), ("rho1", self.q), ("tau1", self.approx.h)]
        for _ in range(d - 1):
            seq += [("pi", 1), ("theta1", self.m)]
        seq.append(("pi", 1 + d - j + 1))
        out = []
        for name, e in seq:
            if name == "pi":
                e %= d
            if e == 0:
                continue
            if out and out[-1][0] == name:
                e = out.pop()[1] + e
                if name == "pi":
                    e %= d
                if e == 0:
                    continue
            out.append((name, e))
        return out

    def __repr__(self):
        return f"CyclicPowerTerm(d={self.d}, j={self.j}, m={self.m}, q={self.q})"


def expand_factors(factors, d: int, budget: int = DEFAULT_BUDGET) -> Substitution:
    """Compose run-length generator factors ``g1^e1 o g2^e2 o ...``."""
    out = Substitution.identity(standard_alphabet(d))
    for name, e in factors:
        if name in ("rho1", "theta1") and (3 if name == "rho1" else 2) ** min(e, 64) > budget:
            raise BudgetExceeded(f"{name}^{e} exceeds the budget")
        if name == "tau1" and e * d > budget:
            raise BudgetExceeded(f"{name}^{e} exceeds the budget")
        out = _compose_fast(out, generator(name, d, e), budget)
    return out


class ConstructionB(DirectiveSequence):
    """Directive sequence of ``sigma'_{n, j(n)}``; term k uses ``eps_{k+1}`` and ``j = k mod d + 1``."""

    def __init__(self, d: int, N: int = 20):
        if d < 2:
            raise ValueError("construction B needs d >= 2")
        self.d = d
        self.schedule = build_epsilon_schedule(d, N)
        self.approximations = [approx_rational_23(e) for e, _ in self.schedule]
        A = standard_alphabet(d)

        def rule(k):
            return CyclicPowerTerm(A, k % d + 1, self.approximations[k])

        super().__init__(rule, N, {"kind": "construction_B", "d": d, "levels": N,
                                   "q": [a.q for a in self.approximations]})

    def factors(self, k: int) -> list:
        return self.term(k).factors()

    def factor_word(self, upto: int) -> list:
        """Concatenated factor list for terms ``0 .. upto-1``."""
        out = []
        for k in range(upto):
            out.extend(self.factors(k))
        return out


def build_construction_B(d: int, N: int = 20) -> ConstructionB:
    return ConstructionB(d, N)


# ---------------------------------------------------------------------------
# cone inclusion
# ---------------------------------------------------------------------------

def construction_A_matrix(eps, d: int) -> np.ndarray:
    """``M_eps = I + eps J`` as floats."""
    return np.eye(d) + float(eps) * np.ones((d, d))


def inclusion_check(eps, j: int, d: int, tol: float = 1e-10,
                    approx: Optional[Rational23] = None) -> bool:
    """Is ``M_eps`` (standard cone) inside ``M'_{eps, j}`` (standard cone)?

    Each ``M_eps e_k`` is written as a non-negative combination of the
    columns of ``M'_{eps, j}`` by non-negative least squares.
    """
    approx = approx_rational_23(eps) if approx is None else approx
    N = CyclicPowerTerm(standard_alphabet(d), j, approx).projective()
    N = N / np.linalg.norm(N, axis=0)
    Me = construction_A_matrix(eps, d)
    for k in range(d):
        x = Me[:, k] / np.linalg.norm(Me[:, k])
        _, res = nnls(N, x)
        if res > tol:
            return False
    return True
