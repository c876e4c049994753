"""Augmented incidence matrices, strata of reducible matrices, distinguished
eigenvectors and nested-cone intersections.

Matrix entries are exact integers (numpy ``object`` arrays).  Spectral data is
binary64, except that integer eigenvalues and their eigenvectors are also
computed exactly as :class:`fractions.Fraction` values when they exist.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional

import numpy as np
import sympy
from scipy.optimize import nnls

from . import _kernels as K
from .errors import (
    AlphabetMismatch,
    DegenerateSpectrum,
    NonConvergence,
    SingularSystem,
)
from .words import (
    Substitution,
    incidence_matrix,
    is_primitive,
    letter_graph,
    prefix_matrix,
    reachability,
    strong_components,
    suffix_matrix,
)

POWER_TOL = 1e-12
POWER_MAXITER = 100_000
CROSS_TOL = 1e-9
DEDUP_TOL = 1e-6
FEASIBILITY_TOL = 1e-8


# ---------------------------------------------------------------------------
# augmented matrix
# ---------------------------------------------------------------------------

def kronecker(S, P) -> np.ndarray:
    """Kronecker product, row/column order lexicographic on letter pairs."""
    S = np.asarray(S, dtype=object)
    P = np.asarray(P, dtype=object)
    if S.shape != P.shape:
        raise ValueError(f"shape mismatch {S.shape} vs {P.shape}")
    return np.kron(S, P)


@dataclass(frozen=True, eq=False)
class AugmentedMatrix:
    """The matrix indexed by words of length 1 and 2 (letters first)."""

    base: Substitution
    entries: np.ndarray

    @property
    def d(self) -> int:
        return self.base.domain.d

    @property
    def labels(self) -> list:
        return self.base.codomain.augmented_labels()

    @property
    def column_labels(self) -> list:
        return self.base.domain.augmented_labels()

    @property
    def letter_block(self) -> np.ndarray:
        r, c = self.base.codomain.d, self.base.domain.d
        return self.entries[:r, :c]

    @property
    def upper_right(self) -> np.ndarray:
        r, c = self.base.codomain.d, self.base.domain.d
        return self.entries[:r, c:]

    @property
    def lower_left(self) -> np.ndarray:
        r, c = self.base.codomain.d, self.base.domain.d
        return self.entries[r:, :c]

    @property
    def pair_block(self) -> np.ndarray:
        r, c = self.base.codomain.d, self.base.domain.d
        return self.entries[r:, c:]

    def __matmul__(self, other):
        if isinstance(other, AugmentedMatrix):
            return self.entries @ other.entries
        return self.entries @ other


def augmented_matrix(sigma: Substitution) -> AugmentedMatrix:
    """Build the augmented incidence matrix of ``sigma``.

    Blocks: incidence matrix (letters x letters), zero (letters x pairs),
    pair counts ``|sigma(y)|_X`` (pairs x letters) and the transition block
    ``S (x) P`` (pairs x pairs).  Works for substitutions between different
    alphabets as well, in which case the matrix is rectangular.
    """
    r, c = sigma.codomain.d, sigma.domain.d
    out = np.zeros((r + r * r, c + c * c), dtype=object)
    out[:r, :c] = incidence_matrix(sigma)
    for y, img in enumerate(sigma.images):
        for x1, x2 in zip(img, img[1:]):
            out[r + x1 * r + x2, y] += 1
    out[r:, c:] = kronecker(suffix_matrix(sigma), prefix_matrix(sigma))
    return AugmentedMatrix(sigma, out)


# ---------------------------------------------------------------------------
# Perron-Frobenius data
# ---------------------------------------------------------------------------

def _float_matrix(M) -> np.ndarray:
    return np.array(np.asarray(M, dtype=object).tolist(), dtype=float)


def pf_eigenpair(B, tol: float = POWER_TOL, maxiter: int = POWER_MAXITER):
    """Spectral radius and positive eigenvector (sum 1) of an irreducible matrix.

    Power iteration from the all-ones vector.  For irreducible but imprimitive
    input the iteration runs on ``B + I``, which is primitive with the same
    eigenvector.
    """
    A = _float_matrix(B)
    n = A.shape[0]
    if n == 1:
        return float(A[0, 0]), np.ones(1)
    shift = 0.0 if is_primitive(B) else 1.0
    A_it = A + shift * np.eye(n) if shift else A
    # residuals cannot go below rounding of B @ v
    floor = 64 * np.finfo(float).eps * max(1.0, np.abs(A_it).sum(axis=1).max())
    lam, v, it = K.power_iteration(np.ascontiguousarray(A_it), max(tol, floor), maxiter)
    if it < 0:
        raise NonConvergence(f"power iteration did not converge in {maxiter} steps")
    return float(lam - shift), v


@dataclass(frozen=True)
class Stratum:
    letters: tuple
    eigenvalue: float
    primitive: bool
    period: int  # 0 for a letter lying on no cycle


@dataclass(frozen=True)
class Strata:
    """Strongly connected components of the letter graph, top strata first.

    ``accesses[i, j]`` is True when some letter of component i reaches a
    letter of component j (i != j).
    """

    components: tuple
    accesses: np.ndarray = field(compare=False)

    def __len__(self):
        return len(self.components)

    def accessible_from(self, i: int) -> list:
        return [j for j in range(len(self.components)) if self.accesses[i, j]]

    def index_of(self, letter: int) -> int:
        for i, c in enumerate(self.components):
            if letter in c.letters:
                return i
        raise KeyError(letter)


def _period(adj, members) -> int:
    members = list(members)
    if len(members) == 1:
        return 1 if adj[members[0], members[0]] else 0
    inside = set(members)
    level = {members[0]: 0}
    queue = [members[0]]
    g = 0
    while queue:
        u = queue.pop(0)
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v not in inside:
                continue
            if v not in level:
                level[v] = level[u] + 1
                queue.append(v)
            else:
                g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g)


def strata(M) -> Strata:
    M = np.asarray(M, dtype=object)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("square matrix required")
    adj = letter_graph(M)
    ncomp, labels = strong_components(adj)
    groups = [tuple(int(a) for a in np.flatnonzero(labels == k)) for k in range(ncomp)]
    R = reachability(adj)
    comp_reach = np.array([[bool(R[np.ix_(g, h)].any()) for h in groups] for g in groups])
    np.fill_diagonal(comp_reach, False)
    # top first: a component precedes everything it accesses; ties by smallest letter
    order = _topological(comp_reach, groups)
    comps = []
    for k in order:
        g = groups[k]
        B = M[np.ix_(g, g)]
        per = _period(adj, g)
        if per == 0:
            lam = 0.0
        else:
            lam, _ = pf_eigenpair(B)
        comps.append(Stratum(g, lam, bool(per == 1 and is_primitive(B)), per))
    acc = comp_reach[np.ix_(order, order)]
    return Strata(tuple(comps), acc)


def _topological(reach, groups) -> list:
    remaining = set(range(len(groups)))
    out = []
    while remaining:
        sources = [k for k in remaining
                   if not any(reach[j, k] for j in remaining if j != k)]
        k = min(sources, key=lambda s: groups[s][0])
        out.append(k)
        remaining.remove(k)
    return out


# ---------------------------------------------------------------------------
# exact comparisons of Perron-Frobenius roots
# ---------------------------------------------------------------------------

def _pf_root(B):
    """Largest real root of the characteristic polynomial, as an exact sympy number."""
    B = np.asarray(B, dtype=object)
    if B.shape == (1, 1):
        return sympy.Integer(int(B[0, 0]))
    x = sympy.Symbol("x")
    p = sympy.Matrix(B.tolist()).charpoly(x)
    return max(sympy.Poly(p.as_expr(), x).real_roots())


def _compare_pf(B1, lam1, B2, lam2, tol) -> int:
    """Sign of lambda(B1) - lambda(B2), resolving near-ties exactly."""
    if abs(lam1 - lam2) > tol * max(1.0, abs(lam1)):
        return 1 if lam1 > lam2 else -1
    try:
        r1, r2 = _pf_root(B1), _pf_root(B2)
        x = sympy.Symbol("x")
        p1 = sympy.Poly(sympy.minimal_polynomial(r1, x), x)
        p2 = sympy.Poly(sympy.minimal_polynomial(r2, x), x)
    except Exception as exc:  # sympy could not handle the blocks
        raise DegenerateSpectrum(f"cannot separate eigenvalues {lam1} and {lam2}") from exc
    if p1 == p2 and abs(float(r1) - float(r2)) < 1e-6:
        # same minimal polynomial and numerically the same root: equal
        if abs(float(r1.evalf(60)) - float(r2.evalf(60))) == 0.0:
            return 0
    a, b = r1.evalf(80), r2.evalf(80)
    if abs(a - b) < sympy.Float("1e-70"):
        raise DegenerateSpectrum(f"cannot separate eigenvalues {lam1} and {lam2}")
    return 1 if a > b else -1


# ---------------------------------------------------------------------------
# distinguished eigenvectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DistinguishedEigenvector:
    """Non-negative eigenvector attached to a distinguished stratum.

    ``eigenvalue`` and ``vector`` refer to ``M ** power``; ``power`` is 1
    unless some growing stratum of M is imprimitive.  ``vector`` sums to 1.
    """

    eigenvalue: float
    vector: np.ndarray
    stratum: tuple
    support: tuple
    power: int = 1
    exact_eigenvalue: Optional[int] = None
    exact_vector: Optional[tuple] = None


def _exact_nullvector(A):
    """A non-negative rational generator of the 1-dim kernel of integer A, or None."""
    ns = sympy.Matrix(np.asarray(A, dtype=object).tolist()).nullspace()
    if len(ns) != 1:
        return None
    v = ns[0]
    if all(x <= 0 for x in v):
        v = -v
    if any(x < 0 for x in v):
        return None
    s = sum(v)
    return [Fraction(int(sympy.fraction(x / s)[0]), int(sympy.fraction(x / s)[1])) for x in v]


def _exact_solve(A, b):
    """Solve A x = b exactly for integer A and rational b."""
    Am = sympy.Matrix(np.asarray(A, dtype=object).tolist())
    bm = sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in b])
    x = Am.LUsolve(bm)
    out = []
    for e in x:
        n, dd = sympy.fraction(sympy.nsimplify(e))
        out.append(Fraction(int(n), int(dd)))
    return out


def _as_fraction_vector(v):
    return tuple(Fraction(x) for x in v)


def distinguished_eigenvectors(M, tol: float = POWER_TOL) -> list:
    """One non-negative eigenvector per distinguished stratum of M.

    A stratum C is distinguished when its Perron-Frobenius eigenvalue exceeds 1
    and strictly exceeds that of every other stratum accessible from C.  The
    eigenvector is the Perron vector on C, extended to the letters reachable
    from C by solving the block-triangular system, and zero elsewhere.

    If some stratum with eigenvalue > 1 is imprimitive, the computation is
    done for ``M ** p`` with p the lcm of the periods; the ``power`` field of
    each result records p.
    """
    M = np.asarray(M, dtype=object)
    st = strata(M)
    periods = [c.period for c in st.components if c.period > 0 and c.eigenvalue > 1]
    p = reduce(math.lcm, periods, 1)
    if p > 1 or not all(c.primitive or c.period == 0 or c.eigenvalue <= 1
                        for c in st.components):
        Mp = np.linalg.matrix_power(M, p) if p > 1 else M
        st = strata(Mp)
        M = Mp
    out = []
    Mf = _float_matrix(M)
    d = M.shape[0]
    adj = letter_graph(M)
    R = reachability(adj)
    for i, comp in enumerate(st.components):
        lam = comp.eigenvalue
        if lam <= 1.0 + 1e-12 or comp.period == 0:
            continue
        g = list(comp.letters)
        Bc = M[np.ix_(g, g)]
        dominated = False
        for j in st.accessible_from(i):
            other = st.components[j]
            if other.period == 0:
                continue
            h = list(other.letters)
            if _compare_pf(Bc, lam, M[np.ix_(h, h)], other.eigenvalue, CROSS_TOL) <= 0:
                dominated = True
                break
        if dominated:
            continue
        down = [a for a in range(d) if R[g[0], a] and a not in g]
        _, vc = pf_eigenpair(Bc, tol)
        v = np.zeros(d)
        v[g] = vc
        if down:
            A = lam * np.eye(len(down)) - Mf[np.ix_(down, down)]
            rhs = Mf[np.ix_(down, g)] @ vc
            try:
                v[down] = np.linalg.solve(A, rhs)
            except np.linalg.LinAlgError as exc:
                raise SingularSystem(str(exc)) from exc
        v = np.clip(v, 0.0, None)
        v /= v.sum()
        exact_lam, exact_v = _exact_eigen(M, lam, g, down)
        if exact_v is not None:
            v = np.array([float(x) for x in exact_v])
        support = tuple(sorted(g + down))
        out.append(DistinguishedEigenvector(lam if exact_lam is None else float(exact_lam),
                                            v, tuple(g), support, p, exact_lam, exact_v))
    return out


def _exact_eigen(M, lam, g, down):
    r = round(lam)
    if abs(lam - r) > 1e-6 or r <= 1:
        return None, None
    Bc = M[np.ix_(g, g)]
    A = r * np.eye(len(g), dtype=int).astype(object) - Bc
    vc = _exact_nullvector(A)
    if vc is None:
        return None, None
    d = M.shape[0]
    v = [Fraction(0)] * d
    for a, x in zip(g, vc):
        v[a] = x
    if down:
        A = r * np.eye(len(down), dtype=int).astype(object) - M[np.ix_(down, down)]
        rhs = [sum((Fraction(int(M[x, y])) * v[y] for y in g), Fraction(0)) for x in down]
        for a, x in zip(down, _exact_solve(A, rhs)):
            v[a] = x
    s = sum(v)
    return int(r), tuple(x / s for x in v)


def extend_to_augmented(sigma: Substitution, lam: float, v, tol: float = POWER_TOL,
                        exact: bool = False):
    """Augmented eigenvector: letter part ``v``, pair part solving
    ``(lam I - S(x)P) u = B v`` with B the pairs-by-letters block.

    With ``exact=True`` ``lam`` must be an integer and ``v`` rational; the
    result is then a tuple of Fractions.
    """
    if not sigma.is_endomorphism:
        raise AlphabetMismatch("augmented eigenvectors need an endomorphism")
    if lam <= 1 + tol:
        raise SingularSystem(f"eigenvalue {lam} must exceed 1")
    aug = augmented_matrix(sigma)
    D = aug.pair_block
    B = aug.lower_left
    n = D.shape[0]
    if exact:
        vv = [Fraction(x) for x in v]
        rhs = [sum((Fraction(int(B[i, j])) * vv[j] for j in range(len(vv))), Fraction(0))
               for i in range(n)]
        A = int(lam) * np.eye(n, dtype=int).astype(object) - D
        return tuple(vv) + tuple(_exact_solve(A, rhs))
    v = np.asarray(v, dtype=float)
    rhs = _float_matrix(B) @ v
    u = np.linalg.solve(lam * np.eye(n) - _float_matrix(D), rhs)
    return np.concatenate([v, np.clip(u, 0.0, None)])


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cone:
    """Finitely generated cone; ``rays`` holds unit vectors as rows."""

    rays: np.ndarray
    diameter: float = float("nan")

    def __len__(self):
        return len(self.rays)

    def dimension(self, rel_tol: float = 1e-6) -> int:
        if len(self.rays) == 0:
            return 0
        s = np.linalg.svd(self.rays, compute_uv=False)
        return int(np.count_nonzero(s > rel_tol * s[0]))

    def contains(self, x, tol: float = FEASIBILITY_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        nx = np.linalg.norm(x)
        if nx == 0:
            return True
        _, res = nnls(self.rays.T, x / nx)
        return res <= tol


def angular_distance(u, v) -> float:
    return 2.0 * math.asin(min(1.0, np.linalg.norm(np.asarray(u) - np.asarray(v)) / 2.0))


def unit_columns(P) -> np.ndarray:
    """Non-zero columns of an exact or float matrix as unit float vectors (rows)."""
    P = np.asarray(P)
    out = []
    for j in range(P.shape[1]):
        col = P[:, j]
        if P.dtype == object:
            m = max(col)
            if m == 0:
                continue
            x = np.array([float(Fraction(int(c), int(m))) for c in col])
        else:
            m = np.abs(col).max()
            if m == 0:
                continue
            x = np.asarray(col, dtype=float) / m
        out.append(x / np.linalg.norm(x))
    return np.array(out) if out else np.zeros((0, P.shape[0]))


def extremal_rays(vectors: np.ndarray, dedup_tol: float = DEDUP_TOL,
                  feas_tol: float = FEASIBILITY_TOL) -> np.ndarray:
    """Deduplicate unit vectors and drop those in the cone of the others."""
    kept = []
    for x in vectors:
        if all(angular_distance(x, y) > dedup_tol for y in kept):
            kept.append(np.asarray(x, dtype=float))
    changed = True
    while changed and len(kept) > 1:
        changed = False
        for i in range(len(kept)):
            others = np.array([kept[j] for j in range(len(kept)) if j != i])
            _, res = nnls(others.T, kept[i])
            if res <= feas_tol:
                kept.pop(i)
                changed = True
                break
    return np.array(kept) if kept else np.zeros((0, vectors.shape[1] if vectors.ndim == 2 else 0))


def _ray_drift(a: np.ndarray, b: np.ndarray) -> float:
    if len(a) == 0 or len(b) == 0:
        return float("nan")
    return max(min(angular_distance(x, y) for y in b) for x in a)


def cone_intersection(M, depth: int, tol: float = DEDUP_TOL,
                      feas_tol: float = FEASIBILITY_TOL) -> Cone:
    """Extremal rays of ``M**depth`` applied to the non-negative orthant.

    ``diameter`` estimates convergence as the largest angular distance
    between a ray at ``depth`` and the nearest ray at ``depth - 1``.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    M = np.asarray(M, dtype=object)
    prev = np.linalg.matrix_power(M, depth - 1) if depth > 1 else np.eye(M.shape[0], dtype=int).astype(object)
    P = prev @ M
    rays = extremal_rays(unit_columns(P), tol, feas_tol)
    rays_prev = extremal_rays(unit_columns(prev), tol, feas_tol)
    return Cone(rays, _ray_drift(rays, rays_prev))


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def matrix_to_json(M, row_labels, col_labels=None) -> str:
    M = np.asarray(M, dtype=object)
    col_labels = row_labels if col_labels is None else col_labels
    payload = {"rows": list(row_labels), "columns": list(col_labels),
               "entries": [[int(x) for x in row] for row in M]}
    return json.dumps(payload)


def format_matrix(M, row_labels, col_labels=None) -> str:
    M = np.asarray(M, dtype=object)
    col_labels = row_labels if col_labels is None else col_labels
    cells = [[str(int(x)) for x in row] for row in M]
    w = max([len(c) for row in cells for c in row] + [len(x) for x in col_labels] + [1])
    lw = max(len(x) for x in row_labels)
    head = " " * lw + " " + " ".join(x.rjust(w) for x in col_labels)
    lines = [head]
    for lab, row in zip(row_labels, cells):
        lines.append(lab.rjust(lw) + " " + " ".join(c.rjust(w) for c in row))
    return "\n".join(lines)
