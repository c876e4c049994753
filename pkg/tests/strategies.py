"""Hypothesis strategies for random substitutions."""
from hypothesis import strategies as st

from sadic.words import Alphabet, Substitution

LETTERS = "abcd"


@st.composite
def substitutions(draw, min_d=1, max_d=4, max_len=5, codomain_d=None, min_len=1):
    d = draw(st.integers(min_d, max_d))
    dc = d if codomain_d is None else codomain_d
    A, B = Alphabet(tuple(LETTERS[:d])), Alphabet(tuple(LETTERS[:dc]))
    images = tuple(tuple(draw(st.lists(st.integers(0, dc - 1), min_size=min_len, max_size=max_len)))
                   for _ in range(d))
    return Substitution(A, B, images)


@st.composite
def composable_pairs(draw, max_d=4, max_len=5):
    """(sigma, tau) with sigma: B -> C and tau: A -> B, alphabets of at most max_d letters."""
    da, db, dc = (draw(st.integers(1, max_d)) for _ in range(3))
    A, B, C = (Alphabet(tuple(LETTERS[:k])) for k in (da, db, dc))
    tau = Substitution(A, B, tuple(tuple(draw(st.lists(st.integers(0, db - 1), min_size=1,
                                                       max_size=max_len))) for _ in range(da)))
    sigma = Substitution(B, C, tuple(tuple(draw(st.lists(st.integers(0, dc - 1), min_size=1,
                                                         max_size=max_len))) for _ in range(db)))
    return sigma, tau


@st.composite
def growing_substitutions(draw, max_d=4, max_len=5):
    """Everywhere-growing endomorphisms: every image has length >= 2."""
    return draw(substitutions(min_d=1, max_d=max_d, max_len=max_len, min_len=2))


def words(d, min_size=1, max_size=6):
    return st.lists(st.integers(0, d - 1), min_size=min_size, max_size=max_size).map(tuple)
