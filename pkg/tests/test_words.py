import numpy as np
import pytest
from hypothesis import given, strategies as st

from sadic.errors import (
    AlphabetMismatch,
    BudgetExceeded,
    EmptyImage,
    EmptyPattern,
    EverywhereGrowingRequired,
    InvalidLetter,
)
from sadic.words import (
    Alphabet,
    Substitution,
    apply,
    compose,
    count_occurrences,
    growing_letters,
    image_lengths,
    incidence_matrix,
    is_everywhere_growing,
    is_primitive,
    iterate_array,
    language_factors,
    letter_graph,
    power,
    prefix_matrix,
    require_everywhere_growing,
    saturated_lengths,
    strong_components,
    suffix_matrix,
)

from .oracles import incidence as incidence_oracle, iterate_str, occurrences
from .strategies import composable_pairs, growing_substitutions, substitutions, words


AB = Alphabet(("a", "b"))


class TestAlphabet:
    def test_parse_and_format_roundtrip(self):
        assert AB.parse("abba") == (0, 1, 1, 0)
        assert AB.format((0, 1, 1, 0)) == "abba"

    def test_multichar_symbols(self):
        A = Alphabet(("a1", "a2", "a3"))
        assert A.parse("a1 a3") == (0, 2)
        assert A.format((0, 2)) == "a1 a3"

    def test_parse_indices_and_symbols(self):
        assert AB.parse([1, "a"]) == (1, 0)

    @pytest.mark.parametrize("bad", ["abz", [2], [-1]])
    def test_invalid_letter(self, bad):
        with pytest.raises(InvalidLetter):
            AB.parse(bad)

    def test_duplicate_or_empty(self):
        with pytest.raises(InvalidLetter):
            Alphabet(("a", "a"))
        with pytest.raises(InvalidLetter):
            Alphabet(())

    def test_words_lexicographic(self):
        assert [AB.format(w) for w in AB.words(2)] == ["aa", "ab", "ba", "bb"]
        assert AB.words(0) == [()]

    def test_augmented_labels(self):
        assert AB.augmented_labels() == ["a", "b", "aa", "ab", "ba", "bb"]


class TestSubstitution:
    def test_from_rules(self, tm):
        assert tm.rules() == {"a": "ab", "b": "ba"}
        assert str(tm) == "a->ab, b->ba"

    def test_empty_image(self):
        with pytest.raises(EmptyImage):
            Substitution.from_rules(AB, {"a": "ab", "b": ""})

    def test_missing_and_extra_rules(self):
        with pytest.raises(InvalidLetter):
            Substitution.from_rules(AB, {"a": "ab"})
        with pytest.raises(InvalidLetter):
            Substitution.from_rules(AB, {"a": "ab", "b": "a", "c": "a"})

    def test_image_outside_codomain(self):
        with pytest.raises(InvalidLetter):
            Substitution.from_rules(AB, {"a": "ac", "b": "a"})

    def test_wrong_image_count(self):
        with pytest.raises(AlphabetMismatch):
            Substitution(AB, AB, ((0,),))

    def test_apply_tm(self, tm):
        assert AB.format(apply(tm, "abba")) == "abbabaab"
        assert tm("a") == (0, 1)

    def test_iterate_matches_string_oracle(self, fib):
        rules = fib.rules()
        for n in range(8):
            assert AB.format(iterate_array(fib, [0], n).tolist()) == iterate_str(rules, "a", n)

    def test_budget(self, tm):
        with pytest.raises(BudgetExceeded):
            iterate_array(tm, [0], 20, budget=1000)

    def test_power_zero_is_identity(self, tm):
        assert power(tm, 0) == Substitution.identity(AB)

    def test_compose_alphabet_mismatch(self, tm):
        other = Substitution.from_rules(("x",), {"x": "xx"})
        with pytest.raises(AlphabetMismatch):
            compose(tm, other)


class TestCounting:
    def test_overlapping(self):
        assert count_occurrences((0, 0, 0, 0), (0, 0)) == 3

    def test_empty_pattern(self):
        with pytest.raises(EmptyPattern):
            count_occurrences((0, 1), ())

    @given(st.lists(st.integers(0, 2), max_size=40), words(3, max_size=4))
    def test_matches_string_oracle(self, text, pattern):
        s = "".join("abc"[x] for x in text)
        p = "".join("abc"[x] for x in pattern)
        assert count_occurrences(text, pattern) == occurrences(s, p)


class TestMatrices:
    def test_tm_incidence(self, tm):
        assert incidence_matrix(tm).tolist() == [[1, 1], [1, 1]]

    def test_fib_incidence(self, fib):
        assert incidence_matrix(fib).tolist() == [[1, 1], [1, 0]]

    def test_incidence_oracle(self, bkms):
        letters = "abcde"
        assert incidence_matrix(bkms).tolist() == incidence_oracle(bkms.rules(), letters)

    def test_prefix_suffix(self, fib):
        # a -> ab, b -> a
        assert prefix_matrix(fib).tolist() == [[1, 1], [0, 0]]
        assert suffix_matrix(fib).tolist() == [[0, 1], [1, 0]]

    def test_rectangular(self):
        s = Substitution.from_rules(("a", "b", "c"), {"a": "x", "b": "xy", "c": "yy"}, codomain=("x", "y"))
        assert incidence_matrix(s).tolist() == [[1, 1, 0], [0, 1, 2]]

    @given(composable_pairs())
    def test_incidence_is_multiplicative(self, pair):
        sigma, tau = pair
        assert (incidence_matrix(compose(sigma, tau)) ==
                incidence_matrix(sigma).dot(incidence_matrix(tau))).all()


class TestGraph:
    def test_letter_graph_direction(self, leaf):
        adj = letter_graph(incidence_matrix(leaf))
        # a -> acbca: a reaches c, c -> cc does not reach a
        assert adj[0, 2] and not adj[2, 0]

    def test_strong_components(self, leaf):
        n, labels = strong_components(letter_graph(incidence_matrix(leaf)))
        assert n == 2
        assert labels[0] == labels[1] != labels[2]

    def test_primitivity(self, tm, fib, leaf):
        assert is_primitive(incidence_matrix(tm))
        assert is_primitive(incidence_matrix(fib))
        assert not is_primitive(incidence_matrix(leaf))
        assert not is_primitive(np.array([[0, 1], [1, 0]]))


class TestGrowth:
    def test_everywhere_growing(self, tm, leaf, bkms):
        assert all(is_everywhere_growing(s) for s in (tm, leaf, bkms))

    def test_bounded_letter(self):
        s = Substitution.from_rules(AB, {"a": "ab", "b": "b"})
        assert growing_letters(s).tolist() == [True, False]
        with pytest.raises(EverywhereGrowingRequired):
            require_everywhere_growing(s)

    def test_permutation_does_not_grow(self):
        s = Substitution.from_rules(AB, {"a": "b", "b": "a"})
        assert not is_everywhere_growing(s)

    @given(substitutions(max_d=4, max_len=3))
    def test_growth_agrees_with_lengths(self, sigma):
        # bounded letters reach their final length within d steps; growing ones keep growing
        n = 2 * sigma.domain.d + 2
        L1, L2 = image_lengths(sigma, n), image_lengths(sigma, 2 * n)
        assert [bool(y > x) for x, y in zip(L1, L2)] == growing_letters(sigma).tolist()

    def test_saturated_lengths(self, tm):
        assert saturated_lengths(tm, 10).tolist() == [1024, 1024]
        assert saturated_lengths(tm, 40, cap=10 ** 6).tolist() == [10 ** 6, 10 ** 6]

    @given(growing_substitutions(max_d=3, max_len=3), st.integers(0, 5))
    def test_image_lengths_exact(self, sigma, n):
        L = image_lengths(sigma, n)
        for a in range(sigma.domain.d):
            assert L[a] == iterate_array(sigma, [a], n).size


def test_language_factors_fib(fib):
    f = language_factors(fib, 2, 8)
    assert {AB.format(w) for w in f} == {"aa", "ab", "ba"}
