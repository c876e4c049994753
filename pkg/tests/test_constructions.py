from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sadic.constructions import (
    ConstructionATerm,
    CyclicPowerTerm,
    Rational23,
    accumulated_coefficients,
    approx_rational_23,
    build_construction_A,
    build_construction_B,
    build_epsilon_schedule,
    construction_A_matrix,
    expand_factors,
    generator,
    inclusion_check,
    schedule_length,
    standard_alphabet,
)
from sadic.directive import cone_sequence_dim, is_weakly_primitive, telescope, telescope_incidence
from sadic.errors import BudgetExceeded
from sadic.words import incidence_matrix

from .oracles import brute_approx_23


class TestSchedule:
    @pytest.mark.parametrize("d,expected", [(2, [5, 11, 23]), (3, [8, 16])])
    def test_lengths(self, d, expected):
        assert [schedule_length(d, n) for n in range(1, len(expected) + 1)] == expected

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_defining_inequalities(self, d):
        for n in range(1, 12):
            ell = schedule_length(d, n)
            assert (1 + d / ell) < 2 ** (2 ** -n)
            assert Fraction(1, ell) < Fraction(1, 2 ** (n + 1))
            # minimality of the first bound, unless the second one dominates
            if ell > 2 ** (n + 1) + 1:
                assert (1 + d / (ell - 1)) >= 2 ** (2 ** -n)

    def test_products_bounded(self):
        # prod (1 + d eps_n) < 2
        sched = build_epsilon_schedule(3, 30)
        prod = Fraction(1)
        for e, _ in sched:
            prod *= 1 + 3 * e
        assert prod < 2
        assert sum(e for e, _ in sched) < 1

    def test_accumulated(self):
        eps = [Fraction(1, 2), Fraction(1, 3)]
        # K_1 = 1/2, K_2 = 1/2 + (1 + 2 * 1/2) * 1/3
        assert accumulated_coefficients(eps, 2) == [Fraction(1, 2), Fraction(7, 6)]

    def test_invalid(self):
        with pytest.raises(ValueError):
            build_epsilon_schedule(0, 3)


class TestApprox23:
    def test_examples(self):
        assert tuple(approx_rational_23(1)) == (1, 1, 1)
        assert tuple(approx_rational_23(Fraction(1, 2))) == (3, 2, 1)

    @settings(max_examples=60)
    @given(st.fractions(min_value=Fraction(1, 3000), max_value=2))
    def test_against_brute_force(self, eps):
        if eps <= 0:
            return
        got = approx_rational_23(eps)
        assert tuple(got) == brute_approx_23(eps)

    @pytest.mark.parametrize("d", [2, 3])
    def test_schedule_values(self, d):
        for e, _ in build_epsilon_schedule(d, 6):
            m, q, h = approx_rational_23(e)
            assert 2 ** m <= 3 ** q
            assert Fraction(2 ** m, 3 ** q) >= 1 - e / 2
            assert Fraction(h, 2 ** m) <= e / (2 - e)

    def test_large_q_is_symbolic(self):
        r = approx_rational_23(Fraction(1, 10 ** 12))
        assert r.q > 10 ** 4
        assert 0 < r.ratio < 1e-12
        with pytest.raises(BudgetExceeded):
            r.h

    def test_range(self):
        with pytest.raises(ValueError):
            approx_rational_23(0)
        with pytest.raises(ValueError):
            approx_rational_23(3)


class TestGenerators:
    def test_actions(self):
        A = standard_alphabet(3)
        assert A.format(generator("rho1", 3).images[0]) == "aaa"
        assert A.format(generator("theta1", 3).images[0]) == "aa"
        assert A.format(generator("tau1", 3).images[0]) == "abc"
        assert A.format(p for img in generator("pi", 3).images for p in img) == "bca"
        for g in ("rho1", "theta1", "tau1"):
            assert generator(g, 3).images[1:] == ((1,), (2,))

    @pytest.mark.parametrize("name", ["rho1", "theta1", "tau1", "pi"])
    def test_closed_form_powers(self, name):
        g = generator(name, 3)
        acc = generator(name, 3, 0)
        for e in range(1, 5):
            acc = expand_factors([(name, 1)], 3) if e == 1 else _compose(g, acc)
            assert acc == generator(name, 3, e)

    def test_unknown(self):
        with pytest.raises(KeyError):
            generator("sigma", 3)


def _generator_incidence(name, d, e):
    M = np.eye(d, dtype=int).astype(object)
    if name == "pi":
        M = np.zeros((d, d), dtype=int).astype(object)
        for k in range(d):
            M[(k + e) % d, k] = 1
    elif name == "rho1":
        M[0, 0] = 3 ** e
    elif name == "theta1":
        M[0, 0] = 2 ** e
    else:
        M[1:, 0] = e
    return M


def _compose(outer, inner):
    from sadic.words import compose
    return compose(outer, inner)


class TestCyclicPowerTerm:
    @pytest.mark.parametrize("d,j", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3), (4, 3)])
    def test_images_and_incidence(self, d, j):
        approx = Rational23(3, 2)  # 2^3 / 3^2, h = 1
        t = CyclicPowerTerm(standard_alphabet(d), j, approx)
        s = t.substitution()
        A = standard_alphabet(d)
        cycle = "".join(A.letters[(j - 1 + i) % d] for i in range(1, d))
        assert A.format(s.images[j - 1]) == A.letters[j - 1] * 9 + cycle * 1
        for k in range(d):
            if k != j - 1:
                assert s.images[k] == (k,) * 8
        assert (incidence_matrix(s) == t.incidence()).all()

    def test_center_vector(self):
        # M' c = 3^q c and M' e_j = h c + 2^m e_j
        approx = approx_rational_23(Fraction(1, 8))
        t = CyclicPowerTerm(standard_alphabet(3), 2, approx)
        M = t.incidence()
        c = np.ones(3, dtype=int).astype(object)
        assert (M.dot(c) == 3 ** approx.q * c).all()
        e = np.zeros(3, dtype=int).astype(object)
        e[1] = 1
        assert (M.dot(e) == approx.h * c + 2 ** approx.m * e).all()

    @pytest.mark.parametrize("d", [2, 3, 4])
    @pytest.mark.parametrize("eps", [Fraction(1), Fraction(1, 2), Fraction(1, 5)])
    def test_factors_telescope(self, d, eps):
        approx = approx_rational_23(eps)
        for j in range(1, d + 1):
            t = CyclicPowerTerm(standard_alphabet(d), j, approx)
            fs = t.factors()
            assert {name for name, _ in fs} <= {"rho1", "theta1", "tau1", "pi"}
            assert expand_factors(fs, d) == t.substitution()

    def test_projective(self):
        approx = Rational23(3, 2)
        N = CyclicPowerTerm(standard_alphabet(3), 1, approx).projective()
        assert N == pytest.approx(np.array(CyclicPowerTerm(standard_alphabet(3), 1, approx)
                                           .incidence().tolist(), dtype=float) / 8)

    def test_budget(self):
        t = CyclicPowerTerm(standard_alphabet(3), 1, approx_rational_23(Fraction(1, 10 ** 6)))
        with pytest.raises(BudgetExceeded):
            t.substitution()


class TestConstructions:
    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_A_cone_dimension(self, d):
        seq = build_construction_A(d, 20)
        dim, cone = cone_sequence_dim(seq, 20)
        assert dim == d and len(cone) == d
        assert is_weakly_primitive(seq, d, 20).ok

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_B_cone_dimension(self, d):
        seq = build_construction_B(d, 20 * d)
        dim, cone = cone_sequence_dim(seq, 20 * d)
        assert dim == d
        assert is_weakly_primitive(seq, d, 20 * d).ok

    def test_B_is_not_primitive_term_by_term(self):
        seq = build_construction_B(3, 6)
        assert not seq.term(0).support().all()
        assert is_weakly_primitive(seq, 3, 6).witnesses[0] == 3

    def test_A_terms(self):
        seq = build_construction_A(2, 3)
        assert seq.substitution(0).images == ((0,), (1,))
        t = seq.term(1)
        assert isinstance(t, ConstructionATerm) and t.ell == 5
        assert standard_alphabet(2).format(t.substitution().images[0]) == "aaaaaab"
        assert (incidence_matrix(t.substitution()) == t.incidence()).all()

    def test_A_projective_is_scaled_m_eps(self):
        t = build_construction_A(3, 2).term(1)
        eps = 1 / t.ell
        assert t.projective() * (t.ell + 1) / t.ell == pytest.approx(construction_A_matrix(eps, 3))

    @pytest.mark.parametrize("d", [2, 3])
    def test_B_factors_word_exact(self, d):
        # the first terms are small enough to materialize (3^12 letters at most)
        seq = build_construction_B(d, 4)
        small = [k for k in range(4) if seq.term(k).q <= 12]
        assert small
        for k in small:
            assert expand_factors(seq.factors(k), d) == seq.substitution(k)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_B_factor_word_incidence(self, d):
        # beyond the word budget the concatenated factor word is checked through exact matrices
        seq = build_construction_B(d, 2 * d)
        n = 2 * d
        P = np.eye(d, dtype=int).astype(object)
        for name, e in seq.factor_word(n):
            P = P.dot(_generator_incidence(name, d, e))
        assert (P == telescope_incidence(seq, 0, n)).all()

    def test_B_telescope_incidence_exact(self):
        seq = build_construction_B(3, 30)
        M = telescope_incidence(seq, 0, 5)
        P = np.eye(3, dtype=int).astype(object)
        for k in range(5):
            P = P.dot(seq.term(k).incidence())
        assert (M == P).all()


class TestInclusion:
    def test_example(self):
        assert inclusion_check(Fraction(1, 2), 1, 3)

    def test_sampled_triples(self):
        rng = np.random.default_rng(2024)
        for _ in range(20):
            d = int(rng.integers(2, 6))
            j = int(rng.integers(1, d + 1))
            eps = Fraction(int(rng.integers(1, 100)), 100)
            assert inclusion_check(eps, j, d), (eps, j, d)

    def test_strict_failure_for_poor_approximation(self):
        # 3^1 / 2^0 - 1 = 2 > eps: the image of e_j leans too far towards c
        eps = Fraction(1, 2)
        assert not inclusion_check(eps, 1, 3, approx=Rational23(0, 1))
