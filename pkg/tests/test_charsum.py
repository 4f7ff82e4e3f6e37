import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charlab import FieldCtx, MultChar, PreconditionError, QuadPoly2, QuadPoly3, preset
from charlab.charsum import (
    RegimeWarning, WeightedSet, bound_thm14, bound_thm17, char_sum2, char_sum2_naive, char_sum3,
    char_sum3_naive, holder_chain, holder_chain2, make_weights, moment_bound, moment_sum, moment_tail,
    regime_thm14, regime_thm17, weighted_set,
)


def legendre(p):
    return MultChar.legendre(FieldCtx(p))


def test_char_sum3_singletons():
    S = char_sum3(WeightedSet.unit([1]), [1], [1], [1], None, legendre(7), preset("x+yz", 7))
    assert abs(S - (-1)) < 1e-12


def test_char_sum2_singletons():
    S = char_sum2(WeightedSet.unit([1]), [1], [1], None, legendre(7), QuadPoly2(7, a=1))
    assert abs(S - 1) < 1e-12


def test_zero_weights():
    chi = legendre(11)
    f = preset("x(y+z)", 11)
    assert char_sum3(WeightedSet.unit([1, 2]), [1, 2], [3], [4], np.zeros((2, 1, 1)), chi, f) == 0
    T = WeightedSet((1, 2), np.zeros(2))
    assert char_sum2(T, [1, 2], [3], None, chi, QuadPoly2(11, a=1)) == 0


def test_weighted_set_validation():
    with pytest.raises(PreconditionError):
        WeightedSet((1, 2), np.array([1, 2]))
    with pytest.raises(PreconditionError):
        WeightedSet((0, 1), np.ones(2))
    with pytest.raises(PreconditionError):
        WeightedSet((1, 1), np.ones(2))
    with pytest.raises(PreconditionError):
        make_weights("bogus", 3)


def test_weights_reproducible():
    a = make_weights("random_modulus", (3, 4), seed=9)
    assert np.array_equal(a, make_weights("random_modulus", (3, 4), seed=9))
    assert np.all(np.abs(a) <= 1)
    assert np.allclose(np.abs(make_weights("random_phase", 5, seed=1)), 1)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7, 11, 101]), st.lists(st.integers(0, 200), min_size=10, max_size=10),
       st.integers(0, 2 ** 32 - 1), st.data())
def test_char_sum3_matches_naive(p, coeffs, seed, data):
    f = QuadPoly3.from_coeffs(coeffs, p)
    chi = MultChar(FieldCtx(p), data.draw(st.integers(1, p - 2)))
    T = weighted_set(data.draw(st.sets(st.integers(1, p - 1), min_size=1, max_size=4)), "random_modulus", seed)
    U, V, W = (sorted(data.draw(st.sets(st.integers(1, p - 1), min_size=1, max_size=4))) for _ in range(3))
    beta = make_weights("random_phase", (len(U), len(V), len(W)), seed + 1)
    S = char_sum3(T, U, V, W, beta, chi, f)
    assert abs(S - char_sum3_naive(T, U, V, W, beta, chi, f)) <= 1e-9
    assert abs(S) <= len(T) * len(U) * len(V) * len(W) + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7, 11, 101]), st.lists(st.integers(0, 200), min_size=6, max_size=6),
       st.integers(0, 2 ** 32 - 1), st.data())
def test_char_sum2_matches_naive(p, coeffs, seed, data):
    f = QuadPoly2.from_coeffs(coeffs, p)
    chi = MultChar(FieldCtx(p), data.draw(st.integers(1, p - 2)))
    T = weighted_set(data.draw(st.sets(st.integers(1, p - 1), min_size=1, max_size=5)), "random_phase", seed)
    U, V = (sorted(data.draw(st.sets(st.integers(1, p - 1), min_size=1, max_size=5))) for _ in range(2))
    beta = make_weights("random_modulus", (len(U), len(V)), seed + 1)
    assert abs(char_sum2(T, U, V, beta, chi, f) - char_sum2_naive(T, U, V, beta, chi, f)) <= 1e-9


def test_complete_sum_cancels():
    p = 31
    chi = MultChar(FieldCtx(p), 5)
    T = WeightedSet.unit(range(1, p))
    S = char_sum2(T, [1], range(1, p), None, chi, QuadPoly2(p, i=1))
    assert abs(S) <= 1e-9


@pytest.mark.parametrize("n", [1, 2, 3])
def test_moment_singleton(n):
    p = 13
    assert moment_sum(WeightedSet.unit([5]), MultChar(FieldCtx(p), 4), n) == pytest.approx(p - 1)


def test_moment_n1_is_exact_for_unit_sets():
    # sum over lam of |sum_t chi(lam + t)|^2 = (p - 1) T - sum over t != t' of a real correlation
    p = 101
    chi = legendre(p)
    T = WeightedSet.unit([1, 2, 3])
    direct = sum(abs(sum(chi.table[(lam + t) % p] for t in T.elements)) ** 2 for lam in range(p))
    assert moment_sum(T, chi, 1) == pytest.approx(direct, rel=1e-12)
    with pytest.raises(PreconditionError):
        moment_sum(T, chi, 0)


def test_holder_singletons():
    cert = holder_chain(WeightedSet.unit([1]), [1], [1], [1], None, legendre(7), preset("x+yz", 7), 1)
    assert cert.lhs == pytest.approx(1)
    assert cert.rhs == pytest.approx(6)
    assert cert.holds


@pytest.mark.parametrize("n", [1, 2, 3])
def test_holder_random(rng, n):
    for _ in range(10):
        p = rng.choice([101, 1009])
        f = QuadPoly3.from_coeffs([rng.randrange(p) for _ in range(10)], p)
        chi = MultChar(FieldCtx(p), rng.randrange(1, p - 1))
        T = weighted_set(rng.sample(range(1, p), 5), "random_modulus", rng.randrange(1000))
        U, V, W = (rng.sample(range(1, p), rng.randint(1, 6)) for _ in range(3))
        beta = make_weights("random_phase", (len(U), len(V), len(W)), rng.randrange(1000))
        cert = holder_chain(T, U, V, W, beta, chi, f, n)
        assert cert.first_ok and cert.second_ok and cert.majorant_ok
        # the extremal unit weights attain the majorant
        assert cert.extremal_abs == pytest.approx(cert.majorant, rel=1e-9)


def test_holder_chain2():
    p = 101
    cert = holder_chain2(WeightedSet.unit([1, 5]), [2, 3], [4, 9, 10], None, legendre(p), QuadPoly2(p, a=1, e=1), 2)
    assert cert.holds and cert.domain_size == 6


def test_bound_thm14_examples():
    N, p = 16, 1009
    small = bound_thm14(N, N, N, N, p, 1, "small")
    assert small == pytest.approx((N ** 2.25 + N ** 2) * N ** 0.5 * p ** 0.5, rel=1e-12)
    with pytest.warns(RegimeWarning):
        bound_thm14(200, 200, 200, 10, 101, 1, "small")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        bound_thm14(200, 200, 200, 10, 101, 1, "large")
    with pytest.raises(PreconditionError):
        bound_thm14(2, 2, 2, 2, 101, 1, "medium")


def test_bound_thm17_examples():
    N, p = 9, 1009
    v = bound_thm17(N, N, N, p, 1, 1, "small")
    assert v == pytest.approx((N ** 1.25 + N) * N ** 0.5 * p ** 0.5, rel=1e-12)
    # doubling k multiplies the second term by 2^{1/n}
    for n in (1, 2, 3):
        first = lambda k: k ** (3 / (4 * n)) * N * N / (N ** (1 / (4 * n)) * N ** (1 / (2 * n)))  # noqa: E731
        tail = moment_tail(N, p, n)
        second = lambda k: bound_thm17(N, N, N, p, k, n, "small") / tail - first(k)  # noqa: E731
        assert second(2) == pytest.approx(2 ** (1 / n) * second(1), rel=1e-12)
    with pytest.raises(PreconditionError):
        bound_thm17(N, N, N, p, 0, 1, "small")


def test_regimes():
    assert regime_thm14(10, 10, 10, 101) == "small"
    assert regime_thm14(30, 30, 30, 101) == "large"
    assert regime_thm17(10, 19, 101) == "small"
    assert regime_thm17(100, 199, 101) == "large"


def test_bound_beats_trivial_above_threshold():
    for p in (1009, 10007, 100003):
        N = math.ceil(p ** 0.5)
        assert bound_thm14(N, N, N, N, p, 1, "small") < N ** 4


def test_moment_tail_and_bound():
    assert moment_tail(4, 9, 1) == pytest.approx(6)
    assert moment_tail(4, 16, 2) == pytest.approx(4 * 16 ** 0.125 + 2 * 16 ** 0.25)
    assert moment_bound(3, 101, 1) == 303
    assert moment_bound(3, 100, 2) == pytest.approx(81 * 10 + 900)
