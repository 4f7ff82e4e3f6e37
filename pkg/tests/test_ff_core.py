import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charlab import FieldCtx, MultChar, PreconditionError, char_eval, find_primitive_root, legendre_oracle
from charlab.ff_core import is_prime

PRIMES = [5, 7, 11, 13, 101, 1009]


def order_mod(g, p):
    k, x = 1, g % p
    while x != 1:
        x = x * g % p
        k += 1
    return k


def smallest_generator_by_enumeration(p):
    return next(g for g in range(2, p) if order_mod(g, p) == p - 1)


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 101, 1009, 10007])
def test_primitive_root_is_smallest_generator(p):
    assert find_primitive_root(p) == smallest_generator_by_enumeration(p)


def test_primitive_root_examples():
    assert find_primitive_root(7) == 3
    assert find_primitive_root(5) == 2


@pytest.mark.parametrize("bad", [4, 9, 2, 3, 1, 0, 15])
def test_primitive_root_rejects(bad):
    with pytest.raises(PreconditionError):
        find_primitive_root(bad)


@pytest.mark.parametrize("p", PRIMES)
def test_dlog_table(p):
    ctx = FieldCtx(p)
    assert sorted(ctx.exp.tolist()) == list(range(1, p))
    for k in range(p - 1):
        assert ctx.dlog[pow(ctx.g, k, p)] == k


def test_field_ctx_is_frozen():
    ctx = FieldCtx(7)
    with pytest.raises(Exception):
        ctx.p = 11
    with pytest.raises(ValueError):
        ctx.dlog[1] = 3


def test_inverse_table():
    ctx = FieldCtx(13)
    inv = ctx.inverse_table()
    assert inv[0] == 0
    assert all(a * inv[a] % 13 == 1 for a in range(1, 13))


def test_char_eval_examples():
    ctx = FieldCtx(7)
    leg = MultChar(ctx, 3)
    assert char_eval(leg, 1) == pytest.approx(1)
    assert char_eval(leg, 0) == 0
    assert abs(char_eval(leg, 3) - (-1)) < 1e-12


def test_character_rejects_trivial_index():
    ctx = FieldCtx(7)
    for m in (0, 6, -1):
        with pytest.raises(PreconditionError):
            MultChar(ctx, m)


def test_legendre_oracle_examples():
    assert legendre_oracle(0, 7) == 0
    assert legendre_oracle(2, 7) == 1
    assert legendre_oracle(3, 7) == -1


@pytest.mark.parametrize("p", PRIMES)
def test_legendre_oracle_matches_squares(p):
    squares = {x * x % p for x in range(1, p)}
    for a in range(1, p):
        assert legendre_oracle(a, p) == (1 if a in squares else -1)


@pytest.mark.parametrize("p", [5, 7, 11, 101])
def test_table_agrees_with_scalar_eval(p):
    ctx = FieldCtx(p)
    for m in range(1, p - 1):
        chi = MultChar(ctx, m)
        for a in range(p):
            assert abs(chi.table[a] - char_eval(chi, a)) < 1e-12


def test_character_order():
    ctx = FieldCtx(13)
    assert MultChar(ctx, 6).order == 2
    assert MultChar(ctx, 4).order == 3
    assert MultChar(ctx, 1).order == 12


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


prime_and_index = st.sampled_from(PRIMES).flatmap(
    lambda p: st.tuples(st.just(p), st.integers(1, p - 2)))


@settings(max_examples=60, deadline=None)
@given(prime_and_index, st.data())
def test_multiplicativity(pm, data):
    p, m = pm
    chi = MultChar(FieldCtx(p), m)
    a = data.draw(st.integers(1, p - 1))
    b = data.draw(st.integers(1, p - 1))
    assert abs(char_eval(chi, a * b) - char_eval(chi, a) * char_eval(chi, b)) <= 1e-9
    assert abs(abs(char_eval(chi, a)) - 1) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(prime_and_index, st.data())
def test_orthogonality_under_shift(pm, data):
    p, m = pm
    chi = MultChar(FieldCtx(p), m)
    c = data.draw(st.integers(0, p - 1))
    assert abs(sum(char_eval(chi, lam + c) for lam in range(p))) <= 1e-9


def test_character_values_are_roots_of_unity():
    ctx = FieldCtx(11)
    chi = MultChar(ctx, 2)
    for a in range(1, 11):
        assert abs(char_eval(chi, a) ** chi.order - 1) < 1e-9
    assert np.allclose(np.abs(chi.table[1:]), 1)
    assert chi.table[0] == 0
    assert abs(cmath.phase(char_eval(chi, ctx.g)) - 2 * cmath.pi * 2 / 10) < 1e-12
