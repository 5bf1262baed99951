import random

import pytest
from hypothesis import given, strategies as st

from gkalab.errors import LengthMismatch, NonInvertible, ParamError
from gkalab.gfpoly import (
    BiPoly,
    Poly,
    bipoly_eval_partial,
    check_modulus,
    encode_width,
    fe_decode,
    fe_encode,
    fe_inv,
    is_prime,
    poly_eval,
    xor_bytes,
)

SMALL_PRIMES = [p for p in range(2, 1010) if all(p % d for d in range(2, p))]


def power_sum(coeffs, x, p):
    """Oracle: sum a_d * x^d with independent modular powers (no Horner)."""
    return sum(a * pow(x, d, p) for d, a in enumerate(coeffs)) % p


def double_sum(rows, x, y, p):
    return sum(c * pow(x, u, p) * pow(y, v, p)
               for u, row in enumerate(rows) for v, c in enumerate(row)) % p


def test_is_prime_matches_sieve():
    assert [n for n in range(1010) if is_prime(n)] == SMALL_PRIMES


@pytest.mark.parametrize("p", [0, 1, 4, 1008, 2**61 + 1])
def test_check_modulus_rejects(p):
    with pytest.raises(ParamError):
        check_modulus(p)


def test_fe_inv_examples():
    assert fe_inv(3, 7) == 5
    assert fe_inv(1, 7) == 1
    with pytest.raises(NonInvertible):
        fe_inv(0, 7)


@pytest.mark.parametrize("p", [p for p in SMALL_PRIMES if p in (2, 3, 7, 101, 257, 1009)])
def test_fe_inv_exhaustive(p):
    for a in range(1, p):
        assert a * fe_inv(a, p) % p == 1


def test_fe_inv_all_primes_up_to_1009():
    for p in SMALL_PRIMES:
        assert all(a * fe_inv(a, p) % p == 1 for a in range(1, p))


def test_fe_inv_large_modulus():
    p = 2**61 - 1
    a = 123456789123456789
    assert a * fe_inv(a, p) % p == 1


def test_poly_eval_examples():
    assert poly_eval(Poly((5,), 7), 3) == 5
    assert poly_eval(Poly((2, 3), 7), 4) == 0


def test_poly_eval_matches_power_sum():
    rng = random.Random(1)
    p = 101
    for _ in range(500):
        coeffs = [rng.randrange(p) for _ in range(rng.randint(1, 7))]
        x = rng.randrange(p)
        assert poly_eval(Poly(tuple(coeffs), p), x) == power_sum(coeffs, x, p)


def test_poly_keeps_degree_bound():
    f = Poly((1, 0, 0, 0), 7)
    assert f.degree_bound == 4
    with pytest.raises(ValueError):
        Poly((7,), 7)


coeff_lists = st.lists(st.integers(0, 100), min_size=1, max_size=8)


@given(coeff_lists, coeff_lists, st.integers(0, 100))
def test_poly_eval_linear(a, b, x):
    f, g = Poly(tuple(a), 101), Poly(tuple(b), 101)
    assert poly_eval(f + g, x) == (poly_eval(f, x) + poly_eval(g, x)) % 101


def test_bipoly_partial_examples():
    const = BiPoly(((4, 0, 0), (0, 0, 0)), 7)
    assert bipoly_eval_partial(const, "fix_x", 3).coeffs == (4, 0, 0)
    assert bipoly_eval_partial(const, "fix_y", 3).coeffs == (4, 0)
    xy = BiPoly(((0, 0), (0, 1)), 7)
    assert bipoly_eval_partial(xy, "fix_x", 3).coeffs == (0, 3)


def test_bipoly_partial_matches_double_sum():
    rng = random.Random(2)
    p, t, h = 101, 2, 4
    for _ in range(200):
        rows = tuple(tuple(rng.randrange(p) for _ in range(h)) for _ in range(t))
        F = BiPoly(rows, p)
        a, b = rng.randrange(p), rng.randrange(p)
        oracle = double_sum(rows, a, b, p)
        assert poly_eval(bipoly_eval_partial(F, "fix_x", a), b) == oracle
        assert poly_eval(bipoly_eval_partial(F, "fix_y", b), a) == oracle
        assert F(a, b) == oracle


@given(st.data())
def test_bipoly_partial_consistency(data):
    t = data.draw(st.integers(1, 4))
    h = data.draw(st.integers(1, 6))
    rows = tuple(tuple(data.draw(st.integers(0, 100)) for _ in range(h)) for _ in range(t))
    F = BiPoly(rows, 101)
    a, b = data.draw(st.integers(0, 100)), data.draw(st.integers(0, 100))
    assert bipoly_eval_partial(F, "fix_x", a)(b) == bipoly_eval_partial(F, "fix_y", b)(a)


def test_bipoly_shape_checks():
    with pytest.raises(ValueError):
        BiPoly(((1, 2), (3,)), 7)
    with pytest.raises(ValueError):
        bipoly_eval_partial(BiPoly(((1,),), 7), "fix_z", 1)


def test_fe_encode_examples():
    assert fe_encode(5, 251) == b"\x05"
    assert fe_encode(5, 257) == b"\x00\x05"
    assert fe_encode(0, 257) == b"\x00\x00"
    assert encode_width(2) == 1


@pytest.mark.parametrize("p", [2, 3, 251, 257, 1009])
def test_fe_encode_injective_and_fixed_width(p):
    encoded = [fe_encode(a, p) for a in range(p)]
    assert len(set(encoded)) == p
    assert {len(e) for e in encoded} == {encode_width(p)}
    assert [fe_decode(e, p) for e in encoded] == list(range(p))


def test_fe_encode_all_primes_up_to_1009():
    for p in SMALL_PRIMES:
        enc = {fe_encode(a, p) for a in range(p)}
        assert len(enc) == p and {len(e) for e in enc} == {encode_width(p)}


def test_fe_decode_rejects():
    with pytest.raises(LengthMismatch):
        fe_decode(b"\x01", 257)
    with pytest.raises(ValueError):
        fe_decode(b"\x01\x01", 257)


def test_xor_examples():
    a = bytes(range(8))
    assert xor_bytes(a, a) == bytes(8)
    assert xor_bytes(a, bytes(8)) == a
    assert xor_bytes(b"\x0f", b"\xf0") == b"\xff"
    with pytest.raises(LengthMismatch):
        xor_bytes(b"\x00", b"\x00\x00")


@given(st.integers(0, 16).flatmap(lambda n: st.tuples(
    st.binary(min_size=n, max_size=n), st.binary(min_size=n, max_size=n),
    st.binary(min_size=n, max_size=n))))
def test_xor_algebra(triple):
    a, b, c = triple
    assert xor_bytes(xor_bytes(a, b), c) == xor_bytes(a, xor_bytes(b, c))
    assert xor_bytes(a, b) == xor_bytes(b, a)
    assert xor_bytes(xor_bytes(a, b), b) == a
