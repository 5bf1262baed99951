"""Prime-field and polynomial arithmetic.

Field elements are plain Python ints in ``[0, p)``; the modulus travels with
the containing structure (``Poly``, ``BiPoly``) or is passed per call.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Sequence

from .errors import LengthMismatch, NonInvertible, ParamError

MAX_MODULUS = 1 << 61


def is_prime(n: int) -> bool:
    """Deterministic trial division; fine for the desk-scale moduli used here."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    for d in range(5, isqrt(n) + 1, 6):
        if n % d == 0 or n % (d + 2) == 0:
            return False
    return True


def check_modulus(p: int) -> None:
    if not isinstance(p, int) or p < 2 or p >= MAX_MODULUS:
        raise ParamError(f"modulus must be an integer in [2, 2^61), got {p!r}")
    if not is_prime(p):
        raise ParamError(f"p = {p} is not prime")


def fe_inv(a: int, p: int) -> int:
    """Multiplicative inverse of ``a`` modulo ``p`` via the extended Euclidean algorithm."""
    a %= p
    if a == 0:
        raise NonInvertible(f"0 has no inverse modulo {p}")
    old_r, r = a, p
    old_s, s = 1, 0
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
    if old_r != 1:
        raise NonInvertible(f"{a} is not invertible modulo {p}")
    return old_s % p


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial over GF(p), constant term first.

    ``len(coeffs)`` is the degree bound; it is never trimmed, so a share of
    degree bound h keeps h slots even when leading coefficients are zero.
    """

    coeffs: tuple[int, ...]
    p: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("polynomial needs at least one coefficient slot")
        if any(not 0 <= c < self.p for c in self.coeffs):
            raise ValueError("coefficients must be reduced modulo p")

    @property
    def degree_bound(self) -> int:
        return len(self.coeffs)

    def __call__(self, x: int) -> int:
        return poly_eval(self, x)

    def __add__(self, other: Poly) -> Poly:
        if other.p != self.p:
            raise ValueError("moduli differ")
        size = max(self.degree_bound, other.degree_bound)
        a = self.coeffs + (0,) * (size - self.degree_bound)
        b = other.coeffs + (0,) * (size - other.degree_bound)
        return Poly(tuple((x + y) % self.p for x, y in zip(a, b)), self.p)


def poly_eval(f: Poly, x: int, p: int | None = None) -> int:
    """Horner evaluation of ``f`` at ``x``."""
    p = f.p if p is None else p
    x %= p
    acc = 0
    for c in reversed(f.coeffs):
        acc = (acc * x + c) % p
    return acc


@dataclass(frozen=True)
class BiPoly:
    """Bivariate polynomial; ``coeffs[u][v]`` multiplies ``x**u * y**v``.

    The matrix is exactly ``t`` rows (x-degree bound) by ``h`` columns
    (y-degree bound).
    """

    coeffs: tuple[tuple[int, ...], ...]
    p: int

    def __post_init__(self):
        rows = tuple(tuple(int(c) for c in row) for row in self.coeffs)
        object.__setattr__(self, "coeffs", rows)
        if not rows or not rows[0]:
            raise ValueError("empty coefficient matrix")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("ragged coefficient matrix")
        if any(not 0 <= c < self.p for r in rows for c in r):
            raise ValueError("coefficients must be reduced modulo p")

    @property
    def deg_x_bound(self) -> int:
        return len(self.coeffs)

    @property
    def deg_y_bound(self) -> int:
        return len(self.coeffs[0])

    def __call__(self, x: int, y: int) -> int:
        return poly_eval(bipoly_eval_partial(self, "fix_x", x), y)


def bipoly_eval_partial(F: BiPoly, axis: str, point: int, p: int | None = None) -> Poly:
    """Restrict ``F`` along one axis.

    ``axis="fix_x"`` returns ``F(point, y)`` (a polynomial in y with
    ``deg_y_bound`` slots); ``axis="fix_y"`` returns ``F(x, point)`` with
    ``deg_x_bound`` slots.
    """
    p = F.p if p is None else p
    point %= p
    if axis == "fix_x":
        out = [0] * F.deg_y_bound
        power = 1
        for row in F.coeffs:
            for v, c in enumerate(row):
                out[v] = (out[v] + c * power) % p
            power = power * point % p
        return Poly(tuple(out), p)
    if axis == "fix_y":
        out = []
        for row in F.coeffs:
            out.append(poly_eval(Poly(row, p), point))
        return Poly(tuple(out), p)
    raise ValueError(f"axis must be 'fix_x' or 'fix_y', got {axis!r}")


def encode_width(p: int) -> int:
    """Byte width used to serialise elements of GF(p)."""
    return max(1, ((p - 1).bit_length() + 7) // 8)


def fe_encode(a: int, p: int) -> bytes:
    if not 0 <= a < p:
        raise ValueError(f"{a} is not reduced modulo {p}")
    return a.to_bytes(encode_width(p), "big")


def fe_decode(data: bytes, p: int) -> int:
    if len(data) != encode_width(p):
        raise LengthMismatch(f"expected {encode_width(p)} bytes, got {len(data)}")
    a = int.from_bytes(data, "big")
    if a >= p:
        raise ValueError(f"decoded value {a} is not reduced modulo {p}")
    return a


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise LengthMismatch(f"cannot xor {len(a)} bytes with {len(b)} bytes")
    return bytes(x ^ y for x, y in zip(a, b))


def xor_all(chunks: Sequence[bytes]) -> bytes:
    acc = chunks[0]
    for c in chunks[1:]:
        acc = xor_bytes(acc, c)
    return acc
