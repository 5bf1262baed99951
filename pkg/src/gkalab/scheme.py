"""Token issuance by the registration centre and pairwise key derivation.

The master secret is an asymmetric bivariate polynomial ``F(x, y)`` with
x-degree below ``t`` and y-degree below ``h``. Participant ``U_i`` sits at
the public point ``x_i = i`` and receives

* ``s_y = F(x_i, y)`` (``h`` coefficients), and
* ``s_x = F(x, x_i)`` (``t`` coefficients).

The pair ``{i, j}`` shares ``F(x_lo, x_hi)`` where ``lo < hi``: the lower
party evaluates its ``s_y`` at ``x_hi`` and the higher party evaluates its
``s_x`` at ``x_lo``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .errors import ParamError, SelfKeyError
from .gfpoly import BiPoly, Poly, bipoly_eval_partial, check_modulus, poly_eval


@dataclass(frozen=True)
class SchemeParams:
    p: int
    n: int
    t: int
    h: int

    def __post_init__(self):
        check_modulus(self.p)
        if self.n < 2:
            raise ParamError("n >= 2 violated")
        if self.p <= self.n:
            raise ParamError("p > n violated")
        if self.t < 1:
            raise ParamError("t >= 1 violated")
        if self.h < 1:
            raise ParamError("h >= 1 violated")
        if self.h <= 2 * self.t - 2:
            raise ParamError("h > 2t−2 violated")

    def public_point(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise ParamError(f"participant index {i} outside [1, {self.n}]")
        return i


@dataclass(frozen=True)
class MasterSecret:
    F: BiPoly


@dataclass(frozen=True)
class Token:
    owner: int
    s_y: Poly
    s_x: Poly

    @property
    def p(self) -> int:
        return self.s_y.p

    @property
    def h(self) -> int:
        return self.s_y.degree_bound

    @property
    def t(self) -> int:
        return self.s_x.degree_bound

    def to_dict(self) -> dict:
        return {
            "owner": self.owner,
            "p": self.p,
            "t": self.t,
            "h": self.h,
            "s_y": list(self.s_y.coeffs),
            "s_x": list(self.s_x.coeffs),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> Token:
        p = int(d["p"])
        s_y = Poly(tuple(d["s_y"]), p)
        s_x = Poly(tuple(d["s_x"]), p)
        if s_y.degree_bound != int(d["h"]) or s_x.degree_bound != int(d["t"]):
            raise ValueError("share lengths disagree with declared t, h")
        return cls(int(d["owner"]), s_y, s_x)

    @classmethod
    def from_json(cls, text: str) -> Token:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class PairwiseKey:
    k: int
    endpoints: frozenset


def random_master_secret(params: SchemeParams, rng: random.Random) -> MasterSecret:
    rows = tuple(
        tuple(rng.randrange(params.p) for _ in range(params.h)) for _ in range(params.t)
    )
    return MasterSecret(BiPoly(rows, params.p))


def issue_token(master: MasterSecret, params: SchemeParams, i: int) -> Token:
    x_i = params.public_point(i)
    return Token(
        owner=i,
        s_y=bipoly_eval_partial(master.F, "fix_x", x_i),
        s_x=bipoly_eval_partial(master.F, "fix_y", x_i),
    )


def mrc_setup(params: SchemeParams, seed: int) -> tuple[MasterSecret, list[Token]]:
    """Draw a master secret from ``seed`` and issue one token per participant."""
    if not isinstance(params, SchemeParams):
        params = SchemeParams(*params)
    master = random_master_secret(params, random.Random(seed))
    tokens = [issue_token(master, params, i) for i in range(1, params.n + 1)]
    return master, tokens


def derive_pairwise_key(token: Token, peer: int) -> PairwiseKey:
    i = token.owner
    if peer == i:
        raise SelfKeyError(f"U_{i} cannot derive a key with itself")
    if peer < 1 or peer >= token.p:
        raise ParamError(f"peer index {peer} has no public point")
    if i < peer:
        k = poly_eval(token.s_y, peer)
    else:
        k = poly_eval(token.s_x, peer)
    return PairwiseKey(k, frozenset((i, peer)))
