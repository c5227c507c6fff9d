"""Arithmetic and linear algebra over a prime field F_p."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np


class FieldError(ValueError):
    pass


class ZeroInverse(FieldError):
    pass


class ZeroArgument(FieldError):
    pass


class NotPrime(FieldError):
    pass


class NoSolution(FieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _order(a: int, p: int) -> int:
    x, e = a % p, 1
    while x != 1:
        x = x * a % p
        e += 1
    return e


def find_primitive(p: int) -> int:
    """Smallest generator of the multiplicative group of F_p."""
    if not is_prime(p) or p == 2:
        raise NotPrime(f"{p} is not an odd prime")
    for a in range(2, p):
        if _order(a, p) == p - 1:
            return a
    raise NotPrime(f"no primitive element for {p}")  # unreachable for primes


@dataclass(frozen=True)
class FieldCtx:
    p: int
    c: int = field(init=False)
    pow_table: tuple[int, ...] = field(init=False, repr=False)
    log_table: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if not is_prime(self.p) or self.p < 5:
            raise NotPrime(f"field modulus must be a prime >= 5, got {self.p}")
        c = find_primitive(self.p)
        pows = [1]
        for _ in range(self.p - 2):
            pows.append(pows[-1] * c % self.p)
        logs = [-1] * self.p
        for e, v in enumerate(pows):
            logs[v] = e
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "pow_table", tuple(pows))
        object.__setattr__(self, "log_table", tuple(logs))

    def norm(self, a: int) -> int:
        return a % self.p

    def vec(self, entries: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(x) % self.p for x in entries)


@lru_cache(maxsize=None)
def field_ctx(p: int) -> FieldCtx:
    return FieldCtx(p)


def inv(a: int, ctx: FieldCtx) -> int:
    a %= ctx.p
    if a == 0:
        raise ZeroInverse("0 has no inverse")
    return pow(a, ctx.p - 2, ctx.p)


def discrete_log(v: int, ctx: FieldCtx) -> int:
    v %= ctx.p
    if v == 0:
        raise ZeroArgument("log of 0 is undefined")
    return ctx.log_table[v]


def row_reduce(mat, p: int):
    """Reduced row echelon form mod p. Returns (rref, pivot columns).

    Columns are processed left to right and the first row with a nonzero
    entry in the current column becomes the pivot.
    """
    m = np.array(mat, dtype=np.int64) % p
    if m.ndim != 2:
        m = m.reshape(len(m), -1)
    rows, cols = m.shape
    pivots = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, col])[0]
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = m[r] * pow(int(m[r, col]), p - 2, p) % p
        others = np.nonzero(m[:, col])[0]
        others = others[others != r]
        if len(others):
            m[others] = (m[others] - np.outer(m[others, col], m[r])) % p
        pivots.append(col)
        r += 1
    return m, pivots


def rank(mat, p: int) -> int:
    if len(mat) == 0:
        return 0
    return len(row_reduce(mat, p)[1])


def solve_linear(a, b, ctx: FieldCtx) -> list[int]:
    """Solve a x = b over F_p; free variables are set to 0."""
    a = np.array(a, dtype=np.int64) % ctx.p
    if a.ndim == 1:
        a = a.reshape(1, -1)
    n = a.shape[1]
    aug = np.concatenate([a, np.array(b, dtype=np.int64).reshape(-1, 1) % ctx.p], axis=1)
    red, pivots = row_reduce(aug, ctx.p)
    if n in pivots:
        raise NoSolution("inconsistent linear system")
    x = [0] * n
    for i, col in enumerate(pivots):
        x[col] = int(red[i, n])
    return x


def solve_affine_combination(points: Sequence[Sequence[int]], target: Sequence[int],
                             ctx: FieldCtx) -> list[int]:
    """Coefficients mu with sum(mu_i * point_i) = target and sum(mu_i) = 1."""
    if not points:
        raise NoSolution("no points")
    dim = len(target)
    if any(len(pt) != dim for pt in points):
        raise ValueError("points and target must share a dimension")
    rows = [[pt[d] for pt in points] for d in range(dim)]
    rows.append([1] * len(points))
    rhs = list(target) + [1]
    return solve_linear(rows, rhs, ctx)
