"""Additive (m, m) splitting and Shamir threshold sharing over F_p."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..ffield import FieldCtx, FieldError, NoSolution, solve_linear


class SingularSystem(FieldError):
    pass


def additive_split(secret: int, m: int, rng: np.random.Generator, ctx: FieldCtx) -> list[int]:
    if m < 1:
        raise ValueError("need at least one share")
    head = [int(x) for x in rng.integers(0, ctx.p, size=m - 1)]
    return head + [(secret - sum(head)) % ctx.p]


def additive_reconstruct(shares: Sequence[int], ctx: FieldCtx) -> int:
    return sum(shares) % ctx.p


def shamir_deal(secret: int, coeffs: Sequence[int], points: Sequence[int], ctx: FieldCtx) -> list[int]:
    """Evaluate f(x) = secret + c1 x + c2 x^2 + ... at each point."""
    if len(set(x % ctx.p for x in points)) != len(points) or any(x % ctx.p == 0 for x in points):
        raise SingularSystem("evaluation points must be distinct and nonzero")
    poly = [secret] + list(coeffs)
    out = []
    for x in points:
        acc = 0
        for c in reversed(poly):
            acc = (acc * x + c) % ctx.p
        out.append(acc)
    return out


def shamir_combine(pairs: Sequence[tuple[int, int]], ctx: FieldCtx) -> int:
    """Constant term of the unique polynomial of degree len(pairs)-1 through pairs."""
    xs = [x % ctx.p for x, _ in pairs]
    if len(set(xs)) != len(xs):
        raise SingularSystem("repeated evaluation points")
    vander = [[pow(x, k, ctx.p) for k in range(len(xs))] for x in xs]
    try:
        return solve_linear(vander, [y for _, y in pairs], ctx)[0]
    except NoSolution as exc:  # cannot happen for distinct points
        raise SingularSystem(str(exc)) from exc
