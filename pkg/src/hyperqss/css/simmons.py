"""Simmons' affine-geometry sharing of a single field element.

Points K_{i,j} live in the hyperplane whose last coordinate is 0 and the
secret line runs from K0 along the last unit vector. A dealer picks a
random row A with A.e = 1 and hands out lambda_{i,j} = k - A.K_{i,j}. A set
of holders recovers k exactly when K0 is an affine combination of their
points; the coefficients mu then give k = sum(mu * lambda).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np

from ..access import AccessStructure
from ..ffield import FieldCtx, FieldError, NoSolution, rank, solve_affine_combination


class ExhaustedAttempts(FieldError):
    pass


class BadDirection(FieldError):
    pass


PointKey = tuple  # (holder, j) with j starting at 1


@dataclass(frozen=True)
class SimmonsSetup:
    p: int
    m: int
    points: dict  # (holder, j) -> tuple of m ints
    k0: tuple[int, ...]
    direction: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.direction:
            object.__setattr__(self, "direction", tuple([0] * (self.m - 1) + [1]))

    def multiplicities(self) -> dict:
        out: dict = {}
        for holder, _ in self.points:
            out[holder] = out.get(holder, 0) + 1
        return out

    def keys_for(self, holders) -> list[PointKey]:
        hs = set(holders)
        return sorted((k for k in self.points if k[0] in hs), key=lambda k: (str(k[0]), k[1]))

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "k0": list(self.k0), "direction": list(self.direction),
                "points": [{"holder": h, "j": j, "coords": list(v)}
                           for (h, j), v in sorted(self.points.items(), key=lambda kv: (str(kv[0][0]), kv[0][1]))]}

    @classmethod
    def from_json(cls, d: dict) -> "SimmonsSetup":
        pts = {(e["holder"], e["j"]): tuple(e["coords"]) for e in d["points"]}
        return cls(d["p"], d["m"], pts, tuple(d["k0"]), tuple(d["direction"]))


def collinear(a, b, c, p: int) -> bool:
    d1 = [(x - y) % p for x, y in zip(b, a)]
    d2 = [(x - y) % p for x, y in zip(c, a)]
    return rank([d1, d2], p) <= 1


@dataclass
class SimmonsCheck:
    unsolvable_edges: list = field(default_factory=list)
    solvable_unauthorized: list = field(default_factory=list)
    collinear_triples: list = field(default_factory=list)
    off_plane: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.unsolvable_edges or self.solvable_unauthorized
                    or self.collinear_triples or self.off_plane)


def _solvable(setup: SimmonsSetup, holders, ctx: FieldCtx) -> bool:
    keys = setup.keys_for(holders)
    if not keys:
        return False
    try:
        solve_affine_combination([setup.points[k] for k in keys], setup.k0, ctx)
        return True
    except NoSolution:
        return False


def check_simmons(setup: SimmonsSetup, structure: AccessStructure, ctx: FieldCtx,
                  geometry: bool = True) -> SimmonsCheck:
    rep = SimmonsCheck()
    for key, v in list(setup.points.items()) + [("K0", setup.k0)]:
        if v[-1] % ctx.p != 0:
            rep.off_plane.append(key)
    for e in structure.edges:
        if not _solvable(setup, e, ctx):
            rep.unsolvable_edges.append(e)
    for b in structure.maximal_unauthorized():
        if _solvable(setup, b, ctx):
            rep.solvable_unauthorized.append(b)
    if geometry:
        named = list(setup.points.items()) + [("K0", setup.k0)]
        for (ka, a), (kb, b), (kc, c) in itertools.combinations(named, 3):
            if collinear(a, b, c, ctx.p):
                rep.collinear_triples.append((ka, kb, kc))
    return rep


def default_dimension(structure: AccessStructure, multiplicities: Mapping[Hashable, int]) -> int:
    def count(s):
        return sum(multiplicities.get(x, 1) for x in s)
    auth = max(count(e) for e in structure.edges)
    unauth = max((count(b) for b in structure.maximal_unauthorized()), default=0)
    return max(auth + 2, unauth + 1)


def _anchor_plan(structure: AccessStructure, keys: Sequence[PointKey]) -> list[tuple[PointKey, frozenset]]:
    """One anchor point per edge, preferring points of holders in few edges."""
    used: set = set()
    plan = []
    for e in sorted(structure.edges, key=lambda e: (len(e), sorted(map(str, e)))):
        cands = [k for k in keys if k[0] in e and k not in used]
        if not cands:
            continue
        cands.sort(key=lambda k: (sum(k[0] in f for f in structure.edges), -k[1], str(k[0])))
        used.add(cands[0])
        plan.append((cands[0], e))
    return plan


def simmons_setup(structure: AccessStructure, multiplicities: Mapping[Hashable, int], ctx: FieldCtx,
                  rng: np.random.Generator, m: int | None = None, attempts: int = 2000) -> SimmonsSetup:
    """Rejection-sample a point configuration that realizes the structure.

    Each edge gets an anchor point placed so that K0 lies in the affine hull
    of the edge; everything else is uniform in the last-coordinate-0 plane.
    The result is accepted only if every check in check_simmons passes.
    """
    p = ctx.p
    mult = {x: multiplicities.get(x, 1) for x in structure.universe}
    if m is None:
        m = default_dimension(structure, mult)
    keys = [(x, j) for x in structure.universe for j in range(1, mult[x] + 1)]
    k0 = tuple([0] * m)
    plan = _anchor_plan(structure, keys)
    anchors = {k for k, _ in plan}
    for _ in range(attempts):
        pts = {}
        for k in keys:
            if k not in anchors:
                pts[k] = tuple(int(v) for v in rng.integers(0, p, size=m - 1)) + (0,)
        ok = True
        for key, edge in plan:
            if key in pts:  # already drawn as part of an earlier edge
                continue
            others = [k for k in keys if k[0] in edge and k != key]
            missing = [k for k in others if k not in pts]
            if missing:
                for k in missing:
                    pts[k] = tuple(int(v) for v in rng.integers(0, p, size=m - 1)) + (0,)
            coeffs = [int(c) for c in rng.integers(0, p, size=len(others))]
            lead = (1 - sum(coeffs)) % p
            if lead == 0:
                ok = False
                break
            inv_lead = pow(lead, p - 2, p)
            acc = [0] * m
            for c, k in zip(coeffs, others):
                acc = [(a + c * v) % p for a, v in zip(acc, pts[k])]
            pts[key] = tuple((-a * inv_lead) % p for a in acc)
        if not ok:
            continue
        setup = SimmonsSetup(p, m, pts, k0)
        if check_simmons(setup, structure, ctx).ok:
            return setup
    raise ExhaustedAttempts(f"no valid point set after {attempts} attempts (p={p}, m={m})")


def simmons_deal(setup: SimmonsSetup, k: int, a_row: Sequence[int], ctx: FieldCtx) -> dict:
    """lambda_{i,j} = k - A.K_{i,j} for every point."""
    p = ctx.p
    if sum(x * y for x, y in zip(a_row, setup.direction)) % p != 1:
        raise BadDirection("A . direction must equal 1")
    return {key: (k - sum(x * y for x, y in zip(a_row, v))) % p for key, v in setup.points.items()}


def random_direction_row(setup: SimmonsSetup, rng: np.random.Generator) -> list[int]:
    """Uniform A with A . e = 1 for the default direction e = (0, ..., 0, 1)."""
    return [int(v) for v in rng.integers(0, setup.p, size=setup.m - 1)] + [1]


def simmons_recover(setup: SimmonsSetup, holders, lambdas: Mapping, ctx: FieldCtx) -> int:
    keys = setup.keys_for(holders)
    mu = solve_affine_combination([setup.points[k] for k in keys], setup.k0, ctx)
    return sum(c * lambdas[k] for c, k in zip(mu, keys)) % ctx.p


def check_printed_mu(points: Sequence[Sequence[int]], target: Sequence[int], mu: Sequence[int],
                     ctx: FieldCtx) -> list[int]:
    """Coordinates (0..m, with m meaning the sum-to-one row) where a printed
    coefficient vector fails the affine identity."""
    p = ctx.p
    bad = []
    for d in range(len(target)):
        if sum(c * pt[d] for c, pt in zip(mu, points)) % p != target[d] % p:
            bad.append(d)
    if sum(mu) % p != 1:
        bad.append(len(target))
    return bad
