"""Perfectness checks for linear schemes.

Two oracles are provided. `verify_perfect` deals transcripts (all of them when
the randomness space is small, a seeded sample otherwise) and inspects the
empirical behaviour; `rank_report` decides the same questions exactly from
the share matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2_contingency

from ..ffield import rank, row_reduce
from .scheme import SchemeDescriptor, Unauthorized, participant_matrix


@dataclass
class PerfectReport:
    recover_ok: bool
    secrecy_ok: bool
    mode: str                       # "exhaustive" | "sampled"
    transcripts: int
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.recover_ok and self.secrecy_ok


def _all_vectors(p: int, n: int) -> np.ndarray:
    total = p ** n
    idx = np.arange(total, dtype=np.int64)
    out = np.empty((n, total), dtype=np.int64)
    for k in range(n):
        out[k] = idx % p
        idx //= p
    return out


def _view_rows(owners: list, subset) -> list[int]:
    s = set(subset)
    return [i for i, x in enumerate(owners) if x in s]


def _secret_code(secrets: np.ndarray, p: int) -> np.ndarray:
    code = np.zeros(secrets.shape[1], dtype=np.int64)
    for j in reversed(range(secrets.shape[0])):
        code = code * p + secrets[j]
    return code


def _exact_uniform(view: np.ndarray, code: np.ndarray, ncodes: int) -> bool:
    """Every distinct view value occurs equally often with every secret."""
    if view.shape[0] == 0:
        counts = np.bincount(code, minlength=ncodes)
        return bool(np.all(counts == counts[0]))
    _, inv = np.unique(view.T, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    table = np.bincount(inv * ncodes + code, minlength=(inv.max() + 1) * ncodes)
    table = table.reshape(-1, ncodes)
    return bool(np.all(table == table[:, :1]))


def _leak_functional(view: np.ndarray, secrets: np.ndarray, p: int):
    """Find (phi, psi) with psi.secret = phi.view on every column, psi != 0."""
    nview = view.shape[0]
    stacked = np.concatenate([view, secrets], axis=0).T % p   # samples x (nview + nsec)
    red, pivots = row_reduce(stacked, p)
    ncols = stacked.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    for f in free:
        if f < nview:
            continue
        vec = np.zeros(ncols, dtype=np.int64)
        vec[f] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = (-red[i, f]) % p
        return vec[:nview], (-vec[nview:]) % p
    return None


def _chi2_secrecy(view: np.ndarray, secrets: np.ndarray, p: int, rng: np.random.Generator) -> float:
    """Independence test between the secret and one linear feature of the view.

    The first half of the samples is used to look for an exact linear relation
    between view and secret; if one exists the feature is that relation,
    otherwise a random functional of the view. The test runs on the second
    half.
    """
    n = secrets.shape[1]
    half = n // 2
    train_v, test_v = view[:, :half], view[:, half:]
    train_s, test_s = secrets[:, :half], secrets[:, half:]
    found = _leak_functional(train_v, train_s, p) if view.shape[0] else None
    if found is not None:
        phi, psi = found
        feature = phi @ test_v % p
        target = psi @ test_s % p
        ntarget = p
    else:
        phi = rng.integers(0, p, size=view.shape[0]) if view.shape[0] else np.zeros(0, dtype=np.int64)
        feature = phi @ test_v % p if view.shape[0] else np.zeros(test_s.shape[1], dtype=np.int64)
        target = _secret_code(test_s, p)
        ntarget = p ** secrets.shape[0]
    table = np.zeros((p, ntarget), dtype=np.int64)
    np.add.at(table, (feature, target), 1)
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    if table.shape[0] < 2 or table.shape[1] < 2:
        # a constant target given a constant feature: degenerate, flags a leak
        return 0.0 if table.shape[1] < 2 else 1.0
    return float(chi2_contingency(table)[1])


def verify_perfect(desc: SchemeDescriptor, budget: int = 100_000, rng: np.random.Generator | None = None,
                   alpha: float = 0.01) -> PerfectReport:
    """Check recovery for every edge and secrecy for every maximal unauthorized set.

    Exhaustive when p^(secret + randomness) <= budget: secrecy then means
    each view value co-occurs equally often with every secret. Otherwise
    `budget` uniform transcripts are drawn and each maximal unauthorized set
    gets a chi-square independence test; alpha is split evenly across the sets
    (Bonferroni) so the whole report has family-wise level alpha.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    p = desc.p
    mat, owners = participant_matrix(desc)
    nv = mat.shape[1]
    exhaustive = nv * np.log(p) <= np.log(budget) + 1e-9
    if exhaustive:
        vecs = _all_vectors(p, nv)
    else:
        vecs = rng.integers(0, p, size=(nv, budget), dtype=np.int64)
    shares = mat @ vecs % p
    secrets = vecs[:desc.secret_len]
    ncodes = p ** desc.secret_len
    code = _secret_code(secrets, p)

    recover_fail = []
    for e in desc.structure.edges:
        try:
            coeffs = desc.recovery_coefficients(desc.complete_blocks(e))
        except Unauthorized:
            recover_fail.append(sorted(e))
            continue
        block_vals = np.zeros((len(desc.rows), shares.shape[1]), dtype=np.int64)
        # reassemble block values from member shares, as the members would
        for b in desc.complete_blocks(e):
            members = set(desc.blocks[b - 1])
            rows = desc.rows_of(b)
            member_rows = [i for i, x in enumerate(owners) if x in members]
            per_row = len(members)
            for k, r in enumerate(rows):
                block_vals[r] = shares[member_rows[k * per_row:(k + 1) * per_row]].sum(axis=0) % p
        got = coeffs @ block_vals % p
        if not np.array_equal(got, secrets):
            recover_fail.append(sorted(e))

    alpha_each = alpha / max(1, len(desc.structure.maximal_unauthorized()))
    secrecy_fail = []
    pvalues = {}
    for bset in desc.structure.maximal_unauthorized():
        view = shares[_view_rows(owners, bset)]
        key = "".join(str(x) for x in sorted(bset)) if all(isinstance(x, int) for x in bset) else str(sorted(bset))
        if exhaustive:
            ok = _exact_uniform(view, code, ncodes)
        else:
            pv = _chi2_secrecy(view, secrets, p, rng)
            pvalues[key] = pv
            ok = pv > alpha_each
        if not ok:
            secrecy_fail.append(sorted(bset))
    stats = {"recover_failures": recover_fail, "secrecy_failures": secrecy_fail,
             "variables": int(nv), "alpha_per_set": alpha_each}
    if pvalues:
        stats["pvalues"] = pvalues
    return PerfectReport(not recover_fail, not secrecy_fail, "exhaustive" if exhaustive else "sampled",
                         int(vecs.shape[1]), stats)


@dataclass
class RankReport:
    unrecoverable_edges: list
    leaking_sets: list

    @property
    def ok(self) -> bool:
        return not (self.unrecoverable_edges or self.leaking_sets)


def rank_report(desc: SchemeDescriptor) -> RankReport:
    """Exact linear-algebra verdict at participant level.

    A set recovers the secret iff the secret unit vectors lie in the row
    space of its shares; it learns nothing iff adding them raises the rank
    by the full secret length.
    """
    p = desc.p
    mat, owners = participant_matrix(desc)
    unit = np.eye(desc.secret_len, mat.shape[1], dtype=np.int64)
    bad_edges, leaks = [], []
    for e in desc.structure.edges:
        rows = mat[_view_rows(owners, e)]
        if rank(np.vstack([rows, unit]), p) != rank(rows, p):
            bad_edges.append(sorted(e))
    for bset in desc.structure.maximal_unauthorized():
        rows = mat[_view_rows(owners, bset)]
        base = rank(rows, p) if len(rows) else 0
        if rank(np.vstack([rows, unit]) if len(rows) else unit, p) != base + desc.secret_len:
            leaks.append(sorted(bset))
    return RankReport(bad_edges, leaks)
