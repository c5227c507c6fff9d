"""Linear block-level schemes: description, dealing and recovery.

Every scheme here is linear over F_p. The dealer draws a secret vector and a
uniform randomness vector; each block receives a list of field elements that
are fixed linear forms in (secret, randomness). Inside a block each value is
split additively among the members, so only complete blocks carry
information.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..access import AccessStructure
from ..ffield import FieldCtx, NoSolution, field_ctx, solve_linear
from .simmons import SimmonsSetup


class Unauthorized(Exception):
    def __init__(self, layers: Sequence[int], message: str = ""):
        self.layers = tuple(layers)
        super().__init__(message or f"secret coordinates {list(self.layers)} not recoverable")


class UnsupportedClass(ValueError):
    pass


class Form(dict):
    """Sparse linear form: variable index -> coefficient."""

    def __add__(self, other: "Form") -> "Form":
        out = Form(self)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return out

    def __sub__(self, other: "Form") -> "Form":
        return self + (-1) * other

    def __rmul__(self, c: int) -> "Form":
        return Form({k: c * v for k, v in self.items()})

    def __neg__(self) -> "Form":
        return (-1) * self


ZERO = Form()


@dataclass(frozen=True)
class BlockRow:
    block: int       # 1-based block index
    tag: str
    coeffs: tuple[int, ...]


@dataclass(frozen=True)
class SchemeDescriptor:
    p: int
    class_id: int | None
    structure: AccessStructure
    blocks: tuple[frozenset, ...]
    identities: tuple[int, ...]
    secret_len: int
    var_names: tuple[str, ...]
    rows: tuple[BlockRow, ...]
    recipe: tuple[dict, ...]
    simmons: tuple[SimmonsSetup, ...] = ()

    @property
    def nvars(self) -> int:
        return len(self.var_names)

    @property
    def nblocks(self) -> int:
        return len(self.blocks)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array([r.coeffs for r in self.rows], dtype=np.int64).reshape(len(self.rows), self.nvars)

    @cached_property
    def block_of(self) -> dict:
        return {x: i + 1 for i, b in enumerate(self.blocks) for x in b}

    def members(self, block: int) -> list:
        return sorted(self.blocks[block - 1], key=lambda x: (str(type(x)), x))

    def rows_of(self, block: int) -> list[int]:
        return [i for i, r in enumerate(self.rows) if r.block == block]

    def tags_of(self, block: int) -> list[str]:
        return [self.rows[i].tag for i in self.rows_of(block)]

    def share_count(self, participant) -> int:
        return len(self.rows_of(self.block_of[participant]))

    def share_counts(self) -> dict:
        return {x: self.share_count(x) for x in self.structure.universe}

    def block_share_counts(self) -> tuple[int, ...]:
        return tuple(len(self.rows_of(b)) for b in range(1, self.nblocks + 1))

    def max_share_count(self) -> int:
        return max(self.share_counts().values())

    def block_edges(self) -> list[frozenset]:
        return [frozenset(self.block_of[x] for x in e) for e in self.structure.edges]

    def complete_blocks(self, subset: Iterable) -> frozenset:
        s = set(subset)
        return frozenset(i + 1 for i, b in enumerate(self.blocks) if b <= s)

    def recovery_coefficients(self, blocks: Iterable[int]) -> np.ndarray:
        """Matrix C (secret_len x nrows) with C @ block values = secret,
        supported on the rows of the given blocks. Raises Unauthorized."""
        return _recovery(self, frozenset(blocks))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "class": None if self.class_id is None else f"G{self.class_id}",
            "structure": self.structure.to_json(),
            "blocks": [sorted(b) for b in self.blocks],
            "identities": list(self.identities),
            "secret_len": self.secret_len,
            "variables": list(self.var_names),
            "rows": [{"block": r.block, "tag": r.tag, "coeffs": list(r.coeffs)} for r in self.rows],
            "recipe": list(self.recipe),
            "simmons": [s.to_json() for s in self.simmons],
        }

    @classmethod
    def from_json(cls, d: dict) -> "SchemeDescriptor":
        cid = d["class"]
        return cls(
            p=d["p"],
            class_id=None if cid is None else int(str(cid).lstrip("G")),
            structure=AccessStructure.from_edges(d["structure"]["edges"], d["structure"]["universe"]),
            blocks=tuple(frozenset(b) for b in d["blocks"]),
            identities=tuple(d["identities"]),
            secret_len=d["secret_len"],
            var_names=tuple(d["variables"]),
            rows=tuple(BlockRow(r["block"], r["tag"], tuple(r["coeffs"])) for r in d["rows"]),
            recipe=tuple(d["recipe"]),
            simmons=tuple(SimmonsSetup.from_json(s) for s in d["simmons"]),
        )


_RECOVERY_CACHE: dict = {}


def _recovery(desc: SchemeDescriptor, blocks: frozenset) -> np.ndarray:
    key = (id(desc), blocks)
    hit = _RECOVERY_CACHE.get(key)
    if hit is not None and hit[0] is desc:
        return hit[1]
    ctx = field_ctx(desc.p)
    idx = [i for i, r in enumerate(desc.rows) if r.block in blocks]
    out = np.zeros((desc.secret_len, len(desc.rows)), dtype=np.int64)
    missing = []
    if idx:
        sub_t = desc.matrix[idx].T
        for j in range(desc.secret_len):
            target = [1 if k == j else 0 for k in range(desc.nvars)]
            try:
                c = solve_linear(sub_t, target, ctx)
            except NoSolution:
                missing.append(j)
                continue
            out[j, idx] = c
    else:
        missing = list(range(desc.secret_len))
    if missing:
        raise Unauthorized(missing)
    if len(_RECOVERY_CACHE) > 4096:
        _RECOVERY_CACHE.clear()
    _RECOVERY_CACHE[key] = (desc, out)
    return out


# -- building ------------------------------------------------------------------

class Builder:
    """Collects variables, block rows and recipe nodes for one scheme."""

    def __init__(self, p: int, secret_len: int):
        self.p = p
        self.secret_len = secret_len
        self.names = [f"secret[{j}]" for j in range(secret_len)] if secret_len > 1 else ["secret"]
        self.rows: list[tuple[int, str, Form]] = []
        self.recipe: list[dict] = []
        self.simmons: list[SimmonsSetup] = []

    def secret(self, j: int = 0) -> Form:
        return Form({j: 1})

    def fresh(self, name: str) -> Form:
        self.names.append(name)
        return Form({len(self.names) - 1: 1})

    def emit(self, block: int, tag: str, form: Form) -> None:
        self.rows.append((block, tag, form))

    def node(self, **kw) -> dict:
        self.recipe.append(kw)
        return kw

    def build(self, class_id, structure, blocks, identities) -> SchemeDescriptor:
        n = len(self.names)
        rows = []
        for block, tag, form in self.rows:
            coeffs = [0] * n
            for k, v in form.items():
                coeffs[k] = v % self.p
            rows.append(BlockRow(block, tag, tuple(coeffs)))
        rows.sort(key=lambda r: r.block)  # stable: keeps emission order within a block
        return SchemeDescriptor(self.p, class_id, structure, tuple(blocks), tuple(identities),
                                self.secret_len, tuple(self.names), tuple(rows), tuple(self.recipe),
                                tuple(self.simmons))


def form_json(form: Form, names: Sequence[str], p: int) -> dict:
    return {names[k]: v % p for k, v in sorted(form.items()) if v % p}


# -- dealing and recovery ------------------------------------------------------

@dataclass
class ShareBundle:
    shares: dict  # participant -> list of (tag, value)

    def values(self, participant) -> list[int]:
        return [v for _, v in self.shares.get(participant, [])]

    def to_json(self) -> dict:
        return {str(x): [{"tag": t, "value": v} for t, v in lst] for x, lst in self.shares.items()}


def deal_block_values(desc: SchemeDescriptor, secret: Sequence[int], rng: np.random.Generator,
                      randomness: Sequence[int] | None = None) -> np.ndarray:
    p = desc.p
    if len(secret) != desc.secret_len:
        raise ValueError(f"secret must have {desc.secret_len} entries")
    nrand = desc.nvars - desc.secret_len
    if randomness is None:
        randomness = rng.integers(0, p, size=nrand)
    vec = np.concatenate([np.asarray(secret, dtype=np.int64) % p, np.asarray(randomness, dtype=np.int64)])
    return desc.matrix @ vec % p


def deal_secret(desc: SchemeDescriptor, secret: Sequence[int] | int, rng: np.random.Generator,
                randomness: Sequence[int] | None = None) -> ShareBundle:
    if isinstance(secret, (int, np.integer)):
        secret = [int(secret)]
    p = desc.p
    values = deal_block_values(desc, secret, rng, randomness)
    shares: dict = {x: [] for x in desc.structure.universe}
    for b in range(1, desc.nblocks + 1):
        members = desc.members(b)
        for i in desc.rows_of(b):
            head = [int(v) for v in rng.integers(0, p, size=len(members) - 1)]
            parts = head + [(int(values[i]) - sum(head)) % p]
            for x, v in zip(members, parts):
                shares[x].append((desc.rows[i].tag, v))
    return ShareBundle(shares)


def block_values_from(desc: SchemeDescriptor, subset: Iterable, bundle: ShareBundle) -> dict[int, list[int]]:
    """Reassemble the block-level values of every block fully inside subset."""
    out = {}
    for b in sorted(desc.complete_blocks(subset)):
        members = desc.members(b)
        k = len(desc.rows_of(b))
        out[b] = [sum(bundle.values(x)[j] for x in members) % desc.p for j in range(k)]
    return out


def recover_from_block_values(desc: SchemeDescriptor, values: Mapping[int, Sequence[int]]) -> tuple[int, ...]:
    coeffs = desc.recovery_coefficients(values.keys())
    vec = np.zeros(len(desc.rows), dtype=np.int64)
    for b, vals in values.items():
        idx = desc.rows_of(b)
        if len(idx) != len(vals):
            raise ValueError(f"block {b} expects {len(idx)} values, got {len(vals)}")
        vec[idx] = vals
    return tuple(int(v) for v in coeffs @ vec % desc.p)


def recover_secret(desc: SchemeDescriptor, subset: Iterable, bundle: ShareBundle) -> tuple[int, ...]:
    return recover_from_block_values(desc, block_values_from(desc, subset, bundle))


def classical_rate(desc: SchemeDescriptor) -> Fraction:
    return Fraction(desc.secret_len, desc.max_share_count())


def participant_matrix(desc: SchemeDescriptor) -> tuple[np.ndarray, list]:
    """Participant-level share matrix including the in-block splitting variables.

    Returns (matrix, row owners). Columns: secret, block randomness, then one
    splitting variable per (row, member) except each block's last member.
    """
    nsplit = sum(len(desc.rows_of(b)) * (len(desc.blocks[b - 1]) - 1) for b in range(1, desc.nblocks + 1))
    out = []
    owners = []
    col = desc.nvars
    for b in range(1, desc.nblocks + 1):
        members = desc.members(b)
        for i in desc.rows_of(b):
            last = np.concatenate([desc.matrix[i], np.zeros(nsplit, dtype=np.int64)])
            for x in members[:-1]:
                line = np.zeros(desc.nvars + nsplit, dtype=np.int64)
                line[col] = 1
                last[col] -= 1
                out.append(line)
                owners.append(x)
                col += 1
            out.append(last)
            owners.append(members[-1])
    return np.array(out, dtype=np.int64) % desc.p, owners


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=False, separators=(",", ":"))
