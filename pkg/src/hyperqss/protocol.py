"""End-to-end quantum share distribution, in-block subkey circulation and delivery.

Every classical value travels as n_info copies of one MUB eigenstate mixed with
n_decoy level-0 decoys. The receiver checks the decoys once their positions
are announced, then accepts the information particles if they all agree.
The classical side channel (decoy positions, retry requests) is treated as
authenticated and free.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .css.scheme import (SchemeDescriptor, ShareBundle, Unauthorized, deal_secret,
                         recover_from_block_values)
from .ffield import discrete_log, field_ctx, rank
from .qudit import basis_matrix, basis_stack, measure_many

ACCEPT = "accept"
ABORT_EAVESDROP = "abort-eavesdrop"
RETRY_UNEQUAL = "retry-unequal"
RETRIES_EXHAUSTED = "retries-exhausted"


class ProtocolError(Exception):
    def __init__(self, message: str, fragment=None):
        super().__init__(message)
        self.fragment = fragment


class DistributionAborted(ProtocolError):
    pass


class CirculationAborted(ProtocolError):
    pass


class DeliveryAborted(ProtocolError):
    pass


class InsufficientSubkeys(ProtocolError):
    pass


class InconsistentSystem(ProtocolError):
    pass


def poly_hash(pair: Sequence[int], x: int, p: int) -> int:
    """Almost-universal hash: pair[0] + pair[1] * x mod p."""
    return (int(pair[0]) + int(pair[1]) * int(x)) % p


def _nonzero_keys(rng: np.random.Generator, p: int, labels: Iterable) -> dict:
    return {x: int(rng.integers(1, p)) for x in labels}


@dataclass(frozen=True)
class SessionConfig:
    """Public parameters and pre-shared keys for one session.

    system_keys: participant -> nonzero key shared with the dealer.
    block_keys: block -> nonzero key shared inside the block.
    combiner_keys: block -> nonzero key shared with the combiner.
    Missing key tables are drawn from the seed.
    """
    descriptor: SchemeDescriptor
    n_info: int = 3
    n_decoy: int = 10
    threshold: float = 0.0
    seed: int = 0
    system_keys: Mapping | None = None
    block_keys: Mapping | None = None
    combiner_keys: Mapping | None = None
    dealer_id: int = 0
    combiner_id: int = 0
    retry_budget: int = 16

    def __post_init__(self):
        if self.n_info < 1:
            raise ValueError("n_info must be at least 1")
        if self.n_decoy < 0:
            raise ValueError("n_decoy must be non-negative")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        p = self.p
        if self.dealer_id % p in {x % p for x in self.descriptor.identities}:
            raise ValueError("dealer identity collides with a block identity")
        krng = np.random.default_rng([self.seed, 0x6b657973])
        nb = range(1, self.descriptor.nblocks + 1)
        tables = {
            "system_keys": (self.system_keys, self.descriptor.structure.universe),
            "block_keys": (self.block_keys, nb),
            "combiner_keys": (self.combiner_keys, nb),
        }
        for name, (given, labels) in tables.items():
            table = dict(given) if given is not None else _nonzero_keys(krng, p, labels)
            missing = [x for x in labels if x not in table]
            if missing:
                raise ValueError(f"{name} lacks entries for {missing}")
            if any(table[x] % p == 0 for x in labels):
                raise ValueError(f"{name} must be nonzero")
            object.__setattr__(self, name, table)

    @property
    def p(self) -> int:
        return self.descriptor.p

    def identity(self, block: int) -> int:
        return self.descriptor.identities[block - 1]

    def distribution_basis(self, participant) -> int:
        block = self.descriptor.block_of[participant]
        return poly_hash((self.dealer_id, self.identity(block)), self.system_keys[participant], self.p)

    def circulation_level(self, block: int) -> int:
        return discrete_log(self.block_keys[block], field_ctx(self.p))

    def circulation_decoy_basis(self, block: int) -> int:
        x = self.identity(block)
        return poly_hash((x, x), self.block_keys[block], self.p)

    def delivery_basis(self, block: int) -> int:
        return discrete_log(self.combiner_keys[block], field_ctx(self.p))

    def delivery_decoy_basis(self, block: int) -> int:
        return poly_hash((self.combiner_id, self.identity(block)), self.combiner_keys[block], self.p)


# -- particles -----------------------------------------------------------------

@dataclass
class ParticleSequence:
    amps: np.ndarray            # n x p, one state per row
    decoy: np.ndarray           # boolean mask, revealed after receipt

    @property
    def n_info(self) -> int:
        return int((~self.decoy).sum())

    @property
    def n_decoy(self) -> int:
        return int(self.decoy.sum())

    @property
    def decoy_positions(self) -> list[int]:
        return [int(i) for i in np.nonzero(self.decoy)[0]]


def encode_value(value: int, basis: int, config: SessionConfig, rng: np.random.Generator,
                 decoy_basis: int | None = None, n_info: int | None = None) -> ParticleSequence:
    """n_info copies of |e^(basis)_value> and n_decoy decoys at rng-chosen positions."""
    p = config.p
    n_info = config.n_info if n_info is None else n_info
    decoy_basis = basis if decoy_basis is None else decoy_basis
    n = n_info + config.n_decoy
    mask = np.zeros(n, dtype=bool)
    if config.n_decoy:
        mask[rng.choice(n, size=config.n_decoy, replace=False)] = True
    amps = np.empty((n, p), dtype=complex)
    amps[~mask] = basis_matrix(p, basis % p)[:, value % p]
    amps[mask] = basis_matrix(p, decoy_basis % p)[:, 0]
    return ParticleSequence(amps, mask)


def _shift_levels(seq: ParticleSequence, x: int, p: int) -> None:
    """U_{x,0} on the information particles only."""
    k = np.arange(p)
    seq.amps[~seq.decoy] *= np.exp(2j * np.pi * ((x * k) % p) / p)


@dataclass
class Reception:
    value: int | None
    decoy_error_rate: float
    verdict: str


def check_decoys(seq: ParticleSequence, decoy_basis: int, rng: np.random.Generator) -> float:
    if not seq.n_decoy:
        return 0.0
    out, _ = measure_many(seq.amps[seq.decoy], decoy_basis % seq.amps.shape[1], rng)
    return float(np.count_nonzero(out) / len(out))


def receive_value(seq: ParticleSequence, basis: int, config: SessionConfig, rng: np.random.Generator,
                  decoy_basis: int | None = None) -> Reception:
    decoy_basis = basis if decoy_basis is None else decoy_basis
    err = check_decoys(seq, decoy_basis, rng)
    if err > config.threshold:
        return Reception(None, err, ABORT_EAVESDROP)
    out, _ = measure_many(seq.amps[~seq.decoy], basis % config.p, rng)
    if np.all(out == out[0]):
        return Reception(int(out[0]), err, ACCEPT)
    return Reception(None, err, RETRY_UNEQUAL)


# -- eavesdropper --------------------------------------------------------------

@dataclass(frozen=True)
class EveModel:
    """Intercept-resend attacker.

    basis_choice "protocol" draws each particle's basis uniformly from the p
    MUB groups, "all" also allows the computational basis. Hops are attacked
    when their phase is in `phases` and, if `receivers` is set, the receiver
    label is in it.
    """
    strategy: str = "none"                     # "none" | "intercept"
    basis_choice: str = "protocol"             # "protocol" | "all"
    phases: frozenset = frozenset({"distribution", "circulation", "delivery"})
    receivers: frozenset | None = None

    def __post_init__(self):
        if self.strategy not in ("none", "intercept"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.basis_choice not in ("protocol", "all"):
            raise ValueError(f"unknown basis choice {self.basis_choice!r}")

    @classmethod
    def intercept(cls, basis_choice: str = "protocol", phases: Iterable[str] | None = None,
                  receivers: Iterable | None = None) -> "EveModel":
        ph = frozenset(phases) if phases is not None else cls.phases
        return cls("intercept", basis_choice, ph, None if receivers is None else frozenset(receivers))

    @property
    def active(self) -> bool:
        return self.strategy == "intercept"

    def targets(self, phase: str, receiver) -> bool:
        if not self.active or phase not in self.phases:
            return False
        return self.receivers is None or receiver in self.receivers

    def attack(self, seq: ParticleSequence, rng: np.random.Generator) -> None:
        p = seq.amps.shape[1]
        nb = p if self.basis_choice == "protocol" else p + 1
        slots = rng.integers(0, nb, size=len(seq.decoy))
        _, collapsed = measure_many(seq.amps, slots, rng)
        seq.amps[:] = collapsed


NO_EVE = EveModel()


def intercept_decoy_errors(p: int, n: int, rng: np.random.Generator, basis_choice: str = "protocol") -> int:
    """Errors seen by an honest checker on n intercepted decoys in random protocol bases."""
    bases = rng.integers(0, p, size=n)
    amps = basis_stack(p)[bases, :, 0]
    nb = p if basis_choice == "protocol" else p + 1
    _, resent = measure_many(amps, rng.integers(0, nb, size=n), rng)
    out, _ = measure_many(resent, bases, rng)
    return int(np.count_nonzero(out))


def detection_reference(p: int, basis_choice: str = "protocol") -> float:
    """Per-decoy error probability under intercept-resend."""
    if basis_choice == "protocol":
        return ((p - 1) / p) ** 2
    # every basis except the encoding one (p of p + 1) randomizes the level
    return (p / (p + 1)) * ((p - 1) / p)


# -- hops ----------------------------------------------------------------------

@dataclass
class HopRecord:
    phase: str
    sender: str
    receiver: str
    block: int
    tag: str
    basis: int
    decoy_basis: int
    n_info: int
    n_decoy: int
    decoy_error_rate: float
    verdict: str
    attempt: int


def _label(x) -> str:
    return x if isinstance(x, str) else f"P{x}"


def _transmit(config: SessionConfig, value: int, basis: int, decoy_basis: int, eve: EveModel,
              rng: np.random.Generator, phase: str, sender, receiver, block: int, tag: str,
              log: list) -> int | None:
    """One hop with retries; returns the accepted value or None on abort."""
    for attempt in range(config.retry_budget + 1):
        seq = encode_value(value, basis, config, rng, decoy_basis)
        if eve.targets(phase, receiver):
            eve.attack(seq, rng)
        rec = receive_value(seq, basis, config, rng, decoy_basis)
        log.append(HopRecord(phase, _label(sender), _label(receiver), block, tag, basis, decoy_basis,
                             seq.n_info, seq.n_decoy, rec.decoy_error_rate, rec.verdict, attempt))
        if rec.verdict == ACCEPT:
            return rec.value
        if rec.verdict == ABORT_EAVESDROP:
            return None
    log[-1].verdict = RETRIES_EXHAUSTED
    return None


@dataclass
class DistributionResult:
    received: ShareBundle
    hops: list
    failed: list


def distribute_shares(config: SessionConfig, bundle: ShareBundle, eve: EveModel = NO_EVE,
                      rng: np.random.Generator | None = None) -> DistributionResult:
    """Send every tagged share value from the dealer to its holder.

    All hops are attempted; if any of them aborts, DistributionAborted carries
    the full result as its fragment.
    """
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    desc = config.descriptor
    received: dict = {}
    hops: list = []
    failed = []
    for x, items in bundle.shares.items():
        basis = config.distribution_basis(x)
        got = []
        for tag, v in items:
            val = _transmit(config, v, basis, basis, eve, rng, "distribution", "dealer", x,
                            desc.block_of[x], tag, hops)
            if val is None:
                failed.append(x)
            got.append((tag, val))
        received[x] = got
    result = DistributionResult(ShareBundle(received), hops, sorted(set(failed), key=str))
    if failed:
        raise DistributionAborted(f"distribution aborted at {[_label(x) for x in result.failed]}", result)
    return result


def circulate_subkey(config: SessionConfig, block: int, row: int, shares: Mapping, rng: np.random.Generator,
                     eve: EveModel = NO_EVE, order: Sequence | None = None, log: list | None = None) -> int:
    """Sum of the members' shares for one block row, measured by the first member.

    shares maps each member to its value for this row. The first member of
    `order` prepares the information particles at level log_c(block key) in
    a basis only it knows, every other member shifts them by its share, and
    the first member closes with the shift (own share - log_c(block key)).
    """
    p = config.p
    desc = config.descriptor
    members = list(order) if order is not None else desc.members(block)
    if sorted(members, key=str) != sorted(desc.members(block), key=str):
        raise ValueError("order must list exactly the block members")
    log = log if log is not None else []
    tag = desc.rows[desc.rows_of(block)[row]].tag
    level = config.circulation_level(block)
    decoy_basis = config.circulation_decoy_basis(block)
    first = members[0]
    for attempt in range(config.retry_budget + 1):
        secret_basis = int(rng.integers(0, p))
        seq = encode_value(level, secret_basis, config, rng, decoy_basis)
        aborted = False
        path = members[1:] + [first]
        sender = first
        for receiver in path if len(members) > 1 else []:
            if eve.targets("circulation", receiver):
                eve.attack(seq, rng)
            err = check_decoys(seq, decoy_basis, rng)
            verdict = ABORT_EAVESDROP if err > config.threshold else ACCEPT
            log.append(HopRecord("circulation", _label(sender), _label(receiver), block, tag, secret_basis,
                                 decoy_basis, seq.n_info, seq.n_decoy, err, verdict, attempt))
            if verdict != ACCEPT:
                aborted = True
                break
            seq = ParticleSequence(seq.amps[~seq.decoy], np.zeros(seq.n_info, dtype=bool))
            if receiver != first:
                _shift_levels(seq, shares[receiver], p)
                fresh = encode_value(0, 0, config, rng, decoy_basis, n_info=seq.n_info)
                fresh.amps[~fresh.decoy] = seq.amps
                seq = fresh
            sender = receiver
        if aborted:
            raise CirculationAborted(f"circulation in block {block} aborted at {_label(receiver)}", log)
        if len(members) == 1:
            seq = ParticleSequence(seq.amps[~seq.decoy], np.zeros(seq.n_info, dtype=bool))
        _shift_levels(seq, (shares[first] - level) % p, p)
        out, _ = measure_many(seq.amps, secret_basis, rng)
        if np.all(out == out[0]):
            return int(out[0])
        log.append(HopRecord("circulation", _label(first), _label(first), block, tag, secret_basis,
                             decoy_basis, seq.n_info, 0, 0.0, RETRY_UNEQUAL, attempt))
    raise CirculationAborted(f"circulation in block {block} exceeded the retry budget", log)


def deliver_subkey(config: SessionConfig, block: int, row: int, subkey: int, rng: np.random.Generator,
                   eve: EveModel = NO_EVE, log: list | None = None) -> int:
    log = log if log is not None else []
    desc = config.descriptor
    tag = desc.rows[desc.rows_of(block)[row]].tag
    sender = desc.members(block)[0]
    val = _transmit(config, subkey, config.delivery_basis(block), config.delivery_decoy_basis(block),
                    eve, rng, "delivery", sender, "combiner", block, tag, log)
    if val is None:
        raise DeliveryAborted(f"delivery from block {block} aborted", log)
    return val


def combine_secret(config: SessionConfig, mas, values: Mapping[int, Sequence[int]]) -> tuple[int, ...]:
    """Secret from the combiner's block values for one minimal authorized set.

    Raises InsufficientSubkeys when a needed block value is missing and
    InconsistentSystem when the values cannot come from any honest deal.
    """
    desc = config.descriptor
    need = desc.complete_blocks(mas)
    missing = [b for b in sorted(need) if b not in values]
    if missing:
        raise InsufficientSubkeys(f"no subkeys from blocks {missing}")
    used = {b: list(values[b]) for b in sorted(need)}
    try:
        secret = recover_from_block_values(desc, used)
    except Unauthorized as exc:
        raise InsufficientSubkeys(str(exc)) from exc
    idx = [i for b in sorted(need) for i in desc.rows_of(b)]
    sub = desc.matrix[idx]
    vec = np.array([v for b in sorted(need) for v in used[b]], dtype=np.int64).reshape(-1, 1)
    if rank(np.hstack([sub, vec]), desc.p) != rank(sub, desc.p):
        raise InconsistentSystem("subkeys are not consistent with any deal")
    return secret


# -- sessions ------------------------------------------------------------------

@dataclass
class SessionTranscript:
    dealt: tuple
    hops: list = field(default_factory=list)
    aborted: str | None = None
    error: str | None = None
    recovered: dict = field(default_factory=dict)    # MAS label -> secret

    @property
    def match(self) -> bool:
        return (self.aborted is None and bool(self.recovered)
                and all(v == self.dealt for v in self.recovered.values()))

    @property
    def decoy_errors(self) -> int:
        return sum(1 for h in self.hops if h.decoy_error_rate > 0)

    def to_json(self) -> dict:
        return {
            "hops": [asdict(h) for h in self.hops],
            "aborted": self.aborted,
            "error": self.error,
            "final": {
                "dealt": list(self.dealt),
                "recovered": {k: None if v is None else list(v) for k, v in self.recovered.items()},
                "match": self.match,
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def mas_label(mas) -> str:
    return "".join(str(x) for x in sorted(mas, key=str))


def run_session(config: SessionConfig, eve: EveModel = NO_EVE, mas: int | None = None,
                secret: Sequence[int] | None = None) -> SessionTranscript:
    """Deal, distribute, circulate and deliver, then combine.

    mas selects one edge of the structure by index; None combines for every
    edge, so the transcript shows whether all of them agree.
    """
    desc = config.descriptor
    p = config.p
    rng = np.random.default_rng(config.seed)
    if secret is None:
        secret = [int(v) for v in rng.integers(0, p, size=desc.secret_len)]
    secret = tuple(int(v) % p for v in secret)
    bundle = deal_secret(desc, list(secret), rng)
    tr = SessionTranscript(secret)
    edges = list(desc.structure.edges) if mas is None else [desc.structure.edges[mas]]

    try:
        dist = distribute_shares(config, bundle, eve, rng)
    except DistributionAborted as exc:
        tr.hops.extend(exc.fragment.hops)
        tr.aborted, tr.error = "distribution", str(exc)
        return tr
    tr.hops.extend(dist.hops)
    held = dist.received

    needed = sorted(set().union(*(desc.complete_blocks(e) for e in edges)))
    combiner: dict = {}
    try:
        for b in needed:
            members = desc.members(b)
            vals = []
            for r in range(len(desc.rows_of(b))):
                row_shares = {x: held.shares[x][r][1] for x in members}
                sub = circulate_subkey(config, b, r, row_shares, rng, eve, log=tr.hops)
                vals.append(deliver_subkey(config, b, r, sub, rng, eve, log=tr.hops))
            combiner[b] = vals
    except CirculationAborted as exc:
        tr.aborted, tr.error = "circulation", str(exc)
        return tr
    except DeliveryAborted as exc:
        tr.aborted, tr.error = "delivery", str(exc)
        return tr

    for e in edges:
        try:
            tr.recovered[mas_label(e)] = combine_secret(config, e, combiner)
        except (InsufficientSubkeys, InconsistentSystem) as exc:
            tr.recovered[mas_label(e)] = None
            tr.error = str(exc)
    return tr
