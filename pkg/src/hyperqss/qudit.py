"""Single p-level systems: mutually unbiased bases, diagonal shifts, measurement."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TOL = 1e-10


class BadIndex(ValueError):
    pass


@dataclass(frozen=True)
class BasisId:
    """Computational basis when j is None, otherwise the j-th MUB group."""
    j: int | None = None

    @classmethod
    def computational(cls) -> "BasisId":
        return cls(None)

    @classmethod
    def mub(cls, j: int) -> "BasisId":
        return cls(j)

    @property
    def is_computational(self) -> bool:
        return self.j is None


@dataclass(frozen=True)
class QuditState:
    amps: np.ndarray

    @property
    def p(self) -> int:
        return len(self.amps)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def close_to(self, other: "QuditState", tol: float = TOL) -> bool:
        return self.p == other.p and bool(np.max(np.abs(self.amps - other.amps)) < tol)


def _omega_powers(p: int, exps: np.ndarray) -> np.ndarray:
    return np.exp(2j * np.pi * (exps % p) / p)


@lru_cache(maxsize=None)
def basis_matrix(p: int, j: int | None) -> np.ndarray:
    """Columns are the basis vectors; column l is |e^(j)_l> (or |l>)."""
    if j is None:
        return np.eye(p, dtype=complex)
    if not 0 <= j < p:
        raise BadIndex(f"basis index {j} outside [0, {p - 1}]")
    k = np.arange(p).reshape(-1, 1)
    l = np.arange(p).reshape(1, -1)
    m = _omega_powers(p, k * (l + j * k)) / np.sqrt(p)
    m.setflags(write=False)
    return m


def mub_state(p: int, j: int, l: int) -> QuditState:
    if not (0 <= j < p and 0 <= l < p):
        raise BadIndex(f"indices (j={j}, l={l}) outside [0, {p - 1}]")
    return QuditState(basis_matrix(p, j)[:, l].copy())


def computational_state(p: int, k: int) -> QuditState:
    if not 0 <= k < p:
        raise BadIndex(f"level {k} outside [0, {p - 1}]")
    amps = np.zeros(p, dtype=complex)
    amps[k] = 1.0
    return QuditState(amps)


def overlap(a: QuditState, b: QuditState) -> float:
    if a.p != b.p:
        raise ValueError("states of different dimension")
    return float(abs(np.vdot(a.amps, b.amps)))


def apply_shift(x: int, y: int, state: QuditState) -> QuditState:
    """U_{x,y} = X^x Y^y: amplitude k picks up omega^(x k + y k^2)."""
    p = state.p
    k = np.arange(p)
    return QuditState(state.amps * _omega_powers(p, x * k + y * k * k))


@lru_cache(maxsize=None)
def basis_stack(p: int) -> np.ndarray:
    """All p + 1 bases as one (p + 1, p, p) array; index p is the computational basis."""
    out = np.stack([basis_matrix(p, j) for j in range(p)] + [basis_matrix(p, None)])
    out.setflags(write=False)
    return out


def basis_slot(p: int, basis: BasisId) -> int:
    return p if basis.j is None else basis.j


def probabilities(state: QuditState, basis: BasisId) -> np.ndarray:
    probs = np.abs(basis_matrix(state.p, basis.j).conj().T @ state.amps) ** 2
    return probs / probs.sum()


def measure(state: QuditState, basis: BasisId, rng: np.random.Generator) -> tuple[int, QuditState]:
    """Born-rule outcome and the post-measurement basis vector."""
    probs = probabilities(state, basis)
    outcome = int(min(np.searchsorted(np.cumsum(probs), rng.random(), side="right"), state.p - 1))
    return outcome, QuditState(basis_matrix(state.p, basis.j)[:, outcome].copy())


def measure_many(amps: np.ndarray, slots, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Measure n states (rows of amps) at once.

    slots is one basis slot (see basis_slot) or one per state. Returns the
    outcomes and the collapsed states as rows.
    """
    amps = np.asarray(amps, dtype=complex)
    n, p = amps.shape
    stack = basis_stack(p)
    if np.ndim(slots) == 0:
        mat = stack[int(slots)]
        probs = np.abs(amps @ mat.conj()) ** 2
    else:
        mats = stack[np.asarray(slots, dtype=np.int64)]   # n x p x p, columns are basis vectors
        probs = np.abs(np.einsum("nk,nkl->nl", amps, mats.conj())) ** 2
    cum = np.cumsum(probs, axis=1)
    cum /= cum[:, -1:]
    draws = rng.random(n)
    outcomes = np.minimum((cum <= draws[:, None]).sum(axis=1), p - 1)
    if np.ndim(slots) == 0:
        return outcomes, mat[:, outcomes].T
    return outcomes, mats[np.arange(n), :, outcomes]
