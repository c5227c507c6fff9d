"""Information rates and particle efficiency of the constructed schemes.

All logarithms are base p, so one field element counts as one unit and every
rate is an exact rational.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .access import optimal_rate
from .css.scheme import SchemeDescriptor, classical_rate

ENTROPY_BOUND_CLASSES = frozenset({7, 8, 9, 10, 11})


class NotAnEdge(ValueError):
    pass


def idealized_rate(desc: SchemeDescriptor, n_info: int) -> Fraction:
    """Secret length over the largest number of information particles one participant receives."""
    if n_info < 1:
        raise ValueError("n_info must be at least 1")
    return Fraction(desc.secret_len, n_info * desc.max_share_count())


def particle_counts(desc: SchemeDescriptor, n_info: int) -> dict:
    return {x: n_info * c for x, c in desc.share_counts().items()}


def _edge(desc: SchemeDescriptor, mas) -> frozenset:
    e = frozenset(mas)
    if e not in desc.structure.edges:
        raise NotAnEdge(f"{sorted(e, key=str)} is not a minimal authorized set")
    return e


def efficiency_raw(desc: SchemeDescriptor, mas, n_info: int, n_decoy: int, b: int = 0) -> Fraction:
    """c / (q_info + q_decoy + b) counted particle by particle over the set's members."""
    e = _edge(desc, mas)
    q_info = n_info * sum(desc.share_count(x) for x in e)
    q_decoy = Fraction(n_decoy, n_info) * q_info
    return Fraction(desc.secret_len) / (q_info + q_decoy + b)


def efficiency_closed_form(desc: SchemeDescriptor, mas, n_info: int, n_decoy: int) -> Fraction:
    """Idealized rate / ((1 + d) * total block size) with d = n_decoy / n_info."""
    e = _edge(desc, mas)
    d = Fraction(n_decoy, n_info)
    size = sum(len(desc.blocks[bk - 1]) for bk in desc.complete_blocks(e))
    return idealized_rate(desc, n_info) / ((1 + d) * size)


def entropy_bound_check(desc: SchemeDescriptor) -> bool:
    """Two participants in different 2-regions need at least 3/2 secret lengths
    between them, so the largest share count must reach ceil(3/2 * secret length).
    Classes outside G7..G11 are out of scope and pass trivially."""
    if desc.class_id not in ENTROPY_BOUND_CLASSES:
        return True
    return desc.max_share_count() >= math.ceil(Fraction(3, 2) * desc.secret_len)


def _fmt(q: Fraction | None) -> str:
    return "" if q is None else str(q)


def _csv(header: list[str], rows: Iterable[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


@dataclass
class RateReport:
    class_id: int | None
    classical_rate: Fraction
    idealized_rate: Fraction
    n_info: int
    particle_counts: dict
    optimal_rate: Fraction | None

    def to_json(self) -> dict:
        return {
            "class": None if self.class_id is None else f"G{self.class_id}",
            "classical_rate": str(self.classical_rate),
            "idealized_rate": str(self.idealized_rate),
            "n_info": self.n_info,
            "particle_counts": {str(k): v for k, v in self.particle_counts.items()},
            "optimal_rate": _fmt(self.optimal_rate) or None,
        }

    def to_csv(self) -> str:
        return _csv(["participant", "information_particles"],
                    [[k, v] for k, v in self.particle_counts.items()])


def rate_report(desc: SchemeDescriptor, n_info: int = 1) -> RateReport:
    opt = optimal_rate(desc.class_id) if desc.class_id is not None else None
    return RateReport(desc.class_id, classical_rate(desc), idealized_rate(desc, n_info), n_info,
                      particle_counts(desc, n_info), opt)


@dataclass
class EfficiencyRow:
    mas: str
    c: int
    q_info: int
    q_decoy: Fraction
    b: int
    eta: Fraction
    eta_closed_form: Fraction

    @property
    def agrees(self) -> bool:
        return self.eta == self.eta_closed_form


@dataclass
class EfficiencyReport:
    n_info: int
    n_decoy: int
    rows: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n_info": self.n_info,
            "n_decoy": self.n_decoy,
            "rows": [{"mas": r.mas, "c": r.c, "q_info": r.q_info, "q_decoy": str(r.q_decoy), "b": r.b,
                      "eta": str(r.eta), "eta_closed_form": str(r.eta_closed_form), "agrees": r.agrees}
                     for r in self.rows],
        }

    def to_csv(self) -> str:
        return _csv(["mas", "c", "q_info", "q_decoy", "b", "eta", "eta_closed_form", "agrees"],
                    [[r.mas, r.c, r.q_info, r.q_decoy, r.b, r.eta, r.eta_closed_form, r.agrees]
                     for r in self.rows])


def efficiency(desc: SchemeDescriptor, mas, n_info: int, n_decoy: int, b: int = 0) -> EfficiencyRow:
    e = _edge(desc, mas)
    q_info = n_info * sum(desc.share_count(x) for x in e)
    return EfficiencyRow("".join(str(x) for x in sorted(e, key=str)), desc.secret_len, q_info,
                         Fraction(n_decoy, n_info) * q_info, b, efficiency_raw(desc, e, n_info, n_decoy, b),
                         efficiency_closed_form(desc, e, n_info, n_decoy))


def efficiency_report(desc: SchemeDescriptor, n_info: int, n_decoy: int, b: int = 0) -> EfficiencyReport:
    return EfficiencyReport(n_info, n_decoy, [efficiency(desc, e, n_info, n_decoy, b)
                                              for e in desc.structure.edges])
