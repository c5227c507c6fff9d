"""Hypergraph access structures: validation, regions, kind predicates and
classification of three-edge quantum hypercycles."""
from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence


class AccessError(ValueError):
    pass


class NotClassifiable(AccessError):
    pass


class ParseError(AccessError):
    pass


@dataclass(frozen=True)
class AccessStructure:
    universe: tuple
    edges: tuple[frozenset, ...]

    @classmethod
    def from_edges(cls, edges: Iterable[Iterable], universe: Iterable | None = None):
        edges = tuple(frozenset(e) for e in edges)
        if universe is None:
            universe = set().union(*edges) if edges else set()
        return cls(tuple(sorted(universe, key=_label_key)), edges)

    def authorized(self, subset: Iterable) -> bool:
        s = set(subset)
        return any(e <= s for e in self.edges)

    def maximal_unauthorized(self) -> list[frozenset]:
        """Inclusion-maximal subsets of the universe containing no edge."""
        out = []
        n = len(self.universe)
        for size in range(n, -1, -1):
            for combo in itertools.combinations(self.universe, size):
                s = frozenset(combo)
                if self.authorized(s) or any(s < t for t in out):
                    continue
                out.append(s)
        return out

    def to_text(self) -> str:
        return format_structure(self)

    def to_json(self) -> dict:
        return {"universe": list(self.universe),
                "edges": [sorted(e, key=_label_key) for e in self.edges]}


def _label_key(x):
    return (0, x, "") if isinstance(x, int) else (1, 0, str(x))


def parse_structure(text: str) -> AccessStructure:
    """Parse "{1234,1267,456}" (digit labels) or the JSON object form."""
    text = text.strip()
    if text.startswith("{") and '"' in text:
        try:
            obj = json.loads(text)
            return AccessStructure.from_edges(obj["edges"], obj.get("universe"))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad JSON structure: {exc}") from exc
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError(f"expected '{{...}}', got {text!r}")
    body = text[1:-1].strip()
    if not body:
        raise ParseError("structure has no edges")
    edges = []
    for tok in body.split(","):
        tok = tok.strip()
        if not tok or not tok.isdigit() or "0" in tok:
            raise ParseError(f"bad edge {tok!r}: use participant digits 1-9")
        edges.append(frozenset(int(ch) for ch in tok))
    return AccessStructure.from_edges(edges)


def format_structure(s: AccessStructure) -> str:
    if all(isinstance(x, int) and 1 <= x <= 9 for x in s.universe):
        return "{" + ",".join("".join(str(x) for x in sorted(e)) for e in s.edges) + "}"
    return json.dumps(s.to_json())


@dataclass(frozen=True)
class Violation:
    kind: str  # "NotAntichain" | "UncoveredParticipant" | "EmptyEdge"
    items: tuple


@dataclass(frozen=True)
class Validation:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(s: AccessStructure) -> Validation:
    bad = []
    for i, e in enumerate(s.edges):
        if not e:
            bad.append(Violation("EmptyEdge", (i,)))
    for i, j in itertools.permutations(range(len(s.edges)), 2):
        if s.edges[i] <= s.edges[j] and (s.edges[i] != s.edges[j] or i < j):
            bad.append(Violation("NotAntichain", (i, j)))
    covered = set().union(*s.edges) if s.edges else set()
    missing = [x for x in s.universe if x not in covered]
    if missing:
        bad.append(Violation("UncoveredParticipant", tuple(missing)))
    return Validation(tuple(bad))


def is_quantum(s: AccessStructure) -> bool:
    return all(a & b for a, b in itertools.combinations(s.edges, 2))


def remove(s: AccessStructure, z: Iterable) -> AccessStructure:
    z = set(z)
    universe = tuple(x for x in s.universe if x not in z)
    edges = tuple(e - z for e in s.edges if e - z)
    return AccessStructure(universe, edges)


# -- regions ---------------------------------------------------------------

def region_index_sets(m: int) -> list[frozenset]:
    """Non-empty subsets of edge indices, ordered by size then lexicographically."""
    return [frozenset(c) for k in range(1, m + 1) for c in itertools.combinations(range(m), k)]


@dataclass(frozen=True)
class RegionOccupancy:
    regions: tuple[tuple[frozenset, frozenset], ...]  # (edge index set, participants)

    @property
    def bits(self) -> tuple[bool, ...]:
        return tuple(bool(r) for _, r in self.regions)

    def region(self, index_set: Iterable[int]) -> frozenset:
        key = frozenset(index_set)
        for idx, members in self.regions:
            if idx == key:
                return members
        raise KeyError(key)

    def i_regions(self, i: int) -> list[frozenset]:
        return [r for idx, r in self.regions if len(idx) == i]


def region_occupancy(s: AccessStructure) -> RegionOccupancy:
    m = len(s.edges)
    out = []
    for idx in region_index_sets(m):
        inside = frozenset.intersection(*(s.edges[i] for i in idx))
        outside = set().union(*(s.edges[i] for i in range(m) if i not in idx))
        out.append((idx, frozenset(inside - outside)))
    return RegionOccupancy(tuple(out))


# -- kind predicates ---------------------------------------------------------

@dataclass(frozen=True)
class KindFlags:
    hyperstar: bool
    hypercycle: bool
    hyperpath: bool


def _is_hyperstar(edges: Sequence[frozenset]) -> bool:
    if not edges or not frozenset.intersection(*edges):
        return False
    for i, e in enumerate(edges):
        rest = set().union(*(f for j, f in enumerate(edges) if j != i))
        if not (e - rest):
            return False
    return True


def _cycle_order_ok(seq: Sequence[frozenset]) -> bool:
    m = len(seq)
    for i in range(m):
        if not seq[i] & seq[(i + 1) % m]:
            return False
        near = {(i - 1) % m, i, (i + 1) % m}
        for j in range(m):
            if j not in near and seq[i] & seq[j]:
                return False
    return True


def _path_order_ok(seq: Sequence[frozenset]) -> bool:
    m = len(seq)
    for i in range(m - 1):
        if not seq[i] & seq[i + 1]:
            return False
        for j in range(m):
            if j not in (i - 1, i, i + 1) and seq[i] & seq[j]:
                return False
    return True


def kind_predicates(s: AccessStructure) -> KindFlags:
    edges = list(s.edges)
    orders = list(itertools.permutations(edges))
    return KindFlags(
        hyperstar=_is_hyperstar(edges),
        hypercycle=len(edges) >= 3 and any(_cycle_order_ok(o) for o in orders),
        hyperpath=any(_path_order_ok(o) for o in orders),
    )


# -- classification ------------------------------------------------------------

# Templates over blocks A1..Ak; each block sits in its own region.
CLASS_TEMPLATES: dict[int, tuple[str, ...]] = {
    1: ("12", "13", "14"),
    2: ("124", "125", "13"),
    3: ("124", "1235", "136"),
    4: ("1247", "1235", "1367"),
    5: ("12", "13", "23"),
    6: ("124", "134", "234"),
    7: ("124", "13", "23"),
    8: ("124", "13", "235"),
    9: ("124", "136", "235"),
    10: ("124", "134", "2345"),
    11: ("124", "1346", "2345"),
    12: ("123", "124", "235"),
}
HYPERSTAR_CLASSES = frozenset({1, 2, 3, 4})


def template_structure(class_id: int, block_sizes: Sequence[int] | None = None) -> AccessStructure:
    """Concrete structure for a class; block i gets block_sizes[i-1] members.

    Participants are numbered consecutively block by block.
    """
    tmpl = CLASS_TEMPLATES[class_id]
    nblocks = max(int(ch) for e in tmpl for ch in e)
    sizes = list(block_sizes) if block_sizes is not None else [1] * nblocks
    if len(sizes) != nblocks or any(n < 1 for n in sizes):
        raise AccessError(f"class G{class_id} needs {nblocks} positive block sizes, got {sizes}")
    members, nxt = {}, 1
    for b in range(1, nblocks + 1):
        members[b] = list(range(nxt, nxt + sizes[b - 1]))
        nxt += sizes[b - 1]
    edges = [frozenset(x for ch in e for x in members[int(ch)]) for e in tmpl]
    return AccessStructure(tuple(range(1, nxt)), tuple(edges))


def template_blocks(class_id: int) -> list[frozenset]:
    """Edge-index set of every template block, in block order."""
    tmpl = CLASS_TEMPLATES[class_id]
    nblocks = max(int(ch) for e in tmpl for ch in e)
    return [frozenset(i for i, e in enumerate(tmpl) if str(b) in e) for b in range(1, nblocks + 1)]


def _pattern(s_edges: Sequence[frozenset]) -> tuple[bool, ...]:
    return region_occupancy(AccessStructure((), tuple(s_edges))).bits


def canonical_pattern(s: AccessStructure) -> tuple[bool, ...]:
    return min(_pattern([s.edges[i] for i in perm])
               for perm in itertools.permutations(range(len(s.edges))))


@lru_cache(maxsize=None)
def _template_table() -> dict[tuple[bool, ...], int]:
    return {canonical_pattern(template_structure(cid)): cid for cid in CLASS_TEMPLATES}


@dataclass(frozen=True)
class HypercycleClass:
    class_id: int
    blocks: tuple[frozenset, ...]     # A1..Ak as participant sets
    edge_order: tuple[int, ...]       # structure edge index matched to each template edge

    @property
    def label(self) -> str:
        return f"G{self.class_id}"

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def is_hyperstar(self) -> bool:
        return self.class_id in HYPERSTAR_CLASSES


def classify(s: AccessStructure) -> HypercycleClass:
    if len(s.edges) != 3:
        raise NotClassifiable(f"expected 3 edges, got {len(s.edges)}")
    if not validate(s).ok:
        raise NotClassifiable("structure fails validation")
    if not is_quantum(s):
        raise NotClassifiable("structure is not quantum")
    cid = _template_table().get(canonical_pattern(s))
    if cid is None:
        raise NotClassifiable("occupancy pattern matches no class")
    want = template_blocks(cid)
    for perm in itertools.permutations(range(3)):
        occ = region_occupancy(AccessStructure((), tuple(s.edges[i] for i in perm)))
        if all(bool(occ.region(idx)) == (idx in want) for idx, _ in occ.regions):
            return HypercycleClass(cid, tuple(occ.region(idx) for idx in want), perm)
    raise NotClassifiable("no edge ordering realizes the class")  # unreachable


def enumerate_classes() -> dict[tuple[bool, ...], list[tuple[bool, ...]]]:
    """Orbits of 3-edge occupancy patterns that describe quantum hypercycles.

    A pattern qualifies when every edge is non-empty, every pair of edges
    meets, and no edge is contained in another. Returns canonical pattern
    -> member patterns.
    """
    idx_sets = region_index_sets(3)
    orbits: dict[tuple[bool, ...], list[tuple[bool, ...]]] = {}
    for mask in range(1 << 7):
        bits = tuple(bool(mask >> k & 1) for k in range(7))
        edges = [frozenset(k for k, idx in enumerate(idx_sets) if bits[k] and e in idx)
                 for e in range(3)]
        s = AccessStructure(tuple(range(7)), tuple(edges))
        if not all(edges) or not is_quantum(s):
            continue
        if any(a <= b for a, b in itertools.permutations(edges, 2)):
            continue
        key = canonical_pattern(s)
        orbits.setdefault(key, []).append(bits)
    return orbits


# -- catalog -------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogRow:
    serial: int
    text: str
    structure: AccessStructure
    class_id: int
    rate: Fraction | None   # None marks a hyperstar row

    @property
    def rate_label(self) -> str:
        return "hyperstar" if self.rate is None else str(self.rate)


@lru_cache(maxsize=None)
def catalog() -> tuple[CatalogRow, ...]:
    """The 83 seven-participant rows, checked against classify on load."""
    rows = []
    with resources.files("hyperqss.data").joinpath("hypercycles7.csv").open() as fh:
        for rec in csv.DictReader(fh):
            s = parse_structure(rec["structure"])
            stated = int(rec["class"].lstrip("G"))
            got = classify(s).class_id
            if got != stated:
                raise NotClassifiable(f"row {rec['serial']}: stated G{stated}, classified G{got}")
            rate = None if rec["rate"] == "hyperstar" else Fraction(rec["rate"])
            rows.append(CatalogRow(int(rec["serial"]), rec["structure"], s, stated, rate))
    return tuple(rows)


def optimal_rate(class_id: int) -> Fraction | None:
    """Known optimal rate per class; None for hyperstar classes."""
    if class_id in HYPERSTAR_CLASSES:
        return None
    return Fraction(1) if class_id in (5, 6) else Fraction(2, 3)
