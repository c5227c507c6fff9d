"""Per-class schemes for the twelve three-edge hypercycle classes.

Blocks are the template regions A1..Ak of access.CLASS_TEMPLATES. Every
construction below is written against template block numbers; the Rem-based
classes reuse the smaller constructions through a block relabelling found by
classify.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..access import (CLASS_TEMPLATES, AccessStructure, HYPERSTAR_CLASSES, classify,
                      template_structure)
from .scheme import Builder, Form, SchemeDescriptor, UnsupportedClass, form_json


def _pair(b: Builder, name: str) -> list[Form]:
    return [b.fresh(f"{name}[0]"), b.fresh(f"{name}[1]")]


def threshold(b: Builder, secret: Form, blocks: Sequence[int], identities: Sequence[int],
              degree: int, tag: str, label: str) -> None:
    """Shamir layer: block i holds f(x_i) with f(0) = secret."""
    coeffs = [b.fresh(f"{label}.c{k}") for k in range(1, degree + 1)]
    for blk in blocks:
        x = identities[blk - 1]
        val = Form(secret)
        for k, c in enumerate(coeffs, start=1):
            val = val + pow(x, k, b.p) * c
        b.emit(blk, tag, val)
    b.node(kind="threshold", label=label, degree=degree, blocks=list(blocks),
           points=[identities[blk - 1] for blk in blocks], secret=form_json(secret, b.names, b.p))


def additive(b: Builder, secret: Form, blocks: Sequence[int], tag: str, label: str) -> None:
    """(n, n) additive layer across whole blocks."""
    parts = [b.fresh(f"{label}.u{k}") for k in range(len(blocks) - 1)]
    last = Form(secret)
    for u in parts:
        last = last - u
    for blk, val in zip(blocks, parts + [last]):
        b.emit(blk, tag, val)
    b.node(kind="additive", label=label, blocks=list(blocks), secret=form_json(secret, b.names, b.p))


def star(b: Builder, secret: Form, center: int, leaves: Sequence[int], tag: str, label: str) -> None:
    """Two-or-more-edge star sharing one center block: edges {center, leaf}."""
    v = b.fresh(f"{label}.v")
    b.emit(center, tag, v)
    for leaf in leaves:
        b.emit(leaf, tag, secret - v)
    b.node(kind="star", label=label, center=center, leaves=list(leaves),
           secret=form_json(secret, b.names, b.p))


# -- rate-2/3 joint cores -------------------------------------------------------
# secret is a pair (sigma0, sigma1); each function takes a map from the class
# template's block numbers to the builder's block numbers.

def joint_g7(b: Builder, sig: Sequence[Form], blk: dict, label: str) -> None:
    """Edges {A1 A2 A4, A1 A3, A2 A3}."""
    y = _pair(b, f"{label}.y")
    a, z, w = b.fresh(f"{label}.a"), b.fresh(f"{label}.z"), b.fresh(f"{label}.b")
    rows = {
        1: [("y0", y[0]), ("y1", y[1]), ("a", a)],
        2: [("y0-z", y[0] - z), ("y1-z", y[1] - z), ("b", w)],
        3: [("s0+y0", sig[0] + y[0]), ("s1+y1", sig[1] + y[1]), ("z", z)],
        4: [("s0+a+b", sig[0] + a + w), ("s1+z+a-b", sig[1] + z + a - w)],
    }
    _emit_joint(b, rows, blk, label, "G7-core")


def joint_g8(b: Builder, sig: Sequence[Form], blk: dict, label: str) -> None:
    """Edges {A1 A2 A4, A1 A3, A2 A3 A5}."""
    y = _pair(b, f"{label}.y")
    w = _pair(b, f"{label}.w")
    a, c, z = b.fresh(f"{label}.a"), b.fresh(f"{label}.b"), b.fresh(f"{label}.z")
    rows = {
        1: [("y0", y[0]), ("y1", y[1]), ("a", a)],
        2: [("w0", w[0]), ("w1", w[1]), ("b", c)],
        3: [("s0+y0", sig[0] + y[0]), ("s1+y1", sig[1] + y[1]), ("z", z)],
        4: [("s0+y0+a+w0", sig[0] + y[0] + a + w[0]), ("s1+y1+b+w1", sig[1] + y[1] + c + w[1])],
        5: [("y0+w0+b", y[0] + w[0] + c), ("y1+z+w1", y[1] + z + w[1])],
    }
    _emit_joint(b, rows, blk, label, "G8-core")


def joint_g9(b: Builder, sig: Sequence[Form], blk: dict, label: str) -> None:
    """Edges {A1 A2 A4, A1 A3 A6, A2 A3 A5}.

    Each 2-region block holds a random pair x_i and a scalar t_i. Each
    one-region block holds the secret plus a pad that only the other two
    blocks of its edge can rebuild.
    """
    x1, x2, x3 = _pair(b, f"{label}.x1"), _pair(b, f"{label}.x2"), _pair(b, f"{label}.x3")
    t1, t2, t3 = b.fresh(f"{label}.t1"), b.fresh(f"{label}.t2"), b.fresh(f"{label}.t3")
    rows = {
        1: [("x1[0]", x1[0]), ("x1[1]", x1[1]), ("t1", t1)],
        2: [("x2[0]", x2[0]), ("x2[1]", x2[1]), ("t2", t2)],
        3: [("x3[0]", x3[0]), ("x3[1]", x3[1]), ("t3", t3)],
        4: [("s0+x1+x2", sig[0] + x1[0] + x2[0]), ("s1+x1+x2", sig[1] + x1[1] + x2[1])],
        6: [("s0+x1+t1+x3", sig[0] + x1[0] + t1 + x3[0]), ("s1+x1+x3", sig[1] + x1[1] + x3[1])],
        5: [("s0+x2+x3+t3", sig[0] + x2[0] + x3[0] + t3),
            ("s1+x2+t2+x3+t3", sig[1] + x2[1] + t2 + x3[1] + t3)],
    }
    _emit_joint(b, rows, blk, label, "G9-core")


def _emit_joint(b: Builder, rows: dict, blk: dict, label: str, kind: str) -> None:
    for tb in sorted(rows):
        for tag, form in rows[tb]:
            b.emit(blk[tb], f"{label}.{tag}", form)
    b.node(kind="joint", label=label, core=kind,
           blocks={f"A{tb}": blk[tb] for tb in sorted(rows)},
           rows=[{"block": blk[tb], "tag": f"{label}.{tag}", "form": form_json(form, b.names, b.p)}
                 for tb in sorted(rows) for tag, form in rows[tb]])


JOINT_CORES = {7: joint_g7, 8: joint_g8, 9: joint_g9}


def _rem_map(class_id: int, core_block: int, want: int) -> dict:
    """Relabel the Rem(class, core block) template as class `want`."""
    tmpl = CLASS_TEMPLATES[class_id]
    edges = [frozenset(int(ch) for ch in e if int(ch) != core_block) for e in tmpl]
    cls = classify(AccessStructure.from_edges(edges))
    if cls.class_id != want:
        raise AssertionError(f"Rem of G{class_id} is G{cls.class_id}, expected G{want}")
    return {i + 1: next(iter(blockset)) for i, blockset in enumerate(cls.blocks)}


def _path_layers(b: Builder, w: Sequence[Form], middle: tuple[int, int], end_a: tuple[int, int],
                 end_b: tuple[int, int], label: str) -> None:
    """Two ideal covers of a three-edge path, one per secret coordinate.

    Edges are middle = {m_a, m_b}, end_a = {m_a, a}, end_b = {m_b, c}.
    Layer 0 shares w0 by end_a on its own plus the star {middle, end_b}
    centred at m_b; layer 1 swaps the roles of the two ends.
    """
    (ma, mb), (_, a_leaf), (_, b_leaf) = middle, end_a, end_b
    additive(b, w[0], [ma, a_leaf], f"{label}.L0.edge", f"{label}.L0.edge")
    star(b, w[0], mb, [ma, b_leaf], f"{label}.L0.star", f"{label}.L0.star")
    additive(b, w[1], [mb, b_leaf], f"{label}.L1.edge", f"{label}.L1.edge")
    star(b, w[1], ma, [mb, a_leaf], f"{label}.L1.star", f"{label}.L1.star")


def _fallback(b: Builder, edges: list[frozenset], secret: Form, label: str) -> None:
    """Additive-core recursion for structures without a rate construction."""
    if len(edges) == 1:
        additive(b, secret, sorted(edges[0]), label, label)
        return
    core = frozenset.intersection(*edges)
    if core:
        t = b.fresh(f"{label}.core")
        additive(b, t, sorted(core), f"{label}.core", f"{label}.core")
        rest = [e - core for e in edges]
        if all(rest):
            _fallback_components(b, rest, secret - t, f"{label}.r")
        return
    _fallback_components(b, edges, secret, label)


def _fallback_components(b: Builder, edges: list[frozenset], secret: Form, label: str) -> None:
    comps: list[list[frozenset]] = []
    for e in edges:
        hit = [c for c in comps if any(e & f for f in c)]
        merged = [e] + [f for c in hit for f in c]
        comps = [c for c in comps if c not in hit] + [merged]
    if len(comps) == 1 and not frozenset.intersection(*comps[0]):
        for k, e in enumerate(comps[0]):   # connected, no common core: one layer per edge
            additive(b, secret, sorted(e), f"{label}.e{k}", f"{label}.e{k}")
        return
    for k, comp in enumerate(comps):
        _fallback(b, comp, secret, f"{label}.c{k}")


def build_block_scheme(class_id: int, p: int, allow_fallback: bool = False) -> Builder:
    """Block-level recipe for a class over template block numbers."""
    nblocks = max(int(ch) for e in CLASS_TEMPLATES[class_id] for ch in e)
    if p <= nblocks:
        raise ValueError(f"p={p} too small for {nblocks} distinct block identities")
    ids = list(range(1, nblocks + 1))
    if class_id in HYPERSTAR_CLASSES:
        if not allow_fallback:
            raise UnsupportedClass(f"G{class_id} is a hyperstar class; pass allow_fallback for "
                                   "the additive-core scheme (no rate claim)")
        b = Builder(p, 1)
        edges = [frozenset(int(ch) for ch in e) for e in CLASS_TEMPLATES[class_id]]
        _fallback(b, edges, b.secret(), "fallback")
        return b
    if class_id == 5:
        b = Builder(p, 1)
        threshold(b, b.secret(), [1, 2, 3], ids, 1, "shamir", "shamir")
        return b
    if class_id == 6:
        b = Builder(p, 1)
        s1 = b.fresh("split.s1")
        additive(b, s1, [4], "core", "core")
        threshold(b, b.secret() - s1, [1, 2, 3], ids, 1, "shamir", "shamir")
        return b
    b = Builder(p, 2)
    sig = [b.secret(0), b.secret(1)]
    if class_id in JOINT_CORES:
        JOINT_CORES[class_id](b, sig, {i: i for i in ids}, "core")
        return b
    if class_id in (10, 11):
        t = _pair(b, "split.t")
        for j in range(2):
            additive(b, t[j], [4], f"split[{j}]", f"split[{j}]")
        w = [sig[0] - t[0], sig[1] - t[1]]
        inner = 7 if class_id == 10 else 8
        JOINT_CORES[inner](b, w, _rem_map(class_id, 4, inner), "rem")
        return b
    if class_id == 12:
        t = _pair(b, "split.t")
        for j in range(2):
            additive(b, t[j], [2], f"split[{j}]", f"split[{j}]")
        w = [sig[0] - t[0], sig[1] - t[1]]
        # Rem(G12, A2) = {A1 A3, A1 A4, A3 A5}; A1 A3 is the middle edge.
        _path_layers(b, w, middle=(1, 3), end_a=(1, 4), end_b=(3, 5), label="rem")
        return b
    raise UnsupportedClass(f"unknown class G{class_id}")


def build_scheme(class_id: int, block_sizes: Sequence[int] | None, p: int,
                 rng: np.random.Generator | None = None, allow_fallback: bool = False) -> SchemeDescriptor:
    """Descriptor for the class template with the given block cardinalities.

    The constructions draw no public randomness, so rng is accepted only for
    interface symmetry with deal_secret.
    """
    structure = template_structure(class_id, block_sizes)
    cls = classify(structure)
    b = build_block_scheme(class_id, p, allow_fallback)
    return b.build(class_id, structure, _template_order(structure, class_id),
                   list(range(1, len(cls.blocks) + 1)))


def _template_order(structure: AccessStructure, class_id: int) -> list[frozenset]:
    # template_structure numbers participants block by block, in block order
    tmpl = CLASS_TEMPLATES[class_id]
    nblocks = max(int(ch) for e in tmpl for ch in e)
    blocks = []
    for blk in range(1, nblocks + 1):
        inside = [structure.edges[i] for i, e in enumerate(tmpl) if str(blk) in e]
        outside = [structure.edges[i] for i, e in enumerate(tmpl) if str(blk) not in e]
        region = frozenset.intersection(*inside) - set().union(*outside) if outside else frozenset.intersection(*inside)
        blocks.append(region)
    return blocks


def build_for_structure(structure: AccessStructure, p: int, allow_fallback: bool = False) -> SchemeDescriptor:
    """Descriptor for an arbitrary structure that classifies into a known class."""
    cls = classify(structure)
    b = build_block_scheme(cls.class_id, p, allow_fallback)
    return b.build(cls.class_id, structure, list(cls.blocks), list(range(1, len(cls.blocks) + 1)))
