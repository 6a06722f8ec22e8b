"""The poset of Boolean subalgebras of a finite orthomodular poset.

The star variant keeps subalgebras of height at most two (sizes 2, 4, 8);
the height-3 extension inserts a plane over every plane-shaped downset of
points and lines.
"""
from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass

from .oml import FiniteOML
from .posets import BudgetExceededError, FinitePoset


def node_budget(default: int = 20000) -> int:
    return int(os.environ.get("OMSPECT_NODE_BUDGET", default))


@dataclass(frozen=True)
class BooleanSubalg:
    element_ids: frozenset
    atoms: tuple[int, ...]

    @property
    def height(self) -> int:
        return len(self.atoms) - 1

    @property
    def size(self) -> int:
        return 2 ** len(self.atoms)


@dataclass(frozen=True)
class BooleanShadow:
    node_ids: frozenset


class BSubPoset:
    def __init__(self, oml: FiniteOML, nodes: list[BooleanSubalg], variant: str):
        self.oml = oml
        self.nodes = nodes
        self.variant = variant
        self.poset = FinitePoset.from_leq(
            len(nodes), lambda i, j: nodes[i].element_ids <= nodes[j].element_ids)
        self.index = {n.atoms: i for i, n in enumerate(nodes)}

    def node_label(self, i: int) -> str:
        return "{" + ",".join(self.oml.label(a) for a in self.nodes[i].atoms) + "}"

    def node_of_element(self, p: int) -> int:
        """Index of the node {0, p, p', 1}."""
        P = self.oml
        if p in (P.zero, P.one):
            return self.index[(P.one,)]
        atoms = tuple(sorted((p, P.ortho[p])))
        return self.index[atoms]

    def nodes_containing(self, p: int) -> list[int]:
        return [i for i, n in enumerate(self.nodes) if p in n.element_ids]

    def heights(self) -> list[int]:
        return [n.height for n in self.nodes]

    def to_dot(self) -> str:
        lines = ["digraph bsub {", "  rankdir=BT;", "  node [shape=box];"]
        by_height: dict[int, list[int]] = {}
        for i, n in enumerate(self.nodes):
            lines.append(f'  n{i} [label="{self.node_label(i)}"];')
            by_height.setdefault(n.height, []).append(i)
        for h in sorted(by_height):
            row = " ".join(f"n{i};" for i in by_height[h])
            lines.append(f"  {{ rank=same; {row} }}")
        for parent, child in self.poset.covers():
            lines.append(f"  n{child} -> n{parent};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "nodes": [
                {"atoms": [self.oml.label(a) for a in n.atoms], "height": n.height}
                for n in self.nodes
            ],
            "covers": [[child, parent] for parent, child in self.poset.covers()],
        }


def _make_node(oml: FiniteOML, atoms: tuple[int, ...]) -> BooleanSubalg:
    elems = {oml.zero, oml.one}
    for size in range(1, len(atoms) + 1):
        for sub in itertools.combinations(atoms, size):
            cur = sub[0]
            for x in sub[1:]:
                cur = oml.poset.lub(cur, x)
            elems.add(cur)
    return BooleanSubalg(frozenset(elems), tuple(sorted(atoms)))


def _orthogonal_partitions(P: FiniteOML, max_parts: int | None, budget: int):
    """Partitions of 1 into pairwise-orthogonal nonzero parts whose sub-joins
    all exist in P and complement each other (De Morgan closure)."""
    po = P.poset
    found = []
    nontrivial = [i for i in range(P.n) if i not in (P.zero, P.one)]

    def subsets_ok(parts) -> bool:
        k = len(parts)
        joins = {(): P.zero}
        for size in range(1, k + 1):
            for sub in itertools.combinations(range(k), size):
                cur = parts[sub[0]]
                for t in sub[1:]:
                    nxt = po.lub(cur, parts[t])
                    if nxt is None:
                        return False
                    cur = nxt
                joins[sub] = cur
        if joins[tuple(range(k))] != P.one:
            return False
        for sub, e in joins.items():
            comp = tuple(t for t in range(k) if t not in sub)
            if P.ortho[joins[comp]] != e:
                return False
        return True

    def rec(start, parts, join_so_far):
        if join_so_far == P.one and parts:
            if subsets_ok(parts):
                found.append(tuple(parts))
                if len(found) > budget:
                    raise BudgetExceededError("boolean subalgebras", len(found), budget)
            return
        if max_parts is not None and len(parts) >= max_parts:
            return
        for e in nontrivial:
            if e < start:
                continue
            if parts and not all(P.orthogonal(e, p) for p in parts):
                continue
            if parts:
                j = po.lub(join_so_far, e)
                if j is None:
                    continue
            else:
                j = e
            rec(e + 1, parts + [e], j)

    found.append((P.one,))  # the trivial algebra {0,1}
    rec(0, [], P.zero)
    return found


def enumerate_bsub(P: FiniteOML, max_height: int | None = None,
                   budget: int | None = None) -> BSubPoset:
    budget = node_budget() if budget is None else budget
    max_parts = None if max_height is None else max_height + 1
    partitions = _orthogonal_partitions(P, max_parts, budget)
    nodes = sorted((_make_node(P, atoms) for atoms in partitions),
                   key=lambda n: (n.height, n.atoms))
    variant = "star" if max_height == 2 else ("height3" if max_height == 3 else "full")
    return BSubPoset(P, nodes, variant)


def enumerate_bsub_star(P: FiniteOML) -> BSubPoset:
    """Nodes: {0,1}; every {0,p,p',1}; every 8-element algebra from an
    orthogonal triple with joins in P."""
    po = P.poset
    nodes = [_make_node(P, (P.one,))]
    done = set()
    for p in range(P.n):
        if p in (P.zero, P.one):
            continue
        atoms = tuple(sorted((p, P.ortho[p])))
        if atoms not in done:
            done.add(atoms)
            nodes.append(BooleanSubalg(
                frozenset({P.zero, atoms[0], atoms[1], P.one}), atoms))
    nontrivial = [i for i in range(P.n) if i not in (P.zero, P.one)]
    for x, y in itertools.combinations(nontrivial, 2):
        if not P.orthogonal(x, y):
            continue
        jxy = po.lub(x, y)
        if jxy is None:
            continue
        for z in nontrivial:
            if z <= y or not (P.orthogonal(x, z) and P.orthogonal(y, z)):
                continue
            jxz = po.lub(x, z)
            jyz = po.lub(y, z)
            if jxz is None or jyz is None:
                continue
            if P.ortho[z] != jxy or P.ortho[y] != jxz or P.ortho[x] != jyz:
                continue
            elems = frozenset({P.zero, x, y, z, jxy, jxz, jyz, P.one})
            nodes.append(BooleanSubalg(elems, (x, y, z)))
    nodes.sort(key=lambda n: (n.height, n.atoms))
    return BSubPoset(P, nodes, "star")


# ---------------------------------------------------------------------------
# planes (height-3 completion)
# ---------------------------------------------------------------------------

def _plane_configurations(S: BSubPoset) -> list[tuple[int, ...]]:
    """All 6-line sets whose downset is shaped like the height-<=2 part of a
    16-element Boolean algebra's subalgebra lattice: 7 points, every two lines
    meeting in exactly one point, 4 points of degree 3 and 3 of degree 2
    arranged as a complete quadrangle."""
    lines = [i for i, n in enumerate(S.nodes) if n.height == 2]
    pts_of = {}
    for ln in lines:
        pts = frozenset(j for j, m in enumerate(S.nodes)
                        if m.height == 1 and m.element_ids <= S.nodes[ln].element_ids)
        pts_of[ln] = pts

    def quadrangle_ok(chosen) -> bool:
        pts = set().union(*(pts_of[l] for l in chosen))
        if len(pts) != 7:
            return False
        deg = {p: sum(1 for l in chosen if p in pts_of[l]) for p in pts}
        atom_pts = sorted(p for p in pts if deg[p] == 3)
        split_pts = sorted(p for p in pts if deg[p] == 2)
        if len(atom_pts) != 4 or len(split_pts) != 3:
            return False
        pair_of_line = {}
        for l in chosen:
            a = tuple(sorted(p for p in pts_of[l] if deg[p] == 3))
            s = [p for p in pts_of[l] if deg[p] == 2]
            if len(a) != 2 or len(s) != 1:
                return False
            pair_of_line[l] = a
        if len(set(pair_of_line.values())) != 6:
            return False
        for sp in split_pts:
            ls = [l for l in chosen if sp in pts_of[l]]
            if len(ls) != 2:
                return False
            if set(pair_of_line[ls[0]]) & set(pair_of_line[ls[1]]):
                return False
        return True

    results = []

    def grow(chosen, candidates):
        if len(chosen) == 6:
            if quadrangle_ok(chosen):
                results.append(tuple(chosen))
            return
        pts = set().union(*(pts_of[l] for l in chosen)) if chosen else set()
        for idx, l in enumerate(candidates):
            new_pts = pts | pts_of[l]
            if len(new_pts) > 7:
                continue
            rest = [l2 for l2 in candidates[idx + 1:]
                    if len(pts_of[l2] & pts_of[l]) == 1]
            grow(chosen + [l], rest)

    pairwise = {l: [l2 for l2 in lines if l2 > l and len(pts_of[l] & pts_of[l2]) == 1]
                for l in lines}
    for l in lines:
        grow([l], pairwise[l])
    # one configuration per element-set
    seen = {}
    for cfg in results:
        key = frozenset().union(*(S.nodes[l].element_ids for l in cfg))
        seen.setdefault(key, cfg)
    return sorted(seen.values())


def planes_completion(S: BSubPoset) -> BSubPoset:
    if S.variant != "star":
        raise ValueError("planes_completion expects a star poset")
    P = S.oml
    new_nodes = list(S.nodes)
    for cfg in _plane_configurations(S):
        elems = frozenset().union(*(S.nodes[l].element_ids for l in cfg))
        if len(elems) != 16:
            raise RuntimeError("plane configuration does not span 16 elements")
        atoms = [e for e in elems
                 if e != P.zero and not any(
                     P.leq(f, e) and f != e and f != P.zero for f in elems)]
        if len(atoms) != 4:
            raise RuntimeError("plane configuration lacks 4 minimal elements")
        new_nodes.append(BooleanSubalg(elems, tuple(sorted(atoms))))
    new_nodes.sort(key=lambda n: (n.height, n.atoms))
    return BSubPoset(P, new_nodes, "height3")


def boolean_shadows(P3: BSubPoset) -> list[BooleanShadow]:
    """Downset traces of the full Boolean subalgebras inside the height-<=3
    poset, computed from the exhaustive enumeration."""
    full = enumerate_bsub(P3.oml)
    shadows = []
    for node in full.nodes:
        ids = frozenset(i for i, n in enumerate(P3.nodes)
                        if n.element_ids <= node.element_ids)
        shadows.append(BooleanShadow(ids))
    return shadows


def bsub_to_json(S: BSubPoset) -> str:
    return json.dumps(S.to_json(), sort_keys=True, indent=1)
