"""Contravariant set-valued data over a finite poset: functoriality checking,
global-section search with propagation, subobjects, natural transformations,
and the concrete spectral / outer / Klein-four instances."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .bsub import BSubPoset
from .dasein import daseinise_projection
from .oml import FiniteOML
from .posets import FinitePoset


class KleinPresheafError(ValueError):
    pass


class Presheaf:
    """Fibers over poset nodes with restriction maps stored on cover pairs.

    Longer restrictions are composed on demand and memoized; functoriality
    (path independence) is checked, not assumed.
    """

    def __init__(self, base: FinitePoset, fibers: list[tuple],
                 cover_res: dict, labels: list[str] | None = None, meta=None,
                 elabel=None):
        self.base = base
        self.fibers = [tuple(f) for f in fibers]
        self.cover_res = dict(cover_res)
        self.labels = labels or [f"n{i}" for i in range(base.n)]
        self.meta = meta or {}
        self.elabel = elabel or str
        self._res_cache: dict[tuple[int, int], dict] = {}

    def res(self, src: int, dst: int) -> dict:
        """Restriction map fiber(src) -> fiber(dst) for dst <= src."""
        if src == dst:
            return {x: x for x in self.fibers[src]}
        key = (src, dst)
        if key in self._res_cache:
            return self._res_cache[key]
        if key in self.cover_res:
            self._res_cache[key] = self.cover_res[key]
            return self.cover_res[key]
        for (p, c) in self.base.covers():
            if p == src and self.base.leq(dst, c):
                step = self.cover_res[(p, c)]
                rest = self.res(c, dst)
                out = {x: rest[step[x]] for x in self.fibers[src]}
                self._res_cache[key] = out
                return out
        raise KeyError(f"no restriction path {src} -> {dst}")

    def check_functoriality(self) -> list[str]:
        bad = []
        for src in range(self.base.n):
            below = [d for d in range(self.base.n)
                     if d != src and self.base.leq(d, src)]
            for dst in below:
                maps = []
                for (p, c) in self.base.covers():
                    if p == src and (c == dst or self.base.leq(dst, c)):
                        step = self.cover_res[(p, c)]
                        rest = self.res(c, dst)
                        maps.append({x: rest[step[x]] for x in self.fibers[src]})
                if len(maps) > 1 and any(m != maps[0] for m in maps[1:]):
                    bad.append(f"paths {self.labels[src]} -> {self.labels[dst]} disagree")
        return bad

    def restricted(self, max_height: int):
        keep = [i for i in range(self.base.n)
                if self.base.heights()[i] <= max_height]
        sub, old_ids = self.base.restricted(keep)
        pos = {old: new for new, old in enumerate(old_ids)}
        fibers = [self.fibers[old] for old in old_ids]
        cover_res = {}
        for (p, c) in sub.covers():
            cover_res[(p, c)] = self.res(old_ids[p], old_ids[c])
        return Presheaf(sub, fibers, cover_res,
                        [self.labels[old] for old in old_ids], dict(self.meta),
                        self.elabel)

    def permuted(self, perm: list[int]):
        """Same presheaf with nodes renumbered: new index perm[i] for old i."""
        n = self.base.n
        down = [0] * n
        for i in range(n):
            m = self.base.down[i]
            while m:
                j = (m & -m).bit_length() - 1
                down[perm[i]] |= 1 << perm[j]
                m &= m - 1
        base = FinitePoset(n, down)
        fibers = [None] * n
        labels = [None] * n
        for i in range(n):
            fibers[perm[i]] = self.fibers[i]
            labels[perm[i]] = self.labels[i]
        cover_res = {}
        for (p, c) in base.covers():
            old_p = perm.index(p)
            old_c = perm.index(c)
            cover_res[(p, c)] = self.res(old_p, old_c)
        return Presheaf(base, fibers, cover_res, labels, dict(self.meta),
                        self.elabel)

    def to_json(self) -> dict:
        return {
            "nodes": [{"label": self.labels[i],
                       "fiber": [self.elabel(x) for x in self.fibers[i]]}
                      for i in range(self.base.n)],
            "restrictions": [
                {"from": p, "to": c,
                 "map": {self.elabel(k): self.elabel(v)
                         for k, v in self.cover_res[(p, c)].items()}}
                for (p, c) in self.base.covers()
            ],
        }


class GroupPresheaf(Presheaf):
    """Presheaf of finite abelian groups; fiber elements are tuples over Z2
    and restriction maps must be homomorphisms."""

    @staticmethod
    def add(x: tuple, y: tuple) -> tuple:
        return tuple((a + b) % 2 for a, b in zip(x, y))

    def check_homomorphisms(self) -> list[str]:
        bad = []
        for (p, c), mp in self.cover_res.items():
            for x in self.fibers[p]:
                for y in self.fibers[p]:
                    if mp[self.add(x, y)] != self.add(mp[x], mp[y]):
                        bad.append(f"res {self.labels[p]} -> {self.labels[c]} not a homomorphism")
                        break
                else:
                    continue
                break
        return bad


@dataclass(frozen=True)
class GlobalSection:
    choice: tuple

    def __getitem__(self, node: int):
        return self.choice[node]


@dataclass(frozen=True)
class Subobject:
    part: tuple  # node -> frozenset


@dataclass
class NatTrans:
    source: Presheaf
    target: Presheaf
    comps: list[dict]


def check_naturality(t: NatTrans) -> list[str]:
    bad = []
    if t.source.base is not t.target.base and t.source.base.down != t.target.base.down:
        return ["presheaves do not share a base"]
    for (p, c) in t.source.base.covers():
        sres = t.source.res(p, c)
        tres = t.target.res(p, c)
        for x in t.source.fibers[p]:
            if tres[t.comps[p][x]] != t.comps[c][sres[x]]:
                bad.append(
                    f"square fails on cover {t.source.labels[p]} -> "
                    f"{t.source.labels[c]} at {x}")
    return bad


def validate_section(F: Presheaf, s: GlobalSection) -> bool:
    return all(F.res(p, c)[s[p]] == s[c] for (p, c) in F.base.covers())


def validate_subobject(F: Presheaf, sub: Subobject) -> bool:
    for (p, c) in F.base.covers():
        mp = F.res(p, c)
        if not {mp[x] for x in sub.part[p]} <= set(sub.part[c]):
            return False
    return True


def full_subobject(F: Presheaf) -> Subobject:
    return Subobject(tuple(frozenset(f) for f in F.fibers))


def sub_union(a: Subobject, b: Subobject) -> Subobject:
    return Subobject(tuple(x | y for x, y in zip(a.part, b.part)))


def sub_intersection(a: Subobject, b: Subobject) -> Subobject:
    return Subobject(tuple(x & y for x, y in zip(a.part, b.part)))


def sub_implication(F: Presheaf, a: Subobject, b: Subobject) -> Subobject:
    """Heyting implication in the subobject lattice."""
    n = F.base.n
    part = []
    for node in range(n):
        keep = []
        for x in F.fibers[node]:
            ok = True
            for below in range(n):
                if not F.base.leq(below, node):
                    continue
                y = F.res(node, below)[x]
                if y in a.part[below] and y not in b.part[below]:
                    ok = False
                    break
            if ok:
                keep.append(x)
        part.append(frozenset(keep))
    return Subobject(tuple(part))


def all_subobjects(F: Presheaf, budget: int = 100000) -> list[Subobject]:
    nodes = list(range(F.base.n))
    out = []
    parts = [None] * F.base.n

    def rec(i):
        if len(out) > budget:
            raise RuntimeError(f"subobject budget exceeded ({budget})")
        if i == len(nodes):
            out.append(Subobject(tuple(parts)))
            return
        node = nodes[i]
        for chosen in itertools.chain.from_iterable(
                itertools.combinations(F.fibers[node], k)
                for k in range(len(F.fibers[node]) + 1)):
            cand = frozenset(chosen)
            ok = True
            for j in range(i):
                other = nodes[j]
                if F.base.leq(other, node):
                    mp = F.res(node, other)
                    if not {mp[x] for x in cand} <= parts[other]:
                        ok = False
                        break
                elif F.base.leq(node, other):
                    mp = F.res(other, node)
                    if not {mp[x] for x in parts[other]} <= cand:
                        ok = False
                        break
            if ok:
                parts[i] = cand
                rec(i + 1)
        parts[i] = None

    rec(0)
    return out


# ---------------------------------------------------------------------------
# global-section search: backtracking with arc-consistency propagation
# ---------------------------------------------------------------------------

@dataclass
class SearchResult:
    verdict: str                  # "sections-exist" | "no-global-section"
    section: GlobalSection | None = None
    count: int | None = None
    sections: list[GlobalSection] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)


def _propagate(F: Presheaf, domains: list[list], trace: list[dict] | None):
    covers = F.base.covers()
    changed = True
    while changed:
        changed = False
        for (p, c) in covers:
            mp = F.cover_res[(p, c)]
            img = {mp[x] for x in domains[p]}
            newc = [y for y in domains[c] if y in img]
            if len(newc) != len(domains[c]):
                if trace is not None:
                    trace.append({"prune": F.labels[c],
                                  "kept": [F.elabel(x) for x in newc],
                                  "from-cover": [F.labels[p], F.labels[c]]})
                domains[c] = newc
                changed = True
            allowed = set(domains[c])
            newp = [x for x in domains[p] if mp[x] in allowed]
            if len(newp) != len(domains[p]):
                if trace is not None:
                    trace.append({"prune": F.labels[p],
                                  "kept": [F.elabel(x) for x in newp],
                                  "from-cover": [F.labels[p], F.labels[c]]})
                domains[p] = newp
                changed = True
            if not domains[p] or not domains[c]:
                return False
    return True


def global_sections(F: Presheaf, mode: str = "enumerate",
                    max_height: int | None = None,
                    trace_limit: int = 10000) -> SearchResult:
    if max_height is not None:
        F = F.restricted(max_height)
    order = sorted(range(F.base.n), key=lambda i: (-F.base.heights()[i], i))
    order_pos = {node: k for k, node in enumerate(order)}
    trace: list[dict] = []
    domains = [list(f) for f in F.fibers]
    if any(not d for d in domains):
        return SearchResult("no-global-section", count=0, trace=[{"empty-fiber": True}])
    found: list[GlobalSection] = []
    assign_stack: list[dict] = []

    def fail(prop_log):
        if len(trace) < trace_limit:
            trace.append({"assignments": list(assign_stack),
                          "propagations": prop_log})

    prop_log: list[dict] = []
    if not _propagate(F, domains, prop_log):
        fail(prop_log)
        return SearchResult("no-global-section", count=0, trace=trace)

    def solve(domains) -> bool:
        pend = [i for i in order if len(domains[i]) > 1]
        if not pend:
            sec = GlobalSection(tuple(domains[i][0] for i in range(F.base.n)))
            found.append(sec)
            return mode == "exists"
        node = min(pend, key=lambda i: (len(domains[i]), order_pos[i]))
        for val in domains[node]:
            nxt = [list(d) for d in domains]
            nxt[node] = [val]
            assign_stack.append({"node": F.labels[node], "value": F.elabel(val)})
            log: list[dict] = []
            if _propagate(F, nxt, log):
                if solve(nxt):
                    assign_stack.pop()
                    return True
            else:
                fail(log)
            assign_stack.pop()
        return False

    solve(domains)
    if found:
        return SearchResult("sections-exist", section=found[0],
                            count=len(found) if mode != "exists" else None,
                            sections=found if mode == "enumerate" else [])
    return SearchResult("no-global-section", count=0, trace=trace)


# ---------------------------------------------------------------------------
# concrete presheaves over a star poset
# ---------------------------------------------------------------------------

def spectral_presheaf(S: BSubPoset) -> Presheaf:
    """Fiber at B: the atoms of B (a Stone point is the homomorphism sending
    exactly one atom to 1); restriction sends an atom to the unique atom of
    the smaller algebra above it."""
    P = S.oml
    fibers = [tuple(n.atoms) for n in S.nodes]
    cover_res = {}
    for (p, c) in S.poset.covers():
        mp = {}
        for a in fibers[p]:
            targets = [b for b in fibers[c] if P.leq(a, b)]
            if len(targets) != 1:
                raise RuntimeError(
                    f"atom {P.label(a)} has {len(targets)} images in {S.node_label(c)}")
            mp[a] = targets[0]
        cover_res[(p, c)] = mp
    return Presheaf(S.poset, fibers, cover_res,
                    [S.node_label(i) for i in range(len(S.nodes))],
                    meta={"star": S, "kind": "spectral"}, elabel=P.label)


def outer_projection_presheaf(S: BSubPoset, P: FiniteOML | None = None) -> Presheaf:
    """Fiber at B: all elements of B; restriction is outer daseinisation."""
    P = P or S.oml
    fibers = [tuple(sorted(n.element_ids)) for n in S.nodes]
    cover_res = {}
    for (p, c) in S.poset.covers():
        mp = {e: daseinise_projection(P, e, S.nodes[c], "outer") for e in fibers[p]}
        cover_res[(p, c)] = mp
    return Presheaf(S.poset, fibers, cover_res,
                    [S.node_label(i) for i in range(len(S.nodes))],
                    meta={"star": S, "kind": "outer"}, elabel=P.label)


def klein4_presheaf(S: BSubPoset) -> GroupPresheaf:
    """Z2 at points, the even-parity subgroup of Z2^3 at lines, trivial at the
    bottom; restrictions are the coordinate projections attached to each
    point's distinguished atom."""
    P = S.oml
    for b in P.blocks:
        if len(b.atoms) != 3:
            raise KleinPresheafError("Klein presheaf undefined here")
    oml_atoms = set(P.atoms())
    node_atom = {}
    fibers: list[tuple] = []
    for i, n in enumerate(S.nodes):
        if n.height == 0:
            fibers.append(((),))
        elif n.height == 1:
            sides = [a for a in n.atoms if a in oml_atoms]
            if len(sides) != 1:
                raise KleinPresheafError("Klein presheaf undefined here")
            node_atom[i] = sides[0]
            fibers.append(((0,), (1,)))
        elif n.height == 2:
            if not all(a in oml_atoms for a in n.atoms):
                raise KleinPresheafError("Klein presheaf undefined here")
            fibers.append(((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)))
        else:
            raise KleinPresheafError("Klein presheaf undefined here")
    cover_res = {}
    for (p, c) in S.poset.covers():
        np_, nc = S.nodes[p], S.nodes[c]
        if nc.height == 0:
            cover_res[(p, c)] = {x: () for x in fibers[p]}
        else:
            a = node_atom[c]
            pos = np_.atoms.index(a)
            cover_res[(p, c)] = {x: (x[pos],) for x in fibers[p]}
    return GroupPresheaf(S.poset, fibers, cover_res,
                         [S.node_label(i) for i in range(len(S.nodes))],
                         meta={"star": S, "kind": "klein4", "node_atom": node_atom})
