"""Finite orthomodular posets, built from ray sets (exact projector matrices)
or from Greechie block lists (abstract pasted Boolean algebras)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .linalg import Matrix, identity, mat_mul, mat_sub, mat_add, outer, trace, is_symmetric, dot, zeros
from .posets import FinitePoset, transitive_closure
from .rays import Ray, canonicalize_ray
from .scalars import QS0, QuadScalar


class OmlError(ValueError):
    pass


class IncompleteContextError(OmlError):
    def __init__(self, cliques):
        self.cliques = cliques
        detail = "; ".join("{" + ", ".join(map(str, c)) + "}" for c in cliques)
        super().__init__(f"incomplete context: {detail}")


class IllegalPastingError(OmlError):
    pass


@dataclass(frozen=True)
class ProjOp:
    matrix: Matrix
    rank: int


@dataclass(frozen=True)
class Block:
    atoms: tuple[int, ...]


class FiniteOML:
    """Elements with order, orthocomplement and block decomposition.

    Matrix mode identifies elements by exact projector matrices; Greechie mode
    by pasted-id classes. The finished object is immutable.
    """

    def __init__(self, mode, poset, ortho, zero, one, blocks, labels,
                 proj=None, atoms_below=None, dim=None, ring=None, rays=None):
        self.mode = mode
        self.poset: FinitePoset = poset
        self.n = poset.n
        self.ortho = tuple(ortho)
        self.zero = zero
        self.one = one
        self.blocks: list[Block] = blocks
        self.labels = list(labels)
        self.proj: list[ProjOp] | None = proj
        self.atoms_below = atoms_below
        self.dim = dim
        self.ring = ring
        self.rays: list[Ray] | None = rays
        self._matrix_index = None
        if proj is not None:
            self._matrix_index = {p.matrix: i for i, p in enumerate(proj)}
        self._ortho_down = [poset.down[self.ortho[i]] for i in range(self.n)]

    # -- order helpers ---------------------------------------------------

    def leq(self, i: int, j: int) -> bool:
        return self.poset.leq(i, j)

    def orthogonal(self, i: int, j: int) -> bool:
        return self.poset.leq(i, self.ortho[j])

    def glb(self, i, j):
        return self.poset.glb(i, j)

    def lub(self, i, j):
        return self.poset.lub(i, j)

    def element_of_matrix(self, matrix: Matrix):
        if self._matrix_index is None:
            raise OmlError("not a matrix-mode model")
        return self._matrix_index.get(matrix)

    def atoms(self) -> list[int]:
        out = set()
        for b in self.blocks:
            out.update(b.atoms)
        return sorted(out)

    def label(self, i: int) -> str:
        return self.labels[i]

    def rank(self, i: int) -> int:
        if self.proj is not None:
            return self.proj[i].rank
        return len(self.atoms_below[i])

    def block_element(self, block_idx: int, subset) -> int:
        """Element given by a sub-join of a block's atoms."""
        b = self.blocks[block_idx]
        ids = [b.atoms[k] for k in subset]
        if not ids:
            return self.zero
        cur = ids[0]
        for x in ids[1:]:
            nxt = self.poset.lub(cur, x)
            if nxt is None:
                raise OmlError("block sub-join missing")
            cur = nxt
        return cur


# ---------------------------------------------------------------------------
# clique enumeration (deterministic Bron-Kerbosch with pivot)
# ---------------------------------------------------------------------------

def maximal_cliques(n: int, adj: list[set[int]]) -> list[tuple[int, ...]]:
    out = []

    def bk(r, p, x):
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        pivot = max(sorted(p | x), key=lambda u: len(p & adj[u]))
        for v in sorted(p - adj[pivot]):
            bk(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    bk(set(), set(range(n)), set())
    return sorted(out)


# ---------------------------------------------------------------------------
# matrix mode
# ---------------------------------------------------------------------------

def _ray_projector(r: Ray) -> Matrix:
    norm = dot(r.entries, r.entries)
    return tuple(tuple(x / norm for x in row) for row in outer(r.entries, r.entries))


def _flatten(mat: Matrix):
    return tuple(x for row in mat for x in row)


def build_oml_from_rays(raw_rays, d: int, m: int = 0,
                        on_incomplete: str = "error") -> FiniteOML:
    """Blocks are the maximal pairwise-orthogonal ray sets of size d.

    Smaller maximal cliques either raise (``error``), get the orthocomplement
    of their span adjoined as one extra atom (``complete``), or are dropped
    (``skip``; a ray left in no block still raises).
    """
    if on_incomplete not in ("error", "complete", "skip"):
        raise ValueError(f"unknown on_incomplete mode {on_incomplete!r}")
    rays: list[Ray] = []
    seen = {}
    for v in raw_rays:
        r = v if isinstance(v, Ray) else canonicalize_ray(v, m)
        if len(r.entries) != d:
            raise OmlError(f"ray {r} has dimension {len(r.entries)}, expected {d}")
        if r.entries not in seen:
            seen[r.entries] = len(rays)
            rays.append(r)
    nr = len(rays)
    adj = [set() for _ in range(nr)]
    for i, j in itertools.combinations(range(nr), 2):
        if not dot(rays[i].entries, rays[j].entries):
            adj[i].add(j)
            adj[j].add(i)
    cliques = maximal_cliques(nr, adj)
    if on_incomplete != "complete" and not any(len(c) == d for c in cliques):
        raise IncompleteContextError([tuple(rays[i] for i in c) for c in cliques])

    eye = identity(d)
    ray_proj = [_ray_projector(r) for r in rays]
    contexts: list[list[Matrix]] = []      # per block: atom projector list
    completions: list[tuple[Matrix, int]] = []
    short = [c for c in cliques if len(c) != d]
    if short and on_incomplete == "error":
        raise IncompleteContextError([tuple(rays[i] for i in c) for c in short])
    for c in cliques:
        if len(c) == d:
            contexts.append([ray_proj[i] for i in c])
        elif on_incomplete == "complete":
            s = zeros(d)
            for i in c:
                s = mat_add(s, ray_proj[i])
            comp = mat_sub(eye, s)
            completions.append((comp, d - len(c)))
            contexts.append([ray_proj[i] for i in c] + [comp])
    if on_incomplete == "skip":
        covered = set(i for c in cliques if len(c) == d for i in c)
        missing = sorted(set(range(nr)) - covered)
        if missing:
            raise IncompleteContextError(
                [tuple(rays[i] for i in c) for c in short if any(i in missing for i in c)])

    # elements: all sub-joins of atoms within each block, deduplicated by matrix
    mats = {}

    def intern(mat: Matrix) -> Matrix:
        return mats.setdefault(mat, mat)

    element_set = {intern(zeros(d)), intern(eye)}
    block_subsets = []
    for atoms in contexts:
        k = len(atoms)
        sums = {}
        for size in range(1, k + 1):
            for subset in itertools.combinations(range(k), size):
                s = atoms[subset[0]]
                for t in subset[1:]:
                    s = mat_add(s, atoms[t])
                s = intern(s)
                sums[subset] = s
                element_set.add(s)
        block_subsets.append((atoms, sums))

    def mat_rank(mat: Matrix) -> int:
        return trace(mat).as_int()

    def sort_key(mat: Matrix):
        return (mat_rank(mat), _flatten(mat))

    elements = sorted(element_set, key=sort_key)
    index = {mat: i for i, mat in enumerate(elements)}
    nelem = len(elements)
    zero, one = index[zeros(d)], index[eye]

    # order: q . p == p, with a rank prefilter (equal ranks compare equal only)
    ranks = [mat_rank(mat) for mat in elements]
    down = [1 << i for i in range(nelem)]
    for i in range(nelem):          # i candidate below j
        for j in range(nelem):
            if ranks[i] >= ranks[j] or i == zero or j == one:
                continue
            if mat_mul(elements[j], elements[i]) == elements[i]:
                down[j] |= 1 << i
    for j in range(nelem):
        down[j] |= 1 << zero
    down[one] = (1 << nelem) - 1
    poset = FinitePoset(nelem, down)

    ortho = [index[mat_sub(eye, mat)] for mat in elements]

    blocks = []
    for atoms, _ in block_subsets:
        blocks.append(Block(tuple(sorted(index[a] for a in atoms))))
    blocks.sort(key=lambda b: b.atoms)

    ray_of_matrix = {ray_proj[i]: rays[i] for i in range(nr)}
    proj = [ProjOp(mat, ranks[i]) for i, mat in enumerate(elements)]
    labels = []
    ray_list = []
    comp_count = 0
    for i, mat in enumerate(elements):
        if i == zero:
            labels.append("0")
        elif i == one:
            labels.append("1")
        elif mat in ray_of_matrix:
            labels.append(str(ray_of_matrix[mat]))
        else:
            labels.append(f"e{i}")
    for r in rays:
        ray_list.append(r)

    return FiniteOML("matrix", poset, ortho, zero, one, blocks, labels,
                     proj=proj, dim=d, ring=m, rays=ray_list)


# ---------------------------------------------------------------------------
# Greechie mode
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.find(p)
            self.parent[x] = p
        return p

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def build_oml_from_greechie(block_lists) -> FiniteOML:
    """Paste the Boolean algebras 2^block along shared atoms."""
    blocks = []
    for bl in block_lists:
        atoms = tuple(dict.fromkeys(str(a) for a in bl))
        if len(atoms) != len(bl) or len(atoms) < 2:
            raise IllegalPastingError(f"block {bl!r} needs >= 2 distinct atoms")
        blocks.append(atoms)
    # drop duplicate / contained blocks, reject illegal overlaps
    keep = []
    for i, b in enumerate(blocks):
        contained = any(set(b) <= set(c) for j, c in enumerate(blocks) if i != j and
                        (set(b) != set(c) or j < i))
        if not contained:
            keep.append(b)
    blocks = keep
    for b1, b2 in itertools.combinations(blocks, 2):
        shared = set(b1) & set(b2)
        if len(shared) >= 2:
            raise IllegalPastingError(f"blocks {b1} and {b2} share {sorted(shared)}")

    uf = _UnionFind()
    keys = []
    for bi, b in enumerate(blocks):
        for size in range(len(b) + 1):
            for sub in itertools.combinations(range(len(b)), size):
                keys.append((bi, frozenset(b[k] for k in sub)))
    for k in keys:
        uf.find(k)
    for (i, bi), (j, bj) in itertools.combinations(enumerate(blocks), 2):
        shared = set(bi) & set(bj)
        uf.union((i, frozenset()), (j, frozenset()))
        uf.union((i, frozenset(bi)), (j, frozenset(bj)))
        for c in shared:
            uf.union((i, frozenset({c})), (j, frozenset({c})))
            uf.union((i, frozenset(bi) - {c}), (j, frozenset(bj) - {c}))

    classes = sorted(set(uf.find(k) for k in keys))
    members: dict = {c: [] for c in classes}
    for k in keys:
        members[uf.find(k)].append(k)
    atoms_below = {}
    for c in classes:
        atoms_below[c] = frozenset().union(*(s for _, s in members[c]))

    all_atoms = frozenset(a for b in blocks for a in b)

    def class_label(c):
        ab = atoms_below[c]
        if not ab:
            return "0"
        if ab == all_atoms and any(s == frozenset(blocks[i]) for i, s in members[c]):
            return "1"
        return "+".join(sorted(ab))

    order_key = {c: (len(atoms_below[c]), class_label(c)) for c in classes}
    classes.sort(key=lambda c: order_key[c])
    cindex = {c: i for i, c in enumerate(classes)}
    n = len(classes)

    rel = set()
    for c in classes:
        for (bi, s) in members[c]:
            for c2 in classes:
                for (bj, t) in members[c2]:
                    if bi == bj and s <= t:
                        rel.add((cindex[c], cindex[c2]))
    down = transitive_closure(n, rel)
    poset = FinitePoset(n, down)

    ortho = [None] * n
    for c in classes:
        bi, s = members[c][0]
        comp = uf.find((bi, frozenset(blocks[bi]) - s))
        ortho[cindex[c]] = cindex[comp]

    zero = cindex[uf.find((0, frozenset()))]
    one = cindex[uf.find((0, frozenset(blocks[0])))]
    out_blocks = sorted(
        (Block(tuple(sorted(cindex[uf.find((bi, frozenset({a})))] for a in b)))
         for bi, b in enumerate(blocks)),
        key=lambda blk: blk.atoms)
    labels = [class_label(c) for c in classes]
    ab_list = [atoms_below[c] for c in classes]
    return FiniteOML("greechie", poset, ortho, zero, one, out_blocks, labels,
                     atoms_below=ab_list)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class OmlReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_oml(P: FiniteOML) -> OmlReport:
    v = []
    n = P.n
    po = P.poset
    for i in range(n):
        if P.ortho[P.ortho[i]] != i:
            v.append(f"ortho not involutive at {P.label(i)}")
    if P.ortho[P.zero] != P.one:
        v.append("ortho(0) != 1")
    for i in range(n):
        if not po.leq(P.zero, i) or not po.leq(i, P.one):
            v.append(f"bounds violated at {P.label(i)}")
    for i in range(n):
        for j in range(n):
            if i != j and po.leq(i, j) and not po.leq(P.ortho[j], P.ortho[i]):
                v.append(f"ortho not antitone on {P.label(i)} <= {P.label(j)}")
    for bi, b in enumerate(P.blocks):
        for x, y in itertools.combinations(b.atoms, 2):
            if not P.orthogonal(x, y):
                v.append(f"block atoms {P.label(x)},{P.label(y)} not orthogonal")
        if P.proj is not None:
            s = zeros(P.dim)
            for a in b.atoms:
                s = mat_add(s, P.proj[a].matrix)
            if s != identity(P.dim):
                v.append(f"block {b.atoms} does not resolve the identity")
        # the induced subalgebra must be Boolean: sub-joins exist, are distinct,
        # and compare exactly like the index subsets
        k = len(b.atoms)
        sub_elem = {}
        ok_block = True
        for size in range(k + 1):
            for sub in itertools.combinations(range(k), size):
                try:
                    e = P.block_element(bi, sub)
                except OmlError:
                    v.append(f"block {b.atoms}: sub-join {sub} missing")
                    ok_block = False
                    continue
                sub_elem[frozenset(sub)] = e
        if ok_block:
            vals = list(sub_elem.values())
            if len(set(vals)) != len(vals):
                v.append(f"block {b.atoms}: sub-joins collide")
            for s1, e1 in sub_elem.items():
                for s2, e2 in sub_elem.items():
                    if (s1 <= s2) != po.leq(e1, e2):
                        v.append(f"block {b.atoms}: order mismatch on {sorted(s1)} vs {sorted(s2)}")
                        break
                else:
                    continue
                break
            # block meets must be order-theoretic greatest lower bounds
            for s1, e1 in sub_elem.items():
                for s2, e2 in sub_elem.items():
                    if s1 < s2 or (s1 == s2):
                        continue
                    want = sub_elem[s1 & s2]
                    if po.glb(e1, e2) != want:
                        v.append(f"block {b.atoms}: meet of {P.label(e1)},{P.label(e2)} "
                                 f"is not the poset glb")
            # complements inside the block
            full = frozenset(range(k))
            for s1, e1 in sub_elem.items():
                if P.ortho[e1] != sub_elem[full - s1]:
                    v.append(f"block {b.atoms}: complement of {P.label(e1)} leaves the block")
    for i in range(n):
        if i in (P.zero, P.one):
            continue
        if not any(_element_in_block(P, i, bi) for bi in range(len(P.blocks))):
            v.append(f"element {P.label(i)} lies in no block")
    if P.proj is not None:
        for i in range(n):
            mat = P.proj[i].matrix
            if not is_symmetric(mat):
                v.append(f"element {P.label(i)} not symmetric")
            if mat_mul(mat, mat) != mat:
                v.append(f"element {P.label(i)} not idempotent")
            if trace(mat) != QuadScalar(P.proj[i].rank):
                v.append(f"element {P.label(i)} trace != rank")
    return OmlReport(sorted(set(v)))


def _element_in_block(P: FiniteOML, e: int, block_idx: int) -> bool:
    b = P.blocks[block_idx]
    k = len(b.atoms)
    for size in range(k + 1):
        for sub in itertools.combinations(range(k), size):
            try:
                if P.block_element(block_idx, sub) == e:
                    return True
            except OmlError:
                return False
    return False


def block_elements(P: FiniteOML, block_idx: int) -> set[int]:
    b = P.blocks[block_idx]
    out = set()
    for size in range(len(b.atoms) + 1):
        for sub in itertools.combinations(range(len(b.atoms)), size):
            out.add(P.block_element(block_idx, sub))
    return out
