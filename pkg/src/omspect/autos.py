"""Order-automorphism groups of finite posets, the restriction/extension
round trip between the full Boolean-subalgebra poset and its height-<=2 part,
and automorphisms of the spectral presheaf over a base automorphism."""
from __future__ import annotations

import os
from dataclasses import dataclass

from .bsub import (BooleanSubalg, BSubPoset, boolean_shadows, enumerate_bsub,
                   planes_completion)
from .posets import BudgetExceededError, FinitePoset
from .presheaves import Presheaf


def aut_budget(default: int = 600) -> int:
    return int(os.environ.get("OMSPECT_NODE_BUDGET", default))


@dataclass(frozen=True)
class PosetAutomorphism:
    perm: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.perm[i]

    def compose(self, other: "PosetAutomorphism") -> "PosetAutomorphism":
        """self after other."""
        return PosetAutomorphism(tuple(self.perm[other.perm[i]]
                                       for i in range(len(self.perm))))

    def inverse(self) -> "PosetAutomorphism":
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return PosetAutomorphism(tuple(inv))


def _invariants(Q: FinitePoset, rounds: int = 3) -> list:
    covers = Q.covers()
    parents = [[] for _ in range(Q.n)]
    children = [[] for _ in range(Q.n)]
    for (p, c) in covers:
        parents[c].append(p)
        children[p].append(c)
    inv = [(Q.heights()[i], len(parents[i]), len(children[i])) for i in range(Q.n)]
    for _ in range(rounds):
        inv = [(inv[i],
                tuple(sorted(inv[j] for j in parents[i])),
                tuple(sorted(inv[j] for j in children[i])))
               for i in range(Q.n)]
    return inv


def poset_automorphisms(Q: FinitePoset, budget: int | None = None) -> list[PosetAutomorphism]:
    """Exhaustive backtracking over nodes with invariant-class pruning."""
    budget = aut_budget() if budget is None else budget
    if Q.n > budget:
        raise BudgetExceededError("poset nodes", Q.n, budget)
    inv = _invariants(Q)
    classes: dict = {}
    for i, v in enumerate(inv):
        classes.setdefault(v, []).append(i)
    order = sorted(range(Q.n), key=lambda i: (len(classes[inv[i]]), str(inv[i]), i))
    out = []
    img = [None] * Q.n
    used = [False] * Q.n

    def bt(k):
        if k == Q.n:
            out.append(PosetAutomorphism(tuple(img)))
            return
        i = order[k]
        for j in classes[inv[i]]:
            if used[j]:
                continue
            ok = True
            for prev in order[:k]:
                if Q.leq(i, prev) != Q.leq(j, img[prev]) or \
                   Q.leq(prev, i) != Q.leq(img[prev], j):
                    ok = False
                    break
            if ok:
                img[i] = j
                used[j] = True
                bt(k + 1)
                used[j] = False
                img[i] = None

    bt(0)
    out.sort(key=lambda a: a.perm)
    return out


def _match_nodes(src: BSubPoset, dst: BSubPoset) -> dict[int, int]:
    """Index map for nodes present in both posets (by atom identity)."""
    return {i: dst.index[n.atoms] for i, n in enumerate(src.nodes)
            if n.atoms in dst.index}


def restrict_automorphism(gamma: PosetAutomorphism, full: BSubPoset,
                          star: BSubPoset) -> PosetAutomorphism:
    """Restrict an automorphism of the full poset to the height-<=2 part
    (heights are preserved, so the restriction lands inside it)."""
    to_star = _match_nodes(full, star)
    to_full = {v: k for k, v in to_star.items()}
    perm = [None] * len(star.nodes)
    for i in range(len(star.nodes)):
        perm[i] = to_star[gamma(to_full[i])]
    return PosetAutomorphism(tuple(perm))


def extend_automorphism(phi: PosetAutomorphism, star: BSubPoset):
    """Lift an automorphism of the star poset over planes, then over Boolean
    shadows, to an automorphism of the full poset. Returns (gamma, full)."""
    P3 = planes_completion(star)
    star_in_p3 = _match_nodes(star, P3)
    planes = [i for i, n in enumerate(P3.nodes) if n.height == 3]
    phi_hat = [None] * len(P3.nodes)
    for i, j in star_in_p3.items():
        phi_hat[j] = star_in_p3[phi(i)]
    down_of = {pl: frozenset(j for j in range(len(P3.nodes))
                             if j != pl and P3.poset.leq(j, pl)) for pl in planes}
    for pl in planes:
        image_down = frozenset(phi_hat[j] for j in down_of[pl])
        matches = [p2 for p2 in planes if down_of[p2] == image_down]
        if len(matches) != 1:
            raise RuntimeError("automorphism does not permute planes")
        phi_hat[pl] = matches[0]

    full = enumerate_bsub(star.oml)
    shadows = boolean_shadows(P3)
    shadow_index = {s.node_ids: i for i, s in enumerate(shadows)}
    perm = [None] * len(full.nodes)
    for i in range(len(full.nodes)):
        image = frozenset(phi_hat[j] for j in shadows[i].node_ids)
        j = shadow_index.get(image)
        if j is None:
            raise RuntimeError("automorphism does not permute Boolean shadows")
        perm[i] = j
    gamma = PosetAutomorphism(tuple(perm))
    for a in range(len(full.nodes)):
        for b in range(len(full.nodes)):
            if full.poset.leq(a, b) != full.poset.leq(gamma(a), gamma(b)):
                raise RuntimeError("extension is not an automorphism")
    back = restrict_automorphism(gamma, full, star)
    if back.perm != phi.perm:
        raise RuntimeError("extension does not restrict to the input")
    return gamma, full


def check_restriction_isomorphism(oml, budget: int | None = None) -> dict:
    """Compute both automorphism groups and verify that restriction is a
    bijective homomorphism, by comparing composition tables."""
    from .bsub import enumerate_bsub_star

    full = enumerate_bsub(oml, budget=budget)
    star = enumerate_bsub_star(oml)
    g_full = poset_automorphisms(full.poset, budget)
    g_star = poset_automorphisms(star.poset, budget)
    restricted = [restrict_automorphism(g, full, star) for g in g_full]
    injective = len(set(r.perm for r in restricted)) == len(restricted)
    surjective = {r.perm for r in restricted} == {g.perm for g in g_star}
    homomorphism = True
    for a, ra in zip(g_full, restricted):
        for b, rb in zip(g_full, restricted):
            ab = a.compose(b)
            rab = restrict_automorphism(ab, full, star)
            if rab.perm != ra.compose(rb).perm:
                homomorphism = False
    return {
        "full-order": len(g_full),
        "star-order": len(g_star),
        "injective": injective,
        "surjective": surjective,
        "homomorphism": homomorphism,
        "isomorphism": injective and surjective and homomorphism,
    }


# ---------------------------------------------------------------------------
# spectral-presheaf automorphisms over a base automorphism
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralAutomorphism:
    """Base automorphism of the star poset plus componentwise bijections
    fiber(base(B)) -> fiber(B), natural with respect to restriction."""
    base: tuple[int, ...]
    comps: tuple  # node -> tuple of pairs (src, dst)

    def component(self, node: int) -> dict:
        return dict(self.comps[node])


def spectral_automorphisms_over(gamma: PosetAutomorphism,
                                sigma: Presheaf) -> list[SpectralAutomorphism]:
    """Enumerate all natural families of fiber bijections over gamma;
    fibers have at most three points, so the search is exhaustive."""
    import itertools

    base = sigma.base
    n = base.n
    covers = base.covers()
    neighbors = [set() for _ in range(n)]
    for (p, c) in covers:
        neighbors[p].add(c)
        neighbors[c].add(p)
    # connected traversal, highest nodes first, so each new component is
    # constrained by an already-assigned neighbor as soon as possible
    key = lambda i: (-base.heights()[i], i)
    order = []
    seen = set()
    frontier: set[int] = set()
    while len(order) < n:
        pool = frontier - seen
        nxt = min(pool, key=key) if pool else min(
            (i for i in range(n) if i not in seen), key=key)
        order.append(nxt)
        seen.add(nxt)
        frontier |= neighbors[nxt]
    comp: list[dict | None] = [None] * n
    out = []

    def candidates(node: int):
        src = sigma.fibers[gamma(node)]
        dst = sigma.fibers[node]
        for perm in itertools.permutations(dst):
            yield dict(zip(src, perm))

    def consistent(node: int) -> bool:
        for (p, c) in covers:
            if p == node and comp[c] is not None:
                mp_here, mp_img = sigma.cover_res[(p, c)], \
                    sigma.res(gamma(p), gamma(c))
                for x in sigma.fibers[gamma(p)]:
                    if mp_here[comp[p][x]] != comp[c][mp_img[x]]:
                        return False
            if c == node and comp[p] is not None:
                mp_here, mp_img = sigma.cover_res[(p, c)], \
                    sigma.res(gamma(p), gamma(c))
                for x in sigma.fibers[gamma(p)]:
                    if mp_here[comp[p][x]] != comp[c][mp_img[x]]:
                        return False
        return True

    def bt(k):
        if k == n:
            out.append(SpectralAutomorphism(
                gamma.perm,
                tuple(tuple(sorted(comp[i].items(), key=lambda kv: str(kv)))
                      for i in range(n))))
            return
        node = order[k]
        for cand in candidates(node):
            comp[node] = cand
            if consistent(node):
                bt(k + 1)
            comp[node] = None

    bt(0)
    return out


def compose_spectral(s1: SpectralAutomorphism, s2: SpectralAutomorphism,
                     sigma: Presheaf) -> SpectralAutomorphism:
    """Product in the automorphism group: base composes contravariantly and
    component at B is comp1_B followed through comp2 at the image node."""
    g1 = s1.base
    base = tuple(s2.base[g1[i]] for i in range(len(g1)))
    comps = []
    for node in range(len(g1)):
        c2 = dict(s2.comps[g1[node]])
        c1 = dict(s1.comps[node])
        comps.append(tuple(sorted({x: c1[c2[x]] for x in c2}.items(),
                                  key=lambda kv: str(kv))))
    return SpectralAutomorphism(base, tuple(comps))
