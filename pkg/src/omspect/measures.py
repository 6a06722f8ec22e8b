"""Measures: finitely additive 0/1 measures versus global sections, rational
density states, measures on subobjects of the spectral presheaf, and Z2-valued
states on 3-atom-block models."""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from .bsub import BooleanSubalg, BSubPoset
from .dasein import daseinise_projection
from .linalg import (mat_add, mat_mul, mat_scale, outer, trace,
                     trace_product, zeros, dot, is_symmetric)
from .oml import FiniteOML, OmlError
from .posets import BudgetExceededError
from .presheaves import (GlobalSection, Presheaf, Subobject, all_subobjects,
                         full_subobject, spectral_presheaf, sub_intersection,
                         sub_union, validate_subobject)
from .rays import Ray, canonicalize_ray
from .scalars import QS0, QS1, QuadScalar


class NotAMeasureError(OmlError):
    pass


# ---------------------------------------------------------------------------
# 0/1 measures <-> global sections
# ---------------------------------------------------------------------------

class ZeroOneMeasure:
    def __init__(self, oml: FiniteOML, values):
        self.oml = oml
        self.values = tuple(int(v) for v in values)
        if len(self.values) != oml.n or any(v not in (0, 1) for v in self.values):
            raise NotAMeasureError("values must assign 0 or 1 to every element")

    def __call__(self, p: int) -> int:
        return self.values[p]

    def violations(self) -> list[str]:
        """Normalization plus additivity over every orthogonal pair whose join
        is realized inside a common algebra of height at most two."""
        P = self.oml
        out = []
        if self.values[P.zero] != 0:
            out.append("value(0) != 0")
        if self.values[P.one] != 1:
            out.append("value(1) != 1")
        for p in range(P.n):
            if p not in (P.zero, P.one):
                if self.values[p] + self.values[P.ortho[p]] != 1:
                    out.append(f"not additive on {P.label(p)} _|_ {P.label(P.ortho[p])}")
        for p in range(P.n):
            for q in range(p + 1, P.n):
                if p in (P.zero, P.one) or q in (P.zero, P.one):
                    continue
                if not P.orthogonal(p, q) or q == P.ortho[p]:
                    continue
                u = P.poset.lub(p, q)
                if u is None or u == P.one:
                    continue
                w = P.ortho[u]
                if (P.poset.lub(p, w) == P.ortho[q]
                        and P.poset.lub(q, w) == P.ortho[p]
                        and self.values[u] != self.values[p] + self.values[q]):
                    out.append(f"not additive on {P.label(p)} _|_ {P.label(q)}")
        return out

    def __eq__(self, other):
        return isinstance(other, ZeroOneMeasure) and self.values == other.values

    def __hash__(self):
        return hash(self.values)


def section_to_measure(s: GlobalSection, S: BSubPoset,
                       sigma: Presheaf | None = None) -> ZeroOneMeasure:
    """value(p) = 1 iff the chosen Stone point at {0,p,p',1} is p itself."""
    P = S.oml
    values = [0] * P.n
    values[P.one] = 1
    for p in range(P.n):
        if p in (P.zero, P.one):
            continue
        node = S.node_of_element(p)
        values[p] = 1 if s[node] == p else 0
    m = ZeroOneMeasure(P, values)
    bad = m.violations()
    if bad:
        raise RuntimeError(f"section does not induce a measure: {bad}")
    return m


def measure_to_section(sigma_meas: ZeroOneMeasure, S: BSubPoset) -> GlobalSection:
    """Restrict the measure to each node; the unique atom valued 1 is the
    Stone point there."""
    P = S.oml
    bad = sigma_meas.violations()
    if bad:
        raise NotAMeasureError("not a measure: " + "; ".join(bad))
    choice = []
    for i, n in enumerate(S.nodes):
        ones = [a for a in n.atoms if sigma_meas(a) == 1]
        if len(ones) != 1:
            raise NotAMeasureError(f"restriction to {S.node_label(i)} is not a point")
        choice.append(ones[0])
    sec = GlobalSection(tuple(choice))
    for (p, c) in S.poset.covers():
        a = sec[p]
        target = sec[c]
        if not P.leq(a, target):
            raise RuntimeError("induced section is incompatible")
    return sec


# ---------------------------------------------------------------------------
# rational density states
# ---------------------------------------------------------------------------

class State:
    """Convex combination of ray states with rational weights; the density
    matrix is exactly symmetric with trace 1."""

    def __init__(self, oml: FiniteOML, weights):
        if oml.mode != "matrix":
            raise OmlError("states need a matrix-mode model")
        self.oml = oml
        self.weights = []
        total = Fraction(0)
        rho = zeros(oml.dim)
        for w, ray in weights:
            w = Fraction(w)
            if w <= 0:
                raise ValueError("weights must be positive")
            total += w
            if not isinstance(ray, Ray):
                ray = canonicalize_ray(ray, oml.ring)
            self.weights.append((w, ray))
            norm = dot(ray.entries, ray.entries)
            proj = tuple(tuple(x / norm for x in row)
                         for row in outer(ray.entries, ray.entries))
            rho = mat_add(rho, mat_scale(QuadScalar(w), proj))
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")
        if not is_symmetric(rho):
            raise RuntimeError("density not symmetric")
        if trace(rho) != QS1:
            raise RuntimeError("density trace != 1")
        self.density = rho

    def expectation(self, e: int) -> QuadScalar:
        return trace_product(self.density, self.oml.proj[e].matrix)


# ---------------------------------------------------------------------------
# measures on subobjects of the spectral presheaf
# ---------------------------------------------------------------------------

class PresheafMeasure:
    """Assigns to each subobject of the spectral presheaf an order-inverting
    [0,1]-valued function on the star poset: the state's weight of the
    projection carried by each component."""

    def __init__(self, state: State, S: BSubPoset, sigma: Presheaf | None = None):
        self.state = state
        self.star = S
        self.sigma = sigma or spectral_presheaf(S)
        self._weight_cache: dict = {}
        full = self(full_subobject(self.sigma))
        if any(v != QS1 for v in full):
            raise RuntimeError("measure not normalized on the full subobject")

    def _component_projection(self, sub: Subobject, node: int):
        P = self.star.oml
        mat = zeros(P.dim)
        for a in sub.part[node]:
            mat = mat_add(mat, P.proj[a].matrix)
        return mat

    def _component_weight(self, part: frozenset, node: int) -> QuadScalar:
        key = (node, part)
        got = self._weight_cache.get(key)
        if got is None:
            P = self.star.oml
            got = QS0
            for a in part:
                got = got + trace_product(self.state.density, P.proj[a].matrix)
            self._weight_cache[key] = got
        return got

    def __call__(self, sub: Subobject) -> tuple[QuadScalar, ...]:
        if not validate_subobject(self.sigma, sub):
            raise NotAMeasureError("subobject is not restriction-closed")
        vals = tuple(self._component_weight(sub.part[i], i)
                     for i in range(len(self.star.nodes)))
        for i, v in enumerate(vals):
            if v.sign() < 0 or (v - QS1).sign() > 0:
                raise RuntimeError("measure value outside [0,1]")
        for (p, c) in self.star.poset.covers():
            if (vals[c] - vals[p]).sign() < 0:
                raise RuntimeError("measure value not order-inverting")
        return vals

    def check_modular(self, s1: Subobject, s2: Subobject) -> bool:
        lhs_u = self(sub_union(s1, s2))
        lhs_i = self(sub_intersection(s1, s2))
        rhs1, rhs2 = self(s1), self(s2)
        return all(a + b == c + d for a, b, c, d in zip(lhs_u, lhs_i, rhs1, rhs2))


def measure_from_state(state: State, S: BSubPoset) -> PresheafMeasure:
    return PresheafMeasure(state, S)


def outer_subobject(S: BSubPoset, sigma: Presheaf, p: int) -> Subobject:
    """The subobject whose component at B collects the atoms under the outer
    daseinisation of p at B."""
    P = S.oml
    part = []
    for i, node in enumerate(S.nodes):
        d = daseinise_projection(P, p, node, "outer")
        part.append(frozenset(a for a in sigma.fibers[i] if P.leq(a, d)))
    return Subobject(tuple(part))


@dataclass
class ProjectionMeasure:
    oml: FiniteOML
    values: tuple


def projection_measure_from_presheaf_measure(
        mu: PresheafMeasure, subobject_budget: int | None = None) -> ProjectionMeasure:
    """Evaluate mu on the outer subobject of each element at every node whose
    algebra contains the element; all evaluations must agree (well-definedness)
    and the result must be finitely additive on orthogonal pairs sharing a
    context."""
    S = mu.star
    P = S.oml
    sigma = mu.sigma
    values = []
    for p in range(P.n):
        sub = outer_subobject(S, sigma, p)
        vals = mu(sub)
        nodes = [i for i, n in enumerate(S.nodes) if p in n.element_ids]
        got = {vals[i] for i in nodes}
        if len(got) != 1:
            raise NotAMeasureError(
                f"not induced by a state: {P.label(p)} valued ambiguously "
                f"across {[S.node_label(i) for i in nodes]}")
        values.append(got.pop())
    if subobject_budget is not None:
        for sub in all_subobjects(sigma, subobject_budget):
            vals = mu(sub)
            for i, node in enumerate(S.nodes):
                mat = mu._component_projection(sub, i)
                e = P.element_of_matrix(mat)
                if e is not None and vals[i] != values[e]:
                    raise NotAMeasureError(
                        f"not induced by a state: subobject disagrees at "
                        f"{S.node_label(i)} on {P.label(e)}")
    if values[P.zero] != QS0 or values[P.one] != QS1:
        raise NotAMeasureError("projection measure not normalized")
    for node in S.nodes:
        if node.height != 2:
            continue
        x, y, z = node.atoms
        for a, b in ((x, y), (x, z), (y, z)):
            j = P.poset.lub(a, b)
            if values[j] != values[a] + values[b]:
                raise NotAMeasureError(
                    f"not additive on {P.label(a)} _|_ {P.label(b)}")
    return ProjectionMeasure(P, tuple(values))


def check_locally_sigma_additive(mu: PresheafMeasure, family: list[Subobject]) -> bool:
    """On finite fibers this is just finite additivity: at every node where
    the family's components are pairwise disjoint, the value of the union is
    the sum of the values."""
    vals = [mu(s) for s in family]
    union = family[0]
    for s in family[1:]:
        union = sub_union(union, s)
    uvals = mu(union)
    ok = True
    for i in range(len(mu.star.nodes)):
        parts = [s.part[i] for s in family]
        disjoint = all(not (parts[a] & parts[b])
                       for a in range(len(parts)) for b in range(a + 1, len(parts)))
        if disjoint:
            total = QS0
            for v in vals:
                total = total + v[i]
            if uvals[i] != total:
                ok = False
    return ok


# ---------------------------------------------------------------------------
# Z2-valued states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Z2State:
    assignment: tuple  # atom id -> 0/1, as a tuple over sorted atoms
    atoms: tuple
    nonconstant: bool

    def value(self, atom: int) -> int:
        return self.assignment[self.atoms.index(atom)]


def z2_states(P: FiniteOML, budget: int | None = None) -> list[Z2State]:
    """All 0/1 atom assignments with an even number of ones in every block,
    by backtracking with forced-parity propagation (a block with two atoms
    decided determines its third)."""
    for b in P.blocks:
        if len(b.atoms) != 3:
            raise OmlError("Z2 states defined only for 3-atom blocks")
    if budget is None:
        budget = int(os.environ.get("OMSPECT_STATE_BUDGET", 1 << 20))
    atoms = tuple(P.atoms())
    n = len(atoms)
    pos = {a: i for i, a in enumerate(atoms)}
    blocks = [tuple(pos[a] for a in b.atoms) for b in P.blocks]
    by_atom: list[list[int]] = [[] for _ in atoms]
    for bi, blk in enumerate(blocks):
        for a in blk:
            by_atom[a].append(bi)
    # connected atom order so forced propagation fires as early as possible
    order, seen, frontier = [], set(), set()
    while len(order) < n:
        pool = frontier - seen
        nxt = min(pool) if pool else min(i for i in range(n) if i not in seen)
        order.append(nxt)
        seen.add(nxt)
        for bi in by_atom[nxt]:
            frontier.update(blocks[bi])
    assign = [-1] * n
    out: list[Z2State] = []

    def propagate(a: int, undo: list[int]) -> bool:
        queue = [a]
        while queue:
            x = queue.pop()
            for bi in by_atom[x]:
                t = blocks[bi]
                u = [y for y in t if assign[y] < 0]
                if not u:
                    if (assign[t[0]] + assign[t[1]] + assign[t[2]]) % 2:
                        return False
                elif len(u) == 1:
                    y = u[0]
                    val = sum(assign[z] for z in t if assign[z] >= 0) % 2
                    assign[y] = val
                    undo.append(y)
                    queue.append(y)
        return True

    def bt(k: int):
        while k < n and assign[order[k]] >= 0:
            k += 1
        if k == n:
            vals = tuple(assign)
            out.append(Z2State(vals, atoms, any(vals)))
            if len(out) > budget:
                raise BudgetExceededError("Z2 states", len(out), budget)
            return
        a = order[k]
        for v in (0, 1):
            assign[a] = v
            undo: list[int] = []
            if propagate(a, undo):
                bt(k + 1)
            for y in undo:
                assign[y] = -1
            assign[a] = -1

    bt(0)
    out.sort(key=lambda s: s.assignment)
    return out


def z2_state_from_klein_section(section: GlobalSection, klein) -> dict:
    """Atom assignment read off a Klein-presheaf global section."""
    node_atom = klein.meta["node_atom"]
    return {atom: section[node][0] for node, atom in node_atom.items()}
