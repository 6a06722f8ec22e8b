"""Daseinisation: approximating projections and pre-diagonalized self-adjoint
operators inside small Boolean contexts, the spectral order, separating
contexts for distinct operators, and the paired inner/outer evaluation map
into order-preserving/order-inverting value functions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bsub import BooleanSubalg, BSubPoset
from .oml import FiniteOML, OmlError


class DaseinisationUndefinedError(OmlError):
    pass


class OperatorError(ValueError):
    pass


def daseinise_projection(P: FiniteOML, p: int, B: BooleanSubalg,
                         direction: str = "outer") -> int:
    """Smallest element of B above p (outer) or largest below p (inner),
    found by exhaustive scan of B's at most 16 elements."""
    if direction == "outer":
        cands = [b for b in B.element_ids if P.leq(p, b)]
        for c in cands:
            if all(P.leq(c, d) for d in cands):
                return c
    elif direction == "inner":
        cands = [b for b in B.element_ids if P.leq(b, p)]
        for c in cands:
            if all(P.leq(d, c) for d in cands):
                return c
    else:
        raise ValueError(f"unknown direction {direction!r}")
    raise DaseinisationUndefinedError(
        f"daseinisation undefined for {P.label(p)} in {sorted(B.atoms)}")


# ---------------------------------------------------------------------------
# pre-diagonalized operators and spectral families
# ---------------------------------------------------------------------------

class SelfAdjointOp:
    """Sum of rational coefficients times pairwise-orthogonal projections
    resolving the identity. Equal coefficients are merged at construction so
    the spectral family has strictly increasing steps."""

    def __init__(self, oml: FiniteOML, terms):
        self.oml = oml
        merged: dict[Fraction, int] = {}
        for coeff, proj in terms:
            coeff = Fraction(coeff)
            if coeff in merged:
                j = oml.poset.lub(merged[coeff], proj)
                if j is None:
                    raise OperatorError("merged projections have no join")
                merged[coeff] = j
            else:
                merged[coeff] = proj
        self.terms: tuple[tuple[Fraction, int], ...] = tuple(sorted(merged.items()))
        projs = [p for _, p in self.terms]
        for i, p in enumerate(projs):
            if p == oml.zero:
                raise OperatorError("zero projection in a term")
            for q in projs[i + 1:]:
                if not oml.orthogonal(p, q):
                    raise OperatorError(
                        f"projections {oml.label(p)}, {oml.label(q)} not orthogonal")
        self._family = self._build_family()
        if self._family.steps[-1][1] != oml.one:
            raise OperatorError("projections do not resolve the identity")

    def _build_family(self) -> "SpectralFamily":
        steps = []
        cur = None
        for coeff, proj in self.terms:
            if cur is None:
                cur = proj
            else:
                cur = self.oml.poset.lub(cur, proj)
                if cur is None:
                    raise OperatorError("cumulative spectral projection missing")
            steps.append((coeff, cur))
        return SpectralFamily(tuple(steps))

    def spectral_family(self) -> "SpectralFamily":
        return self._family

    def coefficient_at(self, atom: int) -> Fraction:
        """Coefficient applying to an atom lying under one of the terms."""
        for coeff, proj in self.terms:
            if self.oml.leq(atom, proj):
                return coeff
        raise OperatorError(f"atom {self.oml.label(atom)} under no term")

    def __eq__(self, other):
        return isinstance(other, SelfAdjointOp) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        body = " + ".join(f"{c}*{self.oml.label(p)}" for c, p in self.terms)
        return f"<op {body}>"


@dataclass(frozen=True)
class SpectralFamily:
    steps: tuple[tuple[Fraction, int], ...]  # strictly increasing, cumulative

    def at(self, lam: Fraction, zero: int) -> int:
        """E_lam: the last step at or below lam (zero below the first step)."""
        out = zero
        for l, e in self.steps:
            if l <= lam:
                out = e
            else:
                break
        return out

    def grid(self):
        return [l for l, _ in self.steps]


def spectral_order_leq(A: SelfAdjointOp, B: SelfAdjointOp) -> bool:
    """A precedes B iff B's spectral projections sit below A's at every step."""
    P = A.oml
    ea, eb = A.spectral_family(), B.spectral_family()
    for lam in sorted(set(ea.grid()) | set(eb.grid())):
        if not P.leq(eb.at(lam, P.zero), ea.at(lam, P.zero)):
            return False
    return True


def outer_daseinise_operator(A: SelfAdjointOp, B: BooleanSubalg) -> SelfAdjointOp:
    """Per atom of B, the smallest step value whose spectral projection
    dominates the atom."""
    P = A.oml
    fam = A.spectral_family()
    terms = []
    for a in B.atoms:
        for lam, e in fam.steps:
            if P.leq(a, e):
                terms.append((lam, a))
                break
        else:
            raise OperatorError("atom never dominated; family does not reach 1")
    return SelfAdjointOp(P, terms)


def inner_daseinise_operator(A: SelfAdjointOp, B: BooleanSubalg) -> SelfAdjointOp:
    """Per atom of B, the largest step value lam with the atom orthogonal to
    every strictly earlier spectral projection."""
    P = A.oml
    fam = A.spectral_family()
    terms = []
    for a in B.atoms:
        best = None
        prev = P.zero
        for lam, e in fam.steps:
            if P.leq(a, P.ortho[prev]):
                best = lam
            prev = e
        if best is None:
            raise OperatorError("atom below the first spectral projection's complement fails")
        terms.append((best, a))
    return SelfAdjointOp(P, terms)


class OperatorSection:
    """The family B -> outer daseinisation of A at B over a star poset, with
    the coherence condition verified on every cover pair."""

    def __init__(self, A: SelfAdjointOp, S: BSubPoset):
        self.operator = A
        self.star = S
        self.values = [outer_daseinise_operator(A, node) for node in S.nodes]
        for (p, c) in S.poset.covers():
            via = outer_daseinise_operator(self.values[p], S.nodes[c])
            if via != self.values[c]:
                raise RuntimeError(
                    f"outer section incoherent on cover {S.node_label(p)} -> "
                    f"{S.node_label(c)}")

    def __getitem__(self, node: int) -> SelfAdjointOp:
        return self.values[node]

    def __eq__(self, other):
        return isinstance(other, OperatorSection) and self.values == other.values

    def __hash__(self):
        return hash(tuple(self.values))


def outer_global_section(A: SelfAdjointOp, S: BSubPoset) -> OperatorSection:
    return OperatorSection(A, S)


# ---------------------------------------------------------------------------
# separating contexts
# ---------------------------------------------------------------------------

def separating_context(A: SelfAdjointOp, A2: SelfAdjointOp,
                       S: BSubPoset | None = None) -> BooleanSubalg:
    """A 4-element context at which the outer daseinisations of two distinct
    operators provably differ.

    At the first grid point where the spectral families differ, the family
    that fails to sit below the other supplies the generating projection;
    when that witness is trivial the other family's projection (or any
    nontrivial element) separates through the complementary atom.
    """
    P = A.oml
    if A == A2:
        raise OperatorError("operators equal")
    ea, eb = A.spectral_family(), A2.spectral_family()
    grid = sorted(set(ea.grid()) | set(eb.grid()))
    lam0 = next(l for l in grid if ea.at(l, P.zero) != eb.at(l, P.zero))
    x, y = ea.at(lam0, P.zero), eb.at(lam0, P.zero)
    if not P.leq(y, x) and y != P.one:
        q = y
    elif not P.leq(x, y) and x != P.one:
        q = x
    else:
        other = x if y == P.one else y
        if other != P.zero:
            q = other
        else:
            q = next((e for e in range(P.n) if e not in (P.zero, P.one)), None)
            if q is None:
                raise OperatorError("no height-1 context exists in this model")
    node = BooleanSubalg(frozenset({P.zero, q, P.ortho[q], P.one}),
                         tuple(sorted((q, P.ortho[q]))))
    if outer_daseinise_operator(A, node) == outer_daseinise_operator(A2, node):
        raise RuntimeError("separating context construction failed to separate")
    return node


# ---------------------------------------------------------------------------
# paired inner/outer evaluation into value functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValueFiber:
    """An order-preserving alpha and order-inverting beta on the principal
    downset of a star node, with alpha <= beta pointwise."""
    nodes: tuple[int, ...]
    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    def restrict(self, keep: tuple[int, ...]) -> "ValueFiber":
        idx = {n: i for i, n in enumerate(self.nodes)}
        return ValueFiber(keep,
                          tuple(self.alpha[idx[n]] for n in keep),
                          tuple(self.beta[idx[n]] for n in keep))

    def sort_key(self):
        return (self.nodes, self.alpha, self.beta)

    def __str__(self):
        pairs = ",".join(f"{n}:({a},{b})" for n, a, b in
                         zip(self.nodes, self.alpha, self.beta))
        return "{" + pairs + "}"


def value_fiber_checks(S: BSubPoset, vf: ValueFiber) -> list[str]:
    bad = []
    for i, ni in enumerate(vf.nodes):
        for j, nj in enumerate(vf.nodes):
            if ni != nj and S.poset.leq(ni, nj):
                if vf.alpha[i] > vf.alpha[j]:
                    bad.append("alpha not order-preserving")
                if vf.beta[i] < vf.beta[j]:
                    bad.append("beta not order-inverting")
    for a, b in zip(vf.alpha, vf.beta):
        if a > b:
            bad.append("alpha exceeds beta")
    return bad


def delta_check(A: SelfAdjointOp, S: BSubPoset):
    """Natural transformation from the spectral presheaf into the finite slice
    of the value presheaf spanned by A's inner/outer daseinisations."""
    from .presheaves import NatTrans, Presheaf, check_naturality, spectral_presheaf

    P = A.oml
    sigma = spectral_presheaf(S)
    inner = [inner_daseinise_operator(A, node) for node in S.nodes]
    outer = [outer_daseinise_operator(A, node) for node in S.nodes]
    downsets = [tuple(sorted(j for j in range(len(S.nodes))
                             if S.poset.leq(j, i))) for i in range(len(S.nodes))]
    comps: list[dict] = []
    for i, node in enumerate(S.nodes):
        comp = {}
        for atom in sigma.fibers[i]:
            alphas, betas = [], []
            for j in downsets[i]:
                down_atom = sigma.res(i, j)[atom]
                alphas.append(inner[j].coefficient_at(down_atom))
                betas.append(outer[j].coefficient_at(down_atom))
            vf = ValueFiber(downsets[i], tuple(alphas), tuple(betas))
            problems = value_fiber_checks(S, vf)
            if problems:
                raise RuntimeError(f"invalid value pair at {S.node_label(i)}: {problems}")
            comp[atom] = vf
        comps.append(comp)
    # materialize the finite target sub-presheaf: component images closed
    # under restriction
    fibers: list[set] = [set(c.values()) for c in comps]
    changed = True
    while changed:
        changed = False
        for (p, c) in S.poset.covers():
            for vf in list(fibers[p]):
                r = vf.restrict(downsets[c])
                if r not in fibers[c]:
                    fibers[c].add(r)
                    changed = True
    tfibers = [tuple(sorted(f, key=ValueFiber.sort_key)) for f in fibers]
    cover_res = {}
    for (p, c) in S.poset.covers():
        cover_res[(p, c)] = {vf: vf.restrict(downsets[c]) for vf in tfibers[p]}
    target = Presheaf(S.poset, tfibers, cover_res, list(sigma.labels),
                      meta={"star": S, "kind": "value"})
    t = NatTrans(sigma, target, comps)
    problems = check_naturality(t)
    if problems:
        raise RuntimeError(f"naturality failed: {problems}")
    return t
