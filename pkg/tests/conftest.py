"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package's own search and order
machinery: section counts come from filtering raw choice functions, range
containment from Gaussian elimination, clique structure from a second
implementation working on plain tuples.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from omspect import models
from omspect.scalars import QuadScalar


@pytest.fixture(scope="session")
def basis3():
    return models.load_model("basis3")


@pytest.fixture(scope="session")
def cube8():
    return models.load_model("cube8")


@pytest.fixture(scope="session")
def dim2():
    return models.load_model("dim2")


@pytest.fixture(scope="session")
def twoblock():
    return models.load_model("twoblock")


@pytest.fixture(scope="session")
def block4():
    return models.load_model("block4")


@pytest.fixture(scope="session")
def cab18():
    return models.load_model("cab18")


@pytest.fixture(scope="session")
def peres33():
    return models.load_model("peres33")


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def brute_force_sections(F):
    """All compatible choice functions, by filtering the raw product of the
    fibers against every comparable pair. No propagation, no ordering."""
    n = F.base.n
    out = []
    for choice in itertools.product(*F.fibers):
        ok = True
        for i in range(n):
            for j in range(n):
                if i != j and F.base.leq(j, i):
                    if F.res(i, j)[choice[i]] != choice[j]:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            out.append(choice)
    return out


def exact_rank(columns):
    """Rank of a list of QuadScalar column vectors via Gaussian elimination."""
    rows = [list(col) for col in columns]
    rank = 0
    cols = len(rows[0]) if rows else 0
    for c in range(cols):
        piv = None
        for r in range(rank, len(rows)):
            if rows[r][c]:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][c].inverse()
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def range_contained(p_matrix, q_matrix) -> bool:
    """Column space of p inside column space of q, decided exactly."""
    q_cols = [list(col) for col in zip(*q_matrix)]
    p_cols = [list(col) for col in zip(*p_matrix)]
    return exact_rank(q_cols) == exact_rank(q_cols + p_cols)


def tetrad_structure(rays, dim):
    """Independent clique scan over raw ray tuples: the maximal cliques of
    size dim, via greedy extension of every orthogonal set."""
    n = len(rays)

    def dotq(u, v):
        s = QuadScalar(0)
        for x, y in zip(u, v):
            s = s + x * y
        return s

    adj = [set() for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        if not dotq(rays[i].entries, rays[j].entries):
            adj[i].add(j)
            adj[j].add(i)
    full = []
    for combo in itertools.combinations(range(n), dim):
        if all(b in adj[a] for a, b in itertools.combinations(combo, 2)):
            common = set(range(n))
            for a in combo:
                common &= adj[a]
            if not common:
                full.append(combo)
    return full


def parity_refutes(contexts, n_rays) -> bool:
    """The counting argument: with each ray in exactly two contexts, an odd
    number of contexts cannot each contain exactly one marked ray."""
    per_ray = [0] * n_rays
    for c in contexts:
        for r in c:
            per_ray[r] += 1
    if any(k != 2 for k in per_ray):
        return False
    return len(contexts) % 2 == 1


def gf2_parity_solution_count(oml) -> int:
    """Solutions of the per-block even-parity system, by Gaussian elimination
    over GF(2)."""
    atoms = oml.atoms()
    pos = {a: i for i, a in enumerate(atoms)}
    rows = []
    for b in oml.blocks:
        r = 0
        for a in b.atoms:
            r |= 1 << pos[a]
        rows.append(r)
    rank = 0
    for col in range(len(atoms)):
        piv = next((i for i in range(rank, len(rows)) if (rows[i] >> col) & 1), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and (rows[i] >> col) & 1:
                rows[i] ^= rows[rank]
        rank += 1
    return 2 ** (len(atoms) - rank)
