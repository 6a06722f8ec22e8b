"""Heyting algebras of downsets of finite posets and the brute-force checker
for the Peirce-style height formulas."""
from __future__ import annotations

import os

from .posets import BudgetExceededError, FinitePoset


def downset_budget(default: int = 100000) -> int:
    return int(os.environ.get("OMSPECT_DOWNSET_BUDGET", default))


class DownsetAlgebra:
    """All downsets of a finite poset as bitmasks; meet is intersection,
    join is union, implication A -> B collects the nodes whose principal
    downset meets A only inside B."""

    def __init__(self, base: FinitePoset, budget: int | None = None):
        budget = downset_budget() if budget is None else budget
        self.base = base
        self.elements = sorted(base.all_downsets(budget))
        self.index = {d: i for i, d in enumerate(self.elements)}
        self.bottom = 0
        self.top = (1 << base.n) - 1
        self._imp_cache: dict[tuple[int, int], int] = {}

    def __len__(self):
        return len(self.elements)

    def meet(self, a: int, b: int) -> int:
        return a & b

    def join(self, a: int, b: int) -> int:
        return a | b

    def imp(self, a: int, b: int) -> int:
        key = (a, b)
        got = self._imp_cache.get(key)
        if got is not None:
            return got
        out = 0
        for q in range(self.base.n):
            if self.base.down[q] & a & ~b == 0:
                out |= 1 << q
        self._imp_cache[key] = out
        return out

    def check_adjunction(self, a: int, b: int, x: int) -> bool:
        """A /\\ X <= B iff X <= (A -> B)."""
        return ((a & x) & ~b == 0) == ((x & ~self.imp(a, b)) == 0)


def downset_algebra(Q: FinitePoset, budget: int | None = None) -> DownsetAlgebra:
    return DownsetAlgebra(Q, budget)


def poset_height(Q: FinitePoset) -> int:
    """Length of the longest chain minus one."""
    return Q.height()


def _peirce(H: DownsetAlgebra, v: int, t: int) -> int:
    return H.imp(H.imp(H.imp(v, t), v), v)


def satisfies_phi(H: DownsetAlgebra, k: int) -> bool:
    """Brute-force validity of the height formulas.

    Level 0 is ((y->x)->y)->y over all x, y. Each next level wraps the full
    value set of the previous scheme in another Peirce shell with a fresh
    variable, quantifying over all free variables jointly.
    """
    if k not in (0, 1, 2):
        raise ValueError("k must be 0, 1 or 2")
    top = H.top
    values = set(H.elements)
    level = 0
    while True:
        out = set()
        ok = True
        for v in H.elements:
            for t in values:
                r = _peirce(H, v, t)
                out.add(r)
                if r != top:
                    ok = False
        if level == k:
            return ok
        values = out
        level += 1
