"""Finite posets as bitmask order matrices, with meets, joins and downsets."""
from __future__ import annotations


class BudgetExceededError(RuntimeError):
    def __init__(self, what: str, count: int, budget: int):
        super().__init__(f"instance too large: {what} reached {count} (budget {budget})")
        self.count = count
        self.budget = budget


class FinitePoset:
    """Partial order on 0..n-1. down[i] is the bitmask of j with j <= i."""

    def __init__(self, n: int, down: list[int]):
        self.n = n
        self.down = list(down)
        self.up = [0] * n
        for i in range(n):
            if not (self.down[i] >> i) & 1:
                raise ValueError("order not reflexive")
            m = self.down[i]
            while m:
                j = (m & -m).bit_length() - 1
                self.up[j] |= 1 << i
                m &= m - 1
        for i in range(n):
            m = self.down[i]
            acc = 0
            mm = m
            while mm:
                j = (mm & -mm).bit_length() - 1
                if self.down[j] & ~m:
                    raise ValueError("order not transitive")
                if i != j and (self.down[j] >> i) & 1:
                    raise ValueError("order not antisymmetric")
                mm &= mm - 1
        self._covers = None
        self._heights = None

    @classmethod
    def from_leq(cls, n: int, leq) -> "FinitePoset":
        down = [0] * n
        for i in range(n):
            for j in range(n):
                if leq(j, i):
                    down[i] |= 1 << j
        return cls(n, down)

    def leq(self, i: int, j: int) -> bool:
        return bool((self.down[j] >> i) & 1)

    def covers(self) -> list[tuple[int, int]]:
        """Cover pairs (parent, child): parent covers child."""
        if self._covers is None:
            out = []
            for i in range(self.n):
                strict = self.down[i] & ~(1 << i)
                m = strict
                while m:
                    j = (m & -m).bit_length() - 1
                    between = self.down[i] & self.up[j] & ~(1 << i) & ~(1 << j)
                    if not between:
                        out.append((i, j))
                    m &= m - 1
            self._covers = sorted(out)
        return self._covers

    def heights(self) -> list[int]:
        if self._heights is None:
            h = [0] * self.n
            for i in sorted(range(self.n), key=lambda x: bin(self.down[x]).count("1")):
                strict = self.down[i] & ~(1 << i)
                m = strict
                best = -1
                while m:
                    j = (m & -m).bit_length() - 1
                    best = max(best, h[j])
                    m &= m - 1
                h[i] = best + 1
            self._heights = h
        return self._heights

    def height(self) -> int:
        return max(self.heights(), default=0)

    def _mask_elements(self, mask: int):
        while mask:
            yield (mask & -mask).bit_length() - 1
            mask &= mask - 1

    def glb(self, i: int, j: int):
        lower = self.down[i] & self.down[j]
        for x in self._mask_elements(lower):
            if self.down[x] == lower:
                return x
        return None

    def lub(self, i: int, j: int):
        upper = self.up[i] & self.up[j]
        for x in self._mask_elements(upper):
            if self.up[x] == upper:
                return x
        return None

    def lub_set(self, ids):
        ids = list(ids)
        if not ids:
            return None
        upper = -1
        for i in ids:
            upper &= self.up[i]
        for x in self._mask_elements(upper & ((1 << self.n) - 1)):
            if self.up[x] == upper & ((1 << self.n) - 1):
                return x
        return None

    def maximal(self) -> list[int]:
        return [i for i in range(self.n) if self.up[i] == (1 << i)]

    def minimal(self) -> list[int]:
        return [i for i in range(self.n) if self.down[i] == (1 << i)]

    def topo_order(self) -> list[int]:
        return sorted(range(self.n), key=lambda i: (self.heights()[i], i))

    def all_downsets(self, budget: int | None = None) -> list[int]:
        """All down-closed subsets as bitmasks, in a fixed order."""
        result = [0]
        for i in self.topo_order():
            preds = self.down[i] & ~(1 << i)
            grown = [D | (1 << i) for D in result if preds & ~D == 0]
            result += grown
            if budget is not None and len(result) > budget:
                raise BudgetExceededError("downsets", len(result), budget)
        return result

    def restricted(self, keep: list[int]):
        """Induced subposet; returns (poset, old-index list in new order)."""
        keep = sorted(keep)
        pos = {old: new for new, old in enumerate(keep)}
        down = []
        for old in keep:
            m = 0
            for o in self._mask_elements(self.down[old]):
                if o in pos:
                    m |= 1 << pos[o]
            down.append(m)
        return FinitePoset(len(keep), down), keep


def transitive_closure(n: int, rel: set[tuple[int, int]]) -> list[int]:
    """Reflexive-transitive closure of a relation, as down-masks."""
    down = [1 << i for i in range(n)]
    for (a, b) in rel:  # a <= b
        down[b] |= 1 << a
    changed = True
    while changed:
        changed = False
        for i in range(n):
            m = down[i]
            acc = m
            mm = m
            while mm:
                j = (mm & -mm).bit_length() - 1
                acc |= down[j]
                mm &= mm - 1
            if acc != m:
                down[i] = acc
                changed = True
    return down
