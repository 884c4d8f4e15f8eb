"""Ground truth: solution counts for xz = y^2 and z = y x^-1 y, solution-free
predicates, an exhaustive extremal search and the abelian-subgroup averaging step.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass

import numpy as np

from .errors import BoundViolated, CapExceeded, NotSubgroup
from .groups import GroupTable, Subset, is_subgroup, product_set


class EquationKind(enum.Enum):
    SQUARE = "square"        # x z = y^2
    INVARIANT = "invariant"  # z = y x^-1 y

    @classmethod
    def parse(cls, text) -> "EquationKind":
        if isinstance(text, cls):
            return text
        t = str(text).strip().lower()
        for kind in cls:
            if t in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(f"unknown equation {text!r}; use 'square' or 'invariant'")


def solve_z(g: GroupTable, x, y, eq: EquationKind):
    """The unique z completing (x, y, z); works on scalars or arrays."""
    if eq is EquationKind.SQUARE:
        return g.mul[g.inv[x], g.sq[y]]
    return g.mul[g.mul[y, g.inv[x]], y]


def count_triples(A: Subset, eq: EquationKind = EquationKind.SQUARE) -> tuple[int, int]:
    """(total, nontrivial) numbers of solutions (x, y, z) in A^3; nontrivial means x != y."""
    eq = EquationKind.parse(eq)
    g = A.group
    ids = A.ids
    if not len(ids):
        return 0, 0
    z = solve_z(g, ids[:, None], ids[None, :], eq)
    hit = A.bits[z]
    total = int(hit.sum())
    diag = int(np.trace(hit))
    return total, total - diag


def is_solution_free(A: Subset, eq: EquationKind = EquationKind.SQUARE) -> bool:
    return count_triples(A, eq)[1] == 0


def _forbidden(g: GroupTable, eq: EquationKind):
    """Pair masks and triple conflicts: conflict[u][v] has bit w when {u, v, w}
    carries a nontrivial solution."""
    n = g.order
    xs, ys = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    zs = solve_z(g, xs, ys, eq)
    pair = [0] * n
    conflict = [[0] * n for _ in range(n)]
    for x, y, z in zip(xs.ravel().tolist(), ys.ravel().tolist(), zs.ravel().tolist()):
        if x == y:
            continue
        s = {x, y, z}
        if len(s) == 2:
            u, v = tuple(s)
            pair[u] |= 1 << v
            pair[v] |= 1 << u
        else:
            for u, v, w in ((x, y, z), (x, z, y), (y, z, x)):
                conflict[u][v] |= 1 << w
                conflict[v][u] |= 1 << w
    return pair, conflict


@dataclass
class SearchReport:
    best_set: Subset
    best_size: int
    exhaustive: bool
    nodes_explored: int
    elapsed: float
    eq: EquationKind = EquationKind.SQUARE

    def density(self) -> float:
        return self.best_size / self.best_set.group.order

    def to_dict(self) -> dict:
        g = self.best_set.group
        return {"group": g.name, "order": g.order, "eq": self.eq.value, "best_size": self.best_size,
                "best_set": self.best_set.elements(), "exhaustive": self.exhaustive,
                "nodes_explored": self.nodes_explored}

    def csv_row(self) -> list:
        g = self.best_set.group
        return [g.name, g.order, self.eq.value, self.best_size, self.best_size / g.order]


CSV_HEADER = ["group", "order", "eq", "max_size", "density"]


def _bits_to_ids(b: int) -> list[int]:
    out = []
    while b:
        low = b & -b
        out.append(low.bit_length() - 1)
        b ^= low
    return out


def _greedy(n, pair, conflict, start: list[int]) -> int:
    cur, forb = 0, 0
    chosen: list[int] = []
    for v in start + list(range(n)):
        if (cur >> v) & 1 or (forb >> v) & 1:
            continue
        add = pair[v]
        for u in chosen:
            add |= conflict[u][v]
        cur |= 1 << v
        forb |= add
        chosen.append(v)
    return cur


def max_solution_free(G: GroupTable, eq: EquationKind = EquationKind.SQUARE,
                      budget: int | None = 2_000_000) -> SearchReport:
    """Largest A with no nontrivial solution, by branch and bound over element ids."""
    eq = EquationKind.parse(eq)
    t0 = time.perf_counter()
    n = G.order
    pair, conflict = _forbidden(G, eq)
    # translation symmetry lets us put the identity in A
    translate_ok = eq is EquationKind.INVARIANT or G.abelian
    best = _greedy(n, pair, conflict, [0])
    best_size = bin(best).count("1")
    nodes = 0
    exhausted_budget = False
    full = (1 << n) - 1

    def rec(cur: int, chosen: list[int], cand: int, size: int):
        nonlocal best, best_size, nodes, exhausted_budget
        nodes += 1
        if budget is not None and nodes > budget:
            exhausted_budget = True
            return
        if size > best_size:
            best, best_size = cur, size
        while cand:
            if size + bin(cand).count("1") <= best_size:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            forb = pair[v]
            for u in chosen:
                forb |= conflict[u][v]
            chosen.append(v)
            rec(cur | low, chosen, cand & ~forb, size + 1)
            chosen.pop()
            if exhausted_budget:
                return

    if n:
        if translate_ok:
            rec(1, [0], full & ~1 & ~pair[0], 1)
        else:
            rec(0, [], full, 0)
    bits = np.zeros(n, dtype=bool)
    bits[_bits_to_ids(best)] = True
    return SearchReport(Subset(G, bits), best_size, not exhausted_budget, nodes,
                        time.perf_counter() - t0, eq)


def best_coset_translate(A: Subset, H: Subset) -> tuple[int, int]:
    """argmax_t |tH cap A| (smallest t on ties) and the maximum."""
    if not is_subgroup(H):
        raise NotSubgroup("H is not a subgroup")
    g = A.group
    counts = A.bits[g.mul[:, H.ids]].sum(axis=1)
    t = int(np.argmax(counts))
    size = int(counts[t])
    need = -(-A.card * H.card // g.order)
    if size < need:
        raise BoundViolated(f"|tH cap A| = {size} < {need}")
    return t, size


def commuting_matrix(G: GroupTable) -> np.ndarray:
    return G.mul == G.mul.T


def largest_abelian_subgroup(G: GroupTable, cap: int = 128) -> Subset:
    """A maximum-order abelian subgroup, by search over centralisers."""
    if G.order > cap:
        raise CapExceeded(f"|G| = {G.order} exceeds the cap {cap}")
    if G.abelian:
        return G.full()
    comm = commuting_matrix(G)
    cyc = {}

    def cyclic_of(x: int) -> Subset:
        if x not in cyc:
            els, y = [G.id_elem], x
            while y != G.id_elem:
                els.append(y)
                y = int(G.mul[y, x])
            cyc[x] = G.subset(els)
        return cyc[x]

    best = G.identity_set()
    seen = set()
    stack = [G.identity_set()]
    while stack:
        H = stack.pop()
        if H.key() in seen:
            continue
        seen.add(H.key())
        if H.card > best.card or (H.card == best.card and H.elements() < best.elements()):
            best = H
        cent = comm[H.ids].all(axis=0)
        if cent.sum() <= best.card:
            continue
        for x in np.flatnonzero(cent & ~H.bits):
            stack.append(product_set(H, cyclic_of(int(x))))
    return best


def density_table(groups, eq: EquationKind, budget: int | None = 2_000_000) -> list[list]:
    rows = []
    for _, G in groups:
        rows.append(max_solution_free(G, eq, budget).csv_row())
    return rows

